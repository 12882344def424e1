#include "biholder/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace biholder {

namespace {

ColoredCover singleton_cover(const FiniteMetricSpace& space, double delta, double sigma) {
  ColoredCover cover;
  std::size_t n = space.size();
  cover.sets.reserve(n);
  for (std::size_t x = 0; x < n; ++x) {
    CoverSet s;
    s.memberIds = {x};
    s.anchor = x;
    s.color = 0;
    cover.sets.push_back(std::move(s));
  }
  cover.targetDelta = delta;
  cover.sigma = sigma;
  cover.meshCert = 0.0;
  cover.lebesgueCert = space.minPairwiseDistance();
  cover.multiplicityCert = 1;
  cover.colorCount = 1;
  cover.certified = cover.lebesgueCert >= sigma * delta * (1.0 - 1e-12);
  return cover;
}

bool all_singletons(const ColoredCover& cover) {
  if (cover.sets.empty()) return false;
  for (const CoverSet& s : cover.sets)
    if (s.memberIds.size() != 1) return false;
  return true;
}

ColoredCover stage_cover(const FiniteMetricSpace& space, const ScaleSchedule& schedule,
                         const RunOptions& options, double delta) {
  double sigma = schedule.params.sigma;
  if (delta < space.minPairwiseDistance()) return singleton_cover(space, delta, sigma);
  if (options.coverSource == CoverSource::Greedy) {
    ColoredCover cover = build_greedy_cover(space, delta, sigma);
    if (!cover.certified) throw std::runtime_error("greedy cover failed certification");
    return cover;
  }
  // Shallowest structured level whose certificates meet the stage scale.
  for (int level = 1; level <= options.maxStructuredLevel; ++level) {
    ColoredCover cover;
    try {
      cover = build_structured_cover(space, level);
    } catch (const std::invalid_argument&) {
      break;
    }
    if (cover.meshCert <= delta * (1.0 + 1e-12) &&
        cover.lebesgueCert >= sigma * delta * (1.0 - 1e-12)) {
      cover.targetDelta = delta;
      cover.sigma = sigma;
      cover.certified = true;
      return cover;
    }
  }
  throw std::runtime_error("no structured cover certifies at this scale");
}

}  // namespace

void SparseVector::set(std::size_t k, double v) {
  if (v == 0.0) entries.erase(k);
  else entries[k] = v;
}

double SparseVector::get(std::size_t k) const {
  auto it = entries.find(k);
  return it == entries.end() ? 0.0 : it->second;
}

double SparseVector::norm() const {
  double s = 0.0;
  for (const auto& [k, v] : entries) s += v * v;
  return std::sqrt(s);
}

double dist(const SparseVector& a, const SparseVector& b) {
  double s = 0.0;
  auto ia = a.entries.begin();
  auto ib = b.entries.begin();
  while (ia != a.entries.end() || ib != b.entries.end()) {
    double d = 0.0;
    if (ib == b.entries.end() || (ia != a.entries.end() && ia->first < ib->first)) {
      d = ia->second;
      ++ia;
    } else if (ia == a.entries.end() || ib->first < ia->first) {
      d = -ib->second;
      ++ib;
    } else {
      d = ia->second - ib->second;
      ++ia;
      ++ib;
    }
    s += d * d;
  }
  return std::sqrt(s);
}

EmbeddingStage initial_stage(const FiniteMetricSpace& space) {
  EmbeddingStage stage;
  stage.index = 0;
  stage.coordOffset = 0;
  stage.coordCount = 0;
  stage.images.resize(space.size());
  return stage;
}

EmbeddingStage refine_stage(const FiniteMetricSpace& space, const EmbeddingStage& prev,
                            const ColoredCover& cover, const ScaleSchedule& schedule,
                            int i) {
  if (i != prev.index) throw std::invalid_argument("previous stage index mismatch");
  if (i + 1 >= static_cast<int>(schedule.logEps.size()))
    throw std::invalid_argument("schedule does not reach the requested stage");
  auto epsNext = linear_of_log2(schedule.logEps[static_cast<std::size_t>(i + 1)]);
  if (!epsNext)
    throw std::domain_error("stage scale is not representable in double precision");
  std::size_t n = space.size();
  if (prev.images.size() != n) throw std::invalid_argument("stage/space size mismatch");

  EmbeddingStage stage;
  stage.index = i + 1;
  stage.cover = cover;
  stage.coordOffset = prev.coordCount;
  stage.coordCount = prev.coordCount + cover.sets.size();

  stage.vertices.reserve(cover.sets.size());
  for (std::size_t k = 0; k < cover.sets.size(); ++k) {
    if (cover.sets[k].memberIds.size() >= n)
      throw std::invalid_argument("cover set equals the whole space");
    SparseVector p = prev.images[cover.sets[k].anchor];
    p.set(stage.coordOffset + k, *epsNext / 2.0);
    p.dimensionHint = stage.coordCount;
    stage.vertices.push_back(std::move(p));
  }

  stage.images.resize(n);
  for (std::size_t x = 0; x < n; ++x) {
    double total = 0.0;
    std::vector<std::pair<std::size_t, double>> active;
    for (std::size_t k = 0; k < cover.sets.size(); ++k) {
      double w = weight(space, cover.sets[k], x);
      if (w > 0.0) {
        active.emplace_back(k, w);
        total += w;
      }
    }
    if (!(total > 0.0))
      throw std::invalid_argument(
          "zero weight denominator: cover violates its Lebesgue certificate");
    SparseVector img;
    img.dimensionHint = stage.coordCount;
    for (const auto& [k, w] : active) {
      double lambda = w / total;
      for (const auto& [coord, value] : stage.vertices[k].entries)
        img.entries[coord] += lambda * value;
    }
    for (auto it = img.entries.begin(); it != img.entries.end();)
      it = it->second == 0.0 ? img.entries.erase(it) : std::next(it);
    stage.images[x] = std::move(img);
  }
  return stage;
}

ConstructionRun run_construction(const FiniteMetricSpace& space,
                                 const ScaleSchedule& schedule, int stages,
                                 const RunOptions& options) {
  if (stages < 1) throw std::invalid_argument("at least one stage is required");
  if (schedule.stages < stages)
    throw std::invalid_argument("schedule does not cover the requested stage count");
  if (!schedule.params.relaxed && schedule.logEps.at(1) < -60.0)
    throw std::domain_error("stage-1 scale falls below the double-precision guard");

  ConstructionRun run;
  run.stages.push_back(initial_stage(space));
  for (int i = 0; i < stages; ++i) {
    auto deltaNext = linear_of_log2(schedule.logDelta.at(static_cast<std::size_t>(i + 1)));
    auto epsNext = linear_of_log2(schedule.logEps.at(static_cast<std::size_t>(i + 1)));
    if (!deltaNext || !epsNext) {
      run.stopReason =
          "stage " + std::to_string(i + 1) + ": scales fall below the representable range";
      break;
    }
    ColoredCover cover;
    try {
      cover = stage_cover(space, schedule, options, *deltaNext);
    } catch (const std::exception& e) {
      throw std::runtime_error("stage " + std::to_string(i + 1) + ": " + e.what());
    }
    run.stages.push_back(refine_stage(space, run.stages.back(), cover, schedule, i));
    if (run.stabilizedAt < 0 && all_singletons(cover)) {
      run.stabilizedAt = static_cast<int>(run.stages.size()) - 1;
      if (options.stopAtStabilization && i + 1 < stages) {
        run.stopReason = "stabilized: covers are singletons below the sample resolution";
        break;
      }
    }
  }
  return run;
}

LimitPoint evaluate_limit(const std::vector<EmbeddingStage>& stages,
                          const ScaleSchedule& schedule, std::size_t x) {
  if (stages.empty()) throw std::invalid_argument("no stages built");
  const EmbeddingStage& last = stages.back();
  LimitPoint out;
  out.image = last.images.at(x);
  double tailLog = schedule.logEps.at(static_cast<std::size_t>(last.index) + 1);
  out.tailBound = 2.0 * std::exp2(std::max(tailLog, -kLinearizableLog2));
  return out;
}

SimplexComplex enumerate_simplices(const EmbeddingStage& stage, int dimension) {
  if (stage.index < 1) throw std::invalid_argument("simplices need a refined stage");
  std::size_t n = stage.images.size();
  std::size_t setCount = stage.cover.sets.size();
  std::vector<std::vector<char>> flags(setCount, std::vector<char>(n, 0));
  for (std::size_t k = 0; k < setCount; ++k)
    for (std::size_t id : stage.cover.sets[k].memberIds) flags[k][id] = 1;

  std::set<std::vector<std::size_t>> realized;
  for (std::size_t x = 0; x < n; ++x) {
    std::vector<std::size_t> s;
    for (std::size_t k = 0; k < setCount; ++k)
      if (flags[k][x]) s.push_back(k);
    if (!s.empty()) realized.insert(std::move(s));
  }

  std::vector<std::vector<std::size_t>> maximal;
  for (const auto& s : realized) {
    bool dominated = false;
    for (const auto& t : realized) {
      if (t.size() <= s.size()) continue;
      if (std::includes(t.begin(), t.end(), s.begin(), s.end())) {
        dominated = true;
        break;
      }
    }
    if (!dominated) maximal.push_back(s);
  }

  std::set<std::vector<std::size_t>> all;
  for (const auto& s : maximal) {
    std::size_t m = s.size();
    for (std::size_t mask = 1; mask < (std::size_t{1} << m); ++mask) {
      std::vector<std::size_t> face;
      for (std::size_t b = 0; b < m; ++b)
        if (mask & (std::size_t{1} << b)) face.push_back(s[b]);
      all.insert(std::move(face));
    }
  }

  SimplexComplex complex;
  complex.stage = stage.index;
  complex.simplices.assign(all.begin(), all.end());
  complex.countBound =
      std::pow(static_cast<double>(setCount), static_cast<double>(dimension) + 2.0);
  complex.countBoundOk =
      static_cast<double>(complex.simplices.size()) <= complex.countBound * (1.0 + 1e-12);
  return complex;
}

}  // namespace biholder
