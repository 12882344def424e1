#include "biholder/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "biholder/logdomain.hpp"
#include "biholder/rational.hpp"

namespace biholder {
namespace {

constexpr double kRelTol = 1e-9;
constexpr double kRecheckBand = 1e-7;
constexpr std::size_t kMaxWitnesses = 10;
constexpr double kInf = std::numeric_limits<double>::infinity();

double scale_of(double lhs, double rhs) {
  return std::max({1.0, std::abs(lhs), std::abs(rhs)});
}

HighFloat hf_exp2(double log2v) {
  return boost::multiprecision::pow(HighFloat(2), HighFloat(log2v));
}

HighFloat hf_dist(const SparseVector& a, const SparseVector& b) {
  HighFloat sum = 0;
  auto ia = a.entries.begin();
  auto ib = b.entries.begin();
  while (ia != a.entries.end() || ib != b.entries.end()) {
    double va = 0.0, vb = 0.0;
    if (ib == b.entries.end() || (ia != a.entries.end() && ia->first < ib->first)) {
      va = (ia++)->second;
    } else if (ia == a.entries.end() || ib->first < ia->first) {
      vb = (ib++)->second;
    } else {
      va = (ia++)->second;
      vb = (ib++)->second;
    }
    HighFloat diff = HighFloat(va) - HighFloat(vb);
    sum += diff * diff;
  }
  return sqrt(sum);
}

Rational rat_dist_sq(const SparseVector& a, const SparseVector& b) {
  Rational sum = 0;
  auto ia = a.entries.begin();
  auto ib = b.entries.begin();
  while (ia != a.entries.end() || ib != b.entries.end()) {
    double va = 0.0, vb = 0.0;
    if (ib == b.entries.end() || (ia != a.entries.end() && ia->first < ib->first)) {
      va = (ia++)->second;
    } else if (ia == a.entries.end() || ib->first < ia->first) {
      vb = (ib++)->second;
    } else {
      va = (ia++)->second;
      vb = (ib++)->second;
    }
    Rational diff = rational_of_double(va) - rational_of_double(vb);
    sum += diff * diff;
  }
  return sum;
}

HighFloat hf_space_dist(const FiniteMetricSpace& space, std::size_t x, std::size_t y) {
  if (auto sq = space.distSqExact(x, y)) return sqrt(HighFloat(*sq));
  return HighFloat(space.dist(x, y));
}

std::optional<Rational> dyadic_of_log2(double log2v) {
  double r = std::nearbyint(log2v);
  if (r != log2v || std::abs(r) > 4000.0) return std::nullopt;
  auto k = static_cast<long>(r);
  if (k >= 0) return Rational(BigInt(1) << k);
  return Rational(1, BigInt(1) << (-k));
}

// Sign-exact slack for "lhs <= rhs" when both squared sides are rational:
// rhs - lhs = (rhs^2 - lhs^2) / (rhs + lhs).
double sq_slack(const Rational& lhsSq, const Rational& rhsSq, double lhs, double rhs) {
  double denom = lhs + rhs;
  if (!(denom > 0.0)) denom = 1.0;
  return static_cast<double>(Rational((rhsSq - lhsSq) / rational_of_double(denom)));
}

bool witness_less(const PairWitness& a, const PairWitness& b) { return a.slack < b.slack; }

// Collects slack samples for one lemma, keeps the ten worst witnesses, and
// settles samples inside the floating-point noise band with a caller-supplied
// higher-precision recheck.
class SlackAccumulator {
 public:
  SlackAccumulator(std::string lemmaId, std::string mode) {
    report_.lemmaId = std::move(lemmaId);
    report_.mode = std::move(mode);
  }
  SlackAccumulator(std::string lemmaId, const ScaleSchedule& schedule)
      : SlackAccumulator(std::move(lemmaId),
                         schedule.params.relaxed ? "relaxed" : "exact") {}

  void add(std::size_t x, std::size_t y, double lhs, double rhs,
           const std::function<double()>& recheck = {}) {
    double slack = rhs - lhs;
    double scale = scale_of(lhs, rhs);
    if (recheck && std::abs(slack) <= kRecheckBand * scale) slack = recheck();
    ++report_.pairsChecked;
    if (slack < report_.worstSlack) report_.worstSlack = slack;
    double rel = slack / scale;
    if (rel < report_.worstRelSlack) report_.worstRelSlack = rel;
    worst_.push_back(PairWitness{x, y, lhs, rhs, slack});
    std::push_heap(worst_.begin(), worst_.end(), witness_less);
    if (worst_.size() > kMaxWitnesses) {
      std::pop_heap(worst_.begin(), worst_.end(), witness_less);
      worst_.pop_back();
    }
  }

  void demand(bool ok, std::size_t x, std::size_t y, const std::string& why) {
    if (ok) {
      ++report_.pairsChecked;
      return;
    }
    add(x, y, 1.0, 0.0);
    if (!why.empty()) append_note(why);
  }

  void refuse(const std::string& why) {
    report_.status = "not-certified";
    append_note(why);
  }

  void append_note(const std::string& text) {
    if (report_.note.find(text) != std::string::npos) return;
    if (!report_.note.empty()) report_.note += "; ";
    report_.note += text;
  }

  std::size_t count() const { return report_.pairsChecked; }

  LemmaReport finish() {
    std::sort_heap(worst_.begin(), worst_.end(), witness_less);
    report_.witnesses = std::move(worst_);
    if (report_.pairsChecked == 0 && report_.status == "pass")
      append_note("vacuous: no pairs in scope");
    if (report_.status == "pass" && report_.worstRelSlack < -kRelTol)
      report_.status = "fail";
    return std::move(report_);
  }

 private:
  LemmaReport report_;
  std::vector<PairWitness> worst_;
};

std::vector<std::vector<double>> weight_matrix(const FiniteMetricSpace& space,
                                               const ColoredCover& cover) {
  std::vector<std::vector<double>> w(cover.sets.size(),
                                     std::vector<double>(space.size(), 0.0));
  for (std::size_t k = 0; k < cover.sets.size(); ++k)
    for (std::size_t x = 0; x < space.size(); ++x)
      w[k][x] = weight(space, cover.sets[k], x);
  return w;
}

HighFloat hf_weight(const FiniteMetricSpace& space, const CoverSet& set, std::size_t x) {
  if (!std::binary_search(set.memberIds.begin(), set.memberIds.end(), x))
    return HighFloat(0);
  std::vector<char> in(space.size(), 0);
  for (std::size_t id : set.memberIds) in[id] = 1;
  HighFloat best = HighFloat(space.diameter) * 4 + 1;
  for (std::size_t y = 0; y < space.size(); ++y)
    if (!in[y]) best = std::min(best, hf_space_dist(space, x, y));
  return best;
}

bool sets_overlap(const CoverSet& a, const CoverSet& b) {
  std::size_t i = 0, j = 0;
  while (i < a.memberIds.size() && j < b.memberIds.size()) {
    if (a.memberIds[i] == b.memberIds[j]) return true;
    if (a.memberIds[i] < b.memberIds[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return false;
}

bool all_singletons(const EmbeddingStage& stage, std::size_t points) {
  if (stage.index == 0) return points <= 1;
  if (stage.cover.sets.size() != points) return false;
  for (const auto& s : stage.cover.sets)
    if (s.memberIds.size() != 1) return false;
  return true;
}

double stage_eps(const ScaleSchedule& schedule, int i) {
  return std::exp2(std::max(schedule.logEps.at(static_cast<std::size_t>(i)),
                            -kLinearizableLog2));
}

double stage_delta(const ScaleSchedule& schedule, int i) {
  return std::exp2(std::max(schedule.logDelta.at(static_cast<std::size_t>(i)),
                            -kLinearizableLog2));
}

}  // namespace

LemmaReport check_local_lipschitz(const FiniteMetricSpace& space,
                                  const EmbeddingStage& stage,
                                  const ScaleSchedule& schedule) {
  SlackAccumulator acc("4.1", schedule);
  int i = stage.index;
  if (stage.images.size() != space.size())
    throw std::invalid_argument("stage and space sizes disagree");
  double reach = schedule.params.sigma * stage_delta(schedule, i);
  double logFactor = std::log2(schedule.constants.L) - 1.0 +
                     schedule.logEps.at(static_cast<std::size_t>(i)) -
                     schedule.logDelta.at(static_cast<std::size_t>(i));
  double factor = std::exp2(logFactor);
  for (std::size_t x = 0; x < space.size(); ++x) {
    for (std::size_t y = x + 1; y < space.size(); ++y) {
      double d = space.dist(x, y);
      if (!(d < reach)) continue;
      double lhs = dist(stage.images[x], stage.images[y]);
      double rhs = factor * d;
      acc.add(x, y, lhs, rhs, [&, x, y] {
        HighFloat rhsHF = HighFloat(schedule.constants.L) / 2 *
                          hf_exp2(schedule.logEps.at(static_cast<std::size_t>(i))) /
                          hf_exp2(schedule.logDelta.at(static_cast<std::size_t>(i))) *
                          hf_space_dist(space, x, y);
        return static_cast<double>(rhsHF - hf_dist(stage.images[x], stage.images[y]));
      });
    }
  }
  acc.append_note("image dist <= (L/2)(eps_i/delta_i) d on pairs d < sigma*delta_i");
  return acc.finish();
}

LemmaReport check_weight_lipschitz(const FiniteMetricSpace& space,
                                   const EmbeddingStage& stage,
                                   const ScaleSchedule& schedule) {
  SlackAccumulator acc("4.3", schedule);
  if (stage.index == 0) {
    acc.append_note("stage 0 has no cover");
    return acc.finish();
  }
  auto w = weight_matrix(space, stage.cover);
  for (std::size_t k = 0; k < stage.cover.sets.size(); ++k) {
    for (std::size_t x = 0; x < space.size(); ++x) {
      for (std::size_t y = x + 1; y < space.size(); ++y) {
        double lhs = std::abs(w[k][x] - w[k][y]);
        double rhs = space.dist(x, y);
        acc.add(x, y, lhs, rhs, [&, k, x, y] {
          HighFloat a = hf_weight(space, stage.cover.sets[k], x);
          HighFloat b = hf_weight(space, stage.cover.sets[k], y);
          return static_cast<double>(hf_space_dist(space, x, y) - abs(a - b));
        });
      }
    }
  }
  acc.append_note("|w(x,U) - w(y,U)| <= d(x,y) over all sets");
  return acc.finish();
}

LemmaReport check_weight_sums(const FiniteMetricSpace& space, const EmbeddingStage& stage,
                              const ScaleSchedule& schedule) {
  SlackAccumulator acc("4.4", schedule);
  if (stage.index == 0) {
    acc.append_note("stage 0 has no cover");
    return acc.finish();
  }
  const ColoredCover& cover = stage.cover;
  double delta = cover.targetDelta;
  double xi = cover.sigma * delta;
  int mult = std::max(1, cover.multiplicityCert);
  auto w = weight_matrix(space, cover);
  for (std::size_t x = 0; x < space.size(); ++x) {
    bool allSmall = true;
    for (std::size_t k = 0; k < cover.sets.size(); ++k)
      if (w[k][x] > 2.0 * delta) allSmall = false;
    if (allSmall) {
      double sum = 0.0;
      for (std::size_t k = 0; k < cover.sets.size(); ++k) sum += w[k][x];
      auto hfSum = [&, x] {
        HighFloat s = 0;
        for (std::size_t k = 0; k < cover.sets.size(); ++k)
          s += hf_weight(space, cover.sets[k], x);
        return s;
      };
      acc.add(x, x, xi, sum, [&] { return static_cast<double>(hfSum() - HighFloat(xi)); });
      acc.add(x, x, sum, 2.0 * mult * delta, [&] {
        return static_cast<double>(HighFloat(2.0 * mult * delta) - hfSum());
      });
      continue;
    }
    for (std::size_t k = 0; k < cover.sets.size(); ++k) {
      if (!(w[k][x] > 2.0 * delta)) continue;
      std::size_t depth = 0;
      for (std::size_t j = 0; j < cover.sets.size(); ++j)
        if (std::binary_search(cover.sets[j].memberIds.begin(),
                               cover.sets[j].memberIds.end(), x))
          ++depth;
      acc.demand(depth == 1, x, k, "isolated point lies in more than one set");
      double margin = kInf;
      std::vector<char> in(space.size(), 0);
      for (std::size_t id : cover.sets[k].memberIds) in[id] = 1;
      for (std::size_t u : cover.sets[k].memberIds)
        for (std::size_t v = 0; v < space.size(); ++v)
          if (!in[v]) margin = std::min(margin, space.dist(u, v));
      acc.add(x, k, delta, margin);
      for (std::size_t j = 0; j < cover.sets.size(); ++j)
        if (j != k)
          acc.demand(!sets_overlap(cover.sets[j], cover.sets[k]), x, j,
                     "isolated set overlaps another set");
    }
  }
  acc.append_note("sigma*delta <= sum w <= 2*mult*delta when all weights <= 2*delta; "
                  "isolation otherwise; mult=" + std::to_string(mult));
  return acc.finish();
}

LemmaReport check_weight_sum_lipschitz(const FiniteMetricSpace& space,
                                       const EmbeddingStage& stage,
                                       const ScaleSchedule& schedule) {
  SlackAccumulator acc("4.5", schedule);
  if (stage.index == 0) {
    acc.append_note("stage 0 has no cover");
    return acc.finish();
  }
  int mult = std::max(1, stage.cover.multiplicityCert);
  auto w = weight_matrix(space, stage.cover);
  std::vector<double> sums(space.size(), 0.0);
  for (std::size_t x = 0; x < space.size(); ++x)
    for (std::size_t k = 0; k < stage.cover.sets.size(); ++k) sums[x] += w[k][x];
  for (std::size_t x = 0; x < space.size(); ++x) {
    for (std::size_t y = x + 1; y < space.size(); ++y) {
      double lhs = std::abs(sums[x] - sums[y]);
      double rhs = 2.0 * mult * space.dist(x, y);
      acc.add(x, y, lhs, rhs, [&, x, y] {
        HighFloat sx = 0, sy = 0;
        for (std::size_t k = 0; k < stage.cover.sets.size(); ++k) {
          sx += hf_weight(space, stage.cover.sets[k], x);
          sy += hf_weight(space, stage.cover.sets[k], y);
        }
        return static_cast<double>(HighFloat(2 * mult) * hf_space_dist(space, x, y) -
                                   abs(sx - sy));
      });
    }
  }
  acc.append_note("|sum w(x) - sum w(y)| <= 2*mult*d(x,y); mult=" + std::to_string(mult));
  return acc.finish();
}

LemmaReport check_separation(const FiniteMetricSpace& space, const EmbeddingStage& stage,
                             const ScaleSchedule& schedule) {
  SlackAccumulator acc("4.6", schedule);
  int s = stage.index;
  if (s == 0) {
    acc.append_note("stage 0 has no cover");
    return acc.finish();
  }
  double deltaS = stage_delta(schedule, s);
  double epsS = stage_eps(schedule, s);
  int m = std::max(1, stage.cover.multiplicityCert);
  double lhs = epsS / std::sqrt(2.0 * m);
  auto epsRat = dyadic_of_log2(schedule.logEps.at(static_cast<std::size_t>(s)));
  for (std::size_t x = 0; x < space.size(); ++x) {
    for (std::size_t y = x + 1; y < space.size(); ++y) {
      if (!(space.dist(x, y) > deltaS)) continue;
      double rhs = dist(stage.images[x], stage.images[y]);
      acc.add(x, y, lhs, rhs, [&, x, y] {
        if (epsRat) {
          Rational lhsSq = (*epsRat) * (*epsRat) / (2 * m);
          return sq_slack(lhsSq, rat_dist_sq(stage.images[x], stage.images[y]), lhs, rhs);
        }
        HighFloat lhsHF = hf_exp2(schedule.logEps.at(static_cast<std::size_t>(s))) /
                          sqrt(HighFloat(2 * m));
        return static_cast<double>(hf_dist(stage.images[x], stage.images[y]) - lhsHF);
      });
    }
  }
  acc.append_note("separation constant eps_i/sqrt(2M) with achieved M=" +
                  std::to_string(m) + " on pairs d > delta_i");
  return acc.finish();
}

LemmaReport check_edge_bound(const FiniteMetricSpace& space, const EmbeddingStage& prev,
                             const EmbeddingStage& stage, const ScaleSchedule& schedule) {
  SlackAccumulator acc("4.7", schedule);
  int s = stage.index;
  if (prev.index != s - 1) throw std::invalid_argument("stages are not consecutive");
  if (prev.images.size() != space.size() || stage.images.size() != space.size())
    throw std::invalid_argument("stage and space sizes disagree");
  double deltaS = stage_delta(schedule, s);
  double epsS = stage_eps(schedule, s);
  bool hypOk = true;
  std::size_t hx = 0, hy = 0;
  for (std::size_t x = 0; x < space.size() && hypOk; ++x) {
    for (std::size_t y = x + 1; y < space.size(); ++y) {
      if (!(space.dist(x, y) <= deltaS)) continue;
      double pd = dist(prev.images[x], prev.images[y]);
      acc.demand(pd <= epsS / 2.0 * (1.0 + kRelTol), x, y, "");
      if (pd > epsS / 2.0 * (1.0 + kRelTol)) {
        hypOk = false;
        hx = x;
        hy = y;
        break;
      }
    }
  }
  auto epsRat = dyadic_of_log2(schedule.logEps.at(static_cast<std::size_t>(s)));
  for (std::size_t u = 0; u < stage.cover.sets.size(); ++u) {
    for (std::size_t v = u + 1; v < stage.cover.sets.size(); ++v) {
      if (!sets_overlap(stage.cover.sets[u], stage.cover.sets[v])) continue;
      double lhs = dist(stage.vertices[u], stage.vertices[v]);
      double rhs = 2.0 * epsS;
      acc.add(u, v, lhs, rhs, [&, u, v] {
        if (epsRat) {
          Rational rhsSq = 4 * (*epsRat) * (*epsRat);
          return sq_slack(rat_dist_sq(stage.vertices[u], stage.vertices[v]), rhsSq, lhs,
                          rhs);
        }
        return static_cast<double>(
            2 * hf_exp2(schedule.logEps.at(static_cast<std::size_t>(s))) -
            hf_dist(stage.vertices[u], stage.vertices[v]));
      });
    }
  }
  if (!hypOk)
    acc.refuse("stage implication hypothesis failed at pair (" + std::to_string(hx) +
               "," + std::to_string(hy) + ")");
  else
    acc.append_note("vertex dist <= 2*eps_i over intersecting sets; implication "
                    "hypothesis verified on the previous stage");
  return acc.finish();
}

LemmaReport check_simplex_minimum(int m) {
  if (m < 1 || m > 6) throw std::invalid_argument("simplex search supports 1 <= m <= 6");
  SlackAccumulator acc("4.8", std::string("exact"));
  constexpr int kGrid = 30;
  std::vector<int> parts(static_cast<std::size_t>(m), 0);
  parts[0] = kGrid;
  double minVal = kInf;
  bool more = true;
  while (more) {
    double val = 0.0;
    for (int p : parts) {
      double lam = static_cast<double>(p) / kGrid;
      val += lam * lam;
    }
    minVal = std::min(minVal, val);
    acc.demand(true, 0, 0, "");
    // next composition of kGrid into m parts
    more = false;
    for (std::size_t j = 0; j + 1 < parts.size(); ++j) {
      if (parts[j] > 0) {
        int head = parts[j] - 1;
        ++parts[j + 1];
        for (std::size_t t = 0; t < j; ++t) {
          head += parts[t];
          parts[t] = 0;
        }
        parts[j] = 0;
        parts[0] = head;
        more = true;
        break;
      }
    }
  }
  double target = 1.0 / m;
  acc.add(0, 0, target, minVal);
  double uniform = 0.0;
  for (int j = 0; j < m; ++j) uniform += (1.0 / m) * (1.0 / m);
  acc.add(0, 1, uniform, target);
  acc.add(1, 0, target, uniform);
  acc.append_note("grid search over barycentric compositions of " +
                  std::to_string(kGrid) + "; minimum of sum lambda^2 is 1/m at the "
                  "uniform point");
  return acc.finish();
}

LemmaReport check_qmeasure(const FiniteMetricSpace& space, const EmbeddingStage& stage,
                           const ScaleSchedule& schedule) {
  SlackAccumulator acc("4.9", schedule);
  if (schedule.params.relaxed) {
    acc.refuse("not-certified: the q-measure bound needs the exact schedule constants");
    return acc.finish();
  }
  int s = stage.index;
  if (s < 1) throw std::invalid_argument("q-measure applies to refinement stages");
  int n = schedule.params.n;
  double q = schedule.params.q;
  double logEta = schedule.logEta.at(static_cast<std::size_t>(s));
  double logEpsS = schedule.logEps.at(static_cast<std::size_t>(s));
  double epsS = stage_eps(schedule, s);
  SimplexComplex complex = enumerate_simplices(stage, n);

  acc.demand(complex.countBoundOk, 0, 0, "simplex count exceeds |cover|^(n+2)");
  double logCount = std::log2(static_cast<double>(complex.simplices.size()));
  double logCountBound =
      (n + 2) * std::log2(static_cast<double>(schedule.params.N)) *
      (1.0 - std::log2(schedule.params.sigma) -
       schedule.logDelta.at(static_cast<std::size_t>(s)));
  acc.add(0, 0, logCount, logCountBound);

  double logK = 0.0;
  if (n >= 1)
    logK = std::max(0.0, 3.0 + 0.5 * std::log2(static_cast<double>(n)) + logEpsS - logEta);
  double logTotal = -kInf;
  auto epsRat = dyadic_of_log2(logEpsS);
  for (std::size_t si = 0; si < complex.simplices.size(); ++si) {
    const auto& simplex = complex.simplices[si];
    acc.demand(simplex.size() <= static_cast<std::size_t>(n) + 1, si, 0,
               "simplex dimension exceeds n");
    auto r = static_cast<double>(simplex.size() - 1);
    logTotal = log2_add(logTotal, r * logK);
    for (std::size_t j = 1; j < simplex.size(); ++j) {
      double lhs = dist(stage.vertices[simplex[0]], stage.vertices[simplex[j]]);
      double rhs = 2.0 * epsS;
      acc.add(si, j, lhs, rhs, [&] {
        if (epsRat) {
          Rational rhsSq = 4 * (*epsRat) * (*epsRat);
          return sq_slack(
              rat_dist_sq(stage.vertices[simplex[0]], stage.vertices[simplex[j]]), rhsSq,
              lhs, rhs);
        }
        return static_cast<double>(2 * hf_exp2(logEpsS) -
                                   hf_dist(stage.vertices[simplex[0]],
                                           stage.vertices[simplex[j]]));
      });
    }
  }

  double sideTerm = n >= 1 ? n * std::log2(8.0 * std::sqrt(static_cast<double>(n))) : 0.0;
  double logFormula = logCount + sideTerm + (q - n) * logEta;
  acc.add(0, 1, logFormula, 0.0);
  double logMeasure = logTotal + q * (2.0 + logEta);
  acc.add(0, 2, logMeasure, 2.0 * q);

  auto w = weight_matrix(space, stage.cover);
  for (std::size_t x = 0; x < space.size(); ++x) {
    SparseVector rebuilt;
    double total = 0.0;
    for (std::size_t k = 0; k < stage.cover.sets.size(); ++k) total += w[k][x];
    for (std::size_t k = 0; k < stage.cover.sets.size(); ++k) {
      if (!(w[k][x] > 0.0)) continue;
      double lam = w[k][x] / total;
      for (const auto& [idx, val] : stage.vertices[k].entries)
        rebuilt.set(idx, rebuilt.get(idx) + lam * val);
    }
    acc.add(x, 0, dist(stage.images[x], rebuilt), 0.0);
  }

  acc.append_note("cube counts and measure sums in log2; every image is a convex "
                  "combination of simplex vertices within 2*eps_i of the base, so its "
                  "eta_i-ball lies in an inflated element; inflated sum <= 4^q");
  return acc.finish();
}

std::vector<LemmaReport> check_cauchy_and_limit(const std::vector<EmbeddingStage>& stages,
                                                const ScaleSchedule& schedule) {
  SlackAccumulator cacc("4.10", schedule);
  SlackAccumulator tacc("4.11", schedule);
  for (std::size_t i = 1; i < stages.size(); ++i)
    if (stages[i].index != stages[i - 1].index + 1)
      throw std::invalid_argument("stages are not consecutive");
  if (stages.size() >= 2) {
    const EmbeddingStage& last = stages.back();
    double tail = 2.0 * stage_eps(schedule, last.index + 1);
    for (std::size_t i = 1; i < stages.size(); ++i) {
      double epsI = stage_eps(schedule, stages[i].index);
      auto epsRat = dyadic_of_log2(
          schedule.logEps.at(static_cast<std::size_t>(stages[i].index)));
      for (std::size_t x = 0; x < stages[i].images.size(); ++x) {
        double lhs = dist(stages[i].images[x], stages[i - 1].images[x]);
        cacc.add(x, i, lhs, epsI, [&, i, x, lhs] {
          if (epsRat)
            return sq_slack(rat_dist_sq(stages[i].images[x], stages[i - 1].images[x]),
                            (*epsRat) * (*epsRat), lhs, epsI);
          return static_cast<double>(
              hf_exp2(schedule.logEps.at(static_cast<std::size_t>(stages[i].index))) -
              hf_dist(stages[i].images[x], stages[i - 1].images[x]));
        });
        double reach = dist(last.images[x], stages[i - 1].images[x]) + tail;
        tacc.add(x, i, reach, 2.0 * epsI, [&, i, x] {
          return static_cast<double>(
              2 * hf_exp2(schedule.logEps.at(static_cast<std::size_t>(stages[i].index))) -
              hf_dist(last.images[x], stages[i - 1].images[x]) - HighFloat(tail));
        });
      }
    }
  }
  cacc.append_note("consecutive stages move each image by at most eps_i");
  tacc.append_note("the settled map stays within 2*eps_i of stage i-1; witness y is the "
                   "stage index");
  return {cacc.finish(), tacc.finish()};
}

LemmaReport check_biholder(const FiniteMetricSpace& space,
                           const std::vector<EmbeddingStage>& stages,
                           const ScaleSchedule& schedule) {
  SlackAccumulator acc("4.12", schedule);
  if (stages.empty()) throw std::invalid_argument("no stages to certify");
  if (schedule.params.relaxed) {
    acc.refuse("not-certified: bi-Hölder constants need the exact schedule");
    return acc.finish();
  }
  const EmbeddingStage& last = stages.back();
  if (!all_singletons(last, space.size())) {
    acc.refuse("not-certified: the construction has not stabilized");
    return acc.finish();
  }
  double tail4 = 4.0 * stage_eps(schedule, last.index + 1);
  double twoQ = 2.0 * schedule.constants.Q;
  double invFourQ = 1.0 / (4.0 * schedule.constants.Q);
  double logLambda = schedule.constants.logLambda;
  for (std::size_t x = 0; x < space.size(); ++x) {
    for (std::size_t y = x + 1; y < space.size(); ++y) {
      double d = space.dist(x, y);
      double logd = std::log2(d);
      double df = dist(last.images[x], last.images[y]);
      double lower = std::exp2(-logLambda + twoQ * logd);
      acc.add(x, y, lower, df - tail4, [&, x, y] {
        HighFloat lhsHF = hf_exp2(-logLambda) *
                          boost::multiprecision::pow(hf_space_dist(space, x, y),
                                                     HighFloat(twoQ));
        return static_cast<double>(hf_dist(last.images[x], last.images[y]) -
                                   HighFloat(tail4) - lhsHF);
      });
      double upper = std::exp2(logLambda + invFourQ * logd);
      acc.add(x, y, df + tail4, upper, [&, x, y] {
        HighFloat rhsHF = hf_exp2(logLambda) *
                          boost::multiprecision::pow(hf_space_dist(space, x, y),
                                                     HighFloat(invFourQ));
        return static_cast<double>(rhsHF - hf_dist(last.images[x], last.images[y]) -
                                   HighFloat(tail4));
      });
    }
  }
  acc.append_note("lower: d^(2Q)/lambda <= image dist - tail; upper: image dist + tail "
                  "<= lambda*d^(1/(4Q)); tail = 4*eps after the settled stage");
  return acc.finish();
}

double DistortionProfile::lambdaStar(double lowerExp, double upperExp) const {
  double lam = 1.0;
  for (const auto& [d, df] : samples) {
    double low = std::pow(d, lowerExp) / df;
    double up = df / std::pow(d, upperExp);
    lam = std::max({lam, low, up});
  }
  return lam;
}

DistortionProfile brute_force_oracle(const FiniteMetricSpace& space,
                                     const std::vector<SparseVector>& images) {
  if (space.size() > 12)
    throw std::invalid_argument("the oracle is exhaustive; it accepts at most 12 points");
  if (images.size() != space.size())
    throw std::invalid_argument("one image per point is required");
  DistortionProfile profile;
  bool any = false;
  for (std::size_t x = 0; x < space.size(); ++x) {
    for (std::size_t y = x + 1; y < space.size(); ++y) {
      double d = space.dist(x, y);
      double df = dist(images[x], images[y]);
      profile.samples.emplace_back(d, df);
      if (d == 1.0 || !(df > 0.0)) continue;
      double rho = std::log2(df) / std::log2(d);
      if (!any) {
        profile.alphaStar = profile.betaStar = rho;
        any = true;
      } else {
        profile.alphaStar = std::max(profile.alphaStar, rho);
        profile.betaStar = std::min(profile.betaStar, rho);
      }
    }
  }
  return profile;
}

}  // namespace biholder
