#include "biholder/covers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace biholder {

namespace {

// Strict-inequality radius for membership tests, carried exactly so ties are
// settled by the rational backing instead of rounding noise.
struct Threshold {
  Rational exact;
  Rational exactSq;
  double approx;
  explicit Threshold(Rational r)
      : exact(std::move(r)), exactSq(exact * exact), approx(static_cast<double>(exact)) {}
};

class DistPredicate {
 public:
  explicit DistPredicate(const FiniteMetricSpace& space)
      : space_(&space), exact_(space.size() > 0 && space.distSqExact(0, 0).has_value()) {}

  // d(a,b) < t
  bool less(std::size_t a, std::size_t b, const Threshold& t) const {
    if (!exact_) return space_->dist(a, b) < t.approx;
    if (t.exact <= 0) return false;
    return *space_->distSqExact(a, b) < t.exactSq;
  }

  // d(x,a) < d(x,b)
  bool nearer(std::size_t x, std::size_t a, std::size_t b) const {
    if (!exact_) return space_->dist(x, a) < space_->dist(x, b);
    return *space_->distSqExact(x, a) < *space_->distSqExact(x, b);
  }

 private:
  const FiniteMetricSpace* space_;
  bool exact_;
};

std::vector<char> member_flags(const CoverSet& set, std::size_t n) {
  std::vector<char> in(n, 0);
  for (std::size_t id : set.memberIds) in[id] = 1;
  return in;
}

double weight_with_flags(const FiniteMetricSpace& space, const std::vector<char>& in,
                         std::size_t x) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t y = 0; y < space.size(); ++y)
    if (!in[y]) best = std::min(best, space.dist(x, y));
  return best;
}

bool overlaps(const CoverSet& a, const CoverSet& b) {
  std::size_t i = 0, j = 0;
  while (i < a.memberIds.size() && j < b.memberIds.size()) {
    if (a.memberIds[i] == b.memberIds[j]) return true;
    if (a.memberIds[i] < b.memberIds[j]) ++i;
    else ++j;
  }
  return false;
}

bool subset_of(const CoverSet& a, const CoverSet& b) {
  if (a.memberIds.size() > b.memberIds.size()) return false;
  return std::includes(b.memberIds.begin(), b.memberIds.end(), a.memberIds.begin(),
                       a.memberIds.end());
}

void drop_subset_redundant(std::vector<CoverSet>& sets) {
  std::vector<std::size_t> order(sets.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (sets[a].memberIds.size() != sets[b].memberIds.size())
      return sets[a].memberIds.size() > sets[b].memberIds.size();
    return sets[a].memberIds < sets[b].memberIds;
  });
  std::vector<char> dropped(sets.size(), 0);
  for (std::size_t ii = 0; ii < order.size(); ++ii) {
    std::size_t i = order[ii];
    if (dropped[i]) continue;
    for (std::size_t jj = ii + 1; jj < order.size(); ++jj) {
      std::size_t j = order[jj];
      if (!dropped[j] && subset_of(sets[j], sets[i])) dropped[j] = 1;
    }
  }
  std::vector<CoverSet> kept;
  for (std::size_t i = 0; i < sets.size(); ++i)
    if (!dropped[i]) kept.push_back(std::move(sets[i]));
  sets = std::move(kept);
}

// First-fit over sets ordered by smallest member, then canonical reordering.
void color_and_order(std::vector<CoverSet>& sets) {
  for (CoverSet& s : sets) {
    if (s.memberIds.empty()) throw std::logic_error("empty cover set");
    std::sort(s.memberIds.begin(), s.memberIds.end());
    s.memberIds.erase(std::unique(s.memberIds.begin(), s.memberIds.end()),
                      s.memberIds.end());
    s.anchor = s.memberIds.front();
  }
  std::sort(sets.begin(), sets.end(), [](const CoverSet& a, const CoverSet& b) {
    if (a.anchor != b.anchor) return a.anchor < b.anchor;
    return a.memberIds < b.memberIds;
  });
  for (std::size_t i = 0; i < sets.size(); ++i) {
    std::vector<char> used;
    for (std::size_t j = 0; j < i; ++j)
      if (overlaps(sets[i], sets[j])) {
        if (used.size() <= static_cast<std::size_t>(sets[j].color))
          used.resize(static_cast<std::size_t>(sets[j].color) + 1, 0);
        used[static_cast<std::size_t>(sets[j].color)] = 1;
      }
    int c = 0;
    while (static_cast<std::size_t>(c) < used.size() && used[static_cast<std::size_t>(c)])
      ++c;
    sets[i].color = c;
  }
  std::stable_sort(sets.begin(), sets.end(), [](const CoverSet& a, const CoverSet& b) {
    if (a.color != b.color) return a.color < b.color;
    return a.anchor < b.anchor;
  });
}

void fill_certificates(const FiniteMetricSpace& space, ColoredCover& cover) {
  std::size_t n = space.size();
  cover.meshCert = 0.0;
  int maxColor = -1;
  std::vector<int> depth(n, 0);
  std::vector<double> margin(n, 0.0);
  for (const CoverSet& s : cover.sets) {
    if (s.memberIds.size() >= n)
      throw std::invalid_argument("cover set equals the whole space");
    for (std::size_t a = 0; a < s.memberIds.size(); ++a)
      for (std::size_t b = a + 1; b < s.memberIds.size(); ++b)
        cover.meshCert =
            std::max(cover.meshCert, space.dist(s.memberIds[a], s.memberIds[b]));
    auto in = member_flags(s, n);
    for (std::size_t id : s.memberIds) {
      ++depth[id];
      margin[id] = std::max(margin[id], weight_with_flags(space, in, id));
    }
    maxColor = std::max(maxColor, s.color);
  }
  cover.multiplicityCert = 0;
  cover.lebesgueCert = std::numeric_limits<double>::infinity();
  for (std::size_t x = 0; x < n; ++x) {
    cover.multiplicityCert = std::max(cover.multiplicityCert, depth[x]);
    cover.lebesgueCert = std::min(cover.lebesgueCert, margin[x]);
  }
  cover.colorCount = maxColor + 1;
  cover.certified = cover.meshCert <= cover.targetDelta * (1.0 + 1e-12) &&
                    cover.lebesgueCert >= cover.sigma * cover.targetDelta * (1.0 - 1e-12);
}

double sigma_from_certs(double lebesgue, double delta, double cap) {
  double sigma = std::min(cap, lebesgue / delta);
  while (sigma * delta > lebesgue) sigma = std::nextafter(sigma, 0.0);
  return sigma;
}

CantorSpec cantor_spec_from_params(const OrderedJson& params) {
  CantorSpec spec;
  std::string gaps = params.at("gaps").get<std::string>();
  if (gaps == "third") spec.gaps.kind = GapRule::Kind::Third;
  else if (gaps == "fastgap") spec.gaps.kind = GapRule::Kind::FastGap;
  else {
    spec.gaps.kind = GapRule::Kind::Custom;
    for (const auto& g : params.at("customGaps")) {
      auto r = parse_rational(g.get<std::string>());
      if (!r) throw std::invalid_argument("bad custom gap value");
      spec.gaps.customGaps.push_back(*r);
    }
  }
  spec.levels = params.at("levels").get<int>();
  return spec;
}

// Open windows of width h stepped by h/2 along one axis; returns per-window
// member lists over the provided axis values (raw, pre-normalization scale).
std::vector<std::vector<std::size_t>> axis_windows(const std::vector<Rational>& values,
                                                   const Rational& h) {
  Rational half = h / 2;
  // Window j spans ((j-1)h/2, (j+1)h/2); j runs over 0..ceil(1/(h/2)).
  Rational maxV = 0;
  for (const Rational& v : values) maxV = std::max(maxV, v);
  std::vector<std::vector<std::size_t>> windows;
  for (Rational c = 0;; c += half) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < values.size(); ++i)
      if (values[i] > c - half && values[i] < c + half) members.push_back(i);
    windows.push_back(std::move(members));
    if (c >= maxV) break;
  }
  return windows;
}

}  // namespace

double weight(const FiniteMetricSpace& space, const CoverSet& set, std::size_t x) {
  if (set.memberIds.size() >= space.size())
    throw std::invalid_argument("weight is undefined for a full-space set");
  auto in = member_flags(set, space.size());
  if (!in[x]) return 0.0;
  return weight_with_flags(space, in, x);
}

ColoredCover build_greedy_cover(const FiniteMetricSpace& space, double delta,
                                double sigma) {
  std::size_t n = space.size();
  if (n < 2) throw std::invalid_argument("cover needs at least 2 points");
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  if (!(sigma > 0.0 && sigma < 1.0)) throw std::invalid_argument("sigma must lie in (0,1)");

  DistPredicate pred(space);
  Threshold half(rational_of_double(delta) / 2);
  Threshold reach(rational_of_double(sigma) * rational_of_double(delta));

  // Maximal (delta/2)-separated net in id order, then open delta/2 balls.
  std::vector<std::size_t> net;
  for (std::size_t x = 0; x < n; ++x) {
    bool separated = true;
    for (std::size_t c : net)
      if (pred.less(x, c, half)) {
        separated = false;
        break;
      }
    if (separated) net.push_back(x);
  }
  std::vector<CoverSet> sets;
  for (std::size_t c : net) {
    CoverSet s;
    for (std::size_t y = 0; y < n; ++y)
      if (pred.less(c, y, half)) s.memberIds.push_back(y);
    sets.push_back(std::move(s));
  }

  // Witness expansion: any point whose best margin falls short of sigma*delta
  // pulls its sigma*delta neighbourhood into the nearest net element.
  std::vector<std::size_t> nearest(n, 0);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t k = 1; k < net.size(); ++k)
      if (pred.nearer(x, net[k], net[nearest[x]])) nearest[x] = k;
  for (std::size_t x = 0; x < n; ++x) {
    bool deficient = true;
    for (const CoverSet& s : sets) {
      auto in = member_flags(s, n);
      if (!in[x]) continue;
      bool shortMargin = false;
      for (std::size_t y = 0; y < n && !shortMargin; ++y)
        if (!in[y] && pred.less(x, y, reach)) shortMargin = true;
      if (!shortMargin) {
        deficient = false;
        break;
      }
    }
    if (!deficient) continue;
    CoverSet& target = sets[nearest[x]];
    for (std::size_t y = 0; y < n; ++y)
      if (pred.less(x, y, reach)) target.memberIds.push_back(y);
    std::sort(target.memberIds.begin(), target.memberIds.end());
    target.memberIds.erase(
        std::unique(target.memberIds.begin(), target.memberIds.end()),
        target.memberIds.end());
  }

  drop_subset_redundant(sets);
  color_and_order(sets);
  ColoredCover cover;
  cover.sets = std::move(sets);
  cover.targetDelta = delta;
  cover.sigma = sigma;
  fill_certificates(space, cover);
  return cover;
}

ColoredCover build_structured_cover(const FiniteMetricSpace& space, int level) {
  const std::string& kind = space.provenance.kind;
  if (!space.exact)
    throw std::invalid_argument("structured covers need exact coordinate backing");
  const auto& pos = space.exact->pos;
  std::vector<CoverSet> sets;
  double targetDelta = 0.0;
  double sigmaCap = 1.0 / 3.0;

  if (kind == "cantor") {
    CantorSpec spec = cantor_spec_from_params(space.provenance.params);
    if (level < 1 || level > spec.levels)
      throw std::invalid_argument("structured level out of range");
    CantorStructure cs = derive_cantor_structure(spec);
    const Rational& w = cs.widths[static_cast<std::size_t>(level)];
    for (const Rational& s0 : cs.starts[static_cast<std::size_t>(level)]) {
      CoverSet s;
      for (std::size_t i = 0; i < pos.size(); ++i)
        if (pos[i][0] >= s0 && pos[i][0] <= s0 + w) s.memberIds.push_back(i);
      if (!s.memberIds.empty()) sets.push_back(std::move(s));
    }
    targetDelta = static_cast<double>(w);
  } else if (kind == "interval") {
    if (level < 0) throw std::invalid_argument("structured level out of range");
    Rational h(1, 1);
    for (int i = 0; i < level; ++i) h /= 2;
    std::vector<Rational> axis;
    axis.reserve(pos.size());
    for (const auto& p : pos) axis.push_back(p[0]);
    for (auto& members : axis_windows(axis, h)) {
      if (members.empty()) continue;
      CoverSet s;
      s.memberIds = std::move(members);
      sets.push_back(std::move(s));
    }
    targetDelta = static_cast<double>(h);
    sigmaCap = 0.25;
  } else if (kind == "product") {
    CantorSpec spec = cantor_spec_from_params(space.provenance.params.at("cantor"));
    if (level < 1 || level > spec.levels)
      throw std::invalid_argument("structured level out of range");
    CantorStructure cs = derive_cantor_structure(spec);
    const Rational& w = cs.widths[static_cast<std::size_t>(level)];
    std::size_t axes = pos.front().size() - 1;
    // Per-axis window memberships over the cube coordinates, width w.
    std::vector<std::vector<std::vector<char>>> axisFlags(axes);
    std::size_t n = pos.size();
    for (std::size_t a = 0; a < axes; ++a) {
      std::vector<Rational> axis(n);
      for (std::size_t i = 0; i < n; ++i) axis[i] = pos[i][a + 1];
      for (auto& members : axis_windows(axis, w)) {
        std::vector<char> flags(n, 0);
        for (std::size_t id : members) flags[id] = 1;
        axisFlags[a].push_back(std::move(flags));
      }
    }
    for (const Rational& s0 : cs.starts[static_cast<std::size_t>(level)]) {
      std::vector<std::size_t> base;
      for (std::size_t i = 0; i < n; ++i)
        if (pos[i][0] >= s0 && pos[i][0] <= s0 + w) base.push_back(i);
      if (base.empty()) continue;
      // Cross the cantor block with every combination of axis windows.
      std::vector<std::size_t> widx(axes, 0);
      while (true) {
        CoverSet s;
        for (std::size_t i : base) {
          bool in = true;
          for (std::size_t a = 0; a < axes; ++a)
            if (!axisFlags[a][widx[a]][i]) {
              in = false;
              break;
            }
          if (in) s.memberIds.push_back(i);
        }
        if (!s.memberIds.empty()) sets.push_back(std::move(s));
        std::size_t a = 0;
        while (a < axes && ++widx[a] == axisFlags[a].size()) {
          widx[a] = 0;
          ++a;
        }
        if (a == axes) break;
      }
    }
    // Raw product mesh w*sqrt(1+axes) maps to w after diameter normalization.
    targetDelta = static_cast<double>(w) * std::sqrt(1.0 + static_cast<double>(axes)) /
                  space.provenance.normalizationFactor;
  } else {
    throw std::invalid_argument("structured covers need cantor, interval, or product provenance");
  }

  drop_subset_redundant(sets);
  color_and_order(sets);
  ColoredCover cover;
  cover.sets = std::move(sets);
  cover.targetDelta = targetDelta;
  cover.sigma = 0.0;
  fill_certificates(space, cover);
  cover.sigma = sigma_from_certs(cover.lebesgueCert, cover.targetDelta, sigmaCap);
  cover.certified = cover.meshCert <= cover.targetDelta * (1.0 + 1e-12) &&
                    cover.lebesgueCert >= cover.sigma * cover.targetDelta * (1.0 - 1e-12);
  return cover;
}

ColoredCover size_controlled_refine(const FiniteMetricSpace& space,
                                    const ColoredCover& base, int N) {
  if (!base.certified)
    throw std::invalid_argument("refinement needs a certified base cover");
  if (N < 2) throw std::invalid_argument("doubling constant must be >= 2");
  std::size_t n = space.size();
  double delta = base.targetDelta;
  double sigmaPrime = base.sigma;
  DistPredicate pred(space);
  Threshold window(rational_of_double(sigmaPrime) * rational_of_double(delta));
  Threshold netRadius(window.exact / 2);

  std::vector<std::size_t> net;
  for (std::size_t x = 0; x < n; ++x) {
    bool separated = true;
    for (std::size_t c : net)
      if (pred.less(x, c, netRadius)) {
        separated = false;
        break;
      }
    if (separated) net.push_back(x);
  }

  std::vector<std::vector<char>> baseFlags;
  baseFlags.reserve(base.sets.size());
  for (const CoverSet& s : base.sets) baseFlags.push_back(member_flags(s, n));

  std::vector<CoverSet> sets;
  for (std::size_t c : net) {
    // Snap the net point into the base element it sits deepest in.
    std::size_t bestSet = 0;
    double bestMargin = -1.0;
    for (std::size_t k = 0; k < base.sets.size(); ++k) {
      if (!baseFlags[k][c]) continue;
      double m = weight_with_flags(space, baseFlags[k], c);
      if (m > bestMargin) {
        bestMargin = m;
        bestSet = k;
      }
    }
    if (bestMargin < sigmaPrime * delta * (1.0 - 1e-12))
      throw std::invalid_argument("base cover violates its Lebesgue certificate");
    CoverSet s;
    for (std::size_t y : base.sets[bestSet].memberIds)
      if (pred.less(c, y, window)) s.memberIds.push_back(y);
    sets.push_back(std::move(s));
  }

  drop_subset_redundant(sets);
  color_and_order(sets);
  ColoredCover cover;
  cover.sets = std::move(sets);
  cover.targetDelta = delta;
  cover.sigma = sigmaPrime / 2.0;
  fill_certificates(space, cover);

  double bound = std::pow(static_cast<double>(N),
                          std::log2(2.0 * space.diameter / (cover.sigma * delta)));
  if (static_cast<double>(cover.sets.size()) > bound)
    throw std::invalid_argument("refined cover exceeds the doubling size bound");
  return cover;
}

CoverReport verify_cover(const FiniteMetricSpace& space, const ColoredCover& cover) {
  CoverReport rep;
  std::size_t n = space.size();
  if (cover.sets.empty()) {
    rep.note = "cover has no sets";
    return rep;
  }
  std::vector<int> depth(n, 0);
  std::vector<double> margin(n, 0.0);
  int maxColor = -1;
  rep.coloringProper = true;
  for (const CoverSet& s : cover.sets) {
    if (s.memberIds.empty() || s.memberIds.size() >= n) {
      rep.note = "cover contains an empty or full-space set";
      return rep;
    }
    for (std::size_t a = 0; a < s.memberIds.size(); ++a)
      for (std::size_t b = a + 1; b < s.memberIds.size(); ++b)
        rep.mesh = std::max(rep.mesh, space.dist(s.memberIds[a], s.memberIds[b]));
    auto in = member_flags(s, n);
    for (std::size_t id : s.memberIds) {
      ++depth[id];
      margin[id] = std::max(margin[id], weight_with_flags(space, in, id));
    }
    maxColor = std::max(maxColor, s.color);
  }
  rep.lebesgue = std::numeric_limits<double>::infinity();
  rep.covers = true;
  for (std::size_t x = 0; x < n; ++x) {
    if (depth[x] == 0) rep.covers = false;
    rep.multiplicity = std::max(rep.multiplicity, depth[x]);
    rep.lebesgue = std::min(rep.lebesgue, margin[x]);
  }
  rep.colors = maxColor + 1;
  for (std::size_t i = 0; i < cover.sets.size(); ++i)
    for (std::size_t j = 0; j < cover.sets.size(); ++j) {
      if (i == j) continue;
      if (i < j && cover.sets[i].color == cover.sets[j].color &&
          overlaps(cover.sets[i], cover.sets[j]))
        rep.coloringProper = false;
      if (cover.sets[i].memberIds != cover.sets[j].memberIds &&
          subset_of(cover.sets[i], cover.sets[j]))
        rep.redundantPairs.emplace_back(i, j);
      else if (i < j && cover.sets[i].memberIds == cover.sets[j].memberIds)
        rep.redundantPairs.emplace_back(i, j);
    }
  rep.orderingCanonical = true;
  for (std::size_t i = 0; i + 1 < cover.sets.size(); ++i) {
    const CoverSet& a = cover.sets[i];
    const CoverSet& b = cover.sets[i + 1];
    if (a.color > b.color || (a.color == b.color && a.anchor > b.anchor))
      rep.orderingCanonical = false;
  }
  for (const CoverSet& s : cover.sets)
    if (s.anchor != s.memberIds.front()) rep.orderingCanonical = false;

  rep.certificateConsistent =
      rep.mesh <= cover.meshCert * (1.0 + 1e-12) + 1e-300 &&
      rep.lebesgue >= cover.lebesgueCert * (1.0 - 1e-12) &&
      rep.multiplicity <= cover.multiplicityCert && rep.colors == cover.colorCount;
  rep.pass = rep.covers && rep.coloringProper && rep.orderingCanonical &&
             rep.certificateConsistent && rep.redundantPairs.empty();
  if (!rep.pass && rep.note.empty()) {
    if (!rep.covers) rep.note = "sets do not cover the space";
    else if (!rep.coloringProper) rep.note = "overlapping sets share a color";
    else if (!rep.orderingCanonical) rep.note = "sets are not in canonical order";
    else if (!rep.redundantPairs.empty()) rep.note = "subset-redundant sets present";
    else rep.note = "stored certificates disagree with recomputation";
  }
  return rep;
}

}  // namespace biholder
