#include "biholder/metric_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace biholder {

std::optional<Rational> parse_rational(const std::string& text) {
  if (text.empty()) return std::nullopt;
  auto slash = text.find('/');
  try {
    if (slash != std::string::npos) {
      BigInt num(text.substr(0, slash));
      BigInt den(text.substr(slash + 1));
      if (den == 0) return std::nullopt;
      return Rational(num, den);
    }
    auto dot = text.find('.');
    if (dot == std::string::npos) return Rational(BigInt(text));
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    std::size_t fracLen = text.size() - dot - 1;
    if (digits.empty() || digits == "-" || digits == "+") return std::nullopt;
    BigInt num(digits);
    BigInt den = 1;
    for (std::size_t i = 0; i < fracLen; ++i) den *= 10;
    return Rational(num, den);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::string rational_to_string(const Rational& r) {
  std::string s = numerator(r).str();
  if (denominator(r) != 1) s += "/" + denominator(r).str();
  return s;
}

Rational GapRule::gapDiameter(int level, const Rational& parentWidth) const {
  switch (kind) {
    case Kind::Third:
      return parentWidth / 3;
    case Kind::FastGap: {
      BigInt kk = 1;
      for (int i = 0; i < level; ++i) kk *= level;
      return Rational(1, 10 * kk);
    }
    case Kind::Custom:
      if (level < 1 || level > static_cast<int>(customGaps.size()))
        throw std::invalid_argument("custom gap rule has no entry for level " +
                                    std::to_string(level));
      return customGaps[static_cast<std::size_t>(level - 1)];
  }
  throw std::logic_error("unreachable gap rule kind");
}

std::string GapRule::name() const {
  switch (kind) {
    case Kind::Third: return "third";
    case Kind::FastGap: return "fastgap";
    case Kind::Custom: return "custom";
  }
  return "?";
}

double FiniteMetricSpace::dist(std::size_t i, std::size_t j) const {
  if (i == j) return 0.0;
  if (metric == Metric::Matrix) return matrix[i * matrixSize_ + j];
  const auto& a = coords[i];
  const auto& b = coords[j];
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    double d = a[k] - b[k];
    s += d * d;
  }
  double base = coordScale * std::sqrt(s);
  return snowflakePower == 1.0 ? base : std::pow(base, snowflakePower);
}

double FiniteMetricSpace::minPairwiseDistance() const {
  std::size_t n = size();
  double best = std::numeric_limits<double>::infinity();
  if (metric == Metric::Coords && coords.front().size() == 1) {
    // 1-D: nearest neighbours are adjacent in sorted order.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return coords[a][0] < coords[b][0];
    });
    for (std::size_t i = 0; i + 1 < n; ++i)
      best = std::min(best, dist(order[i], order[i + 1]));
    return best;
  }
  if (metric == Metric::Coords) {
    // Sweep along the best-spread axis: a pair further apart on that axis than
    // the current minimum cannot beat it, so the inner scan stays local.
    std::size_t dim = coords.front().size();
    std::size_t axis = 0;
    std::size_t bestDistinct = 0;
    for (std::size_t a = 0; a < dim; ++a) {
      std::vector<double> vals(n);
      for (std::size_t i = 0; i < n; ++i) vals[i] = coords[i][a];
      std::sort(vals.begin(), vals.end());
      std::size_t distinct = static_cast<std::size_t>(
          std::unique(vals.begin(), vals.end()) - vals.begin());
      if (distinct > bestDistinct) {
        bestDistinct = distinct;
        axis = a;
      }
    }
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return coords[a][axis] < coords[b][axis];
    });
    for (std::size_t i = 0; i + 1 < n; ++i)
      best = std::min(best, dist(order[i], order[i + 1]));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        double gap = coordScale * (coords[order[j]][axis] - coords[order[i]][axis]);
        double floor = snowflakePower == 1.0 ? gap : std::pow(gap, snowflakePower);
        if (floor >= best) break;
        best = std::min(best, dist(order[i], order[j]));
      }
    }
    return best;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) best = std::min(best, dist(i, j));
  return best;
}

std::optional<Rational> FiniteMetricSpace::distExact(std::size_t i, std::size_t j) const {
  if (!exact || !exact->line || snowflakePower != 1.0) return std::nullopt;
  Rational d = exact->pos[i][0] - exact->pos[j][0];
  if (d < 0) d = -d;
  return exact->distScale * d;
}

std::optional<Rational> FiniteMetricSpace::distSqExact(std::size_t i, std::size_t j) const {
  if (!exact || snowflakePower != 1.0) return std::nullopt;
  Rational s = 0;
  const auto& a = exact->pos[i];
  const auto& b = exact->pos[j];
  for (std::size_t k = 0; k < a.size(); ++k) {
    Rational d = a[k] - b[k];
    s += d * d;
  }
  return exact->distSqScale * s;
}

CantorStructure derive_cantor_structure(const CantorSpec& spec) {
  if (spec.levels < 0) throw std::invalid_argument("levels must be >= 0");
  CantorStructure cs;
  cs.widths.push_back(1);
  cs.gapWidths.push_back(0);
  cs.starts.push_back({Rational(0)});
  for (int k = 1; k <= spec.levels; ++k) {
    const Rational& parent = cs.widths.back();
    Rational gap = spec.gaps.gapDiameter(k, parent);
    if (gap <= 0) throw std::invalid_argument("gap diameter at level " +
                                              std::to_string(k) + " is not positive");
    if (gap >= parent)
      throw std::invalid_argument("gap diameter at level " + std::to_string(k) +
                                  " is not smaller than its parent interval");
    Rational child = (parent - gap) / 2;
    std::vector<Rational> starts;
    starts.reserve(cs.starts.back().size() * 2);
    for (const Rational& s : cs.starts.back()) {
      starts.push_back(s);
      starts.push_back(s + child + gap);
    }
    cs.widths.push_back(child);
    cs.gapWidths.push_back(gap);
    cs.starts.push_back(std::move(starts));
  }
  return cs;
}

namespace {

FiniteMetricSpace line_space(std::vector<Rational> positions, Provenance prov) {
  FiniteMetricSpace s;
  s.metric = FiniteMetricSpace::Metric::Coords;
  ExactBacking exact;
  exact.line = true;
  for (const Rational& p : positions) {
    s.coords.push_back({static_cast<double>(p)});
    exact.pos.push_back({p});
  }
  s.exact = std::move(exact);
  s.provenance = std::move(prov);
  s.diameter = 0.0;
  for (std::size_t i = 0; i < s.coords.size(); ++i)
    for (std::size_t j = i + 1; j < s.coords.size(); ++j)
      s.diameter = std::max(s.diameter, s.dist(i, j));
  return s;
}

}  // namespace

FiniteMetricSpace build_cantor(const CantorSpec& spec) {
  CantorStructure cs = derive_cantor_structure(spec);
  std::vector<Rational> pts;
  pts.reserve(cs.starts.back().size() * 2);
  const Rational& w = cs.widths.back();
  for (const Rational& s : cs.starts.back()) {
    pts.push_back(s);
    pts.push_back(s + w);
  }
  std::sort(pts.begin(), pts.end());
  Provenance prov;
  prov.kind = "cantor";
  prov.params = {{"gaps", spec.gaps.name()}, {"levels", spec.levels}};
  if (spec.gaps.kind == GapRule::Kind::Custom) {
    OrderedJson gaps = OrderedJson::array();
    for (const Rational& g : spec.gaps.customGaps) gaps.push_back(rational_to_string(g));
    prov.params["customGaps"] = gaps;
  }
  return normalize(line_space(std::move(pts), std::move(prov)));
}

FiniteMetricSpace build_interval_grid(int gridRes) {
  if (gridRes < 2) throw std::invalid_argument("interval grid needs at least 2 points");
  std::vector<Rational> pts;
  pts.reserve(static_cast<std::size_t>(gridRes));
  for (int j = 0; j < gridRes; ++j) pts.emplace_back(j, gridRes - 1);
  Provenance prov;
  prov.kind = "interval";
  prov.params = {{"gridRes", gridRes}};
  return normalize(line_space(std::move(pts), std::move(prov)));
}

FiniteMetricSpace build_product_grid(const CantorSpec& cantor, int n, int gridRes,
                                     bool normalized) {
  if (n < 1) throw std::invalid_argument("product grid needs n >= 1 cube factors");
  if (gridRes < 2) throw std::invalid_argument("product grid needs gridRes >= 2");
  CantorStructure cs = derive_cantor_structure(cantor);
  std::vector<Rational> cpts;
  const Rational& w = cs.widths.back();
  for (const Rational& s : cs.starts.back()) {
    cpts.push_back(s);
    cpts.push_back(s + w);
  }
  std::sort(cpts.begin(), cpts.end());

  FiniteMetricSpace s;
  s.metric = FiniteMetricSpace::Metric::Coords;
  ExactBacking exact;

  std::size_t gridCount = 1;
  for (int a = 0; a < n; ++a) gridCount *= static_cast<std::size_t>(gridRes);
  s.coords.reserve(cpts.size() * gridCount);
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  for (const Rational& c : cpts) {
    std::fill(idx.begin(), idx.end(), 0);
    while (true) {
      std::vector<double> coord;
      std::vector<Rational> epos;
      coord.reserve(1 + static_cast<std::size_t>(n));
      coord.push_back(static_cast<double>(c));
      epos.push_back(c);
      for (int a = 0; a < n; ++a) {
        Rational t(idx[static_cast<std::size_t>(a)], gridRes - 1);
        coord.push_back(static_cast<double>(t));
        epos.push_back(t);
      }
      s.coords.push_back(std::move(coord));
      exact.pos.push_back(std::move(epos));
      int a = n - 1;
      while (a >= 0 && ++idx[static_cast<std::size_t>(a)] == gridRes) {
        idx[static_cast<std::size_t>(a)] = 0;
        --a;
      }
      if (a < 0) break;
    }
  }
  s.exact = std::move(exact);
  s.provenance.kind = "product";
  s.provenance.params = {{"cantor", {{"gaps", cantor.gaps.name()}, {"levels", cantor.levels}}},
                         {"n", n},
                         {"gridRes", gridRes}};
  // Diameter of a box product is attained on the corner points.
  Rational lo = cpts.front(), hi = cpts.back();
  Rational maxSq = (hi - lo) * (hi - lo) + n;
  s.diameter = std::sqrt(static_cast<double>(maxSq));
  return normalized ? normalize(std::move(s)) : s;
}

FiniteMetricSpace build_harmonic(int M) {
  if (M < 3) throw std::invalid_argument("harmonic space needs M >= 3");
  std::vector<Rational> pts;
  pts.emplace_back(0);
  for (int m = M; m >= 1; --m) pts.emplace_back(1, m);
  Provenance prov;
  prov.kind = "harmonic";
  prov.params = {{"M", M}};
  return normalize(line_space(std::move(pts), std::move(prov)));
}

FiniteMetricSpace from_coords(std::vector<std::vector<double>> coords) {
  if (coords.empty()) throw std::invalid_argument("empty point set");
  std::size_t dim = coords.front().size();
  for (const auto& c : coords)
    if (c.size() != dim) throw std::invalid_argument("inconsistent coordinate dimension");
  FiniteMetricSpace s;
  s.metric = FiniteMetricSpace::Metric::Coords;
  ExactBacking exact;
  for (const auto& c : coords) {
    std::vector<Rational> epos;
    epos.reserve(c.size());
    for (double v : c) epos.push_back(rational_of_double(v));
    exact.pos.push_back(std::move(epos));
  }
  s.coords = std::move(coords);
  s.exact = std::move(exact);
  s.provenance.kind = "points";
  s.provenance.params = {{"count", s.coords.size()}, {"dim", dim}};
  s.diameter = 0.0;
  for (std::size_t i = 0; i < s.coords.size(); ++i)
    for (std::size_t j = i + 1; j < s.coords.size(); ++j)
      s.diameter = std::max(s.diameter, s.dist(i, j));
  return normalize(std::move(s));
}

FiniteMetricSpace from_line_points(const std::vector<Rational>& positions) {
  if (positions.empty()) throw std::invalid_argument("empty point set");
  Provenance prov;
  prov.kind = "points";
  OrderedJson vals = OrderedJson::array();
  for (const Rational& p : positions) vals.push_back(rational_to_string(p));
  prov.params = {{"line", vals}};
  return normalize(line_space(positions, std::move(prov)));
}

FiniteMetricSpace from_matrix(std::vector<double> matrix, std::size_t n) {
  if (matrix.size() != n * n) throw std::invalid_argument("matrix size mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    if (matrix[i * n + i] != 0.0)
      throw std::invalid_argument("matrix has a nonzero diagonal entry");
    for (std::size_t j = 0; j < n; ++j) {
      if (matrix[i * n + j] < 0.0) throw std::invalid_argument("matrix has a negative entry");
      if (matrix[i * n + j] != matrix[j * n + i])
        throw std::invalid_argument("matrix is not symmetric");
      if (i != j && matrix[i * n + j] == 0.0)
        throw std::invalid_argument("matrix identifies two distinct points");
    }
  }
  FiniteMetricSpace s;
  s.metric = FiniteMetricSpace::Metric::Matrix;
  s.matrix = std::move(matrix);
  s.matrixSize_ = n;
  s.provenance.kind = "matrix";
  s.provenance.params = {{"count", n}};
  s.diameter = 0.0;
  for (double d : s.matrix) s.diameter = std::max(s.diameter, d);
  return normalize(std::move(s));
}

FiniteMetricSpace normalize(FiniteMetricSpace space) {
  std::size_t n = space.size();
  if (n < 2) throw std::invalid_argument("normalization needs at least 2 points");
  double diam = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) diam = std::max(diam, space.dist(i, j));
  if (diam <= 0.0) throw std::invalid_argument("degenerate space: zero diameter");
  if (std::abs(diam - 1.0) <= 1e-12) {
    // Already unit diameter (up to fp division residue): keep scales bitwise
    // stable so normalization is idempotent.
    space.diameter = 1.0;
    return space;
  }
  if (space.metric == FiniteMetricSpace::Metric::Matrix) {
    for (double& d : space.matrix) d /= diam;
  } else {
    space.coordScale /= std::pow(diam, 1.0 / space.snowflakePower);
  }
  if (space.exact) {
    // Exact diameter so that repeated normalization is a bitwise no-op.
    if (space.exact->line) {
      Rational maxAbs = 0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
          Rational d = space.exact->pos[i][0] - space.exact->pos[j][0];
          if (d < 0) d = -d;
          if (d > maxAbs) maxAbs = d;
        }
      space.exact->distScale /= maxAbs;
    } else {
      Rational maxSq = 0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
          Rational s = 0;
          for (std::size_t k = 0; k < space.exact->pos[i].size(); ++k) {
            Rational d = space.exact->pos[i][k] - space.exact->pos[j][k];
            s += d * d;
          }
          if (s > maxSq) maxSq = s;
        }
      space.exact->distSqScale /= maxSq;
    }
  }
  space.provenance.normalizationFactor *= diam;
  space.diameter = 1.0;
  return space;
}

DoublingEstimate estimate_doubling(const FiniteMetricSpace& space,
                                   std::vector<double> scales) {
  std::size_t n = space.size();
  if (scales.empty()) {
    double minDist = space.minPairwiseDistance();
    double r = 1.0;
    while (r >= minDist && scales.size() < 48) {
      scales.push_back(r);
      r /= 2;
    }
  }
  DoublingEstimate est;
  est.scalesChecked = scales;
  est.N_hat = 1;
  std::vector<std::size_t> ball;
  std::vector<std::size_t> net;
  for (double r : scales) {
    for (std::size_t x = 0; x < n; ++x) {
      ball.clear();
      for (std::size_t y = 0; y < n; ++y)
        if (space.dist(x, y) <= r) ball.push_back(y);
      net.clear();
      for (std::size_t y : ball) {
        bool separated = true;
        for (std::size_t c : net)
          if (space.dist(y, c) < r / 2) {
            separated = false;
            break;
          }
        if (separated) net.push_back(y);
      }
      if (static_cast<int>(net.size()) > est.N_hat) {
        est.N_hat = static_cast<int>(net.size());
        est.witnessPoint = x;
        est.witnessScale = r;
      }
    }
  }
  return est;
}

MetricAxiomReport check_metric_axioms(const FiniteMetricSpace& space,
                                      std::size_t maxExhaustive, unsigned seed) {
  MetricAxiomReport rep;
  std::size_t n = space.size();
  rep.worstTriangleSlack = std::numeric_limits<double>::infinity();
  auto consider = [&](std::size_t x, std::size_t y, std::size_t z) {
    double slack = space.dist(x, z) + space.dist(z, y) - space.dist(x, y);
    if (slack < rep.worstTriangleSlack) rep.worstTriangleSlack = slack;
    ++rep.triplesChecked;
  };
  if (n <= maxExhaustive) {
    rep.exhaustive = true;
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = x + 1; y < n; ++y)
        for (std::size_t z = 0; z < n; ++z)
          if (z != x && z != y) consider(x, y, z);
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t t = 0; t < 2'000'000; ++t) {
      std::size_t x = pick(rng), y = pick(rng), z = pick(rng);
      if (x == y || z == x || z == y) continue;
      consider(x, y, z);
    }
  }
  rep.ok = rep.worstTriangleSlack >= -1e-12;
  return rep;
}

}  // namespace biholder
