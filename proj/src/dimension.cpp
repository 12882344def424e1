#include "biholder/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace biholder {
namespace {

constexpr double kRelTol = 1e-9;
constexpr std::size_t kMaxFaceWitnesses = 16;
const double kCantorExponent = std::log(2.0) / std::log(3.0);

// Partition cover: each successive uncovered point opens a ball of the given
// radius and absorbs every uncovered point inside it.
std::vector<std::vector<std::size_t>> greedy_cover(const FiniteMetricSpace& space,
                                                   double radius) {
  std::size_t n = space.size();
  std::vector<char> covered(n, 0);
  std::vector<std::vector<std::size_t>> balls;
  for (std::size_t i = 0; i < n; ++i) {
    if (covered[i]) continue;
    std::vector<std::size_t> ball;
    for (std::size_t j = i; j < n; ++j) {
      if (!covered[j] && space.dist(i, j) <= radius) {
        covered[j] = 1;
        ball.push_back(j);
      }
    }
    balls.push_back(std::move(ball));
  }
  return balls;
}

double set_diameter(const FiniteMetricSpace& space, const std::vector<std::size_t>& ids) {
  double diam = 0.0;
  for (std::size_t a = 0; a < ids.size(); ++a)
    for (std::size_t b = a + 1; b < ids.size(); ++b)
      diam = std::max(diam, space.dist(ids[a], ids[b]));
  return diam;
}

void append_warning(std::string& warning, const std::string& msg) {
  if (!warning.empty()) warning += "; ";
  warning += msg;
}

}  // namespace

DimensionReport box_dimension(const FiniteMetricSpace& space, std::vector<double> scales,
                              std::optional<double> measureExponent) {
  std::sort(scales.begin(), scales.end(), std::greater<double>());
  scales.erase(std::unique(scales.begin(), scales.end()), scales.end());
  if (scales.size() < 4)
    throw std::invalid_argument("box dimension needs at least 4 distinct scales");
  if (scales.back() <= 0.0)
    throw std::invalid_argument("covering scales must be positive");
  if (scales.front() < 4.0 * (1.0 - 1e-12) * scales.back())
    throw std::invalid_argument("covering scales must span at least two octaves");

  DimensionReport report;
  report.sampleResolution = space.minPairwiseDistance();
  if (scales.back() <= report.sampleResolution)
    throw std::invalid_argument("smallest scale does not resolve above the sample spacing");
  if (scales.back() <= 2.0 * report.sampleResolution)
    append_warning(report.warning, "smallest scale approaches the sample resolution");

  report.scales = scales;
  report.measureExponent = measureExponent;
  for (double r : scales) {
    auto balls = greedy_cover(space, r);
    report.counts.push_back(balls.size());
    if (measureExponent) {
      double sum = 0.0;
      for (const auto& ball : balls) sum += std::pow(set_diameter(space, ball), *measureExponent);
      report.measureAtScale.push_back(sum);
    }
  }
  for (std::size_t i = 0; i + 1 < report.counts.size(); ++i)
    if (report.counts[i] > report.counts[i + 1]) {
      append_warning(report.warning, "covering counts are not monotone across scales");
      break;
    }

  std::size_t m = scales.size();
  double sx = 0.0, sy = 0.0;
  std::vector<double> xs(m), ys(m);
  for (std::size_t i = 0; i < m; ++i) {
    xs[i] = -std::log(scales[i]);
    ys[i] = std::log(static_cast<double>(report.counts[i]));
    sx += xs[i];
    sy += ys[i];
  }
  double mx = sx / static_cast<double>(m), my = sy / static_cast<double>(m);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx <= 0.0) throw std::invalid_argument("covering scales are degenerate");
  report.slope = sxy / sxx;
  double ss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double fit = my + report.slope * (xs[i] - mx);
    ss += (ys[i] - fit) * (ys[i] - fit);
  }
  report.residual = std::sqrt(ss / static_cast<double>(m));
  if (!std::isfinite(report.slope))
    throw std::runtime_error("box dimension fit produced a non-finite slope");
  return report;
}

FiniteMetricSpace snowflake(const FiniteMetricSpace& space, double power) {
  if (!(power > 0.0) || power > 1.0)
    throw std::invalid_argument("snowflake power must lie in (0, 1]");
  if (power == 1.0) return space;
  FiniteMetricSpace out = space;
  if (out.metric == FiniteMetricSpace::Metric::Matrix) {
    for (double& d : out.matrix) d = std::pow(d, power);
  } else {
    out.snowflakePower = space.snowflakePower * power;
  }
  out.diameter = std::pow(space.diameter, power);
  Provenance prov;
  prov.kind = "snowflake";
  prov.params = {{"power", power},
                 {"base", {{"kind", space.provenance.kind}, {"params", space.provenance.params}}}};
  prov.normalizationFactor = space.provenance.normalizationFactor;
  out.provenance = std::move(prov);
  return out;
}

FastgapReport fastgap_certificate(int levels, double alpha, double beta, double lambda) {
  if (levels < 1) throw std::invalid_argument("fastgap certificate needs levels >= 1");
  if (alpha < 1.0) throw std::invalid_argument("alpha must be at least 1");
  if (!(beta > 0.0) || beta > 1.0) throw std::invalid_argument("beta must lie in (0, 1]");
  if (lambda < 1.0) throw std::invalid_argument("lambda must be at least 1");

  FastgapReport report;
  report.levels = levels;
  report.alpha = alpha;
  report.beta = beta;
  report.lambda = lambda;

  // Gap widths shrink super-geometrically; nine explicit terms leave a tail
  // dominated by a plain geometric series via k^k >= 4^k from k = 4 on.
  report.partialTerms = 9;
  double partial = 0.0;
  for (int k = 1; k <= report.partialTerms; ++k)
    partial += std::exp2(static_cast<double>(k - 1)) / (10.0 * std::pow(k, k));
  report.partialSum = partial;
  report.tailBound = std::exp2(-(report.partialTerms + 1)) / 10.0;
  report.gapSumUpperBound = report.partialSum + report.tailBound;
  report.gapSumBelowHalf = report.gapSumUpperBound < 0.5;
  report.measureLowerBound = 1.0 - report.gapSumUpperBound;

  double logTarget = std::log(2.0) + 2.0 * std::log(lambda) - beta * std::log(10.0);
  const int kMaxSearch = 200000;
  report.minimalK = 0;
  for (int k = 1; k <= kMaxSearch; ++k) {
    double growth = beta * std::log(static_cast<double>(k + 1));
    if (growth < std::log(3.0)) continue;
    if (static_cast<double>(k) * (growth - alpha * std::log(3.0)) > logTarget) {
      report.minimalK = k;
      break;
    }
  }
  if (report.minimalK == 0)
    throw std::runtime_error("stage search for the image-measure bound did not terminate");
  report.imageMeasureLowerBound =
      std::exp(-(std::log(2.0) + std::log(lambda) +
                 alpha * static_cast<double>(report.minimalK) * std::log(3.0)));

  CantorSpec spec;
  spec.gaps.kind = GapRule::Kind::FastGap;
  spec.levels = levels;
  CantorStructure cs = derive_cantor_structure(spec);
  report.widthsOk = true;
  BigInt pow3 = 1;
  for (int k = 0; k <= levels; ++k) {
    report.intervalWidths.push_back(static_cast<double>(cs.widths[static_cast<std::size_t>(k)]));
    if (cs.widths[static_cast<std::size_t>(k)] < Rational(1, pow3)) report.widthsOk = false;
    pow3 *= 3;
  }
  return report;
}

double cantor_ahlfors_constant(int levels) {
  if (levels < 1 || levels > 20)
    throw std::invalid_argument("ahlfors sampling expects levels in 1..20");
  CantorSpec spec;
  spec.levels = levels;
  CantorStructure cs = derive_cantor_structure(spec);
  const auto& starts = cs.starts.back();
  double width = static_cast<double>(cs.widths.back());
  double mass = std::exp2(static_cast<double>(-levels));

  std::vector<double> lefts, pts;
  for (const Rational& s : starts) {
    double a = static_cast<double>(s);
    lefts.push_back(a);
    pts.push_back(a);
    pts.push_back(a + width);
  }
  std::sort(pts.begin(), pts.end());

  double best = 0.0;
  for (double center : pts) {
    for (int j = 0; j <= levels; ++j) {
      double base = std::pow(3.0, -j);
      for (double radius : {base * (1.0 + 1e-9), 2.0 * base * (1.0 + 1e-9)}) {
        double lo = center - radius, hi = center + radius;
        double measure = 0.0;
        for (double a : lefts)
          if (a <= hi && a + width >= lo) measure += mass;
        auto first = std::lower_bound(pts.begin(), pts.end(), lo);
        auto last = std::upper_bound(pts.begin(), pts.end(), hi);
        if (first == last) continue;
        double diam = *(last - 1) - *first;
        if (diam <= 0.0) continue;
        best = std::max(best, measure / std::pow(diam, kCantorExponent));
      }
    }
  }
  return best;
}

HypercurveCertificate hypercurve_certificate(double lambda, double alpha, int n, double nu) {
  if (lambda < 1.0) throw std::invalid_argument("lambda must be at least 1");
  if (alpha < 1.0) throw std::invalid_argument("alpha must be at least 1");
  if (n < 1) throw std::invalid_argument("cube dimension must be at least 1");
  if (!(nu > 0.0)) throw std::invalid_argument("spread constant nu must be positive");
  HypercurveCertificate cert;
  cert.lambda = lambda;
  cert.alpha = alpha;
  cert.beta = 1.0;
  cert.n = n;
  cert.B = std::pow(lambda * std::sqrt(static_cast<double>(n)), -static_cast<double>(n));
  cert.A = std::pow(2.0, kCantorExponent) * nu * std::pow(lambda, kCantorExponent / alpha);
  cert.lowerBound = static_cast<double>(n) + kCantorExponent / alpha;
  cert.BOverA = cert.B / cert.A;
  return cert;
}

ProjectionCandidate identity_fiber_candidate(const FiniteMetricSpace& space, double lambda) {
  if (space.provenance.kind != "product")
    throw std::invalid_argument("identity fibre candidate needs a product grid space");
  if (space.metric != FiniteMetricSpace::Metric::Coords || space.coords.empty())
    throw std::invalid_argument("product grid space has no coordinates");
  ProjectionCandidate candidate;
  candidate.lambda = lambda;
  double fiber = space.coords.front().front();
  for (std::size_t i = 0; i < space.coords.size(); ++i) {
    if (space.coords[i].front() != fiber) continue;
    candidate.domain.push_back(
        std::vector<double>(space.coords[i].begin() + 1, space.coords[i].end()));
    candidate.image.push_back(i);
  }
  return candidate;
}

bool ProjectionReport::pass() const {
  return faceViolationCount == 0 && psiLipschitz <= lambda * (1.0 + kRelTol) &&
         productLipschitz <= lipschitzBudget * (1.0 + kRelTol) &&
         densityRadius <= gridSpacing * (1.0 + kRelTol);
}

ProjectionReport projection_surjectivity_check(const FiniteMetricSpace& space,
                                               const ProjectionCandidate& candidate) {
  if (candidate.domain.empty()) throw std::invalid_argument("candidate has an empty domain");
  if (candidate.domain.size() != candidate.image.size())
    throw std::invalid_argument("candidate domain and image sizes differ");
  if (candidate.lambda < 1.0) throw std::invalid_argument("lambda must be at least 1");
  std::size_t n = candidate.domain.front().size();
  if (n == 0) throw std::invalid_argument("candidate domain points have no coordinates");
  for (const auto& t : candidate.domain)
    if (t.size() != n) throw std::invalid_argument("candidate domain dimensions differ");
  for (std::size_t id : candidate.image)
    if (id >= space.size()) throw std::invalid_argument("candidate image id out of range");

  ProjectionReport report;
  report.n = static_cast<int>(n);
  report.lambda = candidate.lambda;
  report.domainPoints = candidate.domain.size();
  report.spacePoints = space.size();
  report.lipschitzBudget = candidate.lambda * std::sqrt(static_cast<double>(n));

  constexpr double kFaceTol = 1e-12;
  std::vector<std::vector<std::size_t>> faceIds(n);
  for (std::size_t j = 0; j < candidate.domain.size(); ++j)
    for (std::size_t i = 0; i < n; ++i)
      if (std::abs(candidate.domain[j][i]) <= kFaceTol) faceIds[i].push_back(candidate.image[j]);
  for (std::size_t i = 0; i < n; ++i)
    if (faceIds[i].empty())
      throw std::invalid_argument("domain sample misses axial face " + std::to_string(i + 1));

  // psi[y][i] = capped, rescaled distance from space point y to the i-th face image.
  std::vector<std::vector<double>> psi(space.size(), std::vector<double>(n, 0.0));
  for (std::size_t y = 0; y < space.size(); ++y)
    for (std::size_t i = 0; i < n; ++i) {
      double phi = std::numeric_limits<double>::infinity();
      for (std::size_t a : faceIds[i]) phi = std::min(phi, space.dist(y, a));
      psi[y][i] = std::min(candidate.lambda * phi, 1.0);
    }

  std::vector<std::vector<double>> composed(candidate.domain.size());
  for (std::size_t j = 0; j < candidate.domain.size(); ++j)
    composed[j] = psi[candidate.image[j]];

  for (std::size_t j = 0; j < candidate.domain.size(); ++j)
    for (std::size_t i = 0; i < n; ++i) {
      bool onAxial = std::abs(candidate.domain[j][i]) <= kFaceTol;
      bool onOpposite = std::abs(candidate.domain[j][i] - 1.0) <= kFaceTol;
      if (!onAxial && !onOpposite) continue;
      ++report.faceChecks;
      double want = onAxial ? 0.0 : 1.0;
      if (std::abs(composed[j][i] - want) > kRelTol) {
        ++report.faceViolationCount;
        if (report.faceViolations.size() < kMaxFaceWitnesses)
          report.faceViolations.push_back(
              FaceWitness{j, static_cast<int>(i + 1), onOpposite, composed[j][i]});
      }
    }

  for (std::size_t y = 0; y < space.size(); ++y)
    for (std::size_t z = y + 1; z < space.size(); ++z) {
      double d = space.dist(y, z);
      if (d <= 0.0) continue;
      ++report.pairsChecked;
      double sq = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double diff = std::abs(psi[y][i] - psi[z][i]);
        report.psiLipschitz = std::max(report.psiLipschitz, diff / d);
        sq += diff * diff;
      }
      report.productLipschitz = std::max(report.productLipschitz, std::sqrt(sq) / d);
    }

  double spacing = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < candidate.domain.size(); ++a)
    for (std::size_t b = a + 1; b < candidate.domain.size(); ++b) {
      double sq = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double diff = candidate.domain[a][i] - candidate.domain[b][i];
        sq += diff * diff;
      }
      if (sq > 0.0) spacing = std::min(spacing, std::sqrt(sq));
    }
  report.gridSpacing = std::isfinite(spacing) ? spacing : 0.0;

  for (const auto& target : candidate.domain) {
    double nearest = std::numeric_limits<double>::infinity();
    for (const auto& value : composed) {
      double sq = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double diff = value[i] - target[i];
        sq += diff * diff;
      }
      nearest = std::min(nearest, std::sqrt(sq));
    }
    report.densityRadius = std::max(report.densityRadius, nearest);
  }
  return report;
}

RefuterReport capacity_refuter(const FiniteMetricSpace& space, double sigma) {
  if (!(sigma > 0.0) || !(sigma < 1.0))
    throw std::invalid_argument("sigma must lie strictly between 0 and 1");
  if (!space.exact || !space.exact->line)
    throw std::invalid_argument("capacity refuter needs an exact line space");

  std::map<Rational, std::size_t> byPosition;
  for (std::size_t i = 0; i < space.exact->pos.size(); ++i)
    byPosition[space.exact->pos[i][0]] = i;
  auto zeroIt = byPosition.find(Rational(0));
  if (zeroIt == byPosition.end())
    throw std::invalid_argument("space does not contain the chain limit point 0");
  int M = 0;
  while (byPosition.count(Rational(1, M + 1)) > 0) ++M;
  if (M < 3) throw std::invalid_argument("space does not contain a harmonic chain 1, 1/2, 1/3");

  RefuterReport report;
  report.sigma = sigma;
  report.M = M;
  report.n = static_cast<int>(std::ceil(std::max(2.0 / sigma, 2.0))) + 1;
  double nd = static_cast<double>(report.n);
  report.delta = 2.0 / (sigma * nd * (nd - 1.0));
  report.sigmaDelta = sigma * report.delta;
  if (M < report.n * (report.n - 1))
    throw std::invalid_argument("harmonic truncation too small: need M >= n(n-1) = " +
                                std::to_string(report.n * (report.n - 1)));

  auto idOf = [&](int m) { return byPosition.at(Rational(1, m)); };

  // Worst consecutive distance along the chain, measured on the space itself.
  report.closeness.label = "merge-step";
  report.closeness.rhs = report.sigmaDelta;
  for (int m = report.n; m <= M; ++m) {
    double d = space.dist(idOf(m), idOf(m - 1));
    report.closeness.lhs = std::max(report.closeness.lhs, d);
    ++report.closeness.checksRun;
  }
  double tailStep = space.dist(zeroIt->second, idOf(M));
  report.closeness.lhs = std::max(report.closeness.lhs, tailStep);
  ++report.closeness.checksRun;
  report.closeness.ok = report.closeness.lhs < report.closeness.rhs;

  // Same bound by formula: 1/(m(m-1)) peaks at m = n and stays under sigma*delta.
  report.stepGap.label = "uniform-gap";
  report.stepGap.rhs = report.sigmaDelta;
  double uniform = 1.0 / (nd * (nd - 1.0));
  bool monotone = true;
  for (int m = report.n; m <= M; ++m) {
    double gap = 1.0 / (static_cast<double>(m) * (static_cast<double>(m) - 1.0));
    if (gap > uniform * (1.0 + kRelTol)) monotone = false;
    report.stepGap.lhs = std::max(report.stepGap.lhs, gap);
    ++report.stepGap.checksRun;
  }
  report.stepGap.ok = monotone && report.stepGap.lhs < report.stepGap.rhs;

  report.forcedSet.push_back(zeroIt->second);
  for (int m = M; m >= report.n - 1; --m) report.forcedSet.push_back(idOf(m));
  report.diameterViolation.label = "forced-diameter";
  report.diameterViolation.lhs = report.delta;
  for (std::size_t a = 0; a < report.forcedSet.size(); ++a)
    for (std::size_t b = a + 1; b < report.forcedSet.size(); ++b) {
      report.forcedDiameter =
          std::max(report.forcedDiameter, space.dist(report.forcedSet[a], report.forcedSet[b]));
      ++report.diameterViolation.checksRun;
    }
  report.diameterViolation.rhs = report.forcedDiameter;
  report.diameterViolation.ok = report.diameterViolation.lhs < report.diameterViolation.rhs;
  return report;
}

}  // namespace biholder
