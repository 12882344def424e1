#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "biholder/metric_space.hpp"

namespace biholder {

// Log-log box-counting fit over a family of covering scales.
struct DimensionReport {
  std::vector<double> scales;        // covering radii, descending
  std::vector<std::size_t> counts;   // greedy covering number per scale
  double slope = 0.0;                // least-squares slope of log(count) vs log(1/scale)
  double residual = 0.0;             // root-mean-square misfit of the fit
  std::optional<double> measureExponent;
  std::vector<double> measureAtScale;  // sum of diam(U)^s over the greedy cover, per scale
  double sampleResolution = 0.0;     // smallest positive pairwise distance
  std::string warning;
};

// Gap-sum and image-measure certificate for the fast-shrinking-gap Cantor space.
struct FastgapReport {
  int levels = 0;
  double alpha = 1.0;
  double beta = 1.0;
  double lambda = 1.0;
  int partialTerms = 0;           // gap-sum terms evaluated directly
  double partialSum = 0.0;
  double tailBound = 0.0;         // rigorous bound on all omitted terms
  double gapSumUpperBound = 0.0;  // partialSum + tailBound
  bool gapSumBelowHalf = false;
  double measureLowerBound = 0.0;  // 1 - gapSumUpperBound, a length lower bound for the space
  int minimalK = 0;                // smallest stage where the image gaps lose to the image measure
  double imageMeasureLowerBound = 0.0;  // 1 / (2 lambda 3^{alpha k}) at that stage
  std::vector<double> intervalWidths;   // level-k interval width, k = 0..levels
  bool widthsOk = false;                // every width at least 3^{-k}, checked exactly
  bool pass() const { return gapSumBelowHalf && widthsOk && minimalK > 0; }
};

// Dimension lower bound for the product of the Cantor set with a hyper-cube.
struct HypercurveCertificate {
  double lambda = 1.0;
  double alpha = 1.0;
  double beta = 1.0;
  int n = 1;
  double A = 0.0;          // spread constant for the fibre family
  double B = 0.0;          // bigness constant: uniform n-measure lower bound per fibre
  double lowerBound = 0.0; // n + log2/(alpha log3)
  double BOverA = 0.0;     // cover-sum lower bound at the lowerBound exponent
};

struct FaceWitness {
  std::size_t domainIndex = 0;
  int axis = 0;          // 1-based coordinate direction
  bool opposite = false; // false: axial face (coordinate 0), true: opposite face (coordinate 1)
  double value = 0.0;    // offending coordinate of the composed map
};

// A stored point-map from a hyper-cube grid into a metric space.
struct ProjectionCandidate {
  std::vector<std::vector<double>> domain;  // cube sample, coordinates in [0,1]
  std::vector<std::size_t> image;           // per domain point, the image id in the ambient space
  double lambda = 1.0;
};

// Discrete surrogate for the projection-surjectivity argument: face
// preservation, Lipschitz budgets, and grid density of the composed self-map.
struct ProjectionReport {
  int n = 0;
  double lambda = 1.0;
  std::size_t domainPoints = 0;
  std::size_t spacePoints = 0;
  std::size_t faceChecks = 0;
  std::size_t faceViolationCount = 0;
  std::vector<FaceWitness> faceViolations;  // capped at the worst few
  std::size_t pairsChecked = 0;
  double psiLipschitz = 0.0;      // largest per-axis difference quotient observed
  double productLipschitz = 0.0;  // largest difference quotient of the product map
  double lipschitzBudget = 0.0;   // lambda * sqrt(n)
  double densityRadius = 0.0;     // worst distance from a grid target to the composed image
  double gridSpacing = 0.0;
  bool pass() const;
};

struct RefuterInequality {
  std::string label;
  double lhs = 0.0;
  double rhs = 0.0;         // certified when lhs < rhs
  std::size_t checksRun = 0;
  bool ok = false;
};

// Contradiction certificate: no colored cover of the harmonic space can meet
// a capacity-style Lebesgue demand at the chosen scale.
struct RefuterReport {
  double sigma = 0.0;
  int M = 0;  // truncation of the harmonic chain
  int n = 0;
  double delta = 0.0;
  double sigmaDelta = 0.0;
  std::vector<std::size_t> forcedSet;  // ids forced into a single cover set
  double forcedDiameter = 0.0;
  RefuterInequality closeness;          // consecutive chain distances vs sigma*delta
  RefuterInequality stepGap;            // per-step gap formula vs the uniform bound
  RefuterInequality diameterViolation;  // delta vs the forced-set diameter
  bool pass() const { return closeness.ok && stepGap.ok && diameterViolation.ok; }
};

DimensionReport box_dimension(const FiniteMetricSpace& space, std::vector<double> scales,
                              std::optional<double> measureExponent = {});

FiniteMetricSpace snowflake(const FiniteMetricSpace& space, double power);

FastgapReport fastgap_certificate(int levels, double alpha, double beta, double lambda);

// Largest sampled ratio measure(ball) / diam(ball)^{log2/log3} for the
// level-`levels` uniform measure on the middle-third Cantor sample.
double cantor_ahlfors_constant(int levels);

HypercurveCertificate hypercurve_certificate(double lambda, double alpha, int n, double nu);

// Canonical candidate: the first Cantor fibre of a product grid, mapped identically.
ProjectionCandidate identity_fiber_candidate(const FiniteMetricSpace& space,
                                             double lambda = 1.0);

ProjectionReport projection_surjectivity_check(const FiniteMetricSpace& space,
                                               const ProjectionCandidate& candidate);

RefuterReport capacity_refuter(const FiniteMetricSpace& space, double sigma);

}  // namespace biholder
