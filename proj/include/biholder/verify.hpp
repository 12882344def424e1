#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "biholder/embedding.hpp"
#include "biholder/metric_space.hpp"
#include "biholder/schedule.hpp"

namespace biholder {

struct PairWitness {
  std::size_t x = 0;
  std::size_t y = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs
};

struct LemmaReport {
  std::string lemmaId;
  std::size_t pairsChecked = 0;
  double worstSlack = std::numeric_limits<double>::infinity();
  double worstRelSlack = std::numeric_limits<double>::infinity();
  std::vector<PairWitness> witnesses;  // up to 10, worst first
  std::string mode = "exact";          // exact | relaxed
  std::string status = "pass";         // pass | fail | not-certified
  std::string note;

  bool pass() const { return status == "pass"; }
};

// Best-fit Hölder envelope over all pairs: exponents are the extreme values of
// log(imageDist)/log(dist) over informative pairs (dist != 1), and lambdaStar
// is the smallest single constant closing both bounds at the given exponents.
struct DistortionProfile {
  std::vector<std::pair<double, double>> samples;  // (dist, imageDist) per pair
  double alphaStar = 1.0;
  double betaStar = 1.0;

  double lambdaStar(double lowerExp, double upperExp) const;
};

LemmaReport check_local_lipschitz(const FiniteMetricSpace& space,
                                  const EmbeddingStage& stage,
                                  const ScaleSchedule& schedule);

LemmaReport check_weight_lipschitz(const FiniteMetricSpace& space,
                                   const EmbeddingStage& stage,
                                   const ScaleSchedule& schedule);

LemmaReport check_weight_sums(const FiniteMetricSpace& space, const EmbeddingStage& stage,
                              const ScaleSchedule& schedule);

LemmaReport check_weight_sum_lipschitz(const FiniteMetricSpace& space,
                                       const EmbeddingStage& stage,
                                       const ScaleSchedule& schedule);

LemmaReport check_separation(const FiniteMetricSpace& space, const EmbeddingStage& stage,
                             const ScaleSchedule& schedule);

LemmaReport check_edge_bound(const FiniteMetricSpace& space, const EmbeddingStage& prev,
                             const EmbeddingStage& stage, const ScaleSchedule& schedule);

LemmaReport check_simplex_minimum(int m);

LemmaReport check_qmeasure(const FiniteMetricSpace& space, const EmbeddingStage& stage,
                           const ScaleSchedule& schedule);

std::vector<LemmaReport> check_cauchy_and_limit(const std::vector<EmbeddingStage>& stages,
                                                const ScaleSchedule& schedule);

LemmaReport check_biholder(const FiniteMetricSpace& space,
                           const std::vector<EmbeddingStage>& stages,
                           const ScaleSchedule& schedule);

DistortionProfile brute_force_oracle(const FiniteMetricSpace& space,
                                     const std::vector<SparseVector>& images);

}  // namespace biholder
