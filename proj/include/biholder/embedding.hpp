#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "biholder/covers.hpp"
#include "biholder/metric_space.hpp"
#include "biholder/schedule.hpp"

namespace biholder {

// Element of the growing coordinate prefix; absent coordinates are zero.
struct SparseVector {
  std::map<std::size_t, double> entries;  // coordinate index -> value, no stored zeros
  std::size_t dimensionHint = 0;

  void set(std::size_t k, double v);
  double get(std::size_t k) const;
  double norm() const;
};

double dist(const SparseVector& a, const SparseVector& b);

struct EmbeddingStage {
  int index = 0;
  ColoredCover cover;                  // stage cover; empty at stage 0
  std::vector<SparseVector> vertices;  // one per cover set, aligned with cover.sets
  std::size_t coordOffset = 0;         // first coordinate this stage writes
  std::size_t coordCount = 0;          // total coordinates in play after this stage
  std::vector<SparseVector> images;    // one per sample point
};

struct SimplexComplex {
  int stage = 0;
  std::vector<std::vector<std::size_t>> simplices;  // sorted index sets into cover.sets
  double countBound = 0.0;                          // |cover|^(dimension+2)
  bool countBoundOk = false;
};

enum class CoverSource { Greedy, Structured };

struct RunOptions {
  CoverSource coverSource = CoverSource::Greedy;
  bool stopAtStabilization = true;
  int maxStructuredLevel = 64;
};

struct ConstructionRun {
  std::vector<EmbeddingStage> stages;  // stages[i] has index i, starting at the zero map
  int stabilizedAt = -1;               // first all-singleton stage, -1 if none
  std::string stopReason;              // set when fewer stages than requested were built
};

struct LimitPoint {
  SparseVector image;
  double tailBound = 0.0;
};

EmbeddingStage initial_stage(const FiniteMetricSpace& space);

EmbeddingStage refine_stage(const FiniteMetricSpace& space, const EmbeddingStage& prev,
                            const ColoredCover& cover, const ScaleSchedule& schedule,
                            int i);

ConstructionRun run_construction(const FiniteMetricSpace& space,
                                 const ScaleSchedule& schedule, int stages,
                                 const RunOptions& options = {});

LimitPoint evaluate_limit(const std::vector<EmbeddingStage>& stages,
                          const ScaleSchedule& schedule, std::size_t x);

SimplexComplex enumerate_simplices(const EmbeddingStage& stage, int dimension);

}  // namespace biholder
