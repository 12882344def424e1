#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "biholder/metric_space.hpp"

namespace biholder {

struct CoverSet {
  std::vector<std::size_t> memberIds;  // sorted ascending
  std::size_t anchor = 0;              // smallest member id
  int color = 0;
};

struct ColoredCover {
  std::vector<CoverSet> sets;  // ordered by (color, anchor)
  double meshCert = 0.0;       // max achieved set diameter
  double lebesgueCert = 0.0;   // min over points of the best complement margin
  int multiplicityCert = 0;    // max number of sets through one point
  int colorCount = 0;
  double targetDelta = 0.0;
  double sigma = 0.0;
  bool certified = false;  // mesh <= delta and lebesgue >= sigma*delta
};

struct CoverReport {
  bool pass = false;
  double mesh = 0.0;
  double lebesgue = 0.0;
  int multiplicity = 0;
  int colors = 0;
  bool covers = false;
  bool coloringProper = false;
  bool orderingCanonical = false;
  bool certificateConsistent = false;
  std::vector<std::pair<std::size_t, std::size_t>> redundantPairs;  // (subset, superset)
  std::string note;
};

// Distance from x to the complement of U; positive exactly when x is a member.
double weight(const FiniteMetricSpace& space, const CoverSet& set, std::size_t x);

ColoredCover build_greedy_cover(const FiniteMetricSpace& space, double delta,
                                double sigma);
ColoredCover build_structured_cover(const FiniteMetricSpace& space, int level);
ColoredCover size_controlled_refine(const FiniteMetricSpace& space,
                                    const ColoredCover& base, int N);
CoverReport verify_cover(const FiniteMetricSpace& space, const ColoredCover& cover);

}  // namespace biholder
