#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "biholder/rational.hpp"

namespace biholder {

using OrderedJson = nlohmann::ordered_json;

struct Provenance {
  std::string kind;            // cantor | interval | product | harmonic | points | matrix | snowflake
  OrderedJson params;          // builder parameters sufficient to reproduce the space
  double normalizationFactor = 1.0;  // divisor applied to raw distances
};

struct GapRule {
  enum class Kind { Third, FastGap, Custom };
  Kind kind = Kind::Third;
  std::vector<Rational> customGaps;  // absolute level-k gap diameters, k = 1..levels

  // Diameter of the open gap removed at `level` from a parent of width `parentWidth`.
  Rational gapDiameter(int level, const Rational& parentWidth) const;
  std::string name() const;
};

struct CantorSpec {
  GapRule gaps;
  int levels = 0;
};

// Interval layout of a Cantor construction, exact at every level.
struct CantorStructure {
  std::vector<Rational> widths;               // widths[k]: level-k interval width (widths[0] = 1)
  std::vector<Rational> gapWidths;            // gapWidths[k]: level-k gap width (index 0 unused)
  std::vector<std::vector<Rational>> starts;  // starts[k]: left endpoints, ascending
};

// Exact coordinates backing the float64 metric, kept so that near-tie
// comparisons can be settled without rounding error.
struct ExactBacking {
  std::vector<std::vector<Rational>> pos;  // raw (pre-normalization) coordinates
  Rational distSqScale = 1;                // dist(i,j)^2 = distSqScale * sum_a (pos_i-pos_j)_a^2
  bool line = false;                       // 1-D space: dist(i,j) = distScale * |delta|
  Rational distScale = 1;
};

struct FiniteMetricSpace {
  enum class Metric { Matrix, Coords };

  Metric metric = Metric::Coords;
  std::vector<std::vector<double>> coords;  // raw coordinates (Coords mode)
  std::vector<double> matrix;               // dense row-major distances (Matrix mode)
  double coordScale = 1.0;     // Coords: dist = (coordScale * |ci - cj|_2)^snowflakePower
  double snowflakePower = 1.0;
  double diameter = 0.0;
  Provenance provenance;
  std::optional<ExactBacking> exact;

  std::size_t size() const {
    return metric == Metric::Coords ? coords.size() : matrixSize_;
  }
  double dist(std::size_t i, std::size_t j) const;
  double minPairwiseDistance() const;

  std::optional<Rational> distExact(std::size_t i, std::size_t j) const;    // 1-D only
  std::optional<Rational> distSqExact(std::size_t i, std::size_t j) const;  // power 1 only

  std::size_t matrixSize_ = 0;  // point count in Matrix mode
};

struct DoublingEstimate {
  int N_hat = 0;
  std::vector<double> scalesChecked;
  std::size_t witnessPoint = 0;
  double witnessScale = 0.0;
};

struct MetricAxiomReport {
  bool ok = false;
  double worstTriangleSlack = 0.0;  // min over checked triples of d(x,z)+d(z,y)-d(x,y)
  std::size_t triplesChecked = 0;
  bool exhaustive = false;
};

CantorStructure derive_cantor_structure(const CantorSpec& spec);

FiniteMetricSpace build_cantor(const CantorSpec& spec);
FiniteMetricSpace build_interval_grid(int gridRes);  // gridRes points, spacing 1/(gridRes-1)
FiniteMetricSpace build_product_grid(const CantorSpec& cantor, int n, int gridRes,
                                     bool normalized = true);
FiniteMetricSpace build_harmonic(int M);
FiniteMetricSpace from_coords(std::vector<std::vector<double>> coords);
FiniteMetricSpace from_matrix(std::vector<double> matrix, std::size_t n);
FiniteMetricSpace from_line_points(const std::vector<Rational>& positions);

FiniteMetricSpace normalize(FiniteMetricSpace space);

DoublingEstimate estimate_doubling(const FiniteMetricSpace& space,
                                   std::vector<double> scales = {});

MetricAxiomReport check_metric_axioms(const FiniteMetricSpace& space,
                                      std::size_t maxExhaustive = 200,
                                      unsigned seed = 0);

}  // namespace biholder
