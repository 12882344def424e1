#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "biholder/dimension.hpp"
#include "biholder/metric_space.hpp"

using namespace biholder;

namespace {

constexpr double kPad = 1.0 + 1e-9;
const double kCantorDim = std::log(2.0) / std::log(3.0);

CantorSpec middle_third(int levels) {
  CantorSpec spec;
  spec.gaps.kind = GapRule::Kind::Third;
  spec.levels = levels;
  return spec;
}

std::vector<double> geometric_scales(double base, int first, int last) {
  std::vector<double> scales;
  for (int k = first; k <= last; ++k) scales.push_back(std::pow(base, -k) * kPad);
  return scales;
}

}  // namespace

TEST_CASE("middle-third sample counts double per ternary scale") {
  auto space = build_cantor(middle_third(10));
  auto report = box_dimension(space, geometric_scales(3.0, 1, 8));
  REQUIRE(report.counts.size() == 8);
  std::size_t expected = 2;
  for (std::size_t i = 0; i < 8; ++i, expected *= 2) CHECK(report.counts[i] == expected);
  CHECK(report.slope == doctest::Approx(kCantorDim).epsilon(1e-9));
  CHECK(report.residual < 1e-12);
  CHECK(report.sampleResolution == doctest::Approx(std::pow(3.0, -10)).epsilon(1e-12));
  CHECK(report.warning.empty());
  CHECK(report.measureAtScale.empty());
  CHECK(report.scales.front() > report.scales.back());
}

TEST_CASE("unit interval grid fits slope one") {
  auto grid = build_interval_grid(1025);
  auto report = box_dimension(grid, geometric_scales(2.0, 1, 5));
  REQUIRE(report.counts.size() == 5);
  std::size_t expected = 2;
  for (std::size_t i = 0; i < 5; ++i, expected *= 2) CHECK(report.counts[i] == expected);
  CHECK(report.slope == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(report.residual < 1e-12);
  CHECK(report.sampleResolution == doctest::Approx(1.0 / 1024.0).epsilon(1e-12));
}

TEST_CASE("snowflaking the middle-third sample to its own exponent flattens the slope to one") {
  auto snow = snowflake(build_cantor(middle_third(10)), kCantorDim);
  auto report = box_dimension(snow, geometric_scales(2.0, 1, 6));
  REQUIRE(report.counts.size() == 6);
  std::size_t expected = 2;
  for (std::size_t i = 0; i < 6; ++i, expected *= 2) CHECK(report.counts[i] == expected);
  CHECK(report.slope == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("square-root snowflake of the interval doubles the slope") {
  auto snow = snowflake(build_interval_grid(1025), 0.5);
  std::vector<double> scales;
  for (int j = 1; j <= 5; ++j) scales.push_back(std::pow(2.0, -0.5 * j) * kPad);
  auto report = box_dimension(snow, scales);
  REQUIRE(report.counts.size() == 5);
  std::size_t expected = 2;
  for (std::size_t i = 0; i < 5; ++i, expected *= 2) CHECK(report.counts[i] == expected);
  CHECK(report.slope == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(report.sampleResolution == doctest::Approx(1.0 / 32.0).epsilon(1e-12));
}

TEST_CASE("product of the middle-third sample with a fine segment fits the mixed slope") {
  auto space = build_product_grid(middle_third(5), 1, 4375, false);
  REQUIRE(space.size() == 280000);
  auto report = box_dimension(space, geometric_scales(3.0, 2, 5));
  REQUIRE(report.counts.size() == 4);
  CHECK(report.counts[0] == 72);
  CHECK(report.counts[1] == 432);
  CHECK(report.counts[2] == 2560);
  CHECK(report.counts[3] == 14784);
  CHECK(report.slope == doctest::Approx(1.615970).epsilon(1e-4));
  CHECK(report.slope > 1.6309297536 - 0.03);
  CHECK(report.slope < 1.6309297536 + 0.03);
  CHECK(report.residual < 0.02);
  CHECK(report.warning.empty());
}

TEST_CASE("coarse product instance reports measure sums above the certificate floor") {
  auto space = build_product_grid(middle_third(4), 1, 16, false);
  REQUIRE(space.size() == 512);
  CHECK(space.diameter == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  std::vector<double> scales = {1.0 / 3.0 * kPad, 0.2, 0.12, 2.0 / 27.0 * kPad};
  auto report = box_dimension(space, scales, 1.0 + kCantorDim);
  REQUIRE(report.counts.size() == 4);
  CHECK(report.counts[0] == 12);
  CHECK(report.counts[1] == 20);
  CHECK(report.counts[2] == 64);
  CHECK(report.counts[3] == 96);
  CHECK(report.slope > 1.4);
  CHECK(report.slope < 1.7);
  REQUIRE(report.measureExponent.has_value());
  CHECK(*report.measureExponent == doctest::Approx(1.0 + kCantorDim));
  REQUIRE(report.measureAtScale.size() == 4);
  CHECK(report.measureAtScale[0] == doctest::Approx(2.696795).epsilon(1e-5));
  CHECK(report.measureAtScale[1] == doctest::Approx(2.036257).epsilon(1e-5));
  CHECK(report.measureAtScale[2] == doctest::Approx(1.513688).epsilon(1e-5));
  CHECK(report.measureAtScale[3] == doctest::Approx(1.279665).epsilon(1e-5));
  for (double s : report.measureAtScale) CHECK(s > 0.5);
}

TEST_CASE("greedy cover measure sums match the hand count on a dyadic grid") {
  auto grid = build_interval_grid(33);
  std::vector<double> scales = {0.5, 0.25, 0.125, 0.0625};
  auto report = box_dimension(grid, scales, 1.0);
  REQUIRE(report.counts.size() == 4);
  CHECK(report.counts[0] == 2);
  CHECK(report.counts[1] == 4);
  CHECK(report.counts[2] == 7);
  CHECK(report.counts[3] == 11);
  REQUIRE(report.measureAtScale.size() == 4);
  CHECK(report.measureAtScale[0] == doctest::Approx(31.0 / 32.0).epsilon(1e-12));
  CHECK(report.measureAtScale[1] == doctest::Approx(29.0 / 32.0).epsilon(1e-12));
  CHECK(report.measureAtScale[2] == doctest::Approx(26.0 / 32.0).epsilon(1e-12));
  CHECK(report.measureAtScale[3] == doctest::Approx(22.0 / 32.0).epsilon(1e-12));
  CHECK(report.sampleResolution == doctest::Approx(1.0 / 32.0).epsilon(1e-12));
  CHECK(!report.warning.empty());
}

TEST_CASE("box dimension rejects unusable scale families") {
  auto grid = build_interval_grid(33);
  CHECK_THROWS_AS(box_dimension(grid, {0.5, 0.25, 0.125}), std::invalid_argument);
  CHECK_THROWS_AS(box_dimension(grid, {0.5, 0.5, 0.25, 0.25, 0.125}), std::invalid_argument);
  CHECK_THROWS_AS(box_dimension(grid, {0.5, 0.4, 0.25, -0.125}), std::invalid_argument);
  CHECK_THROWS_AS(box_dimension(grid, {0.5, 0.4, 0.3, 0.15}), std::invalid_argument);
  CHECK_THROWS_AS(box_dimension(grid, {0.5, 0.25, 0.125, 1.0 / 32.0}), std::invalid_argument);
}

TEST_CASE("snowflake transform composes powers and maps distances entrywise") {
  auto grid = build_interval_grid(33);
  auto same = snowflake(grid, 1.0);
  CHECK(same.size() == grid.size());
  CHECK(same.dist(0, 32) == grid.dist(0, 32));

  auto quarter = snowflake(snowflake(grid, 0.5), 0.5);
  CHECK(quarter.dist(0, 32) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(quarter.dist(0, 1) == doctest::Approx(std::pow(1.0 / 32.0, 0.25)).epsilon(1e-12));
  CHECK(quarter.diameter == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(quarter.provenance.kind == "snowflake");

  auto triple = snowflake(from_matrix({0.0, 1.0, 1.0, 1.0, 0.0, 0.25, 1.0, 0.25, 0.0}, 3), 0.5);
  CHECK(triple.dist(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(triple.dist(1, 2) == doctest::Approx(0.5).epsilon(1e-12));

  CHECK_THROWS_AS(snowflake(grid, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(snowflake(grid, -0.5), std::invalid_argument);
  CHECK_THROWS_AS(snowflake(grid, 1.5), std::invalid_argument);
}

TEST_CASE("fast-gap certificate bounds the gap series below one half") {
  auto report = fastgap_certificate(10, 1.0, 1.0, 1.0);
  CHECK(report.partialTerms == 9);
  CHECK(report.partialSum == doctest::Approx(0.1685290023).epsilon(1e-9));
  CHECK(report.tailBound == doctest::Approx(9.765625e-5).epsilon(1e-12));
  CHECK(report.tailBound < 1e-4);
  CHECK(report.gapSumUpperBound ==
        doctest::Approx(report.partialSum + report.tailBound).epsilon(1e-15));
  CHECK(report.gapSumUpperBound < 0.5);
  CHECK(report.gapSumBelowHalf);
  CHECK(report.measureLowerBound == doctest::Approx(1.0 - report.gapSumUpperBound).epsilon(1e-15));
  CHECK(report.measureLowerBound > 0.83);
  CHECK(report.pass());
}

TEST_CASE("fast-gap stage search finds the first winning level") {
  auto unit = fastgap_certificate(10, 1.0, 1.0, 1.0);
  CHECK(unit.minimalK == 2);
  CHECK(unit.imageMeasureLowerBound == doctest::Approx(1.0 / 18.0).epsilon(1e-12));

  auto hard = fastgap_certificate(5, 2.0, 0.5, 4.0);
  CHECK(hard.minimalK == 85);
  CHECK(hard.imageMeasureLowerBound > 0.0);
  CHECK(hard.gapSumBelowHalf);
  CHECK(hard.pass());
}

TEST_CASE("fast-gap interval widths stay above the ternary floor") {
  auto report = fastgap_certificate(10, 1.0, 1.0, 1.0);
  REQUIRE(report.intervalWidths.size() == 11);
  CHECK(report.intervalWidths[0] == doctest::Approx(1.0));
  CHECK(report.intervalWidths[1] == doctest::Approx(0.45).epsilon(1e-12));
  CHECK(report.intervalWidths[2] == doctest::Approx(0.2125).epsilon(1e-12));
  CHECK(report.intervalWidths[3] == doctest::Approx(0.10439815).epsilon(1e-7));
  for (std::size_t k = 0; k < report.intervalWidths.size(); ++k)
    CHECK(report.intervalWidths[k] >= std::pow(3.0, -static_cast<double>(k)) * (1.0 - 1e-12));
  CHECK(report.widthsOk);
}

TEST_CASE("fast-gap certificate rejects out-of-range parameters") {
  CHECK_THROWS_AS(fastgap_certificate(0, 1.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(fastgap_certificate(5, 0.5, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(fastgap_certificate(5, 1.0, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(fastgap_certificate(5, 1.0, 1.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(fastgap_certificate(5, 1.0, 1.0, 0.5), std::invalid_argument);
}

TEST_CASE("spread constant of the ternary measure is level-stable") {
  const double expected = std::pow(2.0, 1.0 - kCantorDim);
  for (int levels = 5; levels <= 8; ++levels)
    CHECK(cantor_ahlfors_constant(levels) == doctest::Approx(expected).epsilon(1e-9));
  CHECK_THROWS_AS(cantor_ahlfors_constant(0), std::invalid_argument);
  CHECK_THROWS_AS(cantor_ahlfors_constant(21), std::invalid_argument);
}

TEST_CASE("hypercurve certificates exceed the cube dimension strictly") {
  const double nu = cantor_ahlfors_constant(6);
  auto flat = hypercurve_certificate(1.0, 1.0, 1, nu);
  CHECK(flat.A == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(flat.B == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(flat.BOverA == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(flat.lowerBound == doctest::Approx(1.0 + kCantorDim).epsilon(1e-12));
  CHECK(flat.lowerBound > 1.0);

  auto tempered = hypercurve_certificate(1.0, 2.0, 1, nu);
  CHECK(tempered.lowerBound == doctest::Approx(1.0 + kCantorDim / 2.0).epsilon(1e-12));
  CHECK(tempered.A == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(tempered.lowerBound > 1.0);

  auto planar = hypercurve_certificate(1.0, 1.0, 2, nu);
  CHECK(planar.lowerBound == doctest::Approx(2.0 + kCantorDim).epsilon(1e-12));
  CHECK(planar.B == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(planar.BOverA == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(planar.lowerBound > 2.0);

  auto stretched = hypercurve_certificate(2.0, 1.0, 1, nu);
  CHECK(stretched.A == doctest::Approx(2.0 * std::pow(2.0, kCantorDim)).epsilon(1e-9));
  CHECK(stretched.B == doctest::Approx(0.5).epsilon(1e-12));

  CHECK_THROWS_AS(hypercurve_certificate(0.5, 1.0, 1, nu), std::invalid_argument);
  CHECK_THROWS_AS(hypercurve_certificate(1.0, 0.5, 1, nu), std::invalid_argument);
  CHECK_THROWS_AS(hypercurve_certificate(1.0, 1.0, 0, nu), std::invalid_argument);
  CHECK_THROWS_AS(hypercurve_certificate(1.0, 1.0, 1, 0.0), std::invalid_argument);
}

TEST_CASE("identity fibre candidate reads the first fibre of a product grid") {
  auto space = build_product_grid(middle_third(3), 1, 5, false);
  REQUIRE(space.size() == 80);
  auto candidate = identity_fiber_candidate(space);
  REQUIRE(candidate.domain.size() == 5);
  REQUIRE(candidate.image.size() == 5);
  CHECK(candidate.lambda == 1.0);
  for (std::size_t j = 0; j < 5; ++j) {
    REQUIRE(candidate.domain[j].size() == 1);
    CHECK(candidate.domain[j][0] == doctest::Approx(j / 4.0).epsilon(1e-12));
    CHECK(candidate.image[j] == j);
  }
  CHECK_THROWS_AS(identity_fiber_candidate(build_cantor(middle_third(3))), std::invalid_argument);
}

TEST_CASE("identity fibre passes the surjectivity surrogate at unit lambda") {
  auto space = build_product_grid(middle_third(3), 1, 5, false);
  auto report = projection_surjectivity_check(space, identity_fiber_candidate(space));
  CHECK(report.pass());
  CHECK(report.n == 1);
  CHECK(report.domainPoints == 5);
  CHECK(report.spacePoints == 80);
  CHECK(report.faceChecks == 2);
  CHECK(report.faceViolationCount == 0);
  CHECK(report.pairsChecked == 3160);
  CHECK(report.psiLipschitz == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(report.productLipschitz == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(report.lipschitzBudget == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(report.densityRadius == 0.0);
  CHECK(report.gridSpacing == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("raising lambda coarsens the composed image to the grid spacing") {
  auto space = build_product_grid(middle_third(3), 1, 5, false);
  auto report = projection_surjectivity_check(space, identity_fiber_candidate(space, 2.0));
  CHECK(report.pass());
  CHECK(report.faceViolationCount == 0);
  CHECK(report.psiLipschitz == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(report.psiLipschitz <= report.lambda * (1.0 + 1e-9));
  CHECK(report.densityRadius == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(report.densityRadius <= report.gridSpacing * (1.0 + 1e-9));
}

TEST_CASE("rerouting the far face point is reported as a face violation") {
  auto space = build_product_grid(middle_third(3), 1, 5, false);
  auto candidate = identity_fiber_candidate(space);
  candidate.image.back() = candidate.image[1];
  auto report = projection_surjectivity_check(space, candidate);
  CHECK(!report.pass());
  CHECK(report.faceViolationCount == 1);
  REQUIRE(report.faceViolations.size() == 1);
  CHECK(report.faceViolations[0].domainIndex == 4);
  CHECK(report.faceViolations[0].axis == 1);
  CHECK(report.faceViolations[0].opposite);
  CHECK(report.faceViolations[0].value == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("surjectivity surrogate covers every axis of a planar grid") {
  auto space = build_product_grid(middle_third(2), 2, 3, false);
  REQUIRE(space.size() == 72);
  auto report = projection_surjectivity_check(space, identity_fiber_candidate(space));
  CHECK(report.pass());
  CHECK(report.n == 2);
  CHECK(report.domainPoints == 9);
  CHECK(report.faceChecks == 12);
  CHECK(report.lipschitzBudget == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(report.densityRadius == 0.0);
  CHECK(report.gridSpacing == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("surjectivity surrogate validates its candidate") {
  auto space = build_product_grid(middle_third(3), 1, 5, false);
  ProjectionCandidate empty;
  CHECK_THROWS_AS(projection_surjectivity_check(space, empty), std::invalid_argument);
  auto weak = identity_fiber_candidate(space);
  weak.lambda = 0.5;
  CHECK_THROWS_AS(projection_surjectivity_check(space, weak), std::invalid_argument);
  auto stray = identity_fiber_candidate(space);
  stray.image.back() = 999;
  CHECK_THROWS_AS(projection_surjectivity_check(space, stray), std::invalid_argument);
  auto ragged = identity_fiber_candidate(space);
  ragged.image.pop_back();
  CHECK_THROWS_AS(projection_surjectivity_check(space, ragged), std::invalid_argument);
}

TEST_CASE("capacity refuter certifies the harmonic chain at the pinned sigmas") {
  auto fine = capacity_refuter(build_harmonic(72), 0.25);
  CHECK(fine.pass());
  CHECK(fine.n == 9);
  CHECK(fine.M == 72);
  CHECK(fine.delta == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
  CHECK(fine.sigmaDelta == doctest::Approx(1.0 / 36.0).epsilon(1e-12));
  CHECK(fine.forcedSet.size() == 66);
  CHECK(fine.forcedDiameter == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(fine.closeness.lhs == doctest::Approx(1.0 / 72.0).epsilon(1e-12));
  CHECK(fine.diameterViolation.checksRun == 2145);

  auto mid = capacity_refuter(build_harmonic(30), 0.5);
  CHECK(mid.pass());
  CHECK(mid.n == 5);
  CHECK(mid.delta == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(mid.sigmaDelta == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(mid.forcedSet.size() == 28);
  CHECK(mid.forcedDiameter == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(mid.closeness.lhs == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(mid.stepGap.lhs < mid.stepGap.rhs);

  auto coarse = capacity_refuter(build_harmonic(12), 0.9);
  CHECK(coarse.pass());
  CHECK(coarse.n == 4);
  CHECK(coarse.delta == doctest::Approx(2.0 / (0.9 * 12.0)).epsilon(1e-12));
  CHECK(coarse.forcedSet.size() == 11);
  CHECK(coarse.forcedDiameter == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("capacity refuter rejects unusable inputs") {
  CHECK_THROWS_AS(capacity_refuter(build_harmonic(11), 0.9), std::invalid_argument);
  CHECK_THROWS_AS(capacity_refuter(build_interval_grid(33), 0.5), std::invalid_argument);
  CHECK_THROWS_AS(capacity_refuter(build_harmonic(12), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(capacity_refuter(build_harmonic(12), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(capacity_refuter(build_harmonic(12), 1.5), std::invalid_argument);
  CHECK_THROWS_AS(capacity_refuter(from_coords({{0.0}, {1.0}}), 0.5), std::invalid_argument);
}
