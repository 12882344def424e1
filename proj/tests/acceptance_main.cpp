#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "biholder/pipeline.hpp"
#include "biholder/serialize.hpp"

using namespace biholder;

namespace fs = std::filesystem;

namespace {

#define EXPECT(cond, msg)                 \
  do {                                    \
    if (!(cond)) return std::string(msg); \
  } while (0)

ScheduleParams make_params(int n, double q, double sigma, int N, bool relaxed = false) {
  ScheduleParams p;
  p.n = n;
  p.q = q;
  p.sigma = sigma;
  p.N = N;
  p.relaxed = relaxed;
  return p;
}

FiniteMetricSpace line_space(const std::vector<std::string>& texts) {
  std::vector<Rational> positions;
  for (const auto& text : texts) positions.push_back(*parse_rational(text));
  return from_line_points(positions);
}

CantorSpec middle_third(int levels) {
  CantorSpec spec;
  spec.levels = levels;
  return spec;
}

constexpr double kPad = 1.0 + 1e-9;

std::string criterion_schedule_identities() {
  struct Preset {
    int n;
    double q, sigma;
    int N;
  };
  const std::vector<Preset> presets = {{0, 1.0, 0.5, 8}, {0, 0.5, 0.25, 0}, {1, 2.0, 0.5, 0}};
  for (const auto& preset : presets) {
    int N = preset.N > 0 ? preset.N : choose_N(preset.n, preset.q, preset.sigma, 2);
    auto schedule = exact_schedule(make_params(preset.n, preset.q, preset.sigma, N), 50);
    EXPECT(check_schedule_identities(schedule).pass(1e-12),
           "identity report exceeds the 1e-12 relative tolerance");
    EXPECT(schedule.logEps[1] + schedule.constants.logC == 0.0,
           "first scale times the distortion base misses one in log domain");
    const double log2L = std::log2(schedule.constants.L);
    for (int i = 0; i <= 50; ++i) {
      double direct = schedule.logEps[i] - i * log2L;
      double got = schedule.logDelta[i];
      double size = std::max({1.0, std::fabs(direct), std::fabs(got)});
      EXPECT(std::fabs(got - direct) <= 1e-12 * size,
             "telescoped mesh scale drifts from the closed form");
    }
  }
  return {};
}

std::string criterion_exact_small_spaces() {
  const std::vector<std::vector<std::string>> pointSets = {
      {"0", "1"},
      {"0", "1/2", "1"},
      {"0", "1/3", "2/3", "1"},
      {"0", "1/4", "1/2", "3/4", "1"},
      {"0", "1/5", "2/5", "3/5", "4/5", "1"}};
  for (const auto& texts : pointSets) {
    auto space = line_space(texts);
    auto schedule = exact_schedule(make_params(0, 1.0, 0.5, 8), 3);
    auto run = run_construction(space, schedule, 3);
    EXPECT(run.stabilizedAt >= 1, "construction never stabilized");
    EXPECT(check_biholder(space, run.stages, schedule).pass(),
           "two-sided distortion sandwich failed");
    for (std::size_t i = 1; i < run.stages.size(); ++i)
      EXPECT(check_qmeasure(space, run.stages[i], schedule).pass(),
             "stagewise cover mass tops the certified bound");

    std::vector<SparseVector> images;
    double tail = 0.0;
    for (std::size_t x = 0; x < space.size(); ++x) {
      auto limit = evaluate_limit(run.stages, schedule, x);
      images.push_back(limit.image);
      tail = std::max(tail, limit.tailBound);
    }
    auto profile = brute_force_oracle(space, images);
    const double Q = schedule.constants.Q;
    const double lambda = std::exp2(schedule.constants.logLambda);
    for (const auto& [d, imageDist] : profile.samples) {
      double lower = std::pow(d, 2.0 * Q) / lambda;
      double upper = lambda * std::pow(d, 1.0 / (4.0 * Q));
      EXPECT(imageDist >= lower * (1.0 - 1e-9) - 2.0 * tail,
             "oracle found a pair under the lower envelope");
      EXPECT(imageDist <= upper * (1.0 + 1e-9) + 2.0 * tail,
             "oracle found a pair over the upper envelope");
    }
  }
  return {};
}

std::string criterion_relaxed_cantor() {
  for (int levels : {4, 5}) {
    auto space = build_cantor(middle_third(levels));
    auto schedule = relaxed_schedule(make_params(0, 0.5, 1.0 / 3.0, 2, true), 2048.0,
                                     std::exp2(-11.0), 3);
    RunOptions options;
    options.stopAtStabilization = false;
    auto run = run_construction(space, schedule, 3, options);
    EXPECT(run.stages.size() >= 4, "fewer than three refinement stages completed");
    for (std::size_t i = 1; i < run.stages.size(); ++i) {
      EXPECT(check_local_lipschitz(space, run.stages[i], schedule).pass(),
             "local Lipschitz bound failed");
      EXPECT(check_separation(space, run.stages[i], schedule).pass(),
             "separation floor failed");
      EXPECT(check_edge_bound(space, run.stages[i - 1], run.stages[i], schedule).pass(),
             "edge bound failed");
      EXPECT(check_qmeasure(space, run.stages[i], schedule).status == "not-certified",
             "relaxed cover mass must report not-certified");
    }
    auto limits = check_cauchy_and_limit(run.stages, schedule);
    for (const auto& report : limits)
      EXPECT(report.pass(), "successive-stage contraction or tail bound failed");
  }
  return {};
}

std::string criterion_cover_certificates() {
  auto cantor = build_cantor(middle_third(4));
  for (int level = 1; level <= 3; ++level) {
    auto cover = build_structured_cover(cantor, level);
    double cell = std::pow(3.0, -level);
    EXPECT(cover.certified, "structured cover lost its certificate");
    EXPECT(verify_cover(cantor, cover).pass, "structured cover failed re-verification");
    EXPECT(cover.meshCert <= cell * (1.0 + 1e-12), "structured mesh exceeds its cell size");
    EXPECT(cover.multiplicityCert == 1, "structured cover overlaps");
    EXPECT(cover.lebesgueCert >= cell * (1.0 - 1e-12),
           "structured buffer under the cell size");
  }

  auto grid = build_interval_grid(1025);
  const double delta = 0.1;
  auto greedy = build_greedy_cover(grid, delta, 0.25);
  EXPECT(greedy.certified, "interval cover lost its certificate");
  EXPECT(greedy.multiplicityCert == 2, "interval cover multiplicity is not two");
  EXPECT(greedy.lebesgueCert >= delta / 4.0 * (1.0 - 1e-12),
         "interval buffer under a quarter of the mesh target");

  auto base = build_structured_cover(cantor, 3);
  auto refined = size_controlled_refine(cantor, base, 4);
  EXPECT(refined.certified, "refinement lost its certificate");
  EXPECT(refined.sigma == base.sigma / 2.0, "refinement must halve the buffer ratio");
  double bound = std::pow(4.0, std::log2(2.0 / (refined.sigma * refined.targetDelta)));
  EXPECT(static_cast<double>(refined.sets.size()) <= bound,
         "refined count tops the doubling budget");

  auto intervalBase = build_structured_cover(build_interval_grid(33), 1);
  auto intervalRefined = size_controlled_refine(build_interval_grid(33), intervalBase, 4);
  EXPECT(intervalRefined.certified, "interval refinement lost its certificate");
  double intervalBound = std::pow(
      4.0, std::log2(2.0 / (intervalRefined.sigma * intervalRefined.targetDelta)));
  EXPECT(static_cast<double>(intervalRefined.sets.size()) <= intervalBound,
         "interval refined count tops the doubling budget");
  return {};
}

std::string criterion_dimension_slopes() {
  auto cantor = build_cantor(middle_third(10));
  std::vector<double> cantorScales;
  for (int k = 1; k <= 8; ++k) cantorScales.push_back(kPad * std::pow(3.0, -k));
  auto cantorReport = box_dimension(cantor, cantorScales);
  EXPECT(std::fabs(cantorReport.slope - 0.6309297536) <= 0.02,
         "middle-third slope left its band");

  auto grid = build_interval_grid(1025);
  std::vector<double> gridScales;
  for (int k = 1; k <= 5; ++k) gridScales.push_back(kPad * std::exp2(-static_cast<double>(k)));
  auto gridReport = box_dimension(grid, gridScales);
  EXPECT(std::fabs(gridReport.slope - 1.0) <= 0.02, "segment slope left its band");

  auto product = build_product_grid(middle_third(5), 1, 4375, false);
  std::vector<double> productScales;
  for (int k = 2; k <= 5; ++k) productScales.push_back(kPad * std::pow(3.0, -k));
  auto productReport = box_dimension(product, productScales);
  EXPECT(std::fabs(productReport.slope - 1.6309297536) <= 0.03,
         "product slope left its band");

  const double power = std::log(2.0) / std::log(3.0);
  auto straightened = snowflake(cantor, power);
  std::vector<double> snowScales;
  for (double s : cantorScales) snowScales.push_back(std::pow(s, power));
  auto snowReport = box_dimension(straightened, snowScales);
  EXPECT(std::fabs(snowReport.slope - 1.0) <= 0.03, "snowflaked slope left its band");
  return {};
}

std::string criterion_fastgap() {
  auto first = fastgap_certificate(10, 1.0, 1.0, 1.0);
  EXPECT(first.pass(), "fast-gap certificate failed");
  EXPECT(std::fabs(first.partialSum - 0.1685290023) <= 1e-8, "gap partial sum moved");
  EXPECT(first.tailBound > 0.0, "tail bound must be a positive rigorous remainder");
  EXPECT(first.gapSumUpperBound < 0.5, "gap sum with its tail must stay under one half");
  EXPECT(first.minimalK == 2, "minimal stage moved for the unit parameters");
  EXPECT(std::fabs(first.imageMeasureLowerBound - 1.0 / 18.0) <= 1e-12,
         "image measure floor moved for the unit parameters");
  EXPECT(first.widthsOk, "per-level interval widths lost their exact floor");

  auto second = fastgap_certificate(5, 2.0, 0.5, 4.0);
  EXPECT(second.pass(), "fast-gap certificate failed for the steep parameters");
  EXPECT(second.minimalK == 85, "minimal stage moved for the steep parameters");
  EXPECT(second.imageMeasureLowerBound > 0.0, "image measure floor must stay positive");
  EXPECT(second.widthsOk, "per-level interval widths lost their exact floor");
  return {};
}

std::string criterion_refuter() {
  struct Case {
    double sigma;
    int M;
  };
  const std::vector<Case> cases = {{0.25, 72}, {0.5, 30}, {0.9, 12}};
  for (const auto& c : cases) {
    auto space = build_harmonic(c.M);
    auto report = capacity_refuter(space, c.sigma);
    EXPECT(report.pass(), "refuter inequality failed");
    EXPECT(report.closeness.checksRun > 0, "closeness inequality ran no checks");
    EXPECT(report.stepGap.checksRun > 0, "step-gap inequality ran no checks");
    if (c.sigma == 0.5) {
      EXPECT(report.n == 5, "buffer witness count moved");
      EXPECT(std::fabs(report.delta - 0.2) <= 1e-12, "witness scale moved");
      EXPECT(report.forcedDiameter >= 0.25 - 1e-12, "merged diameter under one quarter");
    }
  }
  return {};
}

std::string criterion_hypercurve() {
  const double nu = cantor_ahlfors_constant(6);
  struct Case {
    int n;
    double alpha;
  };
  const std::vector<Case> cases = {{1, 1.0}, {1, 2.0}, {2, 1.0}};
  for (const auto& c : cases) {
    auto cert = hypercurve_certificate(1.0, c.alpha, c.n, nu);
    EXPECT(cert.lowerBound > static_cast<double>(c.n),
           "lower bound must strictly exceed the cube dimension");
    double expected = c.n + std::log(2.0) / (c.alpha * std::log(3.0));
    EXPECT(std::fabs(cert.lowerBound - expected) <= 1e-9, "lower bound moved");
  }

  auto product = build_product_grid(middle_third(3), 1, 5, false);
  auto report = projection_surjectivity_check(product, identity_fiber_candidate(product));
  EXPECT(report.pass(), "projection check failed on the identity candidate");
  EXPECT(report.psiLipschitz <= report.lipschitzBudget + 1e-12,
         "axis retraction tops its Lipschitz budget");
  EXPECT(report.faceViolationCount == 0, "a face of the cube was not preserved");
  EXPECT(report.densityRadius <= report.gridSpacing + 1e-12,
         "composed image misses a grid cell");

  auto sample = build_product_grid(middle_third(4), 1, 16, false);
  std::vector<double> scales = {kPad / 3.0, 0.2, 0.12, 2.0 * kPad / 27.0};
  auto measure = box_dimension(sample, scales, 1.6309);
  auto floorCert = hypercurve_certificate(1.0, 1.0, 1, nu);
  EXPECT(measure.measureAtScale.size() == scales.size(), "missing cover-sum entries");
  for (double sum : measure.measureAtScale)
    EXPECT(sum > floorCert.BOverA, "cover sum fell under the certificate floor");
  return {};
}

std::string criterion_determinism() {
  auto dir = fs::temp_directory_path() / "biholder_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);

  auto demoDir = (dir / "demo").string();
  std::vector<std::string> demoArgs = {"demo", "--preset", "two-point", "--out", demoDir};
  auto runOnce = [](const std::vector<std::string>& args, std::string& text) {
    std::ostringstream out, err;
    int code = run_pipeline(args, out, err);
    text = out.str() + err.str();
    return code;
  };
  auto slurpDir = [](const std::string& path) {
    std::map<std::string, std::string> bytes;
    for (const auto& entry : fs::directory_iterator(path)) {
      std::ifstream in(entry.path(), std::ios::binary);
      std::ostringstream buf;
      buf << in.rdbuf();
      bytes[entry.path().filename().string()] = buf.str();
    }
    return bytes;
  };

  std::string firstText, secondText;
  EXPECT(runOnce(demoArgs, firstText) == 0, "demo run failed");
  auto firstBytes = slurpDir(demoDir);
  EXPECT(firstBytes.size() >= 5, "demo run wrote too few artifacts");
  EXPECT(runOnce(demoArgs, secondText) == 0, "demo re-run failed");
  EXPECT(firstText == secondText, "demo console output changed between runs");
  EXPECT(firstBytes == slurpDir(demoDir), "demo artifacts changed between runs");

  auto spacePath = (dir / "space.json").string();
  auto csvPath = (dir / "dims.csv").string();
  std::vector<std::string> spaceArgs = {"space", "--kind", "cantor", "--levels", "4",
                                        "--out", spacePath};
  std::vector<std::string> dimsArgs = {"dims",     "--space", spacePath,
                                       "--scales", "0.34:0.013:4", "--format",
                                       "csv",      "--out",   csvPath};
  std::string text;
  EXPECT(runOnce(spaceArgs, text) == 0, "space run failed");
  EXPECT(runOnce(dimsArgs, text) == 0, "dims run failed");
  auto firstCsv = slurpDir(dir.string());
  EXPECT(runOnce(spaceArgs, text) == 0, "space re-run failed");
  EXPECT(runOnce(dimsArgs, text) == 0, "dims re-run failed");
  EXPECT(firstCsv == slurpDir(dir.string()), "serialized artifacts changed between runs");
  return {};
}

struct Gate {
  bool allPass = true;

  template <class Fn>
  void criterion(int index, const char* name, double budgetSeconds, Fn&& fn) {
    auto start = std::chrono::steady_clock::now();
    std::string fault;
    try {
      fault = fn();
    } catch (const std::exception& e) {
      fault = std::string("threw: ") + e.what();
    }
    double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (fault.empty() && budgetSeconds > 0.0 && seconds >= budgetSeconds) {
      std::ostringstream over;
      over << "over the " << budgetSeconds << "s budget";
      fault = over.str();
    }
    bool ok = fault.empty();
    allPass = allPass && ok;
    std::printf("%s  %d/9 %-52s %6.2fs%s%s\n", ok ? "PASS" : "FAIL", index, name, seconds,
                ok ? "" : "  ", fault.c_str());
    std::fflush(stdout);
  }
};

}  // namespace

int main() {
  Gate gate;
  gate.criterion(1, "scale-schedule identities through fifty stages", 1.0,
                 criterion_schedule_identities);
  gate.criterion(2, "exact construction certifies small line spaces", 10.0,
                 criterion_exact_small_spaces);
  gate.criterion(3, "relaxed construction on the middle-third sample", 60.0,
                 criterion_relaxed_cantor);
  gate.criterion(4, "cover certificates meet their floors", 5.0,
                 criterion_cover_certificates);
  gate.criterion(5, "box-counting slopes land in their bands", 30.0,
                 criterion_dimension_slopes);
  gate.criterion(6, "fast-gap certificate and minimal stages", 1.0, criterion_fastgap);
  gate.criterion(7, "capacity refuter inequalities", 1.0, criterion_refuter);
  gate.criterion(8, "hypercurve bounds and projection budgets", 30.0,
                 criterion_hypercurve);
  gate.criterion(9, "re-runs reproduce byte-identical artifacts", 0.0,
                 criterion_determinism);
  std::printf("%s\n", gate.allPass ? "ACCEPTANCE: all criteria hold"
                                   : "ACCEPTANCE: at least one criterion failed");
  return gate.allPass ? 0 : 1;
}
