#include "biholder/pipeline.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "biholder/covers.hpp"
#include "biholder/dimension.hpp"
#include "biholder/embedding.hpp"
#include "biholder/schedule.hpp"
#include "biholder/serialize.hpp"
#include "biholder/verify.hpp"
#include "biholder/version.hpp"

namespace biholder {

namespace {

namespace fs = std::filesystem;

// Raised when a computation finishes but its certificate does not hold.
struct CertificateFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string format_g(double v, int digits = 6) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

OrderedJson artifact(const PipelineConfig& cfg, const OrderedJson& payload) {
  OrderedJson j;
  if (payload.contains("schema")) j["schema"] = payload.at("schema");
  j["version"] = kVersion;
  j["config"] = config_to_json(cfg);
  for (const auto& [key, value] : payload.items())
    if (key != "schema") j[key] = value;
  return j;
}

void emit(const PipelineConfig& cfg, const OrderedJson& payload, std::ostream& out) {
  auto doc = artifact(cfg, payload);
  if (cfg.outPath.empty()) {
    out << dump_artifact(doc);
  } else {
    write_artifact(cfg.outPath, doc);
  }
}

void emit_text(const PipelineConfig& cfg, const std::string& text, std::ostream& out) {
  if (cfg.outPath.empty()) {
    out << text;
    return;
  }
  std::ofstream file(cfg.outPath, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open for writing: " + cfg.outPath);
  file << text;
}

void print_error(const PipelineConfig& cfg, int exitCode, const std::string& message,
                 std::ostream& err) {
  OrderedJson j;
  j["schema"] = "error/1";
  j["version"] = kVersion;
  j["config"] = config_to_json(cfg);
  j["exit"] = exitCode;
  j["error"] = message;
  err << j.dump() << "\n";
}

std::vector<double> parse_scale_range(const std::string& text) {
  double a = 0.0, b = 0.0;
  int steps = 0;
  char tail = '\0';
  if (std::sscanf(text.c_str(), "%lf:%lf:%d%c", &a, &b, &steps, &tail) != 3)
    throw std::invalid_argument("scales must be given as coarse:fine:steps");
  if (!(a > b) || !(b > 0.0)) throw std::invalid_argument("scales need coarse > fine > 0");
  if (steps < 4 || steps > 64) throw std::invalid_argument("scale steps must lie in 4..64");
  std::vector<double> scales;
  double ratio = b / a;
  for (int i = 0; i < steps; ++i)
    scales.push_back(a * std::pow(ratio, static_cast<double>(i) / (steps - 1)));
  return scales;
}

GapRule parse_gap_rule(const std::string& text) {
  GapRule rule;
  if (text == "third") {
    rule.kind = GapRule::Kind::Third;
  } else if (text == "fastgap") {
    rule.kind = GapRule::Kind::FastGap;
  } else if (text.rfind("custom:", 0) == 0) {
    rule.kind = GapRule::Kind::Custom;
    auto doc = read_json_file(text.substr(7));
    if (!doc.is_array() || doc.empty())
      throw std::invalid_argument("custom gap file must hold a non-empty array");
    for (const auto& entry : doc) {
      if (entry.is_string()) {
        auto r = parse_rational(entry.get<std::string>());
        if (!r) throw std::invalid_argument("unparsable gap entry: " + entry.get<std::string>());
        rule.customGaps.push_back(*r);
      } else {
        rule.customGaps.push_back(rational_of_double(entry.get<double>()));
      }
    }
  } else {
    throw std::invalid_argument("gap rule must be third, fastgap, or custom:<file>");
  }
  return rule;
}

const std::vector<std::string>& known_lemmas() {
  static const std::vector<std::string> ids = {"4.1", "4.3", "4.4",  "4.5",  "4.6", "4.7",
                                               "4.8", "4.9", "4.10", "4.11", "4.12"};
  return ids;
}

std::set<std::string> parse_lemma_selection(const std::string& text) {
  std::set<std::string> selected;
  if (text == "all") {
    selected.insert(known_lemmas().begin(), known_lemmas().end());
    return selected;
  }
  std::stringstream stream(text);
  std::string token;
  while (std::getline(stream, token, ',')) {
    if (token.empty()) continue;
    if (std::find(known_lemmas().begin(), known_lemmas().end(), token) == known_lemmas().end())
      throw std::invalid_argument("unknown lemma id: " + token);
    selected.insert(token);
  }
  if (selected.empty()) throw std::invalid_argument("empty lemma selection");
  return selected;
}

struct VerifyOutcome {
  OrderedJson reports = OrderedJson::array();
  std::vector<std::string> table;
  bool anyFail = false;
};

void append_report(VerifyOutcome& outcome, const LemmaReport& report, int stage) {
  auto j = lemma_report_to_json(report);
  j["stage"] = stage >= 0 ? OrderedJson(stage) : OrderedJson(nullptr);
  outcome.reports.push_back(std::move(j));
  if (report.status == "fail") outcome.anyFail = true;
  std::string status = report.status;
  if (report.status == "not-certified") status += " (" + report.mode + " mode)";
  char line[160];
  std::snprintf(line, sizeof line, "  %-6s %-6s %-30s pairs=%zu", report.lemmaId.c_str(),
                stage >= 0 ? std::to_string(stage).c_str() : "-", status.c_str(),
                report.pairsChecked);
  outcome.table.push_back(line);
}

VerifyOutcome run_lemma_checks(const FiniteMetricSpace& space,
                               const std::vector<EmbeddingStage>& stages,
                               const ScaleSchedule& schedule, const std::string& selection) {
  auto selected = parse_lemma_selection(selection);
  const bool all = selection == "all";
  auto wants = [&](const std::string& id) { return selected.count(id) > 0; };

  VerifyOutcome outcome;
  for (std::size_t i = 1; i < stages.size(); ++i) {
    const auto& stage = stages[i];
    const auto& prev = stages[i - 1];
    int at = static_cast<int>(i);
    if (wants("4.1")) append_report(outcome, check_local_lipschitz(space, stage, schedule), at);
    if (wants("4.3")) append_report(outcome, check_weight_lipschitz(space, stage, schedule), at);
    if (wants("4.4")) append_report(outcome, check_weight_sums(space, stage, schedule), at);
    if (wants("4.5"))
      append_report(outcome, check_weight_sum_lipschitz(space, stage, schedule), at);
    if (wants("4.6")) append_report(outcome, check_separation(space, stage, schedule), at);
    if (wants("4.7"))
      append_report(outcome, check_edge_bound(space, prev, stage, schedule), at);
    if (wants("4.9")) append_report(outcome, check_qmeasure(space, stage, schedule), at);
  }
  if (wants("4.8") && stages.size() > 1) {
    int m = 2;
    for (std::size_t i = 1; i < stages.size(); ++i)
      m = std::max(m, stages[i].cover.multiplicityCert + 1);
    append_report(outcome, check_simplex_minimum(std::min(m, 6)), -1);
  }
  if ((wants("4.10") || wants("4.11")) && (!all || stages.size() >= 2)) {
    auto pair = check_cauchy_and_limit(stages, schedule);
    for (const auto& report : pair)
      if (wants(report.lemmaId)) append_report(outcome, report, -1);
  }
  if (wants("4.12")) append_report(outcome, check_biholder(space, stages, schedule), -1);
  return outcome;
}

FiniteMetricSpace load_space(const std::string& path) {
  return space_from_json(read_json_file(path));
}

ScaleSchedule load_schedule(const std::string& path) {
  return schedule_from_json(read_json_file(path));
}

struct StoredRun {
  FiniteMetricSpace space;
  ScaleSchedule schedule;
  std::vector<EmbeddingStage> stages;
};

void write_run_dir(const PipelineConfig& cfg, const std::string& dir,
                   const FiniteMetricSpace& space, const ScaleSchedule& schedule,
                   const ConstructionRun& run) {
  fs::create_directories(dir);
  auto at = [&](const std::string& name) { return (fs::path(dir) / name).string(); };
  write_artifact(at("space.json"), artifact(cfg, space_to_json(space)));
  write_artifact(at("schedule.json"), artifact(cfg, schedule_to_json(schedule)));
  for (const auto& stage : run.stages)
    write_artifact(at("stage_" + std::to_string(stage.index) + ".json"),
                   artifact(cfg, stage_to_json(stage)));
  OrderedJson summary;
  summary["schema"] = "run/1";
  summary["stages"] = run.stages.size();
  summary["stabilizedAt"] = run.stabilizedAt;
  summary["stopReason"] = run.stopReason;
  write_artifact(at("run.json"), artifact(cfg, summary));
}

StoredRun load_run_dir(const std::string& dir, const std::string& scheduleOverride) {
  auto at = [&](const std::string& name) { return (fs::path(dir) / name).string(); };
  StoredRun stored;
  stored.space = load_space(at("space.json"));
  stored.schedule =
      load_schedule(scheduleOverride.empty() ? at("schedule.json") : scheduleOverride);
  auto summary = read_json_file(at("run.json"));
  std::size_t count = summary.at("stages").get<std::size_t>();
  for (std::size_t i = 0; i < count; ++i)
    stored.stages.push_back(
        stage_from_json(read_json_file(at("stage_" + std::to_string(i) + ".json"))));
  return stored;
}

}  // namespace

OrderedJson config_to_json(const PipelineConfig& config) {
  OrderedJson j;
  j["subcommand"] = config.subcommand;
  j["inputs"] = config.inputPaths;
  j["out"] = config.outPath;
  j["params"] = config.params;
  j["seed"] = config.seed;
  j["precision"] = config.precision;
  j["threads"] = config.threads;
  j["format"] = config.format;
  return j;
}

int run_pipeline(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  PipelineConfig cfg;

  CLI::App app{"finite metric spaces: embeddings, covers, scale schedules, and "
               "dimension certificates"};
  app.require_subcommand(1);
  app.add_option("--out", cfg.outPath, "artifact file (or directory for embed/demo)");
  app.add_option("--seed", cfg.seed, "recorded in every artifact");
  app.add_option("--precision", cfg.precision, "float64 | rational")
      ->check(CLI::IsMember({"float64", "rational"}));
  app.add_option("--threads", cfg.threads, "worker cap for intra-step parallelism")
      ->check(CLI::PositiveNumber);
  app.add_option("--format", cfg.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));

  std::string kind = "cantor", gaps = "third";
  int levels = 0, gridRes = 0, cubeDims = 1, harmonicM = 0;
  bool normalized = true;
  auto* spaceCmd = app.add_subcommand("space", "build a sampled metric space");
  spaceCmd->fallthrough();
  spaceCmd->add_option("--kind", kind, "cantor | interval | product | harmonic")
      ->check(CLI::IsMember({"cantor", "interval", "product", "harmonic"}));
  spaceCmd->add_option("--levels", levels, "construction depth for cantor/product");
  spaceCmd->add_option("--gaps", gaps, "third | fastgap | custom:<file>");
  spaceCmd->add_option("--gridRes", gridRes, "grid points per axis for interval/product");
  spaceCmd->add_option("--n", cubeDims, "cube factor dimensions for product");
  spaceCmd->add_option("--M", harmonicM, "harmonic chain truncation");
  spaceCmd->add_flag("--normalized,!--raw", normalized, "rescale product to unit diameter");

  std::string spacePath, coverMode = "greedy";
  double delta = 0.0, sigma = 0.0;
  int refineN = 2, structuredLevel = 1;
  auto* coverCmd = app.add_subcommand("cover", "build and certify a colored cover");
  coverCmd->fallthrough();
  coverCmd->add_option("--space", spacePath, "space artifact")->required();
  coverCmd->add_option("--delta", delta, "target mesh");
  coverCmd->add_option("--sigma", sigma, "Lebesgue fraction");
  coverCmd->add_option("--mode", coverMode, "greedy | structured | refine")
      ->check(CLI::IsMember({"greedy", "structured", "refine"}));
  coverCmd->add_option("--N", refineN, "doubling power for refine");
  coverCmd->add_option("--level", structuredLevel, "construction level for structured");

  int schedN = 0, stages = 3;
  double schedQ = 1.0, schedSigma = 0.5, ratio = 0.0, userL = 0.0;
  std::string schedNText = "auto", mode = "exact";
  auto* scheduleCmd = app.add_subcommand("schedule", "derive the scale recurrence");
  scheduleCmd->fallthrough();
  scheduleCmd->add_option("--n", schedN, "capacity-dimension bound")->required();
  scheduleCmd->add_option("--q", schedQ, "measure exponent")->required();
  scheduleCmd->add_option("--sigma", schedSigma, "Lebesgue fraction")->required();
  scheduleCmd->add_option("--N", schedNText, "doubling constant, or auto");
  scheduleCmd->add_option("--stages", stages, "stage count");
  scheduleCmd->add_option("--mode", mode, "exact | relaxed")
      ->check(CLI::IsMember({"exact", "relaxed"}));
  scheduleCmd->add_option("--ratio", ratio, "relaxed per-stage shrink factor");
  scheduleCmd->add_option("--L", userL, "relaxed separation constant");

  std::string schedulePath, coverSource = "greedy";
  int embedStages = 3;
  bool stopAtStabilization = true;
  auto* embedCmd = app.add_subcommand("embed", "run the staged construction");
  embedCmd->fallthrough();
  embedCmd->add_option("--space", spacePath, "space artifact")->required();
  embedCmd->add_option("--schedule", schedulePath, "schedule artifact")->required();
  embedCmd->add_option("--stages", embedStages, "stages to build");
  embedCmd->add_option("--covers", coverSource, "greedy | structured")
      ->check(CLI::IsMember({"greedy", "structured"}));
  embedCmd->add_flag("--stop-at-stabilization,!--run-past-stabilization", stopAtStabilization,
                     "stop once every cover set is a singleton");

  std::string stagesDir, lemmas = "all";
  auto* verifyCmd = app.add_subcommand("verify", "check the quantitative lemmas on a run");
  verifyCmd->fallthrough();
  verifyCmd->add_option("--stages", stagesDir, "embed output directory")->required();
  verifyCmd->add_option("--schedule", schedulePath, "schedule artifact override");
  verifyCmd->add_option("--lemmas", lemmas, "all or a comma-separated id list");

  std::string scalesText;
  double measureExponent = 0.0;
  bool hasMeasureExponent = false;
  auto* dimsCmd = app.add_subcommand("dims", "box-counting dimension fit");
  dimsCmd->fallthrough();
  dimsCmd->add_option("--space", spacePath, "space artifact")->required();
  dimsCmd->add_option("--scales", scalesText, "coarse:fine:steps geometric family")->required();
  dimsCmd->add_option("--measure-exponent", measureExponent, "diameter-sum exponent")
      ->each([&](const std::string&) { hasMeasureExponent = true; });

  std::string which;
  double ceAlpha = 1.0, ceBeta = 1.0, ceLambda = 1.0, ceSigma = 0.5, ceNu = 0.0;
  int ceLevels = 10, ceN = 1, ceM = 0, nuLevels = 6;
  auto* counterCmd = app.add_subcommand("counterexample", "certificate calculators");
  counterCmd->fallthrough();
  counterCmd->add_option("--which", which, "fastgap | hypercurve | harmonic")
      ->required()
      ->check(CLI::IsMember({"fastgap", "hypercurve", "harmonic"}));
  counterCmd->add_option("--levels", ceLevels, "construction depth");
  counterCmd->add_option("--alpha", ceAlpha, "lower Hoelder exponent denominator");
  counterCmd->add_option("--beta", ceBeta, "upper Hoelder exponent");
  counterCmd->add_option("--lambda", ceLambda, "distortion constant");
  counterCmd->add_option("--n", ceN, "cube dimensions");
  counterCmd->add_option("--nu", ceNu, "spread constant; sampled when omitted");
  counterCmd->add_option("--nu-levels", nuLevels, "sampling depth for the spread constant");
  counterCmd->add_option("--sigma", ceSigma, "Lebesgue fraction for harmonic");
  counterCmd->add_option("--M", ceM, "harmonic truncation; derived when omitted");
  counterCmd->add_option("--space", spacePath, "space artifact for harmonic");

  std::string preset;
  auto* demoCmd = app.add_subcommand("demo", "full pipeline on a pinned preset");
  demoCmd->fallthrough();
  demoCmd->add_option("--preset", preset, "two-point | cantor-relaxed")
      ->required()
      ->check(CLI::IsMember({"two-point", "cantor-relaxed"}));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    cfg.subcommand = app.get_subcommands().empty() ? "" : app.get_subcommands()[0]->get_name();
    print_error(cfg, 2, e.what(), err);
    return 2;
  }

  cfg.subcommand = app.get_subcommands()[0]->get_name();
  try {
    if (spaceCmd->parsed()) {
      cfg.params = {{"kind", kind}};
      FiniteMetricSpace space;
      if (kind == "cantor") {
        cfg.params["levels"] = levels;
        cfg.params["gaps"] = gaps;
        space = build_cantor({parse_gap_rule(gaps), levels});
      } else if (kind == "interval") {
        cfg.params["gridRes"] = gridRes;
        space = build_interval_grid(gridRes);
      } else if (kind == "product") {
        cfg.params["levels"] = levels;
        cfg.params["gaps"] = gaps;
        cfg.params["n"] = cubeDims;
        cfg.params["gridRes"] = gridRes;
        cfg.params["normalized"] = normalized;
        space = build_product_grid({parse_gap_rule(gaps), levels}, cubeDims, gridRes, normalized);
      } else {
        cfg.params["M"] = harmonicM;
        space = build_harmonic(harmonicM);
      }
      emit(cfg, space_to_json(space), out);
      if (!cfg.outPath.empty())
        out << "space  " << kind << "  points=" << space.size()
            << "  diameter=" << format_g(space.diameter) << "  -> " << cfg.outPath << "\n";
      return 0;
    }

    if (coverCmd->parsed()) {
      cfg.inputPaths = {spacePath};
      cfg.params = {{"mode", coverMode}, {"delta", delta}, {"sigma", sigma}};
      auto space = load_space(spacePath);
      ColoredCover cover;
      if (coverMode == "greedy") {
        cover = build_greedy_cover(space, delta, sigma);
      } else if (coverMode == "structured") {
        cfg.params["level"] = structuredLevel;
        cover = build_structured_cover(space, structuredLevel);
      } else {
        cfg.params["N"] = refineN;
        cover = size_controlled_refine(space, build_greedy_cover(space, delta, sigma), refineN);
      }
      auto report = verify_cover(space, cover);
      auto payload = cover_to_json(cover);
      payload["report"] = cover_report_to_json(report);
      emit(cfg, payload, out);
      if (!cfg.outPath.empty())
        out << "cover  " << coverMode << "  sets=" << cover.sets.size()
            << "  mesh=" << format_g(cover.meshCert)
            << "  lebesgue=" << format_g(cover.lebesgueCert)
            << "  multiplicity=" << cover.multiplicityCert << "  -> " << cfg.outPath << "\n";
      if (!cover.certified || !report.pass)
        throw CertificateFailure(report.note.empty()
                                     ? "cover certificates do not meet the target"
                                     : "cover certificates do not meet the target: " + report.note);
      return 0;
    }

    if (scheduleCmd->parsed()) {
      ScheduleParams params;
      params.n = schedN;
      params.q = schedQ;
      params.sigma = schedSigma;
      params.relaxed = mode == "relaxed";
      params.N = schedNText == "auto" ? choose_N(schedN, schedQ, schedSigma, 2)
                                      : std::stoi(schedNText);
      cfg.params = {{"n", params.n},   {"q", params.q},         {"sigma", params.sigma},
                    {"N", params.N},   {"N_requested", schedNText}, {"stages", stages},
                    {"mode", mode}};
      ScaleSchedule schedule;
      if (params.relaxed) {
        double L = userL > 0.0 ? userL : compute_constants(params).L;
        double r = ratio > 0.0 ? ratio : 1.0 / L;
        cfg.params["L"] = L;
        cfg.params["ratio"] = r;
        schedule = relaxed_schedule(params, L, r, stages);
      } else {
        schedule = exact_schedule(params, stages);
      }
      auto identities = check_schedule_identities(schedule);
      auto payload = schedule_to_json(schedule);
      payload["identities"] = schedule_identities_to_json(identities);
      emit(cfg, payload, out);
      if (!cfg.outPath.empty())
        out << "schedule  " << mode << "  stages=" << stages << "  N=" << params.N
            << "  L=" << format_g(schedule.constants.L)
            << "  lambda_log2=" << format_g(schedule.constants.logLambda) << "  -> "
            << cfg.outPath << "\n";
      if (!identities.pass())
        throw CertificateFailure("scale recurrence identities exceeded tolerance");
      return 0;
    }

    if (embedCmd->parsed()) {
      cfg.inputPaths = {spacePath, schedulePath};
      cfg.params = {{"stages", embedStages},
                    {"covers", coverSource},
                    {"stopAtStabilization", stopAtStabilization}};
      if (cfg.outPath.empty())
        throw std::invalid_argument("embed needs --out <directory> for its stage artifacts");
      auto space = load_space(spacePath);
      auto schedule = load_schedule(schedulePath);
      RunOptions options;
      options.coverSource =
          coverSource == "greedy" ? CoverSource::Greedy : CoverSource::Structured;
      options.stopAtStabilization = stopAtStabilization;
      auto run = run_construction(space, schedule, embedStages, options);
      write_run_dir(cfg, cfg.outPath, space, schedule, run);
      out << "embed  stages=" << run.stages.size() << "  stabilizedAt=" << run.stabilizedAt
          << (run.stopReason.empty() ? "" : "  stop=" + run.stopReason) << "  -> " << cfg.outPath
          << "\n";
      for (std::size_t i = 1; i < run.stages.size(); ++i)
        if (!run.stages[i].cover.certified)
          throw CertificateFailure("stage " + std::to_string(i) + " cover is not certified");
      return 0;
    }

    if (verifyCmd->parsed()) {
      cfg.inputPaths = {stagesDir};
      if (!schedulePath.empty()) cfg.inputPaths.push_back(schedulePath);
      cfg.params = {{"lemmas", lemmas}};
      auto stored = load_run_dir(stagesDir, schedulePath);
      auto outcome = run_lemma_checks(stored.space, stored.stages, stored.schedule, lemmas);
      OrderedJson payload;
      payload["schema"] = "verify/1";
      payload["reports"] = outcome.reports;
      emit(cfg, payload, out);
      out << "verify  lemma  stage  status" << "\n";
      for (const auto& line : outcome.table) out << line << "\n";
      if (outcome.anyFail) throw CertificateFailure("at least one lemma check failed");
      return 0;
    }

    if (dimsCmd->parsed()) {
      cfg.inputPaths = {spacePath};
      cfg.params = {{"scales", scalesText}};
      std::optional<double> exponent;
      if (hasMeasureExponent) {
        exponent = measureExponent;
        cfg.params["measureExponent"] = measureExponent;
      }
      auto space = load_space(spacePath);
      auto report = box_dimension(space, parse_scale_range(scalesText), exponent);
      if (cfg.format == "csv") {
        emit_text(cfg, dimension_to_csv(report), out);
      } else {
        emit(cfg, dimension_to_json(report), out);
      }
      if (!cfg.outPath.empty())
        out << "dims  slope=" << format_g(report.slope)
            << "  residual=" << format_g(report.residual, 3) << "  scales="
            << report.scales.size()
            << (report.warning.empty() ? "" : "  warning: " + report.warning) << "  -> "
            << cfg.outPath << "\n";
      return 0;
    }

    if (counterCmd->parsed()) {
      cfg.params = {{"which", which}};
      if (which == "fastgap") {
        cfg.params["levels"] = ceLevels;
        cfg.params["alpha"] = ceAlpha;
        cfg.params["beta"] = ceBeta;
        cfg.params["lambda"] = ceLambda;
        auto report = fastgap_certificate(ceLevels, ceAlpha, ceBeta, ceLambda);
        emit(cfg, fastgap_to_json(report), out);
        if (!cfg.outPath.empty())
          out << "fastgap  gapSum<=" << format_g(report.gapSumUpperBound)
              << "  minimalK=" << report.minimalK
              << "  imageMeasure>=" << format_g(report.imageMeasureLowerBound) << "  -> "
              << cfg.outPath << "\n";
        if (!report.pass()) throw CertificateFailure("fast-gap certificate failed");
      } else if (which == "hypercurve") {
        double nu = ceNu > 0.0 ? ceNu : cantor_ahlfors_constant(nuLevels);
        cfg.params["lambda"] = ceLambda;
        cfg.params["alpha"] = ceAlpha;
        cfg.params["n"] = ceN;
        cfg.params["nu"] = nu;
        auto cert = hypercurve_certificate(ceLambda, ceAlpha, ceN, nu);
        emit(cfg, hypercurve_to_json(cert), out);
        if (!cfg.outPath.empty())
          out << "hypercurve  lowerBound=" << format_g(cert.lowerBound, 10)
              << "  B/A=" << format_g(cert.BOverA) << "  -> " << cfg.outPath << "\n";
        if (!(cert.lowerBound > static_cast<double>(ceN)))
          throw CertificateFailure("hypercurve bound does not exceed the cube dimension");
      } else {
        cfg.params["sigma"] = ceSigma;
        FiniteMetricSpace space;
        if (!spacePath.empty()) {
          cfg.inputPaths = {spacePath};
          space = load_space(spacePath);
        } else {
          int chainN = static_cast<int>(std::ceil(std::max(2.0 / ceSigma, 2.0))) + 1;
          int M = ceM > 0 ? ceM : chainN * (chainN - 1);
          cfg.params["M"] = M;
          space = build_harmonic(M);
        }
        auto report = capacity_refuter(space, ceSigma);
        emit(cfg, refuter_to_json(report), out);
        if (!cfg.outPath.empty())
          out << "harmonic  n=" << report.n << "  delta=" << format_g(report.delta)
              << "  forced=" << report.forcedSet.size()
              << "  diameter=" << format_g(report.forcedDiameter) << "  -> " << cfg.outPath
              << "\n";
        if (!report.pass()) throw CertificateFailure("capacity refuter inequalities failed");
      }
      return 0;
    }

    // demo
    cfg.params = {{"preset", preset}};
    if (cfg.outPath.empty())
      throw std::invalid_argument("demo needs --out <directory> for its artifacts");
    FiniteMetricSpace space;
    ScaleSchedule schedule;
    RunOptions options;
    int demoStages = 3;
    std::vector<double> dimScales;
    if (preset == "two-point") {
      space = from_line_points({Rational(0), Rational(1)});
      ScheduleParams params;
      params.n = 0;
      params.q = 1.0;
      params.sigma = 0.5;
      params.N = choose_N(0, 1.0, 0.5, 2);
      schedule = exact_schedule(params, demoStages);
    } else {
      CantorSpec spec;
      spec.levels = 4;
      space = build_cantor(spec);
      ScheduleParams params;
      params.n = 0;
      params.q = 0.5;
      params.sigma = 1.0 / 3.0;
      params.relaxed = true;
      params.N = choose_N(0, 0.5, 1.0 / 3.0, 2);
      schedule = relaxed_schedule(params, 2048.0, std::exp2(-11.0), demoStages);
      options.stopAtStabilization = false;
      for (int k = 1; k <= 4; ++k) dimScales.push_back(std::pow(3.0, -k) * (1.0 + 1e-9));
    }
    auto run = run_construction(space, schedule, demoStages, options);
    write_run_dir(cfg, cfg.outPath, space, schedule, run);
    auto outcome = run_lemma_checks(space, run.stages, schedule, "all");
    OrderedJson verifyPayload;
    verifyPayload["schema"] = "verify/1";
    verifyPayload["reports"] = outcome.reports;
    auto at = [&](const std::string& name) { return (fs::path(cfg.outPath) / name).string(); };
    write_artifact(at("verify.json"), artifact(cfg, verifyPayload));
    DimensionReport dims;
    if (!dimScales.empty()) {
      dims = box_dimension(space, dimScales);
    } else {
      dims.sampleResolution = space.minPairwiseDistance();
      dims.warning = "two samples cannot pin a scaling law; box counting skipped";
    }
    write_artifact(at("dimension.json"), artifact(cfg, dimension_to_json(dims)));
    out << "demo  " << preset << "  points=" << space.size()
        << "  stages=" << run.stages.size() << "  stabilizedAt=" << run.stabilizedAt << "\n";
    out << "  lemma  stage  status" << "\n";
    for (const auto& line : outcome.table) out << line << "\n";
    if (!dimScales.empty())
      out << "  dimension slope=" << format_g(dims.slope) << "  residual="
          << format_g(dims.residual, 3) << "\n";
    out << "  artifacts -> " << cfg.outPath << "\n";
    if (outcome.anyFail) throw CertificateFailure("at least one lemma check failed");
    return 0;
  } catch (const CertificateFailure& e) {
    print_error(cfg, 1, e.what(), err);
    return 1;
  } catch (const std::invalid_argument& e) {
    print_error(cfg, 2, e.what(), err);
    return 2;
  } catch (const std::exception& e) {
    print_error(cfg, 2, e.what(), err);
    return 2;
  }
}

}  // namespace biholder
