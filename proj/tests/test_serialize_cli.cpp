#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "biholder/pipeline.hpp"
#include "biholder/serialize.hpp"

using namespace biholder;

namespace {

namespace fs = std::filesystem;

ScheduleParams preset(int n, double q, double sigma, int N) {
  ScheduleParams p;
  p.n = n;
  p.q = q;
  p.sigma = sigma;
  p.N = N;
  return p;
}

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  CliResult r;
  r.code = run_pipeline(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path fresh_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("space dumps round-trip with their exact backing") {
  CantorSpec spec;
  spec.levels = 4;
  auto space = build_cantor(spec);
  auto loaded = space_from_json(space_to_json(space));
  REQUIRE(loaded.size() == space.size());
  CHECK(loaded.dist(0, 31) == space.dist(0, 31));
  CHECK(loaded.dist(3, 17) == space.dist(3, 17));
  CHECK(loaded.diameter == space.diameter);
  CHECK(loaded.provenance.kind == "cantor");
  REQUIRE(loaded.exact.has_value());
  REQUIRE(space.distExact(0, 1).has_value());
  CHECK(*loaded.distExact(0, 1) == *space.distExact(0, 1));
}

TEST_CASE("product and matrix spaces survive the dump unchanged") {
  CantorSpec spec;
  spec.levels = 2;
  auto product = build_product_grid(spec, 2, 3, true);
  auto loadedProduct = space_from_json(space_to_json(product));
  REQUIRE(loadedProduct.size() == product.size());
  CHECK(loadedProduct.dist(0, 40) == product.dist(0, 40));
  CHECK(loadedProduct.coordScale == product.coordScale);

  auto matrix = from_matrix({0.0, 1.0, 1.0, 1.0, 0.0, 0.25, 1.0, 0.25, 0.0}, 3);
  auto loadedMatrix = space_from_json(space_to_json(matrix));
  REQUIRE(loadedMatrix.size() == 3);
  CHECK(loadedMatrix.dist(1, 2) == matrix.dist(1, 2));
  CHECK(space_to_json(matrix)["distances"] == "matrix");
}

TEST_CASE("cover dumps round-trip and re-verify identically") {
  CantorSpec spec;
  spec.levels = 3;
  auto space = build_cantor(spec);
  auto cover = build_structured_cover(space, 2);
  auto loaded = cover_from_json(cover_to_json(cover));
  REQUIRE(loaded.sets.size() == cover.sets.size());
  CHECK(loaded.sets[0].memberIds == cover.sets[0].memberIds);
  CHECK(loaded.meshCert == cover.meshCert);
  CHECK(loaded.lebesgueCert == cover.lebesgueCert);
  CHECK(loaded.certified == cover.certified);
  auto report = verify_cover(space, loaded);
  CHECK(report.pass);
}

TEST_CASE("schedule dumps round-trip bit for bit") {
  auto exact = exact_schedule(preset(0, 1.0, 0.5, 8), 3);
  auto loadedExact = schedule_from_json(schedule_to_json(exact));
  CHECK(loadedExact.logEps == exact.logEps);
  CHECK(loadedExact.logDelta == exact.logDelta);
  CHECK(loadedExact.logEta == exact.logEta);
  CHECK(loadedExact.constants.L == exact.constants.L);
  CHECK(loadedExact.constants.logC == exact.constants.logC);
  CHECK(check_schedule_identities(loadedExact).pass());

  auto relaxed = relaxed_schedule(preset(0, 0.5, 1.0 / 3.0, 2), 2048.0, std::exp2(-11.0), 3);
  auto loadedRelaxed = schedule_from_json(schedule_to_json(relaxed));
  CHECK(loadedRelaxed.params.relaxed);
  REQUIRE(loadedRelaxed.userL.has_value());
  CHECK(*loadedRelaxed.userL == 2048.0);
  REQUIRE(loadedRelaxed.ratio.has_value());
  CHECK(*loadedRelaxed.ratio == std::exp2(-11.0));
  CHECK(loadedRelaxed.logEps == relaxed.logEps);
}

TEST_CASE("stage dumps preserve sparse images exactly") {
  auto space = from_line_points({Rational(0), Rational(1)});
  auto schedule = exact_schedule(preset(0, 1.0, 0.5, 8), 2);
  auto run = run_construction(space, schedule, 2);
  REQUIRE(run.stages.size() >= 2);
  const auto& stage = run.stages[1];
  auto loaded = stage_from_json(stage_to_json(stage));
  CHECK(loaded.index == stage.index);
  CHECK(loaded.coordOffset == stage.coordOffset);
  CHECK(loaded.coordCount == stage.coordCount);
  REQUIRE(loaded.images.size() == stage.images.size());
  for (std::size_t x = 0; x < stage.images.size(); ++x)
    CHECK(dist(loaded.images[x], stage.images[x]) == 0.0);
  REQUIRE(loaded.vertices.size() == stage.vertices.size());
  for (std::size_t k = 0; k < stage.vertices.size(); ++k)
    CHECK(dist(loaded.vertices[k], stage.vertices[k]) == 0.0);
  CHECK(loaded.cover.sets.size() == stage.cover.sets.size());
}

TEST_CASE("vacuous lemma reports serialize their slack as null") {
  LemmaReport report;
  report.lemmaId = "4.1";
  report.mode = "relaxed";
  auto j = lemma_report_to_json(report);
  CHECK(j["lemma"] == "4.1");
  CHECK(j["pass"] == true);
  CHECK(j["worstSlack"].is_null());
  CHECK(j["worstRelSlack"].is_null());
  CHECK(j["pairs"] == 0);
  CHECK(j["mode"] == "relaxed");
}

TEST_CASE("dimension reports serialize to JSON and plot-ready CSV") {
  auto grid = build_interval_grid(33);
  auto report = box_dimension(grid, {0.5, 0.25, 0.125, 0.0625}, 1.0);
  auto j = dimension_to_json(report);
  CHECK(j["schema"] == "dimension/1");
  CHECK(j["counts"].size() == 4);
  CHECK(j["measureExponent"].get<double>() == 1.0);
  auto csv = dimension_to_csv(report);
  CHECK(csv.rfind("scale,count,log_inv_scale,log_count\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  CHECK(csv.find(",2,") != std::string::npos);
}

TEST_CASE("malformed documents are rejected with the offending detail") {
  CHECK_THROWS_AS(space_from_json(OrderedJson{{"schema", "cover/1"}}), std::invalid_argument);
  auto good = space_to_json(build_interval_grid(5));
  auto truncated = good;
  truncated["points"] = OrderedJson::array();
  CHECK_THROWS_AS(space_from_json(truncated), std::invalid_argument);
  auto ragged = good;
  ragged["coords"][2] = OrderedJson::array({0.1, 0.2});
  CHECK_THROWS_AS(space_from_json(ragged), std::invalid_argument);
  CHECK_THROWS_AS(read_json_file("/nonexistent/biholder.json"), std::runtime_error);
}

TEST_CASE("full pipeline chain composes through files") {
  auto dir = fresh_dir("biholder_chain");
  auto spacePath = (dir / "space.json").string();
  auto schedulePath = (dir / "schedule.json").string();
  auto runDir = (dir / "run").string();
  auto verifyPath = (dir / "verify.json").string();

  auto space = run_cli({"space", "--kind", "cantor", "--levels", "4", "--out", spacePath});
  CHECK(space.code == 0);
  auto schedule = run_cli({"schedule", "--n", "0", "--q", "0.5", "--sigma", "0.3333333333333333",
                           "--N", "2", "--stages", "3", "--mode", "relaxed", "--L", "2048",
                           "--ratio", "0.00048828125", "--out", schedulePath});
  CHECK(schedule.code == 0);
  auto embed = run_cli({"embed", "--space", spacePath, "--schedule", schedulePath, "--stages",
                        "3", "--run-past-stabilization", "--out", runDir});
  CHECK(embed.code == 0);
  auto verify = run_cli({"verify", "--stages", runDir, "--out", verifyPath});
  CHECK(verify.code == 0);
  CHECK(verify.out.find("not-certified (relaxed mode)") != std::string::npos);

  auto doc = read_json_file(verifyPath);
  CHECK(doc["schema"] == "verify/1");
  CHECK(doc["version"].is_string());
  CHECK(doc["config"]["subcommand"] == "verify");
  bool sawPass = false, sawNotCertified = false;
  for (const auto& report : doc["reports"]) {
    if (report["lemma"] == "4.6" && report["status"] == "pass") sawPass = true;
    if (report["lemma"] == "4.9" && report["status"] == "not-certified") sawNotCertified = true;
  }
  CHECK(sawPass);
  CHECK(sawNotCertified);
}

TEST_CASE("demo presets finish with the advertised verdicts") {
  auto dir = fresh_dir("biholder_demo");
  auto twoPoint = run_cli({"demo", "--preset", "two-point", "--out", (dir / "two").string()});
  CHECK(twoPoint.code == 0);
  CHECK(twoPoint.out.find("4.12   -      pass") != std::string::npos);
  CHECK(twoPoint.out.find("fail") == std::string::npos);

  auto cantor =
      run_cli({"demo", "--preset", "cantor-relaxed", "--out", (dir / "cantor").string()});
  CHECK(cantor.code == 0);
  CHECK(cantor.out.find("not-certified (relaxed mode)") != std::string::npos);
  CHECK(cantor.out.find("dimension slope=0.63093") != std::string::npos);

  auto verdicts = read_json_file(dir / "cantor" / "verify.json");
  for (const auto& report : verdicts["reports"]) {
    if (report["lemma"] == "4.9" || report["lemma"] == "4.12") {
      CHECK(report["status"] == "not-certified");
    } else {
      CHECK(report["status"] == "pass");
    }
  }
}

TEST_CASE("identical configs reproduce byte-identical artifacts") {
  auto dir = fresh_dir("biholder_determinism");
  auto target = (dir / "demo").string();
  std::vector<std::string> args = {"demo", "--preset", "two-point", "--out", target};
  CHECK(run_cli(args).code == 0);
  std::map<std::string, std::string> first;
  for (const auto& entry : fs::directory_iterator(target))
    first[entry.path().filename().string()] = slurp(entry.path());
  REQUIRE(first.size() >= 5);
  CHECK(run_cli(args).code == 0);
  for (const auto& entry : fs::directory_iterator(target))
    CHECK(first.at(entry.path().filename().string()) == slurp(entry.path()));
}

TEST_CASE("usage errors exit with code two and an error document") {
  auto bad = run_cli({"schedule", "--n", "0", "--q", "1", "--sigma", "1.5"});
  CHECK(bad.code == 2);
  auto doc = OrderedJson::parse(bad.err);
  CHECK(doc["schema"] == "error/1");
  CHECK(doc["exit"] == 2);
  CHECK(doc["error"].get<std::string>().find("sigma") != std::string::npos);

  CHECK(run_cli({"verify", "--stages", "nowhere", "--lemmas", "4.99"}).code == 2);
  CHECK(run_cli({"nonsense"}).code == 2);
  CHECK(run_cli({}).code == 2);
}

TEST_CASE("certificate failures exit with code one") {
  auto dir = fresh_dir("biholder_certfail");
  auto spacePath = (dir / "h12.json").string();
  CHECK(run_cli({"space", "--kind", "harmonic", "--M", "12", "--out", spacePath}).code == 0);
  auto refuted = run_cli({"cover", "--space", spacePath, "--delta", "0.185", "--sigma", "0.9",
                          "--mode", "greedy", "--out", (dir / "cover.json").string()});
  CHECK(refuted.code == 1);
  auto doc = OrderedJson::parse(refuted.err);
  CHECK(doc["exit"] == 1);
}

TEST_CASE("dims subcommand honors the output format switch") {
  auto dir = fresh_dir("biholder_dims");
  auto spacePath = (dir / "grid.json").string();
  CHECK(run_cli({"space", "--kind", "interval", "--gridRes", "1025", "--out", spacePath}).code ==
        0);
  auto json = run_cli({"dims", "--space", spacePath, "--scales", "0.500000001:0.03125:5",
                       "--out", (dir / "dims.json").string()});
  CHECK(json.code == 0);
  CHECK(read_json_file(dir / "dims.json")["slope"].get<double>() == doctest::Approx(1.0));
  auto csv = run_cli({"dims", "--space", spacePath, "--scales", "0.500000001:0.03125:5",
                      "--format", "csv", "--out", (dir / "dims.csv").string()});
  CHECK(csv.code == 0);
  CHECK(slurp(dir / "dims.csv").rfind("scale,count,log_inv_scale,log_count\n", 0) == 0);
}

TEST_CASE("counterexample calculators emit their certificates") {
  auto dir = fresh_dir("biholder_counter");
  auto fastgap = run_cli({"counterexample", "--which", "fastgap", "--levels", "10", "--out",
                          (dir / "fg.json").string()});
  CHECK(fastgap.code == 0);
  auto fg = read_json_file(dir / "fg.json");
  CHECK(fg["pass"] == true);
  CHECK(fg["minimalK"] == 2);

  auto hyper = run_cli({"counterexample", "--which", "hypercurve", "--n", "2", "--out",
                        (dir / "hc.json").string()});
  CHECK(hyper.code == 0);
  CHECK(read_json_file(dir / "hc.json")["lowerBound"].get<double>() ==
        doctest::Approx(2.6309297536).epsilon(1e-9));

  auto harmonic = run_cli({"counterexample", "--which", "harmonic", "--sigma", "0.5", "--out",
                           (dir / "harm.json").string()});
  CHECK(harmonic.code == 0);
  auto harm = read_json_file(dir / "harm.json");
  CHECK(harm["pass"] == true);
  CHECK(harm["n"] == 5);
}
