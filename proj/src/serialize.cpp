#include "biholder/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace biholder {

namespace {

OrderedJson finite_or_null(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

Rational parse_rational_field(const OrderedJson& j, const char* what) {
  auto r = parse_rational(j.get<std::string>());
  if (!r) throw std::invalid_argument(std::string("unparsable rational in ") + what);
  return *r;
}

void expect_schema(const OrderedJson& j, const std::string& tag) {
  if (!j.is_object() || j.value("schema", std::string()) != tag)
    throw std::invalid_argument("expected a \"" + tag + "\" document");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

OrderedJson space_to_json(const FiniteMetricSpace& space) {
  OrderedJson j;
  j["schema"] = "space/1";
  auto points = OrderedJson::array();
  for (std::size_t i = 0; i < space.size(); ++i) points.push_back(i);
  j["points"] = std::move(points);
  const bool byMatrix = space.metric == FiniteMetricSpace::Metric::Matrix;
  if (byMatrix) {
    j["coords"] = nullptr;
    auto rows = OrderedJson::array();
    std::size_t n = space.size();
    for (std::size_t i = 0; i < n; ++i) {
      auto row = OrderedJson::array();
      for (std::size_t k = 0; k < n; ++k) row.push_back(space.matrix[i * n + k]);
      rows.push_back(std::move(row));
    }
    j["matrix"] = std::move(rows);
  } else {
    j["coords"] = space.coords;
    j["matrix"] = nullptr;
  }
  j["distances"] = byMatrix ? "matrix" : "coords";
  j["coordScale"] = space.coordScale;
  j["snowflakePower"] = space.snowflakePower;
  j["diameter"] = space.diameter;
  j["provenance"] = {{"kind", space.provenance.kind},
                     {"params", space.provenance.params},
                     {"normalizationFactor", space.provenance.normalizationFactor}};
  if (space.exact) {
    OrderedJson e;
    e["line"] = space.exact->line;
    e["distScale"] = rational_to_string(space.exact->distScale);
    e["distSqScale"] = rational_to_string(space.exact->distSqScale);
    auto pos = OrderedJson::array();
    for (const auto& p : space.exact->pos) {
      auto row = OrderedJson::array();
      for (const auto& c : p) row.push_back(rational_to_string(c));
      pos.push_back(std::move(row));
    }
    e["pos"] = std::move(pos);
    j["exact"] = std::move(e);
  } else {
    j["exact"] = nullptr;
  }
  return j;
}

FiniteMetricSpace space_from_json(const OrderedJson& j) {
  expect_schema(j, "space/1");
  FiniteMetricSpace s;
  const std::string distances = j.at("distances").get<std::string>();
  if (distances == "matrix") {
    s.metric = FiniteMetricSpace::Metric::Matrix;
    const auto& rows = j.at("matrix");
    std::size_t n = rows.size();
    if (n < 2) throw std::invalid_argument("matrix space needs at least 2 points");
    s.matrixSize_ = n;
    s.matrix.reserve(n * n);
    for (const auto& row : rows) {
      if (row.size() != n) throw std::invalid_argument("distance matrix is not square");
      for (const auto& v : row) s.matrix.push_back(v.get<double>());
    }
  } else if (distances == "coords") {
    s.metric = FiniteMetricSpace::Metric::Coords;
    s.coords = j.at("coords").get<std::vector<std::vector<double>>>();
    if (s.coords.size() < 2) throw std::invalid_argument("coordinate space needs at least 2 points");
    for (const auto& row : s.coords)
      if (row.size() != s.coords.front().size())
        throw std::invalid_argument("coordinate rows have mixed dimensions");
  } else {
    throw std::invalid_argument("unknown distance storage: " + distances);
  }
  if (j.at("points").size() != s.size())
    throw std::invalid_argument("point list does not match the stored distances");
  s.coordScale = j.at("coordScale").get<double>();
  s.snowflakePower = j.at("snowflakePower").get<double>();
  s.diameter = j.at("diameter").get<double>();
  const auto& prov = j.at("provenance");
  s.provenance.kind = prov.at("kind").get<std::string>();
  s.provenance.params = prov.at("params");
  s.provenance.normalizationFactor = prov.at("normalizationFactor").get<double>();
  if (!j.at("exact").is_null()) {
    const auto& e = j.at("exact");
    ExactBacking exact;
    exact.line = e.at("line").get<bool>();
    exact.distScale = parse_rational_field(e.at("distScale"), "exact.distScale");
    exact.distSqScale = parse_rational_field(e.at("distSqScale"), "exact.distSqScale");
    for (const auto& row : e.at("pos")) {
      std::vector<Rational> p;
      for (const auto& c : row) p.push_back(parse_rational_field(c, "exact.pos"));
      exact.pos.push_back(std::move(p));
    }
    if (exact.pos.size() != s.size())
      throw std::invalid_argument("exact backing does not match the point count");
    s.exact = std::move(exact);
  }
  return s;
}

OrderedJson cover_to_json(const ColoredCover& cover) {
  OrderedJson j;
  j["schema"] = "cover/1";
  j["targetDelta"] = cover.targetDelta;
  j["sigma"] = cover.sigma;
  auto sets = OrderedJson::array();
  for (const auto& set : cover.sets)
    sets.push_back({{"members", set.memberIds}, {"anchor", set.anchor}, {"color", set.color}});
  j["sets"] = std::move(sets);
  j["certs"] = {{"mesh", cover.meshCert},
                {"lebesgue", cover.lebesgueCert},
                {"multiplicity", cover.multiplicityCert}};
  j["colors"] = cover.colorCount;
  j["certified"] = cover.certified;
  return j;
}

ColoredCover cover_from_json(const OrderedJson& j) {
  expect_schema(j, "cover/1");
  ColoredCover cover;
  cover.targetDelta = j.at("targetDelta").get<double>();
  cover.sigma = j.at("sigma").get<double>();
  for (const auto& entry : j.at("sets")) {
    CoverSet set;
    set.memberIds = entry.at("members").get<std::vector<std::size_t>>();
    set.anchor = entry.at("anchor").get<std::size_t>();
    set.color = entry.at("color").get<int>();
    cover.sets.push_back(std::move(set));
  }
  const auto& certs = j.at("certs");
  cover.meshCert = certs.at("mesh").get<double>();
  cover.lebesgueCert = certs.at("lebesgue").get<double>();
  cover.multiplicityCert = certs.at("multiplicity").get<int>();
  cover.colorCount = j.at("colors").get<int>();
  cover.certified = j.at("certified").get<bool>();
  return cover;
}

OrderedJson schedule_to_json(const ScaleSchedule& schedule) {
  OrderedJson j;
  j["schema"] = "schedule/1";
  j["mode"] = schedule.params.relaxed ? "relaxed" : "exact";
  OrderedJson params;
  params["n"] = schedule.params.n;
  params["q"] = schedule.params.q;
  params["sigma"] = schedule.params.sigma;
  params["N"] = schedule.params.N;
  params["stages"] = schedule.stages;
  params["userL"] = schedule.userL ? OrderedJson(*schedule.userL) : OrderedJson(nullptr);
  params["ratio"] = schedule.ratio ? OrderedJson(*schedule.ratio) : OrderedJson(nullptr);
  j["params"] = std::move(params);
  j["constants"] = {{"L", schedule.constants.L},
                    {"C_log2", schedule.constants.logC},
                    {"Q", schedule.constants.Q},
                    {"lambda_log2", schedule.constants.logLambda}};
  j["log2_eps"] = schedule.logEps;
  j["log2_delta"] = schedule.logDelta;
  j["log2_eta"] = schedule.logEta;
  return j;
}

ScaleSchedule schedule_from_json(const OrderedJson& j) {
  expect_schema(j, "schedule/1");
  const auto& params = j.at("params");
  ScheduleParams p;
  p.n = params.at("n").get<int>();
  p.q = params.at("q").get<double>();
  p.sigma = params.at("sigma").get<double>();
  p.N = params.at("N").get<int>();
  p.relaxed = j.at("mode").get<std::string>() == "relaxed";
  ScaleSchedule s;
  s.params = p;
  s.constants = compute_constants(p);
  s.stages = params.at("stages").get<int>();
  if (!params.at("userL").is_null()) s.userL = params.at("userL").get<double>();
  if (!params.at("ratio").is_null()) s.ratio = params.at("ratio").get<double>();
  s.logEps = j.at("log2_eps").get<std::vector<double>>();
  s.logDelta = j.at("log2_delta").get<std::vector<double>>();
  s.logEta = j.at("log2_eta").get<std::vector<double>>();
  if (s.logEps.size() != static_cast<std::size_t>(s.stages) + 2 ||
      s.logDelta.size() != static_cast<std::size_t>(s.stages) + 1 ||
      s.logEta.size() != static_cast<std::size_t>(s.stages) + 1)
    throw std::invalid_argument("schedule arrays do not match the stage count");
  return s;
}

namespace {

OrderedJson sparse_to_json(const SparseVector& v) {
  auto pairs = OrderedJson::array();
  for (const auto& [k, value] : v.entries) pairs.push_back({k, value});
  return pairs;
}

SparseVector sparse_from_json(const OrderedJson& j, std::size_t dimensionHint) {
  SparseVector v;
  v.dimensionHint = dimensionHint;
  for (const auto& pair : j) {
    if (!pair.is_array() || pair.size() != 2)
      throw std::invalid_argument("sparse entries must be [coordinate, value] pairs");
    v.set(pair[0].get<std::size_t>(), pair[1].get<double>());
  }
  return v;
}

}  // namespace

OrderedJson stage_to_json(const EmbeddingStage& stage) {
  OrderedJson j;
  j["schema"] = "stage/1";
  j["i"] = stage.index;
  j["m"] = stage.vertices.size();
  j["coordOffset"] = stage.coordOffset;
  j["coordCount"] = stage.coordCount;
  auto vertices = OrderedJson::array();
  for (const auto& v : stage.vertices) vertices.push_back(sparse_to_json(v));
  j["vertices"] = std::move(vertices);
  OrderedJson images = OrderedJson::object();
  for (std::size_t x = 0; x < stage.images.size(); ++x)
    images[std::to_string(x)] = sparse_to_json(stage.images[x]);
  j["images"] = std::move(images);
  j["certs"] = {{"mesh", stage.cover.meshCert},
                {"lebesgue", stage.cover.lebesgueCert},
                {"multiplicity", stage.cover.multiplicityCert}};
  j["cover"] = cover_to_json(stage.cover);
  return j;
}

EmbeddingStage stage_from_json(const OrderedJson& j) {
  expect_schema(j, "stage/1");
  EmbeddingStage stage;
  stage.index = j.at("i").get<int>();
  stage.coordOffset = j.at("coordOffset").get<std::size_t>();
  stage.coordCount = j.at("coordCount").get<std::size_t>();
  for (const auto& v : j.at("vertices"))
    stage.vertices.push_back(sparse_from_json(v, stage.coordCount));
  if (stage.vertices.size() != j.at("m").get<std::size_t>())
    throw std::invalid_argument("vertex list does not match the stored set count");
  const auto& images = j.at("images");
  stage.images.resize(images.size());
  for (const auto& [key, value] : images.items()) {
    std::size_t x = std::stoul(key);
    if (x >= stage.images.size())
      throw std::invalid_argument("image ids must be dense from zero");
    stage.images[x] = sparse_from_json(value, stage.coordCount);
  }
  stage.cover = cover_from_json(j.at("cover"));
  return stage;
}

OrderedJson lemma_report_to_json(const LemmaReport& report) {
  OrderedJson j;
  j["lemma"] = report.lemmaId;
  j["pass"] = report.pass();
  j["status"] = report.status;
  j["worstSlack"] = finite_or_null(report.worstSlack);
  j["worstRelSlack"] = finite_or_null(report.worstRelSlack);
  j["pairs"] = report.pairsChecked;
  j["mode"] = report.mode;
  j["note"] = report.note;
  auto witnesses = OrderedJson::array();
  for (const auto& w : report.witnesses)
    witnesses.push_back(
        {{"x", w.x}, {"y", w.y}, {"lhs", w.lhs}, {"rhs", w.rhs}, {"slack", w.slack}});
  j["witnesses"] = std::move(witnesses);
  return j;
}

OrderedJson cover_report_to_json(const CoverReport& report) {
  OrderedJson j;
  j["schema"] = "cover-report/1";
  j["pass"] = report.pass;
  j["mesh"] = report.mesh;
  j["lebesgue"] = report.lebesgue;
  j["multiplicity"] = report.multiplicity;
  j["colors"] = report.colors;
  j["covers"] = report.covers;
  j["coloringProper"] = report.coloringProper;
  j["orderingCanonical"] = report.orderingCanonical;
  j["certificateConsistent"] = report.certificateConsistent;
  j["note"] = report.note;
  return j;
}

OrderedJson schedule_identities_to_json(const ScheduleIdentityReport& report) {
  OrderedJson j;
  j["schema"] = "schedule-identities/1";
  j["pass"] = report.pass();
  j["closedVsDirect"] = report.closedVsDirect;
  j["telescoped"] = report.telescoped;
  j["unitProductGap"] = report.unitProductGap;
  j["ratioLSlack"] = report.ratioLSlack;
  j["ratioRootSlack"] = report.ratioRootSlack;
  j["growthSlack"] = report.growthSlack;
  j["couplingSlack"] = report.couplingSlack;
  j["etaCoupling"] = report.etaCoupling;
  return j;
}

OrderedJson dimension_to_json(const DimensionReport& report) {
  OrderedJson j;
  j["schema"] = "dimension/1";
  j["scales"] = report.scales;
  j["counts"] = report.counts;
  j["slope"] = report.slope;
  j["residual"] = report.residual;
  j["sampleResolution"] = report.sampleResolution;
  j["measureExponent"] =
      report.measureExponent ? OrderedJson(*report.measureExponent) : OrderedJson(nullptr);
  j["measureAtScale"] = report.measureAtScale;
  j["warning"] = report.warning;
  return j;
}

OrderedJson fastgap_to_json(const FastgapReport& report) {
  OrderedJson j;
  j["schema"] = "fastgap/1";
  j["levels"] = report.levels;
  j["alpha"] = report.alpha;
  j["beta"] = report.beta;
  j["lambda"] = report.lambda;
  j["partialTerms"] = report.partialTerms;
  j["partialSum"] = report.partialSum;
  j["tailBound"] = report.tailBound;
  j["gapSumUpperBound"] = report.gapSumUpperBound;
  j["gapSumBelowHalf"] = report.gapSumBelowHalf;
  j["measureLowerBound"] = report.measureLowerBound;
  j["minimalK"] = report.minimalK;
  j["imageMeasureLowerBound"] = report.imageMeasureLowerBound;
  j["intervalWidths"] = report.intervalWidths;
  j["widthsOk"] = report.widthsOk;
  j["pass"] = report.pass();
  return j;
}

OrderedJson hypercurve_to_json(const HypercurveCertificate& cert) {
  OrderedJson j;
  j["schema"] = "hypercurve/1";
  j["lambda"] = cert.lambda;
  j["alpha"] = cert.alpha;
  j["beta"] = cert.beta;
  j["n"] = cert.n;
  j["A"] = cert.A;
  j["B"] = cert.B;
  j["BOverA"] = cert.BOverA;
  j["lowerBound"] = cert.lowerBound;
  return j;
}

OrderedJson projection_to_json(const ProjectionReport& report) {
  OrderedJson j;
  j["schema"] = "projection/1";
  j["n"] = report.n;
  j["lambda"] = report.lambda;
  j["domainPoints"] = report.domainPoints;
  j["spacePoints"] = report.spacePoints;
  j["faceChecks"] = report.faceChecks;
  j["faceViolationCount"] = report.faceViolationCount;
  auto violations = OrderedJson::array();
  for (const auto& w : report.faceViolations)
    violations.push_back({{"domainIndex", w.domainIndex},
                          {"axis", w.axis},
                          {"opposite", w.opposite},
                          {"value", w.value}});
  j["faceViolations"] = std::move(violations);
  j["pairsChecked"] = report.pairsChecked;
  j["psiLipschitz"] = report.psiLipschitz;
  j["productLipschitz"] = report.productLipschitz;
  j["lipschitzBudget"] = report.lipschitzBudget;
  j["densityRadius"] = report.densityRadius;
  j["gridSpacing"] = report.gridSpacing;
  j["pass"] = report.pass();
  return j;
}

OrderedJson refuter_to_json(const RefuterReport& report) {
  auto inequality = [](const RefuterInequality& q) {
    return OrderedJson{{"label", q.label},
                       {"lhs", q.lhs},
                       {"rhs", q.rhs},
                       {"checksRun", q.checksRun},
                       {"ok", q.ok}};
  };
  OrderedJson j;
  j["schema"] = "refuter/1";
  j["sigma"] = report.sigma;
  j["M"] = report.M;
  j["n"] = report.n;
  j["delta"] = report.delta;
  j["sigmaDelta"] = report.sigmaDelta;
  j["forcedSet"] = report.forcedSet;
  j["forcedDiameter"] = report.forcedDiameter;
  j["inequalities"] = OrderedJson::array({inequality(report.closeness),
                                          inequality(report.stepGap),
                                          inequality(report.diameterViolation)});
  j["pass"] = report.pass();
  return j;
}

std::string dimension_to_csv(const DimensionReport& report) {
  std::ostringstream out;
  out << "scale,count,log_inv_scale,log_count\n";
  for (std::size_t i = 0; i < report.scales.size(); ++i) {
    out << format_double(report.scales[i]) << ',' << report.counts[i] << ','
        << format_double(std::log(1.0 / report.scales[i])) << ','
        << format_double(std::log(static_cast<double>(report.counts[i]))) << '\n';
  }
  return out.str();
}

std::string dump_artifact(const OrderedJson& j) { return j.dump(2) + "\n"; }

void write_artifact(const std::string& path, const OrderedJson& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << dump_artifact(j);
  if (!out) throw std::runtime_error("write failed: " + path);
}

OrderedJson read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  OrderedJson j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error("invalid JSON in " + path + ": " + e.what());
  }
  return j;
}

}  // namespace biholder
