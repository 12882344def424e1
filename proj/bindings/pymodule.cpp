#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "biholder/pipeline.hpp"
#include "biholder/serialize.hpp"
#include "biholder/version.hpp"

namespace py = pybind11;
using namespace biholder;

namespace {

ScheduleParams make_params(int n, double q, double sigma, int N, bool relaxed) {
  ScheduleParams p;
  p.n = n;
  p.q = q;
  p.sigma = sigma;
  p.N = N;
  p.relaxed = relaxed;
  return p;
}

std::vector<Rational> parse_positions(const std::vector<std::string>& texts) {
  std::vector<Rational> out;
  out.reserve(texts.size());
  for (const auto& text : texts) {
    auto value = parse_rational(text);
    if (!value) throw std::invalid_argument("not a rational literal: " + text);
    out.push_back(*value);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_biholder, m) {
  m.doc() = "Constructive bi-Holder embeddings of finite metric spaces";
  m.attr("__version__") = kVersion;

  py::class_<FiniteMetricSpace>(m, "FiniteMetricSpace")
      .def("size", &FiniteMetricSpace::size)
      .def("dist", &FiniteMetricSpace::dist, py::arg("i"), py::arg("j"))
      .def("min_pairwise_distance", &FiniteMetricSpace::minPairwiseDistance)
      .def_readonly("diameter", &FiniteMetricSpace::diameter)
      .def_property_readonly(
          "provenance_kind",
          [](const FiniteMetricSpace& s) { return s.provenance.kind; })
      .def("to_json", [](const FiniteMetricSpace& s) { return space_to_json(s).dump(); })
      .def_static("from_json",
                  [](const std::string& text) {
                    return space_from_json(OrderedJson::parse(text));
                  })
      .def("__repr__", [](const FiniteMetricSpace& s) {
        std::ostringstream out;
        out << "<FiniteMetricSpace kind=" << s.provenance.kind << " size=" << s.size() << ">";
        return out.str();
      });

  py::class_<ColoredCover>(m, "ColoredCover")
      .def_property_readonly("set_count",
                             [](const ColoredCover& c) { return c.sets.size(); })
      .def_readonly("mesh", &ColoredCover::meshCert)
      .def_readonly("lebesgue", &ColoredCover::lebesgueCert)
      .def_readonly("multiplicity", &ColoredCover::multiplicityCert)
      .def_readonly("colors", &ColoredCover::colorCount)
      .def_readonly("certified", &ColoredCover::certified)
      .def("to_json", [](const ColoredCover& c) { return cover_to_json(c).dump(); })
      .def_static("from_json", [](const std::string& text) {
        return cover_from_json(OrderedJson::parse(text));
      });

  py::class_<ScaleSchedule>(m, "ScaleSchedule")
      .def_property_readonly("stages",
                             [](const ScaleSchedule& s) { return s.stages; })
      .def_property_readonly("relaxed",
                             [](const ScaleSchedule& s) { return s.params.relaxed; })
      .def_readonly("log2_eps", &ScaleSchedule::logEps)
      .def_readonly("log2_delta", &ScaleSchedule::logDelta)
      .def_readonly("log2_eta", &ScaleSchedule::logEta)
      .def_property_readonly("lambda_log2",
                             [](const ScaleSchedule& s) { return s.constants.logLambda; })
      .def("to_json", [](const ScaleSchedule& s) { return schedule_to_json(s).dump(); })
      .def_static("from_json", [](const std::string& text) {
        return schedule_from_json(OrderedJson::parse(text));
      });

  py::class_<ConstructionRun>(m, "ConstructionRun")
      .def_readonly("stabilized_at", &ConstructionRun::stabilizedAt)
      .def_readonly("stop_reason", &ConstructionRun::stopReason)
      .def_property_readonly("stage_count",
                             [](const ConstructionRun& r) { return r.stages.size(); })
      .def("stage_json", [](const ConstructionRun& r, std::size_t i) {
        if (i >= r.stages.size()) throw std::out_of_range("stage index out of range");
        return stage_to_json(r.stages[i]).dump();
      });

  m.def(
      "cantor",
      [](int levels) {
        CantorSpec spec;
        spec.levels = levels;
        return build_cantor(spec);
      },
      py::arg("levels"));
  m.def("interval_grid", &build_interval_grid, py::arg("grid_res"));
  m.def(
      "product_grid",
      [](int levels, int n, int gridRes, bool normalized) {
        CantorSpec spec;
        spec.levels = levels;
        return build_product_grid(spec, n, gridRes, normalized);
      },
      py::arg("levels"), py::arg("n"), py::arg("grid_res"), py::arg("normalized") = true);
  m.def("harmonic", &build_harmonic, py::arg("m"));
  m.def(
      "line_points",
      [](const std::vector<std::string>& positions) {
        return from_line_points(parse_positions(positions));
      },
      py::arg("positions"));
  m.def("snowflake", &snowflake, py::arg("space"), py::arg("power"));

  m.def("choose_N", &choose_N, py::arg("n"), py::arg("q"), py::arg("sigma"),
        py::arg("floor") = 2);
  m.def(
      "exact_schedule",
      [](int n, double q, double sigma, int N, int stages) {
        return exact_schedule(make_params(n, q, sigma, N, false), stages);
      },
      py::arg("n"), py::arg("q"), py::arg("sigma"), py::arg("N"), py::arg("stages"));
  m.def(
      "relaxed_schedule",
      [](int n, double q, double sigma, int N, double userL, double ratio, int stages) {
        return relaxed_schedule(make_params(n, q, sigma, N, true), userL, ratio, stages);
      },
      py::arg("n"), py::arg("q"), py::arg("sigma"), py::arg("N"), py::arg("user_l"),
      py::arg("ratio"), py::arg("stages"));
  m.def("schedule_identities_json", [](const ScaleSchedule& s) {
    return schedule_identities_to_json(check_schedule_identities(s)).dump();
  });

  m.def("greedy_cover", &build_greedy_cover, py::arg("space"), py::arg("delta"),
        py::arg("sigma"));
  m.def("structured_cover", &build_structured_cover, py::arg("space"), py::arg("level"));
  m.def("refine_cover", &size_controlled_refine, py::arg("space"), py::arg("base"),
        py::arg("N"));
  m.def("verify_cover_json", [](const FiniteMetricSpace& space, const ColoredCover& cover) {
    return cover_report_to_json(verify_cover(space, cover)).dump();
  });

  m.def(
      "run_construction",
      [](const FiniteMetricSpace& space, const ScaleSchedule& schedule, int stages,
         bool greedy, bool stopAtStabilization) {
        RunOptions options;
        options.coverSource = greedy ? CoverSource::Greedy : CoverSource::Structured;
        options.stopAtStabilization = stopAtStabilization;
        return run_construction(space, schedule, stages, options);
      },
      py::arg("space"), py::arg("schedule"), py::arg("stages"), py::arg("greedy") = true,
      py::arg("stop_at_stabilization") = true);
  m.def("biholder_check_json",
        [](const FiniteMetricSpace& space, const ConstructionRun& run,
           const ScaleSchedule& schedule) {
          return lemma_report_to_json(check_biholder(space, run.stages, schedule)).dump();
        });

  m.def(
      "box_dimension_json",
      [](const FiniteMetricSpace& space, std::vector<double> scales,
         std::optional<double> measureExponent) {
        return dimension_to_json(box_dimension(space, std::move(scales), measureExponent))
            .dump();
      },
      py::arg("space"), py::arg("scales"), py::arg("measure_exponent") = std::nullopt);

  m.def(
      "fastgap_json",
      [](int levels, double alpha, double beta, double lambda_) {
        return fastgap_to_json(fastgap_certificate(levels, alpha, beta, lambda_)).dump();
      },
      py::arg("levels"), py::arg("alpha"), py::arg("beta"), py::arg("lambda_"));
  m.def("cantor_ahlfors_constant", &cantor_ahlfors_constant, py::arg("levels"));
  m.def(
      "hypercurve_json",
      [](double lambda_, double alpha, int n, double nu) {
        return hypercurve_to_json(hypercurve_certificate(lambda_, alpha, n, nu)).dump();
      },
      py::arg("lambda_"), py::arg("alpha"), py::arg("n"), py::arg("nu"));
  m.def(
      "capacity_refuter_json",
      [](const FiniteMetricSpace& space, double sigma) {
        return refuter_to_json(capacity_refuter(space, sigma)).dump();
      },
      py::arg("space"), py::arg("sigma"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code = run_pipeline(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
