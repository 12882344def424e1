#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "biholder/metric_space.hpp"

namespace biholder {

// Everything a subcommand run depends on; recorded verbatim in each artifact
// so outputs are reproducible from their own header.
struct PipelineConfig {
  std::string subcommand;
  std::vector<std::string> inputPaths;
  std::string outPath;
  OrderedJson params = OrderedJson::object();
  long long seed = 0;
  std::string precision = "float64";  // float64 | rational
  int threads = 1;
  std::string format = "json";  // json | csv
};

OrderedJson config_to_json(const PipelineConfig& config);

// Parses argv-style arguments (program name excluded), executes the chosen
// subcommand, writes artifacts, and echoes a summary table to `out`.
// Exit status: 0 on success, 1 on a certificate failure, 2 on usage errors.
int run_pipeline(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace biholder
