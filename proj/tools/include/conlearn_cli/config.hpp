#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "conlearn/experiments.hpp"
#include "json.hpp"

namespace conlearn::cli {

using Json = nlohmann::json;

/// One entry of the threshold query list; unset fields fall back to the
/// protocol section.
struct ThresholdEntry {
  int n = 0;
  int k = 0;
  int alpha = 0;
  std::optional<int> delta;
  std::optional<double> q;
  int f = 0;
  int f_faulty = 0;

  friend bool operator==(const ThresholdEntry&, const ThresholdEntry&) = default;
};

struct ProtocolSection {
  int n = 101;
  int k = 10;
  int alpha = 6;
  int f = 0;
  bool clamp_top_death = false;
  friend bool operator==(const ProtocolSection&, const ProtocolSection&) = default;
};

struct PopulationSection {
  std::vector<double> mean_grid{0.5};
  std::vector<double> variance_grid{0.05};
  bool require_concave = false;
  friend bool operator==(const PopulationSection&, const PopulationSection&) = default;
};

struct SweepSection {
  // simulate
  std::string kind = "beta"; ///< beta | byzantine
  int N1 = 100;
  int N2 = 50;
  int rounds_per_node = 50;
  bool local_alpha = false;
  bool include_self = false;
  std::vector<int> byzantine_counts{0};
  std::string byzantine_selection = "random";
  bool allow_f_at_least_alpha = false;
  // accuracy
  std::vector<double> p_grid;
  int delta = 0;
  // threshold
  std::vector<ThresholdEntry> queries;
  double tolerance = 1e-4;
  friend bool operator==(const SweepSection&, const SweepSection&) = default;
};

struct OutputSection {
  std::string format = "csv"; ///< csv | json
  std::string path;           ///< empty: standard output
  friend bool operator==(const OutputSection&, const OutputSection&) = default;
};

/// Fully resolved configuration. Thread count is not part of it: it cannot
/// change any output.
struct Config {
  std::string command;
  std::uint64_t seed = 0;
  ProtocolSection protocol;
  PopulationSection population;
  SweepSection sweep;
  OutputSection output;
  friend bool operator==(const Config&, const Config&) = default;
};

/// Reads YAML (JSON is valid YAML) into a JSON tree.
Json load_config_tree(const std::string& path);
Json yaml_text_to_json(const std::string& text);

/// Builds and validates a Config. All problems are collected and reported
/// together, each prefixed with its field path; throws ConfigurationError.
Config config_from_json(const Json& tree);
Json config_to_json(const Config& config);

/// Sets tree[a][b]... = value, creating objects on the way.
void set_path(Json& tree, const std::vector<std::string>& path, Json value);

SweepConfig to_sweep_config(const Config& config, int threads);

/// Expands the query list (scalar-or-list fields become a cartesian product)
/// from the raw tree. Exposed for tests.
std::vector<ThresholdEntry> expand_queries(const Json& queries, const ProtocolSection& defaults,
                                           std::vector<std::string>& errors);

} // namespace conlearn::cli
