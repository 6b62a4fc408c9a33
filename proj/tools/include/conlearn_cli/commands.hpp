#pragma once

#include <iosfwd>

#include "conlearn_cli/config.hpp"
#include "conlearn_cli/output.hpp"

namespace conlearn::cli {

inline constexpr const char* tool_version = "0.3.0";

/// Per-state absorption rows: b, B, R, chvatal_bound, b_over_n.
Table absorb_table(const Config& config);

/// Slush, majority and supermajority accuracy over the p grid.
Table accuracy_table(const Config& config);

/// One row per expanded threshold query; failures become status=error rows.
Table threshold_table(const Config& config);

struct SimulateReport {
  Table cells;
  Json detail; ///< per-cell raw replicate records
};

SimulateReport simulate_report(const Config& config, int threads);

/// Full command line entry point. Returns the process exit code:
/// 0 ok, 2 configuration error, 3 unsupported regime, 4 numeric failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace conlearn::cli
