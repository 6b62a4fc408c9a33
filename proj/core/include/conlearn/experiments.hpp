#pragma once

// Synthetic-learner sweeps: beta-distributed accuracy populations and
// byzantine conversions, each evaluated with the majority rule and Slush on
// the same voting profiles.

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "conlearn/gossip_sim.hpp"
#include "conlearn/rng.hpp"
#include "conlearn/slush_markov.hpp"

namespace conlearn {

struct BetaSpec {
  double mean = 0.5;
  double variance = 0.05;
  double shape_a = 2.0;
  double shape_b = 2.0;

  /// Inverts the moments. variance == 0 gives a point mass at the mean
  /// (infinite shapes).
  static BetaSpec from_moments(double mean, double variance);
  bool point_mass() const { return variance == 0.0; }
  bool concave() const { return point_mass() || (shape_a > 1.0 && shape_b > 1.0); }
};

struct BetaShapes {
  double a = 0.0;
  double b = 0.0;
};

/// a = m (m(1-m)/v - 1), b = (1-m)(m(1-m)/v - 1). Throws DomainError when
/// v >= m(1-m) or the mean is outside (0, 1).
BetaShapes beta_shapes_from_moments(double mean, double variance);

/// n independent accuracies, all strictly inside (0, 1).
std::vector<double> sample_accuracies(const BetaSpec& spec, int n, Rng& rng);

enum class ByzantineSelection { random, strongest, weakest, representative };

std::string to_string(ByzantineSelection selection);
ByzantineSelection parse_byzantine_selection(const std::string& name);

/// Indices of the f nodes to corrupt. `random` draws from rng; the others are
/// pure functions of the accuracies (ties broken by index).
std::vector<int> select_byzantine(std::span<const double> accuracies, int f,
                                  ByzantineSelection selection, Rng& rng);

struct SweepConfig {
  SlushParams params{101, 10, 6};
  int n_learners = 101;
  int N1 = 100; ///< voting profiles per accuracy sample
  int N2 = 50;  ///< accuracy samples per cell
  int rounds_per_node = 50;
  std::vector<double> mean_grid{0.5};
  std::vector<double> variance_grid{0.05};
  std::uint64_t seed = 0;
  bool local_alpha = false;
  bool include_self = false;
  std::vector<int> byzantine_counts{0};
  ByzantineSelection byzantine_selection = ByzantineSelection::random;
  bool allow_f_at_least_alpha = false; ///< simulate f >= alpha instead of marking the cell
  bool require_concave = false;        ///< reject cells whose beta density is not concave
  int threads = 1;                     ///< 0 means hardware concurrency

  /// Throws ConfigurationError naming the offending field.
  void validate() const;
};

enum class Rule : std::size_t { majority = 0, slush = 1, slush_local = 2 };
inline constexpr std::size_t rule_count = 3;
std::string to_string(Rule rule);

struct SamplingError {
  double lower = 0.0;    ///< eps / sqrt(N)
  double upper = 0.0;    ///< eps
  double estimate = 0.0; ///< raw estimate clamped to [lower, upper]
  double raw = 0.0;
};

/// eps = 1 / n_test_samples. The estimate is eps sqrt(sum_ij rho_ij) / N,
/// rho being the correlation between replicate outcome vectors (1 on the
/// diagonal). Rows with no variance correlate 1 with identical rows, 0
/// otherwise.
SamplingError sampling_error(std::span<const std::vector<std::uint8_t>> replicate_outcomes,
                             int n_test_samples);
/// Only the bracket; estimate set to its upper end.
SamplingError sampling_error_bracket(int n_test_samples, int N);

struct MethodStats {
  bool evaluated = false;
  double accuracy = 0.0;
  SamplingError error;
};

struct ReplicateRecord {
  int index = 0;
  double population_mean = 0.0; ///< mean sampled accuracy
  std::array<double, rule_count> accuracy{};
  std::array<std::vector<std::uint8_t>, rule_count> outcomes; ///< 1 = correct, per profile
};

enum class CellStatus { ok, infeasible_moments, unsupported, failed };
std::string to_string(CellStatus status);

struct CellResult {
  int index = 0;
  double mean = 0.0;
  double variance = 0.0;
  int f = 0;
  BetaSpec beta;
  CellStatus status = CellStatus::ok;
  std::string message;
  std::array<MethodStats, rule_count> methods;
  std::vector<ReplicateRecord> replicates;

  const MethodStats& method(Rule r) const { return methods[static_cast<std::size_t>(r)]; }
};

struct SweepResult {
  std::string kind; ///< "beta" or "byzantine"
  SweepConfig config;
  std::vector<CellResult> cells;
};

/// One cell per (mean, variance). Slush uses strong-confidence thresholds
/// when config.local_alpha is set.
SweepResult beta_sweep(const SweepConfig& config);

/// One cell per (mean, variance, f); majority, global-alpha Slush and
/// local-alpha Slush on every profile.
SweepResult byzantine_sweep(const SweepConfig& config);

/// Runs fn(i) for i in [0, count) on up to `threads` workers. The first
/// exception is rethrown after all workers finish.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

int resolve_threads(int requested);

} // namespace conlearn
