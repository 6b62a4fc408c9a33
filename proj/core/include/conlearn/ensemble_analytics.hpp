#pragma once

// Closed-form ensemble accuracies for majority-type rules and the Slush
// protocol over independent Bernoulli base learners, plus the comparisons
// built on them (control ratios, threshold searches, performance groups).

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "conlearn/combinatorics.hpp"
#include "conlearn/slush_markov.hpp"

namespace conlearn {

/// ceil(n / 2): votes needed by the simple majority rule.
constexpr int majority_quota(int n) { return (n + 1) / 2; }

double majority_accuracy(int n, double p);
double supermajority_accuracy(int n, double p, int delta);

/// Majority over n voters of which f always vote wrong; the remaining
/// c = n - f are Bernoulli(p). delta raises the quota to ceil(n/2) + delta.
double majority_accuracy_byzantine(int n, int f, double p, int delta = 0);

double slush_accuracy_homogeneous(const SlushParams& params, double p);
double slush_accuracy_byzantine(const SlushParams& params, int f, double p);

/// P(all-blue) when the initial blue count has the given distribution on
/// 0..table.top.
double slush_accuracy_from_pmf(const AbsorptionTable& table,
                               const std::function<double(int)>& pmf);

/// comparison_rule - slush, split into the two positive sums whose
/// difference it is. Keeping them apart preserves the sign when both
/// accuracies are within 1e-16 of one.
struct AccuracyGap {
  LogProb comparison_ahead; ///< sum over b >= quota of P(b) R_b
  LogProb slush_ahead;      ///< sum over b < quota of P(b) B_b

  double value() const { return comparison_ahead.linear() - slush_ahead.linear(); }
  int sign() const {
    if (comparison_ahead == slush_ahead) return 0;
    return comparison_ahead > slush_ahead ? 1 : -1;
  }
};

/// Gap between the delta-supermajority over c = n - f honest voters (f wrong
/// votes) and Slush with f perfectly malicious nodes, at accuracy p.
AccuracyGap accuracy_gap(const SlushParams& params, int f, double p, int delta);

/// kappa_b = (R_b / B_{n-b}) * (P(S = b) / P(S = n - b)) for b >= ceil(n/2).
double control_ratio(int b, const AbsorptionTable& table,
                     const std::function<double(int)>& outcome_pmf);

/// 1 - exp(-2 (alpha/k - 1/2)^2 k), a large-n floor on Slush accuracy.
double slush_lower_bound(const SlushParams& params);

struct ThresholdQuery {
  SlushParams params;
  std::optional<int> delta;  ///< supermajority offset
  std::optional<double> q;   ///< or the vote fraction it derives from
  int f = 0;                 ///< perfectly malicious nodes
  int f_faulty = 0;          ///< perfectly faulty nodes, added to the offset

  /// delta, or ceil(q n) - ceil(n/2), plus f_faulty. Validates the query.
  int effective_delta() const;
  void validate() const;
};

/// min over b of the per-state sufficient threshold p_th(b; delta).
/// Honest networks and delta >= 1 only. A lower bound on the true threshold.
double threshold_tau_bound(const ThresholdQuery& query);

enum class ThresholdOutcome {
  root,                       ///< Slush wins below `value`, loses above
  slush_dominates_everywhere, ///< no sign change, Slush better on (0, 1)
  slush_dominates_nowhere,    ///< no sign change, comparison rule better
};

std::string to_string(ThresholdOutcome outcome);

struct ThresholdResult {
  ThresholdOutcome outcome = ThresholdOutcome::root;
  double value = 0.5;
  int sign_changes = 0;
  bool multiple_roots = false;
};

/// Root of comparison_rule(p) - slush(p) on (0, 1): scanned on a 1/400 grid
/// then bisected to `tolerance`. Returns the lower end of the final bracket.
ThresholdResult threshold_bisect(const ThresholdQuery& query, double tolerance = 1e-4);

struct PerformanceGroupsResult {
  double majority_accuracy = 0.0;
  double slush_accuracy = 0.0;
  double delta_accuracy = 0.0; ///< majority - slush
  double p_max_estimate = 0.0; ///< largest p1 with every kappa_b < 1
  double p_max_bound = 0.0;    ///< ceil(n/2) / (1 + n1)
};

/// Largest kappa_b over ceil(n/2) <= b <= n - alpha for a two-group
/// population.
double max_two_group_control_ratio(const TwoGroupSpec& spec, const SlushParams& params);

PerformanceGroupsResult performance_groups(const TwoGroupSpec& spec, const SlushParams& params);

enum class AccuracyMethod { slush, majority, supermajority };

std::string to_string(AccuracyMethod method);

struct AccuracyCurve {
  std::vector<double> grid;
  std::vector<double> values;
  AccuracyMethod method = AccuracyMethod::slush;
};

/// Evaluates one rule over a strictly increasing grid in [0, 1]. `delta` is
/// used by the supermajority rule; f applies to every rule.
AccuracyCurve accuracy_curve(AccuracyMethod method, const SlushParams& params,
                             std::span<const double> grid, int delta = 0, int f = 0);

} // namespace conlearn
