#pragma once

// Birth-death Markov model of the Slush protocol.
//
// The state is the number of blue (correct) honest nodes. With f perfectly
// malicious nodes that always answer red, the chain lives on 0..c, c = n - f.
// A state b moves to b - 1 at rate mu_b (a blue node samples >= alpha reds)
// and to b + 1 at rate lambda_b (a red honest node samples >= alpha blues).

#include <vector>

#include "conlearn/log_prob.hpp"

namespace conlearn {

struct SlushParams {
  int n = 1;
  int k = 1;
  int alpha = 1;

  /// Throws DomainError unless n >= 1, 1 <= k <= n and k/2 < alpha <= k.
  void validate() const;
  friend bool operator==(const SlushParams&, const SlushParams&) = default;
};

struct ByzantineConfig {
  int f = 0;        ///< perfectly malicious nodes (always answer red)
  int f_faulty = 0; ///< silent nodes; only meaningful to the simulator
};

struct RateOptions {
  /// Allow f >= alpha by forcing the death rate out of the all-honest-blue
  /// state to zero, which restores it as an absorbing state.
  bool clamp_top_death = false;
};

struct TransitionRates {
  int n = 0;
  int top = 0; ///< absorbing top state: c = n - f
  std::vector<LogProb> mu;     ///< death rates, index 0..top
  std::vector<LogProb> lambda; ///< birth rates, index 0..top

  double death(int b) const { return mu.at(b).linear(); }
  double birth(int b) const { return lambda.at(b).linear(); }
};

/// Absorption probabilities indexed by the starting blue count 0..top.
/// Both sides are stored in log space so that tiny red (or blue)
/// probabilities keep full relative precision.
struct AbsorptionTable {
  int n = 0;
  int top = 0;
  std::vector<LogProb> log_blue;
  std::vector<LogProb> log_red;

  double blue(int b) const { return log_blue.at(b).linear(); }
  double red(int b) const { return log_red.at(b).linear(); }
  std::vector<double> blue_vector() const;
  std::vector<double> red_vector() const;
  int states() const { return top + 1; }
};

/// Rates of the Slush chain. Requires f < alpha and n - f > f unless
/// clamp_top_death is set; throws UnsupportedRegime for f >= alpha, and
/// DomainError when f_faulty != 0 (faulty nodes have no chain semantics).
TransitionRates transition_rates(const SlushParams& params,
                                 const ByzantineConfig& byz = {},
                                 const RateOptions& options = {});

/// Exact absorption probabilities via cumulative log-space products of the
/// rate ratios between the effective absorbing boundaries. States below
/// alpha can only lose blue nodes (B_b = 0); states above n - alpha can only
/// gain them (B_b = 1). When those ranges overlap the overlap is frozen and
/// counted as red.
AbsorptionTable absorption(const SlushParams& params,
                           const ByzantineConfig& byz = {},
                           const RateOptions& options = {});

/// Independent ground truth: dense first-step linear solve of the embedded
/// jump chain. Limited to 2000 states.
AbsorptionTable absorption_oracle(const SlushParams& params,
                                  const ByzantineConfig& byz = {},
                                  const RateOptions& options = {});

/// Chvatal-style bound exp(-2 (alpha/k - 1 + b/n)^2 k) on R_b, b >= ceil(n/2).
double chvatal_bound(const SlushParams& params, int b);

} // namespace conlearn
