#pragma once

// Binomial, hypergeometric and two-group Poisson binomial kernels.
//
// Everything here is pure. Binomial coefficients with r < 0 or r > n are
// treated as zero inside sums, so tail sums can run over their full nominal
// index range; the public entry points still reject out-of-range arguments.

#include "conlearn/log_prob.hpp"

namespace conlearn {

/// ln C(n, r). Throws DomainError unless 0 <= r <= n.
double log_binomial(int n, int r);

/// ln C(n, r) with C = 0 (i.e. -inf) outside 0 <= r <= n.
double log_binomial_or_zero(int n, int r);

/// Probability that a size-k sample drawn without replacement from n items,
/// b of which are marked, contains at least alpha marked items.
LogProb log_hypergeometric_tail(int n, int b, int k, int alpha);
double hypergeometric_tail(int n, int b, int k, int alpha);

/// Hypergeometric point mass: C(b, j) C(n - b, k - j) / C(n, k).
LogProb log_hypergeometric_pmf(int n, int b, int k, int j);

LogProb log_binomial_pmf(int n, int b, double p);
double binomial_pmf(int n, int b, double p);

/// Upper tail F(b*, n; p) = sum_{b >= b*} C(n, b) p^b (1-p)^(n-b).
/// b_star > n gives an empty sum; b_star must be non-negative.
LogProb log_binomial_tail(int b_star, int n, double p);
double binomial_tail(int b_star, int n, double p);

struct TwoGroupSpec {
  int n1 = 0;
  int n2 = 0;
  double p1 = 0.5;
  double p2 = 0.5;

  int total() const { return n1 + n2; }
  /// Checks n1 > n2 >= 0 and both accuracies in [0, 1].
  void validate() const;
};

/// Number of successes among n1 Bernoulli(p1) and n2 Bernoulli(p2) trials.
LogProb log_two_group_pmf(const TwoGroupSpec& spec, int b);
double two_group_pmf(const TwoGroupSpec& spec, int b);

} // namespace conlearn
