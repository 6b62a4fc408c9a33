#include <cmath>
#include <string>
#include <vector>

#include "conlearn/absorption_cache.hpp"
#include "conlearn/ensemble_analytics.hpp"
#include "conlearn/errors.hpp"

namespace conlearn {

void ThresholdQuery::validate() const {
  params.validate();
  const int n = params.n;
  if (n % 2 == 0) throw DomainError("threshold queries need an odd n");
  if (delta.has_value() == q.has_value())
    throw DomainError("set exactly one of delta and q");
  if (delta && *delta < 0) throw DomainError("delta must be non-negative");
  if (q) {
    if (!(*q > 0.5 && *q <= 1.0)) throw DomainError("q must lie in (1/2, 1]");
    if (2 * static_cast<int>(std::ceil(*q * n - 1e-9)) <= n)
      throw DomainError("ceil(q n) must exceed n/2");
  }
  if (f < 0 || f_faulty < 0) throw DomainError("node counts must be non-negative");
  if (f >= params.alpha)
    throw UnsupportedRegime("f=" + std::to_string(f) + " >= alpha=" +
                            std::to_string(params.alpha));
  const int c = n - f;
  const int quota = majority_quota(n) + effective_delta();
  if (quota > c)
    throw DomainError("quota " + std::to_string(quota) + " exceeds honest count " +
                      std::to_string(c));
}

int ThresholdQuery::effective_delta() const {
  int d = 0;
  if (delta) {
    d = *delta;
  } else if (q) {
    // The epsilon keeps q*n from landing just above an integer it equals.
    d = static_cast<int>(std::ceil(*q * params.n - 1e-9)) - majority_quota(params.n);
  }
  return d + f_faulty;
}

std::string to_string(ThresholdOutcome outcome) {
  switch (outcome) {
  case ThresholdOutcome::root: return "root";
  case ThresholdOutcome::slush_dominates_everywhere: return "slush-dominates-everywhere";
  case ThresholdOutcome::slush_dominates_nowhere: return "slush-dominates-nowhere";
  }
  return "unknown";
}

double threshold_tau_bound(const ThresholdQuery& query) {
  query.validate();
  if (query.f != 0 || query.f_faulty != 0)
    throw DomainError("the tau bound covers honest networks only");
  const int delta = query.effective_delta();
  if (delta < 1) throw DomainError("the tau bound needs delta >= 1");
  const SlushParams& sp = query.params;
  const int n = sp.n;
  const int lo = majority_quota(n) + delta;
  const int hi = n - sp.alpha; // exclusive
  if (lo >= hi)
    throw DomainError("empty state range [ceil(n/2)+delta, n-alpha) for the tau bound");

  const auto table = cached_absorption(sp);
  double best = 1.0;
  for (int b = lo; b < hi; ++b) {
    const LogProb r_hi = table->log_red[b];
    const LogProb r_lo = table->log_red[b - 2 * delta];
    if (r_hi.is_zero() || r_lo.is_zero()) continue;
    const double log_tau = (r_lo.log() - r_hi.log() + log_binomial(n, b - 2 * delta) -
                            log_binomial(n, b)) /
                           static_cast<double>(2 * b - n - 2 * delta);
    // tau / (1 + tau) without overflow
    const double p_th = 1.0 / (1.0 + std::exp(-log_tau));
    best = std::min(best, p_th);
  }
  return best;
}

ThresholdResult threshold_bisect(const ThresholdQuery& query, double tolerance) {
  query.validate();
  if (!(tolerance > 0.0)) throw DomainError("tolerance must be positive");
  const int delta = query.effective_delta();
  ThresholdResult result;
  if (delta == 0 && query.f == 0) {
    result.value = 0.5;
    return result;
  }

  const auto gap_sign = [&](double p) {
    return accuracy_gap(query.params, query.f, p, delta).sign();
  };

  constexpr int grid = 400;
  int prev = gap_sign(1.0 / grid);
  int prev_i = 1;
  double first_lo = -1.0;
  double first_hi = 1.0;
  for (int i = 2; i < grid; ++i) {
    const double p = static_cast<double>(i) / grid;
    const int s = gap_sign(p);
    if (s != 0 && prev != 0 && s != prev) {
      ++result.sign_changes;
      if (first_lo < 0.0 && prev < 0 && s > 0) {
        first_lo = static_cast<double>(prev_i) / grid;
        first_hi = p;
      }
    }
    if (prev == 0 || s != 0) {
      prev = s;
      prev_i = i;
    }
  }
  result.multiple_roots = result.sign_changes > 1;

  if (first_lo < 0.0) {
    const int s = gap_sign(0.5);
    if (s <= 0) {
      result.outcome = ThresholdOutcome::slush_dominates_everywhere;
      result.value = 1.0;
    } else {
      result.outcome = ThresholdOutcome::slush_dominates_nowhere;
      result.value = 0.0;
    }
    return result;
  }

  double lo = first_lo;
  double hi = first_hi;
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    (gap_sign(mid) > 0 ? hi : lo) = mid;
  }
  result.value = lo;
  return result;
}

} // namespace conlearn
