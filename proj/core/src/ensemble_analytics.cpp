#include "conlearn/ensemble_analytics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "conlearn/absorption_cache.hpp"
#include "conlearn/errors.hpp"

namespace conlearn {

namespace {

void require_odd(int n) {
  if (n < 1 || n % 2 == 0)
    throw DomainError("majority rules need an odd number of voters (got n=" +
                      std::to_string(n) + ")");
}

void require_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("accuracy must lie in [0, 1]");
}

} // namespace

double majority_accuracy(int n, double p) { return supermajority_accuracy(n, p, 0); }

double supermajority_accuracy(int n, double p, int delta) {
  return majority_accuracy_byzantine(n, 0, p, delta);
}

double majority_accuracy_byzantine(int n, int f, double p, int delta) {
  require_odd(n);
  require_probability(p);
  if (f < 0 || delta < 0) throw DomainError("f and delta must be non-negative");
  const int c = n - f;
  if (c <= 0) throw DomainError("no honest voters left (f >= n)");
  const int quota = majority_quota(n) + delta;
  if (quota > c)
    throw DomainError("quota ceil(n/2)+delta=" + std::to_string(quota) +
                      " exceeds the honest count " + std::to_string(c));
  return binomial_tail(quota, c, p);
}

double slush_accuracy_from_pmf(const AbsorptionTable& table,
                               const std::function<double(int)>& pmf) {
  std::vector<double> terms;
  terms.reserve(table.log_blue.size());
  for (int b = 0; b <= table.top; ++b) {
    const double w = pmf(b);
    if (w > 0.0 && !table.log_blue[b].is_zero())
      terms.push_back(std::log(w) + table.log_blue[b].log());
  }
  return std::min(1.0, LogProb::from_log(log_sum_exp(terms)).linear());
}

namespace {

// sum_b C(c, b) B_b p^b (1-p)^(c-b) in log space.
double slush_binomial_mixture(const AbsorptionTable& table, double p) {
  const int c = table.top;
  std::vector<double> terms;
  terms.reserve(c + 1);
  for (int b = 0; b <= c; ++b) {
    const LogProb t = log_binomial_pmf(c, b, p) * table.log_blue[b];
    if (!t.is_zero()) terms.push_back(t.log());
  }
  return std::min(1.0, LogProb::from_log(log_sum_exp(terms)).linear());
}

} // namespace

double slush_accuracy_homogeneous(const SlushParams& params, double p) {
  require_probability(p);
  return slush_binomial_mixture(*cached_absorption(params), p);
}

double slush_accuracy_byzantine(const SlushParams& params, int f, double p) {
  require_probability(p);
  if (f < 0) throw DomainError("f must be non-negative");
  return slush_binomial_mixture(*cached_absorption(params, f), p);
}

AccuracyGap accuracy_gap(const SlushParams& params, int f, double p, int delta) {
  require_odd(params.n);
  require_probability(p);
  const auto table = cached_absorption(params, f);
  const int c = table->top;
  const int quota = majority_quota(params.n) + delta;
  if (delta < 0 || quota > c) throw DomainError("supermajority quota out of range");
  std::vector<double> ahead, behind;
  for (int b = 0; b <= c; ++b) {
    const LogProb w = log_binomial_pmf(c, b, p);
    if (w.is_zero()) continue;
    if (b >= quota) {
      const LogProb t = w * table->log_red[b];
      if (!t.is_zero()) ahead.push_back(t.log());
    } else {
      const LogProb t = w * table->log_blue[b];
      if (!t.is_zero()) behind.push_back(t.log());
    }
  }
  return AccuracyGap{LogProb::from_log(log_sum_exp(ahead)),
                     LogProb::from_log(log_sum_exp(behind))};
}

double control_ratio(int b, const AbsorptionTable& table,
                     const std::function<double(int)>& outcome_pmf) {
  const int n = table.n;
  if (b < majority_quota(n) || b > table.top)
    throw DomainError("control_ratio needs ceil(n/2) <= b <= top");
  const double pmf_b = outcome_pmf(b);
  const double pmf_mirror = outcome_pmf(n - b);
  const LogProb blue_mirror = table.log_blue.at(n - b);
  if (!(pmf_mirror > 0.0) || blue_mirror.is_zero())
    throw DomainError("control ratio undefined at b=" + std::to_string(b) +
                      ": zero denominator");
  if (pmf_b <= 0.0 || table.log_red[b].is_zero()) return 0.0;
  const double log_kappa = table.log_red[b].log() - blue_mirror.log() + std::log(pmf_b) -
                           std::log(pmf_mirror);
  return std::exp(log_kappa);
}

double slush_lower_bound(const SlushParams& params) {
  params.validate();
  const double t = static_cast<double>(params.alpha) / params.k - 0.5;
  return 1.0 - std::exp(-2.0 * t * t * params.k);
}

double max_two_group_control_ratio(const TwoGroupSpec& spec, const SlushParams& params) {
  spec.validate();
  params.validate();
  if (spec.total() != params.n) throw DomainError("n1 + n2 must equal n");
  const auto table = cached_absorption(params);
  const auto pmf = [&](int b) { return two_group_pmf(spec, b); };
  const int lo = majority_quota(params.n);
  const int hi = params.n - params.alpha;
  if (lo > hi) throw DomainError("empty control-ratio range: alpha >= ceil(n/2)");
  double worst = 0.0;
  for (int b = lo; b <= hi; ++b) {
    // A vanishing mirror term makes kappa_b infinite unless its numerator
    // vanishes too.
    if (!(pmf(params.n - b) > 0.0) || table->log_blue[params.n - b].is_zero()) {
      if (pmf(b) > 0.0 && !table->log_red[b].is_zero())
        return std::numeric_limits<double>::infinity();
      continue;
    }
    worst = std::max(worst, control_ratio(b, *table, pmf));
  }
  return worst;
}

PerformanceGroupsResult performance_groups(const TwoGroupSpec& spec, const SlushParams& params) {
  spec.validate();
  params.validate();
  require_odd(params.n);
  if (spec.total() != params.n) throw DomainError("n1 + n2 must equal n");
  if (!(spec.p2 < 0.5)) throw DomainError("performance groups need p2 < 1/2");

  PerformanceGroupsResult out;
  const auto table = cached_absorption(params);
  const auto pmf = [&](int b) { return two_group_pmf(spec, b); };
  double maj = 0.0;
  for (int b = majority_quota(params.n); b <= params.n; ++b) maj += pmf(b);
  out.majority_accuracy = std::min(1.0, maj);
  out.slush_accuracy = slush_accuracy_from_pmf(*table, pmf);
  out.delta_accuracy = out.majority_accuracy - out.slush_accuracy;
  out.p_max_bound = static_cast<double>(majority_quota(params.n)) / (1.0 + spec.n1);

  // kappa_b grows with p1; bracket the last p1 at which all of them are < 1.
  const auto holds = [&](double p1) {
    TwoGroupSpec s = spec;
    s.p1 = p1;
    return max_two_group_control_ratio(s, params) < 1.0;
  };
  double lo = 0.5;
  double hi = 1.0;
  if (!holds(lo)) {
    out.p_max_estimate = 0.5;
    return out;
  }
  if (holds(hi)) {
    out.p_max_estimate = 1.0;
    return out;
  }
  while (hi - lo > 1e-7) {
    const double mid = 0.5 * (lo + hi);
    (holds(mid) ? lo : hi) = mid;
  }
  out.p_max_estimate = lo;
  return out;
}

std::string to_string(AccuracyMethod method) {
  switch (method) {
  case AccuracyMethod::slush: return "slush";
  case AccuracyMethod::majority: return "majority";
  case AccuracyMethod::supermajority: return "supermajority";
  }
  return "unknown";
}

AccuracyCurve accuracy_curve(AccuracyMethod method, const SlushParams& params,
                             std::span<const double> grid, int delta, int f) {
  params.validate();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    require_probability(grid[i]);
    if (i > 0 && !(grid[i] > grid[i - 1]))
      throw DomainError("accuracy grid must be strictly increasing");
  }
  AccuracyCurve curve;
  curve.method = method;
  curve.grid.assign(grid.begin(), grid.end());
  curve.values.reserve(grid.size());
  for (double p : grid) {
    switch (method) {
    case AccuracyMethod::slush:
      curve.values.push_back(slush_accuracy_byzantine(params, f, p));
      break;
    case AccuracyMethod::majority:
      curve.values.push_back(majority_accuracy_byzantine(params.n, f, p, 0));
      break;
    case AccuracyMethod::supermajority:
      curve.values.push_back(majority_accuracy_byzantine(params.n, f, p, delta));
      break;
    }
  }
  return curve;
}

} // namespace conlearn
