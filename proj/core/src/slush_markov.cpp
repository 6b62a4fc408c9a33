#include "conlearn/slush_markov.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>

#include "conlearn/combinatorics.hpp"
#include "conlearn/errors.hpp"

namespace conlearn {

void SlushParams::validate() const {
  if (n < 1) throw DomainError("n must be >= 1 (got " + std::to_string(n) + ")");
  if (k < 1 || k > n)
    throw DomainError("k must satisfy 1 <= k <= n (got k=" + std::to_string(k) +
                      ", n=" + std::to_string(n) + ")");
  if (alpha <= k / 2 || alpha > k)
    throw DomainError("alpha must satisfy floor(k/2) < alpha <= k (got alpha=" +
                      std::to_string(alpha) + ", k=" + std::to_string(k) + ")");
}

std::vector<double> AbsorptionTable::blue_vector() const {
  std::vector<double> out;
  out.reserve(log_blue.size());
  for (auto v : log_blue) out.push_back(v.linear());
  return out;
}

std::vector<double> AbsorptionTable::red_vector() const {
  std::vector<double> out;
  out.reserve(log_red.size());
  for (auto v : log_red) out.push_back(v.linear());
  return out;
}

TransitionRates transition_rates(const SlushParams& params, const ByzantineConfig& byz,
                                 const RateOptions& options) {
  params.validate();
  if (byz.f < 0 || byz.f_faulty < 0)
    throw DomainError("node counts must be non-negative");
  if (byz.f_faulty != 0)
    throw DomainError("faulty nodes have no Markov-chain semantics; use the simulator");
  if (byz.f >= params.alpha && !options.clamp_top_death)
    throw UnsupportedRegime("f=" + std::to_string(byz.f) + " >= alpha=" +
                            std::to_string(params.alpha) +
                            ": the all-blue state is not absorbing (enable clamp-top-death)");
  const int c = params.n - byz.f;
  if (c <= byz.f)
    throw DomainError("honest count c = n - f must exceed f (got c=" + std::to_string(c) +
                      ", f=" + std::to_string(byz.f) + ")");

  TransitionRates rates;
  rates.n = params.n;
  rates.top = c;
  rates.mu.assign(c + 1, LogProb::zero());
  rates.lambda.assign(c + 1, LogProb::zero());
  // 0 and c are absorbing; with clamp_top_death this is what zeroes the
  // death rate out of c when f >= alpha.
  for (int b = 1; b < c; ++b) {
    rates.mu[b] = LogProb::from_linear(b) *
                  log_hypergeometric_tail(params.n, params.n - b, params.k, params.alpha);
    rates.lambda[b] = LogProb::from_linear(c - b) *
                      log_hypergeometric_tail(params.n, b, params.k, params.alpha);
  }
  return rates;
}

AbsorptionTable absorption(const SlushParams& params, const ByzantineConfig& byz,
                           const RateOptions& options) {
  const TransitionRates rates = transition_rates(params, byz, options);
  const int top = rates.top;
  const int n = params.n;
  const int alpha = params.alpha;

  AbsorptionTable table;
  table.n = n;
  table.top = top;
  table.log_blue.assign(top + 1, LogProb::zero());
  table.log_red.assign(top + 1, LogProb::one());

  for (int b = 0; b <= top; ++b) {
    const bool only_down = b < alpha && b != top;
    const bool only_up = b == top || b > n - alpha;
    if (!only_down && only_up) {
      table.log_blue[b] = LogProb::one();
      table.log_red[b] = LogProb::zero();
    }
  }

  // Interior strictly between lower = alpha-1 (B = 0) and upper (B = 1).
  const int lower = alpha - 1;
  const int upper = std::min(n - alpha + 1, top);
  if (upper <= lower + 1) return table;

  // log rho_j = sum_{i=lower+1}^{j} log(mu_i / lambda_i), rho_lower = 1.
  const int m = upper - lower; // number of rho terms: j = lower..upper-1
  std::vector<double> log_rho(m);
  log_rho[0] = 0.0;
  for (int j = lower + 1; j < upper; ++j) {
    const LogProb mu = rates.mu[j];
    const LogProb lam = rates.lambda[j];
    if (mu.is_zero() || lam.is_zero())
      throw NumericFailure("vanishing interior rate at b=" + std::to_string(j));
    log_rho[j - lower] = log_rho[j - lower - 1] + mu.log() - lam.log();
  }

  // prefix[i] = lse(log_rho[0..i]), suffix[i] = lse(log_rho[i..m-1]).
  std::vector<double> prefix(m), suffix(m);
  prefix[0] = log_rho[0];
  for (int i = 1; i < m; ++i)
    prefix[i] = (LogProb::from_log(prefix[i - 1]) + LogProb::from_log(log_rho[i])).log();
  suffix[m - 1] = log_rho[m - 1];
  for (int i = m - 2; i >= 0; --i)
    suffix[i] = (LogProb::from_log(suffix[i + 1]) + LogProb::from_log(log_rho[i])).log();
  const double log_total = prefix[m - 1];

  for (int b = lower + 1; b < upper; ++b) {
    // B_b = sum_{j=lower}^{b-1} rho_j / total, R_b = sum_{j=b}^{upper-1} rho_j / total
    table.log_blue[b] = LogProb::from_log(std::min(prefix[b - 1 - lower] - log_total, 0.0));
    table.log_red[b] = LogProb::from_log(std::min(suffix[b - lower] - log_total, 0.0));
  }
  return table;
}

AbsorptionTable absorption_oracle(const SlushParams& params, const ByzantineConfig& byz,
                                  const RateOptions& options) {
  const TransitionRates rates = transition_rates(params, byz, options);
  const int top = rates.top;
  const int size = top + 1;
  if (size > 2000) throw DomainError("absorption_oracle is limited to 2000 states");

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(size, size);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(size);
  a(0, 0) = 1.0;
  rhs(0) = 1.0;
  a(top, top) = 1.0;
  for (int b = 1; b < top; ++b) {
    const double mu = rates.death(b);
    const double lam = rates.birth(b);
    a(b, b) = 1.0;
    if (mu + lam == 0.0) {
      // Frozen state: no transitions at all; counted as red.
      rhs(b) = 1.0;
      continue;
    }
    a(b, b - 1) = -mu / (mu + lam);
    a(b, b + 1) = -lam / (mu + lam);
  }
  const Eigen::VectorXd red = a.partialPivLu().solve(rhs);
  if (!red.allFinite() || (a * red - rhs).cwiseAbs().maxCoeff() > 1e-9)
    throw NumericFailure("absorption_oracle: singular first-step system");

  AbsorptionTable table;
  table.n = params.n;
  table.top = top;
  table.log_blue.resize(size);
  table.log_red.resize(size);
  for (int b = 0; b < size; ++b) {
    const double r = std::clamp(red(b), 0.0, 1.0);
    table.log_red[b] = LogProb::from_linear(r);
    table.log_blue[b] = LogProb::from_linear(1.0 - r);
  }
  return table;
}

double chvatal_bound(const SlushParams& params, int b) {
  params.validate();
  const int half = (params.n + 1) / 2;
  if (b < half || b > params.n)
    throw DomainError("chvatal_bound is only claimed for ceil(n/2) <= b <= n");
  const double t = static_cast<double>(params.alpha) / params.k - 1.0 +
                   static_cast<double>(b) / params.n;
  return std::exp(-2.0 * t * t * params.k);
}

} // namespace conlearn
