#include "conlearn/combinatorics.hpp"

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "conlearn/errors.hpp"

namespace conlearn {

double log_sum_exp(std::span<const double> logs) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double x : logs) hi = std::max(hi, x);
  if (hi == -std::numeric_limits<double>::infinity()) return hi;
  double acc = 0.0;
  for (double x : logs) acc += std::exp(x - hi);
  return hi + std::log(acc);
}

namespace {

// ln(1 - e^x) for x <= 0.
double log1m_exp(double x) {
  return x > -0.6931471805599453 ? std::log(-std::expm1(x)) : std::log1p(-std::exp(x));
}

constexpr int kExactLimit = 66; // C(66, 33) < 2^64
constexpr int kTableLimit = 1 << 15;

// ln C(n, r) for n <= kExactLimit, from exact integer binomials.
const std::vector<std::vector<double>>& exact_log_binomials() {
  static const std::vector<std::vector<double>> table = [] {
    std::vector<std::vector<double>> t(kExactLimit + 1);
    for (int n = 0; n <= kExactLimit; ++n) {
      t[n].resize(n + 1);
      __extension__ unsigned __int128 c = 1;
      for (int r = 0; r <= n; ++r) {
        t[n][r] = std::log(static_cast<double>(static_cast<std::uint64_t>(c)));
        c = c * static_cast<unsigned>(n - r) / static_cast<unsigned>(r + 1);
      }
    }
    return t;
  }();
  return table;
}

const std::vector<double>& log_factorials() {
  static const std::vector<double> table = [] {
    std::vector<double> t(kTableLimit + 1);
    for (int i = 0; i <= kTableLimit; ++i) t[i] = std::lgamma(i + 1.0);
    return t;
  }();
  return table;
}

double log_factorial(int n) {
  if (n <= kTableLimit) return log_factorials()[n];
  return std::lgamma(n + 1.0);
}

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0))
    throw DomainError(std::string(what) + " must lie in [0, 1]");
}

} // namespace

double log_binomial_or_zero(int n, int r) {
  if (n < 0 || r < 0 || r > n) return -std::numeric_limits<double>::infinity();
  if (n <= kExactLimit) return exact_log_binomials()[n][r];
  return log_factorial(n) - log_factorial(r) - log_factorial(n - r);
}

double log_binomial(int n, int r) {
  if (n < 0 || r < 0 || r > n)
    throw DomainError("log_binomial requires 0 <= r <= n (got n=" +
                      std::to_string(n) + ", r=" + std::to_string(r) + ")");
  return log_binomial_or_zero(n, r);
}

LogProb log_hypergeometric_pmf(int n, int b, int k, int j) {
  if (n < 0 || b < 0 || b > n || k < 0 || k > n)
    throw DomainError("hypergeometric pmf parameters out of range");
  return LogProb::from_log(log_binomial_or_zero(b, j) +
                           log_binomial_or_zero(n - b, k - j) -
                           log_binomial_or_zero(n, k));
}

LogProb log_hypergeometric_tail(int n, int b, int k, int alpha) {
  if (b < 0 || b > n || k < 1 || k > n || alpha < 1 || alpha > k)
    throw DomainError("hypergeometric_tail requires 0<=b<=n, 1<=k<=n, 1<=alpha<=k (got n=" +
                      std::to_string(n) + ", b=" + std::to_string(b) + ", k=" +
                      std::to_string(k) + ", alpha=" + std::to_string(alpha) + ")");
  // Terms vanish unless j <= b and k - j <= n - b.
  const int lo = std::max(alpha, k - (n - b));
  const int hi = std::min(k, b);
  if (lo > hi) return LogProb::zero();
  // When the tail holds the mean, sum the short side and take the complement
  // so that values near one keep their precision.
  const int full_lo = std::max(0, k - (n - b));
  if (lo == full_lo) return LogProb::one();
  const bool complement = static_cast<double>(alpha) * n <= static_cast<double>(k) * b;
  const int from = complement ? full_lo : lo;
  const int to = complement ? lo - 1 : hi;
  const auto count = static_cast<std::size_t>(to - from + 1);
  std::array<double, 64> small{};
  std::vector<double> big;
  std::span<double> terms;
  if (count <= small.size()) {
    terms = std::span<double>(small.data(), count);
  } else {
    big.resize(count);
    terms = big;
  }
  for (int j = from; j <= to; ++j)
    terms[j - from] = log_binomial_or_zero(b, j) + log_binomial_or_zero(n - b, k - j);
  // Rounding can push a certain event a hair above 0.
  const double lse = std::min(log_sum_exp(terms) - log_binomial_or_zero(n, k), 0.0);
  return LogProb::from_log(complement ? log1m_exp(lse) : lse);
}

double hypergeometric_tail(int n, int b, int k, int alpha) {
  return log_hypergeometric_tail(n, b, k, alpha).linear();
}

LogProb log_binomial_pmf(int n, int b, double p) {
  if (n < 0 || b < 0 || b > n)
    throw DomainError("binomial_pmf requires 0 <= b <= n");
  check_probability(p, "binomial_pmf success probability");
  // 0 * log(0) = 0 convention at the endpoints.
  if (p == 0.0) return b == 0 ? LogProb::one() : LogProb::zero();
  if (p == 1.0) return b == n ? LogProb::one() : LogProb::zero();
  return LogProb::from_log(log_binomial_or_zero(n, b) + b * std::log(p) +
                           (n - b) * std::log1p(-p));
}

double binomial_pmf(int n, int b, double p) {
  return log_binomial_pmf(n, b, p).linear();
}

LogProb log_binomial_tail(int b_star, int n, double p) {
  if (b_star < 0 || n < 0)
    throw DomainError("binomial_tail requires b_star >= 0 and n >= 0");
  check_probability(p, "binomial_tail success probability");
  if (b_star == 0) return LogProb::one();
  if (b_star > n) return LogProb::zero();
  const bool complement = b_star <= n * p;
  std::vector<double> terms;
  if (complement) {
    for (int b = 0; b < b_star; ++b) terms.push_back(log_binomial_pmf(n, b, p).log());
  } else {
    for (int b = b_star; b <= n; ++b) terms.push_back(log_binomial_pmf(n, b, p).log());
  }
  const double lse = std::min(log_sum_exp(terms), 0.0);
  return LogProb::from_log(complement ? log1m_exp(lse) : lse);
}

double binomial_tail(int b_star, int n, double p) {
  return log_binomial_tail(b_star, n, p).linear();
}

void TwoGroupSpec::validate() const {
  if (!(n1 > n2 && n2 >= 0))
    throw DomainError("two-group spec requires n1 > n2 >= 0");
  check_probability(p1, "p1");
  check_probability(p2, "p2");
}

LogProb log_two_group_pmf(const TwoGroupSpec& spec, int b) {
  spec.validate();
  if (b < 0 || b > spec.total())
    throw DomainError("two_group_pmf requires 0 <= b <= n1 + n2");
  // With p2 = 0 only j = b survives; log_binomial_pmf handles that through
  // its endpoint convention, so no special case is needed here.
  const int lo = std::max(0, b - spec.n2);
  const int hi = std::min(b, spec.n1);
  std::vector<double> terms;
  for (int j = lo; j <= hi; ++j) {
    const LogProb t = log_binomial_pmf(spec.n1, j, spec.p1) *
                      log_binomial_pmf(spec.n2, b - j, spec.p2);
    terms.push_back(t.log());
  }
  return LogProb::from_log(std::min(log_sum_exp(terms), 0.0));
}

double two_group_pmf(const TwoGroupSpec& spec, int b) {
  return log_two_group_pmf(spec, b).linear();
}

} // namespace conlearn
