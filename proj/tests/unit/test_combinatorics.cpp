#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <numbers>

#include "conlearn/combinatorics.hpp"
#include "conlearn/errors.hpp"
#include "support/exact.hpp"

using namespace conlearn;

TEST(LogProb, ZeroIsAbsorbingUnderProducts) {
  const LogProb z = LogProb::zero();
  const LogProb half = LogProb::from_linear(0.5);
  EXPECT_TRUE((z * half).is_zero());
  EXPECT_TRUE((half * z).is_zero());
  EXPECT_TRUE(LogProb::from_linear(0.0).is_zero());
  EXPECT_EQ((z + half).linear(), 0.5);
  EXPECT_NEAR((half + half).linear(), 1.0, 1e-15);
  EXPECT_NEAR((half * half).linear(), 0.25, 1e-15);
  EXPECT_TRUE(z < half);
}

TEST(LogSumExp, HandlesEmptyAndExtremeInputs) {
  EXPECT_TRUE(std::isinf(log_sum_exp({})));
  const double ninf = -std::numeric_limits<double>::infinity();
  const std::vector<double> allzero{ninf, ninf};
  EXPECT_EQ(log_sum_exp(allzero), ninf);
  const std::vector<double> big{1000.0, 1000.0};
  EXPECT_NEAR(log_sum_exp(big), 1000.0 + std::log(2.0), 1e-12);
}

TEST(LogBinomial, SmallValues) {
  EXPECT_EQ(log_binomial(5, 0), 0.0);
  EXPECT_NEAR(log_binomial(5, 2), std::log(10.0), 1e-15);
  EXPECT_THROW(log_binomial(5, 6), DomainError);
  EXPECT_THROW(log_binomial(5, -1), DomainError);
  EXPECT_EQ(log_binomial_or_zero(5, 6), -std::numeric_limits<double>::infinity());
}

TEST(LogBinomial, ExactUpToTwenty) {
  for (int n = 0; n <= 20; ++n)
    for (int r = 0; r <= n; ++r) {
      const double want = exact::to_double(exact::binom(n, r));
      EXPECT_EQ(std::round(std::exp(log_binomial(n, r))), want) << n << " " << r;
    }
}

TEST(LogBinomial, LargeAgainstBigInteger) {
  const double want = exact::log_of(exact::binom(500, 250));
  EXPECT_NEAR(log_binomial(500, 250), want, 1e-12 * want);
  for (int r : {1, 17, 100, 333, 499}) {
    const double w = exact::log_of(exact::binom(500, r));
    EXPECT_NEAR(log_binomial(500, r), w, 1e-12 * w) << r;
  }
}

TEST(HypergeometricTail, Boundaries) {
  EXPECT_EQ(hypergeometric_tail(10, 1, 3, 2), 0.0);
  for (int k = 1; k <= 10; ++k)
    for (int a = 1; a <= k; ++a) EXPECT_NEAR(hypergeometric_tail(10, 10, k, a), 1.0, 1e-15);
  EXPECT_THROW(hypergeometric_tail(10, 11, 3, 2), DomainError);
  EXPECT_THROW(hypergeometric_tail(10, 5, 11, 2), DomainError);
  EXPECT_THROW(hypergeometric_tail(10, 5, 3, 4), DomainError);
  EXPECT_THROW(hypergeometric_tail(10, 5, 3, 0), DomainError);
}

TEST(HypergeometricTail, MatchesBigRational) {
  const double want = exact::to_double(exact::hyper_tail(61, 40, 10, 7));
  EXPECT_NEAR(hypergeometric_tail(61, 40, 10, 7), want, 1e-14 * want);
  for (int b = 0; b <= 61; b += 5) {
    const double w = exact::to_double(exact::hyper_tail(61, b, 10, 7));
    EXPECT_NEAR(hypergeometric_tail(61, b, 10, 7), w, 1e-13 * w + 1e-300) << b;
  }
}

TEST(HypergeometricTail, PmfNormalises) {
  for (int n : {5, 12, 61})
    for (int k : {1, 3, 5})
      for (int b = 0; b <= n; ++b) {
        LogProb total = LogProb::zero();
        for (int j = 0; j <= k; ++j) total += log_hypergeometric_pmf(n, b, k, j);
        EXPECT_NEAR(total.linear(), 1.0, 1e-12) << n << " " << k << " " << b;
      }
}

TEST(HypergeometricTail, NondecreasingInMarkedCount) {
  for (int n : {11, 61})
    for (int k : {1, 3, 10})
      for (int a = k / 2 + 1; a <= k; ++a)
        for (int b = 1; b <= n; ++b)
          EXPECT_GE(log_hypergeometric_tail(n, b, k, a).log(),
                    log_hypergeometric_tail(n, b - 1, k, a).log());
}

TEST(BinomialPmf, Basics) {
  EXPECT_EQ(binomial_pmf(7, 0, 0.0), 1.0);
  EXPECT_EQ(binomial_pmf(7, 7, 1.0), 1.0);
  EXPECT_EQ(binomial_pmf(7, 3, 0.0), 0.0);
  EXPECT_NEAR(binomial_pmf(3, 2, 0.5), 0.375, 1e-15);
}

TEST(BinomialPmf, MatchesBigRational) {
  const exact::cpp_rational p(3, 5);
  const double want = exact::to_double(exact::binom_pmf(101, 51, p));
  EXPECT_NEAR(binomial_pmf(101, 51, 0.6), want, 1e-12 * want);
}

TEST(BinomialPmf, SumsToOne) {
  for (int n : {1, 10, 101, 501})
    for (double p : {0.01, 0.3, 0.5, 0.77, 0.999}) {
      double s = 0.0;
      for (int b = 0; b <= n; ++b) s += binomial_pmf(n, b, p);
      EXPECT_NEAR(s, 1.0, 1e-12) << n << " " << p;
    }
}

TEST(BinomialTail, Boundaries) {
  EXPECT_EQ(binomial_tail(0, 7, 0.3), 1.0);
  EXPECT_EQ(binomial_tail(8, 7, 0.3), 0.0);
  EXPECT_THROW(binomial_tail(-1, 7, 0.3), DomainError);
}

TEST(BinomialTail, DerivativeMatchesFiniteDifference) {
  const int bs = 4, n = 9;
  const double p = 0.55, h = 1e-5;
  const double fd = (binomial_tail(bs, n, p + h) - binomial_tail(bs, n, p - h)) / (2 * h);
  const double closed = std::exp(log_binomial(n, bs)) * bs * std::pow(p, bs - 1) *
                        std::pow(1 - p, n - bs);
  EXPECT_NEAR(fd, closed, 1e-6);
}

TEST(BinomialTail, StrictlyIncreasingInP) {
  for (int n : {1, 9, 51})
    for (int bs = 1; bs <= n; bs += std::max(1, n / 7))
      for (int i = 1; i < 20; ++i) {
        // In log form so that tails within 1e-16 of one still compare.
        const double lo = log_binomial_tail(bs, n, (i - 1) / 20.0 + 0.025).log();
        const double hi = log_binomial_tail(bs, n, i / 20.0 + 0.025).log();
        EXPECT_LT(lo, hi) << n << " " << bs << " " << i;
      }
}

TEST(BinomialTail, MatchesBigRationalSum) {
  const exact::cpp_rational p(7, 10);
  const double want = exact::to_double(exact::binom_tail(51, 96, p));
  EXPECT_NEAR(binomial_tail(51, 96, 0.7), want, 1e-13);
}

namespace {

// Brute force over all 2^(n1+n2) outcome vectors.
double enumerate_two_group(const TwoGroupSpec& s, int b) {
  const int n = s.total();
  double total = 0.0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) != b) continue;
    double w = 1.0;
    for (int i = 0; i < n; ++i) {
      const double p = i < s.n1 ? s.p1 : s.p2;
      w *= (mask >> i) & 1u ? p : 1.0 - p;
    }
    total += w;
  }
  return total;
}

} // namespace

TEST(TwoGroupPmf, HomogeneousCollapse) {
  const TwoGroupSpec s{7, 4, 0.63, 0.63};
  for (int b = 0; b <= 11; ++b) EXPECT_NEAR(two_group_pmf(s, b), binomial_pmf(11, b, 0.63), 1e-15);
}

TEST(TwoGroupPmf, DegenerateSecondGroup) {
  const TwoGroupSpec s{3, 2, 0.9, 0.0};
  EXPECT_EQ(two_group_pmf(s, 4), 0.0);
  EXPECT_NEAR(two_group_pmf(s, 2), binomial_pmf(3, 2, 0.9), 1e-15);
}

TEST(TwoGroupPmf, MatchesEnumeration) {
  const TwoGroupSpec s{3, 2, 0.7, 0.4};
  EXPECT_NEAR(two_group_pmf(s, 3), enumerate_two_group(s, 3), 1e-15);
  for (int n1 = 1; n1 <= 7; ++n1)
    for (int n2 = 0; n2 < n1 && n1 + n2 <= 12; ++n2)
      for (auto [p1, p2] : {std::pair{0.81, 0.2}, {0.5, 0.5}, {0.33, 0.0}}) {
        const TwoGroupSpec t{n1, n2, p1, p2};
        double sum = 0.0;
        for (int b = 0; b <= n1 + n2; ++b) {
          EXPECT_NEAR(two_group_pmf(t, b), enumerate_two_group(t, b), 1e-12);
          sum += two_group_pmf(t, b);
        }
        EXPECT_NEAR(sum, 1.0, 1e-12);
      }
}

TEST(TwoGroupPmf, Validation) {
  EXPECT_THROW(two_group_pmf({2, 3, 0.5, 0.5}, 1), DomainError);
  EXPECT_THROW(two_group_pmf({3, 2, 1.5, 0.5}, 1), DomainError);
  EXPECT_THROW(two_group_pmf({3, 2, 0.5, 0.5}, 6), DomainError);
}
