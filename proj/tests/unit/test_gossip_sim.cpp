#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>

#include "conlearn/combinatorics.hpp"
#include "conlearn/ensemble_analytics.hpp"
#include "conlearn/errors.hpp"
#include "conlearn/gossip_sim.hpp"

using namespace conlearn;

namespace {

double blue_frequency(const std::vector<NodeSpec>& nodes, const SlushParams& sp, int b, int runs,
                      std::uint64_t seed, SimOptions opt = {}) {
  const NetworkState start = fixed_start(nodes, b);
  int blue = 0;
  for (int r = 0; r < runs; ++r) {
    Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(b), static_cast<std::uint64_t>(r));
    const SimOutcome o = run_slush(nodes, start, sp, opt, rng);
    if (o.consensus_reached && o.decision == Color::blue) ++blue;
  }
  return static_cast<double>(blue) / runs;
}

} // namespace

TEST(Rng, DeterministicAndSplittable) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next(), b.next());
  Rng c = Rng::derive(1, 2, 3), d = Rng::derive(1, 2, 3), e = Rng::derive(1, 3, 2);
  EXPECT_EQ(c.next(), d.next());
  EXPECT_NE(Rng::derive(1, 2, 3).next(), e.next());
  Rng f(7);
  for (int i = 0; i < 10000; ++i) {
    const double u = f.uniform();
    ASSERT_TRUE(u >= 0.0 && u < 1.0);
    ASSERT_LT(f.below(13), 13u);
  }
  EXPECT_FALSE(f.bernoulli(0.0));
  EXPECT_TRUE(f.bernoulli(1.0));
  EXPECT_THROW(f.below(0), DomainError);
}

TEST(Rng, BoundedDrawsAreUniform) {
  Rng rng(2024);
  const int bins = 7, draws = 70000;
  std::vector<int> count(bins, 0);
  for (int i = 0; i < draws; ++i) ++count[rng.below(bins)];
  double chi = 0.0;
  for (int c : count) chi += (c - 10000.0) * (c - 10000.0) / 10000.0;
  const boost::math::chi_squared dist(bins - 1);
  EXPECT_LT(chi, quantile(dist, 0.99));
}

TEST(InitialVotes, Extremes) {
  Rng rng(1);
  const NetworkState all_blue = initial_votes(homogeneous_population(15, 1.0), rng);
  EXPECT_EQ(all_blue.count(Color::blue), 15);
  const NetworkState all_red = initial_votes(homogeneous_population(15, 1.0, 15), rng);
  EXPECT_EQ(all_red.count(Color::red), 15);
  const NetworkState pf = initial_votes(homogeneous_population(15, 1.0, 0, 4, true), rng);
  EXPECT_EQ(pf.count(Color::red), 4);
  const NetworkState fa = initial_votes(homogeneous_population(15, 1.0, 0, 4, false), rng);
  EXPECT_EQ(fa.count(Color::blue), 15);
}

TEST(InitialVotes, BlueCountIsBinomial) {
  const int n = 101, draws = 10000;
  const double p = 0.6;
  const auto nodes = homogeneous_population(n, p);
  std::vector<int> hist(n + 1, 0);
  Rng rng(99);
  for (int i = 0; i < draws; ++i) ++hist[initial_votes(nodes, rng).count(Color::blue)];

  // pool tails so every bin expects at least 5 draws
  std::vector<double> obs, expct;
  double o = 0, e = 0;
  for (int b = 0; b <= n; ++b) {
    o += hist[b];
    e += draws * binomial_pmf(n, b, p);
    if (e >= 5.0 && draws * binomial_tail(b + 1, n, p) >= 5.0) {
      obs.push_back(o);
      expct.push_back(e);
      o = e = 0;
    }
  }
  obs.back() += o;
  expct.back() += e;
  double chi = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i) chi += (obs[i] - expct[i]) * (obs[i] - expct[i]) / expct[i];
  const boost::math::chi_squared dist(static_cast<double>(obs.size() - 1));
  EXPECT_LT(chi, quantile(dist, 0.99)) << "bins=" << obs.size();
}

TEST(RunSlush, AllBlueIsAbsorbing) {
  const auto nodes = homogeneous_population(21, 0.9);
  Rng rng(3);
  const SimOutcome o = run_slush(nodes, fixed_start(nodes, 21), {21, 5, 4}, {}, rng);
  EXPECT_TRUE(o.consensus_reached);
  EXPECT_TRUE(o.correct);
  EXPECT_EQ(o.color_changes, 0);
  EXPECT_EQ(o.rounds_used, 0);
}

TEST(RunSlush, SingleSampleVoterMatchesLinearLaw) {
  const auto nodes = homogeneous_population(5, 0.5);
  SimOptions opt;
  opt.rounds_per_node = 1000;
  const double freq = blue_frequency(nodes, {5, 1, 1}, 3, 10000, 11, opt);
  EXPECT_NEAR(freq, 0.6, 0.02);
}

TEST(RunSlush, MatchesAbsorptionAtTwoStates) {
  const SlushParams sp{61, 10, 7};
  const AbsorptionTable t = absorption(sp);
  const auto nodes = homogeneous_population(61, 0.5);
  for (int b : {31, 35}) {
    const int runs = 4000;
    const double freq = blue_frequency(nodes, sp, b, runs, 5);
    const double sd = std::sqrt(t.blue(b) * (1 - t.blue(b)) / runs);
    EXPECT_NEAR(freq, t.blue(b), 4 * sd + 1e-3) << b;
  }
}

TEST(RunSlush, EnsembleAccuracyMatchesAnalytic) {
  const SlushParams sp{21, 5, 4};
  const double p = 0.6;
  const auto nodes = homogeneous_population(21, p);
  const int runs = 6000;
  int correct = 0;
  for (int r = 0; r < runs; ++r) {
    Rng rng = Rng::derive(77, r);
    const NetworkState s = initial_votes(nodes, rng);
    correct += run_slush(nodes, s, sp, {}, rng).correct;
  }
  const double want = slush_accuracy_homogeneous(sp, p);
  const double sd = std::sqrt(want * (1 - want) / runs);
  EXPECT_NEAR(correct / double(runs), want, 4 * sd);
}

TEST(RunSlush, Deterministic) {
  const auto nodes = homogeneous_population(41, 0.55, 2, 3, false);
  const SlushParams sp{41, 7, 5};
  SimOptions opt;
  opt.record_trace = true;
  Rng a(123), b(123);
  const NetworkState s1 = initial_votes(nodes, a);
  const NetworkState s2 = initial_votes(nodes, b);
  const SimOutcome o1 = run_slush(nodes, s1, sp, opt, a);
  const SimOutcome o2 = run_slush(nodes, s2, sp, opt, b);
  EXPECT_EQ(s1.colors, s2.colors);
  EXPECT_EQ(o1.final_colors, o2.final_colors);
  EXPECT_EQ(o1.trace, o2.trace);
  EXPECT_EQ(o1.rounds_used, o2.rounds_used);
  EXPECT_EQ(o1.color_changes, o2.color_changes);
}

TEST(RunSlush, FaultyNodesNeverRespondOrChange) {
  // Three blue faulty nodes would give any red querier two blue answers if
  // they were ever sampled.
  std::vector<NodeSpec> nodes = homogeneous_population(7, 0.5, 0, 3, false);
  NetworkState s;
  s.colors = {Color::blue, Color::blue, Color::blue, Color::red, Color::red, Color::red, Color::red};
  SimOptions opt;
  opt.rounds_per_node = 200;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const SimOutcome o = run_slush(nodes, s, {7, 2, 2}, opt, rng);
    for (int i = 0; i < 3; ++i) EXPECT_EQ(o.final_colors[i], Color::blue);
    for (int i = 3; i < 7; ++i) EXPECT_EQ(o.final_colors[i], Color::red);
    EXPECT_EQ(o.color_changes, 0);
  }
}

TEST(RunSlush, WeakAdversaryCannotFlipBlueNetwork) {
  const auto nodes = homogeneous_population(31, 0.9, 3);
  const NetworkState s = fixed_start(nodes, 28);
  SimOptions opt;
  opt.rounds_per_node = 20;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const SimOutcome o = run_slush(nodes, s, {31, 5, 4}, opt, rng);
    EXPECT_EQ(o.color_changes, 0);
    EXPECT_TRUE(o.correct);
  }
}

TEST(RunSlush, ConfigurationErrors) {
  const auto few = homogeneous_population(6, 0.5, 0, 3);
  Rng rng(1);
  EXPECT_THROW(run_slush(few, fixed_start(few, 1), {6, 3, 2}, {}, rng), ConfigurationError);
  auto nodes = homogeneous_population(11, 0.5);
  nodes[0].local_alpha = 2;
  EXPECT_THROW(run_slush(nodes, fixed_start(nodes, 5), {11, 4, 3}, {}, rng), ConfigurationError);
}

TEST(RunSlush, IncludeSelfToggleRuns) {
  const auto nodes = homogeneous_population(5, 0.5);
  SimOptions opt;
  opt.include_self = true;
  opt.rounds_per_node = 500;
  const double freq = blue_frequency(nodes, {5, 5, 3}, 3, 2000, 9, opt);
  EXPECT_GT(freq, 0.5);
}

TEST(StrongConfidence, ClampRule) {
  std::vector<NodeSpec> nodes(4);
  nodes[0].accuracy = 1.0;
  nodes[1].accuracy = 0.55;
  nodes[2].accuracy = 0.5;
  nodes[3].accuracy = 0.9;
  nodes[3].behavior = Behavior::perfect_byzantine;
  const auto out = assign_strong_confidence(nodes, {11, 10, 6});
  EXPECT_EQ(out[0].local_alpha, 10);
  EXPECT_EQ(out[1].local_alpha, 6);
  EXPECT_FALSE(out[2].local_alpha.has_value());
  EXPECT_FALSE(out[3].local_alpha.has_value());
  std::vector<NodeSpec> exact(1);
  exact[0].accuracy = 0.6;
  EXPECT_EQ(assign_strong_confidence(exact, {11, 10, 6})[0].local_alpha, 6);
}

TEST(MajorityRule, CountsEveryInitialVote) {
  NetworkState s;
  s.colors = {Color::blue, Color::blue, Color::red};
  EXPECT_EQ(majority_rule(s), Color::blue);
  s.colors.push_back(Color::red);
  EXPECT_EQ(majority_rule(s), Color::red);
}
