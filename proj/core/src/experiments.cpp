#include "conlearn/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "conlearn/errors.hpp"

namespace conlearn {

std::string to_string(ByzantineSelection selection) {
  switch (selection) {
  case ByzantineSelection::random: return "random";
  case ByzantineSelection::strongest: return "strongest";
  case ByzantineSelection::weakest: return "weakest";
  case ByzantineSelection::representative: return "representative";
  }
  return "unknown";
}

ByzantineSelection parse_byzantine_selection(const std::string& name) {
  for (auto s : {ByzantineSelection::random, ByzantineSelection::strongest,
                 ByzantineSelection::weakest, ByzantineSelection::representative})
    if (to_string(s) == name) return s;
  throw ConfigurationError("unknown byzantine selection '" + name + "'");
}

std::string to_string(Rule rule) {
  switch (rule) {
  case Rule::majority: return "majority";
  case Rule::slush: return "slush";
  case Rule::slush_local: return "slush_local";
  }
  return "unknown";
}

std::string to_string(CellStatus status) {
  switch (status) {
  case CellStatus::ok: return "ok";
  case CellStatus::infeasible_moments: return "infeasible-moments";
  case CellStatus::unsupported: return "unsupported";
  case CellStatus::failed: return "failed";
  }
  return "unknown";
}

std::vector<int> select_byzantine(std::span<const double> accuracies, int f,
                                  ByzantineSelection selection, Rng& rng) {
  const int n = static_cast<int>(accuracies.size());
  if (f < 0 || f > n) throw DomainError("cannot select f nodes out of n");
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  if (f == 0) return {};
  if (selection == ByzantineSelection::random) {
    for (int j = 0; j < f; ++j) {
      const int pick = j + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - j)));
      std::swap(idx[j], idx[pick]);
    }
    idx.resize(f);
    std::sort(idx.begin(), idx.end());
    return idx;
  }
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return accuracies[a] < accuracies[b]; });
  std::vector<int> out;
  out.reserve(f);
  switch (selection) {
  case ByzantineSelection::weakest:
    out.assign(idx.begin(), idx.begin() + f);
    break;
  case ByzantineSelection::strongest:
    out.assign(idx.end() - f, idx.end());
    break;
  case ByzantineSelection::representative:
    for (int j = 0; j < f; ++j) {
      const auto rank = static_cast<int>(std::floor((j + 0.5) * n / f));
      out.push_back(idx[std::min(rank, n - 1)]);
    }
    break;
  case ByzantineSelection::random:
    break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

void SweepConfig::validate() const {
  try {
    params.validate();
  } catch (const DomainError& e) {
    throw ConfigurationError(std::string("protocol: ") + e.what());
  }
  if (n_learners != params.n)
    throw ConfigurationError("population.n_learners must equal protocol.n");
  if (n_learners % 2 == 0) throw ConfigurationError("protocol.n must be odd");
  if (N1 < 1) throw ConfigurationError("sweep.N1 must be >= 1");
  if (N2 < 1) throw ConfigurationError("sweep.N2 must be >= 1");
  if (rounds_per_node < 0) throw ConfigurationError("sweep.rounds_per_node must be >= 0");
  if (mean_grid.empty()) throw ConfigurationError("population.mean_grid must be nonempty");
  if (variance_grid.empty()) throw ConfigurationError("population.variance_grid must be nonempty");
  for (double m : mean_grid)
    if (!(m >= 0.0 && m <= 1.0)) throw ConfigurationError("population.mean_grid entries must lie in [0, 1]");
  for (double v : variance_grid)
    if (!(v >= 0.0 && v < 0.25)) throw ConfigurationError("population.variance_grid entries must lie in [0, 0.25)");
  if (byzantine_counts.empty()) throw ConfigurationError("sweep.byzantine_counts must be nonempty");
  for (int f : byzantine_counts)
    if (f < 0 || 2 * f >= n_learners)
      throw ConfigurationError("sweep.byzantine_counts entries must lie in [0, n/2)");
  if (threads < 0) throw ConfigurationError("threads must be >= 0");
}

SamplingError sampling_error_bracket(int n_test_samples, int N) {
  if (n_test_samples < 1 || N < 1) throw DomainError("sampling error needs positive counts");
  SamplingError e;
  e.upper = 1.0 / n_test_samples;
  e.lower = e.upper / std::sqrt(static_cast<double>(N));
  e.estimate = e.raw = e.upper;
  return e;
}

SamplingError sampling_error(std::span<const std::vector<std::uint8_t>> replicate_outcomes,
                             int n_test_samples) {
  const int N = static_cast<int>(replicate_outcomes.size());
  SamplingError e = sampling_error_bracket(n_test_samples, std::max(N, 1));
  if (N == 0) return e;
  const std::size_t len = replicate_outcomes[0].size();
  for (const auto& row : replicate_outcomes)
    if (row.size() != len) throw DomainError("replicate outcome vectors differ in length");

  std::vector<double> mean(N, 0.0), sd(N, 0.0);
  for (int i = 0; i < N; ++i) {
    const auto& row = replicate_outcomes[i];
    double s = 0.0;
    for (auto v : row) s += v;
    mean[i] = len ? s / static_cast<double>(len) : 0.0;
    double ss = 0.0;
    for (auto v : row) ss += (v - mean[i]) * (v - mean[i]);
    sd[i] = std::sqrt(ss);
  }
  double total = 0.0;
  for (int i = 0; i < N; ++i) {
    total += 1.0;
    for (int j = i + 1; j < N; ++j) {
      double rho = 0.0;
      if (sd[i] == 0.0 || sd[j] == 0.0) {
        rho = replicate_outcomes[i] == replicate_outcomes[j] ? 1.0 : 0.0;
      } else {
        double c = 0.0;
        for (std::size_t t = 0; t < len; ++t)
          c += (replicate_outcomes[i][t] - mean[i]) * (replicate_outcomes[j][t] - mean[j]);
        rho = c / (sd[i] * sd[j]);
      }
      total += 2.0 * rho;
    }
  }
  e.raw = e.upper * std::sqrt(std::max(total, 0.0)) / N;
  e.estimate = std::clamp(e.raw, e.lower, e.upper);
  return e;
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  const int workers = std::min<std::size_t>(resolve_threads(threads), std::max<std::size_t>(count, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

namespace {

struct CellPlan {
  double mean;
  double variance;
  int f;
  bool run_majority;
  bool run_global;
  bool run_local;
};

ReplicateRecord run_replicate(const SweepConfig& cfg, const CellPlan& plan, const BetaSpec& beta,
                              std::size_t cell, int replicate) {
  Rng rng = Rng::derive(cfg.seed, cell, static_cast<std::uint64_t>(replicate));
  const std::vector<double> acc = sample_accuracies(beta, cfg.n_learners, rng);

  std::vector<NodeSpec> nodes(cfg.n_learners);
  for (int i = 0; i < cfg.n_learners; ++i) {
    nodes[i].id = i;
    nodes[i].accuracy = acc[i];
  }
  for (int i : select_byzantine(acc, plan.f, cfg.byzantine_selection, rng))
    nodes[i].behavior = Behavior::perfect_byzantine;
  const std::vector<NodeSpec> local_nodes =
      plan.run_local ? assign_strong_confidence(nodes, cfg.params) : std::vector<NodeSpec>{};

  SimOptions options;
  options.rounds_per_node = cfg.rounds_per_node;
  options.include_self = cfg.include_self;

  ReplicateRecord rec;
  rec.index = replicate;
  rec.population_mean = std::accumulate(acc.begin(), acc.end(), 0.0) / cfg.n_learners;
  const std::array<bool, rule_count> active{plan.run_majority, plan.run_global, plan.run_local};
  for (std::size_t r = 0; r < rule_count; ++r)
    if (active[r]) rec.outcomes[r].reserve(cfg.N1);

  for (int t = 0; t < cfg.N1; ++t) {
    Rng profile_rng = rng.split();
    Rng global_rng = rng.split();
    Rng local_rng = rng.split();
    const NetworkState state = initial_votes(nodes, profile_rng);
    if (plan.run_majority)
      rec.outcomes[0].push_back(majority_rule(state) == state.truth ? 1 : 0);
    if (plan.run_global)
      rec.outcomes[1].push_back(run_slush(nodes, state, cfg.params, options, global_rng).correct);
    if (plan.run_local)
      rec.outcomes[2].push_back(
          run_slush(local_nodes, state, cfg.params, options, local_rng).correct);
  }
  for (std::size_t r = 0; r < rule_count; ++r) {
    if (!active[r]) continue;
    const auto& o = rec.outcomes[r];
    rec.accuracy[r] = static_cast<double>(std::accumulate(o.begin(), o.end(), 0)) / cfg.N1;
  }
  return rec;
}

SweepResult run_sweep(const SweepConfig& cfg, std::string kind, std::vector<CellPlan> plans) {
  cfg.validate();
  SweepResult result;
  result.kind = std::move(kind);
  result.config = cfg;
  result.cells.resize(plans.size());

  std::vector<std::size_t> runnable;
  for (std::size_t c = 0; c < plans.size(); ++c) {
    CellResult& cell = result.cells[c];
    const CellPlan& plan = plans[c];
    cell.index = static_cast<int>(c);
    cell.mean = plan.mean;
    cell.variance = plan.variance;
    cell.f = plan.f;
    try {
      cell.beta = BetaSpec::from_moments(plan.mean, plan.variance);
      if (cfg.require_concave && !cell.beta.concave())
        throw DomainError("beta density is not concave (a, b must exceed 1)");
    } catch (const DomainError& e) {
      cell.status = CellStatus::infeasible_moments;
      cell.message = e.what();
      continue;
    }
    if (plan.f >= cfg.params.alpha && !cfg.allow_f_at_least_alpha) {
      cell.status = CellStatus::unsupported;
      cell.message = "f=" + std::to_string(plan.f) + " >= alpha=" + std::to_string(cfg.params.alpha);
      continue;
    }
    cell.replicates.resize(cfg.N2);
    runnable.push_back(c);
  }

  const std::size_t tasks = runnable.size() * static_cast<std::size_t>(cfg.N2);
  std::vector<std::string> errors(plans.size());
  std::mutex errors_mutex;
  parallel_for(tasks, cfg.threads, [&](std::size_t task) {
    const std::size_t c = runnable[task / cfg.N2];
    const int replicate = static_cast<int>(task % cfg.N2);
    try {
      result.cells[c].replicates[replicate] =
          run_replicate(cfg, plans[c], result.cells[c].beta, c, replicate);
    } catch (const std::exception& e) {
      std::lock_guard lock(errors_mutex);
      if (errors[c].empty()) errors[c] = e.what();
    }
  });

  for (std::size_t c : runnable) {
    CellResult& cell = result.cells[c];
    if (!errors[c].empty()) {
      cell.status = CellStatus::failed;
      cell.message = errors[c];
      cell.replicates.clear();
      continue;
    }
    const std::array<bool, rule_count> active{plans[c].run_majority, plans[c].run_global,
                                              plans[c].run_local};
    for (std::size_t r = 0; r < rule_count; ++r) {
      if (!active[r]) continue;
      MethodStats& m = cell.methods[r];
      m.evaluated = true;
      std::vector<std::vector<std::uint8_t>> rows;
      rows.reserve(cell.replicates.size());
      double sum = 0.0;
      for (const ReplicateRecord& rec : cell.replicates) {
        sum += rec.accuracy[r];
        rows.push_back(rec.outcomes[r]);
      }
      m.accuracy = sum / static_cast<double>(cell.replicates.size());
      m.error = sampling_error(rows, cfg.N1);
    }
  }
  return result;
}

} // namespace

SweepResult beta_sweep(const SweepConfig& config) {
  std::vector<CellPlan> plans;
  for (double m : config.mean_grid)
    for (double v : config.variance_grid)
      plans.push_back({m, v, 0, true, !config.local_alpha, config.local_alpha});
  return run_sweep(config, "beta", std::move(plans));
}

SweepResult byzantine_sweep(const SweepConfig& config) {
  std::vector<CellPlan> plans;
  for (double m : config.mean_grid)
    for (double v : config.variance_grid)
      for (int f : config.byzantine_counts) plans.push_back({m, v, f, true, true, true});
  return run_sweep(config, "byzantine", std::move(plans));
}

} // namespace conlearn
