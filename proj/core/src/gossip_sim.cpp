#include "conlearn/gossip_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "conlearn/errors.hpp"

namespace conlearn {

std::string to_string(Behavior behavior) {
  switch (behavior) {
  case Behavior::honest: return "honest";
  case Behavior::perfect_byzantine: return "perfect-byzantine";
  case Behavior::faulty: return "faulty";
  case Behavior::perfectly_faulty: return "perfectly-faulty";
  }
  return "unknown";
}

int NetworkState::count(Color c) const {
  return static_cast<int>(std::count(colors.begin(), colors.end(), c));
}

NetworkState initial_votes(const std::vector<NodeSpec>& nodes, Rng& rng) {
  NetworkState state;
  state.colors.reserve(nodes.size());
  for (const NodeSpec& node : nodes) {
    switch (node.behavior) {
    case Behavior::honest:
    case Behavior::faulty:
      state.colors.push_back(rng.bernoulli(node.accuracy) ? Color::blue : Color::red);
      break;
    case Behavior::perfect_byzantine:
    case Behavior::perfectly_faulty:
      state.colors.push_back(Color::red);
      break;
    }
  }
  return state;
}

NetworkState fixed_start(const std::vector<NodeSpec>& nodes, int blue) {
  NetworkState state;
  state.colors.assign(nodes.size(), Color::red);
  int left = blue;
  for (std::size_t i = 0; i < nodes.size() && left > 0; ++i) {
    if (nodes[i].behavior != Behavior::honest) continue;
    state.colors[i] = Color::blue;
    --left;
  }
  if (left > 0) throw DomainError("more blue nodes requested than honest nodes");
  return state;
}

namespace {

void shuffle(std::vector<int>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(v[i - 1], v[j]);
  }
}

} // namespace

SimOutcome run_slush(const std::vector<NodeSpec>& nodes, const NetworkState& state,
                     const SlushParams& params, const SimOptions& options, Rng& rng) {
  params.validate();
  const int n = static_cast<int>(nodes.size());
  if (n == 0) throw ConfigurationError("empty population");
  if (static_cast<int>(state.colors.size()) != n)
    throw ConfigurationError("state and population sizes differ");
  if (options.rounds_per_node < 0) throw ConfigurationError("rounds_per_node must be >= 0");
  const int k = params.k;

  std::vector<int> alpha(n, params.alpha);
  std::vector<int> pool;      // responsive nodes, permuted in place by sampling
  std::vector<int> pos(n, -1); // index of each node within pool
  std::vector<int> active;    // honest queriers
  int byzantine = 0;
  for (int i = 0; i < n; ++i) {
    const NodeSpec& node = nodes[i];
    if (node.local_alpha) {
      if (*node.local_alpha <= k / 2 || *node.local_alpha > k)
        throw ConfigurationError("local_alpha of node " + std::to_string(node.id) +
                                 " outside (floor(k/2), k]");
      alpha[i] = *node.local_alpha;
    }
    if (node.responsive()) {
      pos[i] = static_cast<int>(pool.size());
      pool.push_back(i);
    }
    if (node.queries()) active.push_back(i);
    if (node.behavior == Behavior::perfect_byzantine) ++byzantine;
  }
  const int peers = static_cast<int>(pool.size()) - (options.include_self ? 0 : 1);
  if (!active.empty() && peers < k)
    throw ConfigurationError("only " + std::to_string(peers) +
                             " responsive peers available for k=" + std::to_string(k));

  SimOutcome out;
  out.final_colors = state.colors;
  std::vector<Color>& colors = out.final_colors;
  for (int i = 0; i < n; ++i)
    if (nodes[i].behavior == Behavior::perfect_byzantine) colors[i] = Color::red;

  const int honest = static_cast<int>(active.size());
  int min_alpha = std::numeric_limits<int>::max();
  int honest_blue = 0;
  for (int i : active) {
    min_alpha = std::min(min_alpha, alpha[i]);
    if (colors[i] == Color::blue) ++honest_blue;
  }
  // All honest red is absorbing; all honest blue is too when the byzantine
  // nodes together cannot supply any querier's threshold.
  const auto absorbing = [&] {
    return honest_blue == 0 || (honest_blue == honest && byzantine < min_alpha);
  };

  const int m = static_cast<int>(pool.size());
  std::vector<int> order = active;
  bool done = honest == 0 || absorbing();
  for (int r = 0; r < options.rounds_per_node && !done; ++r) {
    shuffle(order, rng);
    for (int q : order) {
      int limit = m;
      if (!options.include_self) {
        // park the querier at the end so it is never drawn
        const int last = pool[m - 1];
        std::swap(pool[pos[q]], pool[m - 1]);
        std::swap(pos[q], pos[last]);
        limit = m - 1;
      }
      int blues = 0;
      for (int j = 0; j < k; ++j) {
        const int pick = j + static_cast<int>(rng.below(static_cast<std::uint64_t>(limit - j)));
        const int a = pool[j];
        const int b = pool[pick];
        std::swap(pool[j], pool[pick]);
        std::swap(pos[a], pos[b]);
        if (colors[pool[j]] == Color::blue) ++blues;
      }
      const int reds = k - blues;
      Color next = colors[q];
      if (blues >= alpha[q]) {
        next = Color::blue;
      } else if (reds >= alpha[q]) {
        next = Color::red;
      }
      if (next != colors[q]) {
        colors[q] = next;
        ++out.color_changes;
        honest_blue += next == Color::blue ? 1 : -1;
      }
      if (absorbing()) {
        done = true;
        break;
      }
    }
    ++out.rounds_used;
    if (options.record_trace) out.trace.push_back(honest_blue);
  }

  out.consensus_reached = honest == 0 || honest_blue == 0 || honest_blue == honest;
  if (honest > 0 && honest_blue == honest) {
    out.decision = Color::blue;
  } else if (honest_blue == 0) {
    out.decision = Color::red;
  } else {
    out.decision = 2 * honest_blue > honest ? Color::blue : Color::red;
  }
  out.correct = out.decision == state.truth;
  return out;
}

std::vector<NodeSpec> assign_strong_confidence(std::vector<NodeSpec> nodes,
                                               const SlushParams& params) {
  params.validate();
  const int k = params.k;
  for (NodeSpec& node : nodes) {
    if (node.behavior != Behavior::honest || !(node.accuracy > 0.5)) continue;
    const int wanted = static_cast<int>(std::ceil(k * node.accuracy - 1e-9));
    node.local_alpha = std::clamp(wanted, k / 2 + 1, k);
  }
  return nodes;
}

Color majority_rule(const NetworkState& state) {
  const int blue = state.count(Color::blue);
  return 2 * blue > static_cast<int>(state.colors.size()) ? Color::blue : Color::red;
}

std::vector<NodeSpec> homogeneous_population(int n, double p, int f_byzantine, int f_faulty,
                                             bool perfectly_faulty) {
  if (n < 1) throw DomainError("population needs at least one node");
  if (f_byzantine < 0 || f_faulty < 0 || f_byzantine + f_faulty > n)
    throw DomainError("byzantine and faulty counts must fit in the population");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("accuracy must lie in [0, 1]");
  std::vector<NodeSpec> nodes(n);
  for (int i = 0; i < n; ++i) {
    nodes[i].id = i;
    nodes[i].accuracy = p;
    if (i < f_byzantine) {
      nodes[i].behavior = Behavior::perfect_byzantine;
    } else if (i < f_byzantine + f_faulty) {
      nodes[i].behavior = perfectly_faulty ? Behavior::perfectly_faulty : Behavior::faulty;
    }
  }
  return nodes;
}

} // namespace conlearn
