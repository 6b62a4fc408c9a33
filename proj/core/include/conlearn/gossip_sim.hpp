#pragma once

// Round-based simulation of Slush over a concrete population of nodes.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "conlearn/rng.hpp"
#include "conlearn/slush_markov.hpp"

namespace conlearn {

enum class Behavior : std::uint8_t {
  honest,
  perfect_byzantine, ///< votes red and answers every query red; never queries
  faulty,            ///< keeps its initial vote, never answers or queries
  perfectly_faulty,  ///< faulty with a red initial vote
};

std::string to_string(Behavior behavior);

enum class Color : std::uint8_t { red = 0, blue = 1 };

struct NodeSpec {
  int id = 0;
  double accuracy = 0.5;
  Behavior behavior = Behavior::honest;
  std::optional<int> local_alpha;

  bool responsive() const {
    return behavior == Behavior::honest || behavior == Behavior::perfect_byzantine;
  }
  bool queries() const { return behavior == Behavior::honest; }
};

/// Blue is the correct class.
struct NetworkState {
  std::vector<Color> colors;
  long round = 0;
  Color truth = Color::blue;

  int count(Color c) const;
};

struct SimOptions {
  int rounds_per_node = 50;
  bool include_self = false; ///< let a querier draw itself as a peer
  bool record_trace = false;
};

struct SimOutcome {
  std::vector<Color> final_colors;
  bool consensus_reached = false; ///< all honest nodes agree
  bool correct = false;           ///< decision equals the truth
  Color decision = Color::red;    ///< consensus color, else honest plurality (ties red)
  long rounds_used = 0;
  long color_changes = 0;
  std::vector<int> trace; ///< honest blue count after each round, if requested
};

/// Honest and faulty nodes vote blue with probability p_i; byzantine and
/// perfectly faulty nodes vote red.
NetworkState initial_votes(const std::vector<NodeSpec>& nodes, Rng& rng);

/// Runs rounds_per_node global rounds; in each, every honest node queries k
/// distinct responsive peers in a fresh random order. Stops early once the
/// configuration is absorbing. Throws ConfigurationError when a querier has
/// fewer than k peers to draw from.
SimOutcome run_slush(const std::vector<NodeSpec>& nodes, const NetworkState& state,
                     const SlushParams& params, const SimOptions& options, Rng& rng);

/// local_alpha = clamp(ceil(k p), floor(k/2) + 1, k) for honest nodes with
/// p > 1/2; everyone else is left on the global threshold.
std::vector<NodeSpec> assign_strong_confidence(std::vector<NodeSpec> nodes,
                                               const SlushParams& params);

/// Plain majority over every node's initial vote. Pure; draws nothing.
Color majority_rule(const NetworkState& state);

/// n nodes with accuracy p; the first f_byzantine are perfectly byzantine,
/// the next f_faulty faulty (perfectly faulty when requested).
std::vector<NodeSpec> homogeneous_population(int n, double p, int f_byzantine = 0,
                                             int f_faulty = 0, bool perfectly_faulty = true);

/// Nodes with the given initial blue count: honest nodes 0..b-1 blue, the
/// rest red. Useful for absorption experiments.
NetworkState fixed_start(const std::vector<NodeSpec>& nodes, int blue);

} // namespace conlearn
