#pragma once

#include <memory>

#include "conlearn/slush_markov.hpp"

namespace conlearn {

/// Process-wide memo of absorption tables keyed by (n, k, alpha, f, clamp).
/// Concurrent readers never block each other; concurrent fills of the same
/// key may both compute, and the first insert wins.
std::shared_ptr<const AbsorptionTable> cached_absorption(const SlushParams& params, int f = 0,
                                                         bool clamp_top_death = false);

void clear_absorption_cache();

} // namespace conlearn
