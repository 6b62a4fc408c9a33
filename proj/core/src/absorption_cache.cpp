#include "conlearn/absorption_cache.hpp"

#include <map>
#include <mutex>
#include <shared_mutex>
#include <tuple>

namespace conlearn {

namespace {

using Key = std::tuple<int, int, int, int, bool>;

struct Cache {
  std::shared_mutex mutex;
  std::map<Key, std::shared_ptr<const AbsorptionTable>> tables;
};

Cache& cache() {
  static Cache instance;
  return instance;
}

} // namespace

std::shared_ptr<const AbsorptionTable> cached_absorption(const SlushParams& params, int f,
                                                         bool clamp_top_death) {
  const Key key{params.n, params.k, params.alpha, f, clamp_top_death};
  auto& c = cache();
  {
    std::shared_lock lock(c.mutex);
    if (auto it = c.tables.find(key); it != c.tables.end()) return it->second;
  }
  auto table = std::make_shared<const AbsorptionTable>(
      absorption(params, ByzantineConfig{f, 0}, RateOptions{clamp_top_death}));
  std::unique_lock lock(c.mutex);
  auto [it, inserted] = c.tables.emplace(key, std::move(table));
  return it->second;
}

void clear_absorption_cache() {
  auto& c = cache();
  std::unique_lock lock(c.mutex);
  c.tables.clear();
}

} // namespace conlearn
