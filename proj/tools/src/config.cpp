#include "conlearn_cli/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "conlearn/errors.hpp"

namespace conlearn::cli {

namespace {

Json scalar_to_json(const YAML::Node& node) {
  const std::string& text = node.Scalar();
  if (node.Tag() == "!") return text; // quoted
  long long i = 0;
  if (YAML::convert<long long>::decode(node, i)) return i;
  unsigned long long u = 0;
  if (YAML::convert<unsigned long long>::decode(node, u)) return u;
  double d = 0.0;
  if (YAML::convert<double>::decode(node, d)) return d;
  bool b = false;
  if (YAML::convert<bool>::decode(node, b)) return b;
  if (text == "~" || text == "null") return nullptr;
  return text;
}

Json yaml_to_json(const YAML::Node& node) {
  switch (node.Type()) {
  case YAML::NodeType::Null:
  case YAML::NodeType::Undefined:
    return nullptr;
  case YAML::NodeType::Scalar:
    return scalar_to_json(node);
  case YAML::NodeType::Sequence: {
    Json out = Json::array();
    for (const auto& item : node) out.push_back(yaml_to_json(item));
    return out;
  }
  case YAML::NodeType::Map: {
    Json out = Json::object();
    for (const auto& kv : node) out[kv.first.as<std::string>()] = yaml_to_json(kv.second);
    return out;
  }
  }
  return nullptr;
}

// Collects every problem instead of stopping at the first one.
class Reader {
public:
  explicit Reader(std::vector<std::string>& errors) : errors_(errors) {}

  void fail(const std::string& path, const std::string& what) { errors_.push_back(path + ": " + what); }

  const Json* section(const Json& tree, const std::string& key,
                      std::initializer_list<const char*> allowed) {
    if (!tree.contains(key) || tree[key].is_null()) return nullptr;
    const Json& s = tree[key];
    if (!s.is_object()) {
      fail(key, "must be a mapping");
      return nullptr;
    }
    check_keys(s, key, allowed);
    return &s;
  }

  void check_keys(const Json& obj, const std::string& path,
                  std::initializer_list<const char*> allowed) {
    const std::set<std::string> known(allowed.begin(), allowed.end());
    for (const auto& [k, v] : obj.items())
      if (!known.count(k)) fail(path.empty() ? k : path + "." + k, "unknown key");
  }

  void read(const Json* obj, const std::string& path, const char* key, int& out) {
    if (!obj || !obj->contains(key)) return;
    const Json& v = (*obj)[key];
    if (!v.is_number_integer()) return fail(path + "." + key, "must be an integer");
    const auto x = v.get<long long>();
    if (x < INT32_MIN || x > INT32_MAX) return fail(path + "." + key, "out of range");
    out = static_cast<int>(x);
  }
  void read(const Json* obj, const std::string& path, const char* key, double& out) {
    if (!obj || !obj->contains(key)) return;
    const Json& v = (*obj)[key];
    if (!v.is_number()) return fail(path + "." + key, "must be a number");
    out = v.get<double>();
  }
  void read(const Json* obj, const std::string& path, const char* key, bool& out) {
    if (!obj || !obj->contains(key)) return;
    const Json& v = (*obj)[key];
    if (!v.is_boolean()) return fail(path + "." + key, "must be true or false");
    out = v.get<bool>();
  }
  void read(const Json* obj, const std::string& path, const char* key, std::string& out) {
    if (!obj || !obj->contains(key)) return;
    const Json& v = (*obj)[key];
    if (!v.is_string()) return fail(path + "." + key, "must be a string");
    out = v.get<std::string>();
  }
  template <class T>
  void read(const Json* obj, const std::string& path, const char* key, std::vector<T>& out) {
    if (!obj || !obj->contains(key)) return;
    const Json& v = (*obj)[key];
    const std::string where = path + "." + key;
    std::vector<T> result;
    const auto take = [&](const Json& x, const std::string& p) {
      if constexpr (std::is_same_v<T, int>) {
        if (!x.is_number_integer()) return fail(p, "must be an integer");
        result.push_back(x.get<int>());
      } else {
        if (!x.is_number()) return fail(p, "must be a number");
        result.push_back(x.get<double>());
      }
    };
    if (v.is_array()) {
      for (std::size_t i = 0; i < v.size(); ++i) take(v[i], where + "[" + std::to_string(i) + "]");
    } else if constexpr (std::is_same_v<T, double>) {
      if (v.is_object()) {
        // {start, stop, step}, inclusive of stop up to rounding
        double start = 0, stop = 0, step = 0;
        check_keys(v, where, {"start", "stop", "step"});
        read(&v, where, "start", start);
        read(&v, where, "stop", stop);
        read(&v, where, "step", step);
        if (!(step > 0.0)) return fail(where + ".step", "must be positive");
        if (stop < start) return fail(where, "stop must not be below start");
        const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9));
        if (count > 1000000) return fail(where, "grid too large");
        for (long i = 0; i <= count; ++i) result.push_back(start + static_cast<double>(i) * step);
      } else {
        take(v, where);
      }
    } else {
      take(v, where);
    }
    out = std::move(result);
  }

private:
  std::vector<std::string>& errors_;
};

std::vector<Json> as_list(const Json& v) {
  if (v.is_array()) return std::vector<Json>(v.begin(), v.end());
  return {v};
}

} // namespace

Json yaml_text_to_json(const std::string& text) {
  try {
    const YAML::Node root = YAML::Load(text);
    Json tree = yaml_to_json(root);
    if (tree.is_null()) tree = Json::object();
    if (!tree.is_object()) throw ConfigurationError("config: top level must be a mapping");
    return tree;
  } catch (const YAML::Exception& e) {
    throw ConfigurationError(std::string("config: ") + e.what());
  }
}

Json load_config_tree(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return yaml_text_to_json(buf.str());
}

void set_path(Json& tree, const std::vector<std::string>& path, Json value) {
  Json* node = &tree;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    Json& next = (*node)[path[i]];
    if (!next.is_object()) next = Json::object();
    node = &next;
  }
  (*node)[path.back()] = std::move(value);
}

std::vector<ThresholdEntry> expand_queries(const Json& queries, const ProtocolSection& defaults,
                                           std::vector<std::string>& errors) {
  Reader r(errors);
  std::vector<ThresholdEntry> out;
  if (!queries.is_array()) {
    r.fail("sweep.queries", "must be a list");
    return out;
  }
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const std::string where = "sweep.queries[" + std::to_string(i) + "]";
    const Json& q = queries[i];
    if (!q.is_object()) {
      r.fail(where, "must be a mapping");
      continue;
    }
    r.check_keys(q, where, {"n", "k", "alpha", "delta", "q", "f", "f_faulty"});
    if (q.contains("delta") == q.contains("q")) {
      r.fail(where, "set exactly one of delta and q");
      continue;
    }
    const auto field = [&](const char* key, Json fallback) {
      return q.contains(key) ? as_list(q[key]) : std::vector<Json>{std::move(fallback)};
    };
    const auto ns = field("n", defaults.n);
    const auto ks = field("k", defaults.k);
    const auto as = field("alpha", defaults.alpha);
    const auto ds = field(q.contains("delta") ? "delta" : "q", nullptr);
    const auto fs = field("f", 0);
    const auto ffs = field("f_faulty", 0);
    bool ok = true;
    const auto check_int = [&](const std::vector<Json>& v, const char* key) {
      for (const Json& x : v)
        if (!x.is_number_integer()) {
          r.fail(where + "." + key, "must be an integer or a list of integers");
          ok = false;
        }
    };
    check_int(ns, "n");
    check_int(ks, "k");
    check_int(as, "alpha");
    check_int(fs, "f");
    check_int(ffs, "f_faulty");
    if (q.contains("delta")) {
      check_int(ds, "delta");
    } else {
      for (const Json& x : ds)
        if (!x.is_number()) {
          r.fail(where + ".q", "must be a number or a list of numbers");
          ok = false;
        }
    }
    if (!ok) continue;
    for (const Json& n : ns)
      for (const Json& k : ks)
        for (const Json& a : as)
          for (const Json& f : fs)
            for (const Json& ff : ffs)
              for (const Json& d : ds) {
                ThresholdEntry e;
                e.n = n.get<int>();
                e.k = k.get<int>();
                e.alpha = a.get<int>();
                e.f = f.get<int>();
                e.f_faulty = ff.get<int>();
                if (q.contains("delta")) {
                  e.delta = d.get<int>();
                } else {
                  e.q = d.get<double>();
                }
                out.push_back(e);
              }
  }
  return out;
}

Config config_from_json(const Json& tree) {
  std::vector<std::string> errors;
  Reader r(errors);
  Config c;
  if (!tree.is_object()) throw ConfigurationError("config: top level must be a mapping");
  r.check_keys(tree, "", {"command", "seed", "protocol", "population", "sweep", "output"});

  if (tree.contains("command")) {
    if (tree["command"].is_string()) {
      c.command = tree["command"].get<std::string>();
    } else {
      r.fail("command", "must be a string");
    }
  }
  if (tree.contains("seed")) {
    const Json& s = tree["seed"];
    if (s.is_number_unsigned()) {
      c.seed = s.get<std::uint64_t>();
    } else if (s.is_number_integer() && s.get<long long>() >= 0) {
      c.seed = static_cast<std::uint64_t>(s.get<long long>());
    } else {
      r.fail("seed", "must be a non-negative integer");
    }
  }

  const Json* p = r.section(tree, "protocol", {"n", "k", "alpha", "f", "clamp_top_death"});
  r.read(p, "protocol", "n", c.protocol.n);
  r.read(p, "protocol", "k", c.protocol.k);
  r.read(p, "protocol", "alpha", c.protocol.alpha);
  r.read(p, "protocol", "f", c.protocol.f);
  r.read(p, "protocol", "clamp_top_death", c.protocol.clamp_top_death);

  const Json* pop = r.section(tree, "population", {"mean_grid", "variance_grid", "require_concave"});
  r.read(pop, "population", "mean_grid", c.population.mean_grid);
  r.read(pop, "population", "variance_grid", c.population.variance_grid);
  r.read(pop, "population", "require_concave", c.population.require_concave);

  const Json* sw = r.section(tree, "sweep",
                             {"kind", "N1", "N2", "rounds_per_node", "local_alpha", "include_self",
                              "byzantine_counts", "byzantine_selection", "allow_f_at_least_alpha",
                              "p_grid", "delta", "queries", "tolerance"});
  SweepSection& s = c.sweep;
  r.read(sw, "sweep", "kind", s.kind);
  r.read(sw, "sweep", "N1", s.N1);
  r.read(sw, "sweep", "N2", s.N2);
  r.read(sw, "sweep", "rounds_per_node", s.rounds_per_node);
  r.read(sw, "sweep", "local_alpha", s.local_alpha);
  r.read(sw, "sweep", "include_self", s.include_self);
  r.read(sw, "sweep", "byzantine_counts", s.byzantine_counts);
  r.read(sw, "sweep", "byzantine_selection", s.byzantine_selection);
  r.read(sw, "sweep", "allow_f_at_least_alpha", s.allow_f_at_least_alpha);
  r.read(sw, "sweep", "p_grid", s.p_grid);
  r.read(sw, "sweep", "delta", s.delta);
  r.read(sw, "sweep", "tolerance", s.tolerance);
  if (sw && sw->contains("queries")) s.queries = expand_queries((*sw)["queries"], c.protocol, errors);

  const Json* out = r.section(tree, "output", {"format", "path"});
  r.read(out, "output", "format", c.output.format);
  r.read(out, "output", "path", c.output.path);

  // Semantic checks that do not depend on the command.
  if (c.output.format != "csv" && c.output.format != "json")
    r.fail("output.format", "must be csv or json");
  if (s.kind != "beta" && s.kind != "byzantine") r.fail("sweep.kind", "must be beta or byzantine");
  try {
    parse_byzantine_selection(s.byzantine_selection);
  } catch (const ConfigurationError&) {
    r.fail("sweep.byzantine_selection", "must be random, strongest, weakest or representative");
  }
  if (!(s.tolerance > 0.0 && s.tolerance < 0.5)) r.fail("sweep.tolerance", "must lie in (0, 0.5)");
  if (s.delta < 0) r.fail("sweep.delta", "must be non-negative");
  if (c.protocol.f < 0) r.fail("protocol.f", "must be non-negative");
  for (std::size_t i = 0; i < s.p_grid.size(); ++i) {
    if (!(s.p_grid[i] >= 0.0 && s.p_grid[i] <= 1.0))
      r.fail("sweep.p_grid[" + std::to_string(i) + "]", "must lie in [0, 1]");
    if (i > 0 && !(s.p_grid[i] > s.p_grid[i - 1]))
      r.fail("sweep.p_grid[" + std::to_string(i) + "]", "grid must be strictly increasing");
  }
  if (!c.command.empty() && c.command != "absorb" && c.command != "accuracy" &&
      c.command != "threshold" && c.command != "simulate")
    r.fail("command", "must be absorb, accuracy, threshold or simulate");

  if (!errors.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ConfigurationError(msg);
  }
  return c;
}

Json config_to_json(const Config& c) {
  Json queries = Json::array();
  for (const ThresholdEntry& e : c.sweep.queries) {
    Json q = {{"n", e.n}, {"k", e.k}, {"alpha", e.alpha}, {"f", e.f}, {"f_faulty", e.f_faulty}};
    if (e.delta) q["delta"] = *e.delta;
    if (e.q) q["q"] = *e.q;
    queries.push_back(std::move(q));
  }
  return Json{
      {"command", c.command},
      {"seed", c.seed},
      {"protocol",
       {{"n", c.protocol.n},
        {"k", c.protocol.k},
        {"alpha", c.protocol.alpha},
        {"f", c.protocol.f},
        {"clamp_top_death", c.protocol.clamp_top_death}}},
      {"population",
       {{"mean_grid", c.population.mean_grid},
        {"variance_grid", c.population.variance_grid},
        {"require_concave", c.population.require_concave}}},
      {"sweep",
       {{"kind", c.sweep.kind},
        {"N1", c.sweep.N1},
        {"N2", c.sweep.N2},
        {"rounds_per_node", c.sweep.rounds_per_node},
        {"local_alpha", c.sweep.local_alpha},
        {"include_self", c.sweep.include_self},
        {"byzantine_counts", c.sweep.byzantine_counts},
        {"byzantine_selection", c.sweep.byzantine_selection},
        {"allow_f_at_least_alpha", c.sweep.allow_f_at_least_alpha},
        {"p_grid", c.sweep.p_grid},
        {"delta", c.sweep.delta},
        {"queries", queries},
        {"tolerance", c.sweep.tolerance}}},
      {"output", {{"format", c.output.format}, {"path", c.output.path}}},
  };
}

SweepConfig to_sweep_config(const Config& c, int threads) {
  SweepConfig s;
  s.params = {c.protocol.n, c.protocol.k, c.protocol.alpha};
  s.n_learners = c.protocol.n;
  s.N1 = c.sweep.N1;
  s.N2 = c.sweep.N2;
  s.rounds_per_node = c.sweep.rounds_per_node;
  s.mean_grid = c.population.mean_grid;
  s.variance_grid = c.population.variance_grid;
  s.require_concave = c.population.require_concave;
  s.seed = c.seed;
  s.local_alpha = c.sweep.local_alpha;
  s.include_self = c.sweep.include_self;
  s.byzantine_counts = c.sweep.byzantine_counts;
  s.byzantine_selection = parse_byzantine_selection(c.sweep.byzantine_selection);
  s.allow_f_at_least_alpha = c.sweep.allow_f_at_least_alpha;
  s.threads = threads;
  return s;
}

} // namespace conlearn::cli
