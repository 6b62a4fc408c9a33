#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "conlearn/errors.hpp"
#include "conlearn_cli/commands.hpp"

namespace conlearn::cli {

namespace {

struct Flags {
  std::string config_path;
  std::string out;
  std::string format;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;

  std::optional<int> n, k, alpha, f, f_faulty, delta, N1, N2, rounds_per_node;
  std::optional<double> q, tolerance;
  std::optional<std::string> kind, selection;
  std::vector<double> p_grid, means, variances;
  std::vector<int> byzantine_counts;
  bool clamp_top_death = false;
  bool local_alpha = false;
  bool include_self = false;
};

int resolve_thread_flag(const std::optional<int>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("CONSENSUS_LEARN_THREADS")) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(env, &used);
      if (used == std::string(env).size() && v >= 0) return v;
    } catch (const std::exception&) {
    }
    throw ConfigurationError("CONSENSUS_LEARN_THREADS must be a non-negative integer");
  }
  return 0;
}

Json build_tree(const std::string& command, const Flags& fl) {
  Json tree = fl.config_path.empty() ? Json::object() : load_config_tree(fl.config_path);
  tree["command"] = command;
  if (fl.seed) tree["seed"] = *fl.seed;
  if (!fl.out.empty()) set_path(tree, {"output", "path"}, fl.out);
  if (!fl.format.empty()) set_path(tree, {"output", "format"}, fl.format);
  if (fl.n) set_path(tree, {"protocol", "n"}, *fl.n);
  if (fl.k) set_path(tree, {"protocol", "k"}, *fl.k);
  if (fl.alpha) set_path(tree, {"protocol", "alpha"}, *fl.alpha);
  if (fl.f) set_path(tree, {"protocol", "f"}, *fl.f);
  if (fl.clamp_top_death) set_path(tree, {"protocol", "clamp_top_death"}, true);
  if (fl.delta) set_path(tree, {"sweep", "delta"}, *fl.delta);
  if (!fl.p_grid.empty()) set_path(tree, {"sweep", "p_grid"}, fl.p_grid);
  if (fl.tolerance) set_path(tree, {"sweep", "tolerance"}, *fl.tolerance);
  if (fl.kind) set_path(tree, {"sweep", "kind"}, *fl.kind);
  if (fl.N1) set_path(tree, {"sweep", "N1"}, *fl.N1);
  if (fl.N2) set_path(tree, {"sweep", "N2"}, *fl.N2);
  if (fl.rounds_per_node) set_path(tree, {"sweep", "rounds_per_node"}, *fl.rounds_per_node);
  if (fl.local_alpha) set_path(tree, {"sweep", "local_alpha"}, true);
  if (fl.include_self) set_path(tree, {"sweep", "include_self"}, true);
  if (fl.selection) set_path(tree, {"sweep", "byzantine_selection"}, *fl.selection);
  if (!fl.byzantine_counts.empty()) set_path(tree, {"sweep", "byzantine_counts"}, fl.byzantine_counts);
  if (!fl.means.empty()) set_path(tree, {"population", "mean_grid"}, fl.means);
  if (!fl.variances.empty()) set_path(tree, {"population", "variance_grid"}, fl.variances);

  // Threshold flags describe a single query and replace any configured list.
  if (command == "threshold" && (fl.delta || fl.q || fl.f_faulty)) {
    Json q = Json::object();
    if (fl.n) q["n"] = *fl.n;
    if (fl.k) q["k"] = *fl.k;
    if (fl.alpha) q["alpha"] = *fl.alpha;
    if (fl.f) q["f"] = *fl.f;
    if (fl.f_faulty) q["f_faulty"] = *fl.f_faulty;
    if (fl.q) {
      q["q"] = *fl.q;
    } else {
      q["delta"] = fl.delta.value_or(0);
    }
    set_path(tree, {"sweep", "queries"}, Json::array({q}));
  }
  return tree;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigurationError("output.path: cannot write '" + path + "'");
  out << text;
  if (!out) throw ConfigurationError("output.path: write to '" + path + "' failed");
}

int execute(const std::string& command, const Flags& fl, std::ostream& out) {
  const auto started = std::chrono::system_clock::now();
  const Config cfg = config_from_json(build_tree(command, fl));
  const int threads = resolve_thread_flag(fl.threads);

  Table table;
  Json detail;
  if (command == "absorb") {
    table = absorb_table(cfg);
  } else if (command == "accuracy") {
    table = accuracy_table(cfg);
  } else if (command == "threshold") {
    table = threshold_table(cfg);
  } else {
    SimulateReport rep = simulate_report(cfg, threads);
    table = std::move(rep.cells);
    detail = std::move(rep.detail);
  }

  RunManifest manifest;
  manifest.command = command;
  manifest.config = config_to_json(cfg);
  manifest.config_hash = sha256_hex(manifest.config.dump());
  manifest.root_seed = cfg.seed;
  manifest.tool_version = tool_version;
  manifest.started = utc_timestamp(started);
  manifest.finished = utc_timestamp(std::chrono::system_clock::now());

  const std::string& path = cfg.output.path;
  if (cfg.output.format == "json") {
    Json rows = table_rows_json(table);
    if (!detail.is_null())
      for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i]["sampling_error"] = detail[i]["sampling_error"];
        rows[i]["replicates"] = detail[i]["replicates"];
      }
    const std::string text = document(manifest, std::move(rows)).dump(2) + "\n";
    if (path.empty()) {
      out << text;
    } else {
      write_text(path, text);
    }
    return 0;
  }

  std::ostringstream csv;
  write_csv(csv, table);
  if (path.empty()) {
    out << csv.str();
    return 0;
  }
  write_text(path, csv.str());
  write_text(path + ".manifest.json", manifest.to_json().dump(2) + "\n");
  if (!detail.is_null())
    write_text(path + ".replicates.json", document(manifest, detail).dump(2) + "\n");
  return 0;
}

void add_common(CLI::App* sub, Flags& fl) {
  sub->add_option("--config", fl.config_path, "YAML or JSON config file")->check(CLI::ExistingFile);
  sub->add_option("--out", fl.out, "output file (default: standard output)");
  sub->add_option("--format", fl.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--seed", fl.seed, "root seed");
  sub->add_option("--threads", fl.threads, "worker threads, 0 for all cores")->check(CLI::NonNegativeNumber);
}

void add_protocol(CLI::App* sub, Flags& fl) {
  sub->add_option("--n", fl.n, "network size");
  sub->add_option("--k", fl.k, "sample size");
  sub->add_option("--alpha", fl.alpha, "acceptance threshold");
  sub->add_option("--f", fl.f, "perfectly malicious nodes");
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Slush consensus-learning analytics and simulator", "consensus-learn"};
  app.set_version_flag("--version", tool_version);
  app.require_subcommand(1);
  Flags fl;

  auto* absorb = app.add_subcommand("absorb", "absorption probabilities per starting state");
  add_common(absorb, fl);
  add_protocol(absorb, fl);
  absorb->add_flag("--clamp-top-death", fl.clamp_top_death, "allow f >= alpha by freezing the top state");

  auto* accuracy = app.add_subcommand("accuracy", "ensemble accuracy curves");
  add_common(accuracy, fl);
  add_protocol(accuracy, fl);
  accuracy->add_option("--delta", fl.delta, "supermajority offset");
  accuracy->add_option("--p-grid", fl.p_grid, "comma separated accuracies")->delimiter(',');

  auto* threshold = app.add_subcommand("threshold", "accuracy thresholds against supermajority rules");
  add_common(threshold, fl);
  add_protocol(threshold, fl);
  auto* delta_opt = threshold->add_option("--delta", fl.delta, "supermajority offset");
  threshold->add_option("--q", fl.q, "vote fraction in (1/2, 1]")->excludes(delta_opt);
  threshold->add_option("--f-faulty", fl.f_faulty, "perfectly faulty nodes");
  threshold->add_option("--tolerance", fl.tolerance, "bisection tolerance");

  auto* simulate = app.add_subcommand("simulate", "beta or byzantine sweeps over synthetic learners");
  add_common(simulate, fl);
  simulate->add_option("--n", fl.n, "number of learners");
  simulate->add_option("--k", fl.k, "sample size");
  simulate->add_option("--alpha", fl.alpha, "global acceptance threshold");
  simulate->add_option("--kind", fl.kind, "beta or byzantine")->check(CLI::IsMember({"beta", "byzantine"}));
  simulate->add_option("--N1", fl.N1, "voting profiles per accuracy sample");
  simulate->add_option("--N2", fl.N2, "accuracy samples per cell");
  simulate->add_option("--rounds-per-node", fl.rounds_per_node, "gossip rounds per node");
  simulate->add_option("--mean", fl.means, "comma separated accuracy means")->delimiter(',');
  simulate->add_option("--variance", fl.variances, "comma separated accuracy variances")->delimiter(',');
  simulate->add_option("--byzantine-counts", fl.byzantine_counts, "comma separated f values")->delimiter(',');
  simulate->add_option("--byzantine-selection", fl.selection, "random|strongest|weakest|representative");
  simulate->add_flag("--local-alpha", fl.local_alpha, "strong-confidence local thresholds");
  simulate->add_flag("--include-self", fl.include_self, "queriers may sample themselves");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return execute(command, fl, out);
  } catch (const ConfigurationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const UnsupportedRegime& e) {
    err << "unsupported: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "numeric failure: " << e.what() << "\n";
    return 4;
  }
}

} // namespace conlearn::cli
