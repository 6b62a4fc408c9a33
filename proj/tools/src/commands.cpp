#include "conlearn_cli/commands.hpp"

#include <cmath>

#include "conlearn/ensemble_analytics.hpp"
#include "conlearn/errors.hpp"
#include "conlearn/experiments.hpp"

namespace conlearn::cli {

namespace {

SlushParams protocol_params(const Config& c) {
  return {c.protocol.n, c.protocol.k, c.protocol.alpha};
}

std::vector<double> default_p_grid() {
  std::vector<double> grid;
  for (int i = 50; i <= 100; ++i) grid.push_back(i / 100.0);
  return grid;
}

Cell opt(bool present, double v) { return present ? Cell{v} : Cell{}; }

} // namespace

Table absorb_table(const Config& c) {
  const SlushParams params = protocol_params(c);
  const AbsorptionTable table =
      absorption(params, {c.protocol.f, 0}, {c.protocol.clamp_top_death});
  Table out;
  out.columns = {"b", "B", "R", "chvatal_bound", "b_over_n"};
  const int quota = majority_quota(params.n);
  for (int b = 0; b <= table.top; ++b) {
    Cell chvatal;
    if (c.protocol.f == 0 && b >= quota) chvatal = chvatal_bound(params, b);
    out.add({static_cast<long long>(b), table.blue(b), table.red(b), chvatal,
             static_cast<double>(b) / params.n});
  }
  return out;
}

Table accuracy_table(const Config& c) {
  const SlushParams params = protocol_params(c);
  params.validate();
  const int f = c.protocol.f;
  const int delta = c.sweep.delta;
  const std::vector<double> grid = c.sweep.p_grid.empty() ? default_p_grid() : c.sweep.p_grid;
  if (params.n % 2 == 0) throw ConfigurationError("protocol.n: must be odd for majority rules");
  if (f >= params.alpha && !c.protocol.clamp_top_death)
    throw UnsupportedRegime("f=" + std::to_string(f) + " >= alpha=" + std::to_string(params.alpha));

  Table out;
  out.columns = {"p", "slush", "majority", "supermajority", "delta", "delta_majority",
                 "delta_supermajority"};
  for (double p : grid) {
    const double slush = slush_accuracy_byzantine(params, f, p);
    const double maj = majority_accuracy_byzantine(params.n, f, p, 0);
    const double sup = majority_accuracy_byzantine(params.n, f, p, delta);
    const double d_maj = accuracy_gap(params, f, p, 0).value();
    const double d_sup = accuracy_gap(params, f, p, delta).value();
    out.add({p, slush, maj, sup, static_cast<long long>(delta), d_maj, d_sup});
  }
  return out;
}

Table threshold_table(const Config& c) {
  std::vector<ThresholdEntry> entries = c.sweep.queries;
  if (entries.empty()) {
    ThresholdEntry e;
    e.n = c.protocol.n;
    e.k = c.protocol.k;
    e.alpha = c.protocol.alpha;
    e.f = c.protocol.f;
    e.delta = c.sweep.delta;
    entries.push_back(e);
  }
  Table out;
  out.columns = {"n",         "k",          "alpha",  "delta",          "q",
                 "f",         "f_faulty",   "effective_delta", "tau_bound", "tau_status",
                 "bisect",    "bisect_outcome", "sign_changes", "multiple_roots", "status",
                 "message"};
  for (const ThresholdEntry& e : entries) {
    ThresholdQuery q{{e.n, e.k, e.alpha}, e.delta, e.q, e.f, e.f_faulty};
    std::vector<Cell> row{static_cast<long long>(e.n),
                          static_cast<long long>(e.k),
                          static_cast<long long>(e.alpha),
                          e.delta ? Cell{static_cast<long long>(*e.delta)} : Cell{},
                          e.q ? Cell{*e.q} : Cell{},
                          static_cast<long long>(e.f),
                          static_cast<long long>(e.f_faulty)};
    try {
      q.validate();
      row.push_back(static_cast<long long>(q.effective_delta()));
      try {
        row.push_back(threshold_tau_bound(q));
        row.push_back(std::string("ok"));
      } catch (const std::exception& ex) {
        row.push_back(Cell{});
        row.push_back(std::string("n/a: ") + ex.what());
      }
      const ThresholdResult r = threshold_bisect(q, c.sweep.tolerance);
      row.push_back(r.value);
      row.push_back(to_string(r.outcome));
      row.push_back(static_cast<long long>(r.sign_changes));
      row.push_back(r.multiple_roots);
      row.push_back(std::string("ok"));
      row.push_back(std::string());
    } catch (const std::exception& ex) {
      row.resize(7);
      for (int i = 0; i < 7; ++i) row.push_back(Cell{});
      row.push_back(std::string(dynamic_cast<const UnsupportedRegime*>(&ex) ? "unsupported" : "error"));
      row.push_back(std::string(ex.what()));
    }
    out.add(std::move(row));
  }
  return out;
}

namespace {

std::string bits(const std::vector<std::uint8_t>& v) {
  std::string s(v.size(), '0');
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i]) s[i] = '1';
  return s;
}

} // namespace

SimulateReport simulate_report(const Config& c, int threads) {
  const SweepConfig sc = to_sweep_config(c, threads);
  const SweepResult result = c.sweep.kind == "byzantine" ? byzantine_sweep(sc) : beta_sweep(sc);

  SimulateReport rep;
  Table& t = rep.cells;
  t.columns = {"kind",
               "cell",
               "mean",
               "variance",
               "f",
               "shape_a",
               "shape_b",
               "status",
               "majority",
               "slush",
               "slush_local",
               "slush_minus_majority",
               "slush_local_minus_majority",
               "majority_error",
               "slush_error",
               "slush_local_error",
               "error_lower",
               "error_upper",
               "message"};
  rep.detail = Json::array();
  for (const CellResult& cell : result.cells) {
    const MethodStats& maj = cell.method(Rule::majority);
    const MethodStats& gl = cell.method(Rule::slush);
    const MethodStats& lo = cell.method(Rule::slush_local);
    const bool ok = cell.status == CellStatus::ok;
    const bool finite_shapes = std::isfinite(cell.beta.shape_a);
    t.add({result.kind,
           static_cast<long long>(cell.index),
           cell.mean,
           cell.variance,
           static_cast<long long>(cell.f),
           opt(ok && finite_shapes, cell.beta.shape_a),
           opt(ok && finite_shapes, cell.beta.shape_b),
           to_string(cell.status),
           opt(maj.evaluated, maj.accuracy),
           opt(gl.evaluated, gl.accuracy),
           opt(lo.evaluated, lo.accuracy),
           opt(gl.evaluated && maj.evaluated, gl.accuracy - maj.accuracy),
           opt(lo.evaluated && maj.evaluated, lo.accuracy - maj.accuracy),
           opt(maj.evaluated, maj.error.estimate),
           opt(gl.evaluated, gl.error.estimate),
           opt(lo.evaluated, lo.error.estimate),
           opt(ok, ok ? maj.error.lower : 0.0),
           opt(ok, ok ? maj.error.upper : 0.0),
           cell.message});

    Json reps = Json::array();
    for (const ReplicateRecord& r : cell.replicates) {
      Json acc = Json::object();
      Json outcomes = Json::object();
      for (std::size_t m = 0; m < rule_count; ++m) {
        if (!cell.methods[m].evaluated) continue;
        const std::string name = to_string(static_cast<Rule>(m));
        acc[name] = r.accuracy[m];
        outcomes[name] = bits(r.outcomes[m]);
      }
      reps.push_back({{"index", r.index},
                      {"population_mean", r.population_mean},
                      {"accuracy", acc},
                      {"outcomes", outcomes}});
    }
    Json errors = Json::object();
    for (std::size_t m = 0; m < rule_count; ++m) {
      if (!cell.methods[m].evaluated) continue;
      const SamplingError& e = cell.methods[m].error;
      errors[to_string(static_cast<Rule>(m))] = {
          {"lower", e.lower}, {"upper", e.upper}, {"estimate", e.estimate}, {"raw", e.raw}};
    }
    rep.detail.push_back({{"cell", cell.index}, {"sampling_error", errors}, {"replicates", reps}});
  }
  return rep;
}

} // namespace conlearn::cli
