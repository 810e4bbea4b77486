#include "dqpt/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>
#include <sstream>

#include "dqpt/ensemble.hpp"
#include "dqpt/gauge.hpp"

#ifndef DQPT_VERSION
#define DQPT_VERSION "unknown"
#endif

namespace dqpt {

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "kind",          "J",          "g0",         "g1",          "dt",         "t_max",       "trotter_order",
      "template",      "init_scheme", "spsa.a",    "spsa.c",      "spsa.A",     "spsa.alpha",  "spsa.gamma",
      "spsa.steps",    "spsa.max_step", "auto_gain", "gain_max_move", "shots_per_eval", "seed", "spsa_seed",
      "n_runs",        "seeds",      "parallel",   "ed_sites",    "k_points",   "coarse_dt",   "input",
      "output"};
  return keys;
}

std::int64_t parse_int(const std::string& text, const std::string& key) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::logic_error&) {
    throw InvalidArgument("config: field '" + key + "' must be an integer, got '" + text + "'");
  }
  if (used != text.size()) throw InvalidArgument("config: field '" + key + "' must be an integer, got '" + text + "'");
  return v;
}

std::uint64_t parse_seed(const std::string& text, const std::string& key) {
  const std::int64_t v = parse_int(text, key);
  if (v < 0) throw InvalidArgument("config: field '" + key + "' must be non-negative");
  return static_cast<std::uint64_t>(v);
}

bool parse_bool(const std::string& text, const std::string& key) {
  if (text == "true") return true;
  if (text == "false") return false;
  throw InvalidArgument("config: field '" + key + "' must be true or false, got '" + text + "'");
}

double parse_real(const std::string& text, const std::string& key) {
  try {
    return parse_double(text, "config: field '" + key + "'");
  } catch (const InvalidArgument&) {
    throw InvalidArgument("config: field '" + key + "' must be a number, got '" + text + "'");
  }
}

std::string join_seeds(const std::vector<std::uint64_t>& seeds) {
  std::string s;
  for (std::size_t i = 0; i < seeds.size(); ++i) s += (i ? "," : "") + std::to_string(seeds[i]);
  return s;
}

std::vector<double> grid(double dt, int steps) {
  std::vector<double> t(static_cast<std::size_t>(steps) + 1);
  for (int k = 0; k <= steps; ++k) t[static_cast<std::size_t>(k)] = k * dt;
  return t;
}

bool same_spec(const QuenchSpec& a, const QuenchSpec& b) {
  return a.J == b.J && a.g0 == b.g0 && a.g1 == b.g1 && a.dt == b.dt && a.t_max == b.t_max &&
         a.trotter_order == b.trotter_order;
}

Table oracle_table(const ExperimentConfig& c) {
  const std::vector<double> times = grid(c.quench.dt, c.quench.steps());
  const std::vector<double> ff = loschmidt_exact_ff(c.quench.g0, c.quench.g1, times, c.k_points, c.quench.J);
  const std::vector<double> ed = loschmidt_exact_ed(c.quench, c.ed_sites, times);
  Table t;
  t.meta = {{"ed_sites", std::to_string(c.ed_sites)}, {"k_points", std::to_string(c.k_points)}};
  const auto cusps = critical_times(c.quench.g0, c.quench.g1, 3, c.quench.J);
  for (std::size_t i = 0; i < cusps.size(); ++i) t.meta.emplace_back("critical_time_" + std::to_string(i), format_double(cusps[i]));
  t.columns = {"t", "echo_ff", "echo_ed"};
  for (std::size_t i = 0; i < times.size(); ++i) t.rows.push_back({times[i], ff[i], ed[i]});
  return t;
}

Table trotter_table(const ExperimentConfig& c, std::string* failure) {
  QuenchSpec fine = c.quench;
  fine.trotter_order = 1;
  QuenchSpec coarse = c.quench;
  coarse.trotter_order = 2;
  coarse.dt = c.coarse_dt;
  const Trajectory o1 = evolve_exact_in_ansatz(fine, c.tmpl);
  const Trajectory o2 = evolve_exact_in_ansatz(coarse, c.tmpl);
  if (failure && (!o1.complete || !o2.complete)) *failure = !o1.complete ? o1.failure : o2.failure;
  const int ratio = static_cast<int>(std::lround(c.coarse_dt / c.quench.dt));
  Table t;
  t.meta = {{"fine_dt", format_double(fine.dt)}, {"coarse_dt", format_double(coarse.dt)}};
  t.columns = {"t", "echo_order1", "echo_order2", "echo_ff"};
  for (std::size_t i = 0; i < o2.points.size(); ++i) {
    const std::size_t j = i * static_cast<std::size_t>(ratio);
    if (j >= o1.points.size()) break;
    const double time = o2.points[i].t;
    t.rows.push_back({time, o1.points[j].echo, o2.points[i].echo,
                      loschmidt_exact_ff(c.quench.g0, c.quench.g1, time, c.k_points, c.quench.J)});
  }
  return t;
}

}  // namespace

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Quench: return "quench";
    case ExperimentKind::ExactInAnsatz: return "exact_in_ansatz";
    case ExperimentKind::Ensemble: return "ensemble";
    case ExperimentKind::OracleCurve: return "oracle_curve";
    case ExperimentKind::GaugeAnalysis: return "gauge_analysis";
    case ExperimentKind::TrotterStudy: return "trotter_study";
  }
  return "quench";
}

ExperimentKind experiment_kind_from_string(std::string_view name) {
  for (auto k : {ExperimentKind::Quench, ExperimentKind::ExactInAnsatz, ExperimentKind::Ensemble,
                 ExperimentKind::OracleCurve, ExperimentKind::GaugeAnalysis, ExperimentKind::TrotterStudy}) {
    if (name == to_string(k)) return k;
  }
  throw InvalidArgument("config: field 'kind' has unknown value '" + std::string(name) + "'");
}

ExperimentConfig config_from_key_values(const KeyValues& kv) {
  for (const auto& [k, v] : kv) {
    if (k.rfind("run.", 0) == 0) continue;
    if (!known_keys().count(k)) throw InvalidArgument("config: unknown field '" + k + "'");
  }
  auto get = [&](const std::string& key) { return find_value(kv, key); };
  auto require = [&](const std::string& key) -> const std::string& {
    const std::string* v = get(key);
    if (!v || v->empty()) throw InvalidArgument("config: missing required field '" + key + "'");
    return *v;
  };

  ExperimentConfig c;
  c.kind = experiment_kind_from_string(require("kind"));
  c.quench.g0 = parse_real(require("g0"), "g0");
  c.quench.g1 = parse_real(require("g1"), "g1");
  c.quench.dt = parse_real(require("dt"), "dt");
  c.quench.t_max = parse_real(require("t_max"), "t_max");
  if (auto v = get("J")) c.quench.J = parse_real(*v, "J");
  if (auto v = get("trotter_order")) c.quench.trotter_order = static_cast<int>(parse_int(*v, "trotter_order"));
  if (auto v = get("template")) c.tmpl = template_from_string(*v);
  if (auto v = get("init_scheme")) c.scheme = init_scheme_from_string(*v);

  if (auto v = get("spsa.steps")) {
    const std::int64_t steps = parse_int(*v, "spsa.steps");
    if (steps < 0 || steps > 1000000) throw InvalidArgument("config: field 'spsa.steps' out of range");
    c.spsa = default_stochastic_schedule(static_cast<int>(steps));
  }
  if (auto v = get("spsa.a")) c.spsa.a = parse_real(*v, "spsa.a");
  if (auto v = get("spsa.c")) c.spsa.c = parse_real(*v, "spsa.c");
  if (auto v = get("spsa.A")) c.spsa.A = parse_real(*v, "spsa.A");
  if (auto v = get("spsa.alpha")) c.spsa.alpha = parse_real(*v, "spsa.alpha");
  if (auto v = get("spsa.gamma")) c.spsa.gamma = parse_real(*v, "spsa.gamma");
  if (auto v = get("spsa.max_step")) c.spsa.max_step = parse_real(*v, "spsa.max_step");
  if (auto v = get("auto_gain")) c.auto_gain = parse_bool(*v, "auto_gain");
  if (auto v = get("gain_max_move")) c.gain_max_move = parse_real(*v, "gain_max_move");
  if (auto v = get("shots_per_eval")) c.shots_per_eval = parse_int(*v, "shots_per_eval");
  if (auto v = get("seed")) c.seed = parse_seed(*v, "seed");
  if (auto v = get("spsa_seed")) c.spsa_seed = parse_seed(*v, "spsa_seed");
  if (auto v = get("n_runs")) c.n_runs = static_cast<int>(parse_int(*v, "n_runs"));
  if (auto v = get("seeds"); v && !v->empty()) {
    std::stringstream ss(*v);
    std::string item;
    while (std::getline(ss, item, ',')) c.seeds.push_back(parse_seed(item, "seeds"));
  }
  if (auto v = get("parallel")) c.parallel = parse_bool(*v, "parallel");
  if (auto v = get("ed_sites")) c.ed_sites = static_cast<int>(parse_int(*v, "ed_sites"));
  if (auto v = get("k_points")) c.k_points = static_cast<int>(parse_int(*v, "k_points"));
  if (auto v = get("coarse_dt")) c.coarse_dt = parse_real(*v, "coarse_dt");
  if (auto v = get("input")) c.input = *v;
  c.output = get("output") ? *get("output") : to_string(c.kind);

  c.quench.validate();
  try {
    c.spsa.validate();
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  if (c.shots_per_eval < 0) throw InvalidArgument("config: field 'shots_per_eval' must be non-negative");
  if (!(c.gain_max_move > 0.0)) throw InvalidArgument("config: field 'gain_max_move' must be positive");
  if (c.n_runs < 1) throw InvalidArgument("config: field 'n_runs' must be at least 1");
  if (c.kind == ExperimentKind::Ensemble && c.n_runs < 2) {
    throw InvalidArgument("config: field 'n_runs' must be at least 2 for an ensemble");
  }
  if (!c.seeds.empty() && c.seeds.size() != static_cast<std::size_t>(c.n_runs)) {
    throw InvalidArgument("config: field 'seeds' must list n_runs seeds");
  }
  if (c.ed_sites < 2 || c.ed_sites > kMaxEdSites) throw InvalidArgument("config: field 'ed_sites' must be in 2..14");
  if (c.k_points < 64) throw InvalidArgument("config: field 'k_points' must be at least 64");
  if (c.kind == ExperimentKind::TrotterStudy) {
    const double ratio = c.coarse_dt / c.quench.dt;
    if (!(c.coarse_dt > 0.0) || std::abs(ratio - std::round(ratio)) > 1e-9 || ratio < 1.0) {
      throw InvalidArgument("config: field 'coarse_dt' must be a positive multiple of dt");
    }
  }
  if (c.kind == ExperimentKind::GaugeAnalysis && c.input.empty()) {
    throw InvalidArgument("config: missing required field 'input' for gauge_analysis");
  }
  if (c.output.empty()) throw InvalidArgument("config: field 'output' is empty");
  return c;
}

KeyValues config_to_key_values(const ExperimentConfig& c) {
  KeyValues kv{{"kind", to_string(c.kind)},
               {"J", format_double(c.quench.J)},
               {"g0", format_double(c.quench.g0)},
               {"g1", format_double(c.quench.g1)},
               {"dt", format_double(c.quench.dt)},
               {"t_max", format_double(c.quench.t_max)},
               {"trotter_order", std::to_string(c.quench.trotter_order)},
               {"template", to_string(c.tmpl)},
               {"init_scheme", to_string(c.scheme)},
               {"spsa.steps", std::to_string(c.spsa.steps)},
               {"spsa.a", format_double(c.spsa.a)},
               {"spsa.c", format_double(c.spsa.c)},
               {"spsa.A", format_double(c.spsa.A)},
               {"spsa.alpha", format_double(c.spsa.alpha)},
               {"spsa.gamma", format_double(c.spsa.gamma)},
               {"spsa.max_step", format_double(c.spsa.max_step)},
               {"auto_gain", c.auto_gain ? "true" : "false"},
               {"gain_max_move", format_double(c.gain_max_move)},
               {"shots_per_eval", std::to_string(c.shots_per_eval)},
               {"seed", std::to_string(c.seed)},
               {"spsa_seed", std::to_string(c.spsa_seed)},
               {"n_runs", std::to_string(c.n_runs)},
               {"seeds", join_seeds(c.seeds)},
               {"parallel", c.parallel ? "true" : "false"},
               {"ed_sites", std::to_string(c.ed_sites)},
               {"k_points", std::to_string(c.k_points)},
               {"coarse_dt", format_double(c.coarse_dt)},
               {"input", c.input},
               {"output", c.output}};
  return kv;
}

StochasticOptions stochastic_options(const ExperimentConfig& c) {
  StochasticOptions o;
  o.tmpl = c.tmpl;
  o.scheme = c.scheme;
  o.spsa = c.spsa;
  o.auto_gain = c.auto_gain;
  o.gain_max_move = c.gain_max_move;
  o.shots_per_eval = c.shots_per_eval;
  o.seed = c.seed;
  o.spsa_seed = c.spsa_seed;
  return o;
}

std::filesystem::path resolve_output(const ExperimentConfig& config, const std::filesystem::path& output_dir) {
  const std::filesystem::path p(config.output);
  if (p.is_absolute() || output_dir.empty()) return p;
  return output_dir / p;
}

Table experiment_table(const ExperimentConfig& c, std::int64_t* total_shots, std::string* failure) {
  std::int64_t shots = 0;
  std::string fail;
  Table table;
  switch (c.kind) {
    case ExperimentKind::Quench: {
      const Trajectory t = evolve_stochastic(c.quench, stochastic_options(c));
      shots = t.total_shots();
      fail = t.failure;
      table = trajectory_table(t);
      break;
    }
    case ExperimentKind::ExactInAnsatz: {
      const Trajectory t = evolve_exact_in_ansatz(c.quench, c.tmpl);
      fail = t.failure;
      table = trajectory_table(t);
      break;
    }
    case ExperimentKind::Ensemble: {
      const StochasticOptions o = stochastic_options(c);
      const auto runs = c.parallel ? parallel::ensemble_run(c.quench, o, c.n_runs, c.seeds)
                                   : serial::ensemble_run(c.quench, o, c.n_runs, c.seeds);
      const EnsembleStats stats = ensemble_statistics(runs);
      shots = stats.total_shots;
      for (const auto& r : runs) {
        if (!r.complete) {
          fail = "run with seed " + std::to_string(r.seed) + ": " + r.failure;
          break;
        }
      }
      table = ensemble_table(stats);
      break;
    }
    case ExperimentKind::OracleCurve:
      table = oracle_table(c);
      break;
    case ExperimentKind::GaugeAnalysis: {
      const Trajectory stored = trajectory_from_table(load_table(c.input));
      if (!same_spec(stored.spec, c.quench)) {
        throw InvalidArgument("gauge_analysis: stored trajectory was run with a different quench");
      }
      const Trajectory reference = evolve_exact_in_ansatz(stored.spec, stored.tmpl);
      fail = reference.failure;
      table = compare_table(compare_trajectories(reference, stored));
      break;
    }
    case ExperimentKind::TrotterStudy:
      table = trotter_table(c, &fail);
      break;
  }
  if (total_shots) *total_shots = shots;
  if (failure) *failure = fail;
  return table;
}

RunOutcome run_experiment(const ExperimentConfig& config, const std::filesystem::path& output_dir) {
  RunOutcome out;
  const std::filesystem::path stem = resolve_output(config, output_dir);
  if (stem.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(stem.parent_path(), ec);
    if (ec) throw IoError("cannot create '" + stem.parent_path().string() + "': " + ec.message());
  }
  out.table_path = stem;
  out.table_path += ".csv";
  out.manifest_path = stem;
  out.manifest_path += ".manifest";

  const auto start = std::chrono::steady_clock::now();
  const Table table = experiment_table(config, &out.total_shots, &out.failure);
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.complete = out.failure.empty();
  save_table(out.table_path, table);

  KeyValues manifest = config_to_key_values(config);
  std::string failure = out.failure;
  std::replace(failure.begin(), failure.end(), '\n', ' ');
  manifest.insert(manifest.end(), {{"run.code_version", DQPT_VERSION},
                                   {"run.table", out.table_path.filename().string()},
                                   {"run.wall_seconds", format_double(out.wall_seconds)},
                                   {"run.total_shots", std::to_string(out.total_shots)},
                                   {"run.complete", out.complete ? "true" : "false"},
                                   {"run.failure", failure}});
  save_key_values(out.manifest_path, manifest);
  return out;
}

CompareReport compare_trajectories(const Trajectory& a, const Trajectory& b) {
  if (!same_spec(a.spec, b.spec)) throw InvalidArgument("compare: trajectories have different quench specs");
  if (a.tmpl != b.tmpl) throw InvalidArgument("compare: trajectories use different templates");
  const std::size_t n = std::min(a.points.size(), b.points.size());
  if (n == 0) throw InvalidArgument("compare: empty trajectory");
  CompareReport r;
  double se = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const AnsatzParams& pa = a.points[i].params;
    const AnsatzParams& pb = b.points[i].params;
    AlignmentRow row;
    row.step = static_cast<int>(i);
    row.t = a.points[i].t;
    row.echo_a = a.points[i].echo;
    row.echo_b = b.points[i].echo;
    row.mixed_fidelity = std::abs(mixed_fidelity(pa, pb));
    row.raw_distance = angle_distance(pa, pb);
    AnsatzParams gauged = pb;
    if (a.tmpl == Template::Reduced8) {
      try {
        const GaugeMatch m = match_gauge(pa, pb);
        row.gauge_angle = x_gauge_angle(m.gauge);
        row.gauge_residual = m.residual;
        gauged = x_gauge_rotate(pb, -row.gauge_angle);
      } catch (const NumericFailure&) {
        row.gauge_residual = 1.0 - row.mixed_fidelity;
      }
    }
    // A rotation that moves the angles further away explains nothing.
    row.gauge_distance = angle_distance(pa, gauged);
    if (row.gauge_distance >= row.raw_distance) {
      gauged = pb;
      row.gauge_distance = row.raw_distance;
    }
    row.aligned_distance = row.gauge_distance;
    if (a.tmpl == Template::Reduced8) {
      try {
        const ReparamResult rp = reparametrise(gauged, pa.angles(7));
        row.reparam_defect = rp.fidelity_defect;
        const double d = angle_distance(pa, rp.params);
        if (d < row.gauge_distance) {
          row.aligned_distance = d;
          row.reparam_used = true;
        }
      } catch (const NumericFailure&) {
        row.reparam_defect = 1.0;
      }
    }
    se += (row.echo_a - row.echo_b) * (row.echo_a - row.echo_b);
    r.raw += row.raw_distance;
    r.gauge_aligned += row.gauge_distance;
    r.aligned += row.aligned_distance;
    r.rows.push_back(row);
  }
  const double dn = static_cast<double>(n);
  r.rms_echo = std::sqrt(se / dn);
  r.raw /= dn;
  r.gauge_aligned /= dn;
  r.aligned /= dn;
  r.gauge_component = r.raw - r.gauge_aligned;
  r.reparam_component = r.gauge_aligned - r.aligned;
  r.residual = r.aligned;
  return r;
}

Table compare_table(const CompareReport& report) {
  Table t;
  t.meta = {{"rms_echo", format_double(report.rms_echo)},
            {"raw_distance", format_double(report.raw)},
            {"gauge_component", format_double(report.gauge_component)},
            {"reparam_component", format_double(report.reparam_component)},
            {"residual", format_double(report.residual)}};
  t.columns = {"step",           "t",           "echo_a",         "echo_b",        "mixed_fidelity",
               "gauge_angle",    "gauge_residual", "reparam_defect", "reparam_used", "raw_distance",
               "gauge_distance", "aligned_distance"};
  for (const auto& r : report.rows) {
    t.rows.push_back({static_cast<double>(r.step), r.t, r.echo_a, r.echo_b, r.mixed_fidelity, r.gauge_angle,
                      r.gauge_residual, r.reparam_defect, r.reparam_used ? 1.0 : 0.0, r.raw_distance,
                      r.gauge_distance, r.aligned_distance});
  }
  return t;
}

}  // namespace dqpt
