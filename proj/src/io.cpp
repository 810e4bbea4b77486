#include "dqpt/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace dqpt {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string meta_or_throw(const KeyValues& kv, const std::string& key) {
  const std::string* v = find_value(kv, key);
  if (!v) throw InvalidArgument("trajectory table: missing header '" + key + "'");
  return *v;
}

}  // namespace

const std::string* find_value(const KeyValues& kv, const std::string& key) {
  const std::string* found = nullptr;
  for (const auto& [k, v] : kv) {
    if (k == key) found = &v;
  }
  return found;
}

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw InvalidArgument("table: no column '" + name + "'");
}

std::vector<double> Table::column_values(const std::string& name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[c]);
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  if (t == "nan") return std::nan("");
  if (t == "inf") return INFINITY;
  if (t == "-inf") return -INFINITY;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::logic_error&) {
    throw InvalidArgument(what + ": '" + t + "' is not a number");
  }
  if (used != t.size()) throw InvalidArgument(what + ": '" + t + "' is not a number");
  return v;
}

void write_table(std::ostream& out, const Table& table) {
  for (const auto& [k, v] : table.meta) out << "# " << k << ": " << v << "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
  out << "\n";
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) throw InvalidArgument("write_table: row width does not match columns");
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
    out << "\n";
  }
}

Table read_table(std::istream& in) {
  Table t;
  std::string line;
  int lineno = 0;
  bool have_columns = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string body = trim(line.substr(1));
      const auto colon = body.find(':');
      if (colon != std::string::npos) t.meta.emplace_back(trim(body.substr(0, colon)), trim(body.substr(colon + 1)));
      continue;
    }
    const auto cells = split_commas(line);
    if (!have_columns) {
      t.columns = cells;
      have_columns = true;
      continue;
    }
    if (cells.size() != t.columns.size()) {
      throw InvalidArgument("read_table: line " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
                            " fields, expected " + std::to_string(t.columns.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_double(c, "read_table: line " + std::to_string(lineno)));
    t.rows.push_back(std::move(row));
  }
  if (!have_columns) throw InvalidArgument("read_table: no column header");
  return t;
}

void write_key_values(std::ostream& out, const KeyValues& kv) {
  for (const auto& [k, v] : kv) out << k << " = " << v << "\n";
}

KeyValues read_key_values(std::istream& in) {
  KeyValues kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = trim(line);
    if (body.empty() || body[0] == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw InvalidArgument("line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(body.substr(0, eq));
    if (key.empty()) throw InvalidArgument("line " + std::to_string(lineno) + ": empty key");
    kv.emplace_back(key, trim(body.substr(eq + 1)));
  }
  return kv;
}

Table trajectory_table(const Trajectory& traj) {
  Table t;
  t.meta = {{"J", format_double(traj.spec.J)},
            {"g0", format_double(traj.spec.g0)},
            {"g1", format_double(traj.spec.g1)},
            {"dt", format_double(traj.spec.dt)},
            {"t_max", format_double(traj.spec.t_max)},
            {"trotter_order", std::to_string(traj.spec.trotter_order)},
            {"template", to_string(traj.tmpl)},
            {"init_scheme", to_string(traj.scheme)},
            {"seed", std::to_string(traj.seed)},
            {"complete", traj.complete ? "true" : "false"}};
  if (!traj.complete) {
    std::string failure = traj.failure;
    std::replace(failure.begin(), failure.end(), '\n', ' ');
    t.meta.emplace_back("failure", failure);
  }
  t.columns = {"t", "echo", "cumulative_shots", "cost"};
  const std::size_t n = angle_count(traj.tmpl);
  for (std::size_t i = 0; i < n; ++i) t.columns.push_back("phi" + std::to_string(i));
  for (const auto& p : traj.points) {
    std::vector<double> row{p.t, p.echo, static_cast<double>(p.cumulative_shots), p.cost};
    for (Eigen::Index i = 0; i < p.params.angles.size(); ++i) row.push_back(p.params.angles(i));
    t.rows.push_back(std::move(row));
  }
  return t;
}

Trajectory trajectory_from_table(const Table& table) {
  Trajectory traj;
  const auto num = [&](const std::string& key) { return parse_double(meta_or_throw(table.meta, key), key); };
  traj.spec.J = num("J");
  traj.spec.g0 = num("g0");
  traj.spec.g1 = num("g1");
  traj.spec.dt = num("dt");
  traj.spec.t_max = num("t_max");
  traj.spec.trotter_order = static_cast<int>(num("trotter_order"));
  traj.tmpl = template_from_string(meta_or_throw(table.meta, "template"));
  traj.scheme = init_scheme_from_string(meta_or_throw(table.meta, "init_scheme"));
  const std::string seed = meta_or_throw(table.meta, "seed");
  if (seed.empty() || seed.find_first_not_of("0123456789") != std::string::npos) {
    throw InvalidArgument("trajectory table: header 'seed' is not an unsigned integer");
  }
  traj.seed = std::stoull(seed);
  traj.complete = meta_or_throw(table.meta, "complete") == "true";
  if (const std::string* f = find_value(table.meta, "failure")) traj.failure = *f;

  const std::size_t n = angle_count(traj.tmpl);
  const std::size_t ct = table.column("t"), ce = table.column("echo"), cs = table.column("cumulative_shots"),
                    cc = table.column("cost"), c0 = table.column("phi0");
  if (c0 + n > table.columns.size()) throw InvalidArgument("trajectory table: missing angle columns");
  for (const auto& row : table.rows) {
    RVector a(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) a(static_cast<Eigen::Index>(i)) = row[c0 + i];
    traj.points.push_back({row[ct], AnsatzParams(traj.tmpl, a), row[ce],
                           static_cast<std::int64_t>(std::llround(row[cs])), row[cc]});
  }
  return traj;
}

Table ensemble_table(const EnsembleStats& stats) {
  Table t;
  t.meta = {{"n_runs", std::to_string(stats.n_runs)},
            {"complete_runs", std::to_string(stats.complete_runs)},
            {"total_shots", std::to_string(stats.total_shots)}};
  t.columns = {"t", "mean", "variance", "lower", "upper"};
  for (std::size_t i = 0; i < stats.times.size(); ++i) {
    t.rows.push_back({stats.times[i], stats.mean[i], stats.variance[i], stats.lower[i], stats.upper[i]});
  }
  return t;
}

void save_table(const std::filesystem::path& path, const Table& table) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  write_table(out, table);
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

Table load_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  return read_table(in);
}

void save_key_values(const std::filesystem::path& path, const KeyValues& kv) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  write_key_values(out, kv);
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

KeyValues load_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  return read_key_values(in);
}

}  // namespace dqpt
