#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "dqpt/ensemble.hpp"
#include "dqpt/evolve.hpp"

// Plain-text formats. Tables are comma-separated with a '#' comment block;
// the first non-comment line names the columns. Key-value documents hold one
// `key = value` per line. Numbers are written at 17 significant digits so a
// write/read round trip is exact.
namespace dqpt {

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Value of `key`, or nullptr when absent. Later entries win.
const std::string* find_value(const KeyValues& kv, const std::string& key);

struct Table {
  KeyValues meta;                    // written as "# key: value"
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const;  // throws InvalidArgument
  std::vector<double> column_values(const std::string& name) const;
};

std::string format_double(double v);
double parse_double(const std::string& text, const std::string& what);

void write_table(std::ostream& out, const Table& table);
Table read_table(std::istream& in);

void write_key_values(std::ostream& out, const KeyValues& kv);
KeyValues read_key_values(std::istream& in);

/// Columns t, echo, cumulative_shots, cost, phi0.. ; spec and run header in meta.
Table trajectory_table(const Trajectory& traj);
Trajectory trajectory_from_table(const Table& table);

/// Columns t, mean, variance, lower, upper.
Table ensemble_table(const EnsembleStats& stats);

// File helpers; failures throw IoError naming the path.
void save_table(const std::filesystem::path& path, const Table& table);
Table load_table(const std::filesystem::path& path);
void save_key_values(const std::filesystem::path& path, const KeyValues& kv);
KeyValues load_key_values(const std::filesystem::path& path);

}  // namespace dqpt
