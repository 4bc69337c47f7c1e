// Copyright (c) 2026, mirrorlab developers
// SPDX-License-Identifier: Apache-2.0
//
// Config files, CSV trajectories, dense matrix files, summary records and
// SVG line plots.

#pragma once

#include "mirrorlab/experiments.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mirrorlab {

/// Flat `key = value` configuration with `[section]` headers. Keys inside a
/// section are stored as "section.key". Lines starting with '#' or ';' are
/// comments.
class Config {
 public:
  static Config parse(std::string_view text, const std::string& origin = "<config>");
  static Config load(const std::string& path);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { entries_[key] = value; }
  const std::map<std::string, std::string>& entries() const { return entries_; }

  std::string get(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<std::int64_t> get_int_list(const std::string& key, const std::vector<std::int64_t>& fallback) const;

  /// Canonical `key=value` lines in sorted order.
  std::string canonical() const;
  /// FNV-1a hash of the canonical text, as 16 hex digits.
  std::string hash() const;

 private:
  std::map<std::string, std::string> entries_;
};

/// Seed from MIRRORLAB_SEED when set.
std::optional<std::uint64_t> seed_from_env();

/// Shortest round-trip formatting with 17 significant digits.
std::string format_double(double v);

/// Trajectory CSV with the fixed column set; absent or non-finite metrics
/// are written as empty cells.
void write_report_csv(std::ostream& os, const ExperimentReport& rep);
void write_report_csv(const std::string& path, const ExperimentReport& rep);

/// Per-record model-space iterates: t followed by x_0..x_{n-1}.
void write_states_csv(const std::string& path, const ExperimentReport& rep);

Mat parse_matrix(std::string_view text, const std::string& origin = "<matrix>");
Mat load_matrix(const std::string& path);
void save_matrix(const std::string& path, const Mat& M);

/// Summary record as a JSON object.
std::string summary_json(const ExperimentReport& rep, const std::string& config_hash, double wall_time_s);

struct PlotSeries {
  std::string label;
  std::vector<double> y;
};

/// Self-contained 800x500 SVG line chart. Non-finite points are skipped;
/// log_y plots log10 of positive values.
std::string render_svg(const std::string& title, const std::vector<double>& x, const std::vector<PlotSeries>& series,
                       bool log_y);
void write_text(const std::string& path, const std::string& text);

}  // namespace mirrorlab
