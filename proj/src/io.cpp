// Copyright (c) 2026, mirrorlab developers
// SPDX-License-Identifier: Apache-2.0

#include "mirrorlab/io.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace mirrorlab {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool parse_number(std::string_view s, double& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  const char* b = t.data();
  const char* e = b + t.size();
  if (*b == '+') ++b;
  auto [ptr, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && ptr == e;
}

}  // namespace

// ---------------------------------------------------------------------------

Config Config::parse(std::string_view text, const std::string& origin) {
  Config cfg;
  std::string section;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3)
        fail(ErrorCode::parse, origin + ":" + std::to_string(line_no) + ": malformed section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrorCode::parse, origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    const auto hash = value.find(" #");
    if (hash != std::string::npos) value = trim(std::string_view(value).substr(0, hash));
    if (key.empty()) fail(ErrorCode::parse, origin + ":" + std::to_string(line_no) + ": empty key");
    cfg.entries_[section.empty() ? key : section + "." + key] = value;
  }
  return cfg;
}

Config Config::load(const std::string& path) { return parse(read_file(path), path); }

std::string Config::get(const std::string& key, const std::string& fallback) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  double v = 0.0;
  if (!parse_number(it->second, v)) fail(ErrorCode::parse, "config key '" + key + "' is not a number: " + it->second);
  return v;
}

std::int64_t Config::get_int(const std::string& key, std::int64_t fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  const std::string t = trim(it->second);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size())
    fail(ErrorCode::parse, "config key '" + key + "' is not an integer: " + it->second);
  return v;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  const std::string& v = it->second;
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  fail(ErrorCode::parse, "config key '" + key + "' is not a boolean: " + v);
}

std::vector<std::int64_t> Config::get_int_list(const std::string& key,
                                               const std::vector<std::int64_t>& fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  std::vector<std::int64_t> out;
  std::stringstream ss(it->second);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = trim(item);
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
      fail(ErrorCode::parse, "config key '" + key + "' has a non-integer entry: " + item);
    out.push_back(v);
  }
  return out;
}

std::string Config::canonical() const {
  std::string s;
  for (const auto& [k, v] : entries_) s += k + "=" + v + "\n";
  return s;
}

std::string Config::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::optional<std::uint64_t> seed_from_env() {
  const char* v = std::getenv("MIRRORLAB_SEED");
  if (v == nullptr || *v == '\0') return std::nullopt;
  const std::string t = trim(v);
  std::uint64_t s = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), s);
  if (ec != std::errc() || ptr != t.data() + t.size())
    fail(ErrorCode::input, "MIRRORLAB_SEED is not a nonnegative integer: " + t);
  return s;
}

// ---------------------------------------------------------------------------

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_report_csv(std::ostream& os, const ExperimentReport& rep) {
  os << "step,t,a";
  for (const auto& c : metric_columns()) os << ',' << c;
  os << '\n';
  for (std::size_t i = 0; i < rep.size(); ++i) {
    os << rep.steps[i] << ',' << format_double(rep.times[i]) << ',' << format_double(rep.a[i]);
    for (const auto& c : metric_columns()) {
      os << ',';
      auto it = rep.series.find(c);
      if (it != rep.series.end() && i < it->second.size() && std::isfinite(it->second[i]))
        os << format_double(it->second[i]);
    }
    os << '\n';
  }
}

void write_report_csv(const std::string& path, const ExperimentReport& rep) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io, "cannot write '" + path + "'");
  write_report_csv(out, rep);
  if (!out) fail(ErrorCode::io, "write to '" + path + "' failed");
}

void write_states_csv(const std::string& path, const ExperimentReport& rep) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io, "cannot write '" + path + "'");
  const Eigen::Index n = rep.snapshots.empty() ? 0 : rep.snapshots.front().size();
  out << "t";
  for (Eigen::Index j = 0; j < n; ++j) out << ",x" << j;
  out << '\n';
  for (std::size_t i = 0; i < rep.snapshots.size(); ++i) {
    out << format_double(rep.times[i]);
    for (Eigen::Index j = 0; j < n; ++j) out << ',' << format_double(rep.snapshots[i][j]);
    out << '\n';
  }
}

// ---------------------------------------------------------------------------

Mat parse_matrix(std::string_view text, const std::string& origin) {
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (trim(raw).empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const auto comma = raw.find(',', start);
      const std::string_view cell = raw.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      double v = 0.0;
      if (!parse_number(cell, v))
        fail(ErrorCode::parse, origin + ":" + std::to_string(line_no) + ": non-numeric cell '" + trim(cell) + "'");
      row.push_back(v);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      fail(ErrorCode::parse, origin + ":" + std::to_string(line_no) + ": ragged row with " +
                                 std::to_string(row.size()) + " cells, expected " + std::to_string(rows.front().size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(ErrorCode::parse, origin + ": no data rows");
  Mat M(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return M;
}

Mat load_matrix(const std::string& path) { return parse_matrix(read_file(path), path); }

void save_matrix(const std::string& path, const Mat& M) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io, "cannot write '" + path + "'");
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      if (j) out << ',';
      out << format_double(M(i, j));
    }
    out << '\n';
  }
  if (!out) fail(ErrorCode::io, "write to '" + path + "' failed");
}

// ---------------------------------------------------------------------------

std::string summary_json(const ExperimentReport& rep, const std::string& config_hash, double wall_time_s) {
  using nlohmann::json;
  json j;
  j["experiment"] = rep.experiment;
  j["config_hash"] = config_hash;
  j["seed"] = rep.seed;
  j["converged"] = rep.converged;
  j["stopped"] = rep.stopped;
  if (rep.stopped) j["message"] = rep.message;
  for (const auto& c : metric_columns()) {
    auto it = rep.series.find(c);
    if (it == rep.series.end() || it->second.empty()) continue;
    const double v = it->second.back();
    j["final_" + c] = std::isfinite(v) ? json(v) : json(nullptr);
  }
  if (!rep.a.empty()) j["final_a"] = rep.a.back();
  j["time_to_threshold"] = rep.time_to_threshold ? json(*rep.time_to_threshold) : json(nullptr);
  j["kkt_residual"] = rep.kkt_residual ? json(*rep.kkt_residual) : json(nullptr);
  j["wall_time_s"] = wall_time_s;
  return j.dump(2);
}

// ---------------------------------------------------------------------------

std::string render_svg(const std::string& title, const std::vector<double>& x, const std::vector<PlotSeries>& series,
                       bool log_y) {
  constexpr double W = 800, H = 500, L = 70, R = 20, T = 40, B = 50;
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
  auto ty = [&](double v) { return log_y ? (v > 0 ? std::log10(v) : NAN) : v; };

  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (double v : x)
    if (std::isfinite(v)) xmin = std::min(xmin, v), xmax = std::max(xmax, v);
  for (const auto& s : series)
    for (double v : s.y) {
      const double u = ty(v);
      if (std::isfinite(u)) ymin = std::min(ymin, u), ymax = std::max(ymax, u);
    }
  if (!(xmax > xmin)) xmin = 0, xmax = 1;
  if (!std::isfinite(ymin)) ymin = 0, ymax = 1;
  if (!(ymax > ymin)) ymin -= 0.5, ymax += 0.5;
  auto px = [&](double v) { return L + (v - xmin) / (xmax - xmin) * (W - L - R); };
  auto py = [&](double v) { return H - B - (v - ymin) / (ymax - ymin) * (H - T - B); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 500\" width=\"800\" height=\"500\">\n";
  os << "<rect width=\"800\" height=\"500\" fill=\"white\"/>\n";
  os << "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" << title
     << "</text>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  char buf[64];
  for (int k = 0; k <= 4; ++k) {
    const double yv = ymin + (ymax - ymin) * k / 4.0;
    std::snprintf(buf, sizeof buf, log_y ? "1e%.1f" : "%.3g", yv);
    os << "<text x=\"" << L - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
       << "font-size=\"11\">" << buf << "</text>\n";
    const double xv = xmin + (xmax - xmin) * k / 4.0;
    std::snprintf(buf, sizeof buf, "%.4g", xv);
    os << "<text x=\"" << px(xv) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\" "
       << "font-family=\"sans-serif\" font-size=\"11\">" << buf << "</text>\n";
  }
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* c = colors[s % 6];
    os << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < std::min(x.size(), series[s].y.size()); ++i) {
      const double u = ty(series[s].y[i]);
      if (!std::isfinite(u) || !std::isfinite(x[i])) continue;
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(x[i]), py(u));
      os << buf;
    }
    os << "\"/>\n";
    os << "<text x=\"" << W - R - 4 << "\" y=\"" << T + 16 * (s + 1) << "\" text-anchor=\"end\" fill=\"" << c
       << "\" font-family=\"sans-serif\" font-size=\"12\">" << series[s].label << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io, "cannot write '" + path + "'");
  out << text;
  if (!out) fail(ErrorCode::io, "write to '" + path + "' failed");
}

}  // namespace mirrorlab
