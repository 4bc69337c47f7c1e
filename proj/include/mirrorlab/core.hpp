// Copyright (c) 2026, mirrorlab developers
// SPDX-License-Identifier: Apache-2.0
//
// Shared numeric substrate: errors, schedules, integrator settings,
// trajectories, seeded randomness and small dense linear algebra helpers.

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mirrorlab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class ErrorCode {
  input = 1,
  domain = 2,
  dimension = 3,
  diverged = 4,
  unsupported = 5,
  parse = 6,
  io = 7,
  domain_exit = 8,
  rank_deficient = 9,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

// ---------------------------------------------------------------------------
// Schedules

enum class ScheduleKind { constant, turnoff, linear_decay, cosine_decay };

const char* to_string(ScheduleKind kind);
ScheduleKind parse_schedule_kind(std::string_view name);

/// Regularization strength alpha(t) together with its accumulated integral
/// a(t) = -int_0^t alpha(s) ds, both in closed form.
///
/// The decaying kinds ramp from alpha0 to zero on [0, T] (linear, or the
/// half-cosine alpha0 (1 + cos(pi t / T)) / 2) and are zero afterwards, so
/// their total integral is alpha0 T / 2.
class Schedule {
 public:
  Schedule(ScheduleKind kind, double alpha0, double turnoff_time, double t_end);

  static Schedule constant(double alpha0, double t_end);
  static Schedule turnoff(double alpha0, double turnoff_time, double t_end);
  static Schedule linear_decay(double alpha0, double turnoff_time, double t_end);
  static Schedule cosine_decay(double alpha0, double turnoff_time, double t_end);
  static Schedule none(double t_end) { return constant(0.0, t_end); }

  double alpha(double t) const;
  double a(double t) const;

  /// Time after which alpha is identically zero; +inf for a nonzero constant.
  double off_time() const;
  /// -a(infinity), or +inf for a nonzero constant schedule.
  double total() const;

  ScheduleKind kind() const { return kind_; }
  double alpha0() const { return alpha0_; }
  double turnoff_time() const { return turnoff_time_; }
  double t_end() const { return t_end_; }

 private:
  ScheduleKind kind_;
  double alpha0_;
  double turnoff_time_;
  double t_end_;
};

// ---------------------------------------------------------------------------
// Integration settings and trajectories

enum class Method { euler, rk4 };

const char* to_string(Method m);
Method parse_method(std::string_view name);

struct IntegratorConfig {
  Method method = Method::rk4;
  double step = 1e-3;
  double t_end = 1.0;
  int record_every = 1;

  void validate() const;
  std::int64_t num_steps() const;
};

struct State {
  Vec w;   // parameters (empty for pure mirror-flow runs)
  Vec x;   // model-space iterate
  Vec mu;  // dual iterate (empty for parameter-space runs)
  double a = 0.0;
  std::optional<double> y;  // h(w) when available
};

class Trajectory {
 public:
  void push(double t, State s);
  void add_metric(const std::string& name, double value);

  std::size_t size() const { return times_.size(); }
  bool empty() const { return times_.empty(); }
  const std::vector<double>& times() const { return times_; }
  const std::vector<State>& states() const { return states_; }
  const State& back() const { return states_.back(); }
  const std::map<std::string, std::vector<double>>& metrics() const { return metrics_; }
  const std::vector<double>& metric(const std::string& name) const;

  /// Checks the invariants: strictly increasing times, a nonincreasing and
  /// every metric series as long as the state list.
  void validate() const;

 private:
  std::vector<double> times_;
  std::vector<State> states_;
  std::map<std::string, std::vector<double>> metrics_;
};

// ---------------------------------------------------------------------------
// Losses

/// A differentiable loss on model space.
struct Loss {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> grad;

  /// 0.5 (x - c)^T H (x - c).
  static Loss quadratic(Mat H, Vec c);
  /// scale * ||Z x - y||^2. With zero rows the loss is identically zero.
  static Loss least_squares(Mat Z, Vec y, double scale);
};

// ---------------------------------------------------------------------------
// Randomness

/// 64-bit seeded generator (mt19937_64 bits, portable Box-Muller normals),
/// so a seed reproduces the same numbers on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  double uniform();  // [0, 1)
  double uniform(double lo, double hi);
  double normal();
  Vec normal_vec(Eigen::Index n);
  Mat normal_mat(Eigen::Index rows, Eigen::Index cols);
  Vec uniform_vec(Eigen::Index n, double lo, double hi);
  /// k distinct indices from [0, n), in sampling order.
  std::vector<Eigen::Index> choose(Eigen::Index n, Eigen::Index k);

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

// ---------------------------------------------------------------------------
// Linear algebra helpers

Vec singular_values(const Mat& X);
double nuclear_norm(const Mat& X);
double nuclear_frobenius_ratio(const Mat& X);
/// n-th largest singular value of X where n = min(rows, cols).
double smallest_singular_value(const Mat& X);
Mat symmetrize(const Mat& X);
/// Reshape a row-major flattened square matrix.
Mat unflatten_square(const Vec& v);
Vec flatten_row_major(const Mat& X);
double inf_norm(const Vec& v);
bool all_finite(const Vec& v);

}  // namespace mirrorlab
