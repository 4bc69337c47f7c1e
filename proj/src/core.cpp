// Copyright (c) 2026, mirrorlab developers
// SPDX-License-Identifier: Apache-2.0

#include "mirrorlab/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace mirrorlab {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::input: return "input error";
    case ErrorCode::domain: return "domain error";
    case ErrorCode::dimension: return "dimension mismatch";
    case ErrorCode::diverged: return "diverged";
    case ErrorCode::unsupported: return "unsupported operation";
    case ErrorCode::parse: return "parse error";
    case ErrorCode::io: return "i/o error";
    case ErrorCode::domain_exit: return "domain exit";
    case ErrorCode::rank_deficient: return "rank deficient";
  }
  return "error";
}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

// ---------------------------------------------------------------------------

const char* to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::constant: return "constant";
    case ScheduleKind::turnoff: return "turnoff";
    case ScheduleKind::linear_decay: return "linear-decay";
    case ScheduleKind::cosine_decay: return "cosine-decay";
  }
  return "?";
}

ScheduleKind parse_schedule_kind(std::string_view name) {
  if (name == "constant") return ScheduleKind::constant;
  if (name == "turnoff" || name == "turn-off") return ScheduleKind::turnoff;
  if (name == "linear-decay" || name == "linear") return ScheduleKind::linear_decay;
  if (name == "cosine-decay" || name == "cosine") return ScheduleKind::cosine_decay;
  fail(ErrorCode::input, "unknown schedule kind '" + std::string(name) + "'");
}

Schedule::Schedule(ScheduleKind kind, double alpha0, double turnoff_time, double t_end)
    : kind_(kind), alpha0_(alpha0), turnoff_time_(turnoff_time), t_end_(t_end) {
  require(std::isfinite(alpha0) && alpha0 >= 0.0, ErrorCode::input,
          "schedule strength alpha0 must be finite and nonnegative");
  require(std::isfinite(t_end) && t_end > 0.0, ErrorCode::input,
          "schedule horizon t_end must be positive");
  if (kind != ScheduleKind::constant) {
    require(std::isfinite(turnoff_time) && turnoff_time >= 0.0, ErrorCode::input,
            "schedule turn-off time must be finite and nonnegative");
  }
  if ((kind == ScheduleKind::linear_decay || kind == ScheduleKind::cosine_decay) && alpha0 > 0.0) {
    require(turnoff_time > 0.0, ErrorCode::input, "decay schedules need a positive decay time");
  }
}

Schedule Schedule::constant(double alpha0, double t_end) {
  return Schedule(ScheduleKind::constant, alpha0, 0.0, t_end);
}
Schedule Schedule::turnoff(double alpha0, double turnoff_time, double t_end) {
  return Schedule(ScheduleKind::turnoff, alpha0, turnoff_time, t_end);
}
Schedule Schedule::linear_decay(double alpha0, double turnoff_time, double t_end) {
  return Schedule(ScheduleKind::linear_decay, alpha0, turnoff_time, t_end);
}
Schedule Schedule::cosine_decay(double alpha0, double turnoff_time, double t_end) {
  return Schedule(ScheduleKind::cosine_decay, alpha0, turnoff_time, t_end);
}

double Schedule::alpha(double t) const {
  require(t >= 0.0, ErrorCode::input, "schedule evaluated at negative time");
  const double T = turnoff_time_;
  switch (kind_) {
    case ScheduleKind::constant: return alpha0_;
    case ScheduleKind::turnoff: return t < T ? alpha0_ : 0.0;
    case ScheduleKind::linear_decay: return t < T ? alpha0_ * (1.0 - t / T) : 0.0;
    case ScheduleKind::cosine_decay:
      return t < T ? 0.5 * alpha0_ * (1.0 + std::cos(std::numbers::pi * t / T)) : 0.0;
  }
  return 0.0;
}

double Schedule::a(double t) const {
  require(t >= 0.0, ErrorCode::input, "schedule evaluated at negative time");
  const double T = turnoff_time_;
  // + 0.0 turns -0 into 0 so CSV output reads cleanly
  switch (kind_) {
    case ScheduleKind::constant: return -alpha0_ * t + 0.0;
    case ScheduleKind::turnoff: return -alpha0_ * std::min(t, T) + 0.0;
    case ScheduleKind::linear_decay:
      if (alpha0_ == 0.0) return 0.0;
      if (t >= T) return -0.5 * alpha0_ * T;
      return -alpha0_ * (t - t * t / (2.0 * T)) + 0.0;
    case ScheduleKind::cosine_decay:
      if (alpha0_ == 0.0) return 0.0;
      if (t >= T) return -0.5 * alpha0_ * T;
      return -alpha0_ * (0.5 * t + T / (2.0 * std::numbers::pi) * std::sin(std::numbers::pi * t / T)) + 0.0;
  }
  return 0.0;
}

double Schedule::off_time() const {
  if (alpha0_ == 0.0) return 0.0;
  if (kind_ == ScheduleKind::constant) return std::numeric_limits<double>::infinity();
  return turnoff_time_;
}

double Schedule::total() const {
  if (alpha0_ == 0.0) return 0.0;
  switch (kind_) {
    case ScheduleKind::constant: return std::numeric_limits<double>::infinity();
    case ScheduleKind::turnoff: return alpha0_ * turnoff_time_;
    case ScheduleKind::linear_decay:
    case ScheduleKind::cosine_decay: return 0.5 * alpha0_ * turnoff_time_;
  }
  return 0.0;
}

// ---------------------------------------------------------------------------

const char* to_string(Method m) { return m == Method::euler ? "euler" : "rk4"; }

Method parse_method(std::string_view name) {
  if (name == "euler") return Method::euler;
  if (name == "rk4") return Method::rk4;
  fail(ErrorCode::input, "unknown integration method '" + std::string(name) + "'");
}

void IntegratorConfig::validate() const {
  require(std::isfinite(step) && step > 0.0, ErrorCode::input, "integrator step must be positive");
  require(std::isfinite(t_end) && t_end > 0.0, ErrorCode::input, "integrator t_end must be positive");
  require(step <= t_end * (1.0 + 1e-12), ErrorCode::input, "integrator step exceeds t_end");
  require(record_every >= 1, ErrorCode::input, "record_every must be at least 1");
}

std::int64_t IntegratorConfig::num_steps() const {
  return std::max<std::int64_t>(1, std::llround(t_end / step));
}

// ---------------------------------------------------------------------------

void Trajectory::push(double t, State s) {
  times_.push_back(t);
  states_.push_back(std::move(s));
}

void Trajectory::add_metric(const std::string& name, double value) { metrics_[name].push_back(value); }

const std::vector<double>& Trajectory::metric(const std::string& name) const {
  auto it = metrics_.find(name);
  require(it != metrics_.end(), ErrorCode::input, "trajectory has no metric '" + name + "'");
  return it->second;
}

void Trajectory::validate() const {
  require(times_.size() == states_.size(), ErrorCode::input, "trajectory state/time length mismatch");
  for (std::size_t i = 1; i < times_.size(); ++i) {
    require(times_[i] > times_[i - 1], ErrorCode::input, "trajectory times not strictly increasing");
    require(states_[i].a <= states_[i - 1].a, ErrorCode::input, "trajectory a-series increased");
  }
  for (const auto& [name, series] : metrics_) {
    require(series.size() == times_.size(), ErrorCode::input,
            "trajectory metric '" + name + "' has the wrong length");
  }
}

// ---------------------------------------------------------------------------

Loss Loss::quadratic(Mat H, Vec c) {
  require(H.rows() == H.cols() && H.rows() == c.size(), ErrorCode::dimension,
          "quadratic loss needs a square H matching c");
  Loss loss;
  loss.value = [H, c](const Vec& x) {
    const Vec d = x - c;
    return 0.5 * d.dot(H * d);
  };
  loss.grad = [H, c](const Vec& x) -> Vec { return H * (x - c); };
  return loss;
}

Loss Loss::least_squares(Mat Z, Vec y, double scale) {
  require(Z.rows() == y.size(), ErrorCode::dimension, "least squares needs one label per row");
  Loss loss;
  loss.value = [Z, y, scale](const Vec& x) {
    if (Z.rows() == 0) return 0.0;
    return scale * (Z * x - y).squaredNorm();
  };
  loss.grad = [Z, y, scale](const Vec& x) -> Vec {
    if (Z.rows() == 0) return Vec::Zero(x.size());
    return 2.0 * scale * (Z.transpose() * (Z * x - y));
  };
  return loss;
}

// ---------------------------------------------------------------------------

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

std::uint64_t Rng::next_u64() { return engine_(); }

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
  if (spare_) {
    const double v = *spare_;
    spare_.reset();
    return v;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  return r * std::cos(theta);
}

Vec Rng::normal_vec(Eigen::Index n) {
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = normal();
  return v;
}

Mat Rng::normal_mat(Eigen::Index rows, Eigen::Index cols) {
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal();
  return m;
}

Vec Rng::uniform_vec(Eigen::Index n, double lo, double hi) {
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = uniform(lo, hi);
  return v;
}

std::vector<Eigen::Index> Rng::choose(Eigen::Index n, Eigen::Index k) {
  require(k >= 0 && k <= n, ErrorCode::input, "cannot choose more indices than available");
  std::vector<Eigen::Index> pool(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
  // partial Fisher-Yates
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto span = static_cast<std::uint64_t>(n - i);
    const auto j = i + static_cast<Eigen::Index>(next_u64() % span);
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
  }
  pool.resize(static_cast<std::size_t>(k));
  return pool;
}

// ---------------------------------------------------------------------------

Vec singular_values(const Mat& X) {
  Eigen::JacobiSVD<Mat> svd(X);
  return svd.singularValues();
}

double nuclear_norm(const Mat& X) { return singular_values(X).sum(); }

double nuclear_frobenius_ratio(const Mat& X) {
  const double fro = X.norm();
  require(fro > 0.0 && std::isfinite(fro), ErrorCode::domain,
          "nuclear/Frobenius ratio undefined for the zero matrix");
  return nuclear_norm(X) / fro;
}

double smallest_singular_value(const Mat& X) {
  if (X.size() == 0) return 0.0;
  const Vec s = singular_values(X);
  return s[s.size() - 1];
}

Mat symmetrize(const Mat& X) { return 0.5 * (X + X.transpose()); }

Mat unflatten_square(const Vec& v) {
  const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  require(n * n == v.size(), ErrorCode::dimension, "vector length is not a perfect square");
  Mat X(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) X(i, j) = v[i * n + j];
  return X;
}

Vec flatten_row_major(const Mat& X) {
  Vec v(X.size());
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    for (Eigen::Index j = 0; j < X.cols(); ++j) v[i * X.cols() + j] = X(i, j);
  return v;
}

double inf_norm(const Vec& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

bool all_finite(const Vec& v) { return v.allFinite(); }

}  // namespace mirrorlab
