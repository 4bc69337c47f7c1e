// Copyright (c) 2026, mirrorlab developers
// SPDX-License-Identifier: Apache-2.0
//
// Desk-scale experiments: low-rank matrix sensing with regularization
// schedules, diagonal linear networks, sparse coding, KKT residuals.

#pragma once

#include "mirrorlab/flow.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mirrorlab {

/// Metric series names, in CSV column order.
inline const std::vector<std::string>& metric_columns() {
  static const std::vector<std::string> cols = {"train_loss", "recon_error", "nuclear_norm",
                                                "ratio",      "l1",          "l1_l2_ratio"};
  return cols;
}

struct ExperimentReport {
  std::string experiment;
  std::uint64_t seed = 0;
  std::vector<std::int64_t> steps;
  std::vector<double> times;
  std::vector<double> a;
  std::map<std::string, std::vector<double>> series;
  std::vector<Vec> snapshots;  // model-space iterate at each record

  bool stopped = false;  // diverged or domain exit
  ErrorCode stop_reason = ErrorCode::diverged;
  std::string message;

  bool converged = false;
  std::optional<double> time_to_threshold;
  std::optional<double> kkt_residual;

  std::size_t size() const { return times.size(); }
  bool has(const std::string& metric) const { return series.count(metric) != 0; }
  const std::vector<double>& metric(const std::string& name) const;
  /// Last recorded value of a metric.
  double final(const std::string& name) const;
  /// Checks equal series lengths and increasing times.
  void validate() const;
};

// ---------------------------------------------------------------------------
// Matrix sensing

enum class SensingKind { random_symmetric, commuting_diagonal };
const char* to_string(SensingKind k);
SensingKind parse_sensing_kind(std::string_view name);

/// How U0 is built from beta: gram_identity gives U0 U0' = beta I,
/// scaled_identity gives U0 = beta I.
enum class SensingInit { gram_identity, scaled_identity };
const char* to_string(SensingInit k);
SensingInit parse_sensing_init(std::string_view name);

struct SensingConfig {
  Eigen::Index n = 20;
  Eigen::Index r = 5;
  Eigen::Index m = 120;
  double beta = 0.1;
  double eta = 0.25;
  std::int64_t steps = 5000;
  Schedule schedule = Schedule::turnoff(0.02, 625.0, 1250.0);
  SensingKind kind = SensingKind::random_symmetric;
  SensingInit init = SensingInit::gram_identity;
  Method method = Method::euler;
  int record_every = 10;
  double loss_threshold = 1e-7;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SensingProblem {
  Mat x_star;       // n x n, PSD, nuclear norm 1
  Mat measurements; // m x n^2, row i = vec(A_i) row-major
  Vec y;
};

SensingProblem make_sensing_problem(const SensingConfig& cfg);
/// f(X) = 1/(2m) sum (<A_i, X> - y_i)^2 on row-major vec(X).
Loss sensing_loss(const SensingProblem& prob);
Mat sensing_init(const SensingConfig& cfg);

/// Flow on U with X = U U': U <- U - eta (grad_U f + alpha_t U).
ExperimentReport matrix_sensing_run(const SensingConfig& cfg);

struct EigenBias {
  std::vector<double> times;
  std::vector<Vec> eigenvalues;  // descending
  std::vector<double> bregman_value;
  bool negative_eigenvalue = false;
};

/// Eigenvalues of X_t and the value of the entropy family attached to the
/// diagonal flow (x0 = beta, scale 1/4) along a commuting-diagonal run.
EigenBias sensing_eigen_bias(const ExperimentReport& report, const SensingConfig& cfg);

// ---------------------------------------------------------------------------
// Diagonal linear networks

enum class RegressionVariant { linear_l1, mw, mwz };
const char* to_string(RegressionVariant v);
RegressionVariant parse_regression_variant(std::string_view name);

struct RegressionConfig {
  Eigen::Index d = 40;
  Eigen::Index n = 100;
  Eigen::Index sparsity = 5;
  double eta = 1e-3;
  std::int64_t steps = 20000;  // per phase
  double alpha = 1.0;
  RegressionVariant variant = RegressionVariant::mw;
  Method method = Method::euler;
  int record_every = 100;
  std::uint64_t seed = 0;

  void validate() const;
  /// alpha for the first phase, zero for the second.
  Schedule schedule() const;
};

struct RegressionProblem {
  Mat Z;
  Vec y;
  Vec x_star;
};

RegressionProblem make_regression_problem(const RegressionConfig& cfg);
/// f(x) = |Z x - y|^2 / d.
Loss regression_loss(const RegressionProblem& prob);

/// Regularized phase followed by an equally long unregularized phase.
/// Init m = 0 and w = z = 1. The linear variant runs proximal gradient
/// steps with an L1 penalty.
ExperimentReport diagonal_network_run(const RegressionConfig& cfg);

// ---------------------------------------------------------------------------
// Sparse coding

struct SparseCodingConfig {
  double eta_scale = 0.02;  // step = eta_scale / Lip
  std::int64_t steps = 20000;
  int record_every = 20;
  double stationarity_frac = 0.05;
  std::uint64_t seed = 0;
};

struct SparseCodingProblem {
  Mat dictionary;  // p x n
  Vec target;      // length p
  Vec code_star;
};

/// Gaussian dictionary with N(0, 1/p) entries, target D c* + noise with a
/// `sparsity`-sparse c*.
SparseCodingProblem make_sparse_coding_problem(Eigen::Index p, Eigen::Index n, Eigen::Index sparsity,
                                               double noise, std::uint64_t seed);

/// Lipschitz constant of the gradient of |D x - z|^2 / p.
double sparse_coding_lipschitz(const Mat& dictionary);

/// Gradient flow on the code x = g(w) for |D x - z|^2 / p.
ExperimentReport sparse_coding_run(const Mat& dictionary, const Vec& target, const Parameterization& variant,
                                   const Schedule& schedule, const SparseCodingConfig& cfg);

/// Earliest recorded time after which the L1 series stays within
/// frac * |L1(0) - L1(end)| of its final value.
double stationarity_time(const ExperimentReport& report, double frac);

// ---------------------------------------------------------------------------

/// |(I - Z'(ZZ')^{-1}Z) grad R_b(x)| / max(1, |grad R_b(x)|) with
/// b = F.flow_parameter(a_T).
double kkt_residual(const Mat& Z, const Vec& x_inf, const LegendreFamily& F, double a_T);

}  // namespace mirrorlab
