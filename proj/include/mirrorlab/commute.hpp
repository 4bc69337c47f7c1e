// Copyright (c) 2026, mirrorlab developers
// SPDX-License-Identifier: Apache-2.0
//
// Numeric checks of the structural hypotheses on a parameterization:
// regularity, commuting gradient fields, separable compatibility of h and g.

#pragma once

#include "mirrorlab/reparam.hpp"

#include <functional>
#include <string>
#include <vector>

namespace mirrorlab {

/// [grad g_i, grad g_j](w) = H_j grad g_i - H_i grad g_j, with the Hessians
/// H taken by central differences of the analytic gradients. Index n()
/// selects h.
Vec lie_bracket(const Parameterization& p, Eigen::Index i, Eigen::Index j, const Vec& w);

struct CommutingReport {
  std::string variant;
  double tol = 0.0;
  double max_norm = 0.0;
  bool pass = false;
  Vec worst_sample;
  Eigen::Index worst_i = 0;
  Eigen::Index worst_j = 0;

  std::string to_json() const;
};

struct SampleBox {
  double lo = -2.0;
  double hi = 2.0;
};

/// Default sampling box for a variant ([0.5, 2.5] where positivity matters).
SampleBox default_box(const Parameterization& p);

/// Samples w uniformly in the box and evaluates every pairwise bracket,
/// including the h coordinate.
CommutingReport check_commuting(const Parameterization& p, int n_samples, double tol, std::uint64_t seed);
CommutingReport check_commuting(const Parameterization& p, int n_samples, double tol, std::uint64_t seed,
                                SampleBox box);

/// True iff the n-th largest singular value of J_g(w) exceeds tol.
bool check_regular(const Parameterization& p, const Vec& w, double tol);

enum class SeparableStatus { pass, fail, inconclusive };

struct SeparableReport {
  double c_estimate = 0.0;
  double max_residual = 0.0;
  SeparableStatus status = SeparableStatus::inconclusive;
  bool pass() const { return status == SeparableStatus::pass; }
};

/// Least-squares fit of h = c g + d on the samples; pass iff
/// max |h - c g - d| <= tol * max(1, max |h|). Inconclusive when g is
/// constant on the samples.
SeparableReport check_separable_pair(const std::function<double(double)>& g_scalar,
                                     const std::function<double(double)>& h_scalar,
                                     const std::vector<double>& samples, double tol = 1e-9);

struct QuadraticCommutingReport {
  double max_commutator_fro = 0.0;
  bool pass = false;
};

/// Largest |MN - NM|_F over all pairs drawn from {A_i} and B.
QuadraticCommutingReport check_quadratic_commuting(const std::vector<Mat>& A, const Mat& B, double tol = 1e-10);

}  // namespace mirrorlab
