// Copyright (c) 2026, mirrorlab developers
// SPDX-License-Identifier: Apache-2.0
//
// Parameterizations x = g(w) paired with an explicit regularizer h(w).

#pragma once

#include "mirrorlab/core.hpp"

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace mirrorlab {

enum class Variant {
  hadamard,
  diff_squares,
  diff_powers,
  log_ratio,
  quadratic_commuting,
  sym_factor,
  deep_hadamard,
};

const char* to_string(Variant v);
Variant parse_variant(std::string_view name);

/// Immutable (g, h) pair with analytic first derivatives.
///
/// Parameter layouts, all flat vectors:
///   hadamard        [m; w]                g = m*w, h = (|m|^2 + |w|^2) / 2
///   diff_squares    [u; v]                g = u^2 - v^2, h = sum c_u u^2 - c_v v^2
///   diff_powers     [u; v]                g = u^2k - v^2k, h = sum u^2k + v^2k
///   log_ratio       [u; v]                g = log u - log v, h = sum log u + log v
///   quadratic       w (length d)          g_i = w'A_i w / 2, h = w'B w / 2
///   sym_factor      U row-major (N*N)     g = vec(U U'), h = |U|_F^2 / 2
///   deep_hadamard   [f_1; ...; f_k]       g = prod f_l, h = reg_scale * sum |f_l|^2
class Parameterization {
 public:
  static Parameterization hadamard(Vec m0, Vec w0);
  static Parameterization diff_squares(Vec u0, Vec v0, double c_u = 1.0, double c_v = -1.0);
  static Parameterization diff_powers(int k, Vec u0, Vec v0);
  static Parameterization log_ratio(Vec u0, Vec v0);
  static Parameterization quadratic_commuting(std::vector<Mat> A, Mat B, Vec w0);
  static Parameterization sym_factor(const Mat& U0);
  static Parameterization deep_hadamard(const std::vector<Vec>& factors, double reg_scale = 0.5);

  Variant variant() const { return impl_->variant; }
  std::string name() const;
  Eigen::Index D() const { return impl_->D; }
  Eigen::Index n() const { return impl_->n; }
  const Vec& w_init() const { return impl_->w_init; }

  int power() const { return impl_->k; }         // diff_powers exponent k
  int depth() const { return impl_->k; }         // deep_hadamard factor count
  double c_u() const { return impl_->c_u; }
  double c_v() const { return impl_->c_v; }
  double reg_scale() const { return impl_->reg_scale; }
  const std::vector<Mat>& A() const { return impl_->A; }
  const Mat& B() const { return impl_->B; }
  /// Side length N of the square factor for sym_factor.
  Eigen::Index side() const { return impl_->side; }

  Vec g(const Vec& w) const;
  double h(const Vec& w) const;
  /// n x D Jacobian of g.
  Mat jacobian(const Vec& w) const;
  Vec grad_h(const Vec& w) const;
  /// Gradient of the i-th model coordinate; i == n() selects h.
  Vec coordinate_gradient(const Vec& w, Eigen::Index i) const;

  /// -(J_g(w)' grad_f_x + alpha grad_h(w)).
  Vec flow_rhs(const Vec& w, const Vec& grad_f_x, double alpha) const;

  /// Hard domain (log_ratio needs u, v > 0).
  bool in_domain(const Vec& w) const;
  /// Region where the mirror-flow theory applies (log_ratio: u, v > 1).
  bool in_theory_region(const Vec& w) const;

 private:
  struct Impl {
    Variant variant = Variant::hadamard;
    Eigen::Index D = 0;
    Eigen::Index n = 0;
    Vec w_init;
    int k = 1;
    double c_u = 1.0;
    double c_v = -1.0;
    double reg_scale = 0.5;
    Eigen::Index side = 0;
    std::vector<Mat> A;
    Mat B;
  };

  explicit Parameterization(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  void check_w(const Vec& w) const;

  std::shared_ptr<const Impl> impl_;
};

/// Initialization of [u; v] for g = u^2k - v^2k with u^2k v^2k = beta^2 / 4
/// and g(u0, v0) = x.
std::pair<Vec, Vec> diff_powers_init(const Vec& x, double beta, int k);

/// Initialization of [u; v] for g = log u - log v with u = 1/(beta (1 + e^-x)),
/// v = 1/(beta (1 + e^x)), so that g(u0, v0) = x.
std::pair<Vec, Vec> log_ratio_init(const Vec& x, double beta);

}  // namespace mirrorlab
