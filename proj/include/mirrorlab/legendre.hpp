// Copyright (c) 2026, mirrorlab developers
// SPDX-License-Identifier: Apache-2.0
//
// Time-dependent Legendre families R_a with their dual maps Q_a.

#pragma once

#include "mirrorlab/core.hpp"

#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace mirrorlab {

enum class FamilyKind { hyperbolic_entropy, entropy, log_cosh, diff_powers_flow, quadratic };

const char* to_string(FamilyKind kind);

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  double length() const { return hi - lo; }
  bool contains(double v) const { return v > lo && v < hi; }
  static Interval all() { return {}; }
};

/// Per-coordinate open intervals for the dual variable mu and the primal x.
struct DomainInfo {
  std::vector<Interval> dual;
  std::vector<Interval> primal;
};

/// A parameterized Legendre function. The family parameter `a` is the
/// accumulated regularization integral (nonpositive in every flow); a few
/// families use a reparameterized argument, see flow_parameter().
class LegendreFamily {
 public:
  virtual ~LegendreFamily() = default;

  virtual FamilyKind kind() const = 0;
  virtual std::string name() const { return to_string(kind()); }
  virtual Eigen::Index dim() const = 0;
  /// Closed interval of valid a (bounds may be infinite); an open upper end
  /// is reported by a_open_above().
  virtual Interval a_range() const = 0;
  virtual bool a_open_above() const { return false; }

  /// Family parameter for accumulated integral a_t of a flow.
  virtual double flow_parameter(double a_t) const { return a_t; }

  virtual double value(double a, const Vec& x) const;
  virtual Vec grad(double a, const Vec& x) const = 0;
  virtual Vec dual_map(double a, const Vec& mu) const = 0;
  virtual Mat dual_hessian(double a, const Vec& mu) const = 0;
  /// Hessian of R_a at x; by default the inverse of the dual Hessian.
  virtual Mat hessian(double a, const Vec& x) const;
  virtual Vec argmin_position(double a) const { return dual_map(a, Vec::Zero(dim())); }
  virtual DomainInfo domain(double a) const;
  virtual bool in_primal_domain(double a, const Vec& x) const;

  double bregman_divergence(double a, const Vec& x, const Vec& y) const;

 protected:
  void check_a(double a) const;
  void check_x(double a, const Vec& x) const;
  void check_mu(const Vec& mu) const;
};

using FamilyPtr = std::shared_ptr<const LegendreFamily>;

/// Hyperbolic entropy induced by g = m*w with weight decay, written in the
/// rotated coordinates u0 = (m0 + w0)/sqrt2, v0 = (m0 - w0)/sqrt2. With
/// C = e^{2a}|u0 v0| and l = log|u0/v0|,
///   R_a(x) = 1/2 sum x asinh(x/C) - sqrt(x^2 + C^2) - l x.
/// Needs |m0| != |w0| in every coordinate.
FamilyPtr make_hyperbolic_entropy(Vec u0, Vec v0);
FamilyPtr make_hyperbolic_entropy_from_hadamard(const Vec& m0, const Vec& w0);

/// R_a(x) = scale * sum x log(x / B) - x with B = x0 e^{2a}, x > 0.
/// scale = 1/2 matches g = m*w started at m0 = w0 (x0 = m0^2).
FamilyPtr make_entropy(Vec x0, double scale = 1.0);

/// Log-cosh family with P = u0^2 - 2a, Q = v0^2 - 2a:
///   R_a(x) = 1/4 sum P log(1 + e^{-2x}) + Q log(1 + e^{2x}),
/// valid for a < min(u0^2, v0^2) / 2. The log-ratio flow with accumulated
/// integral a_t corresponds to a = -a_t.
FamilyPtr make_log_cosh(Vec u0, Vec v0);

/// Dual map of the u^2k - v^2k flow; R_a itself has no closed form.
/// With K = 2k(2k - 2), p = k/(k - 1), c_u = u0^{2-2k}/K, c_v = v0^{2-2k}/K:
///   x = (K (c_u - mu - a))^{-p} - (K (c_v + mu - a))^{-p},
/// defined for mu in (a - c_v, c_u - a). Requires k >= 2.
FamilyPtr make_diff_powers_flow(int k, Vec u0, Vec v0);

/// Q_a(mu) = 1/4 |exp(aB + sum mu_i A_i) w_init|^2 for symmetric, pairwise
/// commuting A_i and B, evaluated in a joint eigenbasis.
FamilyPtr make_quadratic(const std::vector<Mat>& A, const Mat& B, const Vec& w_init);

struct ContractingReport {
  double max_positive_slope = 0.0;
  bool pass = false;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
  double worst_a = 0.0;
  Vec worst_x;
};

/// Finite-difference slope of a -> R_a(x) between consecutive grid points.
/// Samples leaving the domain at some a are skipped and counted.
ContractingReport contracting_check(const LegendreFamily& F, const std::vector<double>& a_grid,
                                    const std::vector<Vec>& x_samples, double tol);

/// Safeguarded scalar Newton with bisection fallback for a strictly
/// increasing phi on (lo, hi): returns the root of phi(t) = target.
double monotone_solve(const std::function<double(double)>& phi, const std::function<double(double)>& dphi,
                      double target, double lo, double hi, double guess, double tol = 1e-12,
                      int max_iter = 100);

}  // namespace mirrorlab
