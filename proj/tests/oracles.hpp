// Copyright (c) 2026, mirrorlab developers
// SPDX-License-Identifier: Apache-2.0
//
// Reference computations for the tests. Written separately from the library
// code paths they check: plain quadrature, finite differences and a
// feasibility-restoring Newton method for equality-constrained minimization.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Composite trapezoid rule on [0, t] with n panels.
inline double trapezoid(const std::function<double(double)>& f, double t, int n) {
  if (t <= 0) return 0.0;
  const double h = t / n;
  double s = 0.5 * (f(0.0) + f(t));
  for (int i = 1; i < n; ++i) s += f(i * h);
  return s * h;
}

// Composite Simpson; n is rounded up to even.
inline double simpson(const std::function<double(double)>& f, double lo, double hi, int n) {
  if (n % 2) ++n;
  const double h = (hi - lo) / n;
  double s = f(lo) + f(hi);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
  return s * h / 3.0;
}

inline double fd_step(double x) { return 1e-6 * std::max(1.0, std::abs(x)); }

// Central-difference Jacobian of f at x.
inline Mat fd_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x) {
  const Vec f0 = f(x);
  Mat J(f0.size(), x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double h = fd_step(x[j]);
    Vec xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    J.col(j) = (f(xp) - f(xm)) / (2 * h);
  }
  return J;
}

inline Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& x) {
  Vec g(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double h = fd_step(x[j]);
    Vec xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    g[j] = (f(xp) - f(xm)) / (2 * h);
  }
  return g;
}

inline double rel_err(const Mat& a, const Mat& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

// Separable convex function given coordinatewise: value, derivative, second
// derivative, and a predicate for the open domain.
struct Separable {
  std::function<double(Eigen::Index, double)> f;
  std::function<double(Eigen::Index, double)> df;
  std::function<double(Eigen::Index, double)> d2f;
  std::function<bool(Eigen::Index, double)> inside = [](Eigen::Index, double) { return true; };
};

// Hyperbolic entropy for m (.) w started at (m0, w0), a <= 0. Solving the
// rotated factor ODEs gives x = C sinh(2 mu + l), C = e^{2a} |u0 v0|,
// l = log|u0/v0|; this is its antiderivative in x.
inline Separable hyperbolic_entropy(const Vec& m0, const Vec& w0, double a) {
  const Vec u = (m0 + w0) / std::numbers::sqrt2;
  const Vec v = (m0 - w0) / std::numbers::sqrt2;
  Separable s;
  auto C = [=](Eigen::Index i) { return std::exp(2 * a) * std::abs(u[i] * v[i]); };
  auto L = [=](Eigen::Index i) { return std::log(std::abs(u[i] / v[i])); };
  s.f = [=](Eigen::Index i, double x) {
    const double c = C(i);
    return 0.5 * (x * std::asinh(x / c) - std::sqrt(x * x + c * c) - L(i) * x);
  };
  s.df = [=](Eigen::Index i, double x) { return 0.5 * (std::asinh(x / C(i)) - L(i)); };
  s.d2f = [=](Eigen::Index i, double x) { return 0.5 / std::hypot(x, C(i)); };
  return s;
}

// scale * (x log(x / B) - x), B = x0 e^{2a}.
inline Separable entropy(const Vec& x0, double scale, double a) {
  Separable s;
  s.f = [=](Eigen::Index i, double x) { return scale * (x * std::log(x / (x0[i] * std::exp(2 * a))) - x); };
  s.df = [=](Eigen::Index i, double x) { return scale * std::log(x / (x0[i] * std::exp(2 * a))); };
  s.d2f = [=](Eigen::Index, double x) { return scale / x; };
  s.inside = [](Eigen::Index, double x) { return x > 0; };
  return s;
}

struct NewtonResult {
  Vec x;
  int iterations = 0;
  double kkt_norm = std::numeric_limits<double>::infinity();
  bool converged = false;
};

// min sum_i R(x_i) subject to Z x = y, by infeasible-start Newton on the KKT
// system with backtracking on the residual norm and domain checks.
inline NewtonResult constrained_min(const Separable& R, const Mat& Z, const Vec& y, Vec x, int max_iter = 200,
                                    double tol = 1e-12) {
  const Eigen::Index n = x.size(), m = Z.rows();
  Vec nu = Vec::Zero(m);
  auto residual = [&](const Vec& xx, const Vec& nn) {
    Vec r(n + m);
    for (Eigen::Index i = 0; i < n; ++i) r[i] = R.df(i, xx[i]);
    r.head(n) += Z.transpose() * nn;
    r.tail(m) = Z * xx - y;
    return r;
  };
  NewtonResult out;
  for (int it = 0; it < max_iter; ++it) {
    const Vec r = residual(x, nu);
    out.kkt_norm = r.norm();
    out.iterations = it;
    if (out.kkt_norm < tol) {
      out.converged = true;
      break;
    }
    Mat K = Mat::Zero(n + m, n + m);
    for (Eigen::Index i = 0; i < n; ++i) K(i, i) = R.d2f(i, x[i]);
    K.topRightCorner(n, m) = Z.transpose();
    K.bottomLeftCorner(m, n) = Z;
    const Vec step = K.fullPivLu().solve(-r);
    double t = 1.0;
    for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
      const Vec xn = x + t * step.head(n);
      bool ok = true;
      for (Eigen::Index i = 0; i < n && ok; ++i) ok = R.inside(i, xn[i]);
      if (!ok) continue;
      if (residual(xn, nu + t * step.tail(m)).norm() <= (1 - 0.01 * t) * out.kkt_norm) break;
    }
    x += t * step.head(n);
    nu += t * step.tail(m);
  }
  out.x = x;
  if (!out.converged) out.converged = residual(x, nu).norm() < 1e-9;
  return out;
}

}  // namespace oracle
