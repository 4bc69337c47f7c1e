// Copyright (c) 2026, mirrorlab developers
// SPDX-License-Identifier: Apache-2.0

#include "mirrorlab/reparam.hpp"

#include <cmath>

namespace mirrorlab {

using Eigen::Index;

const char* to_string(Variant v) {
  switch (v) {
    case Variant::hadamard: return "hadamard";
    case Variant::diff_squares: return "diff-squares";
    case Variant::diff_powers: return "diff-powers";
    case Variant::log_ratio: return "log-ratio";
    case Variant::quadratic_commuting: return "quadratic-commuting";
    case Variant::sym_factor: return "sym-factor";
    case Variant::deep_hadamard: return "deep-hadamard";
  }
  return "?";
}

Variant parse_variant(std::string_view name) {
  for (auto v : {Variant::hadamard, Variant::diff_squares, Variant::diff_powers, Variant::log_ratio,
                 Variant::quadratic_commuting, Variant::sym_factor, Variant::deep_hadamard}) {
    if (name == to_string(v)) return v;
  }
  fail(ErrorCode::input, "unknown parameterization '" + std::string(name) + "'");
}

namespace {

void require_pair(const Vec& a, const Vec& b, const char* what) {
  require(a.size() == b.size() && a.size() > 0, ErrorCode::dimension,
          std::string(what) + ": the two halves must be nonempty and of equal length");
  require(a.allFinite() && b.allFinite(), ErrorCode::input, std::string(what) + ": non-finite initialization");
}

void require_symmetric(const Mat& M, const char* what) {
  require(M.rows() == M.cols(), ErrorCode::dimension, std::string(what) + " must be square");
  require((M - M.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + M.cwiseAbs().maxCoeff()),
          ErrorCode::input, std::string(what) + " must be symmetric");
}

}  // namespace

Parameterization Parameterization::hadamard(Vec m0, Vec w0) {
  require_pair(m0, w0, "hadamard");
  auto p = std::make_shared<Impl>();
  p->variant = Variant::hadamard;
  p->n = m0.size();
  p->D = 2 * p->n;
  p->w_init.resize(p->D);
  p->w_init << m0, w0;
  p->k = 2;
  return Parameterization(p);
}

Parameterization Parameterization::diff_squares(Vec u0, Vec v0, double c_u, double c_v) {
  require_pair(u0, v0, "diff-squares");
  auto p = std::make_shared<Impl>();
  p->variant = Variant::diff_squares;
  p->n = u0.size();
  p->D = 2 * p->n;
  p->w_init.resize(p->D);
  p->w_init << u0, v0;
  p->c_u = c_u;
  p->c_v = c_v;
  return Parameterization(p);
}

Parameterization Parameterization::diff_powers(int k, Vec u0, Vec v0) {
  require(k >= 1, ErrorCode::input, "diff-powers exponent k must be at least 1");
  require_pair(u0, v0, "diff-powers");
  auto p = std::make_shared<Impl>();
  p->variant = Variant::diff_powers;
  p->n = u0.size();
  p->D = 2 * p->n;
  p->w_init.resize(p->D);
  p->w_init << u0, v0;
  p->k = k;
  return Parameterization(p);
}

Parameterization Parameterization::log_ratio(Vec u0, Vec v0) {
  require_pair(u0, v0, "log-ratio");
  require((u0.array() > 0).all() && (v0.array() > 0).all(), ErrorCode::domain,
          "log-ratio initialization must be positive");
  auto p = std::make_shared<Impl>();
  p->variant = Variant::log_ratio;
  p->n = u0.size();
  p->D = 2 * p->n;
  p->w_init.resize(p->D);
  p->w_init << u0, v0;
  return Parameterization(p);
}

Parameterization Parameterization::quadratic_commuting(std::vector<Mat> A, Mat B, Vec w0) {
  require(!A.empty(), ErrorCode::input, "quadratic parameterization needs at least one A_i");
  const Index d = w0.size();
  require(d > 0, ErrorCode::dimension, "quadratic parameterization needs a nonempty w0");
  for (const auto& Ai : A) {
    require(Ai.rows() == d, ErrorCode::dimension, "A_i size must match w0");
    require_symmetric(Ai, "A_i");
  }
  require(B.rows() == d, ErrorCode::dimension, "B size must match w0");
  require_symmetric(B, "B");
  auto p = std::make_shared<Impl>();
  p->variant = Variant::quadratic_commuting;
  p->n = static_cast<Index>(A.size());
  p->D = d;
  p->w_init = std::move(w0);
  p->A = std::move(A);
  p->B = std::move(B);
  return Parameterization(p);
}

Parameterization Parameterization::sym_factor(const Mat& U0) {
  require(U0.rows() == U0.cols() && U0.rows() > 0, ErrorCode::dimension, "sym-factor needs a square U0");
  auto p = std::make_shared<Impl>();
  p->variant = Variant::sym_factor;
  p->side = U0.rows();
  p->n = p->side * p->side;
  p->D = p->n;
  p->w_init = flatten_row_major(U0);
  return Parameterization(p);
}

Parameterization Parameterization::deep_hadamard(const std::vector<Vec>& factors, double reg_scale) {
  require(factors.size() >= 2, ErrorCode::input, "deep-hadamard needs at least two factors");
  require(reg_scale > 0.0, ErrorCode::input, "deep-hadamard regularizer scale must be positive");
  const Index n = factors.front().size();
  require(n > 0, ErrorCode::dimension, "deep-hadamard factors must be nonempty");
  for (const auto& f : factors) require(f.size() == n, ErrorCode::dimension, "deep-hadamard factor sizes differ");
  auto p = std::make_shared<Impl>();
  p->variant = Variant::deep_hadamard;
  p->k = static_cast<int>(factors.size());
  p->n = n;
  p->D = n * p->k;
  p->w_init.resize(p->D);
  for (int l = 0; l < p->k; ++l) p->w_init.segment(l * n, n) = factors[static_cast<std::size_t>(l)];
  p->reg_scale = reg_scale;
  return Parameterization(p);
}

std::string Parameterization::name() const {
  std::string s = to_string(variant());
  if (variant() == Variant::diff_powers) s += "(k=" + std::to_string(power()) + ")";
  if (variant() == Variant::deep_hadamard) s += "(depth=" + std::to_string(depth()) + ")";
  return s;
}

void Parameterization::check_w(const Vec& w) const {
  require(w.size() == D(), ErrorCode::dimension,
          "parameter vector has length " + std::to_string(w.size()) + ", expected " + std::to_string(D()));
  if (variant() == Variant::log_ratio) {
    require(in_domain(w), ErrorCode::domain, "log-ratio parameters must be positive");
  }
}

bool Parameterization::in_domain(const Vec& w) const {
  if (w.size() != D()) return false;
  if (variant() == Variant::log_ratio) return (w.array() > 0).all();
  return true;
}

bool Parameterization::in_theory_region(const Vec& w) const {
  if (variant() == Variant::log_ratio) return w.size() == D() && (w.array() > 1).all();
  return in_domain(w);
}

Vec Parameterization::g(const Vec& w) const {
  check_w(w);
  const Index n = this->n();
  switch (variant()) {
    case Variant::hadamard:
      return w.head(n).cwiseProduct(w.tail(n));
    case Variant::diff_squares:
      return w.head(n).array().square() - w.tail(n).array().square();
    case Variant::diff_powers: {
      const double e = 2.0 * power();
      return w.head(n).array().pow(e) - w.tail(n).array().pow(e);
    }
    case Variant::log_ratio:
      return w.head(n).array().log() - w.tail(n).array().log();
    case Variant::quadratic_commuting: {
      Vec x(n);
      for (Index i = 0; i < n; ++i) x[i] = 0.5 * w.dot(A()[static_cast<std::size_t>(i)] * w);
      return x;
    }
    case Variant::sym_factor: {
      const Mat U = unflatten_square(w);
      return flatten_row_major(U * U.transpose());
    }
    case Variant::deep_hadamard: {
      Vec x = Vec::Ones(n);
      for (int l = 0; l < depth(); ++l) x = x.cwiseProduct(w.segment(l * n, n));
      return x;
    }
  }
  return {};
}

double Parameterization::h(const Vec& w) const {
  check_w(w);
  const Index n = this->n();
  switch (variant()) {
    case Variant::hadamard:
    case Variant::sym_factor:
      return 0.5 * w.squaredNorm();
    case Variant::diff_squares:
      return c_u() * w.head(n).squaredNorm() - c_v() * w.tail(n).squaredNorm();
    case Variant::diff_powers:
      return w.array().pow(2.0 * power()).sum();
    case Variant::log_ratio:
      return w.array().log().sum();
    case Variant::quadratic_commuting:
      return 0.5 * w.dot(B() * w);
    case Variant::deep_hadamard:
      return reg_scale() * w.squaredNorm();
  }
  return 0.0;
}

Vec Parameterization::grad_h(const Vec& w) const {
  check_w(w);
  const Index n = this->n();
  switch (variant()) {
    case Variant::hadamard:
    case Variant::sym_factor:
      return w;
    case Variant::diff_squares: {
      Vec gr(D());
      gr << 2.0 * c_u() * w.head(n), -2.0 * c_v() * w.tail(n);
      return gr;
    }
    case Variant::diff_powers: {
      const double e = 2.0 * power();
      return e * w.array().pow(e - 1.0);
    }
    case Variant::log_ratio:
      return w.array().inverse();
    case Variant::quadratic_commuting:
      return B() * w;
    case Variant::deep_hadamard:
      return 2.0 * reg_scale() * w;
  }
  return {};
}

Mat Parameterization::jacobian(const Vec& w) const {
  check_w(w);
  const Index n = this->n();
  Mat J = Mat::Zero(n, D());
  switch (variant()) {
    case Variant::hadamard:
      for (Index i = 0; i < n; ++i) {
        J(i, i) = w[n + i];
        J(i, n + i) = w[i];
      }
      break;
    case Variant::diff_squares:
      for (Index i = 0; i < n; ++i) {
        J(i, i) = 2.0 * w[i];
        J(i, n + i) = -2.0 * w[n + i];
      }
      break;
    case Variant::diff_powers: {
      const double e = 2.0 * power();
      for (Index i = 0; i < n; ++i) {
        J(i, i) = e * std::pow(w[i], e - 1.0);
        J(i, n + i) = -e * std::pow(w[n + i], e - 1.0);
      }
      break;
    }
    case Variant::log_ratio:
      for (Index i = 0; i < n; ++i) {
        J(i, i) = 1.0 / w[i];
        J(i, n + i) = -1.0 / w[n + i];
      }
      break;
    case Variant::quadratic_commuting:
      for (Index i = 0; i < n; ++i) J.row(i) = (A()[static_cast<std::size_t>(i)] * w).transpose();
      break;
    case Variant::sym_factor: {
      // X_ab = sum_c U_ac U_bc
      const Index N = side();
      for (Index a = 0; a < N; ++a)
        for (Index b = 0; b < N; ++b)
          for (Index c = 0; c < N; ++c) {
            J(a * N + b, a * N + c) += w[b * N + c];
            J(a * N + b, b * N + c) += w[a * N + c];
          }
      break;
    }
    case Variant::deep_hadamard:
      for (Index i = 0; i < n; ++i)
        for (int l = 0; l < depth(); ++l) {
          double prod = 1.0;
          for (int q = 0; q < depth(); ++q)
            if (q != l) prod *= w[q * n + i];
          J(i, l * n + i) = prod;
        }
      break;
  }
  return J;
}

Vec Parameterization::coordinate_gradient(const Vec& w, Index i) const {
  require(i >= 0 && i <= n(), ErrorCode::input, "coordinate index out of range");
  if (i == n()) return grad_h(w);
  return jacobian(w).row(i).transpose();
}

Vec Parameterization::flow_rhs(const Vec& w, const Vec& grad_f_x, double alpha) const {
  check_w(w);
  require(grad_f_x.size() == n(), ErrorCode::dimension,
          "loss gradient has length " + std::to_string(grad_f_x.size()) + ", expected " + std::to_string(n()));
  const Index n = this->n();
  switch (variant()) {
    case Variant::sym_factor: {
      // exact chain rule through U U': d<S, UU'>/dU = (S + S') U
      const Mat U = unflatten_square(w);
      const Mat S = unflatten_square(grad_f_x);
      return flatten_row_major(-(S + S.transpose()) * U - alpha * U);
    }
    case Variant::hadamard:
    case Variant::deep_hadamard: {
      Vec out(D());
      for (Index i = 0; i < n; ++i)
        for (int l = 0; l < depth(); ++l) {
          double prod = 1.0;
          for (int q = 0; q < depth(); ++q)
            if (q != l) prod *= w[q * n + i];
          out[l * n + i] = prod * grad_f_x[i];
        }
      return -(out + alpha * grad_h(w));
    }
    default:
      return -(jacobian(w).transpose() * grad_f_x + alpha * grad_h(w));
  }
}

std::pair<Vec, Vec> diff_powers_init(const Vec& x, double beta, int k) {
  require(beta > 0.0 && k >= 1, ErrorCode::input, "diff-powers init needs beta > 0 and k >= 1");
  const Vec r = (x.array().square() + beta * beta).sqrt();
  const double e = 1.0 / (2.0 * k);
  Vec u = (0.5 * (r + x)).array().pow(e);
  Vec v = (0.5 * (r - x)).array().pow(e);
  return {u, v};
}

std::pair<Vec, Vec> log_ratio_init(const Vec& x, double beta) {
  require(beta > 0.0, ErrorCode::input, "log-ratio init needs beta > 0");
  Vec u = (beta * (1.0 + (-x.array()).exp())).inverse();
  Vec v = (beta * (1.0 + x.array().exp())).inverse();
  return {u, v};
}

}  // namespace mirrorlab
