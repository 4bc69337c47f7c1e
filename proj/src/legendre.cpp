// Copyright (c) 2026, mirrorlab developers
// SPDX-License-Identifier: Apache-2.0

#include "mirrorlab/legendre.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mirrorlab {

using Eigen::Index;

const char* to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::hyperbolic_entropy: return "hyperbolic-entropy";
    case FamilyKind::entropy: return "entropy";
    case FamilyKind::log_cosh: return "log-cosh";
    case FamilyKind::diff_powers_flow: return "diff-powers-flow";
    case FamilyKind::quadratic: return "quadratic";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Base class defaults

double LegendreFamily::value(double, const Vec&) const {
  fail(ErrorCode::unsupported, name() + ": no closed-form value available");
}

Mat LegendreFamily::hessian(double a, const Vec& x) const {
  const Mat Hd = dual_hessian(a, grad(a, x));
  return Hd.inverse();
}

DomainInfo LegendreFamily::domain(double) const {
  DomainInfo info;
  info.dual.assign(static_cast<std::size_t>(dim()), Interval::all());
  info.primal.assign(static_cast<std::size_t>(dim()), Interval::all());
  return info;
}

bool LegendreFamily::in_primal_domain(double a, const Vec& x) const {
  if (x.size() != dim() || !x.allFinite()) return false;
  const DomainInfo info = domain(a);
  for (Index i = 0; i < x.size(); ++i)
    if (!info.primal[static_cast<std::size_t>(i)].contains(x[i])) return false;
  return true;
}

void LegendreFamily::check_a(double a) const {
  const Interval r = a_range();
  const bool ok = std::isfinite(a) && a >= r.lo && (a_open_above() ? a < r.hi : a <= r.hi);
  if (!ok) {
    std::ostringstream os;
    os << name() << ": parameter a = " << a << " outside the valid range";
    fail(ErrorCode::domain, os.str());
  }
}

void LegendreFamily::check_x(double a, const Vec& x) const {
  require(x.size() == dim(), ErrorCode::dimension, name() + ": primal vector has the wrong length");
  require(in_primal_domain(a, x), ErrorCode::domain, name() + ": point outside the primal domain");
}

void LegendreFamily::check_mu(const Vec& mu) const {
  require(mu.size() == dim(), ErrorCode::dimension, name() + ": dual vector has the wrong length");
  require(mu.allFinite(), ErrorCode::domain, name() + ": non-finite dual vector");
}

double LegendreFamily::bregman_divergence(double a, const Vec& x, const Vec& y) const {
  const double d = value(a, x) - value(a, y) - grad(a, y).dot(x - y);
  return std::max(d, 0.0);
}

// ---------------------------------------------------------------------------

double monotone_solve(const std::function<double(double)>& phi, const std::function<double(double)>& dphi,
                      double target, double lo, double hi, double guess, double tol, int max_iter) {
  require(lo < hi, ErrorCode::domain, "empty bracket");
  double t = (guess > lo && guess < hi) ? guess : 0.5 * (lo + hi);
  for (int it = 0; it < max_iter; ++it) {
    const double r = phi(t) - target;
    if (std::abs(r) <= tol * (1.0 + std::abs(target))) return t;
    if (r < 0) lo = t; else hi = t;
    const double d = dphi(t);
    double next = (d > 0 && std::isfinite(d)) ? t - r / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo <= 1e-15 * (1.0 + std::abs(t))) return next;
    t = next;
  }
  return t;
}

namespace {

// ---------------------------------------------------------------------------

class HyperbolicEntropy final : public LegendreFamily {
 public:
  HyperbolicEntropy(Vec u0, Vec v0) {
    require(u0.size() == v0.size() && u0.size() > 0, ErrorCode::dimension,
            "hyperbolic entropy needs matching nonempty u0, v0");
    require((u0.array().abs() > 0).all() && (v0.array().abs() > 0).all(), ErrorCode::domain,
            "hyperbolic entropy needs |m0| != |w0| in every coordinate");
    prod_ = (u0.array() * v0.array()).abs();
    ell_ = (u0.array().abs() / v0.array().abs()).log();
  }

  FamilyKind kind() const override { return FamilyKind::hyperbolic_entropy; }
  Index dim() const override { return prod_.size(); }
  Interval a_range() const override { return {-std::numeric_limits<double>::infinity(), 0.0}; }

  double value(double a, const Vec& x) const override {
    check_a(a);
    check_x(a, x);
    const Vec C = scale(a);
    double s = 0.0;
    for (Index i = 0; i < x.size(); ++i)
      s += x[i] * std::asinh(x[i] / C[i]) - std::hypot(x[i], C[i]) - ell_[i] * x[i];
    return 0.5 * s;
  }

  Vec grad(double a, const Vec& x) const override {
    check_a(a);
    check_x(a, x);
    const Vec C = scale(a);
    Vec g(x.size());
    for (Index i = 0; i < x.size(); ++i) g[i] = 0.5 * (std::asinh(x[i] / C[i]) - ell_[i]);
    return g;
  }

  Vec dual_map(double a, const Vec& mu) const override {
    check_a(a);
    check_mu(mu);
    const Vec C = scale(a);
    return (C.array() * (2.0 * mu + ell_).array().sinh()).matrix();
  }

  Mat dual_hessian(double a, const Vec& mu) const override {
    check_a(a);
    check_mu(mu);
    const Vec C = scale(a);
    return (2.0 * C.array() * (2.0 * mu + ell_).array().cosh()).matrix().asDiagonal();
  }

  Mat hessian(double a, const Vec& x) const override {
    check_a(a);
    check_x(a, x);
    const Vec C = scale(a);
    Vec d(x.size());
    for (Index i = 0; i < x.size(); ++i) d[i] = 0.5 / std::hypot(x[i], C[i]);
    return d.asDiagonal();
  }

 private:
  Vec scale(double a) const { return std::exp(2.0 * a) * prod_; }

  Vec prod_;
  Vec ell_;
};

// ---------------------------------------------------------------------------

class Entropy final : public LegendreFamily {
 public:
  Entropy(Vec x0, double s) : x0_(std::move(x0)), s_(s) {
    require(x0_.size() > 0, ErrorCode::dimension, "entropy needs a nonempty x0");
    require((x0_.array() > 0).all(), ErrorCode::domain, "entropy needs x0 > 0");
    require(s > 0 && std::isfinite(s), ErrorCode::input, "entropy scale must be positive");
  }

  FamilyKind kind() const override { return FamilyKind::entropy; }
  Index dim() const override { return x0_.size(); }
  Interval a_range() const override { return {-std::numeric_limits<double>::infinity(), 0.0}; }

  double value(double a, const Vec& x) const override {
    check_a(a);
    check_x(a, x);
    const Vec B = base(a);
    return s_ * (x.array() * (x.array() / B.array()).log() - x.array()).sum();
  }

  Vec grad(double a, const Vec& x) const override {
    check_a(a);
    check_x(a, x);
    return s_ * (x.array() / base(a).array()).log();
  }

  Vec dual_map(double a, const Vec& mu) const override {
    check_a(a);
    check_mu(mu);
    return base(a).array() * (mu.array() / s_).exp();
  }

  Mat dual_hessian(double a, const Vec& mu) const override {
    return (dual_map(a, mu) / s_).asDiagonal();
  }

  Mat hessian(double a, const Vec& x) const override {
    check_a(a);
    check_x(a, x);
    return (s_ * x.array().inverse()).matrix().asDiagonal();
  }

  DomainInfo domain(double a) const override {
    DomainInfo info = LegendreFamily::domain(a);
    for (auto& iv : info.primal) iv.lo = 0.0;
    return info;
  }

 private:
  Vec base(double a) const { return std::exp(2.0 * a) * x0_; }

  Vec x0_;
  double s_;
};

// ---------------------------------------------------------------------------

double sigmoid(double z) {
  return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

// log(1 + e^z) without overflow
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

class LogCosh final : public LegendreFamily {
 public:
  LogCosh(Vec u0, Vec v0) : u2_(u0.array().square()), v2_(v0.array().square()) {
    require(u0.size() == v0.size() && u0.size() > 0, ErrorCode::dimension,
            "log-cosh needs matching nonempty u0, v0");
    require((u2_.array() > 0).all() && (v2_.array() > 0).all(), ErrorCode::domain,
            "log-cosh needs nonzero u0, v0");
  }

  FamilyKind kind() const override { return FamilyKind::log_cosh; }
  Index dim() const override { return u2_.size(); }
  Interval a_range() const override {
    return {-std::numeric_limits<double>::infinity(), 0.5 * std::min(u2_.minCoeff(), v2_.minCoeff())};
  }
  bool a_open_above() const override { return true; }
  double flow_parameter(double a_t) const override { return -a_t; }

  double value(double a, const Vec& x) const override {
    check_a(a);
    check_x(a, x);
    double s = 0.0;
    for (Index i = 0; i < x.size(); ++i)
      s += P(a, i) * softplus(-2.0 * x[i]) + Q(a, i) * softplus(2.0 * x[i]);
    return 0.25 * s;
  }

  Vec grad(double a, const Vec& x) const override {
    check_a(a);
    check_x(a, x);
    Vec g(x.size());
    for (Index i = 0; i < x.size(); ++i)
      g[i] = 0.5 * (Q(a, i) * sigmoid(2.0 * x[i]) - P(a, i) * sigmoid(-2.0 * x[i]));
    return g;
  }

  Vec dual_map(double a, const Vec& mu) const override {
    check_a(a);
    check_mu(mu);
    Vec x(mu.size());
    for (Index i = 0; i < mu.size(); ++i) {
      const double lo = P(a, i) + 2.0 * mu[i];
      const double hi = Q(a, i) - 2.0 * mu[i];
      if (!(lo > 0 && hi > 0)) {
        std::ostringstream os;
        os << "log-cosh: mu[" << i << "] = " << mu[i] << " outside (" << -0.5 * P(a, i) << ", "
           << 0.5 * Q(a, i) << ")";
        fail(ErrorCode::domain, os.str());
      }
      x[i] = 0.5 * std::log(lo / hi);
    }
    return x;
  }

  Mat dual_hessian(double a, const Vec& mu) const override {
    dual_map(a, mu);
    Vec d(mu.size());
    for (Index i = 0; i < mu.size(); ++i) d[i] = 1.0 / (P(a, i) + 2.0 * mu[i]) + 1.0 / (Q(a, i) - 2.0 * mu[i]);
    return d.asDiagonal();
  }

  Mat hessian(double a, const Vec& x) const override {
    check_a(a);
    check_x(a, x);
    Vec d(x.size());
    for (Index i = 0; i < x.size(); ++i)
      d[i] = (P(a, i) + Q(a, i)) * sigmoid(2.0 * x[i]) * sigmoid(-2.0 * x[i]);
    return d.asDiagonal();
  }

  Vec argmin_position(double a) const override {
    check_a(a);
    Vec x(dim());
    for (Index i = 0; i < dim(); ++i) x[i] = std::log(std::sqrt(P(a, i))) - std::log(std::sqrt(Q(a, i)));
    return x;
  }

  DomainInfo domain(double a) const override {
    DomainInfo info = LegendreFamily::domain(a);
    for (Index i = 0; i < dim(); ++i) info.dual[static_cast<std::size_t>(i)] = {-0.5 * P(a, i), 0.5 * Q(a, i)};
    return info;
  }

 private:
  double P(double a, Index i) const { return u2_[i] - 2.0 * a; }
  double Q(double a, Index i) const { return v2_[i] - 2.0 * a; }

  Vec u2_;
  Vec v2_;
};

// ---------------------------------------------------------------------------

class DiffPowersFlow final : public LegendreFamily {
 public:
  DiffPowersFlow(int k, const Vec& u0, const Vec& v0) : k_(k) {
    require(k >= 2, ErrorCode::input, "diff-powers flow needs k >= 2");
    require(u0.size() == v0.size() && u0.size() > 0, ErrorCode::dimension,
            "diff-powers flow needs matching nonempty u0, v0");
    require((u0.array().abs() > 0).all() && (v0.array().abs() > 0).all(), ErrorCode::domain,
            "diff-powers flow needs nonzero u0, v0");
    K_ = 2.0 * k * (2.0 * k - 2.0);
    p_ = static_cast<double>(k) / (k - 1.0);
    cu_ = u0.array().abs().pow(2.0 - 2.0 * k) / K_;
    cv_ = v0.array().abs().pow(2.0 - 2.0 * k) / K_;
  }

  FamilyKind kind() const override { return FamilyKind::diff_powers_flow; }
  std::string name() const override { return "diff-powers-flow(k=" + std::to_string(k_) + ")"; }
  Index dim() const override { return cu_.size(); }
  Interval a_range() const override { return {-std::numeric_limits<double>::infinity(), 0.0}; }

  Vec grad(double a, const Vec& x) const override {
    check_a(a);
    check_x(a, x);
    Vec mu(x.size());
    for (Index i = 0; i < x.size(); ++i) {
      const Interval iv = interval(a, i);
      auto phi = [&](double m) { return coord(a, i, m); };
      auto dphi = [&](double m) { return dcoord(a, i, m); };
      mu[i] = monotone_solve(phi, dphi, x[i], iv.lo, iv.hi, 0.0);
    }
    return mu;
  }

  Vec dual_map(double a, const Vec& mu) const override {
    check_a(a);
    check_mu(mu);
    Vec x(mu.size());
    for (Index i = 0; i < mu.size(); ++i) {
      const Interval iv = interval(a, i);
      if (!iv.contains(mu[i])) {
        std::ostringstream os;
        os << "diff-powers flow: mu[" << i << "] = " << mu[i] << " outside (" << iv.lo << ", " << iv.hi << ")";
        fail(ErrorCode::domain, os.str());
      }
      x[i] = coord(a, i, mu[i]);
    }
    return x;
  }

  Mat dual_hessian(double a, const Vec& mu) const override {
    dual_map(a, mu);
    Vec d(mu.size());
    for (Index i = 0; i < mu.size(); ++i) d[i] = dcoord(a, i, mu[i]);
    return d.asDiagonal();
  }

  DomainInfo domain(double a) const override {
    check_a(a);
    DomainInfo info = LegendreFamily::domain(a);
    for (Index i = 0; i < dim(); ++i) info.dual[static_cast<std::size_t>(i)] = interval(a, i);
    return info;
  }

 private:
  Interval interval(double a, Index i) const { return {a - cv_[i], cu_[i] - a}; }
  double coord(double a, Index i, double m) const {
    return std::pow(K_ * (cu_[i] - m - a), -p_) - std::pow(K_ * (cv_[i] + m - a), -p_);
  }
  double dcoord(double a, Index i, double m) const {
    return p_ * K_ * (std::pow(K_ * (cu_[i] - m - a), -p_ - 1.0) + std::pow(K_ * (cv_[i] + m - a), -p_ - 1.0));
  }

  int k_;
  double K_ = 0.0;
  double p_ = 0.0;
  Vec cu_;
  Vec cv_;
};

// ---------------------------------------------------------------------------

class Quadratic final : public LegendreFamily {
 public:
  Quadratic(const std::vector<Mat>& A, const Mat& B, const Vec& w) {
    require(!A.empty(), ErrorCode::input, "quadratic family needs at least one A_i");
    const Index d = w.size();
    require(d > 0 && B.rows() == d && B.cols() == d, ErrorCode::dimension, "quadratic family: B must match w_init");
    for (const auto& Ai : A)
      require(Ai.rows() == d && Ai.cols() == d, ErrorCode::dimension, "quadratic family: A_i must match w_init");

    // joint eigenbasis from a generic combination
    Rng rng(0x9e3779b97f4a7c15ULL);
    Mat M = rng.normal() * B;
    for (const auto& Ai : A) M += rng.normal() * Ai;
    Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(M));
    const Mat& P = es.eigenvectors();

    auto diagonal_of = [&](const Mat& X, const char* what) {
      const Mat T = P.transpose() * X * P;
      const Mat off = T - Mat(T.diagonal().asDiagonal());
      const double scale = 1.0 + X.cwiseAbs().maxCoeff();
      require(off.cwiseAbs().maxCoeff() <= 1e-8 * scale, ErrorCode::input,
              std::string("quadratic family: ") + what + " does not share the joint eigenbasis (non-commuting)");
      return Vec(T.diagonal());
    };
    alpha_.resize(static_cast<Index>(A.size()), d);
    for (std::size_t i = 0; i < A.size(); ++i) alpha_.row(static_cast<Index>(i)) = diagonal_of(A[i], "A_i").transpose();
    beta_ = diagonal_of(B, "B");
    c2_ = (P.transpose() * w).array().square();
  }

  FamilyKind kind() const override { return FamilyKind::quadratic; }
  Index dim() const override { return alpha_.rows(); }
  Interval a_range() const override { return {-std::numeric_limits<double>::infinity(), 0.0}; }

  double conjugate(double a, const Vec& mu) const { return 0.25 * weights(a, mu).sum(); }

  Vec dual_map(double a, const Vec& mu) const override {
    check_a(a);
    check_mu(mu);
    return 0.5 * alpha_ * weights(a, mu);
  }

  Mat dual_hessian(double a, const Vec& mu) const override {
    check_a(a);
    check_mu(mu);
    return alpha_ * weights(a, mu).asDiagonal() * alpha_.transpose();
  }

  Vec grad(double a, const Vec& x) const override {
    check_a(a);
    check_x(a, x);
    // minimize Q_a(mu) - mu'x by damped Newton
    Vec mu = Vec::Zero(dim());
    auto phi = [&](const Vec& m) { return conjugate(a, m) - m.dot(x); };
    double f = phi(mu);
    for (int it = 0; it < 200; ++it) {
      const Vec r = dual_map(a, mu) - x;
      if (inf_norm(r) <= 1e-13 * (1.0 + inf_norm(x))) return mu;
      Mat H = dual_hessian(a, mu);
      H.diagonal().array() += 1e-14 * (1.0 + H.diagonal().cwiseAbs().maxCoeff());
      const Vec step = H.ldlt().solve(r);
      double t = 1.0;
      Vec trial = mu - step;
      double ft = phi(trial);
      while (!(ft <= f) && t > 1e-12) {
        t *= 0.5;
        trial = mu - t * step;
        ft = phi(trial);
      }
      if (!(ft <= f)) break;
      mu = trial;
      f = ft;
    }
    const Vec r = dual_map(a, mu) - x;
    require(inf_norm(r) <= 1e-8 * (1.0 + inf_norm(x)), ErrorCode::domain,
            "quadratic family: point outside the range of the dual map");
    return mu;
  }

  double value(double a, const Vec& x) const override {
    const Vec mu = grad(a, x);
    return mu.dot(x) - conjugate(a, mu);
  }

 private:
  Vec weights(double a, const Vec& mu) const {
    return (c2_.array() * (2.0 * a * beta_ + 2.0 * alpha_.transpose() * mu).array().exp()).matrix();
  }

  Mat alpha_;  // n x d eigenvalues of A_i
  Vec beta_;   // eigenvalues of B
  Vec c2_;     // squared coordinates of w_init
};

}  // namespace

FamilyPtr make_hyperbolic_entropy(Vec u0, Vec v0) {
  return std::make_shared<HyperbolicEntropy>(std::move(u0), std::move(v0));
}

FamilyPtr make_hyperbolic_entropy_from_hadamard(const Vec& m0, const Vec& w0) {
  require(m0.size() == w0.size(), ErrorCode::dimension, "hyperbolic entropy: m0 and w0 differ in length");
  return make_hyperbolic_entropy((m0 + w0) / std::sqrt(2.0), (m0 - w0) / std::sqrt(2.0));
}

FamilyPtr make_entropy(Vec x0, double scale) { return std::make_shared<Entropy>(std::move(x0), scale); }

FamilyPtr make_log_cosh(Vec u0, Vec v0) { return std::make_shared<LogCosh>(std::move(u0), std::move(v0)); }

FamilyPtr make_diff_powers_flow(int k, Vec u0, Vec v0) { return std::make_shared<DiffPowersFlow>(k, u0, v0); }

FamilyPtr make_quadratic(const std::vector<Mat>& A, const Mat& B, const Vec& w_init) {
  return std::make_shared<Quadratic>(A, B, w_init);
}

ContractingReport contracting_check(const LegendreFamily& F, const std::vector<double>& a_grid,
                                    const std::vector<Vec>& x_samples, double tol) {
  require(a_grid.size() >= 2, ErrorCode::input, "contracting check needs at least two grid points");
  for (std::size_t i = 1; i < a_grid.size(); ++i)
    require(a_grid[i] > a_grid[i - 1], ErrorCode::input, "contracting check needs an increasing a-grid");
  ContractingReport rep;
  rep.max_positive_slope = -std::numeric_limits<double>::infinity();
  for (const Vec& x : x_samples) {
    std::vector<double> vals;
    vals.reserve(a_grid.size());
    try {
      for (double a : a_grid) vals.push_back(F.value(a, x));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::domain) throw;
      ++rep.skipped;
      continue;
    }
    ++rep.evaluated;
    for (std::size_t i = 1; i < a_grid.size(); ++i) {
      const double slope = (vals[i] - vals[i - 1]) / (a_grid[i] - a_grid[i - 1]);
      if (slope > rep.max_positive_slope) {
        rep.max_positive_slope = slope;
        rep.worst_a = a_grid[i - 1];
        rep.worst_x = x;
      }
    }
  }
  if (rep.evaluated == 0) rep.max_positive_slope = 0.0;
  rep.max_positive_slope = std::max(rep.max_positive_slope, 0.0);
  rep.pass = rep.evaluated > 0 && rep.max_positive_slope <= tol;
  return rep;
}

}  // namespace mirrorlab
