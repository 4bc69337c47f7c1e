// Copyright (c) 2026, mirrorlab developers
// SPDX-License-Identifier: Apache-2.0

#include "mirrorlab/commute.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>

namespace mirrorlab {

using Eigen::Index;

namespace {

// (d grad_k)(w) . dir by central differences
Vec directional_hessian(const Parameterization& p, Index k, const Vec& w, const Vec& dir) {
  const double h = 1e-5 * (1.0 + inf_norm(w));
  return (p.coordinate_gradient(w + h * dir, k) - p.coordinate_gradient(w - h * dir, k)) / (2.0 * h);
}

}  // namespace

Vec lie_bracket(const Parameterization& p, Index i, Index j, const Vec& w) {
  require(i >= 0 && i <= p.n() && j >= 0 && j <= p.n(), ErrorCode::input, "bracket index out of range");
  require(w.size() == p.D(), ErrorCode::dimension, "bracket point has the wrong length");
  if (i == j) return Vec::Zero(p.D());
  const Vec gi = p.coordinate_gradient(w, i);
  const Vec gj = p.coordinate_gradient(w, j);
  return directional_hessian(p, j, w, gi) - directional_hessian(p, i, w, gj);
}

std::string CommutingReport::to_json() const {
  nlohmann::json j;
  j["variant"] = variant;
  j["tol"] = tol;
  j["max_norm"] = max_norm;
  j["pass"] = pass;
  j["worst_sample"] = std::vector<double>(worst_sample.data(), worst_sample.data() + worst_sample.size());
  j["worst_pair"] = {worst_i, worst_j};
  return j.dump();
}

SampleBox default_box(const Parameterization& p) {
  switch (p.variant()) {
    case Variant::log_ratio:
    case Variant::diff_powers:
      return {0.5, 2.5};
    default:
      return {-2.0, 2.0};
  }
}

CommutingReport check_commuting(const Parameterization& p, int n_samples, double tol, std::uint64_t seed) {
  return check_commuting(p, n_samples, tol, seed, default_box(p));
}

CommutingReport check_commuting(const Parameterization& p, int n_samples, double tol, std::uint64_t seed,
                                SampleBox box) {
  require(n_samples >= 1, ErrorCode::input, "commuting check needs at least one sample");
  require(box.lo < box.hi, ErrorCode::input, "empty sampling box");
  CommutingReport rep;
  rep.variant = p.name();
  rep.tol = tol;
  Rng rng(seed);
  for (int s = 0; s < n_samples; ++s) {
    const Vec w = rng.uniform_vec(p.D(), box.lo, box.hi);
    std::vector<Vec> grads;
    for (Index k = 0; k <= p.n(); ++k) grads.push_back(p.coordinate_gradient(w, k));
    for (Index i = 0; i <= p.n(); ++i)
      for (Index j = i + 1; j <= p.n(); ++j) {
        const Vec b = directional_hessian(p, j, w, grads[static_cast<std::size_t>(i)]) -
                      directional_hessian(p, i, w, grads[static_cast<std::size_t>(j)]);
        const double nb = b.norm();
        if (nb > rep.max_norm || rep.worst_sample.size() == 0) {
          rep.max_norm = std::max(nb, rep.max_norm);
          rep.worst_sample = w;
          rep.worst_i = i;
          rep.worst_j = j;
        }
      }
  }
  rep.pass = rep.max_norm <= tol;
  return rep;
}

bool check_regular(const Parameterization& p, const Vec& w, double tol) {
  const Mat J = p.jacobian(w);
  const Vec s = singular_values(J);
  const Index n = p.n();
  if (s.size() < n) return false;
  return s[n - 1] > tol;
}

SeparableReport check_separable_pair(const std::function<double(double)>& g_scalar,
                                     const std::function<double(double)>& h_scalar,
                                     const std::vector<double>& samples, double tol) {
  SeparableReport rep;
  std::vector<double> gs, hs;
  double gmean = 0.0, hmean = 0.0, hmax = 0.0;
  for (double s : samples) {
    const double g = g_scalar(s);
    const double h = h_scalar(s);
    require(std::isfinite(g) && std::isfinite(h), ErrorCode::domain, "separable check: non-finite sample");
    gs.push_back(g);
    hs.push_back(h);
    gmean += g;
    hmean += h;
    hmax = std::max(hmax, std::abs(h));
  }
  if (gs.empty()) return rep;
  gmean /= static_cast<double>(gs.size());
  hmean /= static_cast<double>(gs.size());
  // fit h = c g + d; the offset d never affects the bracket
  double gg = 0.0, gh = 0.0;
  for (std::size_t i = 0; i < gs.size(); ++i) {
    gg += (gs[i] - gmean) * (gs[i] - gmean);
    gh += (gs[i] - gmean) * (hs[i] - hmean);
  }
  if (gg <= 1e-300) return rep;  // g constant on the samples: inconclusive
  rep.c_estimate = gh / gg;
  const double d = hmean - rep.c_estimate * gmean;
  for (std::size_t i = 0; i < gs.size(); ++i)
    rep.max_residual = std::max(rep.max_residual, std::abs(hs[i] - rep.c_estimate * gs[i] - d));
  rep.status = rep.max_residual <= tol * std::max(1.0, hmax) ? SeparableStatus::pass : SeparableStatus::fail;
  return rep;
}

QuadraticCommutingReport check_quadratic_commuting(const std::vector<Mat>& A, const Mat& B, double tol) {
  std::vector<const Mat*> all;
  for (const auto& Ai : A) all.push_back(&Ai);
  all.push_back(&B);
  const Index d = B.rows();
  for (const Mat* M : all) {
    require(M->rows() == d && M->cols() == d, ErrorCode::dimension, "quadratic family matrices must be square and equal-sized");
    require((*M - M->transpose()).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + M->cwiseAbs().maxCoeff()),
            ErrorCode::input, "quadratic family matrices must be symmetric");
  }
  QuadraticCommutingReport rep;
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = i + 1; j < all.size(); ++j)
      rep.max_commutator_fro =
          std::max(rep.max_commutator_fro, (*all[i] * *all[j] - *all[j] * *all[i]).norm());
  rep.pass = rep.max_commutator_fro <= tol;
  return rep;
}

}  // namespace mirrorlab
