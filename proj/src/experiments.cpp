// Copyright (c) 2026, mirrorlab developers
// SPDX-License-Identifier: Apache-2.0

#include "mirrorlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace mirrorlab {

using Eigen::Index;

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double l1_l2_ratio(const Vec& x) {
  const double n2 = x.norm();
  return n2 > 0 ? x.lpNorm<1>() / n2 : kNaN;
}
}  // namespace

const std::vector<double>& ExperimentReport::metric(const std::string& name) const {
  auto it = series.find(name);
  require(it != series.end(), ErrorCode::input, "report has no metric '" + name + "'");
  return it->second;
}

double ExperimentReport::final(const std::string& name) const {
  const auto& s = metric(name);
  require(!s.empty(), ErrorCode::input, "metric '" + name + "' is empty");
  return s.back();
}

void ExperimentReport::validate() const {
  require(steps.size() == times.size() && a.size() == times.size(), ErrorCode::input,
          "report step/time/a series differ in length");
  for (const auto& [k, v] : series)
    require(v.size() == times.size(), ErrorCode::input, "report metric '" + k + "' has the wrong length");
  for (std::size_t i = 1; i < times.size(); ++i)
    require(times[i] > times[i - 1], ErrorCode::input, "report times not increasing");
}

// ---------------------------------------------------------------------------

const char* to_string(SensingKind k) {
  return k == SensingKind::random_symmetric ? "random-symmetric" : "commuting-diagonal";
}

SensingKind parse_sensing_kind(std::string_view name) {
  if (name == "random-symmetric") return SensingKind::random_symmetric;
  if (name == "commuting-diagonal") return SensingKind::commuting_diagonal;
  fail(ErrorCode::input, "unknown sensing kind '" + std::string(name) + "'");
}

const char* to_string(SensingInit k) { return k == SensingInit::gram_identity ? "gram-identity" : "scaled-identity"; }

SensingInit parse_sensing_init(std::string_view name) {
  if (name == "gram-identity") return SensingInit::gram_identity;
  if (name == "scaled-identity") return SensingInit::scaled_identity;
  fail(ErrorCode::input, "unknown sensing init '" + std::string(name) + "'");
}

void SensingConfig::validate() const {
  require(n >= 1 && r >= 1 && r <= n, ErrorCode::input, "sensing needs 1 <= r <= n");
  require(m >= 1, ErrorCode::input, "sensing needs at least one measurement");
  require(beta > 0 && std::isfinite(beta), ErrorCode::input, "sensing beta must be positive");
  require(eta > 0 && std::isfinite(eta), ErrorCode::input, "sensing step must be positive");
  require(steps >= 1 && record_every >= 1, ErrorCode::input, "sensing steps and record_every must be positive");
}

SensingProblem make_sensing_problem(const SensingConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  SensingProblem prob;
  Mat X;
  if (cfg.kind == SensingKind::random_symmetric) {
    const Mat Us = rng.normal_mat(cfg.n, cfg.r);
    X = Us * Us.transpose();
  } else {
    // diagonal measurements only see the diagonal, so the target lives there too
    X = Mat::Zero(cfg.n, cfg.n);
    for (Index i : rng.choose(cfg.n, cfg.r)) X(i, i) = std::abs(rng.normal()) + 0.1;
  }
  X /= nuclear_norm(X);
  prob.x_star = X;
  const Index nn = cfg.n * cfg.n;
  prob.measurements = Mat::Zero(cfg.m, nn);
  for (Index i = 0; i < cfg.m; ++i) {
    Mat A;
    if (cfg.kind == SensingKind::random_symmetric) {
      const Mat G = rng.normal_mat(cfg.n, cfg.n);
      A = symmetrize(G);
    } else {
      A = rng.normal_vec(cfg.n).asDiagonal();
    }
    prob.measurements.row(i) = flatten_row_major(A).transpose();
  }
  prob.y = prob.measurements * flatten_row_major(X);
  return prob;
}

Loss sensing_loss(const SensingProblem& prob) {
  return Loss::least_squares(prob.measurements, prob.y, 0.5 / static_cast<double>(prob.measurements.rows()));
}

Mat sensing_init(const SensingConfig& cfg) {
  const double s = cfg.init == SensingInit::gram_identity ? std::sqrt(cfg.beta) : cfg.beta;
  return s * Mat::Identity(cfg.n, cfg.n);
}

ExperimentReport matrix_sensing_run(const SensingConfig& cfg) {
  const SensingProblem prob = make_sensing_problem(cfg);
  const Loss loss = sensing_loss(prob);
  const Parameterization p = Parameterization::sym_factor(sensing_init(cfg));

  IntegratorConfig ic;
  ic.method = cfg.method;
  ic.step = cfg.eta;
  ic.t_end = cfg.eta * static_cast<double>(cfg.steps);
  ic.record_every = cfg.record_every;
  const FlowOutcome out = integrate_param_flow(p, loss, cfg.schedule, ic);

  ExperimentReport rep;
  rep.experiment = "sensing";
  rep.seed = cfg.seed;
  rep.stopped = out.stopped;
  rep.stop_reason = out.reason;
  rep.message = out.message;
  auto& loss_s = rep.series["train_loss"];
  auto& rec_s = rep.series["recon_error"];
  auto& nuc_s = rep.series["nuclear_norm"];
  auto& ratio_s = rep.series["ratio"];
  for (std::size_t i = 0; i < out.traj.size(); ++i) {
    const double t = out.traj.times()[i];
    const State& st = out.traj.states()[i];
    const Mat X = unflatten_square(st.x);
    rep.steps.push_back(std::llround(t / cfg.eta));
    rep.times.push_back(t);
    rep.a.push_back(st.a);
    const double f = loss.value(st.x);
    loss_s.push_back(f);
    rec_s.push_back((prob.x_star - X).squaredNorm());
    const Vec sv = singular_values(X);
    const double nuc = sv.sum();
    nuc_s.push_back(nuc);
    ratio_s.push_back(X.norm() > 0 ? nuc / X.norm() : kNaN);
    rep.snapshots.push_back(st.x);
    if (!rep.time_to_threshold && f <= cfg.loss_threshold) rep.time_to_threshold = t;
  }
  rep.converged = !rep.stopped && !loss_s.empty() && loss_s.back() <= cfg.loss_threshold;
  return rep;
}

EigenBias sensing_eigen_bias(const ExperimentReport& report, const SensingConfig& cfg) {
  require(cfg.kind == SensingKind::commuting_diagonal, ErrorCode::input,
          "eigen-bias tracking needs commuting-diagonal sensing matrices");
  require(cfg.init == SensingInit::gram_identity, ErrorCode::input, "eigen-bias tracking needs U0 U0' = beta I");
  const FamilyPtr F = make_entropy(Vec::Constant(cfg.n, cfg.beta), 0.25);
  EigenBias out;
  for (std::size_t i = 0; i < report.snapshots.size(); ++i) {
    const Mat X = unflatten_square(report.snapshots[i]);
    Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(X), Eigen::EigenvaluesOnly);
    Vec ev = es.eigenvalues().reverse();
    if (ev.minCoeff() < -1e-10) out.negative_eigenvalue = true;
    const Vec diag = X.diagonal();
    double val = kNaN;
    if ((diag.array() > 0).all()) val = F->value(report.a[i], diag);
    out.times.push_back(report.times[i]);
    out.eigenvalues.push_back(std::move(ev));
    out.bregman_value.push_back(val);
  }
  return out;
}

// ---------------------------------------------------------------------------

const char* to_string(RegressionVariant v) {
  switch (v) {
    case RegressionVariant::linear_l1: return "m";
    case RegressionVariant::mw: return "mw";
    case RegressionVariant::mwz: return "mwz";
  }
  return "?";
}

RegressionVariant parse_regression_variant(std::string_view name) {
  if (name == "m" || name == "linear" || name == "linear-l1") return RegressionVariant::linear_l1;
  if (name == "mw") return RegressionVariant::mw;
  if (name == "mwz") return RegressionVariant::mwz;
  fail(ErrorCode::input, "unknown network variant '" + std::string(name) + "'");
}

void RegressionConfig::validate() const {
  require(d >= 0 && n >= 1 && d < n, ErrorCode::input, "regression needs 0 <= d < n");
  require(sparsity >= 0 && sparsity <= n, ErrorCode::input, "regression sparsity must lie in [0, n]");
  require(eta > 0 && std::isfinite(eta), ErrorCode::input, "regression step must be positive");
  require(steps >= 1 && record_every >= 1, ErrorCode::input, "regression steps and record_every must be positive");
  require(alpha >= 0 && std::isfinite(alpha), ErrorCode::input, "regression alpha must be nonnegative");
}

Schedule RegressionConfig::schedule() const {
  const double T = eta * static_cast<double>(steps);
  return Schedule::turnoff(alpha, T, 2.0 * T);
}

RegressionProblem make_regression_problem(const RegressionConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  RegressionProblem prob;
  prob.Z = rng.normal_mat(cfg.d, cfg.n);
  prob.x_star = Vec::Zero(cfg.n);
  for (Index i : rng.choose(cfg.n, cfg.sparsity)) prob.x_star[i] = 1.0;
  prob.y = prob.Z * prob.x_star;
  return prob;
}

Loss regression_loss(const RegressionProblem& prob) {
  const double scale = prob.Z.rows() > 0 ? 1.0 / static_cast<double>(prob.Z.rows()) : 0.0;
  return Loss::least_squares(prob.Z, prob.y, scale);
}

namespace {

void add_regression_record(ExperimentReport& rep, const Loss& loss, const RegressionProblem& prob, double eta,
                           double t, double a, const Vec& x) {
  rep.steps.push_back(std::llround(t / eta));
  rep.times.push_back(t);
  rep.a.push_back(a);
  rep.series["train_loss"].push_back(loss.value(x));
  rep.series["recon_error"].push_back((x - prob.x_star).squaredNorm());
  rep.series["l1"].push_back(x.lpNorm<1>());
  rep.series["l1_l2_ratio"].push_back(l1_l2_ratio(x));
  rep.snapshots.push_back(x);
}

}  // namespace

ExperimentReport diagonal_network_run(const RegressionConfig& cfg) {
  const RegressionProblem prob = make_regression_problem(cfg);
  const Loss loss = regression_loss(prob);
  const Schedule sched = cfg.schedule();
  const std::int64_t total = 2 * cfg.steps;

  ExperimentReport rep;
  rep.experiment = std::string("diagonal-") + to_string(cfg.variant);
  rep.seed = cfg.seed;

  if (cfg.variant == RegressionVariant::linear_l1) {
    Vec x = Vec::Zero(cfg.n);
    add_regression_record(rep, loss, prob, cfg.eta, 0.0, 0.0, x);
    for (std::int64_t k = 0; k < total; ++k) {
      const double t = static_cast<double>(k) * cfg.eta;
      const double thr = cfg.eta * sched.alpha(t);
      x -= cfg.eta * loss.grad(x);
      x = x.array().sign() * (x.array().abs() - thr).max(0.0);
      if (!x.allFinite() || inf_norm(x) > kDivergenceLimit) {
        rep.stopped = true;
        rep.message = "iterate diverged";
        break;
      }
      const double tn = static_cast<double>(k + 1) * cfg.eta;
      if ((k + 1) % cfg.record_every == 0 || k + 1 == total)
        add_regression_record(rep, loss, prob, cfg.eta, tn, sched.a(tn), x);
    }
  } else {
    std::vector<Vec> factors = {Vec::Zero(cfg.n), Vec::Ones(cfg.n)};
    if (cfg.variant == RegressionVariant::mwz) factors.push_back(Vec::Ones(cfg.n));
    const Parameterization p = cfg.variant == RegressionVariant::mw
                                   ? Parameterization::hadamard(factors[0], factors[1])
                                   : Parameterization::deep_hadamard(factors);
    IntegratorConfig ic;
    ic.method = cfg.method;
    ic.step = cfg.eta;
    ic.t_end = cfg.eta * static_cast<double>(total);
    ic.record_every = cfg.record_every;
    const FlowOutcome out = integrate_param_flow(p, loss, sched, ic);
    rep.stopped = out.stopped;
    rep.stop_reason = out.reason;
    rep.message = out.message;
    for (std::size_t i = 0; i < out.traj.size(); ++i)
      add_regression_record(rep, loss, prob, cfg.eta, out.traj.times()[i], out.traj.states()[i].a,
                            out.traj.states()[i].x);
    if (cfg.variant == RegressionVariant::mw && !rep.stopped && cfg.d > 0) {
      const FamilyPtr F = make_hyperbolic_entropy_from_hadamard(factors[0], factors[1]);
      try {
        rep.kkt_residual = kkt_residual(prob.Z, rep.snapshots.back(), *F, rep.a.back());
      } catch (const Error& e) {
        if (e.code() != ErrorCode::rank_deficient) throw;
      }
    }
  }
  const auto& ls = rep.series["train_loss"];
  rep.converged = !rep.stopped && !ls.empty() && ls.back() <= 1e-10;
  return rep;
}

// ---------------------------------------------------------------------------

SparseCodingProblem make_sparse_coding_problem(Index p, Index n, Index sparsity, double noise,
                                               std::uint64_t seed) {
  require(p >= 1 && n >= 1 && sparsity >= 0 && sparsity <= n, ErrorCode::input, "bad sparse coding sizes");
  require(noise >= 0, ErrorCode::input, "noise level must be nonnegative");
  Rng rng(seed);
  SparseCodingProblem prob;
  prob.dictionary = rng.normal_mat(p, n) / std::sqrt(static_cast<double>(p));
  prob.code_star = Vec::Zero(n);
  for (Index i : rng.choose(n, sparsity)) prob.code_star[i] = rng.normal();
  prob.target = prob.dictionary * prob.code_star + noise * rng.normal_vec(p);
  return prob;
}

double sparse_coding_lipschitz(const Mat& dictionary) {
  require(dictionary.size() > 0, ErrorCode::input, "empty dictionary");
  const double s = singular_values(dictionary)[0];
  return 2.0 * s * s / static_cast<double>(dictionary.rows());
}

ExperimentReport sparse_coding_run(const Mat& dictionary, const Vec& target, const Parameterization& variant,
                                   const Schedule& schedule, const SparseCodingConfig& cfg) {
  require(dictionary.rows() == target.size(), ErrorCode::dimension, "target length must match dictionary rows");
  require(dictionary.cols() == variant.n(), ErrorCode::dimension, "code length must match dictionary columns");
  require(cfg.eta_scale > 0 && cfg.steps >= 1 && cfg.record_every >= 1, ErrorCode::input,
          "sparse coding needs positive eta_scale, steps and record_every");
  const double lip = sparse_coding_lipschitz(dictionary);
  require(lip > 0, ErrorCode::input, "dictionary must be nonzero");
  const double eta = cfg.eta_scale / lip;
  const Loss loss = Loss::least_squares(dictionary, target, 1.0 / static_cast<double>(dictionary.rows()));

  IntegratorConfig ic;
  ic.method = Method::euler;
  ic.step = eta;
  ic.t_end = eta * static_cast<double>(cfg.steps);
  ic.record_every = cfg.record_every;
  const FlowOutcome out = integrate_param_flow(variant, loss, schedule, ic);

  ExperimentReport rep;
  rep.experiment = "sparse-coding-" + variant.name();
  rep.seed = cfg.seed;
  rep.stopped = out.stopped;
  rep.stop_reason = out.reason;
  rep.message = out.message;
  for (std::size_t i = 0; i < out.traj.size(); ++i) {
    const State& st = out.traj.states()[i];
    const double t = out.traj.times()[i];
    rep.steps.push_back(std::llround(t / eta));
    rep.times.push_back(t);
    rep.a.push_back(st.a);
    rep.series["train_loss"].push_back(loss.value(st.x));
    rep.series["l1"].push_back(st.x.lpNorm<1>());
    rep.series["l1_l2_ratio"].push_back(l1_l2_ratio(st.x));
    rep.snapshots.push_back(st.x);
  }
  rep.converged = !rep.stopped;
  if (!rep.times.empty()) rep.time_to_threshold = stationarity_time(rep, cfg.stationarity_frac);
  return rep;
}

double stationarity_time(const ExperimentReport& report, double frac) {
  const auto& l1 = report.metric("l1");
  require(!l1.empty(), ErrorCode::input, "empty L1 series");
  const double end = l1.back();
  const double band = frac * std::abs(l1.front() - end);
  std::size_t first = l1.size() - 1;
  for (std::size_t i = l1.size(); i-- > 0;) {
    if (std::abs(l1[i] - end) > band) break;
    first = i;
  }
  return report.times[first];
}

// ---------------------------------------------------------------------------

double kkt_residual(const Mat& Z, const Vec& x_inf, const LegendreFamily& F, double a_T) {
  require(Z.cols() == x_inf.size(), ErrorCode::dimension, "Z columns must match x");
  const Vec g = F.grad(F.flow_parameter(a_T), x_inf);
  if (Z.rows() == 0) return g.norm() / std::max(1.0, g.norm());
  const Mat G = Z * Z.transpose();
  Eigen::ColPivHouseholderQR<Mat> qr(G);
  qr.setThreshold(1e-12);
  if (qr.rank() < G.rows()) {
    std::ostringstream os;
    os << "Z Z' is rank deficient (rank " << qr.rank() << " of " << G.rows() << ")";
    fail(ErrorCode::rank_deficient, os.str());
  }
  const Vec proj = g - Z.transpose() * qr.solve(Z * g);
  return proj.norm() / std::max(1.0, g.norm());
}

}  // namespace mirrorlab
