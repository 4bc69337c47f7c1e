// Copyright (c) 2026, mirrorlab developers
// SPDX-License-Identifier: Apache-2.0

#include "mirrorlab/flow.hpp"

#include <cmath>
#include <functional>
#include <sstream>

namespace mirrorlab {

using Eigen::Index;

namespace {

using Rhs = std::function<Vec(double t, const Vec& y)>;
using Recorder = std::function<void(double t, const Vec& y)>;

struct StepResult {
  bool stopped = false;
  ErrorCode reason = ErrorCode::diverged;
  std::string message;
  double last_time = 0.0;
};

constexpr double kStageNudge = 1e-7;

bool blown_up(const Vec& y) { return !y.allFinite() || inf_norm(y) > kDivergenceLimit; }

StepResult integrate(const Rhs& f, Vec y, const IntegratorConfig& cfg, const Recorder& record) {
  cfg.validate();
  const std::int64_t N = cfg.num_steps();
  const double h = cfg.step;
  StepResult res;
  record(0.0, y);
  for (std::int64_t k = 0; k < N; ++k) {
    const double t = static_cast<double>(k) * h;
    // Endpoint stages see one-sided limits inside the step, so a schedule
    // breakpoint on a step boundary does not leak into the neighbouring step.
    const double lo = t + kStageNudge * h;
    const double hi = t + (1.0 - kStageNudge) * h;
    Vec next;
    try {
      if (cfg.method == Method::euler) {
        next = y + h * f(lo, y);
      } else {
        const Vec k1 = f(lo, y);
        const Vec k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
        const Vec k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
        const Vec k4 = f(hi, y + h * k3);
        next = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::domain) throw;
      res.stopped = true;
      res.reason = ErrorCode::domain_exit;
      res.message = e.what();
      res.last_time = t;
      return res;
    }
    const double tn = static_cast<double>(k + 1) * h;
    if (blown_up(next)) {
      std::ostringstream os;
      os << "state diverged after t = " << t;
      res.stopped = true;
      res.reason = ErrorCode::diverged;
      res.message = os.str();
      res.last_time = t;
      return res;
    }
    y = std::move(next);
    if ((k + 1) % cfg.record_every == 0 || k + 1 == N) {
      try {
        record(tn, y);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::domain) throw;
        res.stopped = true;
        res.reason = ErrorCode::domain_exit;
        res.message = e.what();
        res.last_time = t;
        return res;
      }
    }
    res.last_time = tn;
  }
  return res;
}

FlowOutcome to_outcome(Trajectory traj, const StepResult& r) {
  FlowOutcome out;
  out.traj = std::move(traj);
  out.stopped = r.stopped;
  out.reason = r.reason;
  out.message = r.message;
  out.last_time = r.last_time;
  return out;
}

void rethrow(const FlowOutcome& out) {
  if (out.stopped) fail(out.reason, out.message);
}

}  // namespace

FlowOutcome integrate_param_flow(const Parameterization& p, const Loss& loss, const Schedule& s,
                                 const IntegratorConfig& cfg) {
  require(static_cast<bool>(loss.grad), ErrorCode::input, "loss has no gradient");
  Rhs rhs = [&](double t, const Vec& w) {
    if (!p.in_domain(w)) fail(ErrorCode::domain, p.name() + ": parameters left the domain");
    return p.flow_rhs(w, loss.grad(p.g(w)), s.alpha(t));
  };
  Trajectory traj;
  Recorder rec = [&](double t, const Vec& w) {
    State st;
    st.w = w;
    st.x = p.g(w);
    st.a = s.a(t);
    st.y = p.h(w);
    traj.push(t, std::move(st));
  };
  const StepResult r = integrate(rhs, p.w_init(), cfg, rec);
  return to_outcome(std::move(traj), r);
}

Trajectory run_param_flow(const Parameterization& p, const Loss& loss, const Schedule& s,
                          const IntegratorConfig& cfg) {
  FlowOutcome out = integrate_param_flow(p, loss, s, cfg);
  rethrow(out);
  return std::move(out.traj);
}

FlowOutcome integrate_mirror_flow(const LegendreFamily& F, const Loss& loss, const Schedule& s,
                                  const IntegratorConfig& cfg) {
  require(static_cast<bool>(loss.grad), ErrorCode::input, "loss has no gradient");
  Rhs rhs = [&](double t, const Vec& mu) -> Vec {
    return -loss.grad(F.dual_map(F.flow_parameter(s.a(t)), mu));
  };
  Trajectory traj;
  Recorder rec = [&](double t, const Vec& mu) {
    State st;
    st.mu = mu;
    st.a = s.a(t);
    st.x = F.dual_map(F.flow_parameter(st.a), mu);
    traj.push(t, std::move(st));
  };
  const StepResult r = integrate(rhs, Vec::Zero(F.dim()), cfg, rec);
  return to_outcome(std::move(traj), r);
}

Trajectory run_mirror_flow(const LegendreFamily& F, const Loss& loss, const Schedule& s,
                           const IntegratorConfig& cfg) {
  FlowOutcome out = integrate_mirror_flow(F, loss, s, cfg);
  rethrow(out);
  return std::move(out.traj);
}

namespace {

bool matched(const Parameterization& p, const LegendreFamily& F) {
  switch (p.variant()) {
    case Variant::hadamard:
      return F.kind() == FamilyKind::hyperbolic_entropy || F.kind() == FamilyKind::entropy;
    case Variant::deep_hadamard:
      return p.depth() == 2 && p.reg_scale() == 0.5 &&
             (F.kind() == FamilyKind::hyperbolic_entropy || F.kind() == FamilyKind::entropy);
    case Variant::quadratic_commuting: return F.kind() == FamilyKind::quadratic;
    case Variant::diff_powers: return p.power() >= 2 && F.kind() == FamilyKind::diff_powers_flow;
    case Variant::log_ratio: return F.kind() == FamilyKind::log_cosh;
    default: return false;
  }
}

}  // namespace

EquivalenceReport verify_equivalence(const Parameterization& p, const LegendreFamily& F, const Loss& loss,
                                     const Schedule& s, const IntegratorConfig& cfg, double tol) {
  if (p.variant() == Variant::deep_hadamard && p.depth() >= 3) {
    fail(ErrorCode::input, p.name() + " does not commute with its regularizer; no mirror flow to compare");
  }
  if (!matched(p, F)) fail(ErrorCode::input, p.name() + " and " + F.name() + " are not a matched pair");
  require(F.dim() == p.n(), ErrorCode::dimension, "parameterization and family dimensions differ");

  const Vec x0 = p.g(p.w_init());
  const Vec q0 = F.dual_map(F.flow_parameter(0.0), Vec::Zero(F.dim()));
  require(inf_norm(x0 - q0) <= 1e-8 * (1.0 + inf_norm(x0)), ErrorCode::input,
          F.name() + " is not built from the initialization of " + p.name());

  const Trajectory tp = run_param_flow(p, loss, s, cfg);
  const Trajectory tm = run_mirror_flow(F, loss, s, cfg);
  require(tp.size() == tm.size(), ErrorCode::input, "flows recorded different grids");

  EquivalenceReport rep;
  rep.pair = p.name() + " / " + F.name();
  rep.tol = tol;
  for (std::size_t i = 0; i < tp.size(); ++i) {
    const double d = inf_norm(tp.states()[i].x - tm.states()[i].x);
    if (d > rep.max_deviation) {
      rep.max_deviation = d;
      rep.worst_time = tp.times()[i];
    }
  }
  rep.pass = rep.max_deviation <= tol;
  return rep;
}

std::vector<ResidualPoint> riemannian_residual(const LegendreFamily& F, const Trajectory& traj, const Loss& loss,
                                               const Schedule& s, double t_from) {
  const double off = s.off_time();
  if (!(t_from >= off)) {
    std::ostringstream os;
    os << "residual start t = " << t_from << " precedes the regularization turn-off at " << off;
    fail(ErrorCode::input, os.str());
  }
  std::vector<ResidualPoint> out;
  const auto& T = traj.times();
  const auto& S = traj.states();
  for (std::size_t i = 1; i + 1 < T.size(); ++i) {
    if (T[i - 1] < t_from) continue;
    const Vec xdot = (S[i + 1].x - S[i - 1].x) / (T[i + 1] - T[i - 1]);
    const Mat H = F.hessian(F.flow_parameter(S[i].a), S[i].x);
    const Vec r = xdot + H.ldlt().solve(loss.grad(S[i].x));
    out.push_back({T[i], r.norm()});
  }
  return out;
}

}  // namespace mirrorlab
