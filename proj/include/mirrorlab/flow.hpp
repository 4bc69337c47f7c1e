// Copyright (c) 2026, mirrorlab developers
// SPDX-License-Identifier: Apache-2.0
//
// Time integration of parameter-space gradient flows with explicit
// regularization and of the matching time-dependent mirror flows.

#pragma once

#include "mirrorlab/legendre.hpp"
#include "mirrorlab/reparam.hpp"

#include <string>
#include <vector>

namespace mirrorlab {

/// Result of an integration that may stop early.
struct FlowOutcome {
  Trajectory traj;
  bool stopped = false;          // diverged or left the domain
  ErrorCode reason = ErrorCode::diverged;
  std::string message;
  double last_time = 0.0;        // last time with a valid state
};

/// Divergence guard on the state sup-norm.
inline constexpr double kDivergenceLimit = 1e12;

/// dw = -(J_g' grad f(g(w)) + alpha_t grad h(w)) dt. Records w, x = g(w),
/// y = h(w) and a_t every record_every steps and at the final time.
FlowOutcome integrate_param_flow(const Parameterization& p, const Loss& loss, const Schedule& s,
                                 const IntegratorConfig& cfg);
/// Throwing variant: divergence raises ErrorCode::diverged.
Trajectory run_param_flow(const Parameterization& p, const Loss& loss, const Schedule& s,
                          const IntegratorConfig& cfg);

/// d mu = -grad f(Q_b(mu)) dt from mu_0 = 0 with b = F.flow_parameter(a_t).
FlowOutcome integrate_mirror_flow(const LegendreFamily& F, const Loss& loss, const Schedule& s,
                                  const IntegratorConfig& cfg);
/// Throwing variant: leaving the dual domain raises ErrorCode::domain_exit.
Trajectory run_mirror_flow(const LegendreFamily& F, const Loss& loss, const Schedule& s,
                           const IntegratorConfig& cfg);

struct EquivalenceReport {
  std::string pair;
  double max_deviation = 0.0;
  double worst_time = 0.0;
  double tol = 0.0;
  bool pass = false;
};

/// Runs both flows on the same grid and compares x_t in the sup-norm.
/// Only matched pairs are accepted; non-commuting parameterizations are
/// refused with an input error.
EquivalenceReport verify_equivalence(const Parameterization& p, const LegendreFamily& F, const Loss& loss,
                                     const Schedule& s, const IntegratorConfig& cfg, double tol = 1e-4);

struct ResidualPoint {
  double t = 0.0;
  double residual = 0.0;
};

/// |xdot + (hess R_{a_T}(x))^{-1} grad f(x)| along the recorded trajectory
/// for t >= t_from, with xdot by central differences. t_from must not
/// precede the schedule's turn-off time.
std::vector<ResidualPoint> riemannian_residual(const LegendreFamily& F, const Trajectory& traj, const Loss& loss,
                                               const Schedule& s, double t_from);

}  // namespace mirrorlab
