// Copyright (c) 2026, mirrorlab developers
// SPDX-License-Identifier: Apache-2.0

#include "mirrorlab/flow.hpp"
#include "mirrorlab/suites.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace mirrorlab;

namespace {

IntegratorConfig rk4(double step, double t_end, int every = 10) {
  IntegratorConfig c;
  c.method = Method::rk4;
  c.step = step;
  c.t_end = t_end;
  c.record_every = every;
  return c;
}

Loss scalar_quadratic(double c) { return Loss::quadratic(Mat::Identity(1, 1), Vec::Constant(1, c)); }

}  // namespace

TEST(ParamFlow, GradientFlowDescends) {
  Rng rng(1);
  const Vec target = rng.uniform_vec(4, -1, 1);
  const Loss loss = Loss::quadratic(Mat::Identity(4, 4), target);
  const auto p = Parameterization::hadamard(Vec::Ones(4), Vec::Constant(4, 0.1));
  const Trajectory tr = run_param_flow(p, loss, Schedule::none(20), rk4(1e-2, 20, 5));
  tr.validate();
  double prev = loss.value(tr.states().front().x);
  for (const State& s : tr.states()) {
    const double f = loss.value(s.x);
    EXPECT_LE(f, prev + 1e-10);
    prev = f;
  }
  EXPECT_LT(prev, 1e-6);
}

TEST(ParamFlow, PureWeightDecayIsExponential) {
  Rng rng(2);
  const Vec m0 = rng.uniform_vec(3, -1, 1), w0 = rng.uniform_vec(3, -1, 1);
  const auto p = Parameterization::hadamard(m0, w0);
  const Loss zero{[](const Vec&) { return 0.0; }, [](const Vec& x) { return Vec::Zero(x.size()); }};
  const double alpha = 0.4;
  const Trajectory tr = run_param_flow(p, zero, Schedule::constant(alpha, 3), rk4(1e-3, 3, 100));
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const Vec expect = p.w_init() * std::exp(-alpha * tr.times()[i]);
    EXPECT_LT((tr.states()[i].w - expect).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(ParamFlow, SymFactorStaysBounded) {
  // with X* = 0 the loss gradient only pulls U in, so |U_t| never exceeds |U_0|
  Rng rng(3);
  const Mat U0 = rng.normal_mat(3, 3);
  const auto p = Parameterization::sym_factor(U0);
  const Loss loss = Loss::quadratic(Mat::Identity(9, 9), Vec::Zero(9));
  const Trajectory tr = run_param_flow(p, loss, Schedule::constant(0.1, 5), rk4(1e-3, 5, 100));
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const double norm = tr.states()[i].w.norm();
    EXPECT_LE(norm, U0.norm() * std::exp(-0.1 * tr.times()[i]) + 1e-12);
  }
}

TEST(MirrorFlow, EntropyStaysPositiveAndReachesTarget) {
  const auto F = make_entropy(Vec::Constant(1, 0.3));
  const Loss loss = scalar_quadratic(2.0);
  const Trajectory free = run_mirror_flow(*F, loss, Schedule::none(10), rk4(1e-3, 10, 100));
  for (const State& s : free.states()) EXPECT_GT(s.x[0], 0.0);
  const Trajectory tr = run_mirror_flow(*F, loss, Schedule::turnoff(0.5, 1.0, 30), rk4(1e-3, 30, 100));
  EXPECT_NEAR(tr.back().x[0], 2.0, 1e-8);
}

TEST(MirrorFlow, HyperbolicEntropyDriftsWithoutLoss) {
  Rng rng(4);
  const Vec m0 = rng.uniform_vec(3, 0.5, 1.5), w0 = rng.uniform_vec(3, -0.4, 0.4);
  const auto F = make_hyperbolic_entropy_from_hadamard(m0, w0);
  const Loss zero{[](const Vec&) { return 0.0; }, [](const Vec& x) { return Vec::Zero(x.size()); }};
  const Schedule s = Schedule::cosine_decay(0.8, 2.0, 3.0);
  const Trajectory tr = run_mirror_flow(*F, zero, s, rk4(1e-2, 3, 10));
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const Vec expect = m0.cwiseProduct(w0) * std::exp(2 * s.a(tr.times()[i]));
    EXPECT_LT((tr.states()[i].x - expect).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_EQ(tr.states()[i].mu.norm(), 0.0);
  }
}

TEST(Equivalence, MatchedPairsAgree) {
  const Schedule s = Schedule::turnoff(0.5, 1.0, 4.0);
  for (const std::string& name : equivalence_case_names()) {
    const auto c = make_equivalence_case(name, name == "quadratic" ? 2 : 5, 7);
    const auto rep = verify_equivalence(c.param, *c.family, c.loss, s, rk4(1e-3, 4.0), 1e-4);
    EXPECT_TRUE(rep.pass) << rep.pair << " " << rep.max_deviation;
    EXPECT_LT(rep.max_deviation, 1e-8) << rep.pair;
  }
}

TEST(Equivalence, TimeIndependentCase) {
  const auto c = make_equivalence_case("hadamard", 5, 3);
  const auto rep = verify_equivalence(c.param, *c.family, c.loss, Schedule::none(4), rk4(1e-3, 4.0), 1e-5);
  EXPECT_TRUE(rep.pass) << rep.max_deviation;
}

TEST(Equivalence, RefusesBadPairs) {
  const auto c = make_equivalence_case("hadamard", 3, 1);
  const auto deep = Parameterization::deep_hadamard({Vec::Ones(3), Vec::Ones(3), Vec::Ones(3)});
  try {
    verify_equivalence(deep, *c.family, c.loss, Schedule::none(1), rk4(1e-2, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::input);
  }
  // wrong family kind
  EXPECT_THROW(verify_equivalence(c.param, *make_log_cosh(Vec::Ones(3), Vec::Ones(3)), c.loss, Schedule::none(1),
                                  rk4(1e-2, 1)),
               Error);
  // right kind, different initialization
  EXPECT_THROW(verify_equivalence(c.param, *make_hyperbolic_entropy_from_hadamard(Vec::Ones(3), Vec::Constant(3, 0.2)),
                                  c.loss, Schedule::none(1), rk4(1e-2, 1)),
               Error);
}

TEST(Riemannian, ResidualSmallWhereExpected) {
  const auto c = make_equivalence_case("hadamard", 4, 5);
  const Trajectory free = run_mirror_flow(*c.family, c.loss, Schedule::none(2), rk4(1e-3, 2.0, 1));
  for (const auto& r : riemannian_residual(*c.family, free, c.loss, Schedule::none(2), 0.0))
    EXPECT_LT(r.residual, 1e-5) << r.t;

  const Schedule s = Schedule::turnoff(0.5, 1.0, 3.0);
  const Trajectory tr = run_mirror_flow(*c.family, c.loss, s, rk4(1e-3, 3.0, 1));
  for (const auto& r : riemannian_residual(*c.family, tr, c.loss, s, 1.0)) EXPECT_LT(r.residual, 1e-3) << r.t;

  try {
    riemannian_residual(*c.family, tr, c.loss, Schedule::constant(0.1, 3.0), 2.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::input);
  }
}

TEST(MirrorFlow, EnergyDescentWithoutRegularization) {
  for (const std::string& name : equivalence_case_names()) {
    const auto c = make_equivalence_case(name, name == "quadratic" ? 2 : 4, 11);
    const Trajectory tr = run_mirror_flow(*c.family, c.loss, Schedule::none(3), rk4(1e-3, 3.0, 1));
    double prev = c.loss.value(tr.states().front().x);
    for (const State& s : tr.states()) {
      const double f = c.loss.value(s.x);
      EXPECT_LE(f, prev + 1e-10) << name;
      prev = f;
    }
  }
}

TEST(MirrorFlow, ConvergesAfterTurnOff) {
  // rank-deficient least squares, contracting family: iterates settle on a solution
  Rng rng(6);
  const Mat Z = rng.normal_mat(2, 4);
  const Vec y = Z * rng.uniform_vec(4, 0.2, 1.0);
  const Loss loss = Loss::least_squares(Z, y, 0.5);
  const auto F = make_entropy(Vec::Constant(4, 0.5), 0.5);
  const Trajectory tr = run_mirror_flow(*F, loss, Schedule::turnoff(0.3, 1.0, 60), rk4(1e-2, 60, 100));
  const auto& S = tr.states();
  EXPECT_LT((S.back().x - S[S.size() - 2].x).norm(), 1e-6);
  EXPECT_LT((Z * S.back().x - y).norm(), 1e-6);
}

TEST(Integrator, Rk4OrderOnStepHalving) {
  const auto c = make_equivalence_case("hadamard", 3, 9);
  const Schedule s = Schedule::constant(0.3, 2.0);
  auto final_x = [&](double h) { return run_param_flow(c.param, c.loss, s, rk4(h, 2.0, 1000000)).back().x; };
  const Vec ref = final_x(1e-4);
  const double e1 = (final_x(0.04) - ref).cwiseAbs().maxCoeff();
  const double e2 = (final_x(0.02) - ref).cwiseAbs().maxCoeff();
  EXPECT_LE(e2, e1 / 4.0) << e1 << " " << e2;
  EXPECT_GT(e1 / e2, 10.0);  // fourth order gives about 16
}

TEST(Integrator, DivergenceAndDomainExit) {
  // f = -x^4 makes the factors blow up in finite time
  const auto p = Parameterization::hadamard(Vec::Ones(1), Vec::Ones(1));
  const Loss runaway{[](const Vec& x) { return -std::pow(x[0], 4); },
                     [](const Vec& x) { return Vec::Constant(1, -4 * std::pow(x[0], 3)); }};
  IntegratorConfig e;
  e.method = Method::euler;
  e.step = 0.01;
  e.t_end = 100;
  const FlowOutcome out = integrate_param_flow(p, runaway, Schedule::none(100), e);
  EXPECT_TRUE(out.stopped);
  EXPECT_EQ(out.reason, ErrorCode::diverged);
  EXPECT_LT(out.last_time, 100);
  try {
    run_param_flow(p, runaway, Schedule::none(100), e);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::diverged);
  }

  // a large Euler step pushes log-ratio factors through zero
  const auto lr = Parameterization::log_ratio(Vec::Constant(1, 0.2), Vec::Constant(1, 0.2));
  const FlowOutcome ex = integrate_param_flow(lr, scalar_quadratic(50.0), Schedule::none(10), e);
  EXPECT_TRUE(ex.stopped);
  EXPECT_EQ(ex.reason, ErrorCode::domain_exit);
  EXPECT_GT(ex.traj.size(), 0u);
}
