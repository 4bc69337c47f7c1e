// Copyright (c) 2026, mirrorlab developers
// SPDX-License-Identifier: Apache-2.0

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any of them fails.

#include "mirrorlab/commute.hpp"
#include "mirrorlab/experiments.hpp"
#include "mirrorlab/io.hpp"
#include "mirrorlab/suites.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace mirrorlab;
using Eigen::Index;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

int g_failed = 0;

void criterion(const char* id, const char* title, const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("error: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!v.pass) ++g_failed;
  std::printf("%s %-3s %-34s %-s (%.2fs)\n", v.pass ? "PASS" : "FAIL", id, title, v.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

IntegratorConfig rk4(double step, double t_end) {
  IntegratorConfig c;
  c.method = Method::rk4;
  c.step = step;
  c.t_end = t_end;
  c.record_every = 10;
  return c;
}

// Default sensing setup: n=20, r=5, m=120, beta=0.1, eta=0.25, 5000 Euler steps.
ExperimentReport sensing(std::uint64_t seed, const Schedule& s) {
  SensingConfig c;
  c.seed = seed;
  c.schedule = s;
  return matrix_sensing_run(c);
}

constexpr double kSensingEnd = 0.25 * 5000;

Verdict equivalence() {
  const Schedule s = Schedule::turnoff(0.5, 1.0, 4.0);
  Verdict v{true, ""};
  for (const char* name : {"hadamard", "quadratic", "entropy"}) {
    const auto c = make_equivalence_case(name, std::string(name) == "quadratic" ? 2 : 5, 1);
    const auto t0 = std::chrono::steady_clock::now();
    const auto rep = verify_equivalence(c.param, *c.family, c.loss, s, rk4(1e-3, 4.0), 1e-4);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    v.pass = v.pass && rep.max_deviation <= 1e-4 && secs < 10.0;
    v.detail += std::string(name) + "=" + fmt(rep.max_deviation) + " ";
  }
  return v;
}

Verdict table5_constant() {
  Verdict v{true, "nuc/loss:"};
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto rep = sensing(seed, Schedule::constant(0.01, kSensingEnd));
    const double nuc = rep.final("nuclear_norm"), loss = rep.final("train_loss");
    v.pass = v.pass && !rep.stopped && nuc >= 0.88 && nuc <= 0.97 && loss >= 1e-4 && loss <= 1e-2;
    v.detail += " " + fmt(nuc) + "/" + fmt(loss);
  }
  return v;
}

Verdict table5_schedules() {
  const std::vector<std::pair<const char*, Schedule>> rows = {
      {"linear", Schedule::linear_decay(0.04, 625.0, kSensingEnd)},
      {"cosine", Schedule::cosine_decay(0.04, 625.0, kSensingEnd)},
      {"0.02-to", Schedule::turnoff(0.02, 625.0, kSensingEnd)},
      {"0.2-to", Schedule::turnoff(0.2, 62.5, kSensingEnd)},
  };
  Verdict v{true, "worst loss:"};
  for (const auto& [name, s] : rows) {
    double worst_loss = 0, worst_nuc = 0;
    bool ok = true;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto rep = sensing(seed, s);
      const double nuc = rep.final("nuclear_norm"), loss = rep.final("train_loss");
      ok = ok && !rep.stopped && std::abs(nuc - 1.0) <= 0.01 && loss <= 1e-7;
      worst_loss = std::max(worst_loss, loss);
      worst_nuc = std::max(worst_nuc, std::abs(nuc - 1.0));
    }
    v.pass = v.pass && ok;
    v.detail += std::string(" ") + name + "=" + fmt(worst_loss) + (ok ? "" : "(x)");
  }
  return v;
}

Verdict turnoff_recovery() {
  int good = 0;
  std::string d;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const double on_off = sensing(seed, Schedule::turnoff(0.02, 625.0, kSensingEnd)).final("recon_error");
    const double plain = sensing(seed, Schedule::none(kSensingEnd)).final("recon_error");
    if (on_off <= 1e-2 && plain >= 5e-2) ++good;
    d += " " + fmt(on_off) + "/" + fmt(plain);
  }
  return {good >= 4, std::to_string(good) + "/5 seeds, recon t-o/none:" + d};
}

// Agreement of the flow limit with the constrained minimizer of R_{a_T}.
Verdict optimality() {
  double worst_kkt = 0, worst_gap = 0;
  bool ok = true;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    RegressionConfig rc;
    rc.n = 6;
    rc.d = 3;
    rc.sparsity = 2;
    rc.eta = 1e-2;
    rc.steps = 20000;
    rc.alpha = 0.01;
    rc.method = Method::rk4;
    rc.variant = RegressionVariant::mw;
    rc.seed = seed;
    const auto net = diagonal_network_run(rc);
    const auto rp = make_regression_problem(rc);
    const Vec x_net = net.snapshots.back();
    const double a_net = net.a.back();
    const auto F = make_hyperbolic_entropy_from_hadamard(Vec::Zero(rc.n), Vec::Ones(rc.n));
    const double kkt_net = kkt_residual(rp.Z, x_net, *F, a_net);
    const auto sol_net =
        oracle::constrained_min(oracle::hyperbolic_entropy(Vec::Zero(rc.n), Vec::Ones(rc.n), a_net), rp.Z, rp.y,
                                Vec::Zero(rc.n));

    SensingConfig sc;
    sc.n = 8;
    sc.r = 8;
    sc.m = 4;
    sc.beta = 0.1;
    sc.eta = 0.02;
    sc.steps = 20000;
    sc.method = Method::rk4;
    sc.kind = SensingKind::commuting_diagonal;
    sc.schedule = Schedule::turnoff(0.5, 1.0, sc.eta * sc.steps);
    sc.record_every = 500;
    sc.seed = seed;
    const auto sr = matrix_sensing_run(sc);
    const auto sp = make_sensing_problem(sc);
    Mat Z(sc.m, sc.n);
    for (Index i = 0; i < sc.m; ++i) Z.row(i) = unflatten_square(sp.measurements.row(i).transpose()).diagonal().transpose();
    const Vec lambda = unflatten_square(sr.snapshots.back()).diagonal();
    const double a_s = sr.a.back();
    const Vec x0 = Vec::Constant(sc.n, sc.beta);
    const double kkt_s = kkt_residual(Z, lambda, *make_entropy(x0, 0.25), a_s);
    const auto sol_s = oracle::constrained_min(oracle::entropy(x0, 0.25, a_s), Z, sp.y, x0);

    ok = ok && sol_net.converged && sol_s.converged;
    worst_kkt = std::max({worst_kkt, kkt_net, kkt_s});
    worst_gap = std::max({worst_gap, (sol_net.x - x_net).cwiseAbs().maxCoeff(), (sol_s.x - lambda).cwiseAbs().maxCoeff()});
  }
  ok = ok && worst_kkt <= 1e-4 && worst_gap <= 1e-3;
  return {ok, "max kkt=" + fmt(worst_kkt) + " max |x - oracle|=" + fmt(worst_gap)};
}

Verdict contracting() {
  Rng rng(21);
  std::vector<double> grid;
  for (int i = 0; i < 50; ++i) grid.push_back(-2.0 + 2.0 * i / 49.0);
  std::vector<Vec> xr, xp;
  for (int i = 0; i < 50; ++i) {
    xr.push_back(rng.uniform_vec(3, -2, 2));
    xp.push_back(rng.uniform_vec(3, 0.05, 3));
  }
  const auto H = make_hyperbolic_entropy_from_hadamard(rng.uniform_vec(3, 0.5, 1.5), rng.uniform_vec(3, -0.4, 0.4));
  const auto E = make_entropy(rng.uniform_vec(3, 0.5, 1.5));
  std::vector<Mat> blocks;
  for (Index i = 0; i < 3; ++i) {
    Mat A = Mat::Zero(6, 6);
    A(i, i) = 1;
    A(3 + i, 3 + i) = -1;
    blocks.push_back(A);
  }
  const auto Q = make_quadratic(blocks, -Mat::Identity(6, 6), rng.uniform_vec(6, 0.5, 1.5));
  const auto rh = contracting_check(*H, grid, xr, 1e-8);
  const auto re = contracting_check(*E, grid, xp, 1e-8);
  const auto rq = contracting_check(*Q, grid, xr, 1e-8);
  return {rh.pass && re.pass && !rq.pass,
          "hyp=" + fmt(rh.max_positive_slope) + " ent=" + fmt(re.max_positive_slope) +
              " quad(B=-I)=" + fmt(rq.max_positive_slope)};
}

Verdict positional_bias() {
  Rng rng(5);
  const Vec x0 = rng.uniform_vec(4, 0.2, 2.0);
  const auto E = make_entropy(x0);
  double worst_e = 0;
  for (int i = 0; i <= 300; ++i) {
    const double a = -3.0 + 0.01 * i;
    worst_e = std::max(worst_e, (E->argmin_position(a) - x0 * std::exp(2 * a)).cwiseAbs().maxCoeff());
  }
  const Vec u0 = rng.uniform_vec(4, 0.7, 2.0), v0 = rng.uniform_vec(4, 0.7, 2.0);
  const auto L = make_log_cosh(u0, v0);
  const double a_hi = L->a_range().hi;
  double worst_l = 0;
  for (int i = 0; i <= 300; ++i) {
    const double a = -3.0 + (a_hi + 3.0) * 0.999 * i / 300.0;
    const Vec expect = (0.5 * (u0.array().square() - 2 * a).log() - 0.5 * (v0.array().square() - 2 * a).log()).matrix();
    worst_l = std::max(worst_l, (L->argmin_position(a) - expect).cwiseAbs().maxCoeff());
  }
  return {worst_e <= 1e-10 && worst_l <= 1e-10, "entropy=" + fmt(worst_e) + " log-cosh=" + fmt(worst_l)};
}

Verdict range_shrinking() {
  const Vec u0 = (Vec(3) << 1.0, 1.4, 0.8).finished(), v0 = (Vec(3) << 0.8, 1.2, 1.1).finished();
  bool ok = true;
  std::string d = "len(0) - len(-0.5):";
  for (int k : {2, 3}) {
    const auto D = make_diff_powers_flow(k, u0, v0);
    const auto at0 = D->domain(0.0).dual, at5 = D->domain(-0.5).dual;
    for (std::size_t i = 0; i < at0.size(); ++i) {
      const double shrink = at0[i].length() - at5[i].length();
      ok = ok && std::abs(shrink - 1.0) <= 1e-12;
      if (i == 0) d += " k=" + std::to_string(k) + ":" + fmt(shrink);
    }
  }
  return {ok, d};
}

Verdict stationarity_order() {
  int good = 0;
  std::string d;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    std::vector<double> times;
    for (int k : {1, 2, 3}) {
      SuiteOptions opt;
      opt.depth = k;
      opt.seed = seed;
      const auto rep = run_experiment("sparse-coding", Config{}, opt);
      times.push_back(rep.stopped ? NAN : stationarity_time(rep, 0.05));
    }
    if (times[0] > times[1] && times[1] > times[2]) ++good;
    d += " " + fmt(times[0]) + ">" + fmt(times[1]) + ">" + fmt(times[2]);
  }
  return {good == 5, std::to_string(good) + "/5 seeds:" + d};
}

Verdict non_commuting() {
  Rng rng(12);
  const int k = 3;
  const auto p3 = Parameterization::deep_hadamard(std::vector<Vec>(k, Vec::Ones(1)), 1.0);
  double worst = 0;
  for (int rep = 0; rep < 20; ++rep) {
    Vec w = rng.uniform_vec(k, 0.3, 2.0);
    for (int l = 0; l < k; ++l)
      if (rng.uniform() < 0.5) w[l] = -w[l];
    const Vec b = lie_bracket(p3, 0, 1, w);
    for (int l = 0; l < k; ++l) {
      double prod = 1.0;
      for (int q = 0; q < k; ++q)
        if (q != l) prod *= w[q];
      const double expect = std::abs((4.0 - 2.0 * k) * prod);
      worst = std::max(worst, std::abs(std::abs(b[l]) - expect) / expect);
    }
  }
  const auto p2 = Parameterization::deep_hadamard(std::vector<Vec>(2, Vec::Ones(1)), 1.0);
  double worst2 = 0;
  for (int rep = 0; rep < 20; ++rep)
    worst2 = std::max(worst2, lie_bracket(p2, 0, 1, rng.uniform_vec(2, -2, 2)).cwiseAbs().maxCoeff());
  return {worst <= 1e-3 && worst2 <= 1e-6, "depth3 rel=" + fmt(worst) + " depth2=" + fmt(worst2)};
}

Verdict lasting_effect() {
  int good = 0;
  std::string d;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    RegressionConfig c;
    c.seed = seed;
    const auto prob = make_regression_problem(c);
    const double gt = prob.x_star.lpNorm<1>() / prob.x_star.norm();
    c.variant = RegressionVariant::mw;
    const double r_mw = diagonal_network_run(c).final("l1_l2_ratio");
    c.variant = RegressionVariant::linear_l1;
    const double r_lin = diagonal_network_run(c).final("l1_l2_ratio");
    if (std::abs(r_mw - gt) <= 0.1 * gt && r_lin > gt) ++good;
    d += " " + fmt(r_mw) + "/" + fmt(r_lin);
  }
  return {good >= 4, std::to_string(good) + "/5 seeds, ratio mw/m:" + d};
}

}  // namespace

int main() {
  criterion("1", "equivalence oracle", equivalence);
  criterion("2a", "sensing constant 0.01", table5_constant);
  criterion("2b", "sensing schedules reach 1.00", table5_schedules);
  criterion("3", "turn-off recovery", turnoff_recovery);
  criterion("4", "optimality vs oracle", optimality);
  criterion("5", "contracting property", contracting);
  criterion("6", "positional bias", positional_bias);
  criterion("7a", "range shrinking", range_shrinking);
  criterion("7b", "stationarity order in k", stationarity_order);
  criterion("8", "non-commuting detection", non_commuting);
  criterion("9", "diagonal network lasting effect", lasting_effect);
  std::printf("%d criteria failed\n", g_failed);
  return g_failed == 0 ? 0 : 1;
}
