// Copyright (c) 2026, mirrorlab developers
// SPDX-License-Identifier: Apache-2.0

#include "mirrorlab/commute.hpp"

#include <gtest/gtest.h>

#include "json.hpp"

#include <cmath>

using namespace mirrorlab;

namespace {

Parameterization deep(int depth, Eigen::Index n, double scale) {
  return Parameterization::deep_hadamard(std::vector<Vec>(static_cast<std::size_t>(depth), Vec::Ones(n)), scale);
}

}  // namespace

TEST(LieBracket, DeepHadamardClosedFormAtOnes) {
  // bracket of g_i with h = sum of squares: (4 - 2k) prod_{q != l} w_q in every slot of coordinate i
  const auto p3 = deep(3, 1, 1.0);
  const Vec b3 = lie_bracket(p3, 0, p3.n(), Vec::Ones(3));
  for (Eigen::Index s = 0; s < 3; ++s) EXPECT_NEAR(b3[s], -2.0, 1e-6);
  const auto p2 = deep(2, 1, 1.0);
  EXPECT_LT(lie_bracket(p2, 0, p2.n(), Vec::Ones(2)).norm(), 1e-8);
  // with the half-sum regularizer the bracket halves
  EXPECT_NEAR(lie_bracket(deep(3, 1, 0.5), 0, 1, Vec::Ones(3))[0], -1.0, 1e-6);
}

TEST(LieBracket, DiagonalIsZeroAndAntisymmetric) {
  Rng rng(2);
  const auto p = deep(3, 2, 0.5);
  for (int rep = 0; rep < 20; ++rep) {
    const Vec w = rng.uniform_vec(p.D(), -2, 2);
    for (Eigen::Index i = 0; i <= p.n(); ++i) {
      EXPECT_EQ(lie_bracket(p, i, i, w).norm(), 0.0);
      for (Eigen::Index j = 0; j <= p.n(); ++j)
        EXPECT_LT((lie_bracket(p, i, j, w) + lie_bracket(p, j, i, w)).cwiseAbs().maxCoeff(), 1e-6);
    }
  }
}

TEST(LieBracket, DeepHadamardMagnitudeOnRandomPoints) {
  Rng rng(12);
  const int k = 3;
  const auto p = deep(k, 1, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    const Vec w = rng.uniform_vec(3, 0.3, 2.0).cwiseProduct(Vec::NullaryExpr(3, [&](Eigen::Index) {
      return rng.uniform() < 0.5 ? -1.0 : 1.0;
    }));
    const Vec b = lie_bracket(p, 0, 1, w);
    for (int l = 0; l < k; ++l) {
      double prod = 1.0;
      for (int q = 0; q < k; ++q)
        if (q != l) prod *= w[q];
      const double expect = std::abs(4.0 - 2.0 * k) * std::abs(prod);
      EXPECT_NEAR(std::abs(b[l]), expect, 1e-3 * expect);
    }
  }
}

TEST(CheckCommuting, KnownVerdicts) {
  const Vec ones = Vec::Ones(3);
  for (const auto& p : {Parameterization::hadamard(ones, ones), Parameterization::diff_squares(ones, ones),
                        Parameterization::diff_powers(2, ones, ones), Parameterization::diff_powers(3, ones, ones),
                        Parameterization::log_ratio(ones, ones)}) {
    const auto rep = check_commuting(p, 50, 1e-4, 1);
    EXPECT_TRUE(rep.pass) << p.name() << " " << rep.max_norm;
  }
  Rng rng(3);
  std::vector<Mat> A;
  for (int i = 0; i < 3; ++i) A.push_back(rng.uniform_vec(4, -1, 1).asDiagonal());
  EXPECT_TRUE(check_commuting(Parameterization::quadratic_commuting(A, Mat::Identity(4, 4), Vec::Ones(4)), 50, 1e-4, 1)
                  .pass);
  const auto bad = check_commuting(deep(3, 2, 0.5), 50, 1e-4, 1);
  EXPECT_FALSE(bad.pass);
  EXPECT_GT(bad.max_norm, 1e-2);
  const auto js = nlohmann::json::parse(bad.to_json());
  EXPECT_EQ(js["pass"], false);
  EXPECT_EQ(js["variant"], "deep-hadamard(depth=3)");
}

TEST(CheckCommuting, SamplingBox) {
  const Vec ones = Vec::Ones(2);
  EXPECT_EQ(default_box(Parameterization::log_ratio(ones, ones)).lo, 0.5);
  EXPECT_EQ(default_box(Parameterization::hadamard(ones, ones)).lo, -2.0);
  EXPECT_THROW(check_commuting(Parameterization::hadamard(ones, ones), 0, 1e-4, 1), Error);
}

TEST(CheckRegular, Examples) {
  const Vec ones = Vec::Ones(2), zeros = Vec::Zero(2);
  const auto had = Parameterization::hadamard(ones, zeros);
  Vec w(4);
  w << 1, 1, 0, 0;
  EXPECT_TRUE(check_regular(had, w, 1e-8));
  EXPECT_FALSE(check_regular(had, Vec::Zero(4), 1e-8));
  const auto lr = Parameterization::log_ratio(Vec::Ones(1), Vec::Ones(1));
  EXPECT_TRUE(check_regular(lr, Vec::Ones(2), 1e-8));
}

TEST(SeparablePair, Examples) {
  std::vector<double> xs;
  for (int i = 0; i < 21; ++i) xs.push_back(0.1 + 0.1 * i);
  const auto sq = check_separable_pair([](double u) { return u * u; }, [](double u) { return 3 * u * u; }, xs);
  EXPECT_TRUE(sq.pass());
  EXPECT_NEAR(sq.c_estimate, 3.0, 1e-6);
  const auto id = check_separable_pair([](double u) { return u; }, [](double u) { return u * u; }, xs);
  EXPECT_EQ(id.status, SeparableStatus::fail);
  for (int k : {1, 2, 3}) {
    const auto pw = check_separable_pair([k](double u) { return std::pow(u, 2 * k); },
                                         [k](double u) { return std::pow(u, 2 * k); }, xs);
    EXPECT_TRUE(pw.pass()) << k;
    EXPECT_NEAR(pw.c_estimate, 1.0, 1e-6);
  }
  // affine h is fine, constant g gives nothing to fit
  EXPECT_TRUE(check_separable_pair([](double u) { return u; }, [](double u) { return 2 * u + 1; }, xs).pass());
  EXPECT_EQ(check_separable_pair([](double) { return 1.0; }, [](double u) { return u; }, xs).status,
            SeparableStatus::inconclusive);
}

TEST(QuadraticCommuting, Examples) {
  std::vector<Mat> diag = {Vec::LinSpaced(3, 1, 3).asDiagonal(), Vec::LinSpaced(3, -1, 4).asDiagonal()};
  const auto d = check_quadratic_commuting(diag, Mat(Vec::LinSpaced(3, 0, 1).asDiagonal()));
  EXPECT_TRUE(d.pass);
  EXPECT_EQ(d.max_commutator_fro, 0.0);

  // e_i e_i^T - e_{n+i} e_{n+i}^T blocks with B = I
  std::vector<Mat> blocks;
  for (int i = 0; i < 2; ++i) {
    Mat A = Mat::Zero(4, 4);
    A(i, i) = 1;
    A(2 + i, 2 + i) = -1;
    blocks.push_back(A);
  }
  EXPECT_TRUE(check_quadratic_commuting(blocks, Mat::Identity(4, 4)).pass);

  Rng rng(5);
  const Mat R1 = symmetrize(rng.normal_mat(4, 4)), R2 = symmetrize(rng.normal_mat(4, 4));
  const auto r = check_quadratic_commuting({R1, R2}, Mat::Identity(4, 4));
  EXPECT_FALSE(r.pass);
  EXPECT_NEAR(r.max_commutator_fro, (R1 * R2 - R2 * R1).norm(), 1e-12);

  Mat asym = Mat::Zero(2, 2);
  asym(0, 1) = 1;
  try {
    check_quadratic_commuting({asym}, Mat::Identity(2, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::input);
  }
}
