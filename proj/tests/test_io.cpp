// Copyright (c) 2026, mirrorlab developers
// SPDX-License-Identifier: Apache-2.0

#include "mirrorlab/io.hpp"
#include "mirrorlab/suites.hpp"

#include <gtest/gtest.h>

#include "json.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <limits>
#include <sstream>

using namespace mirrorlab;

namespace {

ErrorCode code_of(const std::function<void()>& fn, std::string* what = nullptr) {
  try {
    fn();
  } catch (const Error& e) {
    if (what) *what = e.what();
    return e.code();
  }
  return static_cast<ErrorCode>(0);
}

std::string tmp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("mirrorlab_test_" + name)).string();
}

ExperimentReport tiny_report() {
  ExperimentReport rep;
  rep.experiment = "tiny";
  rep.seed = 7;
  rep.steps = {0, 10};
  rep.times = {0.0, 0.1};
  rep.a = {0.0, -0.01};
  rep.series["train_loss"] = {1.0, 0.5};
  rep.series["l1_l2_ratio"] = {std::numeric_limits<double>::quiet_NaN(), 1.25};
  rep.snapshots = {Vec::Zero(2), Vec::Ones(2)};
  return rep;
}

}  // namespace

TEST(Config, ParsesSectionsAndComments) {
  const Config c = Config::parse("# top\nseed = 3\n[sensing]\n n = 12  # inline\n; other\nbeta=0.5\nflag = true\n"
                                 "seeds = 0, 1,2\n");
  EXPECT_EQ(c.get_int("seed", 0), 3);
  EXPECT_EQ(c.get_int("sensing.n", 0), 12);
  EXPECT_DOUBLE_EQ(c.get_double("sensing.beta", 0), 0.5);
  EXPECT_TRUE(c.get_bool("sensing.flag", false));
  EXPECT_EQ(c.get_int_list("sensing.seeds", {}), (std::vector<std::int64_t>{0, 1, 2}));
  EXPECT_EQ(c.get("missing", "x"), "x");
}

TEST(Config, ErrorsCarryLineNumbers) {
  std::string what;
  EXPECT_EQ(code_of([] { Config::parse("a = 1\n\nnot a pair\n", "cfg.ini"); }, &what), ErrorCode::parse);
  EXPECT_NE(what.find("cfg.ini:3"), std::string::npos) << what;
  EXPECT_EQ(code_of([] { Config::parse("[broken\n"); }), ErrorCode::parse);
  EXPECT_EQ(code_of([] { Config::parse("= 4\n"); }), ErrorCode::parse);
  const Config c = Config::parse("n = abc\n");
  EXPECT_EQ(code_of([&] { c.get_int("n", 0); }), ErrorCode::parse);
  EXPECT_EQ(code_of([] { Config::load("/nonexistent/mirrorlab.ini"); }), ErrorCode::io);
}

TEST(Config, HashIsCanonical) {
  const Config a = Config::parse("x = 1\ny = 2\n");
  const Config b = Config::parse("# reordered\ny=2\n\nx =   1\n");
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_EQ(a.hash().size(), 16u);
  EXPECT_NE(a.hash(), Config::parse("x = 1\ny = 3\n").hash());
}

TEST(Config, SeedFromEnvironment) {
  ::setenv("MIRRORLAB_SEED", "42", 1);
  EXPECT_EQ(seed_from_env(), 42u);
  ::unsetenv("MIRRORLAB_SEED");
  EXPECT_FALSE(seed_from_env().has_value());
}

TEST(Matrix, RoundTripIsExact) {
  Rng rng(9);
  Mat M = rng.normal_mat(5, 3);
  M(0, 0) = 1e-300;
  M(1, 1) = -0.1;
  const std::string path = tmp_path("matrix.csv");
  save_matrix(path, M);
  const Mat back = load_matrix(path);
  EXPECT_EQ(back.rows(), 5);
  EXPECT_EQ(back.cols(), 3);
  EXPECT_TRUE((back.array() == M.array()).all());
  std::filesystem::remove(path);
}

TEST(Matrix, ParseErrors) {
  std::string what;
  EXPECT_EQ(code_of([] { parse_matrix("1,2\n3,4\n5\n", "m.csv"); }, &what), ErrorCode::parse);
  EXPECT_NE(what.find("m.csv:3"), std::string::npos) << what;
  EXPECT_EQ(code_of([] { parse_matrix("1,2\n3,x\n", "m.csv"); }, &what), ErrorCode::parse);
  EXPECT_NE(what.find("m.csv:2"), std::string::npos) << what;
  EXPECT_EQ(code_of([] { parse_matrix("\n\n"); }), ErrorCode::parse);
  EXPECT_EQ(parse_matrix(" 1 , -2e3\n\n").cols(), 2);
}

TEST(Csv, HeaderAndEmptyCells) {
  std::ostringstream os;
  write_report_csv(os, tiny_report());
  std::istringstream in(os.str());
  std::string header, r0, r1;
  std::getline(in, header);
  std::getline(in, r0);
  std::getline(in, r1);
  EXPECT_EQ(header, "step,t,a,train_loss,recon_error,nuclear_norm,ratio,l1,l1_l2_ratio");
  EXPECT_EQ(r0, "0,0,0,1,,,,,");
  EXPECT_EQ(r1, "10,0.10000000000000001,-0.01,0.5,,,,,1.25");
}

TEST(Csv, FormatRoundTrips) {
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    const double v = rng.normal() * std::pow(10.0, rng.uniform(-20, 20));
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
}

TEST(Summary, Fields) {
  ExperimentReport rep = tiny_report();
  rep.kkt_residual = 1e-6;
  const auto j = nlohmann::json::parse(summary_json(rep, "abc", 0.5));
  EXPECT_EQ(j["experiment"], "tiny");
  EXPECT_EQ(j["config_hash"], "abc");
  EXPECT_EQ(j["seed"], 7);
  EXPECT_EQ(j["final_train_loss"], 0.5);
  EXPECT_EQ(j["final_l1_l2_ratio"], 1.25);
  EXPECT_TRUE(j["time_to_threshold"].is_null());
  EXPECT_EQ(j["kkt_residual"], 1e-6);
  EXPECT_EQ(j["wall_time_s"], 0.5);
}

TEST(Svg, RendersWellFormedDocument) {
  const std::string svg = render_svg("loss", {0, 1, 2}, {{"a", {1, 0.1, std::nan("")}}, {"b", {2, 1, 0.5}}}, true);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_NE(svg.find("loss"), std::string::npos);
  EXPECT_EQ(svg.find("nan"), std::string::npos);
}

TEST(Suites, UnknownNamesRejected) {
  const Config cfg;
  EXPECT_EQ(code_of([&] { run_verify_suite("nope", cfg, {}); }), ErrorCode::input);
  EXPECT_EQ(code_of([&] { run_experiment("nope", cfg, {}); }), ErrorCode::input);
}
