// Copyright (c) 2026, mirrorlab developers
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. Talks to the library through the C API only.
//
// Exit codes: 0 pass, 1 verification failure, 2 usage/config error,
// 3 numeric divergence.

#include "mirrorlab/mirrorlab.h"

#include "CLI11.hpp"

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitDiverged = 3;

struct Args {
  std::string target;
  std::string config;
  std::string family;
  std::string variant;
  int depth = 0;
  bool expect_fail = false;
  std::string schedule;
  std::optional<std::uint64_t> seed;
  std::string out = "mirrorlab-out";
  bool plot = false;
  int jobs = 1;
};

std::mutex g_io;

void report_error(const std::string& where, mlab_status st) {
  std::lock_guard<std::mutex> lock(g_io);
  std::cerr << "mirrorlab: " << where << ": " << mlab_status_string(st);
  const std::string msg = mlab_last_error();
  if (!msg.empty()) std::cerr << ": " << msg;
  std::cerr << "\n";
}

int exit_for(mlab_status st) {
  if (st == MLAB_ERR_DIVERGED || st == MLAB_ERR_DOMAIN_EXIT) return kExitDiverged;
  if (st == MLAB_ERR_INTERNAL) return kExitFail;
  return kExitUsage;
}

struct ConfigHandle {
  mlab_config* p = nullptr;
  ~ConfigHandle() { mlab_config_free(p); }
};

struct ResultHandle {
  mlab_result* p = nullptr;
  ~ResultHandle() { mlab_result_free(p); }
};

// Empty path yields an empty config.
mlab_status open_config(const std::string& path, ConfigHandle& h) {
  if (path.empty()) return mlab_config_new(&h.p);
  return mlab_config_load(path.c_str(), &h.p);
}

mlab_options make_options(const Args& a) {
  mlab_options o;
  mlab_options_init(&o);
  o.family = a.family.empty() ? nullptr : a.family.c_str();
  o.variant = a.variant.empty() ? nullptr : a.variant.c_str();
  o.depth = a.depth;
  o.expect_fail = a.expect_fail ? 1 : 0;
  o.schedule = a.schedule.empty() ? nullptr : a.schedule.c_str();
  if (a.seed) {
    o.has_seed = 1;
    o.seed = *a.seed;
  }
  return o;
}

bool write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  f << text;
  return static_cast<bool>(f);
}

int cmd_verify(const Args& a) {
  ConfigHandle cfg;
  if (mlab_status st = open_config(a.config, cfg); st != MLAB_OK) {
    report_error("config", st);
    return kExitUsage;
  }
  const mlab_options opt = make_options(a);
  ResultHandle res;
  if (mlab_status st = mlab_verify(a.target.c_str(), cfg.p, &opt, &res.p); st != MLAB_OK) {
    report_error("verify " + a.target, st);
    return exit_for(st);
  }
  std::cout << mlab_result_table(res.p);
  std::error_code ec;
  fs::create_directories(a.out, ec);
  const fs::path report = fs::path(a.out) / ("verify-" + a.target + ".json");
  if (ec || !write_file(report, std::string(mlab_result_json(res.p)) + "\n")) {
    std::cerr << "mirrorlab: cannot write " << report.string() << "\n";
    return kExitUsage;
  }
  std::cout << "report: " << report.string() << "\n";
  return mlab_result_passed(res.p) ? kExitPass : kExitFail;
}

// One run into dir. Returns an exit code.
int run_one(const Args& a, const mlab_config* cfg, std::optional<std::uint64_t> seed, const fs::path& dir) {
  Args local = a;
  if (seed) local.seed = seed;
  const mlab_options opt = make_options(local);
  ResultHandle res;
  const mlab_status st = mlab_run(a.target.c_str(), cfg, &opt, &res.p);
  if (st != MLAB_OK) {
    report_error("run " + a.target, st);
    return exit_for(st);
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    std::cerr << "mirrorlab: cannot create " << dir.string() << "\n";
    return kExitUsage;
  }
  const std::string csv = (dir / "trajectory.csv").string();
  const std::string states = (dir / "states.csv").string();
  mlab_status w = mlab_result_write_csv(res.p, csv.c_str());
  if (w == MLAB_OK) w = mlab_result_write_states(res.p, states.c_str());
  if (w == MLAB_OK && !write_file(dir / "summary.json", std::string(mlab_result_json(res.p)) + "\n")) w = MLAB_ERR_IO;
  if (w == MLAB_OK && a.plot) {
    for (const char* metric : {"train_loss", "nuclear_norm", "ratio", "l1_l2_ratio"}) {
      const double* data = nullptr;
      size_t len = 0;
      if (mlab_result_series(res.p, metric, &data, &len) != MLAB_OK || len == 0) continue;
      const std::string svg = (dir / (std::string(metric) + ".svg")).string();
      w = mlab_result_write_svg(res.p, metric, svg.c_str());
      if (w != MLAB_OK) break;
    }
  }
  if (w != MLAB_OK) {
    report_error("writing outputs", w);
    return kExitUsage;
  }
  {
    std::lock_guard<std::mutex> lock(g_io);
    std::cout << mlab_result_table(res.p) << "\n  output: " << dir.string() << "\n";
  }
  return mlab_result_diverged(res.p) ? kExitDiverged : kExitPass;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const auto b = tok.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    out.push_back(std::stoull(tok.substr(b)));
  }
  return out;
}

// The seeds list is read from the raw config file: [sweep] seeds = 0,1,2.
std::optional<std::vector<std::uint64_t>> sweep_seeds(const std::string& path) {
  if (path.empty()) return std::nullopt;
  std::ifstream f(path);
  std::string line, section;
  while (std::getline(f, line)) {
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    line = line.substr(b);
    if (line[0] == '[') {
      section = line.substr(1, line.find(']') - 1);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq);
    key.erase(key.find_last_not_of(" \t") + 1);
    if ((section == "sweep" && key == "seeds") || (section.empty() && key == "seeds"))
      return parse_seed_list(line.substr(eq + 1));
  }
  return std::nullopt;
}

int cmd_run(const Args& a) {
  ConfigHandle cfg;
  if (mlab_status st = open_config(a.config, cfg); st != MLAB_OK) {
    report_error("config", st);
    return kExitUsage;
  }
  std::optional<std::vector<std::uint64_t>> seeds;
  if (!a.seed) {
    try {
      seeds = sweep_seeds(a.config);
    } catch (const std::exception&) {
      std::cerr << "mirrorlab: config: bad seeds list\n";
      return kExitUsage;
    }
  }
  if (!seeds || seeds->empty()) return run_one(a, cfg.p, std::nullopt, a.out);

  // Sweep: bounded pool, each worker owns its result and output directory.
  const std::size_t n = seeds->size();
  std::vector<int> codes(n, kExitPass);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++)
      codes[i] = run_one(a, cfg.p, (*seeds)[i], fs::path(a.out) / ("seed-" + std::to_string((*seeds)[i])));
  };
  const int jobs = std::max(1, std::min<int>(a.jobs, static_cast<int>(n)));
  std::vector<std::thread> pool;
  for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  int worst = kExitPass;
  for (int c : codes) worst = std::max(worst, c);
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mirrorlab: time-dependent mirror flows from regularized reparameterizations"};
  app.set_version_flag("--version", std::string(mlab_version()));
  app.require_subcommand(1);

  Args args;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config,-c", args.config, "configuration file")->check(CLI::ExistingFile);
    sub->add_option("--family", args.family, "Legendre family / equivalence case");
    sub->add_option("--variant", args.variant, "reparameterization or model variant");
    sub->add_option("--depth", args.depth, "deep-hadamard depth or diff-powers k")->check(CLI::NonNegativeNumber);
    sub->add_option("--schedule", args.schedule, "schedule kind override (constant, turnoff, linear-decay, cosine-decay, none)");
    sub->add_option("--seed", args.seed, "seed (overrides MIRRORLAB_SEED and config)");
    sub->add_option("--out,-o", args.out, "output directory")->capture_default_str();
  };

  auto* verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("suite", args.target, "commuting | equivalence | contracting | optimality")
      ->required()
      ->check(CLI::IsMember({"commuting", "equivalence", "contracting", "optimality"}));
  add_common(verify);
  verify->add_flag("--expect-fail", args.expect_fail, "succeed only when every check fails");

  auto* run = app.add_subcommand("run", "run an experiment");
  run->add_option("experiment", args.target, "sensing | diagonal | sparse-coding | flow")
      ->required()
      ->check(CLI::IsMember({"sensing", "diagonal", "sparse-coding", "flow"}));
  add_common(run);
  run->add_flag("--plot", args.plot, "write SVG plots");
  run->add_option("--jobs,-j", args.jobs, "worker threads for seed sweeps")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (verify->parsed()) return cmd_verify(args);
    return cmd_run(args);
  } catch (const std::exception& e) {
    std::cerr << "mirrorlab: " << e.what() << "\n";
    return kExitUsage;
  }
}
