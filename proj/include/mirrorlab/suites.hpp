// Copyright (c) 2026, mirrorlab developers
// SPDX-License-Identifier: Apache-2.0
//
// Config-driven verification suites and experiment dispatch shared by the
// C API and the command-line tool.

#pragma once

#include "mirrorlab/io.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mirrorlab {

struct SuiteOptions {
  std::string family;    // equivalence / flow family filter
  std::string variant;   // commuting / diagonal variant
  int depth = 0;         // deep-hadamard depth
  bool expect_fail = false;
  std::string schedule;  // schedule kind override ("none" disables)
  std::optional<std::uint64_t> seed;
};

struct SuiteRow {
  std::string check;
  double value = 0.0;
  double tol = 0.0;
  bool pass = false;
  std::string note;
};

struct SuiteResult {
  std::string suite;
  bool expect_fail = false;
  std::vector<SuiteRow> rows;

  /// All rows pass, or with expect_fail, none does.
  bool passed() const;
  std::string table() const;
  std::string to_json() const;
};

SuiteResult run_verify_suite(const std::string& suite, const Config& cfg, const SuiteOptions& opt);

/// A quadratic test problem paired with a parameterization and its family.
struct EquivalenceCase {
  std::string name;
  Parameterization param;
  FamilyPtr family;
  Loss loss;
};

/// Names: hadamard, entropy, quadratic, diff-powers, log-ratio.
EquivalenceCase make_equivalence_case(const std::string& name, Eigen::Index n, std::uint64_t seed);
const std::vector<std::string>& equivalence_case_names();

/// Seed precedence: explicit option, then MIRRORLAB_SEED, then config key.
std::uint64_t resolve_seed(const Config& cfg, const std::string& key, const SuiteOptions& opt);

/// Schedule from the [schedule] section, with optional kind override.
Schedule schedule_from_config(const Config& cfg, const SuiteOptions& opt, const Schedule& fallback);

/// Experiments: sensing, diagonal, sparse-coding, flow.
ExperimentReport run_experiment(const std::string& name, const Config& cfg, const SuiteOptions& opt);

/// Line plot of one metric against the step index.
std::string report_svg(const ExperimentReport& rep, const std::string& metric);

}  // namespace mirrorlab
