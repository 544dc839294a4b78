// Copyright 2026 The gentropy Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gentropy {

/// One acceptance check. `label` names the identity or property being
/// checked; `measured` and `threshold` are human-readable summaries.
struct CriterionResult {
  int id = 0;
  std::string key;
  std::string label;
  bool passed = false;
  std::string measured;
  std::string threshold;
};

struct VerifyConfig {
  std::uint64_t seed = 42;
  int threads = 1;
  /// Criterion ids to run; empty runs 1..12.
  std::vector<int> only;
};

inline constexpr int kInProcessCriteria = 12;

CriterionResult run_criterion(int id, const VerifyConfig& config);
std::vector<CriterionResult> run_acceptance(const VerifyConfig& config);

/// Deterministic CSV report: provenance line, then one row per criterion.
std::string verify_report_csv(const std::vector<CriterionResult>& results,
                              const VerifyConfig& config);

}  // namespace gentropy
