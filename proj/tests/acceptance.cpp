// Copyright 2026 The gentropy Authors
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance runner: one PASS/FAIL line per criterion. Criteria 1-12 run
// in-process; criterion 13 runs the CLI verify command twice and compares
// the reports byte for byte.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <sys/wait.h>

#include "gentropy/io.hpp"
#include "gentropy/verify.hpp"

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = "\"" GENTROPY_CLI "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void print(const gentropy::CriterionResult& r, double seconds) {
  std::printf("%s [%2d] %s: %s (threshold: %s) [%.1fs]\n", r.passed ? "PASS" : "FAIL", r.id,
              r.key.c_str(), r.measured.c_str(), r.threshold.c_str(), seconds);
  std::fflush(stdout);
}

}  // namespace

int main() {
  gentropy::VerifyConfig cfg;
  cfg.seed = 42;
  int failed = 0;
  for (int id = 1; id <= gentropy::kInProcessCriteria; ++id) {
    cfg.only = {id};
    const auto start = std::chrono::steady_clock::now();
    const gentropy::CriterionResult r = gentropy::run_acceptance(cfg).front();
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
    print(r, dt.count());
    failed += r.passed ? 0 : 1;
  }

  const std::filesystem::path dir = GENTROPY_TEST_TMP;
  std::filesystem::create_directories(dir);
  const std::string a = (dir / "verify_a.csv").string();
  const std::string b = (dir / "verify_b.csv").string();
  const auto start = std::chrono::steady_clock::now();
  const int rc_a = run_cli("--seed 42 verify --out \"" + a + "\"");
  const int rc_b = run_cli("--seed 42 verify --out \"" + b + "\"");
  const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
  gentropy::CriterionResult det;
  det.id = 13;
  det.key = "verify_report_determinism";
  det.threshold = "byte-identical reports";
  const bool produced = (rc_a == 0 || rc_a == 1) && (rc_b == 0 || rc_b == 1) &&
                        std::filesystem::exists(a) && std::filesystem::exists(b);
  if (produced) {
    const std::string ta = gentropy::read_text_file(a);
    const std::string tb = gentropy::read_text_file(b);
    det.passed = !ta.empty() && ta == tb;
    det.measured = std::string(det.passed ? "identical" : "different") + "; bytes=" +
                   std::to_string(ta.size()) + "; exit_codes=" + std::to_string(rc_a) + "/" +
                   std::to_string(rc_b);
  } else {
    det.passed = false;
    det.measured = "verify did not produce both reports; exit_codes=" + std::to_string(rc_a) + "/" +
                   std::to_string(rc_b);
  }
  print(det, dt.count());
  failed += det.passed ? 0 : 1;

  std::printf("%d of 13 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
