// Copyright 2026 The gentropy Authors
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end checks of the command-line driver.

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"
#include "gentropy/io.hpp"
#include "gentropy/models.hpp"
#include "gentropy/selection.hpp"

using namespace gentropy;

namespace {

const std::string kCli = GENTROPY_CLI;
const std::string kData = GENTROPY_TEST_DATA;
const std::filesystem::path kTmp = GENTROPY_TEST_TMP;

int run(const std::string& args) {
  std::filesystem::create_directories(kTmp);
  const std::string cmd = "\"" + kCli + "\" " + args + " >/dev/null 2>\"" + (kTmp / "stderr.txt").string() + "\"";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string tmp(const std::string& name) { return (kTmp / name).string(); }

// Cell `column` of the first row starting with (quantity, method).
std::string lookup(const std::string& text, const std::string& quantity, const std::string& method,
                   int column) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const std::string prefix = quantity + "," + (method.empty() ? "" : method + ",");
    if (line.rfind(prefix, 0) != 0) continue;
    std::stringstream ss(line);
    std::string cell;
    for (int c = 0; c <= column; ++c) std::getline(ss, cell, ',');
    return cell;
  }
  return "";
}

}  // namespace

TEST_CASE("entropy report on the bivariate example") {
  REQUIRE(run("--seed 1 entropy --model " + kData + "/bivariate_example.json --samples 20000 --out " +
              tmp("entropy.csv")) == 0);
  const std::string text = read_text_file(tmp("entropy.csv"));
  CHECK(text.rfind("# gentropy ", 0) == 0);
  CHECK(text.find("seed=1 ") != std::string::npos);
  const double closed = std::stod(lookup(text, "I_G", "closed_form", 2));
  const double quad = std::stod(lookup(text, "I_G", "quadrature", 2));
  CHECK(closed == doctest::Approx(5.0 / 12.0).epsilon(1e-12));
  CHECK(std::abs(quad - 5.0 / 12.0) < 1e-3);
  // q defaults to p, so the Fisher divergence row vanishes.
  CHECK(std::stod(lookup(text, "D_F", "closed_form", 2)) == 0.0);
  CHECK(std::abs(std::stod(lookup(text, "D_F", "quadrature", 2))) < 1e-12);
  CHECK(std::stod(lookup(text, "H_G(y|x)", "quadrature", 2)) == doctest::Approx(2.0 / 3.0).epsilon(1e-4));
}

TEST_CASE("malformed configs exit with code 2") {
  CHECK(run("entropy --model " + kData + "/malformed.json") == 2);
  const std::string err = read_text_file(tmp("stderr.txt"));
  CHECK(err.find("line 3") != std::string::npos);
  CHECK(run("entropy --model " + kData + "/unknown_key.json") == 2);
  CHECK(run("entropy") == 2);
  CHECK(run("no-such-command") == 2);
  write_text_file(tmp("bad_config.json"), R"({"colour": 3})");
  CHECK(run("--config " + tmp("bad_config.json") + " select-ar --input " + kData + "/ar2_series.csv") == 2);
}

TEST_CASE("select-ar on the bundled AR(2) series selects order 2") {
  REQUIRE(run("select-ar --input " + kData + "/ar2_series.csv --max-order 5 --out " + tmp("ar.csv")) == 0);
  const CsvTable t = read_csv(tmp("ar.csv"));
  REQUIRE(t.header.back() == "selected");
  REQUIRE(t.values.rows() == 6);
  for (Eigen::Index r = 0; r < t.values.rows(); ++r) {
    CHECK(t.values(r, 7) == (t.values(r, 0) == 2.0 ? 1.0 : 0.0));
  }
}

TEST_CASE("config files supply option values and explicit flags win") {
  write_text_file(tmp("sel.json"), R"({"max-order": 3, "criterion": "aic"})");
  REQUIRE(run("--config " + tmp("sel.json") + " select-ar --input " + kData + "/ar2_series.csv --out " +
              tmp("ar_cfg.csv")) == 0);
  CHECK(read_csv(tmp("ar_cfg.csv")).values.rows() == 4);
  REQUIRE(run("--config " + tmp("sel.json") + " select-ar --max-order 4 --input " + kData +
              "/ar2_series.csv --out " + tmp("ar_cfg2.csv")) == 0);
  CHECK(read_csv(tmp("ar_cfg2.csv")).values.rows() == 5);
}

TEST_CASE("fit of a Gaussian reports the sample moments") {
  Matrix s(2, 2);
  s << 1.0, 0.3, 0.3, 2.0;
  const GaussianModel g(Vector::Zero(2), SpdMatrix(s));
  Rng rng(4);
  CsvWriter w({"a", "b"});
  for (int i = 0; i < 300; ++i) {
    const Vector x = g.sample(rng);
    w.row({format_double(x(0)), format_double(x(1))});
  }
  write_text_file(tmp("fit_data.csv"), w.str());
  REQUIRE(run("fit --model " + kData + "/bivariate_example.json --init model --input " + tmp("fit_data.csv") +
              " --out " + tmp("fit.csv") + " --summary " + tmp("fit.json")) == 0);
  const std::string text = read_text_file(tmp("fit.csv"));
  for (const char* name : {"mu_0", "mu_1", "sigma_00", "sigma_10", "sigma_11"}) {
    const std::string est = lookup(text, name, "", 1);
    REQUIRE_FALSE(est.empty());
    CHECK(std::abs(std::stod(est) - std::stod(lookup(text, name, "", 2))) < 1e-6);
  }
  const auto summary = nlohmann::json::parse(read_text_file(tmp("fit.json")));
  CHECK(summary["converged"].get<bool>());
  CHECK(summary["provenance"]["seed"].get<std::uint64_t>() == 42);
}

TEST_CASE("em-missing writes one trace row per outer iteration") {
  write_text_file(tmp("masked.csv"), "x,y\n0.1,0.3\n-0.5,\n1.2,0.8\n0.4,\n-1.0,-0.7\n0.9,1.1\n");
  REQUIRE(run("em-missing --input " + tmp("masked.csv") + " --mode literal --m 3 --out " + tmp("trace.csv") +
              " --model-out " + tmp("final.json")) == 0);
  const CsvTable t = read_csv(tmp("trace.csv"));
  CHECK(t.values.rows() == 1);
  CHECK(t.header.size() == 1 + 5 + 5 + 7);
  CHECK(read_model_json(tmp("final.json")).family == "gaussian");
  REQUIRE(run("em-missing --input " + tmp("masked.csv") + " --m 3 --max-iters 4 --out " + tmp("trace2.csv")) == 0);
  const CsvTable t2 = read_csv(tmp("trace2.csv"));
  CHECK(t2.values.rows() >= 1);
  CHECK(t2.values.rows() <= 4);
}

TEST_CASE("sample output is identical across worker counts") {
  const std::string base = "sample --target " + kData +
                           "/bimodal_mixture.json --schedule geometric:5,0.1,10 --steps-per-level 100 --chains 200";
  REQUIRE(run("--threads 1 " + base + " --out " + tmp("s1.csv")) == 0);
  REQUIRE(run("--threads 3 " + base + " --out " + tmp("s3.csv")) == 0);
  CHECK(read_text_file(tmp("s1.csv")) == read_text_file(tmp("s3.csv")));
  CHECK(read_text_file(tmp("s1.csv.diagnostics.json")) == read_text_file(tmp("s3.csv.diagnostics.json")));
  const auto diag = nlohmann::json::parse(read_text_file(tmp("s1.csv.diagnostics.json")));
  CHECK(diag["mode_mass"].size() == 2);
  CHECK(read_csv(tmp("s1.csv")).values.rows() == 200);
  CHECK(run("sample --target " + kData + "/bimodal_mixture.json --schedule geometric:0.1,5,10") == 2);
}

TEST_CASE("verify runs a subset and writes a keyed report") {
  REQUIRE(run("verify --only 3,4 --out " + tmp("verify.csv")) == 0);
  const std::string text = read_text_file(tmp("verify.csv"));
  CHECK(text.find("id,key,paper_ref,status,measured,threshold") != std::string::npos);
  CHECK(text.find(",PASS,") != std::string::npos);
  CHECK(text.find(",FAIL,") == std::string::npos);
}

TEST_CASE("--out-dir prefixes relative outputs") {
  REQUIRE(run("--out-dir " + tmp("nested/dir") + " select-ar --input " + kData + "/ar2_series.csv --out r.csv") == 0);
  CHECK(std::filesystem::exists(kTmp / "nested/dir/r.csv"));
}
