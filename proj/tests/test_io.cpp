// Copyright 2026 The gentropy Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>
#include <string>

#include "doctest.h"
#include "gentropy/error.hpp"
#include "gentropy/io.hpp"

using namespace gentropy;

namespace {

const std::string kData = GENTROPY_TEST_DATA;

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("model JSON fixtures parse into the right families") {
  const ModelSpec g = read_model_json(kData + "/bivariate_example.json");
  CHECK(g.family == "gaussian");
  REQUIRE(g.density);
  CHECK(g.density->dim() == 2);
  CHECK(g.density->theta()(3) == 1.0);

  const ModelSpec t = read_model_json(kData + "/student_t.json");
  const auto& tm = dynamic_cast<const MultivariateTModel&>(*t.density);
  CHECK(tm.nu() == 3.0);
  CHECK(tm.block_split() == 2);

  const ModelSpec m = read_model_json(kData + "/bimodal_mixture.json");
  CHECK(m.family == "mixture");
  CHECK(dynamic_cast<const GaussianMixtureModel&>(*m.density).weights()[1] == 0.3);

  const ModelSpec ar = read_model_json(kData + "/ar2.json");
  REQUIRE(ar.ar.has_value());
  CHECK(ar.ar->order() == 2);
  CHECK_FALSE(ar.density);
}

TEST_CASE("model JSON round-trips bit for bit") {
  for (const char* f : {"/bivariate_example.json", "/student_t.json", "/bimodal_mixture.json"}) {
    const ModelSpec a = read_model_json(kData + f);
    const std::string text = model_to_json(*a.density);
    const ModelSpec b = parse_model_json(text);
    CHECK(b.density->family() == a.density->family());
    CHECK(model_to_json(*b.density) == text);
  }
  const ModelSpec ar = read_model_json(kData + "/ar2.json");
  CHECK(parse_model_json(model_to_json(*ar.ar)).ar->coeffs == ar.ar->coeffs);
}

TEST_CASE("malformed and unknown-key configs are ConfigErrors with positions") {
  try {
    (void)read_model_json(kData + "/malformed.json");
    FAIL("expected ConfigError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigError);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK(code_of([] { (void)read_model_json(kData + "/unknown_key.json"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { (void)parse_model_json(R"({"family": "cauchy"})"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { (void)parse_model_json(R"({"family": "gaussian", "mu": [0], "sigma": [-1]})"); }) ==
        ErrorCode::ConfigError);
  CHECK(code_of([] { (void)parse_model_json(R"({"family": "gaussian", "mu": [0, 1], "sigma": [1, 0, 0]})"); }) ==
        ErrorCode::ConfigError);
}

TEST_CASE("CSV parsing handles headers, comments and missing cells") {
  const CsvTable t = parse_csv("# provenance\nx,y\n1,2\n3,\n,4.5\n");
  CHECK(t.header == std::vector<std::string>{"x", "y"});
  REQUIRE(t.values.rows() == 3);
  CHECK(t.values(0, 1) == 2.0);
  CHECK_FALSE(t.mask(1, 1));
  CHECK_FALSE(t.mask(2, 0));
  CHECK(t.mask(2, 1));
  CHECK(std::isnan(t.values(1, 1)));
  const CsvTable n = parse_csv("1.5\n-2e-3\n");
  CHECK(n.header.empty());
  CHECK(n.values(1, 0) == -2e-3);
  CHECK(code_of([] { (void)parse_csv("1,2\n3\n"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { (void)parse_csv("1,2\n3,abc\n"); }) == ErrorCode::ConfigError);
}

TEST_CASE("CSV writer emits comments first and checks widths") {
  CsvWriter w({"a", "b"});
  w.row({"1", "2"});
  w.comment("first");
  w.comment("# second");
  CHECK(w.str() == "# first\n# second\na,b\n1,2\n");
  CHECK_THROWS_AS(w.row({"1"}), Error);
}

TEST_CASE("shortest round-trip formatting is exact") {
  std::mt19937_64 eng(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 2000; ++i) {
    const double v = u(eng) * std::pow(10.0, static_cast<int>(eng() % 40) - 20);
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(std::nan("")) == "nan");
}

TEST_CASE("provenance lines carry version, seed and a stable hash") {
  const std::string a = provenance_line(42, "select-ar --max-order=5");
  CHECK(a.rfind("# gentropy " + version_string() + " seed=42 config_hash=", 0) == 0);
  CHECK(a == provenance_line(42, "select-ar --max-order=5"));
  CHECK(a != provenance_line(42, "select-ar --max-order=6"));
  CHECK(hex64(fnv1a64("")) == "cbf29ce484222325");
  CHECK(hex64(0x1ULL).size() == 16);
}
