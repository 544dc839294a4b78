// Copyright 2026 The gentropy Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gentropy/missing_em.hpp"
#include "gentropy/models.hpp"
#include "gentropy/numerics.hpp"

namespace gentropy {

/// A parsed model document: a density, or an AR model when family == "ar".
struct ModelSpec {
  std::string family;
  ModelPtr density;
  std::optional<ArModel> ar;
};

/// Parse {family, mu, sigma (row-major, flat or nested), nu?, coeffs?,
/// sigma2?, block_split?}; mixtures use {family, weights, components:
/// [{mu, sigma}]}. Unknown keys and malformed text raise ConfigError.
ModelSpec parse_model_json(const std::string& text);
ModelSpec read_model_json(const std::string& path);
std::string model_to_json(const DensityModel& model);
std::string model_to_json(const ArModel& model);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

/// 64-bit FNV-1a, printed as 16 hex digits.
std::uint64_t fnv1a64(const std::string& text);
std::string hex64(std::uint64_t v);

/// "# gentropy <version> seed=<seed> config_hash=<hash>"
std::string provenance_line(std::uint64_t seed, const std::string& canonical_config);

struct CsvTable {
  std::vector<std::string> header;
  Matrix values;
  /// false where the cell was empty.
  MaskMatrix mask;
};

/// Reads a numeric CSV. Lines starting with '#' are skipped; a first row
/// that does not parse as numbers becomes the header.
CsvTable read_csv(const std::string& path);
CsvTable parse_csv(const std::string& text);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> columns);
  CsvWriter& comment(const std::string& line);
  CsvWriter& row(const std::vector<std::string>& cells);
  std::string str() const;

 private:
  std::size_t width_;
  std::string comments_;
  std::string out_;
};

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

std::string version_string();

}  // namespace gentropy
