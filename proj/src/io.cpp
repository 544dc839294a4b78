// Copyright 2026 The gentropy Authors
// SPDX-License-Identifier: Apache-2.0
#include "gentropy/io.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "gentropy/error.hpp"
#include "json.hpp"

#ifndef GENTROPY_VERSION
#define GENTROPY_VERSION "0.0.0"
#endif

namespace gentropy {

using nlohmann::json;

std::string version_string() { return GENTROPY_VERSION; }

namespace {

[[noreturn]] void config_error(const std::string& what) { fail(ErrorCode::ConfigError, what); }

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) config_error(where + " must be a JSON object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (allowed.count(it.key()) == 0) config_error("unknown key '" + it.key() + "' in " + where);
  }
}

double number(const json& j, const std::string& what) {
  if (!j.is_number()) config_error(what + " must be a number");
  return j.get<double>();
}

Vector vector_of(const json& j, const std::string& what) {
  if (!j.is_array()) config_error(what + " must be an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(j[i], what);
  return v;
}

Matrix matrix_of(const json& j, Eigen::Index d, const std::string& what) {
  if (!j.is_array()) config_error(what + " must be an array");
  Matrix m(d, d);
  if (!j.empty() && j[0].is_array()) {
    if (static_cast<Eigen::Index>(j.size()) != d) config_error(what + " has the wrong row count");
    for (Eigen::Index r = 0; r < d; ++r) {
      const Vector row = vector_of(j[static_cast<std::size_t>(r)], what);
      if (row.size() != d) config_error(what + " has a row of the wrong length");
      m.row(r) = row.transpose();
    }
  } else {
    const Vector flat = vector_of(j, what);
    if (flat.size() != d * d) config_error(what + " must hold d*d numbers in row-major order");
    for (Eigen::Index r = 0; r < d; ++r) {
      for (Eigen::Index c = 0; c < d; ++c) m(r, c) = flat(r * d + c);
    }
  }
  return m;
}

const json& required(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) config_error("missing key '" + key + "' in " + where);
  return obj.at(key);
}

// Model-construction errors from invalid parameters count as config errors.
template <typename F>
auto as_config(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    config_error(std::string("invalid model parameters: ") + e.what());
  }
}

json vector_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json matrix_json(const Matrix& m) {
  json a = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) a.push_back(m(r, c));
  }
  return a;
}

std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

ModelSpec parse_model_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    config_error("malformed JSON at " + line_col(text, e.byte > 0 ? e.byte - 1 : 0));
  }
  if (!doc.is_object()) config_error("model document must be a JSON object");
  const json& fam = required(doc, "family", "model");
  if (!fam.is_string()) config_error("family must be a string");
  ModelSpec spec;
  spec.family = fam.get<std::string>();
  if (spec.family == "gaussian" || spec.family == "t") {
    const bool is_t = spec.family == "t";
    check_keys(doc, is_t ? std::set<std::string>{"family", "mu", "sigma", "nu", "block_split"}
                         : std::set<std::string>{"family", "mu", "sigma", "block_split"},
               spec.family + " model");
    const Vector mu = vector_of(required(doc, "mu", "model"), "mu");
    if (mu.size() == 0) config_error("mu must not be empty");
    const Matrix sigma = matrix_of(required(doc, "sigma", "model"), mu.size(), "sigma");
    int split = -1;
    if (doc.contains("block_split")) {
      if (!doc["block_split"].is_number_integer()) config_error("block_split must be an integer");
      split = doc["block_split"].get<int>();
    }
    spec.density = as_config([&]() -> ModelPtr {
      if (is_t) {
        return std::make_shared<MultivariateTModel>(mu, SpdMatrix(sigma),
                                                    number(required(doc, "nu", "model"), "nu"),
                                                    split);
      }
      return std::make_shared<GaussianModel>(mu, SpdMatrix(sigma));
    });
  } else if (spec.family == "mixture") {
    check_keys(doc, {"family", "weights", "components"}, "mixture model");
    const Vector w = vector_of(required(doc, "weights", "model"), "weights");
    const json& comps = required(doc, "components", "model");
    if (!comps.is_array() || static_cast<Eigen::Index>(comps.size()) != w.size()) {
      config_error("components must be an array matching weights");
    }
    std::vector<double> weights(w.data(), w.data() + w.size());
    std::vector<Vector> means;
    std::vector<SpdMatrix> covs;
    for (const json& c : comps) {
      check_keys(c, {"mu", "sigma"}, "mixture component");
      const Vector mu = vector_of(required(c, "mu", "component"), "mu");
      const Matrix sigma = matrix_of(required(c, "sigma", "component"), mu.size(), "sigma");
      means.push_back(mu);
      covs.push_back(as_config([&] { return SpdMatrix(sigma); }));
    }
    spec.density = as_config([&]() -> ModelPtr {
      return std::make_shared<GaussianMixtureModel>(weights, means, covs);
    });
  } else if (spec.family == "ar") {
    check_keys(doc, {"family", "coeffs", "sigma2"}, "ar model");
    ArModel m;
    m.coeffs = doc.contains("coeffs") ? vector_of(doc["coeffs"], "coeffs") : Vector();
    m.sigma2 = number(required(doc, "sigma2", "model"), "sigma2");
    as_config([&] {
      validate(m);
      return 0;
    });
    spec.ar = m;
  } else {
    config_error("unknown family '" + spec.family + "'");
  }
  return spec;
}

ModelSpec read_model_json(const std::string& path) { return parse_model_json(read_text_file(path)); }

std::string model_to_json(const DensityModel& model) {
  json doc;
  doc["family"] = model.family();
  if (const auto* t = dynamic_cast<const MultivariateTModel*>(&model)) {
    doc["mu"] = vector_json(t->mu());
    doc["sigma"] = matrix_json(t->sigma().matrix());
    doc["nu"] = t->nu();
    doc["block_split"] = t->block_split();
  } else if (const auto* g = dynamic_cast<const EllipticalModel*>(&model)) {
    doc["mu"] = vector_json(g->mu());
    doc["sigma"] = matrix_json(g->sigma().matrix());
  } else if (const auto* m = dynamic_cast<const GaussianMixtureModel*>(&model)) {
    doc["weights"] = m->weights();
    json comps = json::array();
    for (const auto& c : m->components()) {
      comps.push_back({{"mu", vector_json(c.mu())}, {"sigma", matrix_json(c.sigma().matrix())}});
    }
    doc["components"] = comps;
  } else {
    fail(ErrorCode::Unsupported, "no JSON form for " + model.family());
  }
  return doc.dump(2);
}

std::string model_to_json(const ArModel& model) {
  json doc;
  doc["family"] = "ar";
  doc["coeffs"] = vector_json(model.coeffs);
  doc["sigma2"] = model.sigma2;
  return doc.dump(2);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return s;
}

std::string provenance_line(std::uint64_t seed, const std::string& canonical_config) {
  return "# gentropy " + version_string() + " seed=" + std::to_string(seed) +
         " config_hash=" + hex64(fnv1a64(canonical_config));
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  cells.push_back(cur);
  return cells;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

bool parse_number(const std::string& s, double& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), out);
  return res.ec == std::errc() && res.ptr == t.data() + t.size();
}

}  // namespace

CsvTable parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<std::string>> rows;
  CsvTable table;
  std::size_t lineno = 0;
  bool first = true;
  std::vector<std::size_t> row_lines;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line[0] == '#') continue;
    std::vector<std::string> cells = split_line(line);
    if (first) {
      first = false;
      bool numeric = true;
      for (const auto& c : cells) {
        double v = 0.0;
        if (!trim(c).empty() && !parse_number(c, v)) numeric = false;
      }
      if (!numeric) {
        for (const auto& c : cells) table.header.push_back(trim(c));
        continue;
      }
    }
    rows.push_back(std::move(cells));
    row_lines.push_back(lineno);
  }
  const std::size_t width = table.header.empty() ? (rows.empty() ? 0 : rows[0].size())
                                                 : table.header.size();
  table.values = Matrix::Zero(static_cast<Eigen::Index>(rows.size()),
                              static_cast<Eigen::Index>(width));
  table.mask = MaskMatrix::Constant(table.values.rows(), table.values.cols(), true);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != width) {
      config_error("CSV line " + std::to_string(row_lines[r]) + " has " +
                   std::to_string(rows[r].size()) + " cells, expected " + std::to_string(width));
    }
    for (std::size_t c = 0; c < width; ++c) {
      double v = 0.0;
      const auto ri = static_cast<Eigen::Index>(r);
      const auto ci = static_cast<Eigen::Index>(c);
      if (trim(rows[r][c]).empty()) {
        table.mask(ri, ci) = false;
        table.values(ri, ci) = std::nan("");
      } else if (parse_number(rows[r][c], v)) {
        table.values(ri, ci) = v;
      } else {
        config_error("CSV line " + std::to_string(row_lines[r]) + ", column " +
                     std::to_string(c + 1) + " is not a number");
      }
    }
  }
  return table;
}

CsvTable read_csv(const std::string& path) { return parse_csv(read_text_file(path)); }

CsvWriter::CsvWriter(std::vector<std::string> columns) : width_(columns.size()) {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i > 0) out_ += ',';
    out_ += columns[i];
  }
  out_ += '\n';
}

CsvWriter& CsvWriter::comment(const std::string& line) {
  comments_ += (line.rfind('#', 0) == 0 ? line : "# " + line) + "\n";
  return *this;
}

CsvWriter& CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != width_) fail(ErrorCode::DimensionMismatch, "CSV row width mismatch");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) out_ += ',';
    out_ += cells[i];
  }
  out_ += '\n';
  return *this;
}

std::string CsvWriter::str() const { return comments_ + out_; }

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) fail(ErrorCode::ConfigError, "cannot write " + path);
  out << content;
  if (!out) fail(ErrorCode::ConfigError, "failed writing " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::ConfigError, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace gentropy
