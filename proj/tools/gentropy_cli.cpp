// Copyright 2026 The gentropy Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line driver: one subcommand per library module.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gentropy/entropy.hpp"
#include "gentropy/error.hpp"
#include "gentropy/estimation.hpp"
#include "gentropy/io.hpp"
#include "gentropy/missing_em.hpp"
#include "gentropy/models.hpp"
#include "gentropy/sampling.hpp"
#include "gentropy/selection.hpp"
#include "gentropy/verify.hpp"

namespace {

using gentropy::ErrorCode;
using gentropy::Matrix;
using gentropy::ModelPtr;
using gentropy::Vector;
using json = nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInvariant = 1;
constexpr int kExitConfig = 2;

struct Globals {
  std::uint64_t seed = 42;
  int threads = 0;
  std::string out_dir;
  std::string config;
};

// Options that never enter the config hash: they change where output goes
// or how fast it is produced, not what it contains.
bool hash_exempt(const std::string& name) {
  return name == "--threads" || name == "--out-dir" || name == "--out" || name == "--config" ||
         name == "--summary" || name == "--diagnostics" || name == "--model-out" ||
         name == "--help";
}

std::string canonical_config(const CLI::App& sub) {
  std::string out = sub.get_name();
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string name = opt->get_name();
    if (hash_exempt(name)) continue;
    std::string value;
    if (opt->count() > 0) {
      for (const auto& r : opt->results()) value += r + ";";
    } else {
      value = opt->get_default_str();
    }
    out += " " + name + "=" + value;
  }
  return out;
}

std::string resolve_path(const Globals& g, const std::string& path) {
  if (path.empty() || g.out_dir.empty()) return path;
  return (std::filesystem::path(g.out_dir) / path).string();
}

void emit(const Globals& g, const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
  } else {
    gentropy::write_text_file(resolve_path(g, path), content);
  }
}

json provenance_json(const Globals& g, const std::string& canon) {
  return {{"tool", "gentropy " + gentropy::version_string()},
          {"seed", g.seed},
          {"config_hash", gentropy::hex64(gentropy::fnv1a64(canon))}};
}

std::string fmt(double v) { return gentropy::format_double(v); }

json to_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json to_json(const Matrix& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(to_json(Vector(m.row(i).transpose())));
  return a;
}

std::vector<std::string> theta_names(const gentropy::DensityModel& model) {
  std::vector<std::string> names;
  const int d = model.dim();
  const bool elliptical = model.family() == "gaussian" || model.family() == "t";
  if (!elliptical || model.theta_dim() != d + gentropy::vech_size(d)) {
    for (int k = 0; k < model.theta_dim(); ++k) names.push_back("theta_" + std::to_string(k));
    return names;
  }
  for (int i = 0; i < d; ++i) names.push_back("mu_" + std::to_string(i));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j <= i; ++j) names.push_back("sigma_" + std::to_string(i) + std::to_string(j));
  }
  return names;
}

gentropy::Dataset complete_dataset(const std::string& path) {
  const gentropy::CsvTable t = gentropy::read_csv(path);
  if (!t.mask.all()) fail(ErrorCode::ConfigError, path + ": missing cells are not allowed here");
  return gentropy::Dataset(t.values);
}

ModelPtr require_density(const gentropy::ModelSpec& spec, const std::string& what) {
  if (!spec.density) fail(ErrorCode::ConfigError, what + " must be a density model");
  return spec.density;
}

// ---------------------------------------------------------------- entropy

struct EntropyArgs {
  std::string model;
  std::string model_q;
  int x_dim = 1;
  std::size_t samples = 100000;
  std::string out;
};

int cmd_entropy(const Globals& g, const EntropyArgs& a, const std::string& canon) {
  using gentropy::EntropyEstimate;
  using gentropy::Method;
  const ModelPtr p = require_density(gentropy::read_model_json(a.model), "--model");
  const ModelPtr q =
      a.model_q.empty() ? p : require_density(gentropy::read_model_json(a.model_q), "--model-q");
  if (p->dim() != q->dim()) fail(ErrorCode::ConfigError, "--model and --model-q differ in dimension");

  gentropy::Budget budget;
  budget.samples = a.samples;
  budget.stream = gentropy::RandomStream(g.seed);
  budget.threads = gentropy::resolve_threads(g.threads);

  gentropy::CsvWriter w({"quantity", "method", "value", "std_error", "closed_form_value", "paper_ref"});
  w.comment(gentropy::provenance_line(g.seed, canon));

  using Fn = std::function<EntropyEstimate(Method, const gentropy::Budget&)>;
  std::uint64_t stream_id = 0;
  auto add = [&](const std::string& quantity, const std::string& ref, const Fn& fn,
                 std::vector<Method> methods) {
    std::optional<double> closed;
    try {
      closed = fn(Method::ClosedForm, budget).value;
    } catch (const gentropy::Error& e) {
      if (e.code() != ErrorCode::UnsupportedClosedForm) throw;
    }
    const std::string closed_cell = closed ? fmt(*closed) : "";
    if (closed) w.row({quantity, "closed_form", closed_cell, "0", closed_cell, ref});
    for (Method m : methods) {
      gentropy::Budget b = budget;
      b.stream = budget.stream.child(stream_id++);
      try {
        const EntropyEstimate e = fn(m, b);
        w.row({quantity, to_string(m), fmt(e.value), fmt(e.std_error), closed_cell, ref});
      } catch (const gentropy::Error& e) {
        const ErrorCode c = e.code();
        if (c != ErrorCode::Unsupported && c != ErrorCode::UnsupportedClosedForm &&
            c != ErrorCode::UnsupportedMarginal && c != ErrorCode::DimensionMismatch) {
          throw;
        }
      }
    }
  };

  const bool quad = p->dim() <= 2;
  std::vector<Method> both = {Method::MonteCarlo};
  if (quad) both.push_back(Method::Quadrature);

  add("H_G", "G-entropy", [&](Method m, const gentropy::Budget& b) {
    return gentropy::g_entropy(*p, m, b);
  }, both);
  add("H_G(p;q)", "G-cross-entropy", [&](Method m, const gentropy::Budget& b) {
    return gentropy::g_cross_entropy(*p, *q, m, b);
  }, both);
  add("D_F", "Fisher divergence", [&](Method m, const gentropy::Budget& b) {
    return gentropy::fisher_divergence(*p, *q, m, b);
  }, both);
  add("GIM_trace", "G-information matrix trace", [&](Method m, const gentropy::Budget& b) {
    const gentropy::MatrixEstimate gim = gentropy::g_information_matrix(*p, m, b);
    EntropyEstimate e;
    e.method = m;
    e.value = gim.value.trace();
    e.std_error = gim.std_error.size() > 0 ? gim.std_error.diagonal().norm() : 0.0;
    e.n_used = gim.n_used;
    return e;
  }, both);
  if (p->dim() >= 2) {
    if (a.x_dim < 1 || a.x_dim >= p->dim()) fail(ErrorCode::ConfigError, "--x-dim out of range");
    add("I_G", "G-mutual information", [&](Method m, const gentropy::Budget& b) {
      return gentropy::g_mutual_information(*p, a.x_dim, m, b);
    }, both);
    add("2D_F(joint;product)", "G-mutual information as Fisher divergence",
        [&](Method m, const gentropy::Budget& b) {
          return gentropy::g_mutual_information_fisher(*p, a.x_dim, m, b);
        }, both);
    add("H_G(y|x)", "conditional G-entropy", [&](Method m, const gentropy::Budget& b) {
      return gentropy::g_conditional_entropy(*p, a.x_dim, m, gentropy::ConditionalForm::Direct, b);
    }, both);
  }
  if (quad) {
    add("D_JKL", "Kullback-Leibler divergence", [&](Method m, const gentropy::Budget& b) {
      if (m != Method::Quadrature) fail(ErrorCode::UnsupportedClosedForm, "quadrature only");
      EntropyEstimate e;
      e.method = m;
      e.value = gentropy::jkl_divergence(*p, *q, b);
      return e;
    }, {Method::Quadrature});
  }
  emit(g, a.out, w.str());
  return kExitOk;
}

// -------------------------------------------------------------------- fit

struct FitArgs {
  std::string model;
  std::string input;
  std::string init = "moments";
  int max_iters = 10000;
  double grad_tol = 1e-8;
  bool asymptotic = false;
  int n = 2000;
  int reps = 500;
  std::size_t reference_samples = gentropy::kSandwichReferenceSamples;
  std::string out;
  std::string summary;
};

int cmd_fit(const Globals& g, const FitArgs& a, const std::string& canon) {
  const ModelPtr model = require_density(gentropy::read_model_json(a.model), "--model");
  const std::vector<std::string> names = theta_names(*model);
  json summary;
  summary["provenance"] = provenance_json(g, canon);

  if (a.asymptotic) {
    const gentropy::AsymptoticReport rep = gentropy::asymptotic_normality_experiment(
        *model, a.n, a.reps, gentropy::RandomStream(g.seed), gentropy::resolve_threads(g.threads),
        a.reference_samples);
    std::vector<std::string> cols = {"rep_id"};
    for (const auto& n : names) cols.push_back(n);
    cols.push_back("converged");
    gentropy::CsvWriter w(cols);
    w.comment(gentropy::provenance_line(g.seed, canon));
    for (Eigen::Index r = 0; r < rep.theta_hats.rows(); ++r) {
      std::vector<std::string> row = {std::to_string(r)};
      for (Eigen::Index k = 0; k < rep.theta_hats.cols(); ++k) row.push_back(fmt(rep.theta_hats(r, k)));
      row.push_back(rep.converged[static_cast<std::size_t>(r)] ? "1" : "0");
      w.row(row);
    }
    emit(g, a.out, w.str());
    summary["n"] = rep.n;
    summary["replications"] = rep.replications;
    summary["theta_star"] = to_json(rep.theta_star);
    summary["mean_theta_hat"] = to_json(rep.mean_theta_hat);
    summary["empirical_cov"] = to_json(rep.empirical_cov);
    summary["sandwich"] = to_json(rep.sandwich);
    summary["gap"] = rep.diag_gap;
    summary["not_converged"] = rep.not_converged;
  } else {
    if (a.input.empty()) fail(ErrorCode::ConfigError, "fit needs --input unless --asymptotic is set");
    const gentropy::Dataset data = complete_dataset(a.input);
    if (data.dim() != model->dim()) fail(ErrorCode::ConfigError, "data and model dimensions differ");
    ModelPtr init;
    if (a.init == "moments") {
      init = gentropy::moment_initial(*model, data);
    } else if (a.init == "model") {
      init = model;
    } else {
      fail(ErrorCode::ConfigError, "--init must be moments or model");
    }
    gentropy::OptimizerConfig opt;
    opt.max_iters = a.max_iters;
    opt.grad_tol = a.grad_tol;
    const gentropy::FitResult fit = gentropy::mgice_fit(data, *init, opt);

    const bool gaussian = model->family() == "gaussian";
    Vector moments;
    if (gaussian) {
      moments.resize(fit.theta_hat.size());
      moments << data.mean(), gentropy::vech(data.covariance());
    }
    gentropy::CsvWriter w({"parameter", "theta_hat", "sample_moment"});
    w.comment(gentropy::provenance_line(g.seed, canon));
    for (Eigen::Index k = 0; k < fit.theta_hat.size(); ++k) {
      w.row({names[static_cast<std::size_t>(k)], fmt(fit.theta_hat(k)), gaussian ? fmt(moments(k)) : ""});
    }
    emit(g, a.out, w.str());
    summary["gic"] = fit.gic_value;
    summary["iterations"] = fit.iterations;
    summary["converged"] = fit.converged;
    summary["gradient_norm"] = fit.gradient_norm;
    summary["theta_hat"] = to_json(fit.theta_hat);
    summary["model"] = json::parse(gentropy::model_to_json(*fit.model));
    try {
      const gentropy::SandwichCovariance sw = gentropy::sandwich_at(fit.theta_hat, data, *model);
      summary["sandwich"] = to_json(sw.sandwich);
    } catch (const gentropy::Error& e) {
      if (e.code() != ErrorCode::SingularD) throw;
      summary["sandwich"] = nullptr;
    }
  }
  if (!a.summary.empty()) emit(g, a.summary, summary.dump(2) + "\n");
  return kExitOk;
}

// ------------------------------------------------------------- select-ar

struct SelectArgs {
  std::string input;
  int max_order = 5;
  std::string criterion = "gic_c";
  std::string bias_sigma = "candidate";
  std::string out;
};

int cmd_select_ar(const Globals& g, const SelectArgs& a, const std::string& canon) {
  const gentropy::CsvTable t = gentropy::read_csv(a.input);
  if (t.values.cols() != 1) fail(ErrorCode::ConfigError, a.input + ": expected a single column");
  if (!t.mask.all()) fail(ErrorCode::ConfigError, a.input + ": missing cells are not allowed");
  gentropy::SelectionConfig cfg;
  cfg.criterion = gentropy::parse_criterion(a.criterion);
  if (a.bias_sigma == "candidate") {
    cfg.bias_sigma = gentropy::BiasSigma::Candidate;
  } else if (a.bias_sigma == "largest") {
    cfg.bias_sigma = gentropy::BiasSigma::Largest;
  } else {
    fail(ErrorCode::ConfigError, "--bias-sigma must be candidate or largest");
  }
  cfg.threads = gentropy::resolve_threads(g.threads);
  const gentropy::GicReport rep = gentropy::select_ar_order(t.values.col(0), a.max_order, cfg);

  gentropy::CsvWriter w({"order", "sigma2", "gic_n", "bias", "gic_c", "aic", "log_form", "selected"});
  w.comment(gentropy::provenance_line(g.seed, canon));
  w.comment("n=" + std::to_string(rep.n) + " criterion=" + gentropy::to_string(rep.criterion) +
            " selected=" + std::to_string(rep.selected_order) +
            " tie_broken=" + (rep.tie_broken ? "1" : "0") +
            " rankings_agree=" + (rep.rankings_agree ? "1" : "0"));
  for (const auto& r : rep.rows) {
    w.row({std::to_string(r.order), fmt(r.sigma2), fmt(r.gic_n), fmt(r.bias), fmt(r.gic_c),
           fmt(r.aic), fmt(r.log_form), r.order == rep.selected_order ? "1" : "0"});
  }
  emit(g, a.out, w.str());
  return kExitOk;
}

// ------------------------------------------------------------ em-missing

struct EmArgs {
  std::string input;
  std::string family = "gaussian";
  double nu = 5.0;
  std::string mode = "w_surrogate";
  int m = 50;
  int max_iters = 100;
  double tol = 1e-5;
  std::string out;
  std::string model_out;
};

int cmd_em(const Globals& g, const EmArgs& a, const std::string& canon) {
  const gentropy::CsvTable t = gentropy::read_csv(a.input);
  const gentropy::MaskedDataset data(t.values, t.mask);
  const int d = static_cast<int>(data.dim());
  ModelPtr family;
  if (a.family == "gaussian") {
    family = std::make_shared<gentropy::GaussianModel>(Vector::Zero(d), gentropy::SpdMatrix::identity(d));
  } else if (a.family == "t") {
    family = std::make_shared<gentropy::MultivariateTModel>(Vector::Zero(d),
                                                            gentropy::SpdMatrix::identity(d), a.nu);
  } else {
    fail(ErrorCode::ConfigError, "--family must be gaussian or t");
  }
  gentropy::EmConfig cfg;
  cfg.mode = gentropy::parse_em_mode(a.mode);
  cfg.m_conditional_samples = a.m;
  cfg.max_outer_iters = a.max_iters;
  cfg.convergence_tol = a.tol;
  cfg.threads = gentropy::resolve_threads(g.threads);
  gentropy::validate(cfg);
  const ModelPtr init = gentropy::em_initial(*family, data);
  const gentropy::EmTrace trace = gentropy::run_em(data, *init, cfg, gentropy::RandomStream(g.seed));

  const std::vector<std::string> names = theta_names(*init);
  std::vector<std::string> cols = {"iteration"};
  for (const auto& n : names) cols.push_back("theta_t_" + n);
  for (const auto& n : names) cols.push_back("theta_next_" + n);
  for (const char* c : {"g_x", "h_x", "h_z", "q_bar", "surrogate", "step_norm", "inner_converged"}) {
    cols.emplace_back(c);
  }
  gentropy::CsvWriter w(cols);
  w.comment(gentropy::provenance_line(g.seed, canon));
  w.comment(std::string("mode=") + gentropy::to_string(cfg.mode) +
            " converged=" + (trace.converged ? "1" : "0") +
            " missing_fraction=" + fmt(data.missing_fraction()));
  for (const auto& it : trace.iterations) {
    std::vector<std::string> row = {std::to_string(it.iteration)};
    for (Eigen::Index k = 0; k < it.theta_t.size(); ++k) row.push_back(fmt(it.theta_t(k)));
    for (Eigen::Index k = 0; k < it.theta_next.size(); ++k) row.push_back(fmt(it.theta_next(k)));
    for (double v : {it.g_x, it.h_x, it.h_z, it.q_bar, it.surrogate, it.step_norm}) row.push_back(fmt(v));
    row.push_back(it.inner_converged ? "1" : "0");
    w.row(row);
  }
  emit(g, a.out, w.str());
  if (!a.model_out.empty()) emit(g, a.model_out, gentropy::model_to_json(*trace.final_model) + "\n");
  return kExitOk;
}

// ---------------------------------------------------------------- sample

struct SampleArgs {
  std::string target;
  std::string schedule;
  double epsilon = 0.005;
  int steps_per_level = 1000;
  int chains = 1000;
  int steps = 10000;
  int burn_in = 1000;
  double alpha = 0.01;
  std::string out;
  std::string diagnostics;
};

gentropy::NoiseSchedule parse_schedule(const std::string& text, double epsilon) {
  const std::string prefix = "geometric:";
  if (text.rfind(prefix, 0) != 0) fail(ErrorCode::ConfigError, "--schedule must look like geometric:smax,smin,T");
  std::stringstream ss(text.substr(prefix.size()));
  std::vector<std::string> parts;
  for (std::string item; std::getline(ss, item, ',');) parts.push_back(item);
  if (parts.size() != 3) fail(ErrorCode::ConfigError, "--schedule needs three values");
  try {
    return gentropy::geometric_schedule(std::stod(parts[0]), std::stod(parts[1]), std::stoi(parts[2]), epsilon);
  } catch (const gentropy::Error& e) {
    fail(ErrorCode::ConfigError, std::string("--schedule: ") + e.what());
  } catch (const std::logic_error&) {
    fail(ErrorCode::ConfigError, "--schedule values must be numeric");
  }
}

int cmd_sample(const Globals& g, const SampleArgs& a, const std::string& canon) {
  const ModelPtr target = require_density(gentropy::read_model_json(a.target), "--target");
  const int d = target->dim();
  const int threads = gentropy::resolve_threads(g.threads);
  const gentropy::RandomStream stream(g.seed);
  Matrix samples;
  if (!a.schedule.empty()) {
    const gentropy::NoiseSchedule sched = parse_schedule(a.schedule, a.epsilon);
    const double s1 = sched.sigmas.front();
    const gentropy::Sampler init = [s1, d](gentropy::Rng& rng) { return Vector(s1 * rng.normal_vector(d)); };
    samples = gentropy::annealed_chains(init, gentropy::convolved_scores(target), sched,
                                        a.steps_per_level, a.chains, stream, threads);
  } else {
    gentropy::ChainConfig cfg;
    cfg.steps = a.steps;
    cfg.burn_in = a.burn_in;
    cfg.alpha = a.alpha;
    const gentropy::Sampler init = [d](gentropy::Rng& rng) { return rng.normal_vector(d); };
    const gentropy::ScoreFn score = [target](const Vector& x) { return target->score(x); };
    samples = gentropy::langevin_chains(init, score, cfg, a.chains, stream, threads);
  }

  std::vector<std::string> cols;
  for (int k = 0; k < d; ++k) cols.push_back("x" + std::to_string(k));
  gentropy::CsvWriter w(cols);
  w.comment(gentropy::provenance_line(g.seed, canon));
  for (Eigen::Index r = 0; r < samples.rows(); ++r) {
    std::vector<std::string> row;
    for (int k = 0; k < d; ++k) row.push_back(fmt(samples(r, k)));
    w.row(row);
  }
  emit(g, a.out, w.str());

  json diag;
  diag["provenance"] = provenance_json(g, canon);
  diag["n_samples"] = samples.rows();
  const Vector mean = samples.colwise().mean().transpose();
  const Vector var = (samples.rowwise() - mean.transpose()).array().square().colwise().mean().transpose();
  diag["moments"] = {{"mean", to_json(mean)}, {"variance", to_json(var)}};
  if (const auto* mix = dynamic_cast<const gentropy::GaussianMixtureModel*>(target.get())) {
    diag["mode_mass"] = gentropy::mode_masses(samples, *mix);
    diag["target_weights"] = mix->weights();
  }
  const std::string text = diag.dump(2) + "\n";
  if (!a.diagnostics.empty()) {
    emit(g, a.diagnostics, text);
  } else if (!a.out.empty()) {
    emit(g, a.out + ".diagnostics.json", text);
  } else {
    std::cerr << text;
  }
  return kExitOk;
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
  std::vector<int> only;
  std::string out;
};

int cmd_verify(const Globals& g, const VerifyArgs& a) {
  gentropy::VerifyConfig cfg;
  cfg.seed = g.seed;
  cfg.threads = g.threads;
  cfg.only = a.only;
  const std::vector<gentropy::CriterionResult> results = gentropy::run_acceptance(cfg);
  const std::string report = gentropy::verify_report_csv(results, cfg);
  bool all = true;
  std::ostream& table = a.out.empty() ? std::cerr : std::cout;
  for (const auto& r : results) {
    all = all && r.passed;
    table << (r.passed ? "PASS " : "FAIL ") << r.id << " " << r.key << ": " << r.measured << "\n";
  }
  emit(g, a.out, report);
  return all ? kExitOk : kExitInvariant;
}

// ----------------------------------------------------------- config file

// Keys of the JSON config are long option names without the leading
// dashes. Values become command-line tokens placed right after the
// subcommand, so explicit flags given on the command line win.
std::vector<std::string> config_tokens(const std::string& path, CLI::App& app, CLI::App& sub) {
  json cfg;
  try {
    cfg = json::parse(gentropy::read_text_file(path));
  } catch (const json::parse_error& e) {
    fail(ErrorCode::ConfigError, path + ": " + e.what());
  }
  if (!cfg.is_object()) fail(ErrorCode::ConfigError, path + ": config must be a JSON object");
  std::vector<std::string> tokens;
  for (auto it = cfg.begin(); it != cfg.end(); ++it) {
    const std::string flag = "--" + it.key();
    const CLI::Option* opt = sub.get_option_no_throw(flag);
    if (opt == nullptr) opt = app.get_option_no_throw(flag);
    if (opt == nullptr || flag == "--config") {
      fail(ErrorCode::ConfigError, path + ": unknown key '" + it.key() + "' for " + sub.get_name());
    }
    const json& v = it.value();
    if (v.is_boolean()) {
      if (opt->get_type_size() != 0) fail(ErrorCode::ConfigError, path + ": '" + it.key() + "' is not a flag");
      if (v.get<bool>()) tokens.push_back(flag);
      continue;
    }
    auto scalar = [&](const json& x) -> std::string {
      if (x.is_string()) return x.get<std::string>();
      if (x.is_number_integer()) return std::to_string(x.get<long long>());
      if (x.is_number()) return gentropy::format_double(x.get<double>());
      fail(ErrorCode::ConfigError, path + ": unsupported value for '" + it.key() + "'");
    };
    tokens.push_back(flag);
    if (v.is_array()) {
      for (const auto& x : v) tokens.push_back(scalar(x));
    } else {
      tokens.push_back(scalar(v));
    }
  }
  return tokens;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gentropy: gradient-information entropies, estimators and samplers"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", gentropy::version_string());
  Globals g;
  app.add_option("--seed", g.seed, "master seed")->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads (GENTROPY_THREADS fallback)");
  app.add_option("--out-dir", g.out_dir, "directory prepended to relative output paths");
  app.add_option("--config", g.config, "JSON file of option values");
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  EntropyArgs ea;
  CLI::App* entropy = app.add_subcommand("entropy", "G-entropy family report");
  entropy->add_option("--model", ea.model, "model JSON")->required();
  entropy->add_option("--model-q", ea.model_q, "second model JSON (defaults to --model)");
  entropy->add_option("--x-dim", ea.x_dim, "size of the x block")->capture_default_str();
  entropy->add_option("--samples", ea.samples, "Monte Carlo samples")->capture_default_str();
  entropy->add_option("--out", ea.out, "report CSV");

  FitArgs fa;
  CLI::App* fit = app.add_subcommand("fit", "MGICE fit or asymptotic-normality experiment");
  fit->add_option("--model", fa.model, "family / initial model JSON")->required();
  fit->add_option("--input", fa.input, "data CSV");
  fit->add_option("--init", fa.init, "moments or model")->capture_default_str();
  fit->add_option("--max-iters", fa.max_iters)->capture_default_str();
  fit->add_option("--grad-tol", fa.grad_tol)->capture_default_str();
  fit->add_flag("--asymptotic", fa.asymptotic, "replicate fits from --model as truth");
  fit->add_option("--n", fa.n, "sample size per replication")->capture_default_str();
  fit->add_option("--reps", fa.reps, "replications")->capture_default_str();
  fit->add_option("--reference-samples", fa.reference_samples)->capture_default_str();
  fit->add_option("--out", fa.out, "estimates CSV");
  fit->add_option("--summary", fa.summary, "summary JSON");

  SelectArgs sa;
  CLI::App* select = app.add_subcommand("select-ar", "AR order selection by GIC_c or AIC");
  select->add_option("--input", sa.input, "single-column series CSV")->required();
  select->add_option("--max-order", sa.max_order)->capture_default_str();
  select->add_option("--criterion", sa.criterion, "gic_c or aic")->capture_default_str();
  select->add_option("--bias-sigma", sa.bias_sigma, "candidate or largest")->capture_default_str();
  select->add_option("--out", sa.out, "report CSV");

  EmArgs ma;
  CLI::App* em = app.add_subcommand("em-missing", "gradient EM on a masked CSV");
  em->add_option("--input", ma.input, "masked CSV (empty cells are missing)")->required();
  em->add_option("--family", ma.family, "gaussian or t")->capture_default_str();
  em->add_option("--nu", ma.nu, "degrees of freedom for t")->capture_default_str();
  em->add_option("--mode", ma.mode, "literal or w_surrogate")->capture_default_str();
  em->add_option("--m", ma.m, "conditional samples per row")->capture_default_str();
  em->add_option("--max-iters", ma.max_iters)->capture_default_str();
  em->add_option("--tol", ma.tol)->capture_default_str();
  em->add_option("--out", ma.out, "trace CSV");
  em->add_option("--model-out", ma.model_out, "final model JSON");

  SampleArgs pa;
  CLI::App* sample = app.add_subcommand("sample", "Langevin or annealed Langevin sampling");
  sample->add_option("--target", pa.target, "target model JSON")->required();
  sample->add_option("--schedule", pa.schedule, "geometric:smax,smin,T (omit for plain Langevin)");
  sample->add_option("--epsilon", pa.epsilon)->capture_default_str();
  sample->add_option("--steps-per-level", pa.steps_per_level)->capture_default_str();
  sample->add_option("--chains", pa.chains)->capture_default_str();
  sample->add_option("--steps", pa.steps, "plain Langevin steps")->capture_default_str();
  sample->add_option("--burn-in", pa.burn_in, "plain Langevin burn-in")->capture_default_str();
  sample->add_option("--alpha", pa.alpha, "plain Langevin step size")->capture_default_str();
  sample->add_option("--out", pa.out, "samples CSV");
  sample->add_option("--diagnostics", pa.diagnostics, "diagnostics JSON");

  VerifyArgs va;
  CLI::App* verify = app.add_subcommand("verify", "run the invariant suite");
  verify->add_option("--only", va.only, "criterion ids")->delimiter(',');
  verify->add_option("--out", va.out, "report CSV");

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    // Splice config-file values in before the real parse.
    auto cfg_it = std::find(args.begin(), args.end(), "--config");
    if (cfg_it != args.end() && cfg_it + 1 != args.end()) {
      const std::string path = *(cfg_it + 1);
      auto sub_it = std::find_if(args.begin(), args.end(), [&](const std::string& s) {
        return app.get_subcommand_no_throw(s) != nullptr;
      });
      if (sub_it == args.end()) fail(ErrorCode::ConfigError, "--config needs a subcommand");
      const std::vector<std::string> extra = config_tokens(path, app, *app.get_subcommand(*sub_it));
      args.insert(sub_it + 1, extra.begin(), extra.end());
    }
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  } catch (const gentropy::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (*entropy) return cmd_entropy(g, ea, canonical_config(*entropy));
    if (*fit) return cmd_fit(g, fa, canonical_config(*fit));
    if (*select) return cmd_select_ar(g, sa, canonical_config(*select));
    if (*em) return cmd_em(g, ma, canonical_config(*em));
    if (*sample) return cmd_sample(g, pa, canonical_config(*sample));
    if (*verify) return cmd_verify(g, va);
  } catch (const gentropy::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::ConfigError ? kExitConfig : kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvariant;
  }
  return kExitConfig;
}
