// Copyright 2026 The gentropy Authors
// SPDX-License-Identifier: Apache-2.0
//
// Python bindings over the core library. Models cross the boundary as
// opaque shared handles; vectors and matrices as NumPy arrays.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gentropy/entropy.hpp"
#include "gentropy/error.hpp"
#include "gentropy/estimation.hpp"
#include "gentropy/io.hpp"
#include "gentropy/models.hpp"
#include "gentropy/selection.hpp"
#include "gentropy/verify.hpp"

namespace py = pybind11;
namespace g = gentropy;

namespace {

// pybind11 holders must be non-const; the library only hands out const views.
using Handle = std::shared_ptr<g::DensityModel>;

Handle handle(const g::ModelPtr& p) { return std::const_pointer_cast<g::DensityModel>(p); }

g::Budget make_budget(std::size_t samples, std::uint64_t seed, int threads) {
  g::Budget b;
  b.samples = samples;
  b.stream = g::RandomStream(seed);
  b.threads = g::resolve_threads(threads);
  return b;
}

py::dict estimate_dict(const g::EntropyEstimate& e) {
  py::dict d;
  d["value"] = e.value;
  d["std_error"] = e.std_error;
  d["method"] = g::to_string(e.method);
  d["n_used"] = e.n_used;
  return d;
}

Handle density_from_json(const std::string& text) {
  g::ModelSpec spec = g::parse_model_json(text);
  if (!spec.density) g::fail(g::ErrorCode::ConfigError, "not a density model: " + spec.family);
  return handle(spec.density);
}

g::Matrix sample_rows(const g::DensityModel& m, int n, std::uint64_t seed) {
  g::Rng rng = g::RandomStream(seed).engine();
  return g::sample_dataset(m, n, rng).values();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Score-based entropy, divergence and estimation routines";
  m.attr("__version__") = g::version_string();

  static PyObject* error_type =
      PyErr_NewException("gentropy._core.GentropyError", PyExc_RuntimeError, nullptr);
  m.attr("GentropyError") = py::handle(error_type);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const g::Error& e) {
      PyErr_SetString(error_type, e.what());
    }
  });

  py::class_<g::DensityModel, Handle>(m, "Model")
      .def_property_readonly("family", &g::DensityModel::family)
      .def_property_readonly("dim", &g::DensityModel::dim)
      .def_property_readonly("theta", &g::DensityModel::theta)
      .def("log_density", &g::DensityModel::log_density, py::arg("x"))
      .def("score", &g::DensityModel::score, py::arg("x"))
      .def("laplacian_log", &g::DensityModel::laplacian_log, py::arg("x"))
      .def("w_value", py::overload_cast<const g::Vector&>(&g::DensityModel::w_value, py::const_),
           py::arg("x"))
      .def("mean", &g::DensityModel::mean)
      .def("sample", &sample_rows, py::arg("n"), py::arg("seed") = 42)
      .def("to_json", [](const g::DensityModel& self) { return g::model_to_json(self); });

  m.def("gaussian", [](const g::Vector& mu, const g::Matrix& sigma) -> Handle {
    return std::make_shared<g::GaussianModel>(mu, g::SpdMatrix(sigma));
  }, py::arg("mu"), py::arg("sigma"));
  m.def("model_from_json", &density_from_json, py::arg("text"));
  m.def("load_model", [](const std::string& path) {
    return density_from_json(g::read_text_file(path));
  }, py::arg("path"));

  m.def("g_entropy", [](const Handle& p, const std::string& method, std::size_t samples,
                        std::uint64_t seed, int threads) {
    return estimate_dict(g::g_entropy(*p, g::parse_method(method), make_budget(samples, seed, threads)));
  }, py::arg("model"), py::arg("method") = "closed_form", py::arg("samples") = 100000,
        py::arg("seed") = 42, py::arg("threads") = 1);
  m.def("g_cross_entropy", [](const Handle& p, const Handle& q, const std::string& method,
                              std::size_t samples, std::uint64_t seed, int threads) {
    return estimate_dict(
        g::g_cross_entropy(*p, *q, g::parse_method(method), make_budget(samples, seed, threads)));
  }, py::arg("p"), py::arg("q"), py::arg("method") = "closed_form", py::arg("samples") = 100000,
        py::arg("seed") = 42, py::arg("threads") = 1);
  m.def("fisher_divergence", [](const Handle& p, const Handle& q,
                                const std::string& method, std::size_t samples,
                                std::uint64_t seed, int threads) {
    return estimate_dict(
        g::fisher_divergence(*p, *q, g::parse_method(method), make_budget(samples, seed, threads)));
  }, py::arg("p"), py::arg("q"), py::arg("method") = "closed_form", py::arg("samples") = 100000,
        py::arg("seed") = 42, py::arg("threads") = 1);
  m.def("g_mutual_information", [](const Handle& p, int x_dim, const std::string& method,
                                   std::size_t samples, std::uint64_t seed, int threads) {
    return estimate_dict(g::g_mutual_information(*p, x_dim, g::parse_method(method),
                                                 make_budget(samples, seed, threads)));
  }, py::arg("model"), py::arg("x_dim"), py::arg("method") = "closed_form",
        py::arg("samples") = 100000, py::arg("seed") = 42, py::arg("threads") = 1);

  m.def("mgice_fit", [](const g::Matrix& data, const Handle& family, int max_iters,
                        double grad_tol) {
    const g::Dataset ds(data);
    g::OptimizerConfig cfg;
    cfg.max_iters = max_iters;
    cfg.grad_tol = grad_tol;
    const g::FitResult r = g::mgice_fit(ds, *g::moment_initial(*family, ds), cfg);
    py::dict d;
    d["theta_hat"] = r.theta_hat;
    d["gic_value"] = r.gic_value;
    d["iterations"] = r.iterations;
    d["converged"] = r.converged;
    d["gradient_norm"] = r.gradient_norm;
    d["model"] = handle(r.model);
    return d;
  }, py::arg("data"), py::arg("family"), py::arg("max_iters") = 10000, py::arg("grad_tol") = 1e-8);

  m.def("select_ar", [](const g::Vector& series, int max_order, const std::string& criterion) {
    g::SelectionConfig cfg;
    cfg.criterion = g::parse_criterion(criterion);
    const g::GicReport r = g::select_ar_order(series, max_order, cfg);
    py::list rows;
    for (const g::GicRow& row : r.rows) {
      py::dict d;
      d["order"] = row.order;
      d["sigma2"] = row.sigma2;
      d["gic_n"] = row.gic_n;
      d["bias"] = row.bias;
      d["gic_c"] = row.gic_c;
      d["aic"] = row.aic;
      rows.append(d);
    }
    py::dict out;
    out["selected_order"] = r.selected_order;
    out["rows"] = rows;
    return out;
  }, py::arg("series"), py::arg("max_order"), py::arg("criterion") = "gic_c");
  m.def("ar_bias_closed_form", &g::ar_bias_closed_form, py::arg("order"), py::arg("sigma2"));

  m.def("verify", [](const std::vector<int>& only, std::uint64_t seed, int threads) {
    g::VerifyConfig cfg;
    cfg.seed = seed;
    cfg.threads = g::resolve_threads(threads);
    cfg.only = only;
    std::vector<g::CriterionResult> results;
    {
      py::gil_scoped_release release;
      results = g::run_acceptance(cfg);
    }
    py::list out;
    for (const auto& r : results) {
      py::dict d;
      d["id"] = r.id;
      d["key"] = r.key;
      d["passed"] = r.passed;
      d["measured"] = r.measured;
      d["threshold"] = r.threshold;
      out.append(d);
    }
    return out;
  }, py::arg("only"), py::arg("seed") = 42, py::arg("threads") = 1);
}
