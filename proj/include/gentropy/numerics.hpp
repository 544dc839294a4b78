// Copyright 2026 The gentropy Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "gentropy/random.hpp"

namespace gentropy {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

using ScalarFn = std::function<double(const Vector&)>;
using VectorFn = std::function<Vector(const Vector&)>;
using Sampler = std::function<Vector(Rng&)>;

/// A symmetric positive-definite matrix together with its lower Cholesky
/// factor. Construction fails with NotPositiveDefinite on any pivot <= 0.
class SpdMatrix {
 public:
  explicit SpdMatrix(const Matrix& m);

  static SpdMatrix identity(Eigen::Index d);
  static SpdMatrix diagonal(const Vector& diag);
  /// Rebuild from a lower-triangular factor with positive diagonal.
  static SpdMatrix from_cholesky(const Matrix& lower);

  Eigen::Index dim() const noexcept { return m_.rows(); }
  const Matrix& matrix() const noexcept { return m_; }
  const Matrix& chol() const noexcept { return l_; }

  Vector solve(const Vector& v) const;
  Matrix solve(const Matrix& b) const;
  Matrix inverse() const;
  double log_det() const;
  double trace_inverse() const;

 private:
  SpdMatrix(Matrix m, Matrix l) : m_(std::move(m)), l_(std::move(l)) {}

  Matrix m_;
  Matrix l_;
};

SpdMatrix cholesky_factor(const Matrix& m);
Vector spd_solve(const SpdMatrix& m, const Vector& v);

struct Interval {
  double lo;
  double hi;
};

/// Tensor-product trapezoid rule on a box in one or two dimensions.
class QuadratureGrid {
 public:
  QuadratureGrid(std::vector<Interval> bounds, int points_per_dim);

  int dims() const noexcept { return static_cast<int>(bounds_.size()); }
  int points_per_dim() const noexcept { return points_; }
  const std::vector<Interval>& bounds() const noexcept { return bounds_; }
  std::size_t size() const noexcept;

  double total_weight() const;
  /// Visit every node with its trapezoid weight, in a fixed order.
  void for_each(const std::function<void(const Vector&, double)>& fn) const;

 private:
  double node(int dim, int k) const;
  double weight(int dim, int k) const;

  std::vector<Interval> bounds_;
  int points_;
};

inline constexpr int kQuadPoints1d = 2001;
inline constexpr int kQuadPoints2d = 401;
inline constexpr double kDensityMassTol = 1e-6;

/// Trapezoid approximation of the integral of f * density over the grid.
/// Fails with GridTooCoarse when the density mass on the grid is not within
/// kDensityMassTol of one.
double quadrature_expect(const ScalarFn& f, const ScalarFn& density, const QuadratureGrid& grid);
/// Same, for several integrands sharing one pass over the grid.
Vector quadrature_expect(const VectorFn& f, const ScalarFn& density, const QuadratureGrid& grid);

Vector finite_diff_gradient(const ScalarFn& f, const Vector& x, double h);
/// Central differences with h_i = 1e-5 * max(1, |x_i|).
Vector finite_diff_gradient(const ScalarFn& f, const Vector& x);
double finite_diff_laplacian(const ScalarFn& f, const Vector& x, double h);
/// Second central differences with h_i = 1e-4 * max(1, |x_i|).
double finite_diff_laplacian(const ScalarFn& f, const Vector& x);
/// Column j holds the central difference of f along e_j.
Matrix finite_diff_jacobian(const VectorFn& f, const Vector& x);

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

struct McVectorEstimate {
  Vector mean;
  Vector std_error;
  std::size_t n = 0;
};

inline constexpr std::size_t kMcBlockSize = 4096;

/// Sample mean and standard error of f(X), X ~ sampler. Work is split into
/// fixed blocks of kMcBlockSize draws, block b drawing from stream.child(b),
/// and block moments are merged in block order.
McEstimate monte_carlo_expect(const ScalarFn& f, const Sampler& sampler, std::size_t n,
                              const RandomStream& stream, int threads = 1);
McVectorEstimate monte_carlo_expect(const VectorFn& f, const Sampler& sampler, std::size_t n,
                                    const RandomStream& stream, int threads = 1);

/// Relative error with an absolute floor of one: |a-b| / max(1, |b|).
double relative_error(const Vector& a, const Vector& b);
double relative_error(double a, double b);

std::vector<int> complement_indices(const std::vector<int>& idx, int dim);

}  // namespace gentropy
