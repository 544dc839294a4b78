// Copyright 2026 The gentropy Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <random>

#include <Eigen/Core>

namespace gentropy {

class Rng;

/// Names a reproducible random sequence. Two streams with equal
/// (master_seed, stream_id) produce identical draws; child streams are derived
/// by hashing so that work split across any number of workers stays
/// seed-reproducible.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t master_seed, std::uint64_t stream_id = 0)
      : master_seed_(master_seed), stream_id_(stream_id) {}

  std::uint64_t master_seed() const noexcept { return master_seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  RandomStream child(std::uint64_t index) const;
  Rng engine() const;

  friend bool operator==(const RandomStream&, const RandomStream&) = default;

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  /// Chi-squared variate with `dof` degrees of freedom.
  double chi_squared(double dof);
  Eigen::VectorXd normal_vector(Eigen::Index d);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t x);

/// Run fn(block) for block in [0, nblocks) on up to `threads` workers.
/// Blocks are independent; the caller reduces per-block results in block
/// order, which keeps results independent of the worker count.
void for_each_block(std::size_t nblocks, int threads,
                    const std::function<void(std::size_t)>& fn);

/// Resolve a thread-count request: values < 1 fall back to GENTROPY_THREADS,
/// then to 1.
int resolve_threads(int requested);

}  // namespace gentropy
