// Copyright 2026 The gentropy Authors
// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <set>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "gentropy/random.hpp"

using namespace gentropy;

TEST_CASE("streams are reproducible and children are distinct") {
  const RandomStream root(42);
  CHECK(root.child(3) == RandomStream(42).child(3));
  std::set<std::uint64_t> ids;
  for (std::uint64_t i = 0; i < 1000; ++i) ids.insert(root.child(i).stream_id());
  CHECK(ids.size() == 1000);
  CHECK(root.child(1).child(2).stream_id() != root.child(2).child(1).stream_id());

  Rng a = root.child(7).engine();
  Rng b = root.child(7).engine();
  for (int i = 0; i < 100; ++i) CHECK(a.normal() == b.normal());
  Rng c = RandomStream(43).child(7).engine();
  Rng d = root.child(7).engine();
  CHECK(c.normal() != d.normal());
}

TEST_CASE("chi-squared draws have the right mean") {
  Rng rng(9);
  double s = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) s += rng.chi_squared(4.0);
  CHECK(s / n == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("for_each_block visits every block once for any worker count") {
  for (int threads : {1, 2, 3, 8}) {
    std::vector<std::atomic<int>> hits(37);
    for_each_block(hits.size(), threads, [&](std::size_t b) { hits[b]++; });
    for (const auto& h : hits) CHECK(h.load() == 1);
  }
}

TEST_CASE("for_each_block rethrows worker exceptions") {
  CHECK_THROWS_AS(for_each_block(10, 3,
                                 [](std::size_t b) {
                                   if (b == 5) throw std::runtime_error("boom");
                                 }),
                  std::runtime_error);
}

TEST_CASE("resolve_threads honours explicit requests") {
  CHECK(resolve_threads(3) == 3);
  CHECK(resolve_threads(0) >= 1);
}
