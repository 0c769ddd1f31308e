// Copyright 2026 The edge-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <cmath>
#include <vector>

#include "unlearn/controller.hpp"
#include "unlearn/rng.hpp"
#include "unlearn/types.hpp"

using namespace unlearn;
using Big = boost::multiprecision::cpp_dec_float_50;

namespace {

Big oracle(std::size_t s, double gamma, double p, double t) {
  const Big S(static_cast<unsigned long long>(s));
  const Big g(gamma);
  return g * S + (Big(1) - g) * S * boost::multiprecision::exp(-Big(p) * Big(t));
}

}  // namespace

TEST_SUITE("controller") {
  TEST_CASE("S=16, gamma=0.5, p=0.5 over t=0..6") {
    const ShardControllerConfig c{16, 0.5, 0.5};
    const std::vector<std::size_t> expected = {16, 13, 11, 10, 9, 9, 8};
    for (std::uint32_t t = 0; t < expected.size(); ++t) CHECK(shards_at(c, t) == expected[t]);
  }

  TEST_CASE("default controller in the engine's round range") {
    const ShardControllerConfig c{4, 0.5, 0.5};
    CHECK(shards_at(c, 0) == 4);
    CHECK(shards_at(c, 1) == 3);
    CHECK(shards_at(c, 2) == 3);
    CHECK(shards_at(c, 3) == 2);
    CHECK(shards_at(c, 10) == 2);
  }

  TEST_CASE("gamma = 1 keeps S; gamma = 0 decays towards zero but never below 1") {
    for (std::uint32_t t = 0; t < 50; ++t) CHECK(shards_at({7, 1.0, 3.0}, t) == 7);
    CHECK(shards_at({1, 0.0, 5.0}, 40) == 1);
    CHECK(shards_real({8, 0.0, 1.0}, 60.0) < 1e-20);
  }

  TEST_CASE("real value matches a 50-digit oracle and stays in [gamma S, S], non-increasing") {
    Rng rng(31337);
    for (int i = 0; i < 1000; ++i) {
      const auto s = static_cast<std::size_t>(rng.uniform_int(1, 64));
      const double gamma = rng.uniform01();
      const double p = 3.0 * rng.uniform01();
      const double t = static_cast<double>(rng.uniform_int(0, 40));
      const ShardControllerConfig c{s, gamma, p};
      const double got = shards_real(c, t);
      const Big want = oracle(s, gamma, p, t);
      const double rel = static_cast<double>(boost::multiprecision::abs((Big(got) - want) / want));
      CHECK(rel <= 1e-9);
      const double S = static_cast<double>(s);
      CHECK(got >= gamma * S * (1 - 1e-12));
      CHECK(got <= S * (1 + 1e-12));
      CHECK(shards_real(c, t + 1.0) <= got);
    }
  }

  TEST_CASE("range validation") {
    CHECK_NOTHROW(validate(ShardControllerConfig{}));
    CHECK_THROWS_AS(validate(ShardControllerConfig{4, 1.5, 0.5}), ConfigError);
    CHECK_THROWS_AS(validate(ShardControllerConfig{4, -0.1, 0.5}), ConfigError);
    CHECK_THROWS_AS(validate(ShardControllerConfig{4, 0.5, -1.0}), ConfigError);
    CHECK_THROWS_AS(validate(ShardControllerConfig{0, 0.5, 0.5}), ConfigError);
  }
}
