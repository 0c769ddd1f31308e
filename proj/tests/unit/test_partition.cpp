// Copyright 2026 The edge-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "unlearn/partition.hpp"
#include "unlearn/rng.hpp"

using namespace unlearn;

namespace {

DataChunk chunk(ChunkId id, UserId owner, std::uint64_t n, std::map<Label, std::uint64_t> hist = {}) {
  if (hist.empty()) hist = {{0, n}};
  return DataChunk{id, owner, 1, n, std::move(hist)};
}

std::set<UserId> owners_of(const std::vector<ChunkSlice>& shard, const std::vector<DataChunk>& chunks) {
  std::set<UserId> out;
  for (const auto& s : shard) {
    for (const auto& c : chunks) {
      if (c.id == s.chunk) out.insert(c.owner);
    }
  }
  return out;
}

// Greedy loop written directly from the algorithm text: seeds first, then
// pass after pass each shard takes the remaining user minimizing the hinge of
// the per-user mean overshoot, smallest id on ties.
std::vector<std::set<UserId>> ucdp_oracle(const std::map<UserId, std::uint64_t>& sizes,
                                          const std::vector<UserId>& seeds) {
  double total = 0;
  for (const auto& [u, n] : sizes) total += static_cast<double>(n);
  const double mean = total / static_cast<double>(sizes.size());
  std::vector<std::set<UserId>> shards;
  std::vector<double> shard_size;
  std::map<UserId, std::uint64_t> rest = sizes;
  for (UserId s : seeds) {
    shards.push_back({s});
    shard_size.push_back(static_cast<double>(sizes.at(s)));
    rest.erase(s);
  }
  while (!rest.empty()) {
    for (std::size_t s = 0; s < shards.size() && !rest.empty(); ++s) {
      UserId best = 0;
      double best_cost = 1e300;
      for (const auto& [u, n] : rest) {
        const double cost =
            std::max((shard_size[s] + static_cast<double>(n)) / static_cast<double>(shards[s].size() + 1) - mean, 0.0);
        if (cost < best_cost) {
          best_cost = cost;
          best = u;
        }
      }
      shards[s].insert(best);
      shard_size[s] += static_cast<double>(rest.at(best));
      rest.erase(best);
    }
  }
  return shards;
}

}  // namespace

TEST_SUITE("partition") {
  TEST_CASE("ucdp with fewer users than shards gives one shard per user") {
    const std::vector<DataChunk> cs = {chunk(0, 3, 10), chunk(1, 5, 20), chunk(2, 9, 30), chunk(3, 5, 5)};
    const auto a = ucdp_partition(4, cs, 1);
    REQUIRE(a.shards.size() == 3);
    for (const auto& shard : a.shards) CHECK(owners_of(shard, cs).size() == 1);
  }

  TEST_CASE("ucdp with a single user") {
    const std::vector<DataChunk> cs = {chunk(0, 2, 10), chunk(1, 2, 20)};
    for (std::size_t s : {1u, 2u, 7u}) {
      const auto a = ucdp_partition(s, cs, 3);
      REQUIRE(a.shards.size() == 1);
      CHECK(a.shards[0].size() == 2);
    }
  }

  TEST_CASE("ucdp hand trace: sizes 10..50, two shards seeded with u1 and u2") {
    std::vector<DataChunk> cs;
    for (UserId u = 1; u <= 5; ++u) cs.push_back(chunk(u, u, 10 * u));
    const std::vector<UserId> seeds = {1, 2};
    const auto a = ucdp_partition_with_seeds(2, cs, seeds);
    REQUIRE(a.shards.size() == 2);
    CHECK(owners_of(a.shards[0], cs) == std::set<UserId>{1, 3, 5});
    CHECK(owners_of(a.shards[1], cs) == std::set<UserId>{2, 4});
    std::map<UserId, std::uint64_t> sizes;
    for (const auto& c : cs) sizes[c.owner] = c.sample_count;
    const auto oracle = ucdp_oracle(sizes, seeds);
    CHECK(oracle[0] == std::set<UserId>{1, 3, 5});
    CHECK(oracle[1] == std::set<UserId>{2, 4});
  }

  TEST_CASE("ucdp matches the greedy oracle on random inputs") {
    Rng rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
      const auto users = static_cast<UserId>(rng.uniform_int(2, 14));
      const auto shards = static_cast<std::size_t>(rng.uniform_int(1, users - 1));
      std::vector<DataChunk> cs;
      std::map<UserId, std::uint64_t> sizes;
      ChunkId id = 0;
      for (UserId u = 0; u < users; ++u) {
        const auto k = rng.uniform_int(1, 3);
        for (std::uint64_t j = 0; j < k; ++j) {
          const auto n = rng.uniform_int(1, 60);
          cs.push_back(chunk(id++, u, n));
          sizes[u] += n;
        }
      }
      std::vector<UserId> order;
      for (UserId u = 0; u < users; ++u) order.push_back(u);
      rng.shuffle(order);
      order.resize(shards);
      const auto a = ucdp_partition_with_seeds(shards, cs, order);
      const auto oracle = ucdp_oracle(sizes, order);
      REQUIRE(a.shards.size() == shards);
      for (std::size_t s = 0; s < shards; ++s) CHECK(owners_of(a.shards[s], cs) == oracle[s]);
    }
  }

  TEST_CASE("ucdp invariants: coverage, disjointness, user atomicity, balance") {
    Rng rng(77);
    for (int trial = 0; trial < 100; ++trial) {
      const auto users = static_cast<UserId>(rng.uniform_int(1, 30));
      const auto shards = static_cast<std::size_t>(rng.uniform_int(1, 8));
      std::vector<DataChunk> cs;
      std::map<UserId, std::uint64_t> sizes;
      ChunkId id = 0;
      for (UserId u = 0; u < users; ++u) {
        const auto k = rng.uniform_int(1, 2);
        for (std::uint64_t j = 0; j < k; ++j) {
          const auto n = rng.uniform_int(50, 500);
          cs.push_back(chunk(id++, u, n));
          sizes[u] += n;
        }
      }
      const auto a = ucdp_partition(shards, cs, rng.next());
      std::multiset<ChunkId> seen;
      std::map<UserId, std::size_t> user_shard;
      double mean = 0;
      std::uint64_t max_user = 0;
      for (const auto& [u, n] : sizes) {
        mean += static_cast<double>(n);
        max_user = std::max(max_user, n);
      }
      mean /= static_cast<double>(sizes.size());
      for (std::size_t s = 0; s < a.shards.size(); ++s) {
        CHECK_FALSE(a.shards[s].empty());
        const auto owners = owners_of(a.shards[s], cs);
        double total = 0;
        for (UserId u : owners) {
          total += static_cast<double>(sizes[u]);
          CHECK(user_shard.emplace(u, s).second);
        }
        CHECK(std::abs(total / static_cast<double>(owners.size()) - mean) <= static_cast<double>(max_user));
        for (const auto& sl : a.shards[s]) seen.insert(sl.chunk);
      }
      CHECK(seen.size() == cs.size());
      CHECK(std::set<ChunkId>(seen.begin(), seen.end()).size() == cs.size());
      CHECK(a.shards.size() == std::min<std::size_t>(shards, users));
    }
  }

  TEST_CASE("shard count zero is rejected") {
    const std::vector<DataChunk> cs = {chunk(0, 0, 10)};
    CHECK_THROWS_AS(ucdp_partition(0, cs, 1), std::invalid_argument);
    CHECK_THROWS_AS(uniform_partition(0, cs, 1), std::invalid_argument);
    CHECK_THROWS_AS(class_partition(0, cs, 10), std::invalid_argument);
  }

  TEST_CASE("uniform partition deals whole chunks round-robin") {
    std::vector<DataChunk> cs;
    for (ChunkId i = 0; i < 8; ++i) cs.push_back(chunk(i, static_cast<UserId>(i % 3), 10));
    const auto a = uniform_partition(4, cs, 5);
    REQUIRE(a.shards.size() == 4);
    for (const auto& s : a.shards) CHECK(s.size() == 2);
    const auto b = uniform_partition(4, cs, 5);
    for (std::size_t s = 0; s < 4; ++s) {
      REQUIRE(a.shards[s].size() == b.shards[s].size());
      for (std::size_t i = 0; i < a.shards[s].size(); ++i) CHECK(a.shards[s][i].chunk == b.shards[s][i].chunk);
    }
    const std::vector<DataChunk> one = {chunk(0, 0, 10)};
    const auto c = uniform_partition(4, one, 5);
    REQUIRE(c.shards.size() == 4);
    std::size_t non_empty = 0;
    for (const auto& s : c.shards) non_empty += s.empty() ? 0 : 1;
    CHECK(non_empty == 1);
  }

  TEST_CASE("class partition uses contiguous label ranges") {
    CHECK(class_group_range(0, 2, 10) == LabelRange{0, 4});
    CHECK(class_group_range(1, 2, 10) == LabelRange{5, 9});
    for (std::size_t g = 0; g < 10; ++g) CHECK(class_group_range(g, 10, 10) == LabelRange{Label(g), Label(g)});
    // Ranges tile the label space for any shard count.
    for (std::uint32_t labels = 1; labels <= 12; ++labels) {
      for (std::size_t s = 1; s <= labels; ++s) {
        Label next = 0;
        for (std::size_t g = 0; g < s; ++g) {
          const auto r = class_group_range(g, s, labels);
          CHECK(r.lo == next);
          CHECK(r.hi >= r.lo);
          next = r.hi + 1;
          for (Label l = r.lo; l <= r.hi; ++l) CHECK(l * s / labels == g);
        }
        CHECK(next == labels);
      }
    }
    const std::vector<DataChunk> cs = {chunk(0, 0, 10, {{1, 4}, {7, 6}})};
    const auto a = class_partition(2, cs, 10);
    REQUIRE(a.shards.size() == 2);
    REQUIRE(a.shards[0].size() == 1);
    REQUIRE(a.shards[1].size() == 1);
    CHECK(a.shards[0][0].labels == LabelRange{0, 4});
    CHECK(a.shards[1][0].labels == LabelRange{5, 9});
    CHECK_THROWS_AS(class_partition(11, cs, 10), std::invalid_argument);
  }

  TEST_CASE("class partition covers every (chunk, label) pair exactly once") {
    Rng rng(9);
    std::vector<DataChunk> cs;
    for (ChunkId i = 0; i < 30; ++i) {
      std::map<Label, std::uint64_t> h;
      std::uint64_t n = 0;
      for (int k = 0; k < 3; ++k) {
        const auto c = rng.uniform_int(1, 20);
        h[static_cast<Label>(rng.uniform_int(0, 9))] += c;
        n += c;
      }
      cs.push_back(chunk(i, static_cast<UserId>(i), n, h));
    }
    for (std::size_t s = 1; s <= 10; ++s) {
      const auto a = class_partition(s, cs, 10);
      for (const auto& c : cs) {
        std::uint64_t covered = 0;
        for (const auto& [label, count] : c.label_histogram) {
          int hits = 0;
          for (const auto& shard : a.shards) {
            for (const auto& sl : shard) hits += (sl.chunk == c.id && sl.labels.contains(label)) ? 1 : 0;
          }
          CHECK(hits == 1);
          covered += count;
        }
        std::uint64_t sliced = 0;
        for (const auto& shard : a.shards) {
          for (const auto& sl : shard) {
            if (sl.chunk == c.id) sliced += slice_samples(c, c.sample_count, sl.labels);
          }
        }
        CHECK(sliced == covered);
      }
    }
  }

  TEST_CASE("shards are in canonical order and serialize to one JSON line") {
    const std::vector<DataChunk> cs = {chunk(5, 2, 10), chunk(3, 1, 10), chunk(4, 1, 10)};
    const auto a = ucdp_partition(1, cs, 0);
    REQUIRE(a.shards.size() == 1);
    CHECK(a.shards[0][0].chunk == 3);
    CHECK(a.shards[0][1].chunk == 4);
    CHECK(a.shards[0][2].chunk == 5);
    CHECK(to_json_line(a) == R"({"round":1,"strategy":"ucdp","shards":[[3,4,5]]})");
  }
}
