// Copyright 2026 The edge-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "unlearn/workload.hpp"

using namespace unlearn;

TEST_SUITE("workload") {
  TEST_CASE("generation is deterministic and dumps byte-identically") {
    WorkloadConfig c;
    c.partial_delete_probability = 0.3;
    const auto a = generate_workload(c);
    const auto b = generate_workload(c);
    CHECK(a == b);
    std::ostringstream sa, sb;
    write_workload_jsonl(sa, a);
    write_workload_jsonl(sb, b);
    CHECK(sa.str() == sb.str());
    c.seed = 43;
    CHECK_FALSE(generate_workload(c) == a);
  }

  TEST_CASE("zero unlearning probability yields no deletes") {
    WorkloadConfig c;
    c.unlearn_probability = 0.0;
    for (std::uint64_t seed : {0ULL, 1ULL, 42ULL, 9999ULL}) {
      c.seed = seed;
      CHECK(total_delete_requests(generate_workload(c)) == 0);
    }
  }

  TEST_CASE("single user with certain deletes: one per round after the first") {
    WorkloadConfig c;
    c.n_users = 1;
    c.n_rounds = 3;
    c.unlearn_probability = 1.0;
    c.seed = 7;
    const auto w = generate_workload(c);
    REQUIRE(w.rounds.size() == 3);
    CHECK(w.rounds[0].deletes.empty());
    CHECK(w.rounds[1].deletes.size() == 1);
    CHECK(w.rounds[2].deletes.size() == 1);
    // Round 2 can only reference the round-1 chunk.
    CHECK(w.rounds[1].deletes[0].chunk_refs == std::vector<ChunkId>{w.rounds[0].adds[0].id});
  }

  TEST_CASE("delete volume over many seeds") {
    // Every user always has a live chunk from round 2 on, so the count per
    // run is Binomial(n (T - 1), rho) with mean 90 for the default scenario.
    WorkloadConfig c;
    c.chunk_min = c.chunk_max = 1;  // sizes do not affect delete coins
    const int runs = 1000;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int s = 0; s < runs; ++s) {
      c.seed = static_cast<std::uint64_t>(s);
      const double n = static_cast<double>(total_delete_requests(generate_workload(c)));
      sum += n;
      sum_sq += n * n;
    }
    const double mean = sum / runs;
    const double var = sum_sq / runs - mean * mean;
    const double sd_run = std::sqrt(100.0 * 9.0 * 0.1 * 0.9);
    CHECK(std::abs(mean - 100.0) <= 3.0 * sd_run);
    CHECK(std::abs(mean - 90.0) <= 3.0 * sd_run / std::sqrt(runs));
    CHECK(std::abs(var - 81.0) < 12.0);
  }

  TEST_CASE("stream properties: earlier-round references, never twice, valid chunks") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      WorkloadConfig c;
      c.seed = seed;
      c.n_users = 15;
      c.n_rounds = 8;
      c.unlearn_probability = 0.4;
      c.activity_probability = 0.7;
      c.partial_delete_probability = 0.5;
      const auto w = generate_workload(c);
      const auto profiles = generate_profiles(c);
      std::map<ChunkId, const DataChunk*> seen;
      std::set<ChunkId> deleted;
      RequestId last_request = 0;
      bool any_request = false;
      for (const auto& r : w.rounds) {
        for (const auto& chunk : r.adds) {
          CHECK(chunk.round == r.round);
          CHECK(chunk.sample_count >= c.chunk_min);
          CHECK(chunk.sample_count <= c.chunk_max);
          std::uint64_t total = 0;
          const auto& subset = profiles[chunk.owner].label_subset;
          for (const auto& [l, n] : chunk.label_histogram) {
            total += n;
            CHECK(std::find(subset.begin(), subset.end(), l) != subset.end());
          }
          CHECK(total == chunk.sample_count);
          CHECK(seen.emplace(chunk.id, &chunk).second);
        }
        std::set<UserId> owners;
        for (const auto& req : r.deletes) {
          CHECK(owners.insert(req.owner).second);
          CHECK(req.sample_fraction > 0.0);
          CHECK(req.sample_fraction <= 1.0);
          CHECK_FALSE(req.chunk_refs.empty());
          if (any_request) CHECK(req.id > last_request);
          last_request = req.id;
          any_request = true;
          for (ChunkId id : req.chunk_refs) {
            REQUIRE(seen.contains(id));
            CHECK(seen.at(id)->round < r.round);
            CHECK(seen.at(id)->owner == req.owner);
            CHECK(deleted.insert(id).second);
          }
        }
      }
    }
  }

  TEST_CASE("adding users leaves existing user streams untouched") {
    WorkloadConfig small;
    small.n_users = 5;
    WorkloadConfig big = small;
    big.n_users = 9;
    const auto a = generate_profiles(small);
    const auto b = generate_profiles(big);
    for (std::size_t u = 0; u < a.size(); ++u) CHECK(a[u].label_subset == b[u].label_subset);
    const auto wa = generate_workload(small);
    const auto wb = generate_workload(big);
    for (std::size_t t = 0; t < wa.rounds.size(); ++t) {
      std::vector<std::uint64_t> sa, sb;
      for (const auto& ch : wa.rounds[t].adds) sa.push_back(ch.sample_count);
      for (const auto& ch : wb.rounds[t].adds) {
        if (ch.owner < small.n_users) sb.push_back(ch.sample_count);
      }
      CHECK(sa == sb);
    }
  }

  TEST_CASE("profiles respect label bounds") {
    WorkloadConfig c;
    for (const auto& p : generate_profiles(c)) {
      CHECK(p.label_subset.size() >= c.labels_min);
      CHECK(p.label_subset.size() <= c.labels_max);
      CHECK(std::is_sorted(p.label_subset.begin(), p.label_subset.end()));
      CHECK(p.label_subset.back() < c.label_space);
    }
  }

  TEST_CASE("enqueue_fcfs orders by request id") {
    auto req = [](RequestId id) {
      UpdateRequest r;
      r.id = id;
      return r;
    };
    const std::vector<UpdateRequest> in = {req(3), req(1), req(2)};
    const auto out = enqueue_fcfs(in);
    REQUIRE(out.size() == 3);
    CHECK(out[0].id == 1);
    CHECK(out[1].id == 2);
    CHECK(out[2].id == 3);
    CHECK(enqueue_fcfs(std::vector<UpdateRequest>{}).empty());
    CHECK(enqueue_fcfs(std::vector<UpdateRequest>{req(5)}).size() == 1);
  }

  TEST_CASE("JSON-lines round trip") {
    WorkloadConfig c;
    c.n_users = 20;
    c.partial_delete_probability = 0.5;
    c.unlearn_probability = 0.5;
    const auto w = generate_workload(c);
    std::stringstream ss;
    write_workload_jsonl(ss, w);
    const auto back = read_workload_jsonl(ss);
    CHECK(back == w);
    const auto first_line = ss.str().substr(0, ss.str().find('\n'));
    CHECK(first_line.find("\"type\":\"header\"") != std::string::npos);
  }

  TEST_CASE("config validation") {
    WorkloadConfig c;
    CHECK_NOTHROW(validate(c));
    auto bad = c;
    bad.unlearn_probability = 1.5;
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = c;
    bad.chunk_min = 600;
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = c;
    bad.n_users = 0;
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = c;
    bad.labels_min = 11;
    bad.labels_max = 12;
    CHECK_THROWS_AS(validate(bad), ConfigError);
  }

  TEST_CASE("fractional deletion sizes and histogram prefixes") {
    CHECK(samples_removed(100, 0.1) == 10);
    CHECK(samples_removed(3, 0.5) == 2);
    CHECK(samples_removed(10, 0.01) == 1);
    CHECK(samples_removed(10, 1.0) == 10);
    DataChunk c{7, 1, 1, 10, {{2, 4}, {5, 6}}};
    CHECK_NOTHROW(validate_chunk(c));
    CHECK(histogram_prefix(c, 5) == std::map<Label, std::uint64_t>{{2, 4}, {5, 1}});
    CHECK(slice_samples(c, 5, {0, 3}) == 4);
    CHECK(slice_samples(c, 5, {4, 9}) == 1);
    CHECK(slice_samples(c, 10, {}) == 10);
    c.sample_count = 11;
    CHECK_THROWS(validate_chunk(c));
  }
}
