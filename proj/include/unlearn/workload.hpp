// Copyright 2026 The edge-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "unlearn/types.hpp"

namespace unlearn {

struct WorkloadConfig {
  std::uint32_t n_users = 100;
  std::uint32_t n_rounds = 10;
  double unlearn_probability = 0.1;
  std::uint64_t seed = 42;
  std::uint32_t label_space = 10;
  std::uint64_t chunk_min = 50;
  std::uint64_t chunk_max = 500;
  std::uint32_t labels_min = 2;
  std::uint32_t labels_max = 5;
  double activity_probability = 1.0;
  // Probability that a delete request unlearns only a fraction of each
  // referenced chunk; 0 means whole-chunk deletes only.
  double partial_delete_probability = 0.0;

  bool operator==(const WorkloadConfig&) const = default;
};

/// Throws ConfigError(range) on any out-of-range field.
void validate(const WorkloadConfig& config);

struct UserProfile {
  UserId id = 0;
  std::vector<Label> label_subset;  // sorted
  std::uint64_t chunk_min = 0;
  std::uint64_t chunk_max = 0;
  double activity_probability = 1.0;
};

/// Everything that arrives in one round: new chunks first, then delete
/// requests in arrival (request id) order.
struct RoundEvents {
  Round round = 0;
  std::vector<DataChunk> adds;
  std::vector<UpdateRequest> deletes;

  bool operator==(const RoundEvents&) const = default;
};

struct Workload {
  WorkloadConfig config;
  std::vector<RoundEvents> rounds;  // rounds[i].round == i + 1

  bool operator==(const Workload&) const = default;
};

std::vector<UserProfile> generate_profiles(const WorkloadConfig& config);

/// Deterministic in config.seed. Each user draws from its own stream derived
/// from (seed, user id), so adding users leaves existing users untouched.
Workload generate_workload(const WorkloadConfig& config);

/// Orders one round's requests first-come-first-served (by request id).
std::vector<UpdateRequest> enqueue_fcfs(std::span<const UpdateRequest> requests);

/// JSON-lines dump: one header line, then one event per line.
void write_workload_jsonl(std::ostream& os, const Workload& workload);
Workload read_workload_jsonl(std::istream& is);

std::uint64_t total_delete_requests(const Workload& workload);

}  // namespace unlearn
