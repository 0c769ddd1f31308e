// Copyright 2026 The edge-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>

namespace unlearn {

/// Per-round shard count that decays exponentially from `base_shards`
/// towards `floor_fraction * base_shards` at rate `decay_rate`.
struct ShardControllerConfig {
  std::size_t base_shards = 4;
  double floor_fraction = 0.5;  // gamma in [0, 1]
  double decay_rate = 0.5;      // p >= 0

  bool operator==(const ShardControllerConfig&) const = default;
};

/// Throws ConfigError(range).
void validate(const ShardControllerConfig& config);

/// gamma*S + (1 - gamma)*S*exp(-p*t), unrounded.
double shards_real(const ShardControllerConfig& config, double round);

/// shards_real rounded half away from zero, at least 1. Rounds start at 1 in
/// the engine; t = 0 is accepted and yields base_shards.
std::size_t shards_at(const ShardControllerConfig& config, std::uint32_t round);

}  // namespace unlearn
