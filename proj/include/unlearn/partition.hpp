// Copyright 2026 The edge-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "unlearn/types.hpp"

namespace unlearn {

enum class PartitionStrategy { ucdp, uniform, class_based };

std::string_view to_string(PartitionStrategy s);

/// The part of a chunk routed to one shard. Owner-based and uniform
/// partitions always route whole chunks; the class-based partition routes
/// one label range per shard.
struct ChunkSlice {
  ChunkId chunk = 0;
  LabelRange labels;

  bool operator==(const ChunkSlice&) const = default;
};

struct ShardAssignment {
  Round round = 0;
  PartitionStrategy strategy = PartitionStrategy::ucdp;
  // Each shard lists its slices in canonical order (round, owner, chunk id).
  std::vector<std::vector<ChunkSlice>> shards;
};

/// User-centered partition. With at most `shard_count` contributing users
/// every user gets a shard of their own. Otherwise `shard_count` seed users
/// are drawn at random and the rest are placed greedily, pass after pass, so
/// that each shard's per-user mean size overshoots the overall per-user mean
/// as little as possible. All chunks of one user share one shard.
ShardAssignment ucdp_partition(std::size_t shard_count, std::span<const DataChunk> chunks, std::uint64_t seed);

/// Same as ucdp_partition but with the seed users given explicitly, in shard
/// order. Only used when there are more users than shards.
ShardAssignment ucdp_partition_with_seeds(std::size_t shard_count, std::span<const DataChunk> chunks,
                                          std::span<const UserId> seed_users);

/// Seeded shuffle of whole chunks dealt round-robin; always `shard_count`
/// shards, some possibly empty.
ShardAssignment uniform_partition(std::size_t shard_count, std::span<const DataChunk> chunks, std::uint64_t seed);

/// Labels are split into `shard_count` contiguous, near-equal ranges; a chunk
/// contributes one slice to every shard owning one of its labels.
ShardAssignment class_partition(std::size_t shard_count, std::span<const DataChunk> chunks, std::uint32_t label_space);

/// Label range owned by group `g` under class_partition.
LabelRange class_group_range(std::size_t g, std::size_t shard_count, std::uint32_t label_space);

/// Single-line JSON trace: {"round":t,"strategy":"ucdp","shards":[[ids]...]}.
std::string to_json_line(const ShardAssignment& assignment);

}  // namespace unlearn
