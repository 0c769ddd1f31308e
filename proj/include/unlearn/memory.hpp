// Copyright 2026 The edge-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "unlearn/learner.hpp"
#include "unlearn/rng.hpp"
#include "unlearn/types.hpp"

namespace unlearn {

/// Fibonacci numbers with the repeated 1 dropped: 0, 1, 2, 3, 5, 8, 13, ...
/// Throws std::overflow_error past k = 92.
std::uint64_t fib_distinct(std::uint64_t k);

/// fib_distinct(k) mod m for any k, by fast doubling. m must be positive.
std::uint64_t fib_distinct_mod(std::uint64_t k, std::uint64_t m);

/// Shard index at creation plus creation round.
struct LineageId {
  std::uint32_t shard = 0;
  Round created = 0;

  auto operator<=>(const LineageId&) const = default;
  std::string str() const;
};

struct ModelCheckpoint {
  CheckpointId id = 0;
  LineageId lineage;
  Round round = 0;
  // Chunk ids the snapshot has learned, sorted. Always a prefix of the
  // lineage's learned chunks (minus fully unlearned ones).
  std::vector<ChunkId> coverage;
  std::size_t covered_items = 0;  // length of that lineage prefix
  std::uint64_t covered_samples = 0;
  double size_mb = 1.0;
  LearnerState state;

  bool covers_any(const std::set<ChunkId>& chunks) const;
};

enum class ReplacementPolicy {
  fibor,              // jump by successive distinct Fibonacci numbers
  fifo,               // evict the oldest insertion
  random,             // seeded uniform victim
  none,               // keep what is stored, drop newcomers
  lineage_overwrite,  // one checkpoint per lineage, newer replaces older
};

std::string_view to_string(ReplacementPolicy p);
ReplacementPolicy parse_policy(std::string_view name);

struct ReplacementEvent {
  enum class Kind { placed, replaced, dropped };
  Kind kind = Kind::placed;
  std::optional<CheckpointId> evicted;
  std::optional<std::size_t> slot;  // 0-based; none for drops
  CheckpointId inserted = 0;
  Round round = 0;
  std::vector<CheckpointId> also_evicted;  // byte mode only
};

/// One JSON object per line; slots are reported 1-based.
std::string to_json_line(const ReplacementEvent& event);

struct StoreConfig {
  ReplacementPolicy policy = ReplacementPolicy::fibor;
  std::size_t slots = 8;
  // When set, capacity is a megabyte budget and residents form an ordered
  // list instead of fixed slots.
  std::optional<double> budget_mb;
  std::uint64_t seed = 0;
};

/// Capacity-bounded checkpoint store. Free slots are filled lowest index
/// first; once full the policy picks a victim. Policy counters live as long
/// as the store.
class MemoryStore {
 public:
  explicit MemoryStore(StoreConfig config);

  ReplacementEvent store(ModelCheckpoint checkpoint, Round round);

  bool erase(CheckpointId id);
  std::size_t erase_if(const std::function<bool(const ModelCheckpoint&)>& pred);

  /// Among resident checkpoints of `lineage` that learned none of
  /// `forbidden`, the one covering the longest prefix.
  std::optional<CheckpointId> lookup_latest_clean(const LineageId& lineage, const std::set<ChunkId>& forbidden) const;

  const ModelCheckpoint* find(CheckpointId id) const;
  /// Residents in slot order.
  std::vector<const ModelCheckpoint*> resident() const;
  std::vector<std::optional<CheckpointId>> slot_view() const;

  std::size_t occupancy() const;
  std::size_t capacity_slots() const { return config_.slots; }
  double used_mb() const;
  const StoreConfig& config() const { return config_; }

  std::uint64_t fibor_index() const { return fibor_k_; }
  std::size_t replace_index() const { return replace_at_; }

 private:
  struct Entry {
    ModelCheckpoint checkpoint;
    std::uint64_t seq = 0;
  };

  std::size_t pick_victim(std::size_t n);
  std::optional<std::size_t> find_lineage(const LineageId& lineage) const;
  ReplacementEvent store_slots(ModelCheckpoint cp, Round round);
  ReplacementEvent store_bytes(ModelCheckpoint cp, Round round);

  StoreConfig config_;
  std::vector<std::optional<Entry>> slots_;
  Rng rng_;
  std::uint64_t next_seq_ = 0;
  std::uint64_t fibor_k_ = 0;
  std::size_t replace_at_ = 0;
};

/// Stores checkpoints 1..count (ids equal insertion order) into an empty
/// slot store and reports what happened.
struct InsertionTrace {
  std::vector<ReplacementEvent> events;
  std::vector<CheckpointId> evicted;        // in eviction order
  std::vector<CheckpointId> final_resident;  // sorted
};

InsertionTrace simulate_insertions(ReplacementPolicy policy, std::size_t slots, std::size_t count,
                                   std::uint64_t seed = 0);

}  // namespace unlearn
