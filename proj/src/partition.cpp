// Copyright 2026 The edge-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

#include "unlearn/partition.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>
#include <tuple>

#include <json.hpp>

#include "unlearn/rng.hpp"

namespace unlearn {

namespace {

void require_shards(std::size_t shard_count) {
  if (shard_count == 0) throw std::invalid_argument("shard count must be at least 1");
}

Round round_of(std::span<const DataChunk> chunks) { return chunks.empty() ? 0 : chunks.front().round; }

void sort_canonical(std::vector<ChunkSlice>& shard, const std::map<ChunkId, const DataChunk*>& index) {
  std::sort(shard.begin(), shard.end(), [&](const ChunkSlice& a, const ChunkSlice& b) {
    const auto& ca = *index.at(a.chunk);
    const auto& cb = *index.at(b.chunk);
    return std::tie(ca.round, ca.owner, ca.id, a.labels.lo) < std::tie(cb.round, cb.owner, cb.id, b.labels.lo);
  });
}

std::map<ChunkId, const DataChunk*> index_chunks(std::span<const DataChunk> chunks) {
  std::map<ChunkId, const DataChunk*> index;
  for (const auto& c : chunks) index.emplace(c.id, &c);
  return index;
}

struct UserData {
  std::vector<ChunkSlice> slices;
  std::uint64_t size = 0;
};

std::map<UserId, UserData> group_by_owner(std::span<const DataChunk> chunks) {
  std::map<UserId, UserData> users;
  for (const auto& c : chunks) {
    auto& u = users[c.owner];
    u.slices.push_back({c.id, {}});
    u.size += c.sample_count;
  }
  return users;
}

ShardAssignment finish(ShardAssignment out, std::span<const DataChunk> chunks) {
  const auto index = index_chunks(chunks);
  for (auto& shard : out.shards) sort_canonical(shard, index);
  return out;
}

}  // namespace

std::string_view to_string(PartitionStrategy s) {
  switch (s) {
    case PartitionStrategy::ucdp: return "ucdp";
    case PartitionStrategy::uniform: return "uniform";
    case PartitionStrategy::class_based: return "class_based";
  }
  return "?";
}

ShardAssignment ucdp_partition_with_seeds(std::size_t shard_count, std::span<const DataChunk> chunks,
                                          std::span<const UserId> seed_users) {
  require_shards(shard_count);
  auto users = group_by_owner(chunks);
  ShardAssignment out{round_of(chunks), PartitionStrategy::ucdp, {}};
  if (users.size() <= shard_count) {
    for (auto& [id, data] : users) out.shards.push_back(std::move(data.slices));
    return finish(std::move(out), chunks);
  }
  if (seed_users.size() != shard_count) throw std::invalid_argument("need exactly one seed user per shard");

  std::uint64_t total = 0;
  for (const auto& [id, data] : users) total += data.size;
  const double mean_size = static_cast<double>(total) / static_cast<double>(users.size());

  struct Shard {
    std::uint64_t size = 0;
    std::size_t members = 0;
  };
  std::vector<Shard> shards(shard_count);
  out.shards.resize(shard_count);
  std::map<UserId, UserData> remaining = std::move(users);
  for (std::size_t s = 0; s < shard_count; ++s) {
    auto it = remaining.find(seed_users[s]);
    if (it == remaining.end()) throw std::invalid_argument("seed user is not a contributor or is repeated");
    shards[s] = {it->second.size, 1};
    out.shards[s] = std::move(it->second.slices);
    remaining.erase(it);
  }

  while (!remaining.empty()) {
    for (std::size_t s = 0; s < shard_count && !remaining.empty(); ++s) {
      auto best = remaining.end();
      double best_cost = std::numeric_limits<double>::infinity();
      // Map order is ascending user id, so strict < keeps the smallest id on ties.
      for (auto it = remaining.begin(); it != remaining.end(); ++it) {
        const double per_user = static_cast<double>(shards[s].size + it->second.size) /
                                static_cast<double>(shards[s].members + 1);
        const double cost = std::max(per_user - mean_size, 0.0);
        if (cost < best_cost) {
          best_cost = cost;
          best = it;
        }
      }
      shards[s].size += best->second.size;
      shards[s].members += 1;
      auto& dst = out.shards[s];
      dst.insert(dst.end(), best->second.slices.begin(), best->second.slices.end());
      remaining.erase(best);
    }
  }
  return finish(std::move(out), chunks);
}

ShardAssignment ucdp_partition(std::size_t shard_count, std::span<const DataChunk> chunks, std::uint64_t seed) {
  require_shards(shard_count);
  std::vector<UserId> users;
  for (const auto& c : chunks) users.push_back(c.owner);
  std::sort(users.begin(), users.end());
  users.erase(std::unique(users.begin(), users.end()), users.end());
  if (users.size() <= shard_count) return ucdp_partition_with_seeds(shard_count, chunks, {});
  Rng rng(seed);
  rng.shuffle(users);
  users.resize(shard_count);
  return ucdp_partition_with_seeds(shard_count, chunks, users);
}

ShardAssignment uniform_partition(std::size_t shard_count, std::span<const DataChunk> chunks, std::uint64_t seed) {
  require_shards(shard_count);
  std::vector<ChunkId> ids;
  for (const auto& c : chunks) ids.push_back(c.id);
  std::sort(ids.begin(), ids.end());
  Rng rng(seed);
  rng.shuffle(ids);
  ShardAssignment out{round_of(chunks), PartitionStrategy::uniform, std::vector<std::vector<ChunkSlice>>(shard_count)};
  for (std::size_t i = 0; i < ids.size(); ++i) out.shards[i % shard_count].push_back({ids[i], {}});
  return finish(std::move(out), chunks);
}

LabelRange class_group_range(std::size_t g, std::size_t shard_count, std::uint32_t label_space) {
  const auto ceil_div = [](std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; };
  const auto lo = ceil_div(g * label_space, shard_count);
  const auto hi = ceil_div((g + 1) * label_space, shard_count) - 1;
  return {static_cast<Label>(lo), static_cast<Label>(hi)};
}

ShardAssignment class_partition(std::size_t shard_count, std::span<const DataChunk> chunks, std::uint32_t label_space) {
  require_shards(shard_count);
  if (shard_count > label_space) throw std::invalid_argument("class partition needs shard count <= label space");
  ShardAssignment out{round_of(chunks), PartitionStrategy::class_based,
                      std::vector<std::vector<ChunkSlice>>(shard_count)};
  for (const auto& c : chunks) {
    std::size_t last_group = shard_count;
    for (const auto& [label, count] : c.label_histogram) {
      if (label >= label_space) throw std::invalid_argument("chunk label outside label space");
      const auto g = static_cast<std::size_t>(std::uint64_t{label} * shard_count / label_space);
      if (g == last_group) continue;
      last_group = g;
      out.shards[g].push_back({c.id, class_group_range(g, shard_count, label_space)});
    }
  }
  return finish(std::move(out), chunks);
}

std::string to_json_line(const ShardAssignment& a) {
  nlohmann::ordered_json shards = nlohmann::ordered_json::array();
  for (const auto& shard : a.shards) {
    nlohmann::ordered_json ids = nlohmann::ordered_json::array();
    for (const auto& s : shard) ids.push_back(s.chunk);
    shards.push_back(std::move(ids));
  }
  nlohmann::ordered_json j = {{"round", a.round}, {"strategy", to_string(a.strategy)}, {"shards", std::move(shards)}};
  return j.dump();
}

}  // namespace unlearn
