// Copyright 2026 The edge-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

#include "unlearn/memory.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <utility>

#include <json.hpp>

namespace unlearn {

namespace {

__extension__ typedef unsigned __int128 u128;

// (F(n), F(n+1)) mod m.
std::pair<std::uint64_t, std::uint64_t> fib_pair(std::uint64_t n, std::uint64_t m) {
  if (n == 0) return {0, 1 % m};
  const auto [a, b] = fib_pair(n / 2, m);
  const auto two_b_minus_a = (2 * static_cast<u128>(b) + m - a) % m;
  const auto c = static_cast<std::uint64_t>(static_cast<u128>(a) * two_b_minus_a % m);
  const auto d = static_cast<std::uint64_t>((static_cast<u128>(a) * a + static_cast<u128>(b) * b) % m);
  if (n % 2 == 0) return {c, d};
  return {d, static_cast<std::uint64_t>((static_cast<u128>(c) + d) % m)};
}

}  // namespace

std::uint64_t fib_distinct(std::uint64_t k) {
  if (k > 92) throw std::overflow_error("fib_distinct: value exceeds 64 bits");
  if (k == 0) return 0;
  std::uint64_t a = 1, b = 2;  // f(1), f(2)
  for (std::uint64_t i = 1; i < k; ++i) {
    const auto next = a + b;
    a = b;
    b = next;
  }
  return a;
}

std::uint64_t fib_distinct_mod(std::uint64_t k, std::uint64_t m) {
  if (m == 0) throw std::invalid_argument("fib_distinct_mod: modulus must be positive");
  if (k == 0) return 0;
  return fib_pair(k + 1, m).first;
}

std::string LineageId::str() const { return "s" + std::to_string(shard) + "r" + std::to_string(created); }

bool ModelCheckpoint::covers_any(const std::set<ChunkId>& chunks) const {
  return std::any_of(chunks.begin(), chunks.end(),
                     [&](ChunkId c) { return std::binary_search(coverage.begin(), coverage.end(), c); });
}

std::string_view to_string(ReplacementPolicy p) {
  switch (p) {
    case ReplacementPolicy::fibor: return "fibor";
    case ReplacementPolicy::fifo: return "fifo";
    case ReplacementPolicy::random: return "random";
    case ReplacementPolicy::none: return "none";
    case ReplacementPolicy::lineage_overwrite: return "lineage_overwrite";
  }
  return "?";
}

ReplacementPolicy parse_policy(std::string_view name) {
  for (auto p : {ReplacementPolicy::fibor, ReplacementPolicy::fifo, ReplacementPolicy::random, ReplacementPolicy::none,
                 ReplacementPolicy::lineage_overwrite}) {
    if (to_string(p) == name) return p;
  }
  throw ConfigError(ConfigError::Kind::range, "unknown replacement policy '" + std::string(name) + "'");
}

std::string to_json_line(const ReplacementEvent& e) {
  nlohmann::ordered_json j;
  j["round"] = e.round;
  j["kind"] = e.kind == ReplacementEvent::Kind::placed     ? "placed"
              : e.kind == ReplacementEvent::Kind::replaced ? "replaced"
                                                           : "dropped";
  j["slot"] = e.slot ? nlohmann::ordered_json(*e.slot + 1) : nlohmann::ordered_json(nullptr);
  j["evicted"] = e.evicted ? nlohmann::ordered_json(*e.evicted) : nlohmann::ordered_json(nullptr);
  j["inserted"] = e.inserted;
  if (!e.also_evicted.empty()) j["also_evicted"] = e.also_evicted;
  return j.dump();
}

MemoryStore::MemoryStore(StoreConfig config) : config_(config), rng_(mix_seed(config.seed, 0x73746f7265ULL)) {
  if (config_.budget_mb) {
    if (!(*config_.budget_mb > 0.0)) throw ConfigError(ConfigError::Kind::range, "memory budget must be positive");
  } else {
    if (config_.slots == 0) throw ConfigError(ConfigError::Kind::range, "slot capacity must be at least 1");
    slots_.resize(config_.slots);
  }
}

ReplacementEvent MemoryStore::store(ModelCheckpoint checkpoint, Round round) {
  return config_.budget_mb ? store_bytes(std::move(checkpoint), round) : store_slots(std::move(checkpoint), round);
}

std::size_t MemoryStore::pick_victim(std::size_t n) {
  switch (config_.policy) {
    case ReplacementPolicy::fibor: {
      replace_at_ = static_cast<std::size_t>((replace_at_ % n + fib_distinct_mod(fibor_k_, n)) % n);
      ++fibor_k_;
      return replace_at_;
    }
    case ReplacementPolicy::fifo: {
      std::size_t victim = 0;
      std::uint64_t oldest = std::numeric_limits<std::uint64_t>::max();
      for (std::size_t i = 0; i < n; ++i) {
        if (slots_[i] && slots_[i]->seq < oldest) {
          oldest = slots_[i]->seq;
          victim = i;
        }
      }
      return victim;
    }
    case ReplacementPolicy::random: return static_cast<std::size_t>(rng_.uniform_int(0, n - 1));
    case ReplacementPolicy::none:
    case ReplacementPolicy::lineage_overwrite: break;
  }
  throw std::logic_error("policy does not evict");
}

std::optional<std::size_t> MemoryStore::find_lineage(const LineageId& lineage) const {
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    if (slots_[i] && slots_[i]->checkpoint.lineage == lineage) return i;
  }
  return std::nullopt;
}

ReplacementEvent MemoryStore::store_slots(ModelCheckpoint cp, Round round) {
  ReplacementEvent ev;
  ev.inserted = cp.id;
  ev.round = round;
  std::optional<std::size_t> target;
  if (config_.policy == ReplacementPolicy::lineage_overwrite) target = find_lineage(cp.lineage);
  if (!target) {
    for (std::size_t i = 0; i < slots_.size(); ++i) {
      if (!slots_[i]) {
        target = i;
        break;
      }
    }
  }
  if (!target) {
    if (config_.policy == ReplacementPolicy::none || config_.policy == ReplacementPolicy::lineage_overwrite) {
      ev.kind = ReplacementEvent::Kind::dropped;
      return ev;
    }
    target = pick_victim(slots_.size());
  }
  ev.slot = *target;
  if (slots_[*target]) {
    ev.kind = ReplacementEvent::Kind::replaced;
    ev.evicted = slots_[*target]->checkpoint.id;
  }
  slots_[*target] = Entry{std::move(cp), next_seq_++};
  return ev;
}

ReplacementEvent MemoryStore::store_bytes(ModelCheckpoint cp, Round round) {
  ReplacementEvent ev;
  ev.inserted = cp.id;
  ev.round = round;
  const double budget = *config_.budget_mb;
  if (cp.size_mb > budget) {
    ev.kind = ReplacementEvent::Kind::dropped;
    return ev;
  }
  auto evict_at = [&](std::size_t pos) {
    const auto id = slots_[pos]->checkpoint.id;
    if (ev.evicted) {
      ev.also_evicted.push_back(id);
    } else {
      ev.evicted = id;
      ev.slot = pos;
    }
    slots_.erase(slots_.begin() + static_cast<std::ptrdiff_t>(pos));
  };
  const bool evicting =
      config_.policy != ReplacementPolicy::none && config_.policy != ReplacementPolicy::lineage_overwrite;
  if (config_.policy == ReplacementPolicy::lineage_overwrite) {
    if (auto pos = find_lineage(cp.lineage)) evict_at(*pos);
  }
  while (used_mb() + cp.size_mb > budget) {
    if (!evicting || slots_.empty()) {
      ev.kind = ReplacementEvent::Kind::dropped;
      ev.slot.reset();
      return ev;
    }
    evict_at(pick_victim(slots_.size()));
  }
  ev.kind = ev.evicted ? ReplacementEvent::Kind::replaced : ReplacementEvent::Kind::placed;
  if (!ev.slot) ev.slot = slots_.size();
  slots_.push_back(Entry{std::move(cp), next_seq_++});
  return ev;
}

bool MemoryStore::erase(CheckpointId id) {
  return erase_if([id](const ModelCheckpoint& cp) { return cp.id == id; }) > 0;
}

std::size_t MemoryStore::erase_if(const std::function<bool(const ModelCheckpoint&)>& pred) {
  std::size_t n = 0;
  if (config_.budget_mb) {
    n = std::erase_if(slots_, [&](const std::optional<Entry>& e) { return pred(e->checkpoint); });
  } else {
    for (auto& s : slots_) {
      if (s && pred(s->checkpoint)) {
        s.reset();
        ++n;
      }
    }
  }
  return n;
}

std::optional<CheckpointId> MemoryStore::lookup_latest_clean(const LineageId& lineage,
                                                             const std::set<ChunkId>& forbidden) const {
  const ModelCheckpoint* best = nullptr;
  for (const auto& s : slots_) {
    if (!s || s->checkpoint.lineage != lineage || s->checkpoint.covers_any(forbidden)) continue;
    const auto& cp = s->checkpoint;
    if (!best || std::tie(cp.covered_items, cp.round, cp.id) > std::tie(best->covered_items, best->round, best->id)) {
      best = &cp;
    }
  }
  if (!best) return std::nullopt;
  return best->id;
}

const ModelCheckpoint* MemoryStore::find(CheckpointId id) const {
  for (const auto& s : slots_) {
    if (s && s->checkpoint.id == id) return &s->checkpoint;
  }
  return nullptr;
}

std::vector<const ModelCheckpoint*> MemoryStore::resident() const {
  std::vector<const ModelCheckpoint*> out;
  for (const auto& s : slots_) {
    if (s) out.push_back(&s->checkpoint);
  }
  return out;
}

std::vector<std::optional<CheckpointId>> MemoryStore::slot_view() const {
  std::vector<std::optional<CheckpointId>> out;
  for (const auto& s : slots_) out.push_back(s ? std::optional(s->checkpoint.id) : std::nullopt);
  return out;
}

std::size_t MemoryStore::occupancy() const {
  return static_cast<std::size_t>(std::count_if(slots_.begin(), slots_.end(), [](const auto& s) { return s.has_value(); }));
}

double MemoryStore::used_mb() const {
  double total = 0.0;
  for (const auto& s : slots_) {
    if (s) total += s->checkpoint.size_mb;
  }
  return total;
}

InsertionTrace simulate_insertions(ReplacementPolicy policy, std::size_t slots, std::size_t count,
                                   std::uint64_t seed) {
  MemoryStore store(StoreConfig{policy, slots, std::nullopt, seed});
  InsertionTrace out;
  for (std::size_t i = 1; i <= count; ++i) {
    ModelCheckpoint cp;
    cp.id = i;
    cp.round = static_cast<Round>(i);
    auto ev = store.store(std::move(cp), static_cast<Round>(i));
    if (ev.evicted) out.evicted.push_back(*ev.evicted);
    out.events.push_back(std::move(ev));
  }
  for (const auto* cp : store.resident()) out.final_resident.push_back(cp->id);
  std::sort(out.final_resident.begin(), out.final_resident.end());
  return out;
}

}  // namespace unlearn
