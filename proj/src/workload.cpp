// Copyright 2026 The edge-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

#include "unlearn/workload.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "unlearn/rng.hpp"

namespace unlearn {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(ConfigError::Kind::range, what);
}

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

struct UserStream {
  UserProfile profile;
  Rng rng;
  std::vector<ChunkId> live;  // chunks learned in earlier rounds, not yet unlearned
};

}  // namespace

void validate(const WorkloadConfig& c) {
  require(c.n_users > 0, "n_users must be positive");
  require(c.n_rounds > 0, "rounds must be positive");
  require(is_probability(c.unlearn_probability), "unlearn_prob must be in [0, 1]");
  require(c.label_space > 0, "label_space must be positive");
  require(c.chunk_min > 0 && c.chunk_min <= c.chunk_max, "chunk size bounds must satisfy 0 < min <= max");
  require(c.labels_min > 0 && c.labels_min <= c.labels_max, "label subset bounds must satisfy 0 < min <= max");
  require(c.labels_min <= c.label_space, "labels_min exceeds label_space");
  require(is_probability(c.activity_probability), "activity_prob must be in [0, 1]");
  require(is_probability(c.partial_delete_probability), "partial_delete_prob must be in [0, 1]");
}

std::vector<UserProfile> generate_profiles(const WorkloadConfig& config) {
  validate(config);
  std::vector<UserProfile> out;
  out.reserve(config.n_users);
  for (UserId u = 0; u < config.n_users; ++u) {
    Rng rng(mix_seed(config.seed, u));
    const auto hi = std::min(config.labels_max, config.label_space);
    const auto k = static_cast<std::size_t>(rng.uniform_int(config.labels_min, hi));
    std::vector<Label> labels(config.label_space);
    for (Label l = 0; l < config.label_space; ++l) labels[l] = l;
    rng.shuffle(labels);
    labels.resize(k);
    std::sort(labels.begin(), labels.end());
    out.push_back({u, std::move(labels), config.chunk_min, config.chunk_max, config.activity_probability});
  }
  return out;
}

Workload generate_workload(const WorkloadConfig& config) {
  validate(config);
  std::vector<UserStream> users;
  users.reserve(config.n_users);
  for (auto& profile : generate_profiles(config)) {
    // Profile draws use the (seed, user) stream; round draws use a second one.
    Rng rng(mix_seed(mix_seed(config.seed, profile.id), 0x726f756e64ULL));
    users.push_back({std::move(profile), rng, {}});
  }

  Workload w{config, {}};
  ChunkId next_chunk = 0;
  RequestId next_request = 0;
  for (Round t = 1; t <= config.n_rounds; ++t) {
    RoundEvents ev{t, {}, {}};
    std::vector<std::pair<UserId, ChunkId>> added;
    for (auto& user : users) {
      auto& rng = user.rng;
      if (rng.bernoulli(user.profile.activity_probability)) {
        DataChunk chunk;
        chunk.id = next_chunk++;
        chunk.owner = user.profile.id;
        chunk.round = t;
        chunk.sample_count = rng.uniform_int(user.profile.chunk_min, user.profile.chunk_max);
        const auto& subset = user.profile.label_subset;
        for (std::uint64_t i = 0; i < chunk.sample_count; ++i) {
          ++chunk.label_histogram[subset[rng.uniform_int(0, subset.size() - 1)]];
        }
        added.emplace_back(user.profile.id, chunk.id);
        ev.adds.push_back(std::move(chunk));
      }
      // Deletes only target chunks from strictly earlier rounds.
      const bool raise = rng.bernoulli(config.unlearn_probability);
      if (raise && !user.live.empty()) {
        // Per-chunk fair coins with the empty draw rejected: uniform over the
        // non-empty subsets of the user's live chunks.
        std::vector<ChunkId> picked;
        do {
          picked.clear();
          for (ChunkId c : user.live) {
            if (rng.next() >> 63) picked.push_back(c);
          }
        } while (picked.empty());
        UpdateRequest req;
        req.id = next_request++;
        req.kind = RequestKind::remove;
        req.owner = user.profile.id;
        req.chunk_refs = picked;
        req.arrival_round = t;
        if (rng.bernoulli(config.partial_delete_probability)) req.sample_fraction = rng.uniform_open_closed();
        std::erase_if(user.live, [&](ChunkId c) { return std::binary_search(picked.begin(), picked.end(), c); });
        ev.deletes.push_back(std::move(req));
      }
    }
    for (auto [owner, chunk] : added) users[owner].live.push_back(chunk);
    w.rounds.push_back(std::move(ev));
  }
  return w;
}

std::vector<UpdateRequest> enqueue_fcfs(std::span<const UpdateRequest> requests) {
  std::vector<UpdateRequest> out(requests.begin(), requests.end());
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return out;
}

std::uint64_t total_delete_requests(const Workload& workload) {
  std::uint64_t n = 0;
  for (const auto& r : workload.rounds) n += r.deletes.size();
  return n;
}

void write_workload_jsonl(std::ostream& os, const Workload& w) {
  using json = nlohmann::ordered_json;
  const auto& c = w.config;
  json header = {{"type", "header"},
                 {"n_users", c.n_users},
                 {"rounds", c.n_rounds},
                 {"unlearn_prob", c.unlearn_probability},
                 {"seed", c.seed},
                 {"label_space", c.label_space},
                 {"chunk_min", c.chunk_min},
                 {"chunk_max", c.chunk_max},
                 {"labels_min", c.labels_min},
                 {"labels_max", c.labels_max},
                 {"activity_prob", c.activity_probability},
                 {"partial_delete_prob", c.partial_delete_probability}};
  os << header.dump() << '\n';
  for (const auto& r : w.rounds) {
    for (const auto& chunk : r.adds) {
      json labels = json::object();
      for (const auto& [l, n] : chunk.label_histogram) labels[std::to_string(l)] = n;
      json ev = {{"round", r.round},           {"type", "add"},
                 {"chunk_id", chunk.id},       {"owner", chunk.owner},
                 {"sample_count", chunk.sample_count}, {"labels", labels}};
      os << ev.dump() << '\n';
    }
    for (const auto& req : r.deletes) {
      json ev = {{"round", r.round},      {"type", "delete"},      {"request_id", req.id},
                 {"owner", req.owner},    {"chunks", req.chunk_refs}, {"sample_fraction", req.sample_fraction}};
      os << ev.dump() << '\n';
    }
  }
}

Workload read_workload_jsonl(std::istream& is) {
  using json = nlohmann::ordered_json;
  Workload w;
  std::string line;
  std::size_t lineno = 0;
  Round max_round = 0;
  auto round_slot = [&](Round t) -> RoundEvents& {
    if (t == 0) throw std::runtime_error("workload: round must be >= 1");
    while (w.rounds.size() < t) w.rounds.push_back({static_cast<Round>(w.rounds.size() + 1), {}, {}});
    return w.rounds[t - 1];
  };
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    json ev;
    try {
      ev = json::parse(line);
    } catch (const json::parse_error& e) {
      throw std::runtime_error("workload line " + std::to_string(lineno) + ": " + e.what());
    }
    const auto type = ev.at("type").get<std::string>();
    if (type == "header") {
      auto& c = w.config;
      c.n_users = ev.at("n_users");
      c.n_rounds = ev.at("rounds");
      c.unlearn_probability = ev.at("unlearn_prob");
      c.seed = ev.at("seed");
      c.label_space = ev.at("label_space");
      c.chunk_min = ev.at("chunk_min");
      c.chunk_max = ev.at("chunk_max");
      c.labels_min = ev.at("labels_min");
      c.labels_max = ev.at("labels_max");
      c.activity_probability = ev.at("activity_prob");
      c.partial_delete_probability = ev.at("partial_delete_prob");
      continue;
    }
    const Round t = ev.at("round");
    max_round = std::max(max_round, t);
    if (type == "add") {
      DataChunk chunk;
      chunk.id = ev.at("chunk_id");
      chunk.owner = ev.at("owner");
      chunk.round = t;
      chunk.sample_count = ev.at("sample_count");
      for (const auto& [k, v] : ev.at("labels").items()) chunk.label_histogram[static_cast<Label>(std::stoul(k))] = v;
      validate_chunk(chunk);
      round_slot(t).adds.push_back(std::move(chunk));
    } else if (type == "delete") {
      UpdateRequest req;
      req.id = ev.at("request_id");
      req.kind = RequestKind::remove;
      req.owner = ev.at("owner");
      req.chunk_refs = ev.at("chunks").get<std::vector<ChunkId>>();
      req.sample_fraction = ev.at("sample_fraction");
      req.arrival_round = t;
      round_slot(t).deletes.push_back(std::move(req));
    } else {
      throw std::runtime_error("workload line " + std::to_string(lineno) + ": unknown event type " + type);
    }
  }
  if (w.config.n_rounds < max_round) w.config.n_rounds = max_round;
  round_slot(w.config.n_rounds);
  return w;
}

}  // namespace unlearn
