// Copyright 2026 The edge-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

#include "unlearn/engine.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <future>
#include <stdexcept>

#include "unlearn/rng.hpp"

namespace unlearn {

std::string_view to_string(PruningMode m) {
  switch (m) {
    case PruningMode::none: return "none";
    case PruningMode::iterative: return "iterative";
    case PruningMode::oneshot: return "oneshot";
  }
  return "?";
}

const std::vector<std::string>& variant_tags() {
  static const std::vector<std::string> tags = {"cause",        "cause_no_sc", "cause_u", "cause_c",
                                                "cause_fifo",   "cause_random", "cause_norepl", "sisa",
                                                "arcane",       "omp70",        "omp95"};
  return tags;
}

PruningMode parse_pruning_mode(std::string_view name) {
  for (auto m : {PruningMode::none, PruningMode::iterative, PruningMode::oneshot}) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError(ConfigError::Kind::range, "unknown pruning mode '" + std::string(name) + "'");
}

SystemVariant make_variant(std::string_view tag, double cause_rate, PruningMode cause_mode) {
  SystemVariant v;
  v.tag = std::string(tag);
  v.pruning = cause_mode;
  v.prune_rate = cause_mode == PruningMode::none ? 0.0 : cause_rate;
  if (tag == "cause") return v;
  if (tag == "cause_no_sc") {
    v.shard_controller = false;
    return v;
  }
  if (tag == "cause_u") {
    v.partition = PartitionStrategy::uniform;
    return v;
  }
  if (tag == "cause_c") {
    v.partition = PartitionStrategy::class_based;
    return v;
  }
  if (tag == "cause_fifo") {
    v.policy = ReplacementPolicy::fifo;
    return v;
  }
  if (tag == "cause_random") {
    v.policy = ReplacementPolicy::random;
    return v;
  }
  if (tag == "cause_norepl") {
    v.policy = ReplacementPolicy::none;
    return v;
  }
  v.shard_controller = false;
  v.pruning = PruningMode::none;
  v.prune_rate = 0.0;
  if (tag == "sisa" || tag == "arcane") {
    v.partition = tag == "sisa" ? PartitionStrategy::uniform : PartitionStrategy::class_based;
    v.policy = ReplacementPolicy::lineage_overwrite;
    return v;
  }
  if (tag == "omp70" || tag == "omp95") {
    v.partition = PartitionStrategy::uniform;
    v.policy = ReplacementPolicy::none;
    v.pruning = PruningMode::oneshot;
    v.prune_rate = tag == "omp70" ? 0.7 : 0.95;
    return v;
  }
  throw ConfigError(ConfigError::Kind::range, "unknown variant '" + std::string(tag) + "'");
}

namespace {

std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

}  // namespace

CapacitySpec parse_capacity(std::string_view text) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  CapacitySpec spec;
  double scale = 1.0;
  if (s.ends_with("gb")) {
    spec.unit = CapacitySpec::Unit::megabytes;
    scale = 1024.0;
    s.resize(s.size() - 2);
  } else if (s.ends_with("mb")) {
    spec.unit = CapacitySpec::Unit::megabytes;
    s.resize(s.size() - 2);
  } else {
    spec.unit = CapacitySpec::Unit::slots;
  }
  double value = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || end != s.data() + s.size()) {
    throw ConfigError(ConfigError::Kind::syntax, "bad capacity '" + std::string(text) + "'");
  }
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ConfigError(ConfigError::Kind::range, "capacity must be positive");
  }
  if (spec.unit == CapacitySpec::Unit::slots && value != std::floor(value)) {
    throw ConfigError(ConfigError::Kind::range, "slot capacity must be a whole number");
  }
  spec.value = value * scale;
  return spec;
}

std::string to_string(const CapacitySpec& spec) {
  if (spec.unit == CapacitySpec::Unit::slots) return format_number(spec.value);
  const double gb = spec.value / 1024.0;
  if (gb == std::floor(gb)) return format_number(gb) + "GB";
  return format_number(spec.value) + "MB";
}

std::size_t slot_capacity(const CapacitySpec& spec, double checkpoint_mb) {
  double slots = spec.value;
  if (spec.unit == CapacitySpec::Unit::megabytes) {
    if (!(checkpoint_mb > 0.0)) throw ConfigError(ConfigError::Kind::range, "checkpoint size must be positive");
    slots = std::floor(spec.value / checkpoint_mb);
  }
  if (slots < 1.0) throw ConfigError(ConfigError::Kind::range, "capacity does not fit a single checkpoint");
  return static_cast<std::size_t>(slots);
}

void validate(const EngineConfig& c) {
  auto fail = [](const std::string& what) { throw ConfigError(ConfigError::Kind::range, what); };
  if (c.shards < 1) fail("shards must be at least 1");
  validate(ShardControllerConfig{c.shards, c.sc_gamma, c.sc_p});
  if (!(c.capacity.value > 0.0)) fail("capacity must be positive");
  find_profile(c.model_profile);
  if (!(c.prune_rate >= 0.0 && c.prune_rate < 1.0)) fail("prune_rate must be in [0, 1)");
  if (c.prune_steps < 1) fail("prune_steps must be at least 1");
  if (!(c.energy.joules_per_sample >= 0.0) || !std::isfinite(c.energy.joules_per_sample)) {
    fail("energy_a must be non-negative");
  }
  if (!(c.energy.fixed_overhead >= 0.0) || !std::isfinite(c.energy.fixed_overhead)) {
    fail("energy_b must be non-negative");
  }
  if (c.feature_dim < 1) fail("feature_dim must be at least 1");
  if (c.evaluate_accuracy && c.test_samples < 1) fail("test_samples must be at least 1");
}

double checkpoint_size_mb(const EngineConfig& config, const SystemVariant& variant) {
  const auto& profile = find_profile(config.model_profile);
  if (variant.pruning == PruningMode::none) return profile.base_file_mb;
  return extrapolated_size(profile, variant.prune_rate).file_mb;
}

// ---------------------------------------------------------------------------

Simulation::Simulation(EngineConfig config, SystemVariant variant, std::uint32_t label_space)
    : config_(std::move(config)),
      variant_(std::move(variant)),
      label_space_(label_space),
      controller_{config_.shards, config_.sc_gamma, config_.sc_p},
      checkpoint_mb_((validate(config_), checkpoint_size_mb(config_, variant_))),
      store_(StoreConfig{variant_.policy, slot_capacity(config_.capacity, checkpoint_mb_), std::nullopt,
                         mix_seed(config_.seed, 0x73746f7265ULL)}),
      features_(label_space, config_.feature_dim, mix_seed(config_.seed, 0x66656174ULL)) {
  if (label_space_ == 0) throw ConfigError(ConfigError::Kind::range, "label_space must be positive");
  if (variant_.partition == PartitionStrategy::class_based && label_space_ < 1) {
    throw ConfigError(ConfigError::Kind::range, "class-based partition needs labels");
  }
  if (config_.evaluate_accuracy) {
    test_set_ = features_.test_set(config_.test_samples, mix_seed(config_.seed, 0x74657374ULL));
  }
}

std::size_t Simulation::shard_count(Round round) const {
  std::size_t s = variant_.shard_controller ? shards_at(controller_, round) : config_.shards;
  if (variant_.partition == PartitionStrategy::class_based) s = std::min<std::size_t>(s, label_space_);
  return std::max<std::size_t>(s, 1);
}

std::uint64_t Simulation::retained_samples(const LineageItem& item) const {
  const auto& rec = chunks_.at(item.chunk);
  return slice_samples(rec.chunk, rec.retained, item.labels);
}

std::vector<TrainingSlice> Simulation::retained_slices(const Lineage& lineage, std::size_t from,
                                                       std::size_t to) const {
  std::vector<TrainingSlice> out;
  for (std::size_t i = from; i < to && i < lineage.items.size(); ++i) {
    const auto& item = lineage.items[i];
    const auto& rec = chunks_.at(item.chunk);
    if (slice_samples(rec.chunk, rec.retained, item.labels) == 0) continue;
    out.push_back(TrainingSlice{&rec.chunk, item.labels, rec.retained});
  }
  return out;
}

LearnerState Simulation::prune_for_storage(const LearnerState& dense) const {
  switch (variant_.pruning) {
    case PruningMode::none: return dense;
    case PruningMode::iterative: return prune_iterative(dense, variant_.prune_rate, config_.prune_steps);
    case PruningMode::oneshot: return prune_oneshot(dense, variant_.prune_rate);
  }
  return dense;
}

void Simulation::record(const ReplacementEvent& ev) {
  if (ev.kind == ReplacementEvent::Kind::replaced) ++replacements_round_;
  if (ev.kind == ReplacementEvent::Kind::dropped) ++drops_round_;
  events_.push_back(ev);
}

void Simulation::store_checkpoint(Lineage& lineage, Round round) {
  ModelCheckpoint cp;
  cp.id = next_checkpoint_++;
  cp.lineage = lineage.id;
  cp.round = round;
  for (const auto& item : lineage.items) {
    const auto n = retained_samples(item);
    if (n == 0) continue;
    cp.coverage.push_back(item.chunk);
    cp.covered_samples += n;
  }
  std::sort(cp.coverage.begin(), cp.coverage.end());
  cp.coverage.erase(std::unique(cp.coverage.begin(), cp.coverage.end()), cp.coverage.end());
  cp.covered_items = lineage.items.size();
  cp.size_mb = checkpoint_mb_;
  cp.state = prune_for_storage(lineage.head);
  record(store_.store(std::move(cp), round));
}

void Simulation::run_round(Round round, std::span<const DataChunk> adds) {
  current_round_ = round;
  for (const auto& c : adds) {
    validate_chunk(c);
    if (chunks_.contains(c.id)) throw std::invalid_argument("duplicate chunk id " + std::to_string(c.id));
    chunks_.emplace(c.id, ChunkRecord{c, c.sample_count, false, {}});
    live_samples_ += c.sample_count;
    added_samples_ += c.sample_count;
  }
  if (adds.empty()) return;

  const std::size_t st = shard_count(round);
  for (auto it = active_.begin(); it != active_.end();) {
    if (it->first >= st) {
      lineages_.at(it->second).active = false;
      it = active_.erase(it);
    } else {
      ++it;
    }
  }

  const std::uint64_t pseed = mix_seed(config_.seed, round);
  ShardAssignment a;
  switch (variant_.partition) {
    case PartitionStrategy::ucdp: a = ucdp_partition(st, adds, pseed); break;
    case PartitionStrategy::uniform: a = uniform_partition(st, adds, pseed); break;
    case PartitionStrategy::class_based: a = class_partition(st, adds, label_space_); break;
  }
  a.round = round;

  for (std::size_t s = 0; s < a.shards.size(); ++s) {
    std::vector<LineageItem> fresh;
    for (const auto& slice : a.shards[s]) {
      const auto& rec = chunks_.at(slice.chunk);
      if (slice_samples(rec.chunk, rec.retained, slice.labels) > 0) fresh.push_back({slice.chunk, slice.labels});
    }
    if (fresh.empty()) continue;
    auto act = active_.find(s);
    if (act == active_.end()) {
      const LineageId id{static_cast<std::uint32_t>(s), round};
      lineages_.emplace(id, Lineage{id, {}, LearnerState::empty(label_space_, config_.feature_dim), true});
      act = active_.emplace(s, id).first;
    }
    Lineage& lin = lineages_.at(act->second);
    const std::size_t from = lin.items.size();
    for (const auto& item : fresh) {
      lin.items.push_back(item);
      chunks_.at(item.chunk).lineages.push_back(lin.id);
    }
    const auto slices = retained_slices(lin, from, lin.items.size());
    lin.head = train_incremental(std::move(lin.head), slices, features_);
    store_checkpoint(lin, round);
  }
  assignments_.push_back(std::move(a));
}

UnlearnOutcome Simulation::handle_unlearning(const UpdateRequest& request) {
  if (request.kind != RequestKind::remove) throw UnlearningRequestError("request is not a deletion");
  if (request.chunk_refs.empty()) throw UnlearningRequestError("request references no chunks");
  if (!(request.sample_fraction > 0.0 && request.sample_fraction <= 1.0)) {
    throw UnlearningRequestError("sample fraction outside (0, 1]");
  }
  std::set<ChunkId> forbidden;
  for (ChunkId id : request.chunk_refs) {
    auto it = chunks_.find(id);
    if (it == chunks_.end()) throw UnlearningRequestError("unknown chunk " + std::to_string(id));
    if (it->second.unlearned) throw UnlearningRequestError("chunk " + std::to_string(id) + " already unlearned");
    if (!forbidden.insert(id).second) throw UnlearningRequestError("chunk " + std::to_string(id) + " listed twice");
  }

  std::set<LineageId> touched;
  for (ChunkId id : forbidden) {
    auto& rec = chunks_.at(id);
    const auto removed = samples_removed(rec.chunk.sample_count, request.sample_fraction);
    rec.retained = rec.chunk.sample_count - removed;
    rec.unlearned = true;
    live_samples_ -= removed;
    removed_samples_ += removed;
    touched.insert(rec.lineages.begin(), rec.lineages.end());
  }

  UnlearnOutcome out;
  out.request = request.id;
  for (const auto& lid : touched) {
    Lineage& lin = lineages_.at(lid);
    RetrainEpisode ep;
    ep.lineage = lid;
    LearnerState state = LearnerState::empty(label_space_, config_.feature_dim);
    if (auto clean = store_.lookup_latest_clean(lid, forbidden)) {
      const ModelCheckpoint* cp = store_.find(*clean);
      ep.start = cp->id;
      ep.start_items = cp->covered_items;
      state = restore_dense(cp->state);
    }
    for (const auto* cp : store_.resident()) {
      if (cp->lineage == lid && cp->covers_any(forbidden)) ep.erased.push_back(cp->id);
    }
    store_.erase_if([&](const ModelCheckpoint& cp) { return cp.lineage == lid && cp.covers_any(forbidden); });

    const auto slices = retained_slices(lin, ep.start_items, lin.items.size());
    for (const auto& s : slices) ep.rsn += slice_samples(*s.chunk, s.prefix, s.labels);
    lin.head = train_incremental(std::move(state), slices, features_);

    std::uint64_t remaining = 0;
    for (const auto& item : lin.items) remaining += retained_samples(item);
    if (remaining > 0) {
      ep.stored = next_checkpoint_;
      store_checkpoint(lin, current_round_);
    }
    out.rsn += ep.rsn;
    energy_round_ += energy_of(config_.energy, ep.rsn);
    out.episodes.push_back(std::move(ep));
  }

  rsn_round_ += out.rsn;
  rsn_cumulative_ += out.rsn;
  ratio_sum_ += live_samples_ > 0 ? static_cast<double>(out.rsn) / static_cast<double>(live_samples_) : 0.0;
  ++ratio_count_;
  outcomes_.push_back(out);
  return out;
}

void Simulation::check_conservation() const {
  std::uint64_t total = 0;
  for (const auto& [id, lin] : lineages_) {
    for (const auto& item : lin.items) total += retained_samples(item);
  }
  if (total != live_samples_ || live_samples_ != added_samples_ - removed_samples_) {
    throw InvariantViolation("live sample count does not match the lineage ledger");
  }
}

MetricsRecord Simulation::close_round() {
  check_conservation();
  MetricsRecord m;
  m.round = current_round_;
  m.variant = variant_.tag;
  m.rsn_round = rsn_round_;
  m.rsn_cumulative = rsn_cumulative_;
  m.retrain_ratio = ratio_count_ > 0 ? ratio_sum_ / static_cast<double>(ratio_count_) : 0.0;
  m.energy_joules = energy_round_;
  m.occupancy = store_.occupancy();
  m.replacements = replacements_round_;
  m.drops = drops_round_;
  if (config_.evaluate_accuracy) {
    try {
      m.accuracy = evaluate_accuracy(test_set_);
    } catch (const std::invalid_argument&) {
      m.accuracy.reset();
    }
  }
  rsn_round_ = 0;
  ratio_sum_ = 0.0;
  ratio_count_ = 0;
  energy_round_ = 0.0;
  replacements_round_ = 0;
  drops_round_ = 0;
  return m;
}

MetricsRecord Simulation::step(const RoundEvents& events) {
  run_round(events.round, events.adds);
  for (const auto& req : enqueue_fcfs(events.deletes)) handle_unlearning(req);
  return close_round();
}

double Simulation::evaluate_accuracy(std::span<const Sample> test) const {
  if (test.empty()) throw std::invalid_argument("empty test set");
  std::map<LineageId, const ModelCheckpoint*> latest;
  for (const auto* cp : store_.resident()) {
    auto& slot = latest[cp->lineage];
    if (!slot || cp->id > slot->id) slot = cp;
  }
  std::vector<const LearnerState*> ensemble;
  for (const auto& [lid, cp] : latest) {
    std::uint64_t live = 0;
    for (const auto& item : lineages_.at(lid).items) live += retained_samples(item);
    if (live > 0) ensemble.push_back(&cp->state);
  }
  if (ensemble.empty()) throw std::invalid_argument("empty ensemble");
  return ensemble_accuracy(ensemble, test);
}

bool Simulation::evict_checkpoint(CheckpointId id) { return store_.erase(id); }

// ---------------------------------------------------------------------------

std::vector<MetricsRecord> run_scenario(const EngineConfig& config, const Workload& workload,
                                        std::span<const SystemVariant> variants) {
  validate(config);
  std::vector<std::future<std::vector<MetricsRecord>>> jobs;
  jobs.reserve(variants.size());
  for (const auto& v : variants) {
    jobs.push_back(std::async(std::launch::async, [&config, &workload, v] {
      Simulation sim(config, v, workload.config.label_space);
      std::vector<MetricsRecord> rows;
      rows.reserve(workload.rounds.size());
      for (const auto& ev : workload.rounds) rows.push_back(sim.step(ev));
      return rows;
    }));
  }
  std::vector<MetricsRecord> out;
  for (auto& j : jobs) {
    auto rows = j.get();
    out.insert(out.end(), std::make_move_iterator(rows.begin()), std::make_move_iterator(rows.end()));
  }
  return out;
}

std::uint64_t final_rsn(std::span<const MetricsRecord> records, std::string_view tag) {
  std::uint64_t v = 0;
  bool seen = false;
  for (const auto& r : records) {
    if (r.variant == tag) {
      v = r.rsn_cumulative;
      seen = true;
    }
  }
  if (!seen) throw std::invalid_argument("no records for variant '" + std::string(tag) + "'");
  return v;
}

}  // namespace unlearn
