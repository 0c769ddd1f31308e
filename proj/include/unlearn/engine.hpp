// Copyright 2026 The edge-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "unlearn/controller.hpp"
#include "unlearn/learner.hpp"
#include "unlearn/memory.hpp"
#include "unlearn/partition.hpp"
#include "unlearn/types.hpp"
#include "unlearn/workload.hpp"

namespace unlearn {

enum class PruningMode { none, iterative, oneshot };

std::string_view to_string(PruningMode m);

/// One system under test: how data is partitioned, how checkpoints are kept
/// and pruned, and whether the shard count decays.
struct SystemVariant {
  std::string tag;
  PartitionStrategy partition = PartitionStrategy::ucdp;
  ReplacementPolicy policy = ReplacementPolicy::fibor;
  bool shard_controller = true;
  PruningMode pruning = PruningMode::iterative;
  double prune_rate = 0.7;

  bool operator==(const SystemVariant&) const = default;
};

/// cause, cause_no_sc, cause_u, cause_c, cause_fifo, cause_random,
/// cause_norepl, sisa, arcane, omp70, omp95.
const std::vector<std::string>& variant_tags();

/// Throws ConfigError(range) for an unknown tag. `cause_rate` and
/// `cause_mode` set the pruning of the cause family.
SystemVariant make_variant(std::string_view tag, double cause_rate = 0.7,
                           PruningMode cause_mode = PruningMode::iterative);

PruningMode parse_pruning_mode(std::string_view name);

/// Memory given either as a slot count or as megabytes. Megabytes are turned
/// into slots by dividing by the variant's checkpoint file size.
struct CapacitySpec {
  enum class Unit { slots, megabytes };
  Unit unit = Unit::megabytes;
  double value = 2048.0;

  bool operator==(const CapacitySpec&) const = default;
};

/// Parses "2GB", "512MB", "1.5gb" or a bare slot count such as "64".
CapacitySpec parse_capacity(std::string_view text);
std::string to_string(const CapacitySpec& spec);

/// Slot count for checkpoints of `checkpoint_mb` each. Throws
/// ConfigError(range) when not even one checkpoint fits.
std::size_t slot_capacity(const CapacitySpec& spec, double checkpoint_mb);

struct EngineConfig {
  std::size_t shards = 4;
  double sc_gamma = 0.5;
  double sc_p = 0.5;
  CapacitySpec capacity;
  std::string model_profile = "resnet34";
  double prune_rate = 0.7;
  std::size_t prune_steps = 3;
  EnergyModel energy;
  std::size_t feature_dim = 8;
  std::size_t test_samples = 500;
  bool evaluate_accuracy = true;
  std::uint64_t seed = 42;

  bool operator==(const EngineConfig&) const = default;
};

/// Throws ConfigError(range).
void validate(const EngineConfig& config);

/// Stored size of one checkpoint of `variant` under the configured profile.
double checkpoint_size_mb(const EngineConfig& config, const SystemVariant& variant);

struct MetricsRecord {
  Round round = 0;
  std::string variant;
  std::uint64_t rsn_round = 0;
  std::uint64_t rsn_cumulative = 0;
  double retrain_ratio = 0.0;
  double energy_joules = 0.0;
  std::size_t occupancy = 0;
  std::size_t replacements = 0;
  std::size_t drops = 0;
  std::optional<double> accuracy;
};

/// A slice of one chunk learned by a lineage.
struct LineageItem {
  ChunkId chunk = 0;
  LabelRange labels;
};

/// Ordered learning history of one sub-model across rounds. Items are never
/// removed; an unlearned chunk simply contributes no retained samples.
struct Lineage {
  LineageId id;
  std::vector<LineageItem> items;
  LearnerState head;  // dense state over all retained items
  bool active = true;
};

/// Retraining of one lineage for one request.
struct RetrainEpisode {
  LineageId lineage;
  std::optional<CheckpointId> start;
  std::size_t start_items = 0;
  std::uint64_t rsn = 0;
  std::vector<CheckpointId> erased;
  std::optional<CheckpointId> stored;
};

struct UnlearnOutcome {
  RequestId request = 0;
  std::uint64_t rsn = 0;
  std::vector<RetrainEpisode> episodes;
};

/// Per-chunk ledger entry.
struct ChunkRecord {
  DataChunk chunk;
  std::uint64_t retained = 0;  // samples still learnable, a prefix
  bool unlearned = false;      // a request has referenced it
  std::vector<LineageId> lineages;
};

/// One variant replaying one workload. Single-threaded and deterministic.
class Simulation {
 public:
  Simulation(EngineConfig config, SystemVariant variant, std::uint32_t label_space);

  /// Partition, train, prune and store one round's new chunks.
  void run_round(Round round, std::span<const DataChunk> adds);

  /// Throws UnlearningRequestError if any referenced chunk is unknown or
  /// already unlearned; the state is left untouched in that case.
  UnlearnOutcome handle_unlearning(const UpdateRequest& request);

  /// Metrics of the round since the last close.
  MetricsRecord close_round();

  /// run_round, then every delete first-come-first-served, then close_round.
  MetricsRecord step(const RoundEvents& events);

  /// Majority vote of the latest stored checkpoint of every live lineage.
  /// Throws std::invalid_argument on an empty test set or ensemble.
  double evaluate_accuracy(std::span<const Sample> test) const;

  /// Drops a stored checkpoint from outside, as memory pressure would.
  bool evict_checkpoint(CheckpointId id);

  const EngineConfig& config() const { return config_; }
  const SystemVariant& variant() const { return variant_; }
  const MemoryStore& store() const { return store_; }
  const std::map<LineageId, Lineage>& lineages() const { return lineages_; }
  const std::map<ChunkId, ChunkRecord>& chunks() const { return chunks_; }
  const std::vector<ReplacementEvent>& replacement_trace() const { return events_; }
  const std::vector<ShardAssignment>& partition_trace() const { return assignments_; }
  const std::vector<UnlearnOutcome>& unlearn_trace() const { return outcomes_; }
  FeatureSource& features() { return features_; }

  std::uint64_t live_samples() const { return live_samples_; }
  std::uint64_t retained_samples(const LineageItem& item) const;
  /// Training slices of `lineage` items [from, to) with their retained
  /// prefixes; empty slices are skipped.
  std::vector<TrainingSlice> retained_slices(const Lineage& lineage, std::size_t from, std::size_t to) const;
  /// Applies the variant's pruning to a dense state.
  LearnerState prune_for_storage(const LearnerState& dense) const;

 private:
  std::size_t shard_count(Round round) const;
  void store_checkpoint(Lineage& lineage, Round round);
  void record(const ReplacementEvent& ev);
  void check_conservation() const;

  EngineConfig config_;
  SystemVariant variant_;
  std::uint32_t label_space_;
  ShardControllerConfig controller_;
  double checkpoint_mb_;
  MemoryStore store_;
  FeatureSource features_;
  std::vector<Sample> test_set_;

  std::map<LineageId, Lineage> lineages_;
  std::map<std::size_t, LineageId> active_;
  std::map<ChunkId, ChunkRecord> chunks_;
  std::uint64_t live_samples_ = 0;
  std::uint64_t added_samples_ = 0;
  std::uint64_t removed_samples_ = 0;
  CheckpointId next_checkpoint_ = 1;
  Round current_round_ = 0;

  std::vector<ReplacementEvent> events_;
  std::vector<ShardAssignment> assignments_;
  std::vector<UnlearnOutcome> outcomes_;

  std::uint64_t rsn_round_ = 0;
  std::uint64_t rsn_cumulative_ = 0;
  double ratio_sum_ = 0.0;
  std::size_t ratio_count_ = 0;
  double energy_round_ = 0.0;
  std::size_t replacements_round_ = 0;
  std::size_t drops_round_ = 0;
};

/// Every variant replays the same workload; runs execute in parallel.
/// Records are ordered by variant (as listed) then round.
std::vector<MetricsRecord> run_scenario(const EngineConfig& config, const Workload& workload,
                                        std::span<const SystemVariant> variants);

/// Cumulative RSN at the end of the run for `tag`.
std::uint64_t final_rsn(std::span<const MetricsRecord> records, std::string_view tag);

}  // namespace unlearn
