// Copyright 2026 The edge-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "unlearn/types.hpp"

namespace unlearn {

struct Sample {
  Label label = 0;
  std::vector<double> features;
};

/// Per-label feature sums of a chunk prefix, labels ascending.
struct ChunkSums {
  std::vector<Label> labels;
  std::vector<std::uint64_t> counts;
  std::vector<double> sums;  // labels.size() * dim, row-major
};

/// Synthetic, seeded features: sample i of a chunk is its label's fixed mean
/// plus unit Gaussian noise keyed on (seed, chunk id, i). Per-chunk sums are
/// memoized; a source is single-threaded.
class FeatureSource {
 public:
  FeatureSource(std::uint32_t label_space, std::size_t dim, std::uint64_t seed, double separation = 2.0);

  std::uint32_t label_space() const { return label_space_; }
  std::size_t dim() const { return dim_; }
  std::span<const double> label_mean(Label label) const;

  std::vector<double> sample_features(const DataChunk& chunk, std::uint64_t index) const;
  std::vector<Sample> chunk_samples(const DataChunk& chunk, std::uint64_t prefix) const;

  /// Sums over the first `prefix` samples of `chunk`, accumulated sample by
  /// sample in index order.
  const ChunkSums& chunk_sums(const DataChunk& chunk, std::uint64_t prefix);

  /// Labels drawn uniformly, features from the same class means.
  std::vector<Sample> test_set(std::size_t n, std::uint64_t seed) const;

 private:
  std::uint32_t label_space_;
  std::size_t dim_;
  std::uint64_t seed_;
  std::vector<double> means_;
  std::unordered_map<std::uint64_t, std::unordered_map<std::uint64_t, ChunkSums>> cache_;
};

/// Nearest-centroid learner. `sums`/`counts` are the exact sufficient
/// statistics (training continues from them); `parameters` is the deployable
/// model: the dense centroids, or only the retained ones after pruning, with
/// the removed dense indices listed in `pruned_mask`.
struct LearnerState {
  std::uint32_t label_space = 0;
  std::size_t dim = 0;
  std::vector<double> sums;
  std::vector<std::uint64_t> counts;
  std::vector<double> parameters;
  std::vector<std::size_t> pruned_mask;
  std::uint64_t trained_sample_count = 0;

  static LearnerState empty(std::uint32_t label_space, std::size_t dim);
  /// A bare parameter vector with no statistics, e.g. for pruning tests.
  static LearnerState from_parameters(std::vector<double> parameters);

  std::size_t dense_size() const { return parameters.size() + pruned_mask.size(); }
  std::vector<double> dense_parameters() const;

  bool operator==(const LearnerState&) const = default;
};

/// One training unit: the first `prefix` samples of a chunk, restricted to
/// a label range.
struct TrainingSlice {
  const DataChunk* chunk = nullptr;
  LabelRange labels;
  std::uint64_t prefix = 0;
};

/// Folds slices in the given order; callers pass canonical order. Training
/// A then B is bit-identical to training A followed by B in one call.
LearnerState train_incremental(LearnerState state, std::span<const TrainingSlice> slices, FeatureSource& features);
LearnerState train_incremental(LearnerState state, std::span<const Sample> samples);

/// Prune-and-retrain in `steps` equal sub-steps until round(rate * P) of the
/// P dense parameters are removed. Each sub-step drops the smallest-magnitude
/// survivors and refits the survivors: from `retrain` samples where that
/// label has any, otherwise from the state's own statistics.
LearnerState prune_iterative(LearnerState state, double rate, std::size_t steps, std::span<const Sample> retrain = {});
LearnerState prune_oneshot(LearnerState state, double rate, std::span<const Sample> retrain = {});

/// Dense centroids recomputed from the statistics, pruning undone.
LearnerState restore_dense(LearnerState state);

Label predict(const LearnerState& state, std::span<const double> features);

/// Most frequent label, smallest label on ties. Throws on an empty ensemble.
Label majority_vote(std::span<const Label> votes);

/// Fraction of `test` classified correctly by majority vote over `ensemble`.
double ensemble_accuracy(std::span<const LearnerState* const> ensemble, std::span<const Sample> test);

struct EnergyModel {
  double joules_per_sample = 1.0;
  double fixed_overhead = 0.0;

  bool operator==(const EnergyModel&) const = default;
};

/// Energy of one retraining episode.
double energy_of(const EnergyModel& model, std::uint64_t rsn);

// ---------------------------------------------------------------------------
// Reference model sizes under pruning.

struct PrunePoint {
  double rate = 0.0;
  double params_m = 0.0;
  double file_mb = 0.0;
  double accuracy = 0.0;
  std::string accuracy_degradation;  // as tabulated, e.g. "+0.890"
};

struct ModelSizeProfile {
  std::string name;
  std::string dataset;
  double base_params_m = 0.0;
  double base_file_mb = 0.0;
  double base_accuracy = 0.0;
  std::vector<PrunePoint> curve;  // ascending rate
};

struct ModelSize {
  double params_m = 0.0;
  double file_mb = 0.0;
};

/// The four reference profiles from the bundled table plus a linear "toy"
/// profile.
const std::vector<ModelSizeProfile>& model_profiles();
/// Throws ConfigError(range) for an unknown name.
const ModelSizeProfile& find_profile(std::string_view name);
std::vector<ModelSizeProfile> parse_profile_csv(std::string_view csv);

/// Tabulated size, linearly interpolated between table points (rate 0 is the
/// unpruned model). Throws std::out_of_range outside [0, 0.9].
ModelSize pruned_size(const ModelSizeProfile& profile, double rate);

/// pruned_size, extended past the last table point along the last segment
/// for rates in (0.9, 1), floored at 1% of the base size.
ModelSize extrapolated_size(const ModelSizeProfile& profile, double rate);

}  // namespace unlearn
