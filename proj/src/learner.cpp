// Copyright 2026 The edge-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

#include "unlearn/learner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "unlearn/rng.hpp"

namespace unlearn {

namespace {

// Counter-based standard normal so that any sample can be regenerated
// without replaying a stream.
double normal_at(std::uint64_t key, std::uint64_t k) {
  const double u1 = static_cast<double>((mix_seed(key, 2 * k) >> 11) + 1) * 0x1.0p-53;
  const double u2 = static_cast<double>(mix_seed(key, 2 * k + 1) >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void refresh_parameters(LearnerState& s) {
  s.parameters.assign(s.sums.size(), 0.0);
  for (std::size_t c = 0; c < s.counts.size(); ++c) {
    if (s.counts[c] == 0) continue;
    const auto n = static_cast<double>(s.counts[c]);
    for (std::size_t j = 0; j < s.dim; ++j) s.parameters[c * s.dim + j] = s.sums[c * s.dim + j] / n;
  }
  s.pruned_mask.clear();
}

void require_trainable(const LearnerState& s) {
  if (s.label_space == 0 || s.dim == 0) throw std::invalid_argument("learner state has no label/feature layout");
}

}  // namespace

FeatureSource::FeatureSource(std::uint32_t label_space, std::size_t dim, std::uint64_t seed, double separation)
    : label_space_(label_space), dim_(dim), seed_(seed), means_(std::size_t{label_space} * dim) {
  if (label_space == 0 || dim == 0) throw std::invalid_argument("feature source needs label_space > 0 and dim > 0");
  Rng rng(mix_seed(seed, 0x6d65616e73ULL));
  for (auto& m : means_) m = rng.normal(0.0, separation);
}

std::span<const double> FeatureSource::label_mean(Label label) const {
  if (label >= label_space_) throw std::out_of_range("label outside label space");
  return {means_.data() + std::size_t{label} * dim_, dim_};
}

std::vector<double> FeatureSource::sample_features(const DataChunk& chunk, std::uint64_t index) const {
  Label label = 0;
  std::uint64_t seen = 0;
  bool found = false;
  for (const auto& [l, n] : chunk.label_histogram) {
    if (index < seen + n) {
      label = l;
      found = true;
      break;
    }
    seen += n;
  }
  if (!found) throw std::out_of_range("sample index outside chunk");
  const auto mean = label_mean(label);
  const auto key = mix_seed(seed_, chunk.id);
  std::vector<double> x(dim_);
  for (std::size_t j = 0; j < dim_; ++j) x[j] = mean[j] + normal_at(key, index * dim_ + j);
  return x;
}

std::vector<Sample> FeatureSource::chunk_samples(const DataChunk& chunk, std::uint64_t prefix) const {
  std::vector<Sample> out;
  std::uint64_t i = 0;
  for (const auto& [label, n] : chunk.label_histogram) {
    for (std::uint64_t k = 0; k < n && i < prefix; ++k, ++i) out.push_back({label, sample_features(chunk, i)});
  }
  return out;
}

const ChunkSums& FeatureSource::chunk_sums(const DataChunk& chunk, std::uint64_t prefix) {
  auto& per_chunk = cache_[chunk.id];
  if (auto it = per_chunk.find(prefix); it != per_chunk.end()) return it->second;
  if (prefix > chunk.sample_count) throw std::out_of_range("prefix longer than chunk");

  ChunkSums out;
  const auto key = mix_seed(seed_, chunk.id);
  std::uint64_t i = 0;
  for (const auto& [label, n] : chunk.label_histogram) {
    if (i >= prefix) break;
    const auto mean = label_mean(label);
    out.labels.push_back(label);
    out.counts.push_back(0);
    out.sums.resize(out.sums.size() + dim_, 0.0);
    double* row = out.sums.data() + out.sums.size() - dim_;
    for (std::uint64_t k = 0; k < n && i < prefix; ++k, ++i) {
      for (std::size_t j = 0; j < dim_; ++j) row[j] += mean[j] + normal_at(key, i * dim_ + j);
      ++out.counts.back();
    }
  }
  return per_chunk.emplace(prefix, std::move(out)).first->second;
}

std::vector<Sample> FeatureSource::test_set(std::size_t n, std::uint64_t seed) const {
  Rng rng(mix_seed(seed, 0x74657374ULL));
  std::vector<Sample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto label = static_cast<Label>(rng.uniform_int(0, label_space_ - 1));
    const auto mean = label_mean(label);
    std::vector<double> x(dim_);
    for (std::size_t j = 0; j < dim_; ++j) x[j] = mean[j] + rng.normal();
    out.push_back({label, std::move(x)});
  }
  return out;
}

LearnerState LearnerState::empty(std::uint32_t label_space, std::size_t dim) {
  LearnerState s;
  s.label_space = label_space;
  s.dim = dim;
  s.sums.assign(std::size_t{label_space} * dim, 0.0);
  s.counts.assign(label_space, 0);
  s.parameters.assign(std::size_t{label_space} * dim, 0.0);
  return s;
}

LearnerState LearnerState::from_parameters(std::vector<double> parameters) {
  LearnerState s;
  s.parameters = std::move(parameters);
  return s;
}

std::vector<double> LearnerState::dense_parameters() const {
  std::vector<double> dense(dense_size(), 0.0);
  auto removed = pruned_mask.begin();
  auto kept = parameters.begin();
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (removed != pruned_mask.end() && *removed == i) {
      ++removed;
    } else {
      dense[i] = *kept++;
    }
  }
  return dense;
}

LearnerState train_incremental(LearnerState state, std::span<const TrainingSlice> slices, FeatureSource& features) {
  if (slices.empty()) return state;
  require_trainable(state);
  if (features.dim() != state.dim || features.label_space() != state.label_space) {
    throw std::invalid_argument("feature dimension mismatch");
  }
  for (const auto& slice : slices) {
    const auto& cs = features.chunk_sums(*slice.chunk, slice.prefix);
    for (std::size_t k = 0; k < cs.labels.size(); ++k) {
      const Label c = cs.labels[k];
      if (!slice.labels.contains(c)) continue;
      double* dst = state.sums.data() + std::size_t{c} * state.dim;
      const double* src = cs.sums.data() + k * state.dim;
      for (std::size_t j = 0; j < state.dim; ++j) dst[j] += src[j];
      state.counts[c] += cs.counts[k];
      state.trained_sample_count += cs.counts[k];
    }
  }
  refresh_parameters(state);
  return state;
}

LearnerState train_incremental(LearnerState state, std::span<const Sample> samples) {
  if (samples.empty()) return state;
  require_trainable(state);
  for (const auto& s : samples) {
    if (s.features.size() != state.dim) throw std::invalid_argument("feature dimension mismatch");
    if (s.label >= state.label_space) throw std::invalid_argument("label outside label space");
    double* dst = state.sums.data() + std::size_t{s.label} * state.dim;
    for (std::size_t j = 0; j < state.dim; ++j) dst[j] += s.features[j];
    ++state.counts[s.label];
    ++state.trained_sample_count;
  }
  refresh_parameters(state);
  return state;
}

LearnerState prune_iterative(LearnerState state, double rate, std::size_t steps, std::span<const Sample> retrain) {
  if (!(rate >= 0.0 && rate < 1.0)) throw std::invalid_argument("pruning rate must be in [0, 1)");
  if (steps == 0) throw std::invalid_argument("pruning needs at least one step");
  const std::size_t total = state.dense_size();
  if (total == 0) throw std::invalid_argument("cannot prune an empty parameter vector");
  if (rate == 0.0) return state;

  auto dense = state.dense_parameters();
  std::vector<bool> removed(total, false);
  for (auto i : state.pruned_mask) removed[i] = true;
  std::size_t removed_count = state.pruned_mask.size();

  // Per-label refit targets from the retrain samples.
  std::vector<double> retrain_sums;
  std::vector<std::uint64_t> retrain_counts;
  if (!retrain.empty() && state.label_space > 0) {
    retrain_sums.assign(state.sums.size(), 0.0);
    retrain_counts.assign(state.label_space, 0);
    for (const auto& s : retrain) {
      if (s.features.size() != state.dim || s.label >= state.label_space)
        throw std::invalid_argument("feature dimension mismatch");
      for (std::size_t j = 0; j < state.dim; ++j) retrain_sums[s.label * state.dim + j] += s.features[j];
      ++retrain_counts[s.label];
    }
  }

  std::vector<std::size_t> order(total);
  for (std::size_t k = 1; k <= steps; ++k) {
    const double fraction = rate * static_cast<double>(k) / static_cast<double>(steps);
    const auto target = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(total)));
    if (target > removed_count) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return std::fabs(dense[a]) < std::fabs(dense[b]); });
      for (auto i : order) {
        if (removed_count == target) break;
        if (removed[i]) continue;
        removed[i] = true;
        dense[i] = 0.0;
        ++removed_count;
      }
    }
    if (state.label_space == 0) continue;
    for (std::size_t i = 0; i < total; ++i) {
      if (removed[i]) continue;
      const std::size_t c = i / state.dim;
      if (!retrain_counts.empty() && retrain_counts[c] > 0) {
        dense[i] = retrain_sums[i] / static_cast<double>(retrain_counts[c]);
      } else if (state.counts[c] > 0) {
        dense[i] = state.sums[i] / static_cast<double>(state.counts[c]);
      }
    }
  }

  state.parameters.clear();
  state.pruned_mask.clear();
  for (std::size_t i = 0; i < total; ++i) {
    if (removed[i]) {
      state.pruned_mask.push_back(i);
    } else {
      state.parameters.push_back(dense[i]);
    }
  }
  return state;
}

LearnerState prune_oneshot(LearnerState state, double rate, std::span<const Sample> retrain) {
  return prune_iterative(std::move(state), rate, 1, retrain);
}

LearnerState restore_dense(LearnerState state) {
  if (state.label_space == 0) return state;
  refresh_parameters(state);
  return state;
}

Label predict(const LearnerState& state, std::span<const double> features) {
  require_trainable(state);
  if (features.size() != state.dim) throw std::invalid_argument("feature dimension mismatch");
  const auto dense = state.dense_parameters();
  const bool any_seen = std::any_of(state.counts.begin(), state.counts.end(), [](auto n) { return n > 0; });
  Label best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Label c = 0; c < state.label_space; ++c) {
    if (any_seen && state.counts[c] == 0) continue;
    double d = 0.0;
    for (std::size_t j = 0; j < state.dim; ++j) {
      const double diff = features[j] - dense[c * state.dim + j];
      d += diff * diff;
    }
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

Label majority_vote(std::span<const Label> votes) {
  if (votes.empty()) throw std::invalid_argument("majority vote over an empty ensemble");
  std::vector<Label> sorted(votes.begin(), votes.end());
  std::sort(sorted.begin(), sorted.end());
  Label best = sorted.front();
  std::size_t best_n = 0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    if (j - i > best_n) {
      best_n = j - i;
      best = sorted[i];
    }
    i = j;
  }
  return best;
}

double ensemble_accuracy(std::span<const LearnerState* const> ensemble, std::span<const Sample> test) {
  if (ensemble.empty()) throw std::invalid_argument("accuracy of an empty ensemble");
  if (test.empty()) throw std::invalid_argument("accuracy on an empty test set");
  std::size_t correct = 0;
  std::vector<Label> votes(ensemble.size());
  for (const auto& s : test) {
    for (std::size_t m = 0; m < ensemble.size(); ++m) votes[m] = predict(*ensemble[m], s.features);
    if (majority_vote(votes) == s.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

double energy_of(const EnergyModel& model, std::uint64_t rsn) {
  return model.joules_per_sample * static_cast<double>(rsn) + model.fixed_overhead;
}

}  // namespace unlearn
