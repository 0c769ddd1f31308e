// Copyright 2026 The edge-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace unlearn {

using UserId = std::uint32_t;
using ChunkId = std::uint64_t;
using RequestId = std::uint64_t;
using CheckpointId = std::uint64_t;
using Round = std::uint32_t;
using Label = std::uint32_t;

/// Atomic unit of user-contributed training data. Samples are ordered by
/// expanding the histogram in ascending label order; sample i of a chunk is
/// therefore a fixed (label, index) pair, which is what fractional deletion
/// and feature synthesis key on.
struct DataChunk {
  ChunkId id = 0;
  UserId owner = 0;
  Round round = 0;
  std::uint64_t sample_count = 0;
  std::map<Label, std::uint64_t> label_histogram;

  bool operator==(const DataChunk&) const = default;
};

/// Histogram of the first `prefix` samples of `chunk`.
std::map<Label, std::uint64_t> histogram_prefix(const DataChunk& chunk, std::uint64_t prefix);

/// Throws std::invalid_argument when the histogram and sample_count disagree.
void validate_chunk(const DataChunk& chunk);

enum class RequestKind { add, remove };

struct UpdateRequest {
  RequestId id = 0;
  RequestKind kind = RequestKind::remove;
  UserId owner = 0;
  std::vector<ChunkId> chunk_refs;
  // Fraction of each referenced chunk's samples to unlearn, in (0, 1].
  double sample_fraction = 1.0;
  Round arrival_round = 0;

  bool operator==(const UpdateRequest&) const = default;
};

/// Number of samples removed from a chunk of `n` samples by a request with
/// the given fraction: round-half-up of fraction * n, clamped to [1, n].
std::uint64_t samples_removed(std::uint64_t n, double fraction);

/// Inclusive label range; a whole chunk uses [0, max].
struct LabelRange {
  Label lo = 0;
  Label hi = ~Label{0};

  bool contains(Label l) const { return l >= lo && l <= hi; }
  bool operator==(const LabelRange&) const = default;
};

/// Samples of the first `prefix` chunk samples whose label is in `range`.
std::uint64_t slice_samples(const DataChunk& chunk, std::uint64_t prefix, LabelRange range);

class ConfigError : public std::runtime_error {
 public:
  enum class Kind { range, missing_file, unknown_key, syntax };
  ConfigError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// A request references a chunk that was never learned or is already
/// unlearned. Indicates a broken workload stream.
class UnlearningRequestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace unlearn
