// Copyright 2026 The edge-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

#include "unlearn/types.hpp"

#include <algorithm>
#include <cmath>

namespace unlearn {

std::map<Label, std::uint64_t> histogram_prefix(const DataChunk& chunk, std::uint64_t prefix) {
  std::map<Label, std::uint64_t> out;
  for (const auto& [label, count] : chunk.label_histogram) {
    if (prefix == 0) break;
    const auto take = std::min(count, prefix);
    out[label] = take;
    prefix -= take;
  }
  return out;
}

void validate_chunk(const DataChunk& chunk) {
  std::uint64_t total = 0;
  for (const auto& [label, count] : chunk.label_histogram) {
    if (count == 0) throw std::invalid_argument("chunk " + std::to_string(chunk.id) + ": zero-count label");
    total += count;
  }
  if (total != chunk.sample_count || total == 0) {
    throw std::invalid_argument("chunk " + std::to_string(chunk.id) + ": histogram does not sum to sample_count");
  }
}

std::uint64_t samples_removed(std::uint64_t n, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw std::invalid_argument("sample_fraction must be in (0, 1]");
  if (fraction == 1.0) return n;
  auto k = static_cast<std::uint64_t>(std::floor(fraction * static_cast<double>(n) + 0.5));
  return std::clamp<std::uint64_t>(k, 1, n);
}

std::uint64_t slice_samples(const DataChunk& chunk, std::uint64_t prefix, LabelRange range) {
  std::uint64_t total = 0;
  for (const auto& [label, count] : histogram_prefix(chunk, prefix)) {
    if (range.contains(label)) total += count;
  }
  return total;
}

}  // namespace unlearn
