// Copyright 2026 The edge-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

#include "unlearn/controller.hpp"

#include <algorithm>
#include <cmath>

#include "unlearn/types.hpp"

namespace unlearn {

void validate(const ShardControllerConfig& c) {
  if (c.base_shards < 1) throw ConfigError(ConfigError::Kind::range, "shards must be at least 1");
  if (!(c.floor_fraction >= 0.0 && c.floor_fraction <= 1.0))
    throw ConfigError(ConfigError::Kind::range, "sc_gamma must be in [0, 1]");
  if (!(c.decay_rate >= 0.0) || !std::isfinite(c.decay_rate))
    throw ConfigError(ConfigError::Kind::range, "sc_p must be a finite non-negative number");
}

double shards_real(const ShardControllerConfig& c, double round) {
  const auto s = static_cast<double>(c.base_shards);
  return c.floor_fraction * s + (1.0 - c.floor_fraction) * s * std::exp(-c.decay_rate * round);
}

std::size_t shards_at(const ShardControllerConfig& c, std::uint32_t round) {
  const double rounded = std::round(shards_real(c, static_cast<double>(round)));
  return std::max<std::size_t>(1, static_cast<std::size_t>(rounded));
}

}  // namespace unlearn
