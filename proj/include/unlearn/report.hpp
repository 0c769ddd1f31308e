// Copyright 2026 The edge-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "unlearn/config.hpp"
#include "unlearn/engine.hpp"

namespace unlearn {

inline constexpr const char* kMetricsHeader =
    "round,variant,rsn_round,rsn_cum,retrain_ratio,energy_j,occupancy,replacements,drops,accuracy";

/// One row per record in the given order. Reals use the shortest round-trip
/// form; a missing accuracy is an empty field.
void write_metrics_csv(std::ostream& os, std::span<const MetricsRecord> records);

/// Config echo plus per-variant totals, pretty-printed JSON.
std::string summary_json(const ScenarioConfig& config, std::span<const MetricsRecord> records);

/// Shortest decimal form that parses back to `v`.
std::string format_real(double v);

}  // namespace unlearn
