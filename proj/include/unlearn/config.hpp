// Copyright 2026 The edge-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "unlearn/engine.hpp"
#include "unlearn/workload.hpp"

namespace unlearn {

/// Everything a run needs. `seed` drives both the workload and the engine.
struct ScenarioConfig {
  WorkloadConfig workload;
  EngineConfig engine;
  PruningMode prune_mode = PruningMode::iterative;
  std::vector<std::string> variants = {"cause", "sisa", "arcane", "omp70", "omp95"};
  std::string output_dir = "out";

  bool operator==(const ScenarioConfig&) const = default;

  std::vector<SystemVariant> system_variants() const;
};

/// Throws ConfigError(range) on the first invalid field.
void validate(const ScenarioConfig& config);

/// Flat `key = value` text. `#` starts a comment outside quotes; values may
/// be double-quoted. Unknown or repeated keys are rejected.
ScenarioConfig parse_config_text(std::string_view text);

/// Throws ConfigError(missing_file) if `path` cannot be read.
ScenarioConfig parse_config(const std::filesystem::path& path);

/// Text that parse_config_text maps back to `config`.
std::string emit_config(const ScenarioConfig& config);

/// Recognized keys in emit order.
const std::vector<std::string>& config_keys();

/// Sets one key from its textual value; shared by the file parser and the
/// command line.
void apply_config_value(ScenarioConfig& config, std::string_view key, std::string_view value);

}  // namespace unlearn
