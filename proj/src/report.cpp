// Copyright 2026 The edge-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

#include "unlearn/report.hpp"

#include <charconv>
#include <map>
#include <ostream>

#include <json.hpp>

namespace unlearn {

std::string format_real(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

void write_metrics_csv(std::ostream& os, std::span<const MetricsRecord> records) {
  os << kMetricsHeader << '\n';
  for (const auto& r : records) {
    os << r.round << ',' << r.variant << ',' << r.rsn_round << ',' << r.rsn_cumulative << ','
       << format_real(r.retrain_ratio) << ',' << format_real(r.energy_joules) << ',' << r.occupancy << ','
       << r.replacements << ',' << r.drops << ',' << (r.accuracy ? format_real(*r.accuracy) : std::string()) << '\n';
  }
}

std::string summary_json(const ScenarioConfig& config, std::span<const MetricsRecord> records) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json echo;
  std::string text = emit_config(config);
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string line = text.substr(pos, nl - pos);
    pos = nl + 1;
    const auto eq = line.find(" = ");
    std::string value = line.substr(eq + 3);
    if (value.size() >= 2 && value.front() == '"') value = value.substr(1, value.size() - 2);
    echo[line.substr(0, eq)] = value;
  }
  j["config"] = echo;

  nlohmann::ordered_json totals = nlohmann::ordered_json::object();
  for (const auto& tag : config.variants) {
    nlohmann::ordered_json t;
    std::uint64_t rsn = 0;
    double energy = 0.0;
    std::size_t replacements = 0;
    std::size_t drops = 0;
    std::size_t rounds = 0;
    const MetricsRecord* last = nullptr;
    for (const auto& r : records) {
      if (r.variant != tag) continue;
      rsn = r.rsn_cumulative;
      energy += r.energy_joules;
      replacements += r.replacements;
      drops += r.drops;
      ++rounds;
      last = &r;
    }
    if (!last) continue;
    t["rounds"] = rounds;
    t["rsn_cumulative"] = rsn;
    t["energy_j"] = energy;
    t["replacements"] = replacements;
    t["drops"] = drops;
    t["final_occupancy"] = last->occupancy;
    t["final_accuracy"] = last->accuracy ? nlohmann::ordered_json(*last->accuracy) : nlohmann::ordered_json(nullptr);
    totals[tag] = t;
  }
  j["totals"] = totals;
  return j.dump(2) + "\n";
}

}  // namespace unlearn
