// Copyright 2026 The edge-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "model_sizes_data.hpp"
#include "unlearn/learner.hpp"

namespace unlearn {

namespace {

double to_double(const std::string& s) {
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("profile table: bad number '" + s + "'");
  return v;
}

ModelSizeProfile toy_profile() {
  ModelSizeProfile p{"toy", "synthetic", 1.0, 1.0, 0.0, {}};
  for (double r : {0.1, 0.3, 0.5, 0.7, 0.9}) p.curve.push_back({r, 1.0 - r, 1.0 - r, 0.0, "0"});
  return p;
}

ModelSize lerp(double r0, ModelSize a, double r1, ModelSize b, double r) {
  const double w = (r - r0) / (r1 - r0);
  return {a.params_m + w * (b.params_m - a.params_m), a.file_mb + w * (b.file_mb - a.file_mb)};
}

}  // namespace

std::vector<ModelSizeProfile> parse_profile_csv(std::string_view csv) {
  std::vector<ModelSizeProfile> out;
  std::istringstream in{std::string(csv)};
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    if (cells.size() != 14) throw std::invalid_argument("profile table: expected 14 columns");
    if (out.empty() || out.back().name != cells[0]) {
      out.push_back({cells[0], cells[1], to_double(cells[6]), to_double(cells[9]), to_double(cells[3]), {}});
    }
    out.back().curve.push_back(
        {to_double(cells[2]) / 100.0, to_double(cells[7]), to_double(cells[10]), to_double(cells[4]), cells[5]});
  }
  for (auto& p : out) {
    std::sort(p.curve.begin(), p.curve.end(), [](const auto& a, const auto& b) { return a.rate < b.rate; });
  }
  return out;
}

const std::vector<ModelSizeProfile>& model_profiles() {
  static const std::vector<ModelSizeProfile> profiles = [] {
    auto v = parse_profile_csv(detail::kModelSizesCsv);
    v.push_back(toy_profile());
    return v;
  }();
  return profiles;
}

const ModelSizeProfile& find_profile(std::string_view name) {
  for (const auto& p : model_profiles()) {
    if (p.name == name) return p;
  }
  throw ConfigError(ConfigError::Kind::range, "unknown model_profile '" + std::string(name) + "'");
}

ModelSize pruned_size(const ModelSizeProfile& profile, double rate) {
  constexpr double kEps = 1e-9;
  if (!(rate >= 0.0 && rate <= 0.9 + kEps)) throw std::out_of_range("pruning rate outside the tabulated [0, 0.9]");
  if (rate < kEps) return {profile.base_params_m, profile.base_file_mb};
  double prev_rate = 0.0;
  ModelSize prev{profile.base_params_m, profile.base_file_mb};
  for (const auto& pt : profile.curve) {
    const ModelSize here{pt.params_m, pt.file_mb};
    if (std::fabs(pt.rate - rate) < kEps) return here;
    if (rate < pt.rate) return lerp(prev_rate, prev, pt.rate, here, rate);
    prev_rate = pt.rate;
    prev = here;
  }
  return prev;
}

ModelSize extrapolated_size(const ModelSizeProfile& profile, double rate) {
  if (!(rate >= 0.0 && rate < 1.0)) throw std::out_of_range("pruning rate must be in [0, 1)");
  if (rate <= 0.9 || profile.curve.size() < 2) return pruned_size(profile, std::min(rate, 0.9));
  const auto& a = profile.curve[profile.curve.size() - 2];
  const auto& b = profile.curve.back();
  auto s = lerp(a.rate, {a.params_m, a.file_mb}, b.rate, {b.params_m, b.file_mb}, rate);
  s.params_m = std::max(s.params_m, 0.01 * profile.base_params_m);
  s.file_mb = std::max(s.file_mb, 0.01 * profile.base_file_mb);
  return s;
}

}  // namespace unlearn
