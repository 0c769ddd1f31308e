// Copyright 2026 The edge-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

#include "unlearn/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace unlearn {

namespace {

using Kind = ConfigError::Kind;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void syntax(std::string_view key, std::string_view value, std::string_view expected) {
  throw ConfigError(Kind::syntax,
                    std::string(key) + ": expected " + std::string(expected) + ", got '" + std::string(value) + "'");
}

template <class T>
T parse_uint(std::string_view key, std::string_view v) {
  T out{};
  auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || end != v.data() + v.size()) syntax(key, v, "a non-negative integer");
  return out;
}

double parse_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || end != v.data() + v.size() || !std::isfinite(out)) {
    syntax(key, v, "a number");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true") return true;
  if (v == "false") return false;
  syntax(key, v, "true or false");
}

std::string fmt(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string quote(std::string_view s) { return "\"" + std::string(s) + "\""; }

std::vector<std::string> split_list(std::string_view v) {
  std::vector<std::string> out;
  while (true) {
    const auto comma = v.find(',');
    const auto item = trim(v.substr(0, comma));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

// Strips a trailing comment and surrounding quotes from a raw value.
std::string unquote_value(std::string_view key, std::string_view raw) {
  raw = trim(raw);
  if (!raw.empty() && raw.front() == '"') {
    const auto close = raw.find('"', 1);
    if (close == std::string_view::npos) syntax(key, raw, "a closing quote");
    const auto rest = trim(raw.substr(close + 1));
    if (!rest.empty() && rest.front() != '#') syntax(key, raw, "nothing after the closing quote");
    return std::string(raw.substr(1, close - 1));
  }
  const auto hash = raw.find('#');
  return std::string(trim(raw.substr(0, hash)));
}

}  // namespace

std::vector<SystemVariant> ScenarioConfig::system_variants() const {
  std::vector<SystemVariant> out;
  for (const auto& tag : variants) out.push_back(make_variant(tag, engine.prune_rate, prune_mode));
  return out;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "seed",        "rounds",          "users",       "unlearn_probability", "partial_delete_probability",
      "label_space", "chunk_min",       "chunk_max",   "labels_min",          "labels_max",
      "activity_probability", "shards", "sc_gamma",    "sc_p",                "capacity",
      "model_profile", "prune_mode",    "prune_rate",  "prune_steps",         "energy_a",
      "energy_b",    "feature_dim",     "test_samples", "evaluate_accuracy",  "variants",
      "output_dir"};
  return keys;
}

void apply_config_value(ScenarioConfig& c, std::string_view key, std::string_view v) {
  auto& w = c.workload;
  auto& e = c.engine;
  if (key == "seed") {
    w.seed = e.seed = parse_uint<std::uint64_t>(key, v);
  } else if (key == "rounds") {
    w.n_rounds = parse_uint<std::uint32_t>(key, v);
  } else if (key == "users") {
    w.n_users = parse_uint<std::uint32_t>(key, v);
  } else if (key == "unlearn_probability") {
    w.unlearn_probability = parse_double(key, v);
  } else if (key == "partial_delete_probability") {
    w.partial_delete_probability = parse_double(key, v);
  } else if (key == "label_space") {
    w.label_space = parse_uint<std::uint32_t>(key, v);
  } else if (key == "chunk_min") {
    w.chunk_min = parse_uint<std::uint64_t>(key, v);
  } else if (key == "chunk_max") {
    w.chunk_max = parse_uint<std::uint64_t>(key, v);
  } else if (key == "labels_min") {
    w.labels_min = parse_uint<std::uint32_t>(key, v);
  } else if (key == "labels_max") {
    w.labels_max = parse_uint<std::uint32_t>(key, v);
  } else if (key == "activity_probability") {
    w.activity_probability = parse_double(key, v);
  } else if (key == "shards") {
    e.shards = parse_uint<std::size_t>(key, v);
  } else if (key == "sc_gamma") {
    e.sc_gamma = parse_double(key, v);
  } else if (key == "sc_p") {
    e.sc_p = parse_double(key, v);
  } else if (key == "capacity") {
    e.capacity = parse_capacity(v);
  } else if (key == "model_profile") {
    e.model_profile = std::string(v);
  } else if (key == "prune_mode") {
    c.prune_mode = parse_pruning_mode(v);
  } else if (key == "prune_rate") {
    e.prune_rate = parse_double(key, v);
  } else if (key == "prune_steps") {
    e.prune_steps = parse_uint<std::size_t>(key, v);
  } else if (key == "energy_a") {
    e.energy.joules_per_sample = parse_double(key, v);
  } else if (key == "energy_b") {
    e.energy.fixed_overhead = parse_double(key, v);
  } else if (key == "feature_dim") {
    e.feature_dim = parse_uint<std::size_t>(key, v);
  } else if (key == "test_samples") {
    e.test_samples = parse_uint<std::size_t>(key, v);
  } else if (key == "evaluate_accuracy") {
    e.evaluate_accuracy = parse_bool(key, v);
  } else if (key == "variants") {
    c.variants = split_list(v);
  } else if (key == "output_dir") {
    c.output_dir = std::string(v);
  } else {
    throw ConfigError(Kind::unknown_key, "unknown key '" + std::string(key) + "'");
  }
}

void validate(const ScenarioConfig& c) {
  validate(c.workload);
  validate(c.engine);
  if (c.workload.seed != c.engine.seed) throw ConfigError(Kind::range, "workload and engine seeds differ");
  if (c.variants.empty()) throw ConfigError(Kind::range, "variants must not be empty");
  std::set<std::string> seen;
  for (const auto& v : c.variants) {
    make_variant(v);
    if (!seen.insert(v).second) throw ConfigError(Kind::range, "variant '" + v + "' listed twice");
  }
  if (c.output_dir.empty()) throw ConfigError(Kind::range, "output_dir must not be empty");
}

ScenarioConfig parse_config_text(std::string_view text) {
  ScenarioConfig c;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const auto line = trim(text.substr(0, nl));
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(Kind::syntax, "line " + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(Kind::syntax, "line " + std::to_string(line_no) + ": empty key");
    if (!seen.insert(std::string(key)).second) {
      throw ConfigError(Kind::syntax, "line " + std::to_string(line_no) + ": repeated key '" + std::string(key) + "'");
    }
    apply_config_value(c, key, unquote_value(key, line.substr(eq + 1)));
  }
  validate(c);
  return c;
}

ScenarioConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(Kind::missing_file, "cannot read config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string emit_config(const ScenarioConfig& c) {
  const auto& w = c.workload;
  const auto& e = c.engine;
  std::string variants;
  for (const auto& v : c.variants) variants += (variants.empty() ? "" : ",") + v;
  std::ostringstream os;
  os << "seed = " << w.seed << "\n"
     << "rounds = " << w.n_rounds << "\n"
     << "users = " << w.n_users << "\n"
     << "unlearn_probability = " << fmt(w.unlearn_probability) << "\n"
     << "partial_delete_probability = " << fmt(w.partial_delete_probability) << "\n"
     << "label_space = " << w.label_space << "\n"
     << "chunk_min = " << w.chunk_min << "\n"
     << "chunk_max = " << w.chunk_max << "\n"
     << "labels_min = " << w.labels_min << "\n"
     << "labels_max = " << w.labels_max << "\n"
     << "activity_probability = " << fmt(w.activity_probability) << "\n"
     << "shards = " << e.shards << "\n"
     << "sc_gamma = " << fmt(e.sc_gamma) << "\n"
     << "sc_p = " << fmt(e.sc_p) << "\n"
     << "capacity = " << quote(to_string(e.capacity)) << "\n"
     << "model_profile = " << quote(e.model_profile) << "\n"
     << "prune_mode = " << quote(to_string(c.prune_mode)) << "\n"
     << "prune_rate = " << fmt(e.prune_rate) << "\n"
     << "prune_steps = " << e.prune_steps << "\n"
     << "energy_a = " << fmt(e.energy.joules_per_sample) << "\n"
     << "energy_b = " << fmt(e.energy.fixed_overhead) << "\n"
     << "feature_dim = " << e.feature_dim << "\n"
     << "test_samples = " << e.test_samples << "\n"
     << "evaluate_accuracy = " << (e.evaluate_accuracy ? "true" : "false") << "\n"
     << "variants = " << quote(variants) << "\n"
     << "output_dir = " << quote(c.output_dir) << "\n";
  return os.str();
}

}  // namespace unlearn
