// Copyright 2026 The edge-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line driver: run, compare, sweep, trace, dump-workload,
// show-config and verify-figure8.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "unlearn/config.hpp"
#include "unlearn/engine.hpp"
#include "unlearn/memory.hpp"
#include "unlearn/report.hpp"
#include "unlearn/workload.hpp"

namespace fs = std::filesystem;
using namespace unlearn;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitGolden = 3;
constexpr int kExitInvariant = 4;
constexpr int kExitMissingFile = 5;
constexpr int kExitUnknownKey = 6;
constexpr int kExitSyntax = 7;

int exit_code(const ConfigError& e) {
  switch (e.kind()) {
    case ConfigError::Kind::range: return kExitConfig;
    case ConfigError::Kind::missing_file: return kExitMissingFile;
    case ConfigError::Kind::unknown_key: return kExitUnknownKey;
    case ConfigError::Kind::syntax: return kExitSyntax;
  }
  return kExitConfig;
}

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::vector<std::string> sets;
  std::string workload_path;
};

void add_common(CLI::App* cmd, Common& c, bool with_out = true) {
  cmd->add_option("-c,--config", c.config_path, "Scenario file (key = value lines)");
  cmd->add_option("--seed", c.seed, "Override the scenario seed")->envname("UNLEARN_SEED");
  if (with_out) cmd->add_option("-o,--out", c.out_dir, "Output directory")->envname("UNLEARN_OUT_DIR");
  cmd->add_option("--set", c.sets, "Override one key, e.g. --set shards=8 (repeatable)");
  cmd->add_option("--workload", c.workload_path, "Replay a dumped workload instead of generating one");
}

ScenarioConfig load(const Common& c) {
  ScenarioConfig cfg = c.config_path.empty() ? ScenarioConfig{} : parse_config(c.config_path);
  for (const auto& kv : c.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError(ConfigError::Kind::syntax, "--set expects key=value, got '" + kv + "'");
    apply_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (c.seed) cfg.workload.seed = cfg.engine.seed = *c.seed;
  if (!c.out_dir.empty()) cfg.output_dir = c.out_dir;
  validate(cfg);
  return cfg;
}

Workload load_workload(const Common& c, const ScenarioConfig& cfg) {
  if (c.workload_path.empty()) return generate_workload(cfg.workload);
  std::ifstream in(c.workload_path);
  if (!in) throw ConfigError(ConfigError::Kind::missing_file, "cannot read workload '" + c.workload_path + "'");
  return read_workload_jsonl(in);
}

fs::path prepare_out(const ScenarioConfig& cfg) {
  fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
}

void print_totals(std::span<const MetricsRecord> records, const std::vector<std::string>& tags) {
  std::cout << "variant          rsn_cum   energy_j  final_accuracy\n";
  for (const auto& tag : tags) {
    double energy = 0.0;
    const MetricsRecord* last = nullptr;
    for (const auto& r : records) {
      if (r.variant != tag) continue;
      energy += r.energy_joules;
      last = &r;
    }
    if (!last) continue;
    std::string acc = last->accuracy ? format_real(*last->accuracy) : "-";
    std::cout << tag << std::string(tag.size() < 14 ? 14 - tag.size() : 1, ' ') << ' ' << last->rsn_cumulative << "  "
              << format_real(energy) << "  " << acc << '\n';
  }
}

int cmd_scenario(const Common& c, const std::vector<std::string>& only, const std::string& csv_name) {
  ScenarioConfig cfg = load(c);
  if (!only.empty()) cfg.variants = only;
  validate(cfg);
  const Workload wl = load_workload(c, cfg);
  const auto variants = cfg.system_variants();
  const auto records = run_scenario(cfg.engine, wl, variants);
  const auto dir = prepare_out(cfg);
  std::ostringstream csv;
  write_metrics_csv(csv, records);
  write_file(dir / csv_name, csv.str());
  write_file(dir / "summary.json", summary_json(cfg, records));
  print_totals(records, cfg.variants);
  std::cout << "wrote " << (dir / csv_name).string() << '\n';
  return kExitOk;
}

int cmd_sweep(const Common& c, const std::string& param, const std::vector<std::string>& values) {
  const ScenarioConfig base = load(c);
  std::ostringstream csv;
  csv << "param,value,variant,rsn_cum,energy_j,final_accuracy\n";
  for (const auto& value : values) {
    ScenarioConfig cfg = base;
    apply_config_value(cfg, param, value);
    validate(cfg);
    const Workload wl = load_workload(c, cfg);
    const auto records = run_scenario(cfg.engine, wl, cfg.system_variants());
    for (const auto& tag : cfg.variants) {
      double energy = 0.0;
      const MetricsRecord* last = nullptr;
      for (const auto& r : records) {
        if (r.variant != tag) continue;
        energy += r.energy_joules;
        last = &r;
      }
      csv << param << ',' << value << ',' << tag << ',' << last->rsn_cumulative << ',' << format_real(energy) << ','
          << (last->accuracy ? format_real(*last->accuracy) : std::string()) << '\n';
    }
  }
  const auto dir = prepare_out(base);
  const auto path = dir / ("sweep_" + param + ".csv");
  write_file(path, csv.str());
  std::cout << csv.str() << "wrote " << path.string() << '\n';
  return kExitOk;
}

int cmd_trace(const Common& c, const std::string& tag) {
  ScenarioConfig cfg = load(c);
  const Workload wl = load_workload(c, cfg);
  Simulation sim(cfg.engine, make_variant(tag, cfg.engine.prune_rate, cfg.prune_mode), wl.config.label_space);
  for (const auto& ev : wl.rounds) sim.step(ev);

  const auto dir = prepare_out(cfg);
  std::ostringstream repl;
  for (const auto& ev : sim.replacement_trace()) repl << to_json_line(ev) << '\n';
  write_file(dir / ("replacements_" + tag + ".jsonl"), repl.str());
  std::ostringstream part;
  for (const auto& a : sim.partition_trace()) part << to_json_line(a) << '\n';
  write_file(dir / ("partitions_" + tag + ".jsonl"), part.str());
  std::ostringstream unl;
  for (const auto& o : sim.unlearn_trace()) {
    for (const auto& ep : o.episodes) {
      unl << "{\"request\":" << o.request << ",\"lineage\":\"" << ep.lineage.str() << "\",\"start\":"
          << (ep.start ? std::to_string(*ep.start) : "null") << ",\"start_items\":" << ep.start_items
          << ",\"rsn\":" << ep.rsn << ",\"erased\":" << ep.erased.size() << ",\"stored\":"
          << (ep.stored ? std::to_string(*ep.stored) : "null") << "}\n";
    }
  }
  write_file(dir / ("unlearning_" + tag + ".jsonl"), unl.str());
  std::cout << sim.replacement_trace().size() << " store events, " << sim.partition_trace().size() << " partitions, "
            << sim.unlearn_trace().size() << " requests traced to " << dir.string() << '\n';
  return kExitOk;
}

int cmd_dump_workload(const Common& c, const std::string& path) {
  const ScenarioConfig cfg = load(c);
  const Workload wl = generate_workload(cfg.workload);
  if (path.empty() || path == "-") {
    write_workload_jsonl(std::cout, wl);
  } else {
    if (const auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    write_workload_jsonl(out, wl);
  }
  return kExitOk;
}

int cmd_verify_figure8() {
  const std::vector<CheckpointId> victims = {1, 2, 4, 7, 11, 13};
  const std::vector<CheckpointId> stored = {3, 5, 6, 8, 9, 10, 12, 14};
  const auto trace = simulate_insertions(ReplacementPolicy::fibor, 8, 14);
  auto list = [](const std::vector<CheckpointId>& ids) {
    std::string s;
    for (auto id : ids) s += (s.empty() ? "" : ",") + std::to_string(id);
    return "{" + s + "}";
  };
  std::cout << "evicted " << list(trace.evicted) << "\nstored " << list(trace.final_resident) << '\n';
  if (trace.evicted != victims || trace.final_resident != stored) {
    std::cout << "MISMATCH: expected evicted " << list(victims) << " stored " << list(stored) << '\n';
    return kExitGolden;
  }
  std::cout << "golden trace matches\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resource-constrained exact unlearning simulator"};
  app.footer(
      "Environment: UNLEARN_SEED overrides the scenario seed, UNLEARN_OUT_DIR the output directory.\n"
      "Exit codes: 0 ok, 2 config range error, 3 golden-trace mismatch, 4 engine invariant or\n"
      "bad request stream, 5 missing file, 6 unknown config key, 7 config syntax error.");
  app.require_subcommand(1);

  Common common;
  std::string variant = "cause";
  std::vector<std::string> variants;
  std::string sweep_param;
  std::vector<std::string> sweep_values;
  std::string dump_path;

  auto* run = app.add_subcommand("run", "Run one variant and write metrics.csv");
  add_common(run, common);
  run->add_option("--variant", variant, "Variant tag")->capture_default_str();

  auto* compare = app.add_subcommand("compare", "Run the configured variants on one workload");
  add_common(compare, common);
  compare->add_option("--variants", variants, "Override the variant list")->delimiter(',');

  auto* sweep = app.add_subcommand("sweep", "Final totals per variant over a list of values of one key");
  add_common(sweep, common);
  sweep->add_option("--param", sweep_param, "Key to vary, e.g. capacity or unlearn_probability")->required();
  sweep->add_option("--values", sweep_values, "Comma-separated values")->delimiter(',')->required();

  auto* trace = app.add_subcommand("trace", "Dump store, partition and unlearning traces of one variant");
  add_common(trace, common);
  trace->add_option("--variant", variant, "Variant tag")->capture_default_str();

  auto* dump = app.add_subcommand("dump-workload", "Write the generated workload as JSON lines");
  add_common(dump, common, false);
  dump->add_option("-o,--out", dump_path, "Output file, '-' for stdout");

  auto* show = app.add_subcommand("show-config", "Print the fully resolved configuration");
  add_common(show, common, false);

  app.add_subcommand("verify-figure8", "Check the golden FiboR trace at capacity 8");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (app.got_subcommand("verify-figure8")) return cmd_verify_figure8();
    if (*run) return cmd_scenario(common, {variant}, "metrics.csv");
    if (*compare) return cmd_scenario(common, variants, "compare.csv");
    if (*sweep) return cmd_sweep(common, sweep_param, sweep_values);
    if (*trace) return cmd_trace(common, variant);
    if (*dump) return cmd_dump_workload(common, dump_path);
    if (*show) {
      std::cout << emit_config(load(common));
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_code(e);
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const UnlearningRequestError& e) {
    std::cerr << "bad unlearning request: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitOk;
}
