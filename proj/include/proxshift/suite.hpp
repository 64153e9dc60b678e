#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "proxshift/report.hpp"

namespace proxshift {

/// Raised for unreadable or inconsistent configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string base = "full2";       // full<q>, golden, or file:<path>
  TowerMode mode = TowerMode::strict;
  std::int64_t eps_num = 1;         // eps_k = eps_num / eps_base^(k + eps_offset)
  std::int64_t eps_base = 2;
  int eps_offset = 3;
  std::string eps_list;             // comma-separated; replaces the geometric schedule
  std::string toy_levels;           // JSON level file for toy mode
  int level = 1;                    // analysis level K
  int tower_depth = 2;              // top level built; at least K + 1
  std::uint64_t seed = 1;
  int roots = 2;
  int decode_trials = 4;
  int pair_trials = 4;
  int mprime_trials = 8;
  double delta = 2.0;
  Index entropy_n = 20;
  std::string report_json;
  std::string report_csv;
};

/// Key-value text: one `key = value` per line, `#` starts a comment.
/// Unknown keys and malformed values raise ConfigError.
ExperimentConfig parse_config(const std::string& text);
/// Relative toy_levels and file: base paths resolve against the config's
/// directory.
ExperimentConfig load_config(const std::string& path);
Json to_json(const ExperimentConfig& config);

enum ExitCode : int { kExitOk = 0, kExitAssertion = 1, kExitConfig = 2 };

struct SuiteResult {
  int exit_code = kExitOk;
  Json report;       // includes a "timestamp" field, the only nondeterministic part
  std::string csv;   // per-block separation rows
  std::string diagnostic;
};

/// Runs the whole pipeline: partition verification, tower build, sampled
/// points, decode round trips, pair analysis, m' and orbit windows, entropy.
/// Never throws; configuration problems come back as kExitConfig.
SuiteResult run_suite(const ExperimentConfig& config);

/// Writes the report and CSV to the configured paths, when set.
void write_reports(const ExperimentConfig& config, const SuiteResult& result);

}  // namespace proxshift
