#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"

// The experiment runner: named desk-scale studies wired to config files,
// CSV outputs and replayable JSON manifests. Every experiment carries a
// built-in check; the runner's status maps onto the CLI exit-code contract
// (0 pass, 2 config error, 3 assertion failure, 4 non-convergence).

namespace kgop::exp {

struct Config {
  // section -> key -> value, flat text format with [section] headers
  std::map<std::string, std::map<std::string, std::string>> sections;

  bool has(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  long get_long(const std::string& section, const std::string& key, long fallback) const;
  std::vector<long> get_ladder(const std::string& section, const std::string& key,
                               const std::string& fallback) const;
  void set(const std::string& section, const std::string& key, const std::string& value);
};

Config default_config();
Config parse_config_text(const std::string& text);
Config load_config(const std::string& path);  // .json manifests replay their stored config
std::string render_config(const Config& cfg);

struct Validation {
  bool ok = true;
  std::vector<std::string> violations;  // "section.key: message"
};
Validation validate_config(const Config& cfg);

enum class Status : int { ok = 0, config_error = 2, assertion_failure = 3, non_convergence = 4 };

struct ExperimentResult {
  Status status = Status::ok;
  std::string message;
  std::vector<std::string> outputs;  // files written, relative to out_dir
  nlohmann::json metrics;
};

const std::vector<std::string>& experiment_names();

// runs one experiment: writes CSVs and a manifest.json into out_dir
ExperimentResult run_experiment(const std::string& name, const Config& cfg, const std::string& out_dir);

// replay from a manifest: reruns with the stored config (byte-identical CSVs)
ExperimentResult run_from_manifest(const std::string& manifest_path, const std::string& out_dir);

inline constexpr const char* kToolVersion = "1.0.0";

}  // namespace kgop::exp
