#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "asgd/assumptions.hpp"
#include "asgd/harness.hpp"

namespace asgd {

// Flat `section.key = value` text, one entry per line, '#' comments.
// Unknown keys, duplicate keys and malformed values are ConfigErrors.
std::map<std::string, std::string> parse_key_values(const std::string& text);

// Sorted `key=value` lines; the config hash is the FNV-1a digest of this text.
std::string canonical_config_text(const std::map<std::string, std::string>& entries);

enum class OracleSolver { kAuto, kWeiszfeld, kBatchGd };

struct RunConfig {
  explicit RunConfig(ExperimentConfig exp) : experiment(std::move(exp)) {}

  // Objective, distribution, schedule, stream options, seed, ground truth
  // and the rate-experiment settings.
  ExperimentConfig experiment;
  std::uint64_t estimate_n = 10000;
  ProbeOptions check;
  std::vector<int> check_moments{1, 2, 3};
  OracleSolver oracle_solver = OracleSolver::kAuto;
  std::optional<std::string> oracle_dataset;
  std::string hash;
  std::string canonical_text;
};

RunConfig parse_config(const std::string& text);

}  // namespace asgd
