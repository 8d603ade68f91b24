#pragma once

// Experiment configuration: a versioned JSON document merged with command-line
// flags and STF_* environment overrides.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "stf/action.hpp"
#include "stf/diagnostics.hpp"

namespace stf::cli {

inline constexpr const char* kSchema = "stf.config/1";

struct Overrides {
  std::optional<std::string> config_path;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  bool strict = false;
};

struct ExperimentConfig {
  nlohmann::json raw = nlohmann::json::object();  // validated input document

  std::optional<GroupSpec> group;
  std::string action;
  std::vector<std::pair<std::string, std::string>> f_e;  // cell -> value, empty for the action default
  Rational alpha{3, 2};
  Rational delta{1, 2};
  Rational eps{1, 2};
  std::optional<Rational> K;
  std::vector<Rational> L{Rational(2), Rational(4), Rational(8)};
  std::optional<Averaging> averaging;
  std::vector<int> n;
  std::vector<std::string> base;
  Rational lo{1, 2};
  std::optional<Rational> hi = Rational(2);
  int k = 2;
  int radius_max = 6;
  std::vector<int> m{2, 4, 6, 8};
  int r = 0;
  int depth = 0;  // 0 selects the subcommand default
  std::size_t series_terms = 2000;
  std::size_t replicates = 0;  // 0 selects the subcommand default
  std::size_t samples = 100000;
  std::vector<std::string> index_set;
  std::vector<double> theta{0.5, 1.0, 2.0};
  Interval A, B;
  std::vector<std::string> g_tuple{"e"};
  std::vector<std::string> actions;
  std::size_t cap = kDefaultEnumerationCap;
  std::optional<std::uint64_t> seed;
  std::string out = "stf-out";
  int workers = 1;
  bool strict = false;
};

/// Parses and validates a config document; unknown keys are rejected.
ExperimentConfig parse_config(const nlohmann::json& doc);
/// Reads the file (when given), then applies STF_* variables and flags, in that order.
ExperimentConfig load_config(const Overrides& flags);

/// Parses "Z^2", "F_3", "Heisenberg", "Lamplighter".
GroupSpec parse_group(const std::string& text);

/// Canonical JSON of everything that determines the artifacts (not workers or out).
nlohmann::json canonical(const ExperimentConfig& cfg);
/// FNV-1a 64 of the canonical JSON, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace stf::cli
