#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "smd/solvers.hpp"

namespace smd::harness {

/// Optional parameter grid. Each non-empty axis replaces the base value;
/// the grid is the cartesian product, with seed varying fastest.
struct Sweep {
  std::vector<double> schedule_a;
  std::vector<double> schedule_p;
  std::vector<double> smoothing_mu;
  std::vector<std::uint64_t> seed;

  bool empty() const { return schedule_a.empty() && schedule_p.empty() && smoothing_mu.empty() && seed.empty(); }
  friend bool operator==(const Sweep&, const Sweep&) = default;
};

struct ExperimentSpec {
  explicit ExperimentSpec(RunConfig r) : run(std::move(r)) {}

  std::string name;
  RunConfig run;
  Sweep sweep;
  std::filesystem::path outputs = "out";
};

bool operator==(const RunConfig& a, const RunConfig& b);
bool operator==(const ExperimentSpec& a, const ExperimentSpec& b);

struct GridPoint {
  std::size_t index = 0;
  RunConfig config;
  // Swept parameter values for this point, keyed by axis name.
  std::map<std::string, double> params;
};

std::vector<GridPoint> expand_grid(const ExperimentSpec& spec);

/// Parses a JSON experiment document. Malformed JSON and wrongly typed
/// values raise ParseError (with line/column or key path); unknown keys,
/// missing keys and out-of-range values are collected into one
/// ValidationError.
ExperimentSpec parse_spec(const std::string& text);
ExperimentSpec load_spec(const std::filesystem::path& path);

/// Canonical JSON form; parse_spec(write_spec(s)) == s.
std::string write_spec(const ExperimentSpec& spec);

/// Matching pennies with entropic maps and the default schedule.
ExperimentSpec default_spec();

}  // namespace smd::harness
