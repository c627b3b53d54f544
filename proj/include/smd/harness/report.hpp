#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "smd/solvers.hpp"

namespace smd::harness {

struct Quantiles {
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;

  double iqr() const { return q3 - q1; }
};

/// Linear-interpolation quantiles (the "type 7" convention). Throws
/// OutOfRange on an empty sample.
Quantiles quantiles(std::vector<double> values);

struct RunSummary {
  std::size_t index = 0;
  std::map<std::string, double> params;
  std::uint64_t seed = 0;
  std::uint64_t config_digest = 0;
  std::filesystem::path trace_path;
  bool ok = true;
  std::string error;
  std::optional<double> final_gap;
  std::optional<double> final_v_star;
  std::optional<double> final_dist;
  // apt_distance over a unit window starting at t(10^k), k = 2, 3, ...
  std::map<std::uint64_t, double> apt;
};

/// Runs that share every swept parameter except the seed.
struct GroupSummary {
  std::map<std::string, double> params;
  std::size_t runs = 0;
  std::size_t failed = 0;
  std::optional<Quantiles> gap;
  std::optional<Quantiles> v_star;
  std::optional<Quantiles> dist;
  std::map<std::uint64_t, Quantiles> apt;
};

struct CheckResult {
  enum class Status { kPass, kFail, kSkip };

  std::string name;
  Status status = Status::kPass;
  std::string detail;
};

const char* to_string(CheckResult::Status status);

struct SummaryReport {
  std::string name;
  std::vector<RunSummary> runs;
  std::vector<GroupSummary> groups;
  std::vector<CheckResult> checks;

  bool any_run_failed() const;
  bool all_checks_passed() const;  // skips count as passing
};

/// Pretty-printed JSON with "runs", "groups" and "checks" blocks. Holds no
/// timing data, so identical inputs give identical text.
std::string summary_json(const SummaryReport& report);

}  // namespace smd::harness
