#pragma once

#include <filesystem>

#include "smd/dynamics.hpp"
#include "smd/harness/report.hpp"
#include "smd/harness/spec.hpp"

namespace smd::harness {

struct ExperimentOptions {
  // 0 means std::thread::hardware_concurrency().
  unsigned threads = 0;
  // Keep each run's full trace in memory alongside the files.
  bool keep_traces = false;
};

struct ExperimentResult {
  SummaryReport report;
  std::vector<Trace> traces;  // filled only with keep_traces, indexed like report.runs
};

/// Executes every grid point. Each run draws from make_rng(seed) alone, so
/// a run's output does not depend on scheduling or on the other grid
/// points. Writes <outputs>/<name>_run<k>.csv per run and
/// <outputs>/<name>_summary.json. A run that throws is flagged in the
/// report and the rest of the grid still executes.
ExperimentResult run_experiment(const ExperimentSpec& spec, const ExperimentOptions& options = {});

/// Dynamics used for the pseudotrajectory comparison of a run: the run's
/// problem and maps, tangent-euler with h = 1e-3.
DynamicsConfig apt_dynamics(const RunConfig& config, double window = 1.0);

/// apt_distance at t(10^k), k = 2, 3, ..., for every start whose window
/// fits inside the trace.
std::map<std::uint64_t, double> apt_profile(const Trace& trace, const RunConfig& config, double window = 1.0);

}  // namespace smd::harness
