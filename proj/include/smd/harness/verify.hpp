#pragma once

#include <functional>

#include "smd/harness/report.hpp"
#include "smd/harness/spec.hpp"

namespace smd::harness {

/// One noise-free iteration of a saddle-point solver.
using StepFn = std::function<SaddlePoint(const SaddleProblem&, const MirrorMaps&, const Vector& x, const Vector& y,
                                         double alpha)>;

/// Noise-free SSPMD step.
SaddlePoint exact_step(const SaddleProblem& problem, const MirrorMaps& maps, const Vector& x, const Vector& y,
                       double alpha);

/// Runs `step` for `iters` iterations from `starts` random interior points
/// and checks V(n+1) <= V(n) + C alpha(n)^2 with C = sspmd_lyapunov_slack.
/// Skipped when the problem has no reference saddle.
CheckResult check_solver_lyapunov(const RunConfig& config, std::uint64_t iters, int starts,
                                  const StepFn& step = exact_step);

/// Property suite over the spec's problem, maps and run configuration:
/// geometry (Moreau split, Gateaux limit, projection), problem gradients,
/// estimator bias, solver Lyapunov and viability, dynamics equilibria,
/// scheme agreement, Lyapunov decrease and pseudotrajectory trend. Checks
/// that need a reference saddle are skipped without one.
SummaryReport verify(const ExperimentSpec& spec);

}  // namespace smd::harness
