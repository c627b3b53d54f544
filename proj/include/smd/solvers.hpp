#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "smd/geometry.hpp"
#include "smd/problems.hpp"
#include "smd/zeroth_order.hpp"

namespace smd {

/// Step sizes alpha(n).
///   polynomial: a / (n + 1)^p with p in (1/2, 1]  (Robbins-Monro)
///   constant:   alpha                             (diagnostics only)
struct StepSchedule {
  enum class Kind { kPolynomial, kConstant };

  Kind kind = Kind::kPolynomial;
  double a = 1.0;
  double p = 1.0;
  double alpha = 0.0;

  static StepSchedule polynomial(double a, double p);
  static StepSchedule constant(double alpha);

  /// sum alpha(n) = inf and sum alpha(n)^2 < inf. Decided from the family:
  /// the p-series diverges iff p <= 1 and its squares converge iff 2p > 1.
  bool is_robbins_monro() const { return kind == Kind::kPolynomial && p > 0.5 && p <= 1.0; }
  std::string describe() const;

  friend bool operator==(const StepSchedule&, const StepSchedule&) = default;
};

double schedule_value(const StepSchedule& schedule, std::uint64_t n);

struct MirrorMaps {
  MirrorMap x;
  MirrorMap y;

  friend bool operator==(const MirrorMaps&, const MirrorMaps&) = default;
};

enum class Algorithm { kSspmd, kSzspmd };

struct DiagnosticFlags {
  bool gap = true;
  bool v_star = true;
  bool dist = true;
  bool apt = false;

  friend bool operator==(const DiagnosticFlags&, const DiagnosticFlags&) = default;
};

struct RunConfig {
  explicit RunConfig(SaddleProblem p) : problem(std::move(p)) {}

  SaddleProblem problem;
  Algorithm algorithm = Algorithm::kSspmd;
  MirrorMaps maps{MirrorMap::quadratic(), MirrorMap::quadratic()};
  NoiseModel noise = NoiseModel::none();
  StepSchedule schedule = StepSchedule::polynomial(1.0, 1.0);
  SmoothingSchedule smoothing = SmoothingSchedule::constant(0.1);
  std::uint64_t seed = 0;
  std::uint64_t max_iters = 1000;
  std::uint64_t record_every = 1;
  // Empty means the barycenter of each set.
  std::optional<SaddlePoint> init;
  DiagnosticFlags diagnostics;
  // Check feasibility of every iterate, not only the recorded ones.
  bool check_viability = false;

  SaddlePoint initial_point() const;
  /// Canonical text form; the digest is a hash of this string.
  std::string describe() const;
};

/// Throws ConfigError naming every violated requirement.
void validate(const RunConfig& config);
std::uint64_t config_digest(const RunConfig& config);

struct IterateRecord {
  std::uint64_t n = 0;
  double t = 0.0;  // sum_{k < n} alpha(k)
  Vector x;
  Vector y;
  double alpha = 0.0;  // alpha(n), the step taken from this iterate
  std::optional<double> mu;
  std::optional<double> gap;
  std::optional<double> v_star;
  std::optional<double> dist_euclid;

  friend bool operator==(const IterateRecord&, const IterateRecord&) = default;
};

struct Trace {
  std::vector<IterateRecord> records;
  std::uint64_t config_digest = 0;
  double wall_time = 0.0;
  // Step-weighted running averages of the iterates. Reported for context;
  // convergence statements are about the iterates themselves.
  Vector x_average;
  Vector y_average;
};

struct StepResult {
  Vector x_next;
  Vector y_next;
  OracleSample sample;
};

/// One stochastic saddle-point mirror descent step: descent in x, ascent in y.
StepResult sspmd_step(const SaddleProblem& problem, const MirrorMaps& maps, const NoiseModel& noise,
                      const Vector& x, const Vector& y, double alpha, Rng& rng);

/// The same step with the oracle replaced by a single Gaussian smoothing draw.
SaddlePoint szspmd_step(const SaddleProblem& problem, const MirrorMaps& maps, const Vector& x, const Vector& y,
                        double alpha, double mu, Rng& rng);

Trace run_sspmd(const RunConfig& config);
Trace run_szspmd(const RunConfig& config);
/// Dispatches on config.algorithm.
Trace run(const RunConfig& config);

/// C such that noise-free SSPMD satisfies V(n+1) <= V(n) + C alpha(n)^2 for
/// the Bregman Lyapunov function at any saddle point. Per player the mirror
/// step adds at most alpha^2 G^2 / 2 (Hoeffding's lemma for the entropic
/// map, nonexpansiveness of the projection for the quadratic one).
double sspmd_lyapunov_slack(const SaddleProblem& problem);

}  // namespace smd
