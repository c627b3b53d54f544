#include "smd/solvers.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "smd/errors.hpp"

namespace smd {

namespace {

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

void write_vector(std::ostream& out, const Vector& v) {
  out << '[';
  for (Eigen::Index i = 0; i < v.size(); ++i) out << (i ? "," : "") << v(i);
  out << ']';
}

void require_viable(const SaddleProblem& problem, const Vector& x, const Vector& y, std::uint64_t n) {
  if (!problem.x_set().contains(x, 1e-10) || !problem.y_set().contains(y, 1e-10))
    throw FeasibilityError("iterate " + std::to_string(n) + " left the feasible set");
}

// Shared driver: `step` advances (x, y) by one iteration with the given
// alpha and mu and owns all oracle calls.
template <class StepFn>
Trace run_loop(const RunConfig& config, bool zeroth_order, StepFn&& step) {
  validate(config);
  const auto start = std::chrono::steady_clock::now();
  const SaddleProblem& problem = config.problem;
  const bool have_refs = !problem.reference_saddles().empty();

  Rng rng = make_rng(config.seed);
  SaddlePoint point = config.initial_point();

  Trace trace;
  trace.config_digest = config_digest(config);
  trace.records.reserve(config.max_iters / config.record_every + 2);
  trace.x_average = Vector::Zero(point.x.size());
  trace.y_average = Vector::Zero(point.y.size());
  double weight_total = 0.0;

  double t = 0.0;
  auto record = [&](std::uint64_t n) {
    require_viable(problem, point.x, point.y, n);
    IterateRecord rec;
    rec.n = n;
    rec.t = t;
    rec.x = point.x;
    rec.y = point.y;
    rec.alpha = schedule_value(config.schedule, n);
    if (zeroth_order) rec.mu = config.smoothing.mu(n);
    if (config.diagnostics.gap) {
      try {
        rec.gap = saddle_gap(problem, point.x, point.y);
      } catch (const UnsupportedInnerSolve&) {
        // Left empty in the trace.
      }
    }
    if (have_refs && (config.diagnostics.v_star || config.diagnostics.dist)) {
      const SaddleDistance d = distance_to_saddle_set(problem, config.maps.x, config.maps.y, point.x, point.y);
      if (config.diagnostics.v_star) rec.v_star = d.bregman;
      if (config.diagnostics.dist) rec.dist_euclid = d.euclidean;
    }
    trace.records.push_back(std::move(rec));
  };

  record(0);
  for (std::uint64_t n = 0; n < config.max_iters; ++n) {
    const double alpha = schedule_value(config.schedule, n);
    const double mu = zeroth_order ? config.smoothing.mu(n) : 0.0;
    point = step(point, alpha, mu, rng);
    if (config.check_viability) require_viable(problem, point.x, point.y, n + 1);
    t += alpha;
    weight_total += alpha;
    trace.x_average += (alpha / weight_total) * (point.x - trace.x_average);
    trace.y_average += (alpha / weight_total) * (point.y - trace.y_average);
    const std::uint64_t next = n + 1;
    if (next % config.record_every == 0 || next == config.max_iters) record(next);
  }

  trace.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return trace;
}

}  // namespace

// ---------------------------------------------------------------------------
// Schedules

StepSchedule StepSchedule::polynomial(double a, double p) {
  if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError("step schedule a must be positive");
  if (!(p > 0.0) || !std::isfinite(p)) throw ConfigError("step schedule exponent p must be positive");
  return {Kind::kPolynomial, a, p, 0.0};
}

StepSchedule StepSchedule::constant(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("constant step size must be positive");
  return {Kind::kConstant, 0.0, 0.0, alpha};
}

std::string StepSchedule::describe() const {
  std::ostringstream out;
  out.precision(17);
  if (kind == Kind::kPolynomial)
    out << "polynomial(" << a << "," << p << ")";
  else
    out << "constant(" << alpha << ")";
  return out.str();
}

double schedule_value(const StepSchedule& schedule, std::uint64_t n) {
  if (schedule.kind == StepSchedule::Kind::kConstant) return schedule.alpha;
  return schedule.a / std::pow(static_cast<double>(n) + 1.0, schedule.p);
}

// ---------------------------------------------------------------------------
// RunConfig

SaddlePoint RunConfig::initial_point() const {
  if (init) return *init;
  return {problem.x_set().barycenter(), problem.y_set().barycenter()};
}

std::string RunConfig::describe() const {
  std::ostringstream out;
  out.precision(17);
  out << "algorithm=" << (algorithm == Algorithm::kSspmd ? "sspmd" : "szspmd") << ";problem=" << problem.describe()
      << ";x_map=" << maps.x.describe() << ";y_map=" << maps.y.describe() << ";noise=" << noise.describe()
      << ";schedule=" << schedule.describe();
  if (algorithm == Algorithm::kSzspmd) out << ";smoothing=" << smoothing.describe();
  out << ";seed=" << seed << ";max_iters=" << max_iters << ";record_every=" << record_every << ";init=";
  if (init) {
    write_vector(out, init->x);
    out << ',';
    write_vector(out, init->y);
  } else {
    out << "barycenter";
  }
  out << ";diagnostics=" << diagnostics.gap << diagnostics.v_star << diagnostics.dist << diagnostics.apt;
  return out.str();
}

void validate(const RunConfig& config) {
  std::vector<std::string> problems;
  try {
    check_pairing(config.maps.x, config.problem.x_set());
  } catch (const UnsupportedPairing& e) {
    problems.push_back(std::string("x_map: ") + e.what());
  }
  try {
    check_pairing(config.maps.y, config.problem.y_set());
  } catch (const UnsupportedPairing& e) {
    problems.push_back(std::string("y_map: ") + e.what());
  }
  if (config.max_iters < 1) problems.emplace_back("max_iters must be >= 1");
  if (config.record_every < 1) problems.emplace_back("record_every must be >= 1");
  if (config.noise.kind == NoiseModel::Kind::kColumnSampling && !config.problem.is_matrix_game())
    problems.emplace_back("column-sampling noise requires a matrix game");
  if (config.algorithm == Algorithm::kSzspmd && config.noise.kind != NoiseModel::Kind::kNone)
    problems.emplace_back("the zeroth-order solver uses function values only; noise must be none");
  if (config.init) {
    const auto& [x0, y0] = *config.init;
    if (!config.problem.x_set().contains(x0, 1e-10)) problems.emplace_back("init.x is not feasible");
    if (!config.problem.y_set().contains(y0, 1e-10)) problems.emplace_back("init.y is not feasible");
    if (config.maps.x.is_entropic() && x0.size() > 0 && !(x0.minCoeff() > 0.0))
      problems.emplace_back("init.x must be strictly positive for the entropic map");
    if (config.maps.y.is_entropic() && y0.size() > 0 && !(y0.minCoeff() > 0.0))
      problems.emplace_back("init.y must be strictly positive for the entropic map");
  }
  if (problems.empty()) return;
  std::string message = "invalid run configuration:";
  for (const auto& p : problems) message += "\n  - " + p;
  throw ConfigError(message);
}

std::uint64_t config_digest(const RunConfig& config) { return fnv1a(config.describe()); }

// ---------------------------------------------------------------------------
// Steps and runs

StepResult sspmd_step(const SaddleProblem& problem, const MirrorMaps& maps, const NoiseModel& noise,
                      const Vector& x, const Vector& y, double alpha, Rng& rng) {
  if (!(alpha >= 0.0)) throw DomainError("sspmd_step: step size must be nonnegative");
  OracleSample sample = stochastic_gradients(problem, noise, x, y, rng);
  Vector x_next = conjugate_step(maps.x, problem.x_set(), grad_R(maps.x, x) - alpha * sample.g_x);
  Vector y_next = conjugate_step(maps.y, problem.y_set(), grad_R(maps.y, y) + alpha * sample.g_y);
  return {std::move(x_next), std::move(y_next), std::move(sample)};
}

SaddlePoint szspmd_step(const SaddleProblem& problem, const MirrorMaps& maps, const Vector& x, const Vector& y,
                        double alpha, double mu, Rng& rng) {
  if (!(alpha >= 0.0)) throw DomainError("szspmd_step: step size must be nonnegative");
  problem.require_feasible(x, y);
  const ZerothOrderEstimate g = gaussian_estimate(problem, x, y, mu, rng);
  return {conjugate_step(maps.x, problem.x_set(), grad_R(maps.x, x) - alpha * g.g_x_hat),
          conjugate_step(maps.y, problem.y_set(), grad_R(maps.y, y) + alpha * g.g_y_hat)};
}

Trace run_sspmd(const RunConfig& config) {
  return run_loop(config, false, [&](const SaddlePoint& p, double alpha, double, Rng& rng) {
    StepResult r = sspmd_step(config.problem, config.maps, config.noise, p.x, p.y, alpha, rng);
    return SaddlePoint{std::move(r.x_next), std::move(r.y_next)};
  });
}

Trace run_szspmd(const RunConfig& config) {
  return run_loop(config, true, [&](const SaddlePoint& p, double alpha, double mu, Rng& rng) {
    return szspmd_step(config.problem, config.maps, p.x, p.y, alpha, mu, rng);
  });
}

Trace run(const RunConfig& config) {
  return config.algorithm == Algorithm::kSspmd ? run_sspmd(config) : run_szspmd(config);
}

double sspmd_lyapunov_slack(const SaddleProblem& problem) { return problem.G() * problem.G(); }

}  // namespace smd
