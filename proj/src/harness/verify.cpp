#include "smd/harness/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "smd/dynamics.hpp"
#include "smd/errors.hpp"
#include "smd/harness/experiment.hpp"

namespace smd::harness {

namespace {

using Status = CheckResult::Status;

constexpr std::uint64_t kVerifyStream = 0x7e81f7;

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(3);
  out << std::scientific << v;
  return out.str();
}

CheckResult verdict(std::string name, bool ok, std::string detail) {
  return {std::move(name), ok ? Status::kPass : Status::kFail, std::move(detail)};
}

CheckResult skipped(std::string name, std::string why) { return {std::move(name), Status::kSkip, std::move(why)}; }

// A feasible point pulled a tenth of the way to the barycenter, so entropic
// maps stay well inside the simplex.
Vector interior_point(const ConstraintSet& set, Rng& rng) {
  return 0.9 * set.sample(rng) + 0.1 * set.barycenter();
}

// Random points including boundary ones: every third point is projected
// from outside the set.
Vector mixed_point(const ConstraintSet& set, Rng& rng, int k) {
  if (k % 3 != 0) return set.sample(rng);
  const Vector far = set.barycenter() + 3.0 * standard_normal_vector(set.dim(), rng);
  return set.euclidean_project(far);
}

CheckResult check_moreau(const ConstraintSet& set, const MirrorMap& map, const std::string& name, Rng& rng) {
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Vector x = map.is_entropic() ? interior_point(set, rng) : mixed_point(set, rng, k);
    const MetricWeights w = hessian_diag(map, x);
    const Vector d = standard_normal_vector(set.dim(), rng);
    worst = std::max(worst, moreau_residuals(set, x, d, w).max());
  }
  return verdict(name, worst <= 1e-10, "max residual " + fmt(worst) + " over 100 points (tol 1e-10)");
}

CheckResult check_gateaux(const ConstraintSet& set, const MirrorMap& map, const std::string& name, Rng& rng) {
  const Vector x = interior_point(set, rng);
  const Vector d = standard_normal_vector(set.dim(), rng);
  const double alphas[] = {1e-4};
  const double scale = std::max(1.0, gateaux_limit(map, set, x, d).norm());
  const double dev = gateaux_check(map, set, x, d, alphas).front().deviation;
  return verdict(name, dev <= 1e-3 * scale, "deviation at alpha=1e-4: " + fmt(dev));
}

CheckResult check_projection(const ConstraintSet& set, const std::string& name, Rng& rng) {
  double worst = 0.0;
  bool feasible = true;
  for (int k = 0; k < 100; ++k) {
    const Vector p = set.barycenter() + 2.0 * standard_normal_vector(set.dim(), rng);
    const Vector q = set.euclidean_project(p);
    feasible = feasible && set.contains(q, 1e-10);
    worst = std::max(worst, (set.euclidean_project(q) - q).norm());
  }
  return verdict(name, feasible && worst <= 1e-12,
                 std::string(feasible ? "" : "infeasible projection; ") + "max idempotence error " + fmt(worst));
}

CheckResult check_gradients(const SaddleProblem& problem, Rng& rng) {
  const double h = 1e-5;
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Vector x = problem.x_set().sample(rng);
    const Vector y = problem.y_set().sample(rng);
    const Gradients g = gradients(problem, x, y);
    Vector fx(x.size()), fy(y.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      Vector e = Vector::Zero(x.size());
      e(i) = h;
      fx(i) = (problem.bifunction(x + e, y) - problem.bifunction(x - e, y)) / (2 * h);
    }
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      Vector e = Vector::Zero(y.size());
      e(i) = h;
      fy(i) = (problem.bifunction(x, y + e) - problem.bifunction(x, y - e)) / (2 * h);
    }
    const double scale = std::max(1.0, std::sqrt(g.g_x.squaredNorm() + g.g_y.squaredNorm()));
    worst = std::max(worst, std::sqrt((fx - g.g_x).squaredNorm() + (fy - g.g_y).squaredNorm()) / scale);
  }
  return verdict("problems.gradient", worst <= 1e-6, "max relative finite-difference error " + fmt(worst));
}

CheckResult check_reference_gap(const SaddleProblem& problem) {
  if (problem.reference_saddles().empty()) return skipped("problems.reference_gap", "no reference saddles");
  double worst = 0.0;
  try {
    for (const auto& s : problem.reference_saddles()) worst = std::max(worst, saddle_gap(problem, s.x, s.y));
  } catch (const UnsupportedInnerSolve& e) {
    return skipped("problems.reference_gap", e.what());
  }
  return verdict("problems.reference_gap", worst <= 1e-8, "max gap at reference saddles " + fmt(worst));
}

CheckResult check_bias(const SaddleProblem& problem, Rng& rng) {
  const double mu = 0.1;
  const BiasProbe probe =
      bias_second_moment_probe(problem, interior_point(problem.x_set(), rng), interior_point(problem.y_set(), rng),
                               mu, 20000, rng);
  return verdict("zeroth_order.bias", probe.within_bound(mu),
                 "bias " + fmt(probe.bias_norm) + " vs bound " + fmt(probe.bias_constant * mu + probe.mc_band));
}

CheckResult check_viability(const RunConfig& base) {
  RunConfig config = base;
  config.check_viability = true;
  config.max_iters = std::min<std::uint64_t>(config.max_iters, 2000);
  config.record_every = config.max_iters;
  config.diagnostics = {false, false, false, false};
  try {
    run(config);
  } catch (const FeasibilityError& e) {
    return verdict("solvers.viability", false, e.what());
  }
  return verdict("solvers.viability", true, std::to_string(config.max_iters) + " iterates feasible to 1e-10");
}

CheckResult check_distance(const RunConfig& config) {
  const SaddleProblem& problem = config.problem;
  if (problem.reference_saddles().empty()) return skipped("solvers.dist", "no reference saddles");
  const double sigma = std::min(config.maps.x.sigma_R, config.maps.y.sigma_R);
  double at_refs = 0.0;
  for (const auto& s : problem.reference_saddles())
    at_refs = std::max(at_refs, distance_to_saddle_set(problem, config.maps.x, config.maps.y, s.x, s.y).euclidean);
  Rng rng = make_rng(config.seed, kVerifyStream + 1);
  bool bound_ok = true;
  for (int k = 0; k < 50; ++k) {
    const Vector x = interior_point(problem.x_set(), rng);
    const Vector y = interior_point(problem.y_set(), rng);
    const SaddleDistance d = distance_to_saddle_set(problem, config.maps.x, config.maps.y, x, y);
    bound_ok = bound_ok && d.bregman + 1e-12 >= 0.5 * sigma * d.euclidean * d.euclidean;
  }
  return verdict("solvers.dist", at_refs <= 1e-12 && bound_ok,
                 "distance at references " + fmt(at_refs) + (bound_ok ? "" : "; V* below strong-convexity bound"));
}

CheckResult check_equilibria(const RunConfig& config) {
  const SaddleProblem& problem = config.problem;
  if (problem.reference_saddles().empty()) return skipped("dynamics.equilibrium", "no reference saddles");
  double worst = 0.0;
  for (const auto& s : problem.reference_saddles())
    worst = std::max(worst, equilibrium_residual(problem, config.maps, s.x, s.y));
  return verdict("dynamics.equilibrium", worst <= 1e-9, "max residual at reference saddles " + fmt(worst));
}

CheckResult check_scheme_agreement(const RunConfig& config, Rng& rng) {
  const double h = 1e-3;
  const Vector x0 = interior_point(config.problem.x_set(), rng);
  const Vector y0 = interior_point(config.problem.y_set(), rng);
  const auto a = integrate(DynamicsConfig(config.problem, config.maps, h, 1.0, Scheme::kTangentEuler), x0, y0);
  const auto b = integrate(DynamicsConfig(config.problem, config.maps, h, 1.0, Scheme::kMirrorEuler), x0, y0);
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k)
    worst = std::max(worst, std::sqrt((a[k].x - b[k].x).squaredNorm() + (a[k].y - b[k].y).squaredNorm()));
  return verdict("dynamics.scheme_agreement", worst <= 10 * h,
                 "max tangent/mirror Euler gap over T=1 " + fmt(worst) + " (tol 10 h)");
}

CheckResult check_dynamics_lyapunov(const RunConfig& config, Rng& rng) {
  const SaddleProblem& problem = config.problem;
  if (problem.reference_saddles().empty()) return skipped("dynamics.lyapunov", "no reference saddles");
  const double h = 1e-3;
  double C = 0.0;
  try {
    C = tangent_euler_lyapunov_slack(problem, config.maps, h);
  } catch (const ConfigError& e) {
    return skipped("dynamics.lyapunov", e.what());
  }
  int violations = 0;
  for (int k = 0; k < 5; ++k) {
    const auto path = integrate(DynamicsConfig(problem, config.maps, h, 2.0), interior_point(problem.x_set(), rng),
                                interior_point(problem.y_set(), rng));
    for (std::size_t i = 1; i < path.size(); ++i)
      if (*path[i].V > *path[i - 1].V + C * h * h) ++violations;
  }
  return verdict("dynamics.lyapunov", violations == 0,
                 std::to_string(violations) + " violations of V(s+h) <= V(s) + C h^2, C = " + fmt(C));
}

CheckResult check_apt(const RunConfig& base) {
  if (base.problem.reference_saddles().empty()) return skipped("dynamics.apt", "no reference saddles");
  RunConfig config = base;
  config.max_iters = std::min<std::uint64_t>(config.max_iters, 10000);
  config.record_every = 1;
  config.diagnostics = {false, false, false, false};
  // Started off the saddle set so the windows see a moving path.
  Rng rng = make_rng(config.seed, kVerifyStream + 3);
  config.init = SaddlePoint{interior_point(config.problem.x_set(), rng), interior_point(config.problem.y_set(), rng)};
  const Trace trace = run(config);
  const auto profile = apt_profile(trace, config);
  if (profile.size() < 2) return skipped("dynamics.apt", "trace too short for two unit windows");
  const double first = profile.begin()->second;
  const double last = profile.rbegin()->second;
  return verdict("dynamics.apt", last <= first + 1e-3,
                 "apt at n=" + std::to_string(profile.begin()->first) + ": " + fmt(first) +
                     ", at n=" + std::to_string(profile.rbegin()->first) + ": " + fmt(last));
}

}  // namespace

SaddlePoint exact_step(const SaddleProblem& problem, const MirrorMaps& maps, const Vector& x, const Vector& y,
                       double alpha) {
  const Gradients g = gradients(problem, x, y);
  return {conjugate_step(maps.x, problem.x_set(), grad_R(maps.x, x) - alpha * g.g_x),
          conjugate_step(maps.y, problem.y_set(), grad_R(maps.y, y) + alpha * g.g_y)};
}

CheckResult check_solver_lyapunov(const RunConfig& config, std::uint64_t iters, int starts, const StepFn& step) {
  const SaddleProblem& problem = config.problem;
  if (problem.reference_saddles().empty()) return skipped("solvers.lyapunov", "no reference saddles");
  const double C = sspmd_lyapunov_slack(problem);
  const SaddlePoint& ref = problem.reference_saddles().front();
  Rng rng = make_rng(config.seed, kVerifyStream + 2);
  int violations = 0;
  for (int k = 0; k < starts; ++k) {
    Vector x = interior_point(problem.x_set(), rng);
    Vector y = interior_point(problem.y_set(), rng);
    double V = lyapunov_V(config.maps, ref, x, y);
    for (std::uint64_t n = 0; n < iters; ++n) {
      const double alpha = schedule_value(config.schedule, n);
      SaddlePoint next = step(problem, config.maps, x, y, alpha);
      x = std::move(next.x);
      y = std::move(next.y);
      const double V_next = lyapunov_V(config.maps, ref, x, y);
      if (V_next > V + C * alpha * alpha) ++violations;
      V = V_next;
    }
  }
  return verdict("solvers.lyapunov", violations == 0,
                 std::to_string(violations) + " violations of V(n+1) <= V(n) + C alpha(n)^2, C = " + fmt(C));
}

SummaryReport verify(const ExperimentSpec& spec) {
  const RunConfig& config = spec.run;
  validate(config);
  const SaddleProblem& problem = config.problem;
  Rng rng = make_rng(config.seed, kVerifyStream);

  SummaryReport report;
  report.name = spec.name;
  auto& checks = report.checks;
  checks.push_back(check_moreau(problem.x_set(), config.maps.x, "geometry.moreau_x", rng));
  checks.push_back(check_moreau(problem.y_set(), config.maps.y, "geometry.moreau_y", rng));
  checks.push_back(check_gateaux(problem.x_set(), config.maps.x, "geometry.gateaux_x", rng));
  checks.push_back(check_gateaux(problem.y_set(), config.maps.y, "geometry.gateaux_y", rng));
  checks.push_back(check_projection(problem.x_set(), "geometry.projection_x", rng));
  checks.push_back(check_projection(problem.y_set(), "geometry.projection_y", rng));
  checks.push_back(check_gradients(problem, rng));
  checks.push_back(check_reference_gap(problem));
  checks.push_back(check_bias(problem, rng));
  checks.push_back(check_solver_lyapunov(config, 2000, 5));
  checks.push_back(check_viability(config));
  checks.push_back(check_distance(config));
  checks.push_back(check_equilibria(config));
  checks.push_back(check_scheme_agreement(config, rng));
  checks.push_back(check_dynamics_lyapunov(config, rng));
  checks.push_back(check_apt(config));
  return report;
}

}  // namespace smd::harness
