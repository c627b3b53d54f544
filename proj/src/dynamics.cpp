#include "smd/dynamics.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

#include "smd/errors.hpp"

namespace smd {

namespace {

// Euclidean re-projection after an explicit step, then the entropic floor.
Vector restore(const MirrorMap& map, const ConstraintSet& set, const Vector& p) {
  Vector q = set.euclidean_project(p);
  if (map.is_entropic() && map.interior_floor > 0.0 && q.minCoeff() < map.interior_floor) {
    q = q.cwiseMax(map.interior_floor);
    q /= q.sum();
  }
  return q;
}

TrajectorySample make_sample(const SaddleProblem& problem, const MirrorMaps& maps, double s, const Vector& x,
                             const Vector& y) {
  TrajectorySample sample{s, x, y, std::nullopt, std::nullopt};
  const auto& refs = problem.reference_saddles();
  if (!refs.empty()) {
    sample.V = lyapunov_V(maps, refs.front(), x, y);
    sample.V_star = lyapunov_Vstar(maps, refs, x, y);
  }
  return sample;
}

}  // namespace

Velocity pds_rhs(const SaddleProblem& problem, const MirrorMaps& maps, const Vector& x, const Vector& y) {
  const Gradients g = gradients(problem, x, y);
  const MetricWeights hx = hessian_diag(maps.x, x);
  const MetricWeights hy = hessian_diag(maps.y, y);
  return {tangent_project(problem.x_set(), x, -g.g_x.cwiseQuotient(hx.diag), hx),
          tangent_project(problem.y_set(), y, g.g_y.cwiseQuotient(hy.diag), hy)};
}

std::vector<TrajectorySample> integrate(const DynamicsConfig& config, const Vector& x0, const Vector& y0) {
  if (!(config.step > 0.0) || !(config.horizon >= 0.0)) throw ConfigError("integrate: need h > 0 and T >= 0");
  const SaddleProblem& problem = config.problem;
  const MirrorMaps& maps = config.maps;
  check_pairing(maps.x, problem.x_set());
  check_pairing(maps.y, problem.y_set());
  problem.require_feasible(x0, y0, 1e-10);

  const auto steps = static_cast<std::size_t>(std::ceil(config.horizon / config.step - 1e-9));
  std::vector<TrajectorySample> out;
  out.reserve(steps + 1);
  Vector x = x0;
  Vector y = y0;
  double s = 0.0;
  out.push_back(make_sample(problem, maps, s, x, y));
  for (std::size_t k = 0; k < steps; ++k) {
    const double h = std::min(config.step, config.horizon - s);
    if (config.scheme == Scheme::kTangentEuler) {
      const Velocity v = pds_rhs(problem, maps, x, y);
      x = restore(maps.x, problem.x_set(), x + h * v.xdot);
      y = restore(maps.y, problem.y_set(), y + h * v.ydot);
    } else {
      const Gradients g = gradients(problem, x, y);
      Vector x_next = conjugate_step(maps.x, problem.x_set(), grad_R(maps.x, x) - h * g.g_x);
      y = conjugate_step(maps.y, problem.y_set(), grad_R(maps.y, y) + h * g.g_y);
      x = std::move(x_next);
    }
    s = (k + 1 == steps) ? config.horizon : s + h;
    out.push_back(make_sample(problem, maps, s, x, y));
  }
  return out;
}

double lyapunov_V(const MirrorMaps& maps, const SaddlePoint& ref_saddle, const Vector& x, const Vector& y) {
  const double V = bregman(maps.x, ref_saddle.x, x) + bregman(maps.y, ref_saddle.y, y);
  assert(V + 1e-12 >= 0.5 * std::min(maps.x.sigma_R, maps.y.sigma_R) *
                          ((x - ref_saddle.x).squaredNorm() + (y - ref_saddle.y).squaredNorm()));
  return V;
}

double lyapunov_Vstar(const MirrorMaps& maps, const std::vector<SaddlePoint>& saddles, const Vector& x,
                      const Vector& y) {
  if (saddles.empty()) throw NoReferenceSaddle("lyapunov_Vstar: empty saddle list");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : saddles) best = std::min(best, lyapunov_V(maps, s, x, y));
  return best;
}

double equilibrium_residual(const SaddleProblem& problem, const MirrorMaps& maps, const Vector& x, const Vector& y) {
  const Velocity v = pds_rhs(problem, maps, x, y);
  return std::sqrt(v.xdot.squaredNorm() + v.ydot.squaredNorm());
}

double tangent_euler_lyapunov_slack(const SaddleProblem& problem, const MirrorMaps& maps, double h) {
  const double G = problem.G();
  auto side = [&](const MirrorMap& map) {
    if (!map.is_entropic()) return 0.5 * G * G;
    const double margin = 1.0 - 2.0 * h * G;
    if (margin <= 0.0) throw ConfigError("tangent-euler Lyapunov bound needs 2 h G < 1");
    return 2.0 * G * G / margin;
  };
  return side(maps.x) + side(maps.y);
}

MoreauSplit moreau_decompose(const ConstraintSet& set, const Vector& x, const Vector& d, const MetricWeights& w) {
  Vector nu = tangent_project(set, x, d, w);
  Vector eta = d - nu;
  const double orth = std::abs(w.inner(nu, eta));
  return {std::move(nu), std::move(eta), orth};
}

double MoreauResiduals::max() const { return std::max({orthogonality, tangent, normal, reconstruction}); }

MoreauResiduals moreau_residuals(const ConstraintSet& set, const Vector& x, const Vector& d, const MetricWeights& w) {
  const MoreauSplit split = moreau_decompose(set, x, d, w);
  return {split.orthogonality, w.norm(split.nu - tangent_project(set, x, split.nu, w)),
          w.norm(tangent_project(set, x, split.eta, w)), (split.nu + split.eta - d).norm()};
}

// ---------------------------------------------------------------------------
// Interpolation and pseudotrajectory distance

InterpolatedPath::InterpolatedPath(const Trace& trace) {
  if (trace.records.size() < 2) throw OutOfRange("interpolation needs at least two recorded iterates");
  times_.reserve(trace.records.size());
  for (const auto& rec : trace.records) {
    if (!times_.empty() && !(rec.t > times_.back()))
      throw OutOfRange("trace times must be strictly increasing");
    times_.push_back(rec.t);
    xs_.push_back(rec.x);
    ys_.push_back(rec.y);
  }
}

SaddlePoint InterpolatedPath::at(double t) const {
  if (!(t >= times_.front() && t <= times_.back())) throw OutOfRange("time outside the trace's range");
  // First knot strictly greater than t; segment is [k - 1, k].
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  if (it == times_.end()) return {xs_.back(), ys_.back()};
  const auto k = static_cast<std::size_t>(it - times_.begin());
  const double t0 = times_[k - 1];
  const double t1 = times_[k];
  if (t == t0) return {xs_[k - 1], ys_[k - 1]};
  const double theta = (t - t0) / (t1 - t0);
  return {xs_[k - 1] + theta * (xs_[k] - xs_[k - 1]), ys_[k - 1] + theta * (ys_[k] - ys_[k - 1])};
}

double apt_distance(const Trace& trace, const DynamicsConfig& config, double t_start, double window) {
  if (!(window >= 0.0)) throw OutOfRange("apt_distance: window must be nonnegative");
  const InterpolatedPath path(trace);
  if (t_start < path.t_begin() || t_start + window > path.t_end())
    throw OutOfRange("apt_distance: window is not inside the trace's time range");
  if (window == 0.0) return 0.0;

  const SaddlePoint start = path.at(t_start);
  DynamicsConfig local = config;
  local.horizon = window;
  const std::vector<TrajectorySample> flow = integrate(local, start.x, start.y);

  // Linear interpolation of the integrated flow at offset s.
  auto flow_at = [&](double s) -> SaddlePoint {
    auto it = std::upper_bound(flow.begin(), flow.end(), s,
                               [](double value, const TrajectorySample& sample) { return value < sample.s; });
    if (it == flow.end()) return {flow.back().x, flow.back().y};
    if (it == flow.begin()) return {flow.front().x, flow.front().y};
    const auto& b = *it;
    const auto& a = *(it - 1);
    const double theta = (s - a.s) / (b.s - a.s);
    return {a.x + theta * (b.x - a.x), a.y + theta * (b.y - a.y)};
  };

  double worst = 0.0;
  auto compare = [&](double t) {
    const SaddlePoint p = path.at(t);
    const SaddlePoint q = flow_at(t - t_start);
    worst = std::max(worst, std::sqrt((p.x - q.x).squaredNorm() + (p.y - q.y).squaredNorm()));
  };
  compare(t_start);
  for (double t : path.knots())
    if (t >= t_start && t <= t_start + window) compare(t);
  return worst;
}

}  // namespace smd
