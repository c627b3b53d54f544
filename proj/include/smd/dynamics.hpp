#pragma once

#include <optional>
#include <vector>

#include "smd/geometry.hpp"
#include "smd/problems.hpp"
#include "smd/solvers.hpp"

namespace smd {

struct TrajectorySample {
  double s = 0.0;
  Vector x;
  Vector y;
  // Lyapunov value against the first reference saddle, and the minimum over
  // all of them. Empty when the problem has no reference saddles.
  std::optional<double> V;
  std::optional<double> V_star;
};

enum class Scheme {
  kTangentEuler,  // explicit Euler on the projected field, then re-projection onto the set
  kMirrorEuler,   // one noise-free mirror step with alpha = h
};

struct DynamicsConfig {
  DynamicsConfig(SaddleProblem p, MirrorMaps m, double h, double T, Scheme sch = Scheme::kTangentEuler)
      : problem(std::move(p)), maps(m), step(h), horizon(T), scheme(sch) {}

  SaddleProblem problem;
  MirrorMaps maps;
  double step;
  double horizon;
  Scheme scheme;
};

struct Velocity {
  Vector xdot;
  Vector ydot;
};

/// Projected saddle-point dynamics in the mirror-map metric:
///   xdot = P_{T_X(x)}^x(-H_x(x)^{-1} g_x),  ydot = P_{T_Y(y)}^y(H_y(y)^{-1} g_y).
Velocity pds_rhs(const SaddleProblem& problem, const MirrorMaps& maps, const Vector& x, const Vector& y);

/// Samples at s = 0, h, 2h, ..., T (the last step is shortened to land on T).
std::vector<TrajectorySample> integrate(const DynamicsConfig& config, const Vector& x0, const Vector& y0);

/// D_{R_x}(x*, x) + D_{R_y}(y*, y).
double lyapunov_V(const MirrorMaps& maps, const SaddlePoint& ref_saddle, const Vector& x, const Vector& y);
double lyapunov_Vstar(const MirrorMaps& maps, const std::vector<SaddlePoint>& saddles, const Vector& x,
                      const Vector& y);

/// |pds_rhs(x, y)|_2; zero exactly on the saddle set.
double equilibrium_residual(const SaddleProblem& problem, const MirrorMaps& maps, const Vector& x, const Vector& y);

/// C with V(s + h) <= V(s) + C h^2 along tangent-euler steps. Per player:
/// G^2 / 2 for the quadratic map and 2 G^2 / (1 - 2 h G) for the entropic
/// map. Requires 2 h G < 1 when either map is entropic.
double tangent_euler_lyapunov_slack(const SaddleProblem& problem, const MirrorMaps& maps, double h);

/// Moreau split of a drift d at x: d = nu + eta with nu in the tangent cone
/// and eta in the metric normal cone.
struct MoreauSplit {
  Vector nu;
  Vector eta;
  double orthogonality;  // |<nu, eta>_w|
};
MoreauSplit moreau_decompose(const ConstraintSet& set, const Vector& x, const Vector& d, const MetricWeights& w);

/// All four vanish exactly for a correct split.
struct MoreauResiduals {
  double orthogonality;   // |<nu, eta>_w|
  double tangent;         // |nu - P_T(nu)|_w, distance of nu from the tangent cone
  double normal;          // |P_T(eta)|_w, zero iff eta is in the polar cone
  double reconstruction;  // |nu + eta - d|_2

  double max() const;
};
MoreauResiduals moreau_residuals(const ConstraintSet& set, const Vector& x, const Vector& d, const MetricWeights& w);

/// Piecewise-linear interpolation of a trace through its recorded iterates,
/// t -> (x_hat(t), y_hat(t)).
class InterpolatedPath {
 public:
  explicit InterpolatedPath(const Trace& trace);

  SaddlePoint at(double t) const;
  double t_begin() const { return times_.front(); }
  double t_end() const { return times_.back(); }
  const std::vector<double>& knots() const { return times_; }

 private:
  std::vector<double> times_;
  std::vector<Vector> xs_;
  std::vector<Vector> ys_;
};

inline InterpolatedPath interpolate_trace(const Trace& trace) { return InterpolatedPath(trace); }

/// sup over trace knots s in [0, T] of |(x_hat, y_hat)(t_start + s) - z(s)|_2,
/// where z solves the dynamics from (x_hat, y_hat)(t_start).
double apt_distance(const Trace& trace, const DynamicsConfig& config, double t_start, double window);

}  // namespace smd
