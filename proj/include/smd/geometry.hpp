#pragma once

#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "smd/types.hpp"

namespace smd {

/// Coordinates (or faces) within this distance of a bound are treated as
/// active when building tangent cones.
inline constexpr double kActiveTol = 1e-9;

struct SimplexSet {
  int dim = 0;
};

struct BoxSet {
  Vector lower;
  Vector upper;
};

struct BallSet {
  Vector center;
  double radius = 1.0;
};

/// A nonempty compact convex feasible set. Only the three shapes above are
/// supported; each has a closed-form Euclidean projection.
class ConstraintSet {
 public:
  enum class Kind { kSimplex, kBox, kBall };

  static ConstraintSet simplex(int dim);
  static ConstraintSet box(Vector lower, Vector upper);
  static ConstraintSet ball(Vector center, double radius);

  Kind kind() const;
  int dim() const;
  const std::variant<SimplexSet, BoxSet, BallSet>& shape() const { return shape_; }

  bool contains(const Vector& p, double tol = 1e-10) const;
  /// Uniform simplex point, box center or ball center.
  Vector barycenter() const;
  /// Uniformly distributed feasible point.
  Vector sample(Rng& rng) const;
  Vector euclidean_project(const Vector& p) const;

  std::string describe() const;

  friend bool operator==(const ConstraintSet& a, const ConstraintSet& b);

 private:
  explicit ConstraintSet(std::variant<SimplexSet, BoxSet, BallSet> shape)
      : shape_(std::move(shape)) {}

  std::variant<SimplexSet, BoxSet, BallSet> shape_;
};

inline Vector euclidean_project(const ConstraintSet& set, const Vector& p) {
  return set.euclidean_project(p);
}

/// Diagonal of the mirror map Hessian at a point: the Riemannian metric
/// <u, v>_x = sum_i diag_i u_i v_i.
struct MetricWeights {
  Vector diag;

  double inner(const Vector& u, const Vector& v) const { return (diag.array() * u.array() * v.array()).sum(); }
  double norm(const Vector& u) const { return std::sqrt(inner(u, u)); }
};

/// Separable strongly convex generator R.
///   entropic:  R(x) = sum x_i ln x_i   (paired with the probability simplex)
///   quadratic: R(x) = 1/2 |x|^2        (any set)
struct MirrorMap {
  enum class Kind { kEntropic, kQuadratic };

  Kind kind = Kind::kQuadratic;
  double sigma_R = 1.0;
  double rho_R = 1.0;
  // Entropic iterates are clipped to x_i >= interior_floor after every
  // conjugate step. Unused for the quadratic map.
  double interior_floor = 0.0;

  static MirrorMap entropic(double interior_floor = 1e-12);
  static MirrorMap quadratic();

  bool is_entropic() const { return kind == Kind::kEntropic; }
  std::string describe() const;

  friend bool operator==(const MirrorMap&, const MirrorMap&) = default;
};

/// Throws UnsupportedPairing unless the map can be used on the set.
void check_pairing(const MirrorMap& map, const ConstraintSet& set);

double value_R(const MirrorMap& map, const Vector& x);
Vector grad_R(const MirrorMap& map, const Vector& x);
MetricWeights hessian_diag(const MirrorMap& map, const Vector& x);

/// argmax_{z in set} <z, y> - R(z), i.e. the gradient of the conjugate of
/// R restricted to the set.
Vector conjugate_step(const MirrorMap& map, const ConstraintSet& set, const Vector& y);

/// One mirror step: conjugate_step(grad_R(x) + alpha * d).
Vector mirror_update(const MirrorMap& map, const ConstraintSet& set, const Vector& x, const Vector& d,
                     double alpha);

/// D_R(ref, x) = R(ref) - R(x) - <grad R(x), ref - x>.
double bregman(const MirrorMap& map, const Vector& ref_point, const Vector& x);

/// Projection of v onto the tangent cone of `set` at x in the weighted norm
/// sum_i w_i (nu_i - v_i)^2.
Vector tangent_project(const ConstraintSet& set, const Vector& x, const Vector& v, const MetricWeights& weights);

/// Draws a direction from the tangent cone of `set` at x (used by the
/// randomized cone-membership checks).
Vector sample_tangent_direction(const ConstraintSet& set, const Vector& x, Rng& rng);

struct GateauxDeviation {
  double alpha;
  double deviation;
};

/// Difference quotients of the mirror step against their limit
/// tangent_project(set, x, H(x)^{-1} d, H(x)).
std::vector<GateauxDeviation> gateaux_check(const MirrorMap& map, const ConstraintSet& set, const Vector& x,
                                            const Vector& d, std::span<const double> alphas);

/// The limit the Gateaux quotients converge to.
Vector gateaux_limit(const MirrorMap& map, const ConstraintSet& set, const Vector& x, const Vector& d);

struct NormEquivalence {
  double kappa1;  // sqrt of the largest metric weight seen
  double kappa2;  // sqrt of the smallest metric weight seen
};

/// kappa2 |u|_2 <= |u|_x <= kappa1 |u|_2 over the given points.
NormEquivalence norm_equivalence_bounds(const MirrorMap& map, std::span<const Vector> points);
/// Same, over `sample_count` random feasible points. Entropic samples are
/// drawn from the clipped simplex {x_i >= interior_floor}.
NormEquivalence norm_equivalence_bounds(const MirrorMap& map, const ConstraintSet& set, int sample_count,
                                        Rng& rng);

}  // namespace smd
