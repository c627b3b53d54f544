#include "smd/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "smd/errors.hpp"

namespace smd {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

void require_dim(const ConstraintSet& set, const Vector& p, const char* what) {
  if (p.size() != set.dim()) {
    std::ostringstream msg;
    msg << what << ": dimension " << p.size() << " does not match set dimension " << set.dim();
    throw DomainError(msg.str());
  }
}

// x ln x with the continuous extension 0 ln 0 = 0.
double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

Vector project_simplex(const Vector& p) {
  // Sort-and-threshold: find tau with sum_i max(p_i - tau, 0) = 1.
  std::vector<double> sorted(p.data(), p.data() + p.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double tau = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    cumulative += sorted[k];
    const double candidate = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0) tau = candidate;
  }
  return (p.array() - tau).max(0.0).matrix();
}

}  // namespace

// ---------------------------------------------------------------------------
// ConstraintSet

ConstraintSet ConstraintSet::simplex(int dim) {
  if (dim < 1) throw ConfigError("simplex dimension must be positive");
  return ConstraintSet(SimplexSet{dim});
}

ConstraintSet ConstraintSet::box(Vector lower, Vector upper) {
  if (lower.size() < 1 || lower.size() != upper.size())
    throw ConfigError("box bounds must be nonempty and of equal length");
  if (!lower.allFinite() || !upper.allFinite()) throw ConfigError("box bounds must be finite");
  if ((lower.array() > upper.array()).any()) throw ConfigError("box requires lower <= upper componentwise");
  return ConstraintSet(BoxSet{std::move(lower), std::move(upper)});
}

ConstraintSet ConstraintSet::ball(Vector center, double radius) {
  if (center.size() < 1) throw ConfigError("ball center must be nonempty");
  if (!center.allFinite()) throw ConfigError("ball center must be finite");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw ConfigError("ball radius must be positive");
  return ConstraintSet(BallSet{std::move(center), radius});
}

ConstraintSet::Kind ConstraintSet::kind() const {
  return std::visit(Overloaded{[](const SimplexSet&) { return Kind::kSimplex; },
                               [](const BoxSet&) { return Kind::kBox; },
                               [](const BallSet&) { return Kind::kBall; }},
                    shape_);
}

int ConstraintSet::dim() const {
  return std::visit(Overloaded{[](const SimplexSet& s) { return s.dim; },
                               [](const BoxSet& b) { return static_cast<int>(b.lower.size()); },
                               [](const BallSet& b) { return static_cast<int>(b.center.size()); }},
                    shape_);
}

bool ConstraintSet::contains(const Vector& p, double tol) const {
  if (p.size() != dim() || !p.allFinite()) return false;
  return std::visit(Overloaded{[&](const SimplexSet&) {
                                 return p.minCoeff() >= -tol && std::abs(p.sum() - 1.0) <= tol;
                               },
                               [&](const BoxSet& b) {
                                 return ((p - b.lower).array() >= -tol).all() &&
                                        ((b.upper - p).array() >= -tol).all();
                               },
                               [&](const BallSet& b) { return (p - b.center).norm() <= b.radius + tol; }},
                    shape_);
}

Vector ConstraintSet::barycenter() const {
  return std::visit(
      Overloaded{[](const SimplexSet& s) -> Vector { return Vector::Constant(s.dim, 1.0 / s.dim); },
                 [](const BoxSet& b) -> Vector { return 0.5 * (b.lower + b.upper); },
                 [](const BallSet& b) -> Vector { return b.center; }},
      shape_);
}

Vector ConstraintSet::sample(Rng& rng) const {
  return std::visit(Overloaded{[&](const SimplexSet& s) -> Vector {
                                 // Normalized exponentials are uniform on the simplex.
                                 Vector e(s.dim);
                                 for (int i = 0; i < s.dim; ++i) e(i) = -std::log(1.0 - uniform01(rng));
                                 return e / e.sum();
                               },
                               [&](const BoxSet& b) -> Vector {
                                 Vector p(b.lower.size());
                                 for (Eigen::Index i = 0; i < p.size(); ++i)
                                   p(i) = b.lower(i) + uniform01(rng) * (b.upper(i) - b.lower(i));
                                 return p;
                               },
                               [&](const BallSet& b) -> Vector {
                                 const auto n = b.center.size();
                                 Vector dir = standard_normal_vector(n, rng);
                                 const double norm = dir.norm();
                                 if (norm == 0.0) return b.center;
                                 const double r =
                                     b.radius * std::pow(uniform01(rng), 1.0 / static_cast<double>(n));
                                 return b.center + (r / norm) * dir;
                               }},
                    shape_);
}

Vector ConstraintSet::euclidean_project(const Vector& p) const {
  require_dim(*this, p, "euclidean_project");
  return std::visit(Overloaded{[&](const SimplexSet&) -> Vector { return project_simplex(p); },
                               [&](const BoxSet& b) -> Vector { return p.cwiseMax(b.lower).cwiseMin(b.upper); },
                               [&](const BallSet& b) -> Vector {
                                 const Vector offset = p - b.center;
                                 const double norm = offset.norm();
                                 if (norm <= b.radius) return p;
                                 return b.center + (b.radius / norm) * offset;
                               }},
                    shape_);
}

std::string ConstraintSet::describe() const {
  std::ostringstream out;
  out.precision(17);
  auto vec = [&](const Vector& v) {
    out << '[';
    for (Eigen::Index i = 0; i < v.size(); ++i) out << (i ? "," : "") << v(i);
    out << ']';
  };
  std::visit(Overloaded{[&](const SimplexSet& s) { out << "simplex(" << s.dim << ")"; },
                        [&](const BoxSet& b) {
                          out << "box(";
                          vec(b.lower);
                          out << ',';
                          vec(b.upper);
                          out << ')';
                        },
                        [&](const BallSet& b) {
                          out << "ball(";
                          vec(b.center);
                          out << ',' << b.radius << ')';
                        }},
             shape_);
  return out.str();
}

bool operator==(const ConstraintSet& a, const ConstraintSet& b) {
  if (a.kind() != b.kind()) return false;
  return std::visit(Overloaded{[&](const SimplexSet& s) { return s.dim == std::get<SimplexSet>(b.shape_).dim; },
                               [&](const BoxSet& s) {
                                 const auto& o = std::get<BoxSet>(b.shape_);
                                 return s.lower == o.lower && s.upper == o.upper;
                               },
                               [&](const BallSet& s) {
                                 const auto& o = std::get<BallSet>(b.shape_);
                                 return s.center == o.center && s.radius == o.radius;
                               }},
                    a.shape_);
}

// ---------------------------------------------------------------------------
// MirrorMap

MirrorMap MirrorMap::entropic(double interior_floor) {
  if (!(interior_floor >= 0.0) || interior_floor >= 1.0) throw ConfigError("interior_floor must lie in [0, 1)");
  MirrorMap map;
  map.kind = Kind::kEntropic;
  // Negative entropy is 1-strongly convex in |.|_2 on the simplex (its
  // Hessian diag(1/x_i) dominates the identity there).
  map.sigma_R = 1.0;
  map.rho_R = interior_floor > 0.0 ? 1.0 / interior_floor : std::numeric_limits<double>::infinity();
  map.interior_floor = interior_floor;
  return map;
}

MirrorMap MirrorMap::quadratic() { return MirrorMap{}; }

std::string MirrorMap::describe() const {
  std::ostringstream out;
  out.precision(17);
  if (is_entropic())
    out << "entropic(floor=" << interior_floor << ")";
  else
    out << "quadratic";
  return out.str();
}

void check_pairing(const MirrorMap& map, const ConstraintSet& set) {
  if (map.is_entropic() && set.kind() != ConstraintSet::Kind::kSimplex)
    throw UnsupportedPairing("the entropic mirror map is only paired with the probability simplex, got " +
                             set.describe());
}

double value_R(const MirrorMap& map, const Vector& x) {
  if (!map.is_entropic()) return 0.5 * x.squaredNorm();
  if (x.size() > 0 && x.minCoeff() < 0.0) throw DomainError("negative entropy is undefined for negative coordinates");
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) total += xlogx(x(i));
  return total;
}

Vector grad_R(const MirrorMap& map, const Vector& x) {
  if (!map.is_entropic()) return x;
  if (x.size() > 0 && !(x.minCoeff() > 0.0))
    throw DomainError("entropic gradient requires strictly positive coordinates");
  return (1.0 + x.array().log()).matrix();
}

MetricWeights hessian_diag(const MirrorMap& map, const Vector& x) {
  if (!map.is_entropic()) return MetricWeights{Vector::Ones(x.size())};
  if (x.size() > 0 && !(x.minCoeff() > 0.0))
    throw DomainError("entropic Hessian requires strictly positive coordinates");
  return MetricWeights{x.cwiseInverse()};
}

Vector conjugate_step(const MirrorMap& map, const ConstraintSet& set, const Vector& y) {
  check_pairing(map, set);
  if (y.size() != set.dim()) throw DomainError("conjugate_step: dimension mismatch");
  if (!y.allFinite()) throw DomainError("conjugate_step: non-finite dual point");
  if (!map.is_entropic()) return set.euclidean_project(y);

  // Softmax, shifted by the max so exp never overflows.
  Vector z = (y.array() - y.maxCoeff()).exp().matrix();
  z /= z.sum();
  if (map.interior_floor > 0.0 && z.minCoeff() < map.interior_floor) {
    z = z.cwiseMax(map.interior_floor);
    z /= z.sum();
  }
  return z;
}

Vector mirror_update(const MirrorMap& map, const ConstraintSet& set, const Vector& x, const Vector& d,
                     double alpha) {
  if (!(alpha >= 0.0)) throw DomainError("mirror_update: step size must be nonnegative");
  if (d.size() != x.size()) throw DomainError("mirror_update: direction dimension mismatch");
  return conjugate_step(map, set, grad_R(map, x) + alpha * d);
}

double bregman(const MirrorMap& map, const Vector& ref_point, const Vector& x) {
  if (ref_point.size() != x.size()) throw DomainError("bregman: dimension mismatch");
  if (!map.is_entropic()) return 0.5 * (ref_point - x).squaredNorm();
  if (!(x.minCoeff() > 0.0)) throw DomainError("bregman: second argument must lie in the open entropic domain");
  if (ref_point.minCoeff() < 0.0) throw DomainError("bregman: reference point has negative coordinates");
  // sum ref ln(ref/x) - ref + x, summed termwise to avoid cancellation.
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double r = ref_point(i);
    total += (r > 0.0 ? r * std::log(r / x(i)) : 0.0) - r + x(i);
  }
  return std::max(total, 0.0);
}

// ---------------------------------------------------------------------------
// Tangent cones

namespace {

Vector tangent_project_simplex(const Vector& x, const Vector& v, const Vector& w) {
  // minimize sum w_i (nu_i - v_i)^2  s.t.  sum nu = 0,  nu_i >= 0 on the active set.
  // Stationarity gives nu_i = v_i - lambda / w_i on free coordinates and
  // max(0, v_i - lambda / w_i) on active ones. The constraint residual is
  // decreasing in lambda, so clamping active coordinates one round at a time
  // only ever raises lambda and terminates after at most dim rounds.
  const auto n = x.size();
  std::vector<bool> active(n), clamped(n, false);
  for (Eigen::Index i = 0; i < n; ++i) active[i] = x(i) <= kActiveTol;

  double lambda = 0.0;
  for (Eigen::Index round = 0; round <= n; ++round) {
    double num = 0.0;
    double den = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (clamped[i]) continue;
      num += v(i);
      den += 1.0 / w(i);
    }
    lambda = num / den;
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (active[i] && !clamped[i] && v(i) - lambda / w(i) < 0.0) {
        clamped[i] = true;
        changed = true;
      }
    }
    if (!changed) break;
  }

  Vector nu(n);
  for (Eigen::Index i = 0; i < n; ++i) nu(i) = clamped[i] ? 0.0 : v(i) - lambda / w(i);
  return nu;
}

Vector tangent_project_box(const BoxSet& box, const Vector& x, const Vector& v) {
  Vector nu = v;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const bool at_lower = x(i) - box.lower(i) <= kActiveTol;
    const bool at_upper = box.upper(i) - x(i) <= kActiveTol;
    if (at_lower && at_upper)
      nu(i) = 0.0;
    else if (at_lower)
      nu(i) = std::max(v(i), 0.0);
    else if (at_upper)
      nu(i) = std::min(v(i), 0.0);
  }
  return nu;
}

Vector tangent_project_ball(const BallSet& ball, const Vector& x, const Vector& v, const Vector& w) {
  const Vector offset = x - ball.center;
  const double dist = offset.norm();
  if (dist < ball.radius - kActiveTol || dist == 0.0) return v;
  const Vector normal = offset / dist;
  const double outward = normal.dot(v);
  if (outward <= 0.0) return v;
  // Half-space {nu : <normal, nu> <= 0} in the weighted norm.
  const Vector winv_normal = normal.cwiseQuotient(w);
  return v - (outward / normal.dot(winv_normal)) * winv_normal;
}

}  // namespace

Vector tangent_project(const ConstraintSet& set, const Vector& x, const Vector& v, const MetricWeights& weights) {
  require_dim(set, x, "tangent_project");
  require_dim(set, v, "tangent_project");
  require_dim(set, weights.diag, "tangent_project");
  if (!set.contains(x, 1e-8)) throw DomainError("tangent_project: base point is not in the set");
  if (!(weights.diag.minCoeff() > 0.0)) throw DomainError("tangent_project: metric weights must be positive");

  return std::visit(Overloaded{[&](const SimplexSet&) { return tangent_project_simplex(x, v, weights.diag); },
                               [&](const BoxSet& b) { return tangent_project_box(b, x, v); },
                               [&](const BallSet& b) { return tangent_project_ball(b, x, v, weights.diag); }},
                    set.shape());
}

Vector sample_tangent_direction(const ConstraintSet& set, const Vector& x, Rng& rng) {
  require_dim(set, x, "sample_tangent_direction");
  Vector z = standard_normal_vector(x.size(), rng);
  return std::visit(Overloaded{[&](const SimplexSet&) -> Vector {
                                 // Active coordinates nonnegative, free ones absorb the sum.
                                 Eigen::Index free_count = 0;
                                 for (Eigen::Index i = 0; i < x.size(); ++i) {
                                   if (x(i) <= kActiveTol)
                                     z(i) = std::abs(z(i));
                                   else
                                     ++free_count;
                                 }
                                 const double shift = z.sum() / static_cast<double>(free_count);
                                 for (Eigen::Index i = 0; i < x.size(); ++i)
                                   if (x(i) > kActiveTol) z(i) -= shift;
                                 return z;
                               },
                               [&](const BoxSet& b) -> Vector {
                                 for (Eigen::Index i = 0; i < x.size(); ++i) {
                                   const bool lo = x(i) - b.lower(i) <= kActiveTol;
                                   const bool hi = b.upper(i) - x(i) <= kActiveTol;
                                   if (lo && hi)
                                     z(i) = 0.0;
                                   else if (lo)
                                     z(i) = std::abs(z(i));
                                   else if (hi)
                                     z(i) = -std::abs(z(i));
                                 }
                                 return z;
                               },
                               [&](const BallSet& b) -> Vector {
                                 const Vector offset = x - b.center;
                                 const double dist = offset.norm();
                                 if (dist < b.radius - kActiveTol || dist == 0.0) return z;
                                 const Vector normal = offset / dist;
                                 const double outward = normal.dot(z);
                                 if (outward > 0.0) z -= (1.0 + uniform01(rng)) * outward * normal;
                                 return z;
                               }},
                    set.shape());
}

// ---------------------------------------------------------------------------
// Gateaux limit and norm equivalence

Vector gateaux_limit(const MirrorMap& map, const ConstraintSet& set, const Vector& x, const Vector& d) {
  const MetricWeights h = hessian_diag(map, x);
  return tangent_project(set, x, d.cwiseQuotient(h.diag), h);
}

std::vector<GateauxDeviation> gateaux_check(const MirrorMap& map, const ConstraintSet& set, const Vector& x,
                                            const Vector& d, std::span<const double> alphas) {
  const Vector limit = gateaux_limit(map, set, x, d);
  std::vector<GateauxDeviation> out;
  out.reserve(alphas.size());
  for (double alpha : alphas) {
    if (!(alpha > 0.0)) throw DomainError("gateaux_check: step sizes must be positive");
    const Vector quotient = (mirror_update(map, set, x, d, alpha) - x) / alpha;
    out.push_back({alpha, (quotient - limit).norm()});
  }
  return out;
}

NormEquivalence norm_equivalence_bounds(const MirrorMap& map, std::span<const Vector> points) {
  if (points.empty()) throw DomainError("norm_equivalence_bounds: need at least one point");
  double hi = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  for (const Vector& p : points) {
    const MetricWeights w = hessian_diag(map, p);
    hi = std::max(hi, w.diag.maxCoeff());
    lo = std::min(lo, w.diag.minCoeff());
  }
  return {std::sqrt(hi), std::sqrt(lo)};
}

NormEquivalence norm_equivalence_bounds(const MirrorMap& map, const ConstraintSet& set, int sample_count,
                                        Rng& rng) {
  if (sample_count < 1) throw DomainError("norm_equivalence_bounds: sample_count must be >= 1");
  check_pairing(map, set);
  const double floor = map.is_entropic() ? map.interior_floor : 0.0;
  const double scale = 1.0 - floor * set.dim();
  if (map.is_entropic() && scale <= 0.0) throw ConfigError("interior_floor too large for the simplex dimension");

  std::vector<Vector> points;
  points.reserve(sample_count);
  for (int k = 0; k < sample_count; ++k) {
    Vector p = set.sample(rng);
    if (map.is_entropic()) p = (floor + scale * p.array()).matrix();
    points.push_back(std::move(p));
  }
  return norm_equivalence_bounds(map, points);
}

}  // namespace smd
