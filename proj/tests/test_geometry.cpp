#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "smd/errors.hpp"
#include "smd/geometry.hpp"

namespace smd {
namespace {

Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }

std::vector<ConstraintSet> sample_sets() {
  return {ConstraintSet::simplex(3), ConstraintSet::box(v2(-1, 0), v2(1, 2)), ConstraintSet::ball(v2(0.5, -0.5), 1.5)};
}

TEST(Geometry, GradRExamples) {
  EXPECT_DOUBLE_EQ(grad_R(MirrorMap::entropic(), Vector::Ones(1))(0), 1.0);
  const Vector q = grad_R(MirrorMap::quadratic(), v2(0.3, -0.7));
  EXPECT_DOUBLE_EQ(q(0), 0.3);
  EXPECT_DOUBLE_EQ(q(1), -0.7);
  const Vector e = grad_R(MirrorMap::entropic(), v2(0.5, 0.5));
  EXPECT_NEAR(e(0), 1.0 - std::log(2.0), 1e-15);
  EXPECT_NEAR(e(1), 0.30685, 1e-5);
  EXPECT_THROW(grad_R(MirrorMap::entropic(), v2(1.0, 0.0)), DomainError);
}

TEST(Geometry, HessianExamples) {
  const Vector h = hessian_diag(MirrorMap::entropic(), v2(0.1, 0.9)).diag;
  EXPECT_NEAR(h(0), 10.0, 1e-12);
  EXPECT_NEAR(h(1), 10.0 / 9.0, 1e-12);
  EXPECT_EQ(hessian_diag(MirrorMap::quadratic(), v2(3, 4)).diag, Vector::Ones(2));
}

TEST(Geometry, ConjugateStepExamples) {
  const auto simplex = ConstraintSet::simplex(2);
  const Vector a = conjugate_step(MirrorMap::entropic(), simplex, v2(0, 0));
  EXPECT_NEAR(a(0), 0.5, 1e-15);
  const Vector b = conjugate_step(MirrorMap::entropic(), simplex, v2(std::log(1.0), std::log(2.0)));
  EXPECT_NEAR(b(0), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(b(1), 2.0 / 3.0, 1e-15);
  const Vector c = conjugate_step(MirrorMap::quadratic(), ConstraintSet::box(v2(0, 0), v2(1, 1)), v2(1.1, -0.1));
  EXPECT_EQ(c, v2(1.0, 0.0));
  const Vector d = conjugate_step(MirrorMap::quadratic(), ConstraintSet::ball(v2(0, 0), 1.0), v2(3, 4));
  EXPECT_NEAR(d(0), 0.6, 1e-15);
  EXPECT_NEAR(d(1), 0.8, 1e-15);
}

TEST(Geometry, EntropicConjugateStepSurvivesLargeInputs) {
  const Vector z = conjugate_step(MirrorMap::entropic(), ConstraintSet::simplex(2), v2(1000.0, 0.0));
  EXPECT_TRUE(z.allFinite());
  EXPECT_NEAR(z.sum(), 1.0, 1e-15);
  // Clipped to the floor, then renormalized.
  EXPECT_GE(z.minCoeff(), 1e-12 / (1 + 1e-11));
}

TEST(Geometry, UnsupportedPairing) {
  EXPECT_THROW(conjugate_step(MirrorMap::entropic(), ConstraintSet::box(v2(0, 0), v2(1, 1)), v2(0, 0)),
               UnsupportedPairing);
  EXPECT_THROW(check_pairing(MirrorMap::entropic(), ConstraintSet::ball(v2(0, 0), 1.0)), UnsupportedPairing);
  EXPECT_NO_THROW(check_pairing(MirrorMap::quadratic(), ConstraintSet::simplex(4)));
}

TEST(Geometry, MirrorUpdateExamples) {
  const auto simplex = ConstraintSet::simplex(2);
  for (const auto& map : {MirrorMap::entropic(), MirrorMap::quadratic()})
    EXPECT_NEAR((mirror_update(map, simplex, v2(0.5, 0.5), v2(3, -1), 0.0) - v2(0.5, 0.5)).norm(), 0.0, 1e-15);
  const Vector e = mirror_update(MirrorMap::entropic(), simplex, v2(0.5, 0.5), v2(-1, 0), std::log(2.0));
  EXPECT_NEAR(e(0), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(e(1), 2.0 / 3.0, 1e-15);
  const Vector q =
      mirror_update(MirrorMap::quadratic(), ConstraintSet::box(v2(0, 0), v2(1, 1)), v2(0.9, 0.1), v2(-1, 1), 0.2);
  EXPECT_NEAR(q(0), 0.7, 1e-15);
  EXPECT_NEAR(q(1), 0.3, 1e-15);
}

TEST(Geometry, BregmanExamples) {
  EXPECT_NEAR(bregman(MirrorMap::entropic(), v2(1, 0), v2(0.5, 0.5)), std::log(2.0), 1e-15);
  EXPECT_NEAR(bregman(MirrorMap::quadratic(), v2(1, 0), v2(0, 0)), 0.5, 1e-15);
  EXPECT_EQ(bregman(MirrorMap::entropic(), v2(0.3, 0.7), v2(0.3, 0.7)), 0.0);
  EXPECT_THROW(bregman(MirrorMap::entropic(), v2(0.5, 0.5), v2(1.0, 0.0)), DomainError);
}

TEST(Geometry, BregmanStrongConvexityProperty) {
  Rng rng = make_rng(11);
  const auto simplex = ConstraintSet::simplex(4);
  for (int k = 0; k < 200; ++k) {
    const Vector r = simplex.sample(rng);
    const Vector x = 0.99 * simplex.sample(rng) + 0.01 * simplex.barycenter();
    // Pinsker-type bound with sigma = 1 in the l2 norm.
    EXPECT_GE(bregman(MirrorMap::entropic(), r, x) + 1e-14, 0.5 * (r - x).squaredNorm());
    // Independent oracle: KL summation.
    double kl = 0.0;
    for (int i = 0; i < 4; ++i)
      if (r(i) > 0) kl += r(i) * std::log(r(i) / x(i));
    EXPECT_NEAR(bregman(MirrorMap::entropic(), r, x), kl, 1e-12);
  }
}

TEST(Geometry, EuclideanProjectExamples) {
  EXPECT_EQ(ConstraintSet::simplex(2).euclidean_project(v2(2, 0)), v2(1, 0));
  const Vector b = ConstraintSet::ball(v2(0, 0), 1.0).euclidean_project(v2(3, 4));
  EXPECT_NEAR(b(0), 0.6, 1e-15);
  EXPECT_NEAR(b(1), 0.8, 1e-15);
  Rng rng = make_rng(3);
  for (const auto& set : sample_sets()) {
    for (int k = 0; k < 50; ++k) {
      const Vector p = set.sample(rng);
      EXPECT_LE((set.euclidean_project(p) - p).norm(), 1e-12);
    }
  }
}

// Brute-force minimizer over a grid of feasible points.
Vector grid_project(const ConstraintSet& set, const Vector& p, double lo, double hi, int steps) {
  Vector best;
  double best_d = INFINITY;
  const int dim = set.dim();
  std::vector<int> idx(static_cast<std::size_t>(dim), 0);
  while (true) {
    Vector z(dim);
    for (int i = 0; i < dim; ++i) z(i) = lo + (hi - lo) * idx[static_cast<std::size_t>(i)] / steps;
    if (set.kind() == ConstraintSet::Kind::kSimplex) {
      if (dim > 1) z(dim - 1) = 1.0 - z.head(dim - 1).sum();
    }
    if (set.contains(z, 1e-9)) {
      const double d = (z - p).norm();
      if (d < best_d) {
        best_d = d;
        best = z;
      }
    }
    int i = 0;
    const int free_dims = set.kind() == ConstraintSet::Kind::kSimplex ? dim - 1 : dim;
    while (i < free_dims && ++idx[static_cast<std::size_t>(i)] > steps) idx[static_cast<std::size_t>(i++)] = 0;
    if (i == free_dims) break;
  }
  return best;
}

TEST(Geometry, EuclideanProjectMatchesGridSearch) {
  Rng rng = make_rng(5);
  const std::vector<ConstraintSet> sets = {ConstraintSet::simplex(2), ConstraintSet::simplex(3),
                                           ConstraintSet::box(v2(-1, 0), v2(1, 2)),
                                           ConstraintSet::ball(v2(0.2, 0.1), 1.0)};
  for (const auto& set : sets) {
    const int steps = set.dim() == 3 ? 200 : 400;
    const double lo = set.kind() == ConstraintSet::Kind::kSimplex ? 0.0 : -1.5;
    const double hi = set.kind() == ConstraintSet::Kind::kSimplex ? 1.0 : 2.5;
    const double resolution = (hi - lo) / steps;
    for (int k = 0; k < 5; ++k) {
      const Vector p = set.barycenter() + 1.5 * standard_normal_vector(set.dim(), rng);
      const Vector exact = set.euclidean_project(p);
      const Vector grid = grid_project(set, p, lo, hi, steps);
      // Distances agree to grid resolution; the exact one is never worse.
      EXPECT_LE((exact - p).norm(), (grid - p).norm() + 1e-12);
      EXPECT_LE((grid - p).norm() - (exact - p).norm(), 2.0 * resolution * set.dim());
    }
  }
}

TEST(Geometry, TangentProjectExamples) {
  const auto simplex = ConstraintSet::simplex(2);
  const Vector a = tangent_project(simplex, v2(0.5, 0.5), v2(0.5, 0), MetricWeights{v2(2, 2)});
  EXPECT_NEAR(a(0), 0.25, 1e-15);
  EXPECT_NEAR(a(1), -0.25, 1e-15);
  const Vector b = tangent_project(ConstraintSet::box(v2(0, 0), v2(1, 1)), v2(1, 0.5), v2(1, 1), MetricWeights{v2(1, 1)});
  EXPECT_EQ(b, v2(0, 1));
  const Vector c = tangent_project(ConstraintSet::ball(v2(0, 0), 1.0), v2(0.1, 0.2), v2(7, -3), MetricWeights{v2(3, 1)});
  EXPECT_EQ(c, v2(7, -3));
  EXPECT_THROW(tangent_project(simplex, v2(0.7, 0.7), v2(1, 0), MetricWeights{v2(1, 1)}), DomainError);
}

TEST(Geometry, TangentProjectSimplexInteriorClosedForm) {
  // Interior simplex point: the cone is {sum nu = 0}; the weighted
  // projection is v - lambda / w with lambda = sum v / sum(1 / w).
  Rng rng = make_rng(8);
  const auto simplex = ConstraintSet::simplex(5);
  for (int k = 0; k < 50; ++k) {
    const Vector x = 0.5 * simplex.sample(rng) + 0.5 * simplex.barycenter();
    const Vector w = x.cwiseInverse();
    const Vector v = standard_normal_vector(5, rng);
    const double lambda = v.sum() / w.cwiseInverse().sum();
    const Vector oracle = v - lambda * w.cwiseInverse();
    EXPECT_LE((tangent_project(simplex, x, v, MetricWeights{w}) - oracle).norm(), 1e-12);
  }
}

TEST(Geometry, TangentProjectProperties) {
  Rng rng = make_rng(13);
  for (const auto& set : sample_sets()) {
    for (int k = 0; k < 100; ++k) {
      Vector x = set.sample(rng);
      if (k % 3 == 0) x = set.euclidean_project(set.barycenter() + 3.0 * standard_normal_vector(set.dim(), rng));
      const MetricWeights w{(standard_normal_vector(set.dim(), rng).array().abs() + 0.2).matrix()};
      const Vector v = 2.0 * standard_normal_vector(set.dim(), rng);
      const Vector nu = tangent_project(set, x, v, w);
      // Idempotence.
      EXPECT_LE((tangent_project(set, x, nu, w) - nu).norm(), 1e-10);
      // Moreau: nu orthogonal to eta, eta polar to sampled tangent directions,
      // and the variational inequality <nu - v, nu - t>_w <= 0.
      const Vector eta = v - nu;
      EXPECT_LE(std::abs(w.inner(nu, eta)), 1e-10);
      for (int j = 0; j < 20; ++j) {
        const Vector t = sample_tangent_direction(set, x, rng);
        EXPECT_LE(w.inner(eta, t), 1e-10);
        EXPECT_LE(w.inner(nu - v, nu - t), 1e-10);
      }
    }
  }
}

TEST(Geometry, GateauxLimitAtBarycenter) {
  const auto simplex = ConstraintSet::simplex(2);
  const Vector limit = gateaux_limit(MirrorMap::entropic(), simplex, v2(0.5, 0.5), v2(1, 0));
  EXPECT_NEAR(limit(0), 0.25, 1e-15);
  EXPECT_NEAR(limit(1), -0.25, 1e-15);
  // Cross-check against a central difference of the mirror step.
  const double a = 1e-6;
  const Vector central = (mirror_update(MirrorMap::entropic(), simplex, v2(0.5, 0.5), v2(1, 0), a) -
                          mirror_update(MirrorMap::entropic(), simplex, v2(0.5, 0.5), v2(-1, 0), a)) /
                         (2 * a);
  EXPECT_LE((central - limit).norm(), 1e-8);
}

TEST(Geometry, GateauxDeviationHalvesAtGenericPoint) {
  const auto simplex = ConstraintSet::simplex(3);
  const Vector x = (Vector(3) << 0.2, 0.3, 0.5).finished();
  const Vector d = (Vector(3) << 1.0, -0.4, 0.3).finished();
  const std::vector<double> alphas = {1e-2, 5e-3, 2.5e-3, 1.25e-3, 6.25e-4};
  const auto devs = gateaux_check(MirrorMap::entropic(), simplex, x, d, alphas);
  for (std::size_t k = 1; k < devs.size(); ++k) {
    const double ratio = devs[k].deviation / devs[k - 1].deviation;
    EXPECT_GE(ratio, 0.3);
    EXPECT_LE(ratio, 0.7);
  }
  const std::vector<double> decades = {1e-2, 1e-3, 1e-4};
  const auto dec = gateaux_check(MirrorMap::entropic(), simplex, x, d, decades);
  EXPECT_LE(dec[1].deviation, 1.1 * dec[0].deviation);
  EXPECT_LE(dec[2].deviation, 1.1 * dec[1].deviation);
}

TEST(Geometry, GateauxQuadraticInteriorIsExact) {
  const auto box = ConstraintSet::box(v2(0, 0), v2(1, 1));
  const std::vector<double> alphas = {1e-2, 1e-3};
  for (const auto& g : gateaux_check(MirrorMap::quadratic(), box, v2(0.4, 0.6), v2(1, -2), alphas))
    EXPECT_LE(g.deviation, 1e-12);
}

TEST(Geometry, NormEquivalence) {
  Rng rng = make_rng(1);
  const auto simplex = ConstraintSet::simplex(2);
  const auto q = norm_equivalence_bounds(MirrorMap::quadratic(), simplex, 50, rng);
  EXPECT_EQ(q.kappa1, 1.0);
  EXPECT_EQ(q.kappa2, 1.0);
  const auto e = norm_equivalence_bounds(MirrorMap::entropic(0.01), simplex, 2000, rng);
  EXPECT_LE(e.kappa1 * e.kappa1, 100.0 + 1e-9);
  EXPECT_GE(e.kappa2 * e.kappa2, 1.0 - 1e-12);
  const std::vector<Vector> bary = {v2(0.5, 0.5)};
  const auto b = norm_equivalence_bounds(MirrorMap::entropic(), bary);
  EXPECT_NEAR(b.kappa1, std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(b.kappa2, std::sqrt(2.0), 1e-15);
}

TEST(Geometry, ConjugateStepAlwaysFeasible) {
  Rng rng = make_rng(21);
  for (const auto& set : sample_sets()) {
    for (int k = 0; k < 100; ++k) {
      const Vector y = 10.0 * standard_normal_vector(set.dim(), rng);
      EXPECT_TRUE(set.contains(conjugate_step(MirrorMap::quadratic(), set, y), 1e-10));
    }
  }
  const auto simplex = ConstraintSet::simplex(3);
  for (int k = 0; k < 100; ++k)
    EXPECT_TRUE(simplex.contains(conjugate_step(MirrorMap::entropic(), simplex, 50.0 * standard_normal_vector(3, rng))));
}

TEST(Geometry, FactoriesRejectBadShapes) {
  EXPECT_THROW(ConstraintSet::simplex(0), ConfigError);
  EXPECT_THROW(ConstraintSet::box(v2(1, 0), v2(0, 1)), ConfigError);
  EXPECT_THROW(ConstraintSet::ball(v2(0, 0), -1.0), ConfigError);
}

}  // namespace
}  // namespace smd
