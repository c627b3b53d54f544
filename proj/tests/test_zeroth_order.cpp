#include <cmath>

#include <gtest/gtest.h>

#include "smd/errors.hpp"
#include "smd/zeroth_order.hpp"

namespace smd {
namespace {

Vector v1(double a) { return (Vector(1) << a).finished(); }
Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }

struct MonteCarlo {
  Vector mean;
  Vector sd;  // per-coordinate standard deviation of one draw
};

MonteCarlo monte_carlo(const std::function<double(const Vector&)>& f, const Vector& z, double mu, int samples,
                       std::uint64_t seed) {
  Rng rng = make_rng(seed);
  Vector sum = Vector::Zero(z.size()), sq = Vector::Zero(z.size());
  for (int k = 0; k < samples; ++k) {
    const Vector g = gaussian_estimate(f, z, mu, rng);
    sum += g;
    sq += g.cwiseAbs2();
  }
  const Vector mean = sum / samples;
  return {mean, (sq / samples - mean.cwiseAbs2()).cwiseMax(0.0).cwiseSqrt()};
}

TEST(ZerothOrder, SmoothingSchedules) {
  const auto c = SmoothingSchedule::constant(0.1);
  EXPECT_EQ(c.mu(0), 0.1);
  EXPECT_EQ(c.mu(1000000), 0.1);
  const auto g = SmoothingSchedule::geometric(0.1, 0.5, 1e-8);
  EXPECT_EQ(g.mu(0), 0.1);
  EXPECT_EQ(g.mu(3), 0.0125);
  // Would underflow to zero without the floor.
  EXPECT_EQ(g.mu(5000), 1e-8);
  EXPECT_THROW(SmoothingSchedule::constant(0.0), ConfigError);
  EXPECT_THROW(SmoothingSchedule::geometric(0.1, 1.0), ConfigError);
}

TEST(ZerothOrder, LinearFunctionIsUnbiased) {
  const Vector c = (Vector(4) << 1.0, -2.0, 0.5, 3.0).finished();
  auto f = [&](const Vector& z) { return c.dot(z); };
  const int M = 200000;
  const MonteCarlo mc = monte_carlo(f, Vector::Zero(4), 0.3, M, 1);
  for (int i = 0; i < 4; ++i) EXPECT_LE(std::abs(mc.mean(i) - c(i)), 3 * mc.sd(i) / std::sqrt(M));
}

TEST(ZerothOrder, CubicBiasMatchesGaussianMoments) {
  // f = z0^3: E[s u] = grad f + (3 mu^2, 0, 0) since E[u0^4] = 3 and the
  // odd moments vanish.
  auto f = [](const Vector& z) { return z(0) * z(0) * z(0); };
  const Vector z = (Vector(3) << 0.5, -0.2, 0.1).finished();
  const double mu = 0.5;
  const int M = 400000;
  const MonteCarlo mc = monte_carlo(f, z, mu, M, 2);
  const Vector expected = (Vector(3) << 3 * 0.25 + 3 * mu * mu, 0.0, 0.0).finished();
  for (int i = 0; i < 3; ++i) EXPECT_LE(std::abs(mc.mean(i) - expected(i)), 3 * mc.sd(i) / std::sqrt(M));
}

TEST(ZerothOrder, BiasShrinksWithMu) {
  auto f = [](const Vector& z) { return z(0) * z(0) * z(0) + std::sin(z(1)); };
  const Vector z = v2(0.5, 0.3);
  const Vector truth = v2(0.75, std::cos(0.3));
  const int M = 200000;
  double previous = INFINITY;
  for (double mu : {0.5, 0.05, 0.005}) {
    const MonteCarlo mc = monte_carlo(f, z, mu, M, 3);
    const double bias = (mc.mean - truth).norm();
    const double band = 3 * mc.sd.norm() / std::sqrt(M);
    EXPECT_LE(bias, previous + band) << "mu=" << mu;
    previous = bias;
  }
}

TEST(ZerothOrder, QuadraticSaddleAtOriginIsCentered) {
  QuadraticSaddle q{Matrix::Identity(1, 1), Matrix::Identity(1, 1), Matrix::Zero(1, 1), v1(0), v1(0)};
  const auto p = SaddleProblem::quadratic_saddle(q, ConstraintSet::ball(v1(0), 1), ConstraintSet::ball(v1(0), 1),
                                                 {{v1(0), v1(0)}});
  Rng rng = make_rng(4);
  const BiasProbe probe = bias_second_moment_probe(p, v1(0), v1(0), 0.1, 100000, rng);
  EXPECT_LE(probe.bias_norm, probe.mc_band);
}

TEST(ZerothOrder, ProbeContractAndStableSecondMoment) {
  QuadraticSaddle q{(Matrix(2, 2) << 2, 0.5, 0.5, 1).finished(), (Matrix(2, 2) << 1, 0, 0, 3).finished(),
                    (Matrix(2, 2) << 1, -2, 0.5, 1).finished(), v2(0.3, -0.2), v2(-0.1, 0.4)};
  const auto p = SaddleProblem::quadratic_saddle(q, ConstraintSet::box(v2(-1, -1), v2(1, 1)),
                                                 ConstraintSet::box(v2(-1, -1), v2(1, 1)));
  Rng rng = make_rng(5);
  const BiasProbe a = bias_second_moment_probe(p, v2(0.2, -0.3), v2(0.4, 0.1), 0.1, 100000, rng);
  const BiasProbe b = bias_second_moment_probe(p, v2(0.2, -0.3), v2(0.4, 0.1), 0.01, 100000, rng);
  EXPECT_TRUE(a.within_bound(0.1));
  EXPECT_TRUE(b.within_bound(0.01));
  EXPECT_LE(a.second_moment, 2 * b.second_moment);
  EXPECT_LE(b.second_moment, 2 * a.second_moment);
  EXPECT_THROW(bias_second_moment_probe(p, v2(0, 0), v2(0, 0), 0.1, 999, rng), DomainError);
}

TEST(ZerothOrder, ReplayIsBitIdentical) {
  const auto mp = SaddleProblem::matching_pennies();
  Rng a = make_rng(77);
  Rng b = make_rng(77);
  for (int k = 0; k < 10; ++k) {
    const auto ea = gaussian_estimate(mp, v2(0.3, 0.7), v2(0.6, 0.4), 0.05, a);
    const auto eb = gaussian_estimate(mp, v2(0.3, 0.7), v2(0.6, 0.4), 0.05, b);
    EXPECT_EQ(ea.g_x_hat, eb.g_x_hat);
    EXPECT_EQ(ea.g_y_hat, eb.g_y_hat);
  }
}

TEST(ZerothOrder, SecondMomentBoundedOverFeasibleSample) {
  const auto mp = SaddleProblem::matching_pennies();
  Rng rng = make_rng(8);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Vector x = mp.x_set().sample(rng);
    const Vector y = mp.y_set().sample(rng);
    worst = std::max(worst, bias_second_moment_probe(mp, x, y, 0.1, 1000, rng).second_moment);
  }
  EXPECT_TRUE(std::isfinite(worst));
  EXPECT_GT(worst, 0.0);
}

}  // namespace
}  // namespace smd
