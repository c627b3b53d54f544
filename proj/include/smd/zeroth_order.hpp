#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "smd/problems.hpp"
#include "smd/types.hpp"

namespace smd {

/// mu(n) for the Gaussian smoothing parameter.
///   constant:  mu(n) = mu
///   geometric: mu(n) = max(mu0 * decay^n, floor)
/// The floor keeps mu(n) a positive normal number once the geometric term
/// would underflow; it defaults to 1e-8, below which the forward difference
/// is dominated by rounding.
struct SmoothingSchedule {
  enum class Kind { kConstant, kGeometric };

  Kind kind = Kind::kConstant;
  double mu0 = 0.1;
  double decay = 1.0;
  double floor = 1e-8;

  static SmoothingSchedule constant(double mu);
  static SmoothingSchedule geometric(double mu0, double decay, double floor = 1e-8);

  double mu(std::uint64_t n) const;
  std::string describe() const;

  friend bool operator==(const SmoothingSchedule&, const SmoothingSchedule&) = default;
};

struct ZerothOrderEstimate {
  Vector g_x_hat;
  Vector g_y_hat;
};

/// Single-draw Gaussian smoothing estimate at (x, y):
///   u ~ N(0, I_{n+m}),  s = (L((x, y) + mu u) - L(x, y)) / mu,  return s u.
/// The perturbed point may leave X x Y; the bifunction formula is evaluated
/// there directly.
ZerothOrderEstimate gaussian_estimate(const SaddleProblem& problem, const Vector& x, const Vector& y, double mu,
                                      Rng& rng);

/// The same estimator for an arbitrary function of a stacked point z.
Vector gaussian_estimate(const std::function<double(const Vector&)>& f, const Vector& z, double mu, Rng& rng);

struct BiasProbe {
  double bias_norm;      // |empirical mean - exact gradient|_2
  double second_moment;  // empirical mean of |estimate|_2^2
  double mc_band;        // 3 * sqrt(second_moment / samples)
  double bias_constant;  // c in bias_norm <= c mu + mc_band
  int samples;

  bool within_bound(double mu) const { return bias_norm <= bias_constant * mu + mc_band; }
};

/// Monte-Carlo bias and second moment of gaussian_estimate at (x, y).
/// bias_constant is 1/2 * |joint Hessian| * (n + m + 3)^{3/2}, the standard
/// bound for functions with Lipschitz gradient.
BiasProbe bias_second_moment_probe(const SaddleProblem& problem, const Vector& x, const Vector& y, double mu,
                                   int samples, Rng& rng);

}  // namespace smd
