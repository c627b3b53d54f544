#include "smd/zeroth_order.hpp"

#include <cmath>
#include <sstream>

#include "smd/errors.hpp"

namespace smd {

SmoothingSchedule SmoothingSchedule::constant(double mu) {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw ConfigError("smoothing mu must be positive");
  return {Kind::kConstant, mu, 1.0, 0.0};
}

SmoothingSchedule SmoothingSchedule::geometric(double mu0, double decay, double floor) {
  if (!(mu0 > 0.0) || !std::isfinite(mu0)) throw ConfigError("smoothing mu0 must be positive");
  if (!(decay > 0.0 && decay < 1.0)) throw ConfigError("smoothing decay must lie in (0, 1)");
  if (!(floor > 0.0) || floor > mu0) throw ConfigError("smoothing floor must lie in (0, mu0]");
  return {Kind::kGeometric, mu0, decay, floor};
}

double SmoothingSchedule::mu(std::uint64_t n) const {
  if (kind == Kind::kConstant) return mu0;
  return std::max(mu0 * std::pow(decay, static_cast<double>(n)), floor);
}

std::string SmoothingSchedule::describe() const {
  std::ostringstream out;
  out.precision(17);
  if (kind == Kind::kConstant)
    out << "constant(" << mu0 << ")";
  else
    out << "geometric(" << mu0 << "," << decay << "," << floor << ")";
  return out.str();
}

Vector gaussian_estimate(const std::function<double(const Vector&)>& f, const Vector& z, double mu, Rng& rng) {
  if (!(mu > 0.0)) throw DomainError("gaussian_estimate: mu must be positive");
  const Vector u = standard_normal_vector(z.size(), rng);
  const double base = f(z);
  const double shifted = f(z + mu * u);
  if (!std::isfinite(base) || !std::isfinite(shifted))
    throw DomainError("gaussian_estimate: function undefined at the perturbed point");
  return ((shifted - base) / mu) * u;
}

ZerothOrderEstimate gaussian_estimate(const SaddleProblem& problem, const Vector& x, const Vector& y, double mu,
                                      Rng& rng) {
  const auto n = x.size();
  const auto m = y.size();
  Vector z(n + m);
  z << x, y;
  auto stacked = [&](const Vector& w) { return problem.bifunction(w.head(n), w.tail(m)); };
  const Vector g = gaussian_estimate(stacked, z, mu, rng);
  return {g.head(n), g.tail(m)};
}

BiasProbe bias_second_moment_probe(const SaddleProblem& problem, const Vector& x, const Vector& y, double mu,
                                   int samples, Rng& rng) {
  if (samples < 1000) throw DomainError("bias_second_moment_probe: need at least 1000 samples");
  const auto n = x.size();
  const auto m = y.size();
  const Gradients exact = gradients(problem, x, y);
  Vector truth(n + m);
  truth << exact.g_x, exact.g_y;

  Vector sum = Vector::Zero(n + m);
  double sum_sq = 0.0;
  for (int k = 0; k < samples; ++k) {
    const ZerothOrderEstimate e = gaussian_estimate(problem, x, y, mu, rng);
    sum.head(n) += e.g_x_hat;
    sum.tail(m) += e.g_y_hat;
    sum_sq += e.g_x_hat.squaredNorm() + e.g_y_hat.squaredNorm();
  }
  const double count = samples;
  BiasProbe probe{};
  probe.samples = samples;
  probe.bias_norm = (sum / count - truth).norm();
  probe.second_moment = sum_sq / count;
  probe.mc_band = 3.0 * std::sqrt(probe.second_moment / count);
  probe.bias_constant = 0.5 * problem.joint_hessian_norm() * std::pow(static_cast<double>(n + m) + 3.0, 1.5);
  return probe;
}

}  // namespace smd
