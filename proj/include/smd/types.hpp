#pragma once

#include <array>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace smd {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// All randomness flows through a caller-owned engine. The engine is seeded
// from a 64-bit seed through splitmix64 so nearby seeds give unrelated streams.
using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Stream `stream` of seed `seed`. Stream 0 is what a run with this seed uses;
// other streams are reserved for auxiliary sampling (validation, probes).
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  std::uint64_t state = seed ^ (stream * 0xd1b54a32d192ed03ULL);
  std::array<std::uint32_t, 8> words{};
  for (std::size_t i = 0; i < words.size(); i += 2) {
    const std::uint64_t w = splitmix64(state);
    words[i] = static_cast<std::uint32_t>(w);
    words[i + 1] = static_cast<std::uint32_t>(w >> 32);
  }
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

// Standard normal vector. Box-Muller on the engine's raw output keeps the
// sequence identical across standard library implementations.
inline double standard_normal(Rng& rng) {
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  const double u1 = (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline Vector standard_normal_vector(Eigen::Index n, Rng& rng) {
  Vector u(n);
  for (Eigen::Index i = 0; i < n; ++i) u(i) = standard_normal(rng);
  return u;
}

}  // namespace smd
