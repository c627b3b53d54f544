#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "smd/geometry.hpp"
#include "smd/types.hpp"

namespace smd {

/// L(x, y) = x^T A y, both players on simplices.
struct MatrixGame {
  Matrix A;
};

/// L(x, y) = 1/2 x^T P x + c^T x + x^T C y - 1/2 y^T Q y - d^T y, P and Q PSD.
struct QuadraticSaddle {
  Matrix P;
  Matrix Q;
  Matrix C;
  Vector c;
  Vector d;
};

struct SaddlePoint {
  Vector x;
  Vector y;

  friend bool operator==(const SaddlePoint&, const SaddlePoint&) = default;
};

struct Gradients {
  Vector g_x;  // (sub)gradient in x
  Vector g_y;  // (super)gradient in y
};

struct OracleSample {
  Vector g_x;
  Vector g_y;
  std::uint64_t noise_draws = 0;
};

struct NoiseModel {
  enum class Kind { kNone, kGaussian, kColumnSampling };

  Kind kind = Kind::kNone;
  double std = 0.0;

  static NoiseModel none() { return {}; }
  static NoiseModel gaussian(double std);
  static NoiseModel column_sampling() { return {Kind::kColumnSampling, 0.0}; }

  std::string describe() const;

  friend bool operator==(const NoiseModel&, const NoiseModel&) = default;
};

struct SaddleDistance {
  double euclidean;
  double bregman;
};

/// A convex-concave bifunction on a product of constraint sets, immutable
/// after construction. Constructors validate convexity structure, the
/// reference saddles, and estimate the gradient bound G.
class SaddleProblem {
 public:
  using Family = std::variant<MatrixGame, QuadraticSaddle>;

  static SaddleProblem matrix_game(Matrix A, std::vector<SaddlePoint> reference_saddles = {});
  static SaddleProblem quadratic_saddle(QuadraticSaddle q, ConstraintSet x_set, ConstraintSet y_set,
                                        std::vector<SaddlePoint> reference_saddles = {});

  /// [[1, -1], [-1, 1]] with its unique equilibrium (1/2, 1/2) x (1/2, 1/2).
  static SaddleProblem matching_pennies();

  const Family& family() const { return family_; }
  bool is_matrix_game() const { return std::holds_alternative<MatrixGame>(family_); }
  const ConstraintSet& x_set() const { return x_set_; }
  const ConstraintSet& y_set() const { return y_set_; }
  int x_dim() const { return x_set_.dim(); }
  int y_dim() const { return y_set_.dim(); }
  double G() const { return G_; }
  const std::vector<SaddlePoint>& reference_saddles() const { return reference_saddles_; }

  /// Closed-form bifunction value with no feasibility check. Defined on all
  /// of R^n x R^m for the built-in families.
  double bifunction(const Vector& x, const Vector& y) const;
  Gradients gradient_formula(const Vector& x, const Vector& y) const;

  /// Spectral norm of the joint Hessian [[P, C], [C^T, -Q]] (zero diagonal
  /// blocks for matrix games).
  double joint_hessian_norm() const;

  void require_feasible(const Vector& x, const Vector& y, double tol = 1e-8) const;

  std::string describe() const;

 private:
  SaddleProblem(Family family, ConstraintSet x_set, ConstraintSet y_set, std::vector<SaddlePoint> refs);
  void validate_reference_saddles() const;
  double estimate_G() const;

  Family family_;
  ConstraintSet x_set_;
  ConstraintSet y_set_;
  std::vector<SaddlePoint> reference_saddles_;
  double G_ = 0.0;
};

double eval_L(const SaddleProblem& problem, const Vector& x, const Vector& y);
Gradients gradients(const SaddleProblem& problem, const Vector& x, const Vector& y);
OracleSample stochastic_gradients(const SaddleProblem& problem, const NoiseModel& noise, const Vector& x,
                                  const Vector& y, Rng& rng);

/// Upper bound K on E|sample|^2 over the feasible set for this noise model
/// (taken per player, so the same K covers both g_x and g_y).
double second_moment_bound(const SaddleProblem& problem, const NoiseModel& noise);

/// max_{y'} L(x, y') - min_{x'} L(x', y).
double saddle_gap(const SaddleProblem& problem, const Vector& x, const Vector& y);

/// Euclidean distance and Bregman distance V* to the reference saddle list.
SaddleDistance distance_to_saddle_set(const SaddleProblem& problem, const MirrorMap& x_map, const MirrorMap& y_map,
                                      const Vector& x, const Vector& y);

namespace detail {

/// min over the set of 1/2 z^T H z + b^T z for PSD H. Exposed for tests.
struct InnerSolution {
  Vector argmin;
  double value;
};
InnerSolution minimize_convex_quadratic(const Matrix& H, const Vector& b, const ConstraintSet& set);

}  // namespace detail

}  // namespace smd
