#include "smd/problems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "smd/errors.hpp"

namespace smd {

namespace {

constexpr double kFeasTol = 1e-8;
constexpr double kSaddleTol = 1e-8;
constexpr int kSaddleValidationSamples = 100;
constexpr int kGSamples = 10000;
constexpr double kGSafety = 1.1;
constexpr double kInnerTol = 1e-10;
constexpr int kInnerMaxIters = 100000;

// Fixed seeds for the construction-time samplers so a problem is a pure
// function of its data.
constexpr std::uint64_t kValidationSeed = 0x5eed5add1e;

bool is_symmetric(const Matrix& M) {
  return M.rows() == M.cols() && (M - M.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, M.cwiseAbs().maxCoeff());
}

double min_eigenvalue(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(M, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

void write_matrix(std::ostream& out, const Matrix& M) {
  out << '[';
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    out << (r ? "," : "") << '[';
    for (Eigen::Index c = 0; c < M.cols(); ++c) out << (c ? "," : "") << M(r, c);
    out << ']';
  }
  out << ']';
}

void write_vector(std::ostream& out, const Vector& v) {
  out << '[';
  for (Eigen::Index i = 0; i < v.size(); ++i) out << (i ? "," : "") << v(i);
  out << ']';
}

std::size_t sample_categorical(const Vector& weights, Rng& rng) {
  const Vector p = weights.cwiseMax(0.0);
  const double total = p.sum();
  const double target = uniform01(rng) * total;
  double cumulative = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    cumulative += p(i);
    if (target < cumulative) return static_cast<std::size_t>(i);
  }
  // Rounding at the top end: return the last index with positive mass.
  for (Eigen::Index i = p.size() - 1; i >= 0; --i)
    if (p(i) > 0.0) return static_cast<std::size_t>(i);
  return 0;
}

}  // namespace

// ---------------------------------------------------------------------------
// NoiseModel

NoiseModel NoiseModel::gaussian(double std) {
  if (!(std >= 0.0) || !std::isfinite(std)) throw ConfigError("gaussian noise std must be finite and >= 0");
  return {Kind::kGaussian, std};
}

std::string NoiseModel::describe() const {
  std::ostringstream out;
  out.precision(17);
  switch (kind) {
    case Kind::kNone:
      out << "none";
      break;
    case Kind::kGaussian:
      out << "gaussian(" << std << ")";
      break;
    case Kind::kColumnSampling:
      out << "column_sampling";
      break;
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// SaddleProblem

SaddleProblem::SaddleProblem(Family family, ConstraintSet x_set, ConstraintSet y_set, std::vector<SaddlePoint> refs)
    : family_(std::move(family)),
      x_set_(std::move(x_set)),
      y_set_(std::move(y_set)),
      reference_saddles_(std::move(refs)) {
  validate_reference_saddles();
  G_ = estimate_G();
}

SaddleProblem SaddleProblem::matrix_game(Matrix A, std::vector<SaddlePoint> reference_saddles) {
  if (A.rows() < 1 || A.cols() < 1) throw ConfigError("matrix game payoff must be nonempty");
  if (!A.allFinite()) throw ConfigError("matrix game payoff must be finite");
  const auto n = static_cast<int>(A.rows());
  const auto m = static_cast<int>(A.cols());
  return SaddleProblem(MatrixGame{std::move(A)}, ConstraintSet::simplex(n), ConstraintSet::simplex(m),
                       std::move(reference_saddles));
}

SaddleProblem SaddleProblem::quadratic_saddle(QuadraticSaddle q, ConstraintSet x_set, ConstraintSet y_set,
                                              std::vector<SaddlePoint> reference_saddles) {
  const auto n = x_set.dim();
  const auto m = y_set.dim();
  if (q.P.rows() != n || q.P.cols() != n) throw ConfigError("P must be n x n with n = dim of the x set");
  if (q.Q.rows() != m || q.Q.cols() != m) throw ConfigError("Q must be m x m with m = dim of the y set");
  if (q.C.rows() != n || q.C.cols() != m) throw ConfigError("C must be n x m");
  if (q.c.size() != n || q.d.size() != m) throw ConfigError("c must have length n and d length m");
  if (!q.P.allFinite() || !q.Q.allFinite() || !q.C.allFinite() || !q.c.allFinite() || !q.d.allFinite())
    throw ConfigError("quadratic saddle data must be finite");
  if (!is_symmetric(q.P) || !is_symmetric(q.Q)) throw ConfigError("P and Q must be symmetric");
  if (min_eigenvalue(q.P) < -1e-10 * std::max(1.0, q.P.norm()))
    throw ConfigError("P must be positive semidefinite (L convex in x)");
  if (min_eigenvalue(q.Q) < -1e-10 * std::max(1.0, q.Q.norm()))
    throw ConfigError("Q must be positive semidefinite (L concave in y)");
  return SaddleProblem(std::move(q), std::move(x_set), std::move(y_set), std::move(reference_saddles));
}

SaddleProblem SaddleProblem::matching_pennies() {
  Matrix A(2, 2);
  A << 1.0, -1.0, -1.0, 1.0;
  return matrix_game(std::move(A), {SaddlePoint{Vector::Constant(2, 0.5), Vector::Constant(2, 0.5)}});
}

double SaddleProblem::bifunction(const Vector& x, const Vector& y) const {
  if (x.size() != x_dim() || y.size() != y_dim()) throw DomainError("bifunction: dimension mismatch");
  if (const auto* game = std::get_if<MatrixGame>(&family_)) return x.dot(game->A * y);
  const auto& q = std::get<QuadraticSaddle>(family_);
  return 0.5 * x.dot(q.P * x) + q.c.dot(x) + x.dot(q.C * y) - 0.5 * y.dot(q.Q * y) - q.d.dot(y);
}

Gradients SaddleProblem::gradient_formula(const Vector& x, const Vector& y) const {
  if (x.size() != x_dim() || y.size() != y_dim()) throw DomainError("gradients: dimension mismatch");
  if (const auto* game = std::get_if<MatrixGame>(&family_)) return {game->A * y, game->A.transpose() * x};
  const auto& q = std::get<QuadraticSaddle>(family_);
  return {q.P * x + q.c + q.C * y, q.C.transpose() * x - q.Q * y - q.d};
}

double SaddleProblem::joint_hessian_norm() const {
  const auto n = x_dim();
  const auto m = y_dim();
  Matrix H = Matrix::Zero(n + m, n + m);
  if (const auto* game = std::get_if<MatrixGame>(&family_)) {
    H.topRightCorner(n, m) = game->A;
    H.bottomLeftCorner(m, n) = game->A.transpose();
  } else {
    const auto& q = std::get<QuadraticSaddle>(family_);
    H.topLeftCorner(n, n) = q.P;
    H.topRightCorner(n, m) = q.C;
    H.bottomLeftCorner(m, n) = q.C.transpose();
    H.bottomRightCorner(m, m) = -q.Q;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(H, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

void SaddleProblem::require_feasible(const Vector& x, const Vector& y, double tol) const {
  if (!x_set_.contains(x, tol)) throw FeasibilityError("x is not in the feasible set " + x_set_.describe());
  if (!y_set_.contains(y, tol)) throw FeasibilityError("y is not in the feasible set " + y_set_.describe());
}

void SaddleProblem::validate_reference_saddles() const {
  Rng rng = make_rng(kValidationSeed, 1);
  std::vector<Vector> xs;
  std::vector<Vector> ys;
  xs.push_back(x_set_.barycenter());
  ys.push_back(y_set_.barycenter());
  for (int k = 1; k < kSaddleValidationSamples; ++k) {
    xs.push_back(x_set_.sample(rng));
    ys.push_back(y_set_.sample(rng));
  }

  for (std::size_t r = 0; r < reference_saddles_.size(); ++r) {
    const auto& [xs_star, ys_star] = reference_saddles_[r];
    if (!x_set_.contains(xs_star, kFeasTol) || !y_set_.contains(ys_star, kFeasTol))
      throw ValidationError("reference saddle " + std::to_string(r) + " is not feasible");
    const double value = bifunction(xs_star, ys_star);
    for (std::size_t k = 0; k < xs.size(); ++k) {
      if (bifunction(xs_star, ys[k]) > value + kSaddleTol || value > bifunction(xs[k], ys_star) + kSaddleTol)
        throw ValidationError("reference saddle " + std::to_string(r) + " violates the saddle inequality");
    }
  }
}

double SaddleProblem::estimate_G() const {
  Rng rng = make_rng(kValidationSeed, 2);
  double largest = 0.0;
  for (int k = 0; k < kGSamples; ++k) {
    const Gradients g = gradient_formula(x_set_.sample(rng), y_set_.sample(rng));
    largest = std::max({largest, g.g_x.norm(), g.g_y.norm()});
  }
  return kGSafety * largest;
}

std::string SaddleProblem::describe() const {
  std::ostringstream out;
  out.precision(17);
  if (const auto* game = std::get_if<MatrixGame>(&family_)) {
    out << "matrix_game(A=";
    write_matrix(out, game->A);
  } else {
    const auto& q = std::get<QuadraticSaddle>(family_);
    out << "quadratic_saddle(P=";
    write_matrix(out, q.P);
    out << ",Q=";
    write_matrix(out, q.Q);
    out << ",C=";
    write_matrix(out, q.C);
    out << ",c=";
    write_vector(out, q.c);
    out << ",d=";
    write_vector(out, q.d);
  }
  out << ",X=" << x_set_.describe() << ",Y=" << y_set_.describe() << ",refs=[";
  for (std::size_t r = 0; r < reference_saddles_.size(); ++r) {
    out << (r ? "," : "") << '(';
    write_vector(out, reference_saddles_[r].x);
    out << ',';
    write_vector(out, reference_saddles_[r].y);
    out << ')';
  }
  out << "])";
  return out.str();
}

// ---------------------------------------------------------------------------
// Oracles

double eval_L(const SaddleProblem& problem, const Vector& x, const Vector& y) {
  problem.require_feasible(x, y);
  return problem.bifunction(x, y);
}

Gradients gradients(const SaddleProblem& problem, const Vector& x, const Vector& y) {
  problem.require_feasible(x, y);
  return problem.gradient_formula(x, y);
}

OracleSample stochastic_gradients(const SaddleProblem& problem, const NoiseModel& noise, const Vector& x,
                                  const Vector& y, Rng& rng) {
  problem.require_feasible(x, y);
  switch (noise.kind) {
    case NoiseModel::Kind::kNone: {
      Gradients g = problem.gradient_formula(x, y);
      return {std::move(g.g_x), std::move(g.g_y), 0};
    }
    case NoiseModel::Kind::kGaussian: {
      Gradients g = problem.gradient_formula(x, y);
      for (Eigen::Index i = 0; i < g.g_x.size(); ++i) g.g_x(i) += noise.std * standard_normal(rng);
      for (Eigen::Index i = 0; i < g.g_y.size(); ++i) g.g_y(i) += noise.std * standard_normal(rng);
      const auto draws = static_cast<std::uint64_t>(g.g_x.size() + g.g_y.size());
      return {std::move(g.g_x), std::move(g.g_y), draws};
    }
    case NoiseModel::Kind::kColumnSampling: {
      const auto* game = std::get_if<MatrixGame>(&problem.family());
      if (game == nullptr) throw ConfigError("column-sampling noise requires a matrix game");
      // j ~ y gives E[A e_j] = A y; i ~ x gives E[A^T e_i] = A^T x.
      const auto j = static_cast<Eigen::Index>(sample_categorical(y, rng));
      const auto i = static_cast<Eigen::Index>(sample_categorical(x, rng));
      return {game->A.col(j), game->A.row(i).transpose(), 2};
    }
  }
  throw ConfigError("unknown noise model");
}

double second_moment_bound(const SaddleProblem& problem, const NoiseModel& noise) {
  const double G = problem.G();
  switch (noise.kind) {
    case NoiseModel::Kind::kNone:
      return G * G;
    case NoiseModel::Kind::kGaussian: {
      const double dim = std::max(problem.x_dim(), problem.y_dim());
      return G * G + dim * noise.std * noise.std;
    }
    case NoiseModel::Kind::kColumnSampling: {
      const auto* game = std::get_if<MatrixGame>(&problem.family());
      if (game == nullptr) throw ConfigError("column-sampling noise requires a matrix game");
      const double col = game->A.colwise().squaredNorm().maxCoeff();
      const double row = game->A.rowwise().squaredNorm().maxCoeff();
      return std::max(col, row);
    }
  }
  return G * G;
}

// ---------------------------------------------------------------------------
// Inner convex quadratic minimization (saddle gap oracle)

namespace detail {

namespace {

double quad_value(const Matrix& H, const Vector& b, const Vector& z) { return 0.5 * z.dot(H * z) + b.dot(z); }

InnerSolution minimize_on_ball(const Matrix& H, const Vector& b, const BallSet& ball) {
  // Shift to the center: minimize 1/2 s^T H s + g^T s over |s| <= r.
  const Vector g = H * ball.center + b;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(H);
  const Vector lam = eig.eigenvalues().cwiseMax(0.0);
  const Vector gh = eig.eigenvectors().transpose() * g;
  const double scale = std::max(1.0, lam.maxCoeff());
  const double eps = 1e-12 * scale;

  auto step_for = [&](double shift) {
    Vector sh(gh.size());
    for (Eigen::Index i = 0; i < gh.size(); ++i) sh(i) = -gh(i) / (lam(i) + shift);
    return sh;
  };

  // Unconstrained minimizer, if one exists (min-norm on the null space).
  bool bounded = true;
  Vector s0(gh.size());
  for (Eigen::Index i = 0; i < gh.size(); ++i) {
    if (lam(i) > eps) {
      s0(i) = -gh(i) / lam(i);
    } else {
      s0(i) = 0.0;
      if (std::abs(gh(i)) > 1e-14 * std::max(1.0, g.norm())) bounded = false;
    }
  }

  Vector s_hat;
  if (bounded && s0.norm() <= ball.radius) {
    s_hat = s0;
  } else {
    // |s(shift)| decreases in shift; bracket the boundary root and bisect.
    double lo = 0.0;
    double hi = std::max(g.norm() / ball.radius, eps);
    while (step_for(hi).norm() > ball.radius) hi *= 2.0;
    for (int it = 0; it < 400 && hi - lo > 1e-16 * std::max(1.0, hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      (step_for(mid).norm() > ball.radius ? lo : hi) = mid;
    }
    s_hat = step_for(hi);
    s_hat *= ball.radius / std::max(s_hat.norm(), std::numeric_limits<double>::min());
  }
  Vector z = ball.center + eig.eigenvectors() * s_hat;
  return {z, quad_value(H, b, z)};
}

InnerSolution projected_gradient(const Matrix& H, const Vector& b, const ConstraintSet& set, double lmax,
                                 double lmin) {
  const double step = 1.0 / lmax;
  const double condition = lmax / lmin;
  Vector z = set.barycenter();
  for (int it = 0; it < kInnerMaxIters; ++it) {
    Vector next = set.euclidean_project(z - step * (H * z + b));
    const double moved = (next - z).norm();
    z = std::move(next);
    // For a strongly convex objective the distance to the minimizer is at
    // most condition * (last step length).
    if (moved * condition <= kInnerTol * 1e-2) break;
  }
  return {z, quad_value(H, b, z)};
}

// Least-squares solve of K u = rhs; returns nullopt if the system is
// inconsistent (objective unbounded along the face).
std::optional<Vector> consistent_solve(const Matrix& K, const Vector& rhs) {
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(K);
  Vector u = cod.solve(rhs);
  if ((K * u - rhs).norm() > 1e-9 * (1.0 + rhs.norm())) return std::nullopt;
  return u;
}

// For singular H on low-dimensional polytopes: the minimum is a stationary
// point of the restriction to the affine hull of some face, so enumerate
// every face, solve its KKT system, and keep the best feasible candidate.
InnerSolution enumerate_faces(const Matrix& H, const Vector& b, const ConstraintSet& set) {
  const auto n = static_cast<int>(set.dim());
  InnerSolution best{set.barycenter(), std::numeric_limits<double>::infinity()};
  auto consider = [&](const Vector& z) {
    if (!set.contains(z, 1e-12)) return;
    const Vector clean = set.euclidean_project(z);
    const double value = quad_value(H, b, clean);
    if (value < best.value) best = {clean, value};
  };

  if (set.kind() == ConstraintSet::Kind::kSimplex) {
    for (int mask = 1; mask < (1 << n); ++mask) {
      std::vector<int> support;
      for (int i = 0; i < n; ++i)
        if (mask & (1 << i)) support.push_back(i);
      const auto k = static_cast<Eigen::Index>(support.size());
      Matrix K = Matrix::Zero(k + 1, k + 1);
      Vector rhs(k + 1);
      for (Eigen::Index a = 0; a < k; ++a) {
        for (Eigen::Index c = 0; c < k; ++c) K(a, c) = H(support[a], support[c]);
        K(a, k) = 1.0;
        K(k, a) = 1.0;
        rhs(a) = -b(support[a]);
      }
      rhs(k) = 1.0;
      if (auto u = consistent_solve(K, rhs)) {
        Vector z = Vector::Zero(n);
        for (Eigen::Index a = 0; a < k; ++a) z(support[a]) = (*u)(a);
        consider(z);
      }
    }
  } else {
    const auto& box = std::get<BoxSet>(set.shape());
    int combos = 1;
    for (int i = 0; i < n; ++i) combos *= 3;
    for (int code = 0; code < combos; ++code) {
      // Per coordinate: 0 = at lower, 1 = at upper, 2 = free.
      Vector z(n);
      std::vector<int> free;
      int c = code;
      for (int i = 0; i < n; ++i, c /= 3) {
        const int state = c % 3;
        if (state == 0) z(i) = box.lower(i);
        if (state == 1) z(i) = box.upper(i);
        if (state == 2) {
          z(i) = 0.0;
          free.push_back(i);
        }
      }
      if (!free.empty()) {
        const auto k = static_cast<Eigen::Index>(free.size());
        Matrix K(k, k);
        Vector rhs(k);
        const Vector fixed_grad = H * z + b;
        for (Eigen::Index a = 0; a < k; ++a) {
          for (Eigen::Index cc = 0; cc < k; ++cc) K(a, cc) = H(free[a], free[cc]);
          rhs(a) = -fixed_grad(free[a]);
        }
        auto u = consistent_solve(K, rhs);
        if (!u) continue;
        for (Eigen::Index a = 0; a < k; ++a) z(free[a]) = (*u)(a);
      }
      consider(z);
    }
  }
  return best;
}

}  // namespace

InnerSolution minimize_convex_quadratic(const Matrix& H, const Vector& b, const ConstraintSet& set) {
  if (H.rows() != set.dim() || H.cols() != set.dim() || b.size() != set.dim())
    throw DomainError("minimize_convex_quadratic: dimension mismatch");
  if (const auto* ball = std::get_if<BallSet>(&set.shape())) return minimize_on_ball(H, b, *ball);

  Eigen::SelfAdjointEigenSolver<Matrix> eig(H, Eigen::EigenvaluesOnly);
  const double lmax = eig.eigenvalues().maxCoeff();
  const double lmin = eig.eigenvalues().minCoeff();
  if (lmin > 1e-10 * std::max(1.0, lmax)) return projected_gradient(H, b, set, lmax, lmin);
  if (set.dim() > 3)
    throw UnsupportedInnerSolve("saddle gap needs an exact inner solve; singular quadratic terms are only "
                                "supported up to dimension 3 on simplices and boxes");
  return enumerate_faces(H, b, set);
}

}  // namespace detail

double saddle_gap(const SaddleProblem& problem, const Vector& x, const Vector& y) {
  problem.require_feasible(x, y);
  if (const auto* game = std::get_if<MatrixGame>(&problem.family())) {
    const double best_response_max = (game->A.transpose() * x).maxCoeff();
    const double best_response_min = (game->A * y).minCoeff();
    return std::max(0.0, best_response_max - best_response_min);
  }
  const auto& q = std::get<QuadraticSaddle>(problem.family());
  // max_{y'} L(x, y') = 1/2 x'Px + c'x - min_{y'} [1/2 y'Qy' + (d - C'x)'y']
  const auto inner_y = detail::minimize_convex_quadratic(q.Q, q.d - q.C.transpose() * x, problem.y_set());
  const double upper = 0.5 * x.dot(q.P * x) + q.c.dot(x) - inner_y.value;
  // min_{x'} L(x', y) = -1/2 y'Qy - d'y + min_{x'} [1/2 x'Px + (c + Cy)'x']
  const auto inner_x = detail::minimize_convex_quadratic(q.P, q.c + q.C * y, problem.x_set());
  const double lower = -0.5 * y.dot(q.Q * y) - q.d.dot(y) + inner_x.value;
  return std::max(0.0, upper - lower);
}

SaddleDistance distance_to_saddle_set(const SaddleProblem& problem, const MirrorMap& x_map, const MirrorMap& y_map,
                                      const Vector& x, const Vector& y) {
  const auto& refs = problem.reference_saddles();
  if (refs.empty()) throw NoReferenceSaddle("problem has no reference saddle points");
  SaddleDistance best{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  for (const auto& ref : refs) {
    const double euclid = std::sqrt((x - ref.x).squaredNorm() + (y - ref.y).squaredNorm());
    const double breg = bregman(x_map, ref.x, x) + bregman(y_map, ref.y, y);
    best.euclidean = std::min(best.euclidean, euclid);
    best.bregman = std::min(best.bregman, breg);
  }
  return best;
}

}  // namespace smd
