#include "smd/harness/spec.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "smd/errors.hpp"

namespace smd::harness {

using nlohmann::json;

namespace {

std::string join_path(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

// Walks the document, throwing ParseError on type mismatches and collecting
// every semantic problem so a single ValidationError can list them all.
class Reader {
 public:
  std::vector<std::string> errors;

  void error(const std::string& path, const std::string& message) { errors.push_back(path + ": " + message); }

  void allow_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj.items())
      if (!ok.count(key)) error(join_path(path, key), "unknown key");
  }

  const json& object(const json& v, const std::string& path) {
    if (!v.is_object()) throw ParseError(path + ": expected an object");
    return v;
  }

  const json* field(const json& obj, const std::string& path, const char* key, bool required) {
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) error(join_path(path, key), "missing required key");
      return nullptr;
    }
    return &*it;
  }

  double number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ParseError(path + ": expected a number");
    return v.get<double>();
  }

  std::uint64_t unsigned_integer(const json& v, const std::string& path) {
    if (!v.is_number_unsigned()) {
      if (v.is_number_integer()) {
        error(path, "must be nonnegative");
        return 0;
      }
      throw ParseError(path + ": expected a nonnegative integer");
    }
    return v.get<std::uint64_t>();
  }

  bool boolean(const json& v, const std::string& path) {
    if (!v.is_boolean()) throw ParseError(path + ": expected true or false");
    return v.get<bool>();
  }

  std::string string(const json& v, const std::string& path) {
    if (!v.is_string()) throw ParseError(path + ": expected a string");
    return v.get<std::string>();
  }

  Vector vector(const json& v, const std::string& path) {
    if (!v.is_array()) throw ParseError(path + ": expected an array of numbers");
    Vector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = number(v[i], path + "[" + std::to_string(i) + "]");
    return out;
  }

  std::vector<double> doubles(const json& v, const std::string& path) {
    const Vector vec = vector(v, path);
    return {vec.data(), vec.data() + vec.size()};
  }

  Matrix matrix(const json& v, const std::string& path) {
    if (!v.is_array() || v.empty()) throw ParseError(path + ": expected a nonempty array of rows");
    const std::size_t rows = v.size();
    std::size_t cols = 0;
    std::vector<Vector> parsed;
    for (std::size_t r = 0; r < rows; ++r) {
      parsed.push_back(vector(v[r], path + "[" + std::to_string(r) + "]"));
      if (r == 0) cols = static_cast<std::size_t>(parsed[0].size());
      if (static_cast<std::size_t>(parsed[r].size()) != cols) throw ParseError(path + ": rows have different lengths");
    }
    Matrix M(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows; ++r) M.row(static_cast<Eigen::Index>(r)) = parsed[r].transpose();
    return M;
  }

  template <class Fn>
  auto guarded(const std::string& path, Fn&& fn) -> std::optional<decltype(fn())> {
    try {
      return fn();
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      error(path, e.what());
      return std::nullopt;
    }
  }
};

ConstraintSet read_set(Reader& rd, const json& v, const std::string& path) {
  rd.object(v, path);
  const json* type = rd.field(v, path, "type", true);
  const std::string kind = type ? rd.string(*type, join_path(path, "type")) : "";
  std::optional<ConstraintSet> set;
  if (kind == "simplex") {
    rd.allow_keys(v, path, {"type", "dim"});
    if (const json* dim = rd.field(v, path, "dim", true)) {
      const auto d = rd.unsigned_integer(*dim, join_path(path, "dim"));
      set = rd.guarded(path, [&] { return ConstraintSet::simplex(static_cast<int>(d)); });
    }
  } else if (kind == "box") {
    rd.allow_keys(v, path, {"type", "lower", "upper"});
    const json* lo = rd.field(v, path, "lower", true);
    const json* hi = rd.field(v, path, "upper", true);
    if (lo && hi) {
      Vector l = rd.vector(*lo, join_path(path, "lower"));
      Vector u = rd.vector(*hi, join_path(path, "upper"));
      set = rd.guarded(path, [&] { return ConstraintSet::box(l, u); });
    }
  } else if (kind == "ball") {
    rd.allow_keys(v, path, {"type", "center", "radius"});
    const json* c = rd.field(v, path, "center", true);
    const json* r = rd.field(v, path, "radius", true);
    if (c && r) {
      Vector center = rd.vector(*c, join_path(path, "center"));
      const double radius = rd.number(*r, join_path(path, "radius"));
      set = rd.guarded(path, [&] { return ConstraintSet::ball(center, radius); });
    }
  } else if (type) {
    rd.error(join_path(path, "type"), "must be one of simplex, box, ball");
  }
  return set ? *set : ConstraintSet::simplex(1);
}

std::vector<SaddlePoint> read_saddles(Reader& rd, const json& obj, const std::string& path) {
  std::vector<SaddlePoint> out;
  const json* list = rd.field(obj, path, "reference_saddles", false);
  if (!list) return out;
  const std::string lpath = join_path(path, "reference_saddles");
  if (!list->is_array()) throw ParseError(lpath + ": expected an array");
  for (std::size_t i = 0; i < list->size(); ++i) {
    const std::string ipath = lpath + "[" + std::to_string(i) + "]";
    const json& item = rd.object((*list)[i], ipath);
    rd.allow_keys(item, ipath, {"x", "y"});
    const json* x = rd.field(item, ipath, "x", true);
    const json* y = rd.field(item, ipath, "y", true);
    if (x && y) out.push_back({rd.vector(*x, ipath + ".x"), rd.vector(*y, ipath + ".y")});
  }
  return out;
}

std::optional<SaddleProblem> read_problem(Reader& rd, const json& v, const std::string& path) {
  rd.object(v, path);
  const json* type = rd.field(v, path, "type", true);
  if (!type) return std::nullopt;
  const std::string kind = rd.string(*type, join_path(path, "type"));
  if (kind == "matching_pennies") {
    rd.allow_keys(v, path, {"type"});
    return SaddleProblem::matching_pennies();
  }
  if (kind == "matrix_game") {
    rd.allow_keys(v, path, {"type", "A", "reference_saddles"});
    const json* A = rd.field(v, path, "A", true);
    auto refs = read_saddles(rd, v, path);
    if (!A) return std::nullopt;
    Matrix payoff = rd.matrix(*A, join_path(path, "A"));
    return rd.guarded(path, [&] { return SaddleProblem::matrix_game(payoff, refs); });
  }
  if (kind == "quadratic_saddle") {
    rd.allow_keys(v, path, {"type", "P", "Q", "C", "c", "d", "x_set", "y_set", "reference_saddles"});
    const json* P = rd.field(v, path, "P", true);
    const json* Q = rd.field(v, path, "Q", true);
    const json* C = rd.field(v, path, "C", true);
    const json* c = rd.field(v, path, "c", true);
    const json* d = rd.field(v, path, "d", true);
    const json* xs = rd.field(v, path, "x_set", true);
    const json* ys = rd.field(v, path, "y_set", true);
    auto refs = read_saddles(rd, v, path);
    if (!(P && Q && C && c && d && xs && ys)) return std::nullopt;
    QuadraticSaddle q{rd.matrix(*P, join_path(path, "P")), rd.matrix(*Q, join_path(path, "Q")),
                      rd.matrix(*C, join_path(path, "C")), rd.vector(*c, join_path(path, "c")),
                      rd.vector(*d, join_path(path, "d"))};
    ConstraintSet x_set = read_set(rd, *xs, join_path(path, "x_set"));
    ConstraintSet y_set = read_set(rd, *ys, join_path(path, "y_set"));
    return rd.guarded(path, [&] { return SaddleProblem::quadratic_saddle(q, x_set, y_set, refs); });
  }
  rd.error(join_path(path, "type"), "must be one of matching_pennies, matrix_game, quadratic_saddle");
  return std::nullopt;
}

MirrorMap read_map(Reader& rd, const json& v, const std::string& path) {
  rd.object(v, path);
  const json* type = rd.field(v, path, "type", true);
  const std::string kind = type ? rd.string(*type, join_path(path, "type")) : "";
  if (kind == "entropic") {
    rd.allow_keys(v, path, {"type", "interior_floor"});
    double floor = 1e-12;
    if (const json* f = rd.field(v, path, "interior_floor", false)) floor = rd.number(*f, join_path(path, "interior_floor"));
    if (auto map = rd.guarded(path, [&] { return MirrorMap::entropic(floor); })) return *map;
  } else if (kind == "quadratic") {
    rd.allow_keys(v, path, {"type"});
  } else if (type) {
    rd.error(join_path(path, "type"), "must be entropic or quadratic");
  }
  return MirrorMap::quadratic();
}

NoiseModel read_noise(Reader& rd, const json& v, const std::string& path) {
  rd.object(v, path);
  const json* type = rd.field(v, path, "type", true);
  const std::string kind = type ? rd.string(*type, join_path(path, "type")) : "";
  if (kind == "none") {
    rd.allow_keys(v, path, {"type"});
  } else if (kind == "gaussian") {
    rd.allow_keys(v, path, {"type", "std"});
    if (const json* s = rd.field(v, path, "std", true)) {
      const double std = rd.number(*s, join_path(path, "std"));
      if (auto n = rd.guarded(join_path(path, "std"), [&] { return NoiseModel::gaussian(std); })) return *n;
    }
  } else if (kind == "column_sampling") {
    rd.allow_keys(v, path, {"type"});
    return NoiseModel::column_sampling();
  } else if (type) {
    rd.error(join_path(path, "type"), "must be none, gaussian or column_sampling");
  }
  return NoiseModel::none();
}

StepSchedule read_schedule(Reader& rd, const json& v, const std::string& path) {
  rd.object(v, path);
  const json* type = rd.field(v, path, "type", true);
  const std::string kind = type ? rd.string(*type, join_path(path, "type")) : "";
  if (kind == "polynomial") {
    rd.allow_keys(v, path, {"type", "a", "p"});
    double a = 1.0;
    double p = 1.0;
    if (const json* j = rd.field(v, path, "a", false)) a = rd.number(*j, join_path(path, "a"));
    if (const json* j = rd.field(v, path, "p", false)) p = rd.number(*j, join_path(path, "p"));
    if (!(a > 0.0)) rd.error(join_path(path, "a"), "must be positive");
    if (!(p > 0.5 && p <= 1.0))
      rd.error(join_path(path, "p"),
               "must lie in (0.5, 1] so the steps satisfy the Robbins-Monro condition "
               "(sum alpha(n) = inf, sum alpha(n)^2 < inf)");
    if (a > 0.0 && p > 0.0) return StepSchedule::polynomial(a, p);
  } else if (kind == "constant") {
    rd.allow_keys(v, path, {"type", "alpha", "diagnostic_only"});
    bool diagnostic_only = false;
    if (const json* j = rd.field(v, path, "diagnostic_only", false))
      diagnostic_only = rd.boolean(*j, join_path(path, "diagnostic_only"));
    if (!diagnostic_only)
      rd.error(path, "constant steps violate the Robbins-Monro condition; set diagnostic_only to true to run them");
    if (const json* j = rd.field(v, path, "alpha", true)) {
      const double alpha = rd.number(*j, join_path(path, "alpha"));
      if (auto s = rd.guarded(join_path(path, "alpha"), [&] { return StepSchedule::constant(alpha); })) return *s;
    }
  } else if (type) {
    rd.error(join_path(path, "type"), "must be polynomial or constant");
  }
  return StepSchedule::polynomial(1.0, 1.0);
}

SmoothingSchedule read_smoothing(Reader& rd, const json& v, const std::string& path) {
  rd.object(v, path);
  const json* type = rd.field(v, path, "type", true);
  const std::string kind = type ? rd.string(*type, join_path(path, "type")) : "";
  if (kind == "constant") {
    rd.allow_keys(v, path, {"type", "mu"});
    if (const json* j = rd.field(v, path, "mu", true)) {
      const double mu = rd.number(*j, join_path(path, "mu"));
      if (auto s = rd.guarded(join_path(path, "mu"), [&] { return SmoothingSchedule::constant(mu); })) return *s;
    }
  } else if (kind == "geometric") {
    rd.allow_keys(v, path, {"type", "mu0", "decay", "floor"});
    const json* mu0 = rd.field(v, path, "mu0", true);
    const json* decay = rd.field(v, path, "decay", true);
    double floor = 1e-8;
    if (const json* f = rd.field(v, path, "floor", false)) floor = rd.number(*f, join_path(path, "floor"));
    if (mu0 && decay) {
      const double m = rd.number(*mu0, join_path(path, "mu0"));
      const double r = rd.number(*decay, join_path(path, "decay"));
      if (auto s = rd.guarded(path, [&] { return SmoothingSchedule::geometric(m, r, floor); })) return *s;
    }
  } else if (type) {
    rd.error(join_path(path, "type"), "must be constant or geometric");
  }
  return SmoothingSchedule::constant(0.1);
}

MirrorMap default_map(const ConstraintSet& set) {
  return set.kind() == ConstraintSet::Kind::kSimplex ? MirrorMap::entropic() : MirrorMap::quadratic();
}

// -- writing ---------------------------------------------------------------

json vec_json(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

json mat_json(const Matrix& M) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) rows.push_back(vec_json(M.row(r).transpose()));
  return rows;
}

json set_json(const ConstraintSet& set) {
  const auto& shape = set.shape();
  if (const auto* s = std::get_if<SimplexSet>(&shape)) return {{"type", "simplex"}, {"dim", s->dim}};
  if (const auto* b = std::get_if<BoxSet>(&shape))
    return {{"type", "box"}, {"lower", vec_json(b->lower)}, {"upper", vec_json(b->upper)}};
  const auto& ball = std::get<BallSet>(shape);
  return {{"type", "ball"}, {"center", vec_json(ball.center)}, {"radius", ball.radius}};
}

json problem_json(const SaddleProblem& problem) {
  json refs = json::array();
  for (const auto& r : problem.reference_saddles()) refs.push_back({{"x", vec_json(r.x)}, {"y", vec_json(r.y)}});
  if (const auto* game = std::get_if<MatrixGame>(&problem.family()))
    return {{"type", "matrix_game"}, {"A", mat_json(game->A)}, {"reference_saddles", refs}};
  const auto& q = std::get<QuadraticSaddle>(problem.family());
  return {{"type", "quadratic_saddle"},   {"P", mat_json(q.P)},          {"Q", mat_json(q.Q)},
          {"C", mat_json(q.C)},           {"c", vec_json(q.c)},          {"d", vec_json(q.d)},
          {"x_set", set_json(problem.x_set())}, {"y_set", set_json(problem.y_set())}, {"reference_saddles", refs}};
}

json map_json(const MirrorMap& map) {
  if (map.is_entropic()) return {{"type", "entropic"}, {"interior_floor", map.interior_floor}};
  return {{"type", "quadratic"}};
}

json noise_json(const NoiseModel& noise) {
  switch (noise.kind) {
    case NoiseModel::Kind::kGaussian:
      return {{"type", "gaussian"}, {"std", noise.std}};
    case NoiseModel::Kind::kColumnSampling:
      return {{"type", "column_sampling"}};
    case NoiseModel::Kind::kNone:
      break;
  }
  return {{"type", "none"}};
}

json schedule_json(const StepSchedule& s) {
  if (s.kind == StepSchedule::Kind::kConstant)
    return {{"type", "constant"}, {"alpha", s.alpha}, {"diagnostic_only", true}};
  return {{"type", "polynomial"}, {"a", s.a}, {"p", s.p}};
}

json smoothing_json(const SmoothingSchedule& s) {
  if (s.kind == SmoothingSchedule::Kind::kConstant) return {{"type", "constant"}, {"mu", s.mu0}};
  return {{"type", "geometric"}, {"mu0", s.mu0}, {"decay", s.decay}, {"floor", s.floor}};
}

std::string line_context(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

}  // namespace

bool operator==(const RunConfig& a, const RunConfig& b) {
  return a.problem.describe() == b.problem.describe() && a.algorithm == b.algorithm && a.maps == b.maps &&
         a.noise == b.noise && a.schedule == b.schedule && a.smoothing == b.smoothing && a.seed == b.seed &&
         a.max_iters == b.max_iters && a.record_every == b.record_every && a.init == b.init &&
         a.diagnostics == b.diagnostics && a.check_viability == b.check_viability;
}

bool operator==(const ExperimentSpec& a, const ExperimentSpec& b) {
  return a.name == b.name && a.run == b.run && a.sweep == b.sweep && a.outputs == b.outputs;
}

ExperimentSpec parse_spec(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("malformed JSON at " + line_context(text, e.byte == 0 ? 0 : e.byte - 1) + ": " + e.what());
  }

  Reader rd;
  rd.object(doc, "<root>");
  rd.allow_keys(doc, "", {"name", "algorithm", "problem", "x_map", "y_map", "noise", "schedule", "smoothing", "seed",
                          "max_iters", "record_every", "init", "sweep", "outputs", "diagnostics", "check_viability"});

  std::string name;
  if (const json* j = rd.field(doc, "", "name", true)) {
    name = rd.string(*j, "name");
    if (name.empty()) rd.error("name", "must be nonempty");
  }

  std::optional<SaddleProblem> problem;
  if (const json* j = rd.field(doc, "", "problem", true)) problem = read_problem(rd, *j, "problem");
  ExperimentSpec spec(RunConfig(problem ? *problem : SaddleProblem::matching_pennies()));
  spec.name = name;
  RunConfig& run = spec.run;

  if (const json* j = rd.field(doc, "", "algorithm", false)) {
    const std::string algo = rd.string(*j, "algorithm");
    if (algo == "sspmd")
      run.algorithm = Algorithm::kSspmd;
    else if (algo == "szspmd")
      run.algorithm = Algorithm::kSzspmd;
    else
      rd.error("algorithm", "must be sspmd or szspmd");
  }

  run.maps.x = default_map(run.problem.x_set());
  run.maps.y = default_map(run.problem.y_set());
  if (const json* j = rd.field(doc, "", "x_map", false)) run.maps.x = read_map(rd, *j, "x_map");
  if (const json* j = rd.field(doc, "", "y_map", false)) run.maps.y = read_map(rd, *j, "y_map");
  if (const json* j = rd.field(doc, "", "noise", false)) run.noise = read_noise(rd, *j, "noise");
  if (const json* j = rd.field(doc, "", "schedule", false)) run.schedule = read_schedule(rd, *j, "schedule");
  if (const json* j = rd.field(doc, "", "smoothing", false)) run.smoothing = read_smoothing(rd, *j, "smoothing");
  if (const json* j = rd.field(doc, "", "seed", false)) run.seed = rd.unsigned_integer(*j, "seed");
  if (const json* j = rd.field(doc, "", "max_iters", false)) run.max_iters = rd.unsigned_integer(*j, "max_iters");
  if (const json* j = rd.field(doc, "", "record_every", false))
    run.record_every = rd.unsigned_integer(*j, "record_every");
  if (const json* j = rd.field(doc, "", "check_viability", false))
    run.check_viability = rd.boolean(*j, "check_viability");

  if (const json* j = rd.field(doc, "", "init", false)) {
    if (j->is_string()) {
      if (j->get<std::string>() != "barycenter") rd.error("init", "must be \"barycenter\" or an object {x, y}");
    } else {
      rd.object(*j, "init");
      rd.allow_keys(*j, "init", {"x", "y"});
      const json* x = rd.field(*j, "init", "x", true);
      const json* y = rd.field(*j, "init", "y", true);
      if (x && y) run.init = SaddlePoint{rd.vector(*x, "init.x"), rd.vector(*y, "init.y")};
    }
  }

  if (const json* j = rd.field(doc, "", "diagnostics", false)) {
    rd.object(*j, "diagnostics");
    rd.allow_keys(*j, "diagnostics", {"gap", "v_star", "dist", "apt"});
    if (const json* f = rd.field(*j, "diagnostics", "gap", false)) run.diagnostics.gap = rd.boolean(*f, "diagnostics.gap");
    if (const json* f = rd.field(*j, "diagnostics", "v_star", false))
      run.diagnostics.v_star = rd.boolean(*f, "diagnostics.v_star");
    if (const json* f = rd.field(*j, "diagnostics", "dist", false))
      run.diagnostics.dist = rd.boolean(*f, "diagnostics.dist");
    if (const json* f = rd.field(*j, "diagnostics", "apt", false)) run.diagnostics.apt = rd.boolean(*f, "diagnostics.apt");
  }

  if (const json* j = rd.field(doc, "", "outputs", false)) spec.outputs = rd.string(*j, "outputs");

  if (const json* j = rd.field(doc, "", "sweep", false)) {
    rd.object(*j, "sweep");
    rd.allow_keys(*j, "sweep", {"schedule.a", "schedule.p", "smoothing.mu", "seed"});
    auto axis = [&](const char* key) -> const json* {
      const json* a = rd.field(*j, "sweep", key, false);
      if (a && (!a->is_array() || a->empty())) {
        if (!a->is_array()) throw ParseError(std::string("sweep.") + key + ": expected an array");
        rd.error(std::string("sweep.") + key, "grid axis must have at least one value");
        return nullptr;
      }
      return a;
    };
    if (const json* a = axis("schedule.a")) {
      spec.sweep.schedule_a = rd.doubles(*a, "sweep.schedule.a");
      for (double v : spec.sweep.schedule_a)
        if (!(v > 0.0)) rd.error("sweep.schedule.a", "values must be positive");
    }
    if (const json* a = axis("schedule.p")) {
      spec.sweep.schedule_p = rd.doubles(*a, "sweep.schedule.p");
      for (double v : spec.sweep.schedule_p)
        if (!(v > 0.5 && v <= 1.0))
          rd.error("sweep.schedule.p", "values must lie in (0.5, 1] (Robbins-Monro condition)");
    }
    if (const json* a = axis("smoothing.mu")) {
      spec.sweep.smoothing_mu = rd.doubles(*a, "sweep.smoothing.mu");
      for (double v : spec.sweep.smoothing_mu)
        if (!(v > 0.0)) rd.error("sweep.smoothing.mu", "values must be positive");
    }
    if (const json* a = axis("seed"))
      for (std::size_t i = 0; i < a->size(); ++i)
        spec.sweep.seed.push_back(rd.unsigned_integer((*a)[i], "sweep.seed[" + std::to_string(i) + "]"));
    if ((!spec.sweep.schedule_a.empty() || !spec.sweep.schedule_p.empty()) &&
        run.schedule.kind != StepSchedule::Kind::kPolynomial)
      rd.error("sweep", "schedule.a / schedule.p sweeps need a polynomial schedule");
  }

  if (problem) {
    try {
      validate(run);
    } catch (const ConfigError& e) {
      std::istringstream lines(e.what());
      std::string line;
      std::getline(lines, line);  // header
      while (std::getline(lines, line)) rd.error("run", line.substr(line.find("- ") + 2));
    }
  }

  if (!rd.errors.empty()) {
    std::string message = "invalid experiment spec:";
    for (const auto& e : rd.errors) message += "\n  - " + e;
    throw ValidationError(message);
  }
  return spec;
}

ExperimentSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open spec file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_spec(buffer.str());
}

std::string write_spec(const ExperimentSpec& spec) {
  const RunConfig& run = spec.run;
  json doc;
  doc["name"] = spec.name;
  doc["algorithm"] = run.algorithm == Algorithm::kSspmd ? "sspmd" : "szspmd";
  doc["problem"] = problem_json(run.problem);
  doc["x_map"] = map_json(run.maps.x);
  doc["y_map"] = map_json(run.maps.y);
  doc["noise"] = noise_json(run.noise);
  doc["schedule"] = schedule_json(run.schedule);
  doc["smoothing"] = smoothing_json(run.smoothing);
  doc["seed"] = run.seed;
  doc["max_iters"] = run.max_iters;
  doc["record_every"] = run.record_every;
  if (run.init)
    doc["init"] = {{"x", vec_json(run.init->x)}, {"y", vec_json(run.init->y)}};
  else
    doc["init"] = "barycenter";
  doc["diagnostics"] = {{"gap", run.diagnostics.gap},
                        {"v_star", run.diagnostics.v_star},
                        {"dist", run.diagnostics.dist},
                        {"apt", run.diagnostics.apt}};
  doc["check_viability"] = run.check_viability;
  doc["outputs"] = spec.outputs.string();
  if (!spec.sweep.empty()) {
    json sweep = json::object();
    if (!spec.sweep.schedule_a.empty()) sweep["schedule.a"] = spec.sweep.schedule_a;
    if (!spec.sweep.schedule_p.empty()) sweep["schedule.p"] = spec.sweep.schedule_p;
    if (!spec.sweep.smoothing_mu.empty()) sweep["smoothing.mu"] = spec.sweep.smoothing_mu;
    if (!spec.sweep.seed.empty()) sweep["seed"] = spec.sweep.seed;
    doc["sweep"] = sweep;
  }
  return doc.dump(2) + "\n";
}

std::vector<GridPoint> expand_grid(const ExperimentSpec& spec) {
  const RunConfig& base = spec.run;
  const std::vector<double> as = spec.sweep.schedule_a.empty() ? std::vector<double>{base.schedule.a} : spec.sweep.schedule_a;
  const std::vector<double> ps = spec.sweep.schedule_p.empty() ? std::vector<double>{base.schedule.p} : spec.sweep.schedule_p;
  const std::vector<double> mus =
      spec.sweep.smoothing_mu.empty() ? std::vector<double>{base.smoothing.mu0} : spec.sweep.smoothing_mu;
  const std::vector<std::uint64_t> seeds =
      spec.sweep.seed.empty() ? std::vector<std::uint64_t>{base.seed} : spec.sweep.seed;

  std::vector<GridPoint> grid;
  for (double a : as) {
    for (double p : ps) {
      for (double mu : mus) {
        for (std::uint64_t seed : seeds) {
          GridPoint point{grid.size(), base, {}};
          RunConfig& cfg = point.config;
          if (!spec.sweep.schedule_a.empty() || !spec.sweep.schedule_p.empty())
            cfg.schedule = StepSchedule::polynomial(a, p);
          if (!spec.sweep.smoothing_mu.empty()) {
            cfg.smoothing = cfg.smoothing.kind == SmoothingSchedule::Kind::kConstant
                                ? SmoothingSchedule::constant(mu)
                                : SmoothingSchedule::geometric(mu, cfg.smoothing.decay, std::min(cfg.smoothing.floor, mu));
          }
          cfg.seed = seed;
          if (!spec.sweep.schedule_a.empty()) point.params["schedule.a"] = a;
          if (!spec.sweep.schedule_p.empty()) point.params["schedule.p"] = p;
          if (!spec.sweep.smoothing_mu.empty()) point.params["smoothing.mu"] = mu;
          point.params["seed"] = static_cast<double>(seed);
          grid.push_back(std::move(point));
        }
      }
    }
  }
  return grid;
}

ExperimentSpec default_spec() {
  ExperimentSpec spec(RunConfig(SaddleProblem::matching_pennies()));
  spec.name = "matching_pennies";
  spec.run.maps = {MirrorMap::entropic(), MirrorMap::entropic()};
  spec.run.max_iters = 10000;
  spec.run.record_every = 100;
  return spec;
}

}  // namespace smd::harness
