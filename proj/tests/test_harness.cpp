#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "smd/errors.hpp"
#include "smd/harness/experiment.hpp"
#include "smd/harness/spec.hpp"
#include "smd/harness/trace_io.hpp"
#include "smd/harness/verify.hpp"

namespace smd::harness {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("smd_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string error_of(const std::string& text) {
  try {
    parse_spec(text);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

const char* kMinimal = R"({"name": "mp", "problem": {"type": "matching_pennies"}})";

TEST(Spec, MinimalSpecUsesDefaults) {
  const ExperimentSpec s = parse_spec(kMinimal);
  EXPECT_EQ(s.name, "mp");
  EXPECT_FALSE(s.run.init.has_value());
  EXPECT_EQ(s.run.initial_point().x, (Vector(2) << 0.5, 0.5).finished());
  EXPECT_TRUE(s.run.maps.x.is_entropic());
  EXPECT_EQ(s.run.schedule, StepSchedule::polynomial(1, 1));
  EXPECT_TRUE(s.sweep.empty());
  EXPECT_EQ(expand_grid(s).size(), 1u);
}

TEST(Spec, RobbinsMonroViolationIsNamed) {
  const std::string msg =
      error_of(R"({"name": "mp", "problem": {"type": "matching_pennies"}, "schedule": {"type": "polynomial", "p": 0.4}})");
  EXPECT_NE(msg.find("Robbins-Monro"), std::string::npos) << msg;
  EXPECT_THROW(parse_spec(R"({"name": "x", "problem": {"type": "matching_pennies"},
                             "schedule": {"type": "polynomial", "p": 0.4}})"),
               ValidationError);
}

TEST(Spec, ConstantScheduleNeedsOptIn) {
  EXPECT_THROW(parse_spec(R"({"name": "x", "problem": {"type": "matching_pennies"},
                             "schedule": {"type": "constant", "alpha": 0.1}})"),
               ValidationError);
  const auto s = parse_spec(R"({"name": "x", "problem": {"type": "matching_pennies"},
                               "schedule": {"type": "constant", "alpha": 0.1, "diagnostic_only": true}})");
  EXPECT_EQ(s.run.schedule, StepSchedule::constant(0.1));
}

TEST(Spec, SeedSweepExpands) {
  const auto s = parse_spec(R"({"name": "x", "problem": {"type": "matching_pennies"}, "sweep": {"seed": [1, 2, 3]}})");
  const auto grid = expand_grid(s);
  ASSERT_EQ(grid.size(), 3u);
  EXPECT_EQ(grid[2].config.seed, 3u);
  EXPECT_EQ(grid[1].index, 1u);
}

TEST(Spec, GridIsCartesianWithSeedFastest) {
  const auto s = parse_spec(R"({"name": "x", "problem": {"type": "matching_pennies"}, "algorithm": "szspmd",
                               "sweep": {"schedule.p": [0.75, 1.0], "smoothing.mu": [0.1, 0.01], "seed": [5, 6]}})");
  const auto grid = expand_grid(s);
  ASSERT_EQ(grid.size(), 8u);
  EXPECT_EQ(grid[0].config.seed, 5u);
  EXPECT_EQ(grid[1].config.seed, 6u);
  EXPECT_EQ(grid[2].config.smoothing.mu0, 0.01);
  EXPECT_EQ(grid[4].config.schedule.p, 1.0);
  EXPECT_EQ(grid[7].params.at("smoothing.mu"), 0.01);
}

TEST(Spec, EveryProblemIsListed) {
  const std::string msg = error_of(R"({"name": "", "problem": {"type": "matching_pennies"}, "bogus": 1,
                                      "max_iters": 0, "noise": {"type": "gaussian", "std": -1}})");
  EXPECT_NE(msg.find("bogus: unknown key"), std::string::npos) << msg;
  EXPECT_NE(msg.find("name: must be nonempty"), std::string::npos) << msg;
  EXPECT_NE(msg.find("noise.std"), std::string::npos) << msg;
  EXPECT_NE(msg.find("max_iters must be >= 1"), std::string::npos) << msg;
}

TEST(Spec, ParseErrorsCarryContext) {
  try {
    parse_spec("{\n  \"name\": \"x\",\n  \"problem\": {\"type\": \"matching_pennies\"\n}");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos) << e.what();
  }
  try {
    parse_spec(R"({"name": "x", "problem": {"type": "matching_pennies"}, "max_iters": "many"})");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("max_iters"), std::string::npos);
  }
  EXPECT_THROW(load_spec("/nonexistent/spec.json"), IoError);
}

TEST(Spec, EntropicMapOnABallIsRejected) {
  const std::string msg = error_of(R"({"name": "q", "problem": {"type": "quadratic_saddle",
      "P": [[1]], "Q": [[1]], "C": [[0]], "c": [0], "d": [0],
      "x_set": {"type": "ball", "center": [0], "radius": 1}, "y_set": {"type": "ball", "center": [0], "radius": 1}},
      "x_map": {"type": "entropic"}})");
  EXPECT_NE(msg.find("x_map"), std::string::npos) << msg;
}

TEST(Spec, RoundTrip) {
  std::vector<ExperimentSpec> specs;
  specs.push_back(default_spec());
  specs.push_back(parse_spec(R"({"name": "q", "algorithm": "szspmd",
      "problem": {"type": "quadratic_saddle", "P": [[2, 0.5], [0.5, 1]], "Q": [[1]], "C": [[1], [-0.3]],
                  "c": [0.1, 0.2], "d": [0.3],
                  "x_set": {"type": "box", "lower": [-1, -1], "upper": [1, 1]},
                  "y_set": {"type": "ball", "center": [0.5], "radius": 2}},
      "smoothing": {"type": "geometric", "mu0": 0.1, "decay": 0.999},
      "schedule": {"type": "polynomial", "a": 0.3, "p": 0.6},
      "seed": 18446744073709551615, "max_iters": 123, "record_every": 7,
      "init": {"x": [0.1, 0.2], "y": [0.3]}, "diagnostics": {"gap": false, "apt": true},
      "outputs": "elsewhere", "sweep": {"smoothing.mu": [0.1, 0.05], "seed": [1, 2]}})"));
  specs.push_back(parse_spec(R"({"name": "g", "problem": {"type": "matrix_game", "A": [[0.1, 0.7, -0.3], [1e-17, 2, 3]]},
      "noise": {"type": "column_sampling"}, "check_viability": true,
      "schedule": {"type": "constant", "alpha": 0.3333333333333333, "diagnostic_only": true}})"));
  for (const auto& s : specs) {
    const std::string text = write_spec(s);
    const ExperimentSpec back = parse_spec(text);
    EXPECT_TRUE(back == s) << text;
    EXPECT_EQ(write_spec(back), text);
  }
}

TEST(TraceIo, RoundTripIsBitExact) {
  RunConfig c(SaddleProblem::matching_pennies());
  c.maps = {MirrorMap::entropic(), MirrorMap::entropic()};
  c.algorithm = Algorithm::kSzspmd;
  c.max_iters = 200;
  c.record_every = 3;
  c.diagnostics.gap = false;
  const Trace t = run(c);
  std::stringstream buffer;
  write_trace_csv(buffer, t);
  std::string header;
  std::getline(buffer, header);
  EXPECT_EQ(header, "n,t,alpha,mu,x_0,x_1,y_0,y_1,gap,v_star,dist_euclid");
  buffer.seekg(0);
  const auto records = read_trace_csv(buffer);
  EXPECT_EQ(records, t.records);
  EXPECT_FALSE(records[1].gap.has_value());
}

TEST(TraceIo, RejectsMalformedRows) {
  std::istringstream short_row("n,t,alpha,mu,x_0,y_0,gap,v_star,dist_euclid\n0,0,1,,0.5\n");
  EXPECT_THROW(read_trace_csv(short_row), ParseError);
  std::istringstream bad_number("n,t,alpha,mu,x_0,y_0,gap,v_star,dist_euclid\n0,zero,1,,1,1,,,\n");
  EXPECT_THROW(read_trace_csv(bad_number), ParseError);
  std::istringstream bad_header("n,t,x\n");
  EXPECT_THROW(read_trace_csv(bad_header), ParseError);
}

TEST(Report, Quantiles) {
  const Quantiles q = quantiles({5, 1, 4, 2, 3});
  EXPECT_EQ(q.median, 3.0);
  EXPECT_EQ(q.q1, 2.0);
  EXPECT_EQ(q.q3, 4.0);
  const Quantiles e = quantiles({1, 2, 3, 4});
  EXPECT_EQ(e.median, 2.5);
  EXPECT_EQ(e.q1, 1.75);
  EXPECT_THROW(quantiles({}), OutOfRange);
}

TEST(Experiment, SingleRunWritesOneCsvAndOneSummary) {
  ExperimentSpec s = parse_spec(kMinimal);
  s.outputs = scratch("single");
  s.run.max_iters = 50;
  const auto result = run_experiment(s);
  ASSERT_EQ(result.report.runs.size(), 1u);
  std::size_t csv = 0, json = 0;
  for (const auto& entry : fs::directory_iterator(s.outputs)) {
    csv += entry.path().extension() == ".csv";
    json += entry.path().extension() == ".json";
  }
  EXPECT_EQ(csv, 1u);
  EXPECT_EQ(json, 1u);
  EXPECT_EQ(read_trace_csv(result.report.runs[0].trace_path).size(), 51u);
}

TEST(Experiment, SeedSweepReportsMedianAndIsReproducible) {
  ExperimentSpec s = parse_spec(R"({"name": "sweep", "problem": {"type": "matching_pennies"},
      "noise": {"type": "gaussian", "std": 0.1}, "max_iters": 300, "record_every": 50,
      "sweep": {"seed": [1, 2, 3, 4, 5, 6, 7, 8, 9, 10]}})");
  s.outputs = scratch("sweep_a");
  const auto a = run_experiment(s, {4, false});
  ASSERT_EQ(a.report.groups.size(), 1u);
  ASSERT_TRUE(a.report.groups[0].dist.has_value());
  EXPECT_EQ(a.report.groups[0].runs, 10u);
  const std::string summary_a = slurp(s.outputs / "sweep_summary.json");
  EXPECT_NE(summary_a.find("\"median\""), std::string::npos);

  // Same spec, different thread count and directory: identical bytes.
  const fs::path first = s.outputs;
  s.outputs = scratch("sweep_b");
  run_experiment(s, {1, false});
  for (int k = 0; k < 10; ++k) {
    const std::string file = "sweep_run" + std::to_string(k) + ".csv";
    EXPECT_EQ(slurp(first / file), slurp(s.outputs / file)) << file;
  }
  EXPECT_EQ(summary_a, slurp(s.outputs / "sweep_summary.json"));
}

TEST(Experiment, RunsAreIndependentOfGridPosition) {
  ExperimentSpec s = parse_spec(R"({"name": "pos", "problem": {"type": "matching_pennies"},
      "noise": {"type": "gaussian", "std": 0.1}, "max_iters": 100, "sweep": {"seed": [3, 9]}})");
  s.outputs = scratch("pos_a");
  const auto both = run_experiment(s, {2, true});
  s.sweep.seed = {9};
  s.outputs = scratch("pos_b");
  const auto alone = run_experiment(s, {1, true});
  EXPECT_EQ(both.traces[1].records, alone.traces[0].records);
}

TEST(Verify, DefaultSpecPasses) {
  const SummaryReport r = verify(default_spec());
  for (const auto& c : r.checks) EXPECT_EQ(c.status, CheckResult::Status::kPass) << c.name << ": " << c.detail;
  EXPECT_TRUE(r.all_checks_passed());
}

TEST(Verify, DualSignFlipBreaksLyapunov) {
  const ExperimentSpec s = default_spec();
  const StepFn flipped = [](const SaddleProblem& p, const MirrorMaps& maps, const Vector& x, const Vector& y,
                            double alpha) {
    const Gradients g = gradients(p, x, y);
    return SaddlePoint{conjugate_step(maps.x, p.x_set(), grad_R(maps.x, x) - alpha * g.g_x),
                       conjugate_step(maps.y, p.y_set(), grad_R(maps.y, y) - alpha * g.g_y)};
  };
  EXPECT_EQ(check_solver_lyapunov(s.run, 2000, 5).status, CheckResult::Status::kPass);
  EXPECT_EQ(check_solver_lyapunov(s.run, 2000, 5, flipped).status, CheckResult::Status::kFail);
}

TEST(Verify, MissingReferenceSaddlesAreSkipped) {
  ExperimentSpec s(RunConfig(SaddleProblem::matrix_game((Matrix(2, 2) << 2, -1, -1, 1).finished())));
  s.name = "norefs";
  s.run.maps = {MirrorMap::entropic(), MirrorMap::entropic()};
  const SummaryReport r = verify(s);
  for (const auto& c : r.checks) {
    if (c.name == "dynamics.apt" || c.name == "solvers.dist" || c.name == "solvers.lyapunov")
      EXPECT_EQ(c.status, CheckResult::Status::kSkip) << c.name;
    else
      EXPECT_NE(c.status, CheckResult::Status::kFail) << c.name << ": " << c.detail;
  }
  EXPECT_TRUE(r.all_checks_passed());
}

}  // namespace
}  // namespace smd::harness
