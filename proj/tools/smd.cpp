// Command-line front end: run, sweep, verify and trace.

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "smd/errors.hpp"
#include "smd/harness/experiment.hpp"
#include "smd/harness/trace_io.hpp"
#include "smd/harness/verify.hpp"

namespace {

using namespace smd::harness;

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kVerifyFailed = 2;
constexpr int kRuntime = 3;

struct Overrides {
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

void apply(ExperimentSpec& spec, const Overrides& o) {
  if (!o.out_dir.empty()) spec.outputs = o.out_dir;
  if (o.seed) {
    spec.run.seed = *o.seed;
    spec.sweep.seed.clear();
  }
}

void print_group(const GroupSummary& g) {
  std::string label;
  for (const auto& [k, v] : g.params) label += (label.empty() ? "" : " ") + k + "=" + std::to_string(v);
  if (label.empty()) label = "all";
  std::printf("  [%s] runs=%zu failed=%zu", label.c_str(), g.runs, g.failed);
  if (g.dist) std::printf(" dist median=%.6g iqr=%.6g", g.dist->median, g.dist->iqr());
  if (g.gap) std::printf(" gap median=%.6g", g.gap->median);
  std::printf("\n");
}

int do_run(const std::string& path, const Overrides& o, bool require_grid) {
  ExperimentSpec spec = load_spec(path);
  apply(spec, o);
  if (require_grid && spec.sweep.empty()) {
    std::cerr << "sweep: spec has no sweep block\n";
    return kInvalid;
  }
  const ExperimentResult result = run_experiment(spec);
  const SummaryReport& report = result.report;
  if (!o.quiet) {
    std::printf("%s: %zu run(s), outputs in %s\n", report.name.c_str(), report.runs.size(),
                spec.outputs.string().c_str());
    for (const auto& g : report.groups) print_group(g);
    for (const auto& r : report.runs)
      if (!r.ok) std::printf("  run %zu failed: %s\n", r.index, r.error.c_str());
  }
  return report.any_run_failed() ? kRuntime : kOk;
}

int do_verify(const std::string& path, const Overrides& o) {
  ExperimentSpec spec = path.empty() ? default_spec() : load_spec(path);
  apply(spec, o);
  const SummaryReport report = verify(spec);
  if (!o.quiet)
    for (const auto& c : report.checks)
      std::printf("%-28s %-4s %s\n", c.name.c_str(), to_string(c.status), c.detail.c_str());
  return report.all_checks_passed() ? kOk : kVerifyFailed;
}

int do_trace(const std::string& path, const std::string& stat) {
  const auto records = read_trace_csv(path);
  std::vector<double> values;
  for (const auto& r : records) {
    const std::optional<double>& v = stat == "gap" ? r.gap : stat == "v_star" ? r.v_star : r.dist_euclid;
    if (v) values.push_back(*v);
  }
  std::printf("%s: %zu of %zu rows recorded\n", stat.c_str(), values.size(), records.size());
  if (values.empty()) return kOk;
  const Quantiles q = quantiles(values);
  std::printf("  first=%.17g\n  final=%.17g\n  min=%.17g\n  max=%.17g\n  median=%.17g\n  q1=%.17g\n  q3=%.17g\n",
              values.front(), values.back(), *std::min_element(values.begin(), values.end()),
              *std::max_element(values.begin(), values.end()), q.median, q.q1, q.q3);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic and zeroth-order mirror descent for constrained saddle-point problems"};
  app.require_subcommand(1);
  Overrides o;
  std::uint64_t seed = 0;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out-dir", o.out_dir, "Output directory (overrides the spec)");
    sub->add_option("--seed", seed, "Seed (overrides the spec and any seed sweep)");
    sub->add_flag("--quiet", o.quiet, "Print nothing on success");
  };

  std::string spec_path;
  auto* run_cmd = app.add_subcommand("run", "Run every grid point of a spec");
  run_cmd->add_option("spec", spec_path, "Experiment spec (JSON)")->required();
  add_common(run_cmd);

  auto* sweep_cmd = app.add_subcommand("sweep", "Like run, but the spec must define a sweep");
  sweep_cmd->add_option("spec", spec_path, "Experiment spec (JSON)")->required();
  add_common(sweep_cmd);

  auto* verify_cmd = app.add_subcommand("verify", "Run the property suite (default: matching pennies)");
  verify_cmd->add_option("spec", spec_path, "Experiment spec (JSON)");
  add_common(verify_cmd);

  std::string trace_path;
  std::string stat = "dist";
  auto* trace_cmd = app.add_subcommand("trace", "Summarize one diagnostic column of a trace CSV");
  trace_cmd->add_option("trace", trace_path, "Trace CSV")->required();
  trace_cmd->add_option("--stat", stat, "Column")->check(CLI::IsMember({"gap", "v_star", "dist"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  for (auto* sub : {run_cmd, sweep_cmd, verify_cmd})
    if (sub->parsed() && sub->count("--seed") > 0) o.seed = seed;

  try {
    if (run_cmd->parsed()) return do_run(spec_path, o, false);
    if (sweep_cmd->parsed()) return do_run(spec_path, o, true);
    if (verify_cmd->parsed()) return do_verify(spec_path, o);
    return do_trace(trace_path, stat);
  } catch (const smd::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kInvalid;
  } catch (const smd::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kInvalid;
  } catch (const smd::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
}
