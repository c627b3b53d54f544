#include "smd/harness/experiment.hpp"

#include <atomic>
#include <algorithm>
#include <fstream>
#include <mutex>
#include <thread>

#include "smd/errors.hpp"
#include "smd/harness/trace_io.hpp"

namespace smd::harness {

namespace {

std::optional<double> last_value(const Trace& trace, std::optional<double> IterateRecord::*field) {
  if (trace.records.empty()) return std::nullopt;
  return trace.records.back().*field;
}

double time_at(const StepSchedule& schedule, std::uint64_t n) {
  double t = 0.0;
  for (std::uint64_t k = 0; k < n; ++k) t += schedule_value(schedule, k);
  return t;
}

struct RunOutcome {
  RunSummary summary;
  Trace trace;
};

RunOutcome execute(const ExperimentSpec& spec, const GridPoint& point) {
  RunOutcome out;
  RunSummary& s = out.summary;
  s.index = point.index;
  s.params = point.params;
  s.seed = point.config.seed;
  s.config_digest = config_digest(point.config);
  s.trace_path = spec.outputs / (spec.name + "_run" + std::to_string(point.index) + ".csv");
  try {
    out.trace = run(point.config);
    write_trace_csv(s.trace_path, out.trace);
    s.final_gap = last_value(out.trace, &IterateRecord::gap);
    s.final_v_star = last_value(out.trace, &IterateRecord::v_star);
    s.final_dist = last_value(out.trace, &IterateRecord::dist_euclid);
    if (point.config.diagnostics.apt) s.apt = apt_profile(out.trace, point.config);
  } catch (const IoError&) {
    throw;
  } catch (const std::exception& e) {
    s.ok = false;
    s.error = e.what();
  }
  return out;
}

std::vector<GroupSummary> group_runs(const std::vector<RunSummary>& runs) {
  std::vector<GroupSummary> groups;
  std::vector<std::vector<const RunSummary*>> members;
  for (const auto& r : runs) {
    std::map<std::string, double> key = r.params;
    key.erase("seed");
    auto it = std::find_if(groups.begin(), groups.end(), [&](const GroupSummary& g) { return g.params == key; });
    if (it == groups.end()) {
      groups.push_back({key, 0, 0, {}, {}, {}, {}});
      members.emplace_back();
      it = groups.end() - 1;
    }
    members[static_cast<std::size_t>(it - groups.begin())].push_back(&r);
  }
  for (std::size_t g = 0; g < groups.size(); ++g) {
    GroupSummary& group = groups[g];
    std::vector<double> gap, v_star, dist;
    std::map<std::uint64_t, std::vector<double>> apt;
    for (const RunSummary* r : members[g]) {
      ++group.runs;
      if (!r->ok) {
        ++group.failed;
        continue;
      }
      if (r->final_gap) gap.push_back(*r->final_gap);
      if (r->final_v_star) v_star.push_back(*r->final_v_star);
      if (r->final_dist) dist.push_back(*r->final_dist);
      for (const auto& [n, d] : r->apt) apt[n].push_back(d);
    }
    if (!gap.empty()) group.gap = quantiles(gap);
    if (!v_star.empty()) group.v_star = quantiles(v_star);
    if (!dist.empty()) group.dist = quantiles(dist);
    for (auto& [n, values] : apt) group.apt[n] = quantiles(values);
  }
  return groups;
}

}  // namespace

DynamicsConfig apt_dynamics(const RunConfig& config, double window) {
  return DynamicsConfig(config.problem, config.maps, 1e-3, window, Scheme::kTangentEuler);
}

std::map<std::uint64_t, double> apt_profile(const Trace& trace, const RunConfig& config, double window) {
  std::map<std::uint64_t, double> out;
  if (trace.records.size() < 2) return out;
  const DynamicsConfig dyn = apt_dynamics(config, window);
  const double t_end = trace.records.back().t;
  for (std::uint64_t n = 100; n <= config.max_iters; n *= 10) {
    const double t = time_at(config.schedule, n);
    if (t + window > t_end) break;
    out[n] = apt_distance(trace, dyn, t, window);
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentSpec& spec, const ExperimentOptions& options) {
  std::error_code ec;
  std::filesystem::create_directories(spec.outputs, ec);
  if (ec) throw IoError("cannot create output directory " + spec.outputs.string() + ": " + ec.message());

  const std::vector<GridPoint> grid = expand_grid(spec);
  std::vector<RunOutcome> outcomes(grid.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr io_failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t k = next++; k < grid.size(); k = next++) {
      try {
        outcomes[k] = execute(spec, grid[k]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!io_failure) io_failure = std::current_exception();
      }
    }
  };

  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, grid.size()));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (io_failure) std::rethrow_exception(io_failure);

  ExperimentResult result;
  result.report.name = spec.name;
  for (auto& o : outcomes) {
    result.report.runs.push_back(std::move(o.summary));
    if (options.keep_traces) result.traces.push_back(std::move(o.trace));
  }
  result.report.groups = group_runs(result.report.runs);

  const auto summary_path = spec.outputs / (spec.name + "_summary.json");
  std::ofstream out(summary_path, std::ios::binary);
  if (!out) throw IoError("cannot write " + summary_path.string());
  out << summary_json(result.report);
  return result;
}

}  // namespace smd::harness
