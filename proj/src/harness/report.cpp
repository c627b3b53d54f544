#include "smd/harness/report.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "smd/errors.hpp"

namespace smd::harness {

using nlohmann::ordered_json;

Quantiles quantiles(std::vector<double> values) {
  if (values.empty()) throw OutOfRange("quantiles of an empty sample");
  std::sort(values.begin(), values.end());
  auto at = [&](double q) {
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  return {at(0.25), at(0.5), at(0.75)};
}

const char* to_string(CheckResult::Status status) {
  switch (status) {
    case CheckResult::Status::kPass:
      return "pass";
    case CheckResult::Status::kFail:
      return "fail";
    case CheckResult::Status::kSkip:
      return "skip";
  }
  return "?";
}

bool SummaryReport::any_run_failed() const {
  return std::any_of(runs.begin(), runs.end(), [](const RunSummary& r) { return !r.ok; });
}

bool SummaryReport::all_checks_passed() const {
  return std::none_of(checks.begin(), checks.end(),
                      [](const CheckResult& c) { return c.status == CheckResult::Status::kFail; });
}

namespace {

ordered_json optional_json(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

ordered_json quantiles_json(const std::optional<Quantiles>& q) {
  if (!q) return nullptr;
  return {{"median", q->median}, {"q1", q->q1}, {"q3", q->q3}, {"iqr", q->iqr()}};
}

ordered_json params_json(const std::map<std::string, double>& params) {
  ordered_json out = ordered_json::object();
  for (const auto& [k, v] : params) out[k] = v;
  return out;
}

}  // namespace

std::string summary_json(const SummaryReport& report) {
  ordered_json doc;
  doc["name"] = report.name;
  ordered_json runs = ordered_json::array();
  for (const auto& r : report.runs) {
    ordered_json run;
    run["index"] = r.index;
    run["params"] = params_json(r.params);
    run["seed"] = r.seed;
    run["config_digest"] = r.config_digest;
    run["trace"] = r.trace_path.filename().string();
    run["ok"] = r.ok;
    if (!r.ok) run["error"] = r.error;
    run["final"] = {{"gap", optional_json(r.final_gap)},
                    {"v_star", optional_json(r.final_v_star)},
                    {"dist_euclid", optional_json(r.final_dist)}};
    if (!r.apt.empty()) {
      ordered_json apt = ordered_json::object();
      for (const auto& [n, d] : r.apt) apt[std::to_string(n)] = d;
      run["apt"] = apt;
    }
    runs.push_back(run);
  }
  doc["runs"] = runs;

  ordered_json groups = ordered_json::array();
  for (const auto& g : report.groups) {
    ordered_json group;
    group["params"] = params_json(g.params);
    group["runs"] = g.runs;
    group["failed"] = g.failed;
    group["final"] = {{"gap", quantiles_json(g.gap)},
                      {"v_star", quantiles_json(g.v_star)},
                      {"dist_euclid", quantiles_json(g.dist)}};
    if (!g.apt.empty()) {
      ordered_json apt = ordered_json::object();
      for (const auto& [n, q] : g.apt) apt[std::to_string(n)] = quantiles_json(q);
      group["apt"] = apt;
    }
    groups.push_back(group);
  }
  doc["groups"] = groups;

  ordered_json checks = ordered_json::array();
  for (const auto& c : report.checks)
    checks.push_back({{"name", c.name}, {"status", to_string(c.status)}, {"detail", c.detail}});
  doc["checks"] = checks;
  return doc.dump(2) + "\n";
}

}  // namespace smd::harness
