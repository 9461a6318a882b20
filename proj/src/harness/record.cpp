#include "dyadic/harness/record.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <limits>

#include "json.hpp"

#include "dyadic/error.hpp"
#include "dyadic/version.hpp"

namespace dyadic::harness {

using nlohmann::json;

std::string_view to_string(RunStatus status) {
  switch (status) {
    case RunStatus::ok: return "ok";
    case RunStatus::budget_exhausted: return "budget_exhausted";
    case RunStatus::numerical_failure: return "numerical_failure";
  }
  return "ok";
}

RunStatus parse_run_status(std::string_view text) {
  if (text == "ok") return RunStatus::ok;
  if (text == "budget_exhausted") return RunStatus::budget_exhausted;
  if (text == "numerical_failure") return RunStatus::numerical_failure;
  throw ValidationError("unknown run status '" + std::string(text) + "'");
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

json scalar_to_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double scalar_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  throw ValidationError("bad scalar '" + s + "'");
}

}  // namespace

std::string to_json(const RunRecord& r) {
  json j;
  j["scenario"] = r.scenario;
  j["config_digest"] = r.config_digest;
  j["started"] = r.started;
  j["finished"] = r.finished;
  j["files"] = r.files;
  json scalars = json::object();
  for (const auto& [k, v] : r.scalars) scalars[k] = scalar_to_json(v);
  j["scalars"] = scalars;
  j["flags"] = r.flags;
  j["status"] = std::string(to_string(r.status));
  j["message"] = r.message;
  return j.dump(2) + "\n";
}

RunRecord record_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    RunRecord r;
    r.scenario = j.at("scenario").get<std::string>();
    r.config_digest = j.at("config_digest").get<std::string>();
    r.started = j.at("started").get<std::string>();
    r.finished = j.at("finished").get<std::string>();
    r.files = j.at("files").get<std::vector<std::string>>();
    for (const auto& [k, v] : j.at("scalars").items()) r.scalars[k] = scalar_from_json(v);
    r.flags = j.at("flags").get<std::map<std::string, bool>>();
    r.status = parse_run_status(j.at("status").get<std::string>());
    r.message = j.at("message").get<std::string>();
    return r;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("run record: ") + e.what());
  }
}

std::string to_json(const CertificateReport& rep) {
  const CertificateParams& p = rep.params;
  json params = {{"k", p.k},
                 {"theta", p.theta},
                 {"lambda", p.lambda},
                 {"B_target", p.B_target},
                 {"delta", p.delta ? json(*p.delta) : json(nullptr)},
                 {"t0", p.t0},
                 {"margin", p.margin},
                 {"T_check", p.T_check},
                 {"quad_tol", p.quad_tol},
                 {"grid_points", p.grid_points},
                 {"fallback_slack", p.fallback_slack}};
  json j = {{"tool_version", std::string(kVersion)},
            {"params", params},
            {"target_feasible", rep.target_feasible},
            {"B_target_used", rep.B_target_used},
            {"delta_star", rep.delta_star},
            {"B_at_delta_star", rep.B_at_delta_star},
            {"B_limit", rep.B_limit},
            {"B_limit_quadrature", rep.B_limit_quadrature},
            {"beta_times", rep.beta_times},
            {"beta_values", rep.beta_values},
            {"sup_beta", rep.sup_beta},
            {"sup_beta_time", rep.sup_beta_time},
            {"beta_at_T_check", rep.beta_at_T_check},
            {"tail_bound", scalar_to_json(rep.tail_bound)},
            {"max_grid_increment", rep.max_grid_increment},
            {"quad_tol", rep.quad_tol},
            {"max_quadrature_intervals", rep.max_quadrature_intervals},
            {"verdict", rep.verdict},
            {"failing_conditions", rep.failing_conditions}};
  return j.dump(2) + "\n";
}

}  // namespace dyadic::harness
