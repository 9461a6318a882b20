#pragma once

#include <map>
#include <string>
#include <vector>

#include "dyadic/certificate.hpp"

namespace dyadic::harness {

enum class RunStatus { ok, budget_exhausted, numerical_failure };

std::string_view to_string(RunStatus status);
RunStatus parse_run_status(std::string_view text);

struct RunRecord {
  std::string scenario;
  std::string config_digest;
  std::string started;   // ISO 8601 UTC
  std::string finished;
  std::vector<std::string> files;  // relative to the output directory
  std::map<std::string, double> scalars;
  std::map<std::string, bool> flags;
  RunStatus status = RunStatus::ok;
  std::string message;

  bool operator==(const RunRecord&) const = default;
};

std::string utc_timestamp();

/// Non-finite scalars are written as the strings "inf", "-inf", "nan".
std::string to_json(const RunRecord& record);
RunRecord record_from_json(const std::string& text);

/// Every CertificateReport field plus the tool version.
std::string to_json(const CertificateReport& report);

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace dyadic::harness
