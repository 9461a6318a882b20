#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dyadic/diagnostics.hpp"
#include "dyadic/harness/record.hpp"
#include "dyadic/trajectory.hpp"

namespace dyadic::harness {

/// Shortest decimal that round-trips to the same double.
std::string format_number(double value);

/// Header t,a_0,...,a_N (c_ or b_ for the other variable kinds).
void write_state_csv(const std::filesystem::path& path, const Trajectory& trajectory);
/// Header t,E,sup_theta,H_s...,flux_J...
void write_diagnostics_csv(const std::filesystem::path& path, const std::vector<DiagnosticsRecord>& rows,
                           const DiagnosticsOptions& options);
void write_table_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows);
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// gnuplot script plotting the state and diagnostics CSVs.
std::string gnuplot_script(const std::string& state_csv, const std::string& diagnostics_csv, int truncation);

/// Writes states.csv, diagnostics.csv, plot.gp into dir, appends them to
/// record.files and returns their names.
std::vector<std::string> write_outputs(const std::filesystem::path& dir, RunRecord& record,
                                       const Trajectory& trajectory, const std::vector<DiagnosticsRecord>& rows,
                                       const DiagnosticsOptions& options);

/// summary.json
void write_summary(const std::filesystem::path& dir, RunRecord& record);

}  // namespace dyadic::harness
