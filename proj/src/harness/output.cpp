#include "dyadic/harness/output.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "dyadic/error.hpp"

namespace dyadic::harness {

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_state_csv(const std::filesystem::path& path, const Trajectory& trajectory) {
  std::string out = "t";
  const std::string prefix(to_string(trajectory.kind()));
  for (std::size_t j = 0; j < trajectory.dim(); ++j) out += "," + prefix + "_" + std::to_string(j);
  out += "\n";
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    out += format_number(trajectory.time(i));
    for (double v : trajectory.values(i)) out += "," + format_number(v);
    out += "\n";
  }
  write_text(path, out);
}

void write_diagnostics_csv(const std::filesystem::path& path, const std::vector<DiagnosticsRecord>& rows,
                           const DiagnosticsOptions& options) {
  std::string out = "t,E,sup_theta";
  for (double s : options.sobolev_exponents) out += ",H_" + format_number(s);
  for (int j : options.flux_shells) out += ",flux_" + std::to_string(j);
  out += "\n";
  for (const auto& r : rows) {
    out += format_number(r.t) + "," + format_number(r.energy) + "," + format_number(r.sup_theta);
    for (double v : r.sobolev) out += "," + format_number(v);
    for (double v : r.flux) out += "," + format_number(v);
    out += "\n";
  }
  write_text(path, out);
}

void write_table_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
  out += "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_number(row[i]);
    out += "\n";
  }
  write_text(path, out);
}

std::string gnuplot_script(const std::string& state_csv, const std::string& diagnostics_csv, int truncation) {
  std::ostringstream s;
  s << "set datafile separator ','\n"
    << "set key autotitle columnhead\n"
    << "set xlabel 't'\n"
    << "set logscale y\n"
    << "set terminal pngcairo size 1000,700\n"
    << "set output 'shells.png'\n"
    << "plot for [j=3:" << truncation + 2 << "] '" << state_csv << "' using 1:j with lines\n"
    << "set output 'diagnostics.png'\n"
    << "plot '" << diagnostics_csv << "' using 1:2 with lines, '' using 1:3 with lines\n";
  return s.str();
}

std::vector<std::string> write_outputs(const std::filesystem::path& dir, RunRecord& record,
                                       const Trajectory& trajectory, const std::vector<DiagnosticsRecord>& rows,
                                       const DiagnosticsOptions& options) {
  std::vector<std::string> files{"states.csv", "diagnostics.csv", "plot.gp"};
  write_state_csv(dir / files[0], trajectory);
  write_diagnostics_csv(dir / files[1], rows, options);
  const int n = trajectory.dim() == 0 ? 0 : static_cast<int>(trajectory.dim()) - 1;
  write_text(dir / files[2], gnuplot_script(files[0], files[1], n));
  record.files.insert(record.files.end(), files.begin(), files.end());
  return files;
}

void write_summary(const std::filesystem::path& dir, RunRecord& record) {
  if (std::find(record.files.begin(), record.files.end(), "summary.json") == record.files.end())
    record.files.push_back("summary.json");
  write_text(dir / "summary.json", to_json(record));
}

}  // namespace dyadic::harness
