#include "dyadic/harness/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dyadic/error.hpp"
#include "dyadic/harness/output.hpp"
#include "dyadic/harness/record.hpp"

namespace dyadic::harness {

namespace {

struct Names {
  Scenario value;
  std::string_view name;
};

constexpr Names kScenarios[] = {
    {Scenario::simulate, "simulate"},         {Scenario::regularity, "regularity"},
    {Scenario::decay, "decay"},               {Scenario::scaling, "scaling"},
    {Scenario::energy_balance, "energy-balance"}, {Scenario::onsager, "onsager"},
    {Scenario::galerkin_convergence, "galerkin-convergence"}, {Scenario::certificate, "certificate"},
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  if (trim(s).empty()) return out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = s.find(',', pos);
    out.push_back(trim(s.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

class Setter {
 public:
  Setter(int line, std::string key, std::string_view value) : line_(line), key_(std::move(key)), value_(value) {}

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(line_, key_, what); }

  double number(std::string_view text) const {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v))
      fail("expected a number, got '" + std::string(text) + "'");
    return v;
  }
  double number() const { return number(value_); }

  long long integer(std::string_view text) const {
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
      fail("expected an integer, got '" + std::string(text) + "'");
    return v;
  }
  long long integer() const { return integer(value_); }

  std::uint64_t unsigned_integer() const {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(value_.data(), value_.data() + value_.size(), v);
    if (value_.empty() || ec != std::errc() || ptr != value_.data() + value_.size())
      fail("expected an unsigned integer, got '" + std::string(value_) + "'");
    return v;
  }

  double positive() const {
    const double v = number();
    if (!(v > 0.0)) fail("must be > 0");
    return v;
  }

  std::vector<double> numbers() const {
    std::vector<double> out;
    for (auto item : split_list(value_)) out.push_back(number(item));
    return out;
  }
  std::vector<int> integers() const {
    std::vector<int> out;
    for (auto item : split_list(value_)) out.push_back(static_cast<int>(integer(item)));
    return out;
  }

  std::string_view text() const { return value_; }

  template <class Parse>
  auto choice(Parse parse) const {
    try {
      return parse(value_);
    } catch (const Error& e) {
      fail(e.what());
    }
  }

 private:
  int line_;
  std::string key_;
  std::string_view value_;
};

void apply(RunConfig& c, std::string_view section, std::string_view key, std::string_view value, int line) {
  const std::string full = section.empty() ? std::string(key) : std::string(section) + "." + std::string(key);
  const Setter set(line, full, value);
  auto is = [&](std::string_view s, std::string_view k) { return section == s && key == k; };

  if (is("", "scenario")) {
    c.scenario = set.choice(parse_scenario);
  } else if (is("", "seed")) {
    c.seed = set.unsigned_integer();
  } else if (is("", "outputs")) {
    if (value.empty()) set.fail("output directory must not be empty");
    c.outputs = std::string(value);
  } else if (is("", "t_start")) {
    c.t_span.start = set.number();
  } else if (is("", "t_end")) {
    c.t_span.end = set.number();
  } else if (is("model", "lambda")) {
    const double v = set.number();
    if (!(v > 1.0)) set.fail("lambda must be > 1");
    c.model = ModelParams(v, c.model.theta());
  } else if (is("model", "theta")) {
    const double v = set.number();
    if (!(v > 0.0)) set.fail("theta must be > 0");
    c.model = ModelParams(c.model.lambda_base(), v);
  } else if (is("galerkin", "order")) {
    const long long v = set.integer();
    if (v < 1) set.fail("order must be >= 1");
    c.galerkin.order = static_cast<int>(v);
  } else if (is("galerkin", "damping_theta")) {
    c.galerkin.damping_theta = set.positive();
  } else if (is("galerkin", "closure")) {
    if (value == "flux") c.closure = Closure::flux;
    else if (value == "plain") c.closure = Closure::plain;
    else set.fail("closure must be flux or plain");
  } else if (is("ic", "family")) {
    c.ic.family = set.choice(parse_ic_family);
  } else if (is("ic", "amplitude")) {
    const double v = set.number();
    if (v < 0.0) set.fail("amplitude must be >= 0");
    c.ic.amplitude = v;
  } else if (is("ic", "decay")) {
    c.ic.decay = set.positive();
  } else if (is("ic", "shell")) {
    const long long v = set.integer();
    if (v < 1) set.fail("shell must be >= 1");
    c.ic.shell = static_cast<int>(v);
  } else if (is("ic", "delta")) {
    if (value == "auto") {
      c.ic.delta.reset();
    } else {
      const double v = set.number();
      if (!(v > 0.0 && v < 1.0)) set.fail("delta must lie in (0, 1)");
      c.ic.delta = v;
    }
  } else if (is("ic", "profile")) {
    if (value == "random") c.ic.profile = BallProfile::random;
    else if (value == "unit") c.ic.profile = BallProfile::unit;
    else set.fail("profile must be random or unit");
  } else if (is("integrator", "rel_tol")) {
    c.integrator.rel_tol = set.positive();
  } else if (is("integrator", "abs_tol")) {
    const double v = set.number();
    if (v < 0.0) set.fail("abs_tol must be >= 0");
    c.integrator.abs_tol = v;
  } else if (is("integrator", "dt_init")) {
    c.integrator.dt_init = set.positive();
  } else if (is("integrator", "dt_min")) {
    c.integrator.dt_min = set.positive();
  } else if (is("integrator", "dt_max")) {
    c.integrator.dt_max = set.positive();
  } else if (is("integrator", "max_steps")) {
    const long long v = set.integer();
    if (v < 1) set.fail("max_steps must be >= 1");
    c.integrator.max_steps = static_cast<std::size_t>(v);
  } else if (is("integrator", "positivity")) {
    c.integrator.positivity_mode = set.choice(parse_positivity_mode);
  } else if (is("integrator", "scheme")) {
    c.integrator.scheme = set.choice(parse_scheme);
  } else if (is("diagnostics", "theta")) {
    c.diagnostics.theta = set.positive();
  } else if (is("diagnostics", "sobolev")) {
    c.diagnostics.sobolev = set.numbers();
  } else if (is("diagnostics", "flux_shells")) {
    auto shells = set.integers();
    for (int j : shells)
      if (j < 1) set.fail("flux shells must be >= 1");
    c.diagnostics.flux_shells = std::move(shells);
  } else if (is("diagnostics", "fit_start")) {
    c.diagnostics.fit_window.start = set.positive();
  } else if (is("diagnostics", "fit_end")) {
    c.diagnostics.fit_window.end = set.positive();
  } else if (is("diagnostics", "fit_samples")) {
    const long long v = set.integer();
    if (v < 2) set.fail("fit_samples must be >= 2");
    c.diagnostics.fit_samples = static_cast<std::size_t>(v);
  } else if (is("diagnostics", "fit_sampling")) {
    if (value == "geometric") c.diagnostics.fit_sampling = FitSampling::geometric;
    else if (value == "stored") c.diagnostics.fit_sampling = FitSampling::stored;
    else set.fail("fit_sampling must be geometric or stored");
  } else if (is("scaling", "eta")) {
    c.scaling.eta = set.positive();
  } else if (is("scaling", "grid_points")) {
    const long long v = set.integer();
    if (v < 2) set.fail("grid_points must be >= 2");
    c.scaling.grid_points = static_cast<std::size_t>(v);
  } else if (is("convergence", "orders")) {
    auto orders = set.integers();
    if (orders.size() < 2) set.fail("need at least two orders");
    for (std::size_t i = 0; i < orders.size(); ++i) {
      if (orders[i] < 2) set.fail("orders must be >= 2");
      if (i > 0 && orders[i] <= orders[i - 1]) set.fail("orders must be increasing");
    }
    c.convergence.orders = std::move(orders);
  } else if (is("convergence", "probe_times")) {
    auto times = set.numbers();
    if (times.empty()) set.fail("need at least one probe time");
    c.convergence.probe_times = std::move(times);
  } else if (is("certificate", "k")) {
    const double v = set.number();
    if (!(v > 0.0 && v < 1.0)) set.fail("k must lie in (0, 1)");
    c.certificate.k = v;
  } else if (is("certificate", "B_target")) {
    c.certificate.B_target = set.number();
  } else if (is("certificate", "delta")) {
    if (value == "auto") c.certificate.delta.reset();
    else c.certificate.delta = set.positive();
  } else if (is("certificate", "margin")) {
    const double v = set.number();
    if (!(v > 0.0 && v < 1.0)) set.fail("margin must lie in (0, 1)");
    c.certificate.margin = v;
  } else if (is("certificate", "T_check")) {
    c.certificate.T_check = set.positive();
  } else if (is("certificate", "quad_tol")) {
    c.certificate.quad_tol = set.positive();
  } else if (is("certificate", "grid_points")) {
    const long long v = set.integer();
    if (v < 3) set.fail("grid_points must be >= 3");
    c.certificate.grid_points = static_cast<std::size_t>(v);
  } else if (is("certificate", "fallback_slack")) {
    const double v = set.number();
    if (v < 0.0) set.fail("fallback_slack must be >= 0");
    c.certificate.fallback_slack = v;
  } else {
    set.fail("unknown key");
  }
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + format_number(v[i]);
  return out;
}

std::string join(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + std::to_string(v[i]);
  return out;
}

}  // namespace

std::string_view to_string(Scenario scenario) {
  for (const auto& n : kScenarios)
    if (n.value == scenario) return n.name;
  return "simulate";
}

Scenario parse_scenario(std::string_view text) {
  for (const auto& n : kScenarios)
    if (n.name == text) return n.value;
  throw ConfigurationError("unknown scenario '" + std::string(text) + "'");
}

std::string_view to_string(Closure closure) { return closure == Closure::flux ? "flux" : "plain"; }

std::string_view to_string(IcFamily family) {
  switch (family) {
    case IcFamily::geometric: return "geometric";
    case IcFamily::single: return "single";
    case IcFamily::random: return "random";
    case IcFamily::delta_ball: return "delta-ball";
  }
  return "geometric";
}

IcFamily parse_ic_family(std::string_view text) {
  if (text == "geometric") return IcFamily::geometric;
  if (text == "single") return IcFamily::single;
  if (text == "random") return IcFamily::random;
  if (text == "delta-ball") return IcFamily::delta_ball;
  throw ConfigurationError("unknown initial-condition family '" + std::string(text) + "'");
}

CertificateParams RunConfig::certificate_params() const {
  CertificateParams p = certificate;
  p.theta = model.theta();
  p.lambda = model.lambda_base();
  return p;
}

DiagnosticsOptions RunConfig::diagnostics_options() const {
  DiagnosticsOptions o;
  o.theta = diagnostics.theta;
  o.lambda = model.lambda_base();
  o.sobolev_exponents = diagnostics.sobolev;
  for (int j : diagnostics.flux_shells)
    if (j < galerkin.order) o.flux_shells.push_back(j);
  return o;
}

std::string RunConfig::to_text() const {
  std::ostringstream s;
  const auto num = [](double v) { return format_number(v); };
  s << "scenario = " << harness::to_string(scenario) << "\n"
    << "seed = " << seed << "\n"
    << "outputs = " << outputs << "\n"
    << "t_start = " << num(t_span.start) << "\n"
    << "t_end = " << num(t_span.end) << "\n\n"
    << "[model]\nlambda = " << num(model.lambda_base()) << "\ntheta = " << num(model.theta()) << "\n\n"
    << "[galerkin]\norder = " << galerkin.order << "\ndamping_theta = " << num(galerkin.damping_theta)
    << "\nclosure = " << harness::to_string(closure) << "\n\n"
    << "[ic]\nfamily = " << harness::to_string(ic.family) << "\namplitude = " << num(ic.amplitude)
    << "\ndecay = " << num(ic.decay) << "\nshell = " << ic.shell
    << "\ndelta = " << (ic.delta ? num(*ic.delta) : std::string("auto"))
    << "\nprofile = " << (ic.profile == BallProfile::unit ? "unit" : "random") << "\n\n"
    << "[integrator]\nrel_tol = " << num(integrator.rel_tol) << "\nabs_tol = " << num(integrator.abs_tol)
    << "\ndt_init = " << num(integrator.dt_init) << "\ndt_min = " << num(integrator.dt_min)
    << "\ndt_max = " << num(integrator.dt_max) << "\nmax_steps = " << integrator.max_steps
    << "\npositivity = " << dyadic::to_string(integrator.positivity_mode)
    << "\nscheme = " << dyadic::to_string(integrator.scheme) << "\n\n"
    << "[diagnostics]\ntheta = " << num(diagnostics.theta) << "\nsobolev = " << join(diagnostics.sobolev)
    << "\nflux_shells = " << join(diagnostics.flux_shells) << "\nfit_start = " << num(diagnostics.fit_window.start)
    << "\nfit_end = " << num(diagnostics.fit_window.end) << "\nfit_samples = " << diagnostics.fit_samples
    << "\nfit_sampling = " << (diagnostics.fit_sampling == FitSampling::stored ? "stored" : "geometric")
    << "\n\n"
    << "[scaling]\neta = " << num(scaling.eta) << "\ngrid_points = " << scaling.grid_points << "\n\n"
    << "[convergence]\norders = " << join(convergence.orders)
    << "\nprobe_times = " << join(convergence.probe_times) << "\n\n"
    << "[certificate]\nk = " << num(certificate.k) << "\nB_target = " << num(certificate.B_target)
    << "\ndelta = " << (certificate.delta ? num(*certificate.delta) : std::string("auto"))
    << "\nmargin = " << num(certificate.margin) << "\nT_check = " << num(certificate.T_check)
    << "\nquad_tol = " << num(certificate.quad_tol) << "\ngrid_points = " << certificate.grid_points
    << "\nfallback_slack = " << num(certificate.fallback_slack) << "\n";
  return s.str();
}

std::string RunConfig::digest() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(to_text())));
  return buf;
}

RunConfig parse_config(std::string_view text) {
  RunConfig c;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(line_no, std::string(line), "malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      static constexpr std::string_view known[] = {"model",      "galerkin",    "ic",         "integrator",
                                                   "diagnostics", "scaling", "convergence", "certificate"};
      if (std::find(std::begin(known), std::end(known), section) == std::end(known))
        throw ParseError(line_no, section, "unknown section");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, std::string(line), "expected key = value");
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ParseError(line_no, "", "missing key");
    apply(c, section, key, trim(line.substr(eq + 1)), line_no);
  }
  validate(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return parse_config(s.str());
}

void apply_override(RunConfig& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) throw ParseError(0, std::string(assignment), "expected key=value");
  const auto path = trim(assignment.substr(0, eq));
  const auto dot = path.find('.');
  const auto section = dot == std::string_view::npos ? std::string_view{} : path.substr(0, dot);
  const auto key = dot == std::string_view::npos ? path : path.substr(dot + 1);
  apply(config, section, key, trim(assignment.substr(eq + 1)), 0);
  validate(config);
}

void validate(const RunConfig& c) {
  if (!(c.t_span.end > c.t_span.start)) throw ParseError(0, "t_end", "t_end must exceed t_start");
  try {
    c.integrator.validate();
  } catch (const Error& e) {
    throw ParseError(0, "integrator", e.what());
  }
  if (c.ic.family == IcFamily::single && c.ic.shell > c.galerkin.order)
    throw ParseError(0, "ic.shell", "shell exceeds galerkin.order");
  if (!(c.diagnostics.fit_window.end > c.diagnostics.fit_window.start))
    throw ParseError(0, "diagnostics.fit_end", "fit window is empty");
  if (c.certificate.delta && !(*c.certificate.delta < c.certificate.k))
    throw ParseError(0, "certificate.delta", "delta must be < k");
  if (c.scenario == Scenario::scaling && c.t_span.start != 0.0)
    throw ParseError(0, "t_start", "the scaling scenario starts at t = 0");
}

}  // namespace dyadic::harness
