#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dyadic/error.hpp"
#include "dyadic/harness/config.hpp"
#include "dyadic/harness/output.hpp"
#include "dyadic/harness/scenarios.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

constexpr const char* kFooter =
    "Truncation: the default galerkin.order is 12, suited to horizons beyond t = 1.\n"
    "Orders up to 20 are practical for t <= 0.1; larger orders need scheme = linearly_implicit.\n"
    "DYADIC_THREADS caps the number of concurrent runs in galerkin-convergence.\n"
    "Exit codes: 0 success, 2 validation error, 3 numerical failure or exhausted step budget.";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for the inviscid dyadic model"};
  app.footer(kFooter);

  std::string scenario;
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::vector<std::string> overrides;

  app.add_option("scenario", scenario,
                 "simulate | regularity | decay | scaling | energy-balance | onsager | galerkin-convergence | "
                 "certificate")
      ->required();
  app.add_option("--config", config_path, "key = value configuration file")->required();
  auto* out_opt = app.add_option("--out", out_dir, "output directory (overrides outputs)");
  auto* seed_opt = app.add_option("--seed", seed, "seed for random initial data");
  app.add_option("--set", overrides, "override a setting, section.key=value")->take_all();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  dyadic::harness::RunConfig config;
  try {
    config = dyadic::harness::load_config(config_path);
    config.scenario = dyadic::harness::parse_scenario(scenario);
    for (const auto& o : overrides) dyadic::harness::apply_override(config, o);
    if (*out_opt) config.outputs = out_dir;
    if (*seed_opt) config.seed = seed;
    dyadic::harness::validate(config);
  } catch (const dyadic::Error& e) {
    std::cerr << "dyadic: " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    const auto record = dyadic::harness::run_scenario(config);
    std::cout << "scenario " << record.scenario << ": " << to_string(record.status) << "\n";
    std::cout << "outputs  " << config.outputs << "\n";
    for (const auto& [key, value] : record.scalars)
      std::cout << "  " << key << " = " << dyadic::harness::format_number(value) << "\n";
    for (const auto& [key, value] : record.flags) std::cout << "  " << key << " = " << (value ? "true" : "false") << "\n";
    if (!record.message.empty()) std::cout << "  message: " << record.message << "\n";
    return record.status == dyadic::harness::RunStatus::ok ? 0 : kExitNumerical;
  } catch (const dyadic::NumericalError& e) {
    std::cerr << "dyadic: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const dyadic::Error& e) {
    std::cerr << "dyadic: " << e.what() << "\n";
    return kExitValidation;
  }
}
