// Command-line front end: run parameter sweeps for the built-in experiments
// and emit figure-ready CSV/JSON, or run the invariant suite.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "negcalc/checks.hpp"
#include "negcalc/sweep.hpp"
#include "negcalc/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

void apply_env_tolerance(negcalc::RunConfig& config) {
  if (const char* env = std::getenv("NEGCALC_TOL")) {
    char* end = nullptr;
    const double tol = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(tol > 0.0)) {
      throw std::invalid_argument("NEGCALC_TOL must be a positive number");
    }
    config.singular_tol = tol;
  }
}

void write_output(const std::string& path, const std::string& payload) {
  if (path == "-" || path.empty()) {
    std::cout << payload;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open output file: " + path);
  out << payload;
}

int run_invariants(std::uint64_t seed, int samples, const std::string& out_path) {
  const auto results = negcalc::checks::run_invariant_suite(seed, samples);
  std::string report;
  bool all_ok = true;
  for (const auto& r : results) {
    report += (r.passed ? "[ ok ] " : "[FAIL] ") + r.name + " — " + r.detail + "\n";
    all_ok = all_ok && r.passed;
  }
  report += all_ok ? "all invariants held\n" : "invariant violations detected\n";
  std::cout << report;
  if (!out_path.empty() && out_path != "-") write_output(out_path, report);
  return all_ok ? kExitOk : 1;
}

int run_command(const std::string& experiment_name,
                const std::vector<std::string>& param_args,
                const std::string& out_path, const std::string& format_name) {
  negcalc::RunConfig config;
  config.experiment = negcalc::parse_experiment(experiment_name);
  config.out = out_path;
  if (format_name == "csv") {
    config.format = negcalc::RunConfig::Format::Csv;
  } else if (format_name == "json") {
    config.format = negcalc::RunConfig::Format::Json;
  } else {
    throw std::invalid_argument("format must be csv or json");
  }
  for (const std::string& kv : param_args) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw std::invalid_argument("--param expects key=value, got: " + kv);
    }
    char* end = nullptr;
    const std::string value_str = kv.substr(eq + 1);
    const double value = std::strtod(value_str.c_str(), &end);
    if (end == value_str.c_str() || *end != '\0') {
      throw std::invalid_argument("--param value is not a number: " + kv);
    }
    config.params[kv.substr(0, eq)] = value;
  }
  apply_env_tolerance(config);

  if (config.experiment == negcalc::Experiment::Invariants) {
    return run_invariants(
        static_cast<std::uint64_t>(config.param_or("seed", 12345.0)),
        static_cast<int>(config.param_or("samples", 40.0)), config.out);
  }

  const negcalc::SweepResult result = negcalc::run_sweep(config);
  write_output(config.out, negcalc::serialize(result, config.format));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"negativity perturbation toolkit"};
  app.set_version_flag("--version", std::string("negcalc ") + negcalc::kVersion);
  app.require_subcommand(1);

  std::string experiment, out_path = "-", format_name = "csv";
  std::vector<std::string> param_args;
  auto* run = app.add_subcommand("run", "run an experiment sweep");
  run->add_option("-e,--experiment", experiment,
                  "one of jcm-2x2, jcm-bound, cavity-time, cavity-p, invariants")
      ->required();
  run->add_option("-p,--param", param_args, "experiment parameter key=value");
  run->add_option("-o,--out", out_path, "output path ('-' for stdout)");
  run->add_option("-f,--format", format_name, "csv or json");

  std::uint64_t seed = 12345;
  int samples = 40;
  std::string inv_out;
  auto* invariants = app.add_subcommand("invariants", "run the invariant suite");
  invariants->add_option("--seed", seed, "RNG seed");
  invariants->add_option("--samples", samples, "samples per randomized check");
  invariants->add_option("-o,--out", inv_out, "also write the report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (invariants->parsed()) return run_invariants(seed, samples, inv_out);
    return run_command(experiment, param_args, out_path, format_name);
  } catch (const negcalc::NumericalError& e) {
    std::cerr << "numerical failure " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}
