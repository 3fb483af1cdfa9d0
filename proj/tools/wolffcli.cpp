// wolffcli: scenario-driven front end for the Wolff potential library.
//
//   wolffcli <command> --config scenario.json [--out-dir DIR] [--seed N]
//            [--threads N] [--points points.csv]
//
// Commands: potential, energy, maximal, verify, counterexample, trace.
// Exit status: 0 all checks pass, 1 a check failed, 2 bad arguments or
// scenario, 3 runtime failure.

#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "scenario.hpp"

namespace {

struct Options {
  std::string config;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  std::string points;
};

int run(const std::string& command, const Options& opt) {
  if (opt.threads > 0) wolff::default_threads() = opt.threads;
  const auto scenario = wolffcli::load_scenario_file(opt.config, opt.seed, opt.points);
  const auto out = wolffcli::run_command(command, scenario);
  wolffcli::write_outputs(out, opt.out_dir);
  if (out.report.contains("checks")) {
    for (const auto& c : out.report["checks"]) {
      std::cout << (c["pass"].get<bool>() ? "PASS " : "FAIL ") << c["name"].get<std::string>() << " value="
                << wolffcli::format_number(c["value"].is_number() ? c["value"].get<double>() : wolff::kNaN)
                << "\n";
    }
  }
  std::cout << command << ": wrote " << opt.out_dir << "/report.json (" << (out.pass ? "pass" : "FAIL")
            << ")\n";
  return out.pass ? wolffcli::kExitPass : wolffcli::kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dyadic and continuous Wolff potentials: evaluation and verification"};
  app.require_subcommand(1);
  Options opt;
  std::uint64_t seed = 0;
  app.add_option("--config", opt.config, "Scenario JSON file")->check(CLI::ExistingFile);
  app.add_option("--out-dir", opt.out_dir, "Directory for report.json, CSV table and timings.json");
  auto* seed_opt = app.add_option("--seed", seed, "Seed overriding the scenario's seed");
  app.add_option("--threads", opt.threads, "Worker threads (default: all cores)");
  app.add_option("--points", opt.points, "CSV of query points overriding the scenario's points")
      ->check(CLI::ExistingFile);

  std::string command;
  for (const char* name : {"potential", "energy", "maximal", "verify", "counterexample", "trace"}) {
    auto* sub = app.add_subcommand(name, std::string("Run the '") + name + "' command");
    sub->fallthrough();
    sub->callback([&command, name] { command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : wolffcli::kExitConfigError;
  }
  if (opt.config.empty()) {
    std::cerr << "error: --config is required\n";
    return wolffcli::kExitConfigError;
  }
  if (*seed_opt) opt.seed = seed;

  try {
    return run(command, opt);
  } catch (const wolffcli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return wolffcli::kExitConfigError;
  } catch (const wolff::InvalidArgument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return wolffcli::kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return wolffcli::kExitRuntimeError;
  }
}
