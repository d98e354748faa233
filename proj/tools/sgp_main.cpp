#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "sgp/acceptance.hpp"
#include "sgp/config.hpp"
#include "sgp/harness.hpp"

namespace {

// Exit codes: 0 ok, 1 violation, 2 config error, 3 runtime error.
constexpr int kExitViolation = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitRuntimeError = 3;

int run_mode(sgp::RunMode mode, const std::string& config_path,
             const std::optional<std::string>& out_dir) {
  const sgp::RunConfig cfg = sgp::load_config(config_path);
  const sgp::RunOutcome outcome = sgp::run_experiment(cfg, mode, out_dir);
  for (const auto& line : outcome.stdout_lines) std::cout << line << "\n";
  if (mode == sgp::RunMode::PushSum || mode == sgp::RunMode::Optimize)
    std::cout << outcome.summary_json << "\n";
  return outcome.exit_code;
}

int run_accept(std::uint64_t seed, const std::optional<std::string>& out_dir) {
  const sgp::AcceptanceReport report = sgp::run_acceptance_suite(seed);
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& c : report.criteria) {
    std::cout << (c.passed ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.name << " ("
              << c.detail << ")\n";
    entries.push_back({{"id", c.id}, {"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  nlohmann::json doc{{"seed", seed}, {"all_passed", report.all_passed()}, {"criteria", entries}};
  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    std::ofstream out(std::filesystem::path(*out_dir) / "report.json", std::ios::binary);
    out << doc.dump(2) << "\n";
  }
  return report.all_passed() ? 0 : kExitViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Subgradient-push simulator over time-varying directed graphs"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out_dir;
  std::uint64_t accept_seed = sgp::kAcceptanceSeed;

  auto add_run_subcommand = [&](const std::string& name, const std::string& description) {
    CLI::App* sub = app.add_subcommand(name, description);
    sub->add_option("--config", config_path, "path to the JSON run config")->required();
    sub->add_option("--out-dir", out_dir, "directory for trace.csv and summary.json");
    return sub;
  };

  CLI::App* graphcheck =
      add_run_subcommand("graphcheck", "verify window-union strong connectivity");
  CLI::App* pushsum = add_run_subcommand("pushsum", "run the perturbed averaging protocol");
  CLI::App* optimize = add_run_subcommand("optimize", "run the distributed optimizer");
  CLI::App* bounds = add_run_subcommand("bounds", "report measured vs theoretical parameters");

  CLI::App* accept = app.add_subcommand("accept", "run the acceptance suite");
  accept->add_option("--seed", accept_seed, "base seed for the suite");
  accept->add_option("--out-dir", out_dir, "directory for report.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfigError;
  }

  try {
    if (graphcheck->parsed()) return run_mode(sgp::RunMode::GraphCheck, config_path, out_dir);
    if (pushsum->parsed()) return run_mode(sgp::RunMode::PushSum, config_path, out_dir);
    if (optimize->parsed()) return run_mode(sgp::RunMode::Optimize, config_path, out_dir);
    if (bounds->parsed()) return run_mode(sgp::RunMode::Bounds, config_path, out_dir);
    if (accept->parsed()) return run_accept(accept_seed, out_dir);
  } catch (const sgp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntimeError;
  }
  return kExitConfigError;
}
