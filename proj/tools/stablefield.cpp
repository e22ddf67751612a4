// Command-line front end: simulate | classify | verify | report.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "stablefield/cli/commands.hpp"

namespace {

using namespace stablefield;

std::size_t resolve_threads(std::optional<std::size_t> flag) {
  if (flag) return std::max<std::size_t>(1, *flag);
  if (const char* env = std::getenv("STABLEFIELD_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring STABLEFIELD_THREADS=" << env << "\n";
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stable random field simulation, classification and diagnostics"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  std::optional<std::size_t> threads;

  for (const char* name : {"simulate", "classify", "verify", "report"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("config", config_path, "YAML experiment config")->required();
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--threads", threads, "worker threads (default: STABLEFIELD_THREADS or 1)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    auto cfg = cli::load_config(config_path);
    if (seed) cfg.seed = *seed;
    cli::RunOptions opt;
    opt.out_dir = out_dir;
    opt.threads = resolve_threads(threads);
    if (command == "simulate") return cli::cmd_simulate(cfg, opt);
    if (command == "classify") return cli::cmd_classify(cfg, opt);
    if (command == "verify") return cli::cmd_verify(cfg, opt);
    return cli::cmd_report(cfg, opt);
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ModelError& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return 3;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 3;
  } catch (const IndeterminateLedger& e) {
    std::cerr << "indeterminate: " << e.what() << "\n";
    return 3;
  } catch (const FitUnstable& e) {
    std::cerr << "fit unstable: " << e.what() << "\n";
    return 3;
  } catch (const DegenerateField& e) {
    std::cerr << "degenerate field: " << e.what() << "\n";
    return 3;
  } catch (const cli::VerificationFailed& e) {
    std::cerr << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
}
