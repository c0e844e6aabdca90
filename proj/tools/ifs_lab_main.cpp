#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "ifslab/commands.hpp"
#include "ifslab/errors.hpp"
#include "ifslab/parallel.hpp"

namespace {

// exit codes: 0 done, 1 bad input (CLI/config), 2 computation refused to
// certify (no convergence, unfair law, blown budget, seed-dependent limit)
constexpr int kBadInput = 1;
constexpr int kNotCertified = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ifs-lab: attractors, invariant measures and contraction "
               "diagnostics for parametrized iterated function systems"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_flag;
  std::uint64_t seed_flag = 0;
  int threads = 1;

  const std::pair<const char*, const char*> commands[] = {
      {"attractor", "iterate the union-of-images operator to its fixed cloud"},
      {"measure", "iterate the transfer operator to its fixed measure"},
      {"ergodic", "compare orbit time averages with measure integrals"},
      {"chaos", "single-orbit draws versus the reference attractor"},
      {"diagnose", "contraction profile, pairwise probe, and verdict"},
      {"render", "rasterize an attractor or measure to a PPM image"},
  };
  for (const auto& [name, desc] : commands) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", config_path, "JSON experiment config")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", out_flag, "output directory (default: $IFS_LAB_OUT, config, ./out)");
    sub->add_option("--seed", seed_flag, "override the master RNG seed");
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kBadInput;
  }

  CLI::App* sub = app.get_subcommands().front();

  try {
    ifslab::RunContext rc;
    rc.cfg = ifslab::load_config(config_path);
    rc.command = sub->get_name();
    rc.seed = sub->count("--seed") ? seed_flag : rc.cfg.master_seed;
    rc.threads = threads;
    ifslab::set_worker_threads(threads);

    if (!out_flag.empty()) {
      rc.out_dir = out_flag;
    } else if (const char* env = std::getenv("IFS_LAB_OUT"); env && *env) {
      rc.out_dir = env;
    } else if (!rc.cfg.output_dir.empty()) {
      rc.out_dir = rc.cfg.output_dir;
    } else {
      rc.out_dir = "out";
    }

    return ifslab::run_command(rc);
  } catch (const ifslab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kBadInput;
  } catch (const ifslab::NoConvergence& e) {
    std::cerr << "not converged: " << e.what() << "\n";
    return kNotCertified;
  } catch (const ifslab::NotFair& e) {
    std::cerr << "unfair parameter law: " << e.what() << "\n";
    return kNotCertified;
  } catch (const ifslab::BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return kNotCertified;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  }
}
