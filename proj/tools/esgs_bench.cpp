// Benchmark harness front end. Everything below the argument parsing goes
// through the C interface.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "esgs/esgs.h"

namespace {

struct Args {
  std::string config;
  std::uint64_t seed = 0;
  std::string out;
  unsigned jobs = 1;
  bool omit_timing = false;
};

void add_common(CLI::App* cmd, Args& args) {
  cmd->add_option("--config", args.config, "JSON config file")->required();
  cmd->add_option("--seed", args.seed, "base seed, overrides the config");
  cmd->add_option("--out", args.out, "output directory");
  cmd->add_option("--jobs", args.jobs, "replications run concurrently")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--omit-timing", args.omit_timing,
                "write wall times as 0 so reruns are byte-identical");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"esgs-bench: zeroth-order estimator benchmarks"};
  app.require_subcommand(1);
  Args args;
  const char* descriptions[][2] = {
      {"moments", "second-moment table of the estimators"},
      {"run", "one benchmark at a single dimension"},
      {"compare", "estimator grid over dimensions"},
      {"dd", "decision-dependent market problem"},
  };
  for (const auto& [name, text] : descriptions) add_common(app.add_subcommand(name, text), args);
  CLI11_PARSE(app, argc, argv);

  const CLI::App* chosen = app.get_subcommands().front();
  std::ifstream in(args.config, std::ios::binary);
  if (!in) {
    std::cerr << "esgs-bench: cannot read config " << args.config << "\n";
    return 2;
  }
  std::ostringstream text;
  text << in.rdbuf();

  esgs_bench_options options{};
  options.has_seed = chosen->count("--seed") > 0 ? 1 : 0;
  options.seed = args.seed;
  options.out_dir = args.out.empty() ? nullptr : args.out.c_str();
  options.jobs = args.jobs;
  options.omit_timing = args.omit_timing ? 1 : 0;

  char* report = nullptr;
  const esgs_status status =
      esgs_bench_execute(chosen->get_name().c_str(), text.str().c_str(), &options, &report);
  if (status != ESGS_OK) {
    std::cerr << "esgs-bench: " << args.config << ": " << esgs_last_error() << " ("
              << esgs_status_name(status) << ")\n";
    return 1;
  }
  std::cout << report;
  esgs_string_free(report);
  return 0;
}
