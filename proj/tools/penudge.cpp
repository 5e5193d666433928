// penudge: reference runs, twin experiments, sweeps and checks driven by a
// YAML configuration. Exit codes: 0 ok, 1 configuration or usage error,
// 2 numerical error, 3 a check failed.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "penudge/cli/commands.hpp"

using namespace penudge::cli;

int main(int argc, char** argv) {
  CLI::App app{"Nudging data assimilation for the viscous primitive equations"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  bool quiet = false;
  app.add_option("-c,--config", config_path, "YAML experiment configuration")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "override the master seed");
  app.add_option("-o,--out", out, "override the output directory");
  app.add_flag("-q,--quiet", quiet, "suppress progress lines");

  auto* ref = app.add_subcommand("run-reference", "spin up and integrate the reference");
  auto* twin = app.add_subcommand("twin", "twin experiment at the configured mu and J");
  auto* sweep = app.add_subcommand("sweep", "grid of twin experiments over mu, delta, forcing");
  auto* check = app.add_subcommand("check", "observation axioms, coercivity or parameter gates");
  std::string which;
  check->add_option("which", which, "observation | coercivity | gates")
      ->required()
      ->check(CLI::IsMember({"observation", "coercivity", "gates"}));
  for (auto* sub : {ref, twin, sweep, check}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  return guarded(
      [&] {
        ExperimentConfig c = load_config(config_path);
        if (seed) c.reseed(*seed);
        if (out) c.output_dir = *out;
        const RunContext ctx{quiet, &std::cout};
        if (*ref) return cmd_run_reference(c, ctx);
        if (*twin) return cmd_twin(c, ctx);
        if (*sweep) return cmd_sweep(c, ctx);
        const CheckKind kind = which == "observation" ? CheckKind::Observation
                               : which == "coercivity" ? CheckKind::Coercivity
                                                       : CheckKind::Gates;
        return cmd_check(c, kind, ctx);
      },
      std::cerr);
}
