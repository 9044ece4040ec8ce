#include <cstdint>
#include <string>

#include <CLI11.hpp>

#include "rotor/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"rotorsim: cavity-controlled quantum rotor simulations"};
  app.require_subcommand(1);

  rotor::CliOptions options;
  std::uint64_t seed = 0;

  const char* commands[] = {"calibrate", "run", "validate", "wigner"};
  const char* blurbs[] = {"solve pump strengths for target trap frequencies",
                          "evolve the configured protocol or schedule",
                          "cross-check the engine against exact references",
                          "recompute a Wigner map from a stored state"};
  for (int i = 0; i < 4; ++i) {
    CLI::App* sub = app.add_subcommand(commands[i], blurbs[i]);
    sub->add_option("--config", options.config_path, "JSON config file")->required();
    sub->add_option("--out", options.out_dir, "output directory (overrides the config)");
    sub->add_option("--seed", seed, "master seed (overrides the config)");
    sub->add_option("--workers", options.workers, "threads for ensemble trajectories")
        ->check(CLI::PositiveNumber);
    sub->add_flag("--strict", options.strict, "promote schedule and localization warnings to errors");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return rotor::kExitConfig;
  }

  CLI::App* sub = app.get_subcommands().front();
  options.command = sub->get_name();
  for (const CLI::Option* opt : sub->get_options())
    if (opt->get_name() == "--seed" && opt->count() > 0) options.seed = seed;

  return rotor::run_cli(options);
}
