#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "oufreq/error.hpp"
#include "oufreq/parallel.hpp"

int main(int argc, char** argv) {
  using namespace oufreq::cli;
  CLI::App app{"oufreq: spectral and frequency lab for heat equations with inverse-square potentials"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  int threads = 1;
  app.add_option("--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (overrides [output] dir)");
  auto* seed_opt = app.add_option("--seed", seed, "random seed (overrides the config)");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

  struct Cmd {
    const char* name;
    const char* help;
    void (*fn)(const RunConfig&, std::ostream&);
  };
  const Cmd cmds[] = {{"spectrum", "eigenvalues and multiplicities of L", cmd_spectrum},
                      {"simulate", "integrate the spectral system and write the frequency trace", cmd_simulate},
                      {"beta", "extract the asymptotic coefficients and reconstruction errors", cmd_beta},
                      {"verify", "randomized sweeps of the weighted inequalities", cmd_verify},
                      {"quadcheck", "Gaussian cubature against closed forms", cmd_quadcheck}};
  for (const auto& c : cmds) app.add_subcommand(c.name, c.help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (*seed_opt) cfg.seed = seed;
    validate(cfg);
    oufreq::set_thread_count(threads);
    for (const auto& c : cmds)
      if (app.got_subcommand(c.name)) c.fn(cfg, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return 0;
}
