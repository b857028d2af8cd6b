#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "app/commands.hpp"

using namespace nipocpec;
using namespace nipocpec::app;

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> s_final;
  bool quiet = false;
};

void add_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--seed", f.seed, "random initial guess with this seed");
  cmd->add_option("--s-final", f.s_final, "final perturbation s* (z* follows)")->check(CLI::PositiveNumber);
  cmd->add_flag("--quiet", f.quiet, "suppress progress output");
}

nlohmann::json config_doc(const Flags& f) {
  return f.config.empty() ? nlohmann::json::object() : read_json_file(f.config);
}

void apply(const Flags& f, RunConfig& c) {
  if (!f.out.empty()) c.output.dir = f.out;
  if (f.seed) {
    c.initial_guess.mode = GuessMode::kRandom;
    c.initial_guess.seed = *f.seed;
  }
  if (f.s_final) {
    set_final_perturbation(c.solver, *f.s_final);
    if (c.solver.s_init < *f.s_final || c.solver.z_init < *f.s_final)
      throw ConfigError("--s-final exceeds the initial perturbation");
  }
  if (f.quiet) c.quiet = true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-interior-point continuation solver for optimal control with equilibrium constraints"};
  app.require_subcommand(1);
  Flags flags;
  auto* solve_cmd = app.add_subcommand("solve", "solve one problem and write trajectory, history and summary");
  auto* sweep_cmd = app.add_subcommand("sweep", "random-start robustness sweep over s* values");
  auto* check_cmd = app.add_subcommand("check", "derivative validation and solver self-tests");
  for (auto* cmd : {solve_cmd, sweep_cmd, check_cmd}) add_flags(cmd, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfigError;
  }

  try {
    if (*sweep_cmd) {
      SweepConfig cfg = parse_sweep_config(config_doc(flags));
      apply(flags, cfg.run);
      if (flags.seed) cfg.first_seed = *flags.seed;
      if (flags.s_final) cfg.s_final = {*flags.s_final};
      cfg.validate();
      return run_sweep_command(cfg, std::cout);
    }
    RunConfig cfg = parse_run_config(config_doc(flags));
    apply(flags, cfg);
    if (*solve_cmd) return run_solve_command(cfg, std::cout);
    return run_check_command(cfg, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const EvaluationError& e) {
    std::cerr << "error: evaluation failed at stage " << e.stage() << ": " << e.what() << '\n';
    return kExitEvaluatorError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
}
