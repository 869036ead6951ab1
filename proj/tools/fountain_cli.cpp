#include "fountain/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Periodic solutions of second-order Hamiltonian systems by Galerkin minimax"};
  std::string command = "all";
  fountain::RunOptions opt;
  std::uint64_t seed = 0;
  std::string out;
  app.add_option("command", command, "spectrum | audit | geometry | solve | validate | all")
      ->check(CLI::IsMember({"spectrum", "audit", "geometry", "solve", "validate", "all"}));
  app.add_option("--config", opt.config_path, "INI configuration file")->required()->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "Override the configured seed");
  auto* out_opt = app.add_option("--out", out, "Output directory");
  app.add_option("--jobs", opt.jobs, "Worker threads")->check(CLI::Range(1, 1024));
  app.add_flag("--gate-on-audit", opt.gate_on_audit, "Stop with exit code 2 when an audit finds a violation");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : fountain::exit_code::failure;
  }
  opt.command = *fountain::parse_command(command);
  if (*seed_opt) opt.seed = seed;
  if (*out_opt) opt.out = out;
  return fountain::run(opt, std::cerr);
}
