#include "beclab/runner.hpp"

#include <iostream>

#include "CLI11.hpp"

int main(int argc, char** argv) {
  CLI::App app{"beclab: phonon condensation and electron-phonon decoupling experiments"};
  beclab::RunOptions opts;
  opts.command = "full-report";
  app.add_option("--config", opts.config_path, "JSON config file (defaults are built in)");
  app.add_option("--out", opts.out_dir, "Output directory; BECLAB_OUT_DIR takes precedence");
  app.add_option("--command", opts.command, "Command to run")
      ->check(CLI::IsMember(beclab::command_names()));
  app.add_option("--override", opts.overrides, "Dotted-path override KEY=VALUE, repeatable")
      ->allow_extra_args(false);
  app.add_option("--threads", opts.threads, "Worker threads for independent sweep points")
      ->check(CLI::PositiveNumber);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : beclab::kExitValidation;
  }
  return beclab::run(opts, std::cerr);
}
