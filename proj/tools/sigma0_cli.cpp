#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "sigma0/verify/commands.hpp"

int main(int argc, char** argv) {
  using namespace sigma0::verify;
  CLI::App app{"sigma0-cli: limit spectrum of phi(H - lambda) - phi(H0 - lambda) under dilation"};
  app.require_subcommand(1);

  std::string config;
  RunOptions opts;
  std::string out_dir = "out";
  for (const auto& verb : verbs()) {
    CLI::App* sub = app.add_subcommand(verb);
    sub->add_option("--config", config, "JSON experiment config")->required();
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    sub->add_option("--jobs", opts.jobs, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_flag("--strict", opts.strict, "treat warnings as failures");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfigError;
  }
  opts.out_dir = out_dir;
  return run_command(app.get_subcommands().front()->get_name(), config, opts);
}
