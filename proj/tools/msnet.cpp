#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "msnet/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Simulation and asymptotics toolkit for monotone-separable networks"};
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> subcommand;
  std::string out = ".";
  app.add_option("--config", config, "JSON experiment configuration")->required();
  app.add_option("--seed", seed, "Master seed; overrides the config");
  app.add_option("--out", out, "Directory for JSON and CSV artifacts");
  app.add_option("--threads", threads, "OpenMP threads (0 = runtime default)");
  app.add_option("--subcommand", subcommand, "Subcommand; overrides the config")
      ->check(CLI::IsMember(msnet::subcommand_names()));
  for (const auto& name : msnet::subcommand_names()) {
    app.add_subcommand(name, "Run the " + name + " experiment")->fallthrough();
  }
  app.require_subcommand(0, 1);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : msnet::kExitConfigError;
  }
  for (const auto* sub : app.get_subcommands()) {
    if (subcommand && *subcommand != sub->get_name()) {
      std::cerr << "error: conflicting subcommands " << *subcommand << " and " << sub->get_name() << "\n";
      return msnet::kExitConfigError;
    }
    subcommand = sub->get_name();
  }
  msnet::RunOptions opts;
  opts.subcommand = subcommand;
  opts.seed = seed;
  opts.threads = threads;
  opts.out_dir = out;
  return msnet::run_file(config, opts);
}
