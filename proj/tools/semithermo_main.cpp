#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "semithermo/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"thermodynamic formalism toolkit for rational semigroups"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool has_seed = false;

  const char* names[] = {"julia", "pressure", "spectrum", "check", "branches"};
  const char* blurbs[] = {
      "sample the Julia set by backward iteration and render it",
      "estimate topological pressure from operator iterates",
      "discretize the transfer operator and extract its leading eigendata",
      "screen the semigroup hypotheses and the pressure gap",
      "build nested inverse-branch families and report their decay",
  };
  for (int i = 0; i < 5; ++i) {
    CLI::App* sub = app.add_subcommand(names[i], blurbs[i]);
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--out", out_dir, "output directory (overrides config)");
    sub->add_option("--seed", seed, "seed override")->each([&](const std::string&) {
      has_seed = true;
    });
  }

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();
  return semithermo::run_command(command, config_path, out_dir, has_seed, seed, std::cout,
                                 std::cerr);
}
