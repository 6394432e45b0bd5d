#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dlrwave/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"dlrwave: low-rank splitting solver for strongly damped waves"};
  app.require_subcommand(1);

  dlrwave::CliInvocation inv;
  std::string config_path;
  std::string out_dir = ".";

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "experiment config (JSON)")->required();
    sub->add_option("--set", inv.overrides, "override config keys, e.g. --set grid.N=64");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_flag("-v,--verbose", inv.verbose, "echo the resolved config to stderr");
  };

  add_common(app.add_subcommand("converge", "run the (rank, M) sweep and write the CSV table"));
  add_common(app.add_subcommand("simulate", "single low-rank run; writes the final field"));
  add_common(app.add_subcommand("snapshot", "full-rank vs low-rank PGM snapshot frames"));

  CLI11_PARSE(app, argc, argv);

  inv.command = app.get_subcommands().front()->get_name();
  inv.config_path = config_path;
  inv.out_dir = out_dir;
  return dlrwave::run(inv);
}
