#include <CLI11.hpp>

#include "photon_src/cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Cavity-QED single-photon source: simulation, sweeps and figure data"};
  std::string command;
  std::string config;
  photon_src::cli::CommandOptions options;
  std::size_t points = 0;

  app.add_option("command", command, "simulate | sweep | fig2 | figC")
      ->required()
      ->check(CLI::IsMember({"simulate", "sweep", "fig2", "figC"}));
  app.add_option("--config", config, "key=value configuration file")->required();
  app.add_option("--out", options.out, "output directory")->required();
  app.add_flag("--numeric", options.numeric, "add record and master-equation columns to sweep.csv");
  auto* points_opt = app.add_option("--points", points, "grid points (sweep, fig2 omega2 grid, figC per axis)")
                         ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  if (points_opt->count()) options.points = points;
  return photon_src::cli::run(command, config, options);
}
