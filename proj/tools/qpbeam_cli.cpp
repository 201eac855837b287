#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "qpbeam/cli_io.hpp"
#include "qpbeam/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"quasi-periodic beam solver"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "qpbeam_out";
  std::optional<double> tol;
  std::optional<int> levels;

  for (const char* name : {"solve", "check-frequency", "verify", "spectrum"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "YAML configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--tol", tol, "fixed-point tolerance");
    sub->add_option("--levels", levels, "number of Galerkin levels");
  }
  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    qpbeam::Config config = qpbeam::load_config(config_path);
    if (tol) config.tol = *tol;
    if (levels) config.schedule.levels = *levels;
    if (tol || levels) qpbeam::validate_config(config);
    return qpbeam::dispatch(command, config, out_dir, std::cout);
  } catch (const qpbeam::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const qpbeam::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
