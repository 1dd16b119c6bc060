// Command-line front end for the experiment registry.
//
//   homog run <config.json> [--out DIR] [--threads N] [--tol-scale F]
//   homog list [--tag TAG]
//   homog repro <name|all> [--out DIR] [--threads N] [--tol-scale F]
//
// Exit codes: 0 all assertions pass, 1 an assertion failed or an experiment
// errored, 2 invalid configuration or usage.  The default output directory is
// taken from --out, then the HOMOG_OUT environment variable, then
// "./homog-out".

#include <string>

#include <CLI11.hpp>

#include "homog/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"numerical workbench for homogenized boundary data"};
  app.require_subcommand(1);

  std::string out_dir;
  int threads = 1;
  double tol_scale = 1.0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", out_dir, "output directory (default: $HOMOG_OUT or ./homog-out)");
    sub->add_option("--threads", threads, "worker threads for repro all")
        ->check(CLI::PositiveNumber);
    sub->add_option("--tol-scale", tol_scale, "multiply all assertion tolerances")
        ->check(CLI::PositiveNumber);
  };

  std::string config_path;
  CLI::App* run = app.add_subcommand("run", "run one experiment from a JSON config");
  run->add_option("config", config_path, "path to config JSON")->required();
  add_common(run);

  std::string tag;
  CLI::App* list = app.add_subcommand("list", "list registered experiments");
  list->add_option("--tag", tag, "only experiments carrying this tag");

  std::string repro_name;
  CLI::App* repro = app.add_subcommand("repro", "rerun a registered experiment's defaults");
  repro->add_option("name", repro_name, "experiment id, or 'all'")->required();
  add_common(repro);

  CLI11_PARSE(app, argc, argv);

  const auto& registry = homog::experiment_registry();
  if (run->parsed()) return homog::cli_run(registry, config_path, out_dir, tol_scale);
  if (list->parsed()) return homog::cli_list(registry, tag);
  return homog::cli_repro(registry, repro_name, out_dir, tol_scale, threads);
}
