// tve: run, certify, converge and inspect basis sets from a JSON config.
#include "tve/commands.hpp"
#include "tve/config.hpp"
#include "tve/io.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"thermo-visco-elastic two-level Galerkin solver"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(tve::version()));

  std::string config_path, out;
  bool quiet = false;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory (overrides TVE_OUT_DIR and output.dir)");
    sub->add_flag("--quiet", quiet, "suppress progress output");
  };
  auto* run = app.add_subcommand("run", "evolve the system and write diagnostics");
  auto* certify = app.add_subcommand("certify", "sample the constitutive law's monotonicity and growth");
  auto* converge = app.add_subcommand("converge", "run the (k, l) ladder and report terminal differences");
  auto* basis = app.add_subcommand("basis", "build, check and save the Galerkin basis");
  for (auto* s : {run, certify, converge, basis}) common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : tve::kExitConfig;
  }

  return tve::guarded(
      [&]() -> int {
        const tve::RunConfig cfg = tve::load_config(config_path);
        tve::CommandOptions opts;
        opts.quiet = quiet;
        if (!out.empty()) opts.out_dir = out;
        else if (const char* env = std::getenv("TVE_OUT_DIR"); env && *env) opts.out_dir = env;
        if (run->parsed()) return tve::cmd_run(cfg, opts);
        if (certify->parsed()) return tve::cmd_certify(cfg, opts);
        if (converge->parsed()) return tve::cmd_converge(cfg, opts);
        return tve::cmd_basis(cfg, opts);
      },
      std::cerr);
}
