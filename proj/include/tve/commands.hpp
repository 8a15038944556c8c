#pragma once

#include "tve/config.hpp"
#include "tve/diagnostics.hpp"

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace tve {

/// Stable process exit codes.
enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitSolver = 3, kExitInvariant = 4 };

struct CommandOptions {
  std::filesystem::path out_dir;  // empty: config output.dir
  bool quiet = false;
  std::ostream* log = nullptr;    // defaults to std::cout
};

/// Everything one evolution run needs, built from a config at basis sizes
/// (k, l). Non-movable because the model points into ops and basis.
struct Problem {
  std::unique_ptr<AssembledOperators> ops;
  std::unique_ptr<GalerkinBasis> basis;
  std::unique_ptr<Model> model;
  LiftedFields lift;
  EvolutionConfig evolution;
  SimState initial;
};

std::unique_ptr<Problem> setup_problem(const RunConfig& cfg, int k, int l);
std::unique_ptr<Problem> setup_problem(const RunConfig& cfg);

/// Grid 0, dt, ..., horizon used for the lifts.
std::vector<double> time_grid(const EvolutionConfig& evo);

struct Check {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool passed = false;
};

/// Invariant suite of a finished run. Isolated-system checks (conservation,
/// potential-energy decay, entropy, positivity) apply only when all data
/// vanish; the energy identity only for the midpoint scheme.
std::vector<Check> run_checks(const RunConfig& cfg, const EnergyReport& report, const AprioriMonitor& monitor);

int cmd_run(const RunConfig& cfg, const CommandOptions& opts);
int cmd_certify(const RunConfig& cfg, const CommandOptions& opts);
int cmd_converge(const RunConfig& cfg, const CommandOptions& opts);
int cmd_basis(const RunConfig& cfg, const CommandOptions& opts);

struct LadderResult {
  std::vector<std::pair<int, int>> levels;
  std::vector<double> delta_plastic, delta_theta, delta_u, delta_total;  // level i vs i-1 (i >= 1)
  std::vector<double> to_finest;                                        // combined distance to the last level
  bool strictly_decreasing = false;
};

/// Runs every ladder level and measures terminal-field L² differences.
LadderResult converge_ladder(const RunConfig& cfg);

/// Runs `body`, mapping library exceptions to exit codes and printing the
/// message to `err`.
int guarded(const std::function<int()>& body, std::ostream& err);

}  // namespace tve
