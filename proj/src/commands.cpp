#include "tve/commands.hpp"

#include "tve/errors.hpp"
#include "tve/io.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <iostream>

namespace tve {

using nlohmann::json;

std::vector<double> time_grid(const EvolutionConfig& evo) {
  const auto n = static_cast<long long>(std::llround(evo.horizon / evo.dt));
  std::vector<double> t;
  t.reserve(static_cast<std::size_t>(n) + 1);
  for (long long i = 0; i <= n; ++i) t.push_back(static_cast<double>(i) * evo.dt);
  return t;
}

std::unique_ptr<Problem> setup_problem(const RunConfig& cfg, int k, int l) {
  auto p = std::make_unique<Problem>();
  p->ops = std::make_unique<AssembledOperators>(assemble(BoxMesh::build(cfg.mesh), make_elasticity(cfg)));
  p->basis = std::make_unique<GalerkinBasis>(build_basis(*p->ops, k, l, cfg.surrogate_length));
  p->model = std::make_unique<Model>(*p->ops, *p->basis, cfg.law);
  p->evolution = cfg.evolution;
  p->evolution.k = k;
  p->evolution.l = l;
  const LiftData data = make_lift_data(cfg, *p->ops);
  p->lift = data.mechanical_zero() && data.thermal_zero() ? LiftedFields::zero(*p->ops)
                                                          : LiftedFields::build(*p->ops, data, time_grid(p->evolution));
  p->initial = initialize(*p->model, initial_temperature(cfg, *p->ops), initial_plastic_strain(cfg, *p->ops),
                          p->evolution);
  return p;
}

std::unique_ptr<Problem> setup_problem(const RunConfig& cfg) {
  return setup_problem(cfg, cfg.evolution.k, cfg.evolution.l);
}

std::vector<Check> run_checks(const RunConfig& cfg, const EnergyReport& rep, const AprioriMonitor& mon) {
  std::vector<Check> c;
  auto add = [&](std::string name, double value, double limit, bool passed) {
    c.push_back({std::move(name), value, limit, passed});
  };
  const double tol = cfg.evolution.tolerance;
  double min_pot = 0.0, max_total = 1.0;
  for (const auto& r : rep.rows) {
    min_pot = std::min(min_pot, r.potential);
    max_total = std::max(max_total, std::abs(r.total));
  }
  add("potential_nonnegative", min_pot, 0.0, min_pot >= 0.0);
  add("dissipation_nonnegative", rep.min_dissipation(), -1e-12, rep.min_dissipation() >= -1e-12);
  const double eq_limit = std::max(1e-10, 10.0 * tol);
  add("equilibrium_residual", rep.max_equilibrium_residual(), eq_limit, rep.max_equilibrium_residual() <= eq_limit);
  if (cfg.evolution.scheme == TimeScheme::Midpoint) {
    const double lim = 10.0 * tol * max_total;
    add("energy_identity_defect", rep.max_energy_defect(), lim, rep.max_energy_defect() <= lim);
  }
  if (rep.isolated) {
    add("total_energy_drift", rep.relative_drift(), 1e-6, rep.relative_drift() <= 1e-6);
    add("potential_increase", rep.max_potential_increase(), 1e-10, rep.max_potential_increase() <= 1e-10);
    if (cfg.theta0.value - std::abs(cfg.theta0.perturbation) >= 0.0)
      add("min_temperature", rep.min_temperature(), -1e-12, rep.min_temperature() >= -1e-12);
    if (!rep.entropy_undefined)
      add("entropy_increment", rep.min_entropy_increment(), -1e-8, rep.min_entropy_increment() >= -1e-8);
  }
  if (mon.applicable()) add("apriori_bound", mon.lhs(), 2.0 * mon.bound() + 1e-12, mon.ok());
  return c;
}

namespace {

std::ostream& log_of(const CommandOptions& o) { return o.log ? *o.log : std::cout; }

std::filesystem::path out_dir(const RunConfig& cfg, const CommandOptions& o) {
  const auto d = o.out_dir.empty() ? cfg.output_dir : o.out_dir;
  std::filesystem::create_directories(d);
  return d;
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw BadData("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

json header(const RunConfig& cfg, const char* command) {
  return {{"command", command}, {"version", version()}, {"config_hash", fmt::format("{:016x}", cfg.hash)}};
}

json checks_json(const std::vector<Check>& checks) {
  json o = json::object();
  for (const auto& c : checks) o[c.name] = {{"value", c.value}, {"limit", c.limit}, {"passed", c.passed}};
  return o;
}

bool all_passed(const std::vector<Check>& checks) {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

void print_checks(std::ostream& os, const std::vector<Check>& checks) {
  for (const auto& c : checks)
    os << fmt::format("  {:<34} {:>14.6e}  limit {:>12.4e}  {}\n", c.name, c.value, c.limit, c.passed ? "ok" : "FAIL");
}

class SnapshotSink : public Sink {
public:
  SnapshotSink(const Model& m, const LiftedFields& lift, const RunConfig& cfg, std::filesystem::path dir)
      : model_(m), lift_(lift), cfg_(cfg), dir_(std::move(dir)) {}

  void start(const SimState& s) override {
    if (cfg_.snapshot_every > 0) write(s, 0);
  }
  void accept(const SimState&, const SimState& after, const StepInfo&, std::size_t index) override {
    if (cfg_.snapshot_every > 0 && (index + 1) % static_cast<std::size_t>(cfg_.snapshot_every) == 0)
      write(after, index + 1);
  }

private:
  void write(const SimState& s, std::size_t index) {
    write_vtk(dir_ / fmt::format("fields_{:06d}.vtk", index), model_.ops(), reconstruct_fields(model_, s, lift_), s.t,
              cfg_.hash);
  }
  const Model& model_;
  const LiftedFields& lift_;
  const RunConfig& cfg_;
  std::filesystem::path dir_;
};

}  // namespace

int cmd_run(const RunConfig& cfg, const CommandOptions& opts) {
  std::ostream& log = log_of(opts);
  const auto dir = out_dir(cfg, opts);
  write_json(dir / "effective_config.json", cfg.effective);

  auto p = setup_problem(cfg);
  DiagnosticsRecorder rec(*p->model, p->lift);
  std::vector<Sink*> sinks{&rec};
  std::unique_ptr<SnapshotSink> snaps;
  if (cfg.write_vtk) {
    snaps = std::make_unique<SnapshotSink>(*p->model, p->lift, cfg, dir);
    sinks.push_back(snaps.get());
  }
  const RunSummary sum = run(*p->model, p->initial, p->lift, p->evolution, sinks);

  const FieldSet final_fields = reconstruct_fields(*p->model, sum.final_state, p->lift);
  write_diagnostics_csv(dir / "diagnostics.csv", rec.report(), cfg.hash);
  write_nodal_csv(dir / "final_nodal.csv", *p->ops, final_fields, cfg.hash);
  if (cfg.write_vtk) write_vtk(dir / "final.vtk", *p->ops, final_fields, sum.final_state.t, cfg.hash);

  const auto checks = run_checks(cfg, rec.report(), rec.monitor());
  const bool ok = all_passed(checks);
  const auto& rows = rec.report().rows;
  json s = header(cfg, "run");
  s["passed"] = ok;
  s["exit_code"] = ok ? kExitOk : kExitInvariant;
  s["checks"] = checks_json(checks);
  s["run"] = {{"steps", sum.steps},
              {"halvings", sum.halvings},
              {"iterations", sum.iterations},
              {"t_end", sum.final_state.t},
              {"isolated", rec.report().isolated},
              {"law", cfg.law.name()}};
  s["energy"] = {{"initial_total", rows.front().total},
                 {"final_total", rows.back().total},
                 {"initial_potential", rows.front().potential},
                 {"final_potential", rows.back().potential},
                 {"relative_drift", rec.report().relative_drift()},
                 {"max_energy_defect", rec.report().max_energy_defect()},
                 {"min_temperature", rec.report().min_temperature()},
                 {"entropy_undefined", rec.report().entropy_undefined}};
  const auto& mon = rec.monitor();
  s["monitor"] = {{"applicable", mon.applicable()},  {"sup_energy", mon.sup_energy()},
                  {"dissipation_integral", mon.dissipation_integral()}, {"lhs", mon.lhs()},
                  {"bound", mon.bound()},            {"theta_l1_sup", mon.theta_l1_sup()}};
  write_json(dir / "summary.json", s);

  if (!opts.quiet) {
    log << fmt::format("run: {} steps to t={:.6g} ({} halvings, {} fixed-point iterations)\n", sum.steps,
                       sum.final_state.t, sum.halvings, sum.iterations);
    print_checks(log, checks);
    log << "outputs in " << dir.string() << '\n';
  }
  return ok ? kExitOk : kExitInvariant;
}

int cmd_certify(const RunConfig& cfg, const CommandOptions& opts) {
  const auto dir = out_dir(cfg, opts);
  write_json(dir / "effective_config.json", cfg.effective);
  const CertificationReport r = run_certification(cfg.law, cfg.certification);
  json s = header(cfg, "certify");
  s["passed"] = r.passed;
  s["exit_code"] = r.passed ? kExitOk : kExitInvariant;
  s["law"] = r.law;
  s["samples"] = r.samples;
  s["p"] = r.p;
  s["declared"] = {{"growth", r.declared_growth}, {"coercivity", r.declared_coercivity}};
  s["measured"] = {{"min_monotonicity", r.min_monotonicity},
                   {"max_growth_ratio", r.max_growth_ratio},
                   {"min_coercivity_ratio", r.min_coercivity_ratio},
                   {"max_trace", r.max_trace}};
  s["checks"] = {{"monotone", r.monotone}, {"growth", r.growth}, {"coercive", r.coercive}};
  write_json(dir / "certification.json", s);
  if (!opts.quiet) {
    std::ostream& log = log_of(opts);
    log << fmt::format("certify {}: {} samples, C={:.6g}, beta={:.6g}, p={:.6g}\n", r.law, r.samples,
                       r.declared_growth, r.declared_coercivity, r.p);
    log << fmt::format("  monotonicity min {:.6e}  {}\n", r.min_monotonicity, r.monotone ? "ok" : "FAIL");
    log << fmt::format("  growth ratio max {:.6e}  {}\n", r.max_growth_ratio, r.growth ? "ok" : "FAIL");
    log << fmt::format("  coercivity ratio min {:.6e}  {}\n", r.min_coercivity_ratio, r.coercive ? "ok" : "FAIL");
  }
  return r.passed ? kExitOk : kExitInvariant;
}

namespace {

struct Terminal {
  Eigen::VectorXd plastic, theta, u;
};

}  // namespace

LadderResult converge_ladder(const RunConfig& cfg) {
  LadderResult res;
  res.levels = cfg.ladder;
  std::vector<Terminal> terms;
  std::unique_ptr<Problem> last;
  for (const auto& [k, l] : cfg.ladder) {
    auto p = setup_problem(cfg, k, l);
    const RunSummary sum = run(*p->model, p->initial, p->lift, p->evolution);
    const FieldSet f = reconstruct_fields(*p->model, sum.final_state, p->lift);
    terms.push_back({flatten(f.plastic), f.theta, f.u});
    last = std::move(p);
  }
  const auto& ops = *last->ops;  // every level shares the mesh
  const Eigen::VectorXd& w = last->model->qp_weights();
  auto l2_plastic = [&](const Eigen::VectorXd& v) {
    double s = 0.0;
    for (Eigen::Index q = 0; q < w.size(); ++q) s += w[q] * v.segment<6>(6 * q).squaredNorm();
    return std::sqrt(s);
  };
  auto l2_theta = [&](const Eigen::VectorXd& v) { return std::sqrt(ops.mass_theta_lumped.dot(v.cwiseAbs2())); };
  auto l2_u = [&](const Eigen::VectorXd& v) { return std::sqrt(v.dot(ops.mass_u * v)); };
  auto total = [&](const Terminal& a, const Terminal& b) {
    return std::hypot(l2_plastic(a.plastic - b.plastic), l2_theta(a.theta - b.theta), l2_u(a.u - b.u));
  };
  for (std::size_t i = 1; i < terms.size(); ++i) {
    res.delta_plastic.push_back(l2_plastic(terms[i].plastic - terms[i - 1].plastic));
    res.delta_theta.push_back(l2_theta(terms[i].theta - terms[i - 1].theta));
    res.delta_u.push_back(l2_u(terms[i].u - terms[i - 1].u));
    res.delta_total.push_back(total(terms[i], terms[i - 1]));
  }
  for (const auto& t : terms) res.to_finest.push_back(total(t, terms.back()));
  res.strictly_decreasing = !res.delta_total.empty();
  for (std::size_t i = 1; i < res.delta_total.size(); ++i)
    if (!(res.delta_total[i] < res.delta_total[i - 1])) res.strictly_decreasing = false;
  return res;
}

int cmd_converge(const RunConfig& cfg, const CommandOptions& opts) {
  const auto dir = out_dir(cfg, opts);
  write_json(dir / "effective_config.json", cfg.effective);
  const LadderResult r = converge_ladder(cfg);

  std::ofstream csv(dir / "converge.csv", std::ios::binary);
  csv << provenance_line(cfg.hash) << '\n';
  csv << "k,l,delta_plastic,delta_theta,delta_u,delta_total,distance_to_finest\n";
  for (std::size_t i = 0; i < r.levels.size(); ++i) {
    csv << r.levels[i].first << ',' << r.levels[i].second;
    if (i == 0) csv << ",,,,";
    else
      csv << ',' << format_number(r.delta_plastic[i - 1]) << ',' << format_number(r.delta_theta[i - 1]) << ','
          << format_number(r.delta_u[i - 1]) << ',' << format_number(r.delta_total[i - 1]);
    csv << ',' << format_number(r.to_finest[i]) << '\n';
  }

  json s = header(cfg, "converge");
  s["passed"] = r.strictly_decreasing;
  s["exit_code"] = r.strictly_decreasing ? kExitOk : kExitInvariant;
  json levels = json::array();
  for (const auto& [k, l] : r.levels) levels.push_back({k, l});
  s["levels"] = levels;
  s["delta_total"] = r.delta_total;
  s["distance_to_finest"] = r.to_finest;
  write_json(dir / "summary.json", s);

  if (!opts.quiet) {
    std::ostream& log = log_of(opts);
    log << fmt::format("{:>5} {:>5} {:>14} {:>14} {:>14} {:>14}\n", "k", "l", "d_plastic", "d_theta", "d_u", "d_total");
    for (std::size_t i = 1; i < r.levels.size(); ++i)
      log << fmt::format("{:>5} {:>5} {:>14.6e} {:>14.6e} {:>14.6e} {:>14.6e}\n", r.levels[i].first,
                         r.levels[i].second, r.delta_plastic[i - 1], r.delta_theta[i - 1], r.delta_u[i - 1],
                         r.delta_total[i - 1]);
    log << (r.strictly_decreasing ? "deltas strictly decreasing\n" : "deltas NOT strictly decreasing\n");
  }
  return r.strictly_decreasing ? kExitOk : kExitInvariant;
}

int cmd_basis(const RunConfig& cfg, const CommandOptions& opts) {
  const auto dir = out_dir(cfg, opts);
  write_json(dir / "effective_config.json", cfg.effective);
  const AssembledOperators ops = assemble(BoxMesh::build(cfg.mesh), make_elasticity(cfg));
  const GalerkinBasis b = build_basis(ops, cfg.evolution.k, cfg.evolution.l, cfg.surrogate_length);
  save_basis(b, dir / "basis.csv", provenance_line(cfg.hash).substr(2));

  const Model m(ops, b, cfg.law);
  std::vector<Check> checks;
  auto add = [&](std::string name, double v, double lim) { checks.push_back({std::move(name), v, lim, v <= lim}); };
  const Eigen::MatrixXd gram = b.disp_modes.transpose() * ops.mass_u * b.disp_modes;
  add("displacement_l2_gram", (gram - Eigen::MatrixXd::Identity(b.k, b.k)).cwiseAbs().maxCoeff(), 1e-10);
  Eigen::MatrixXd energy(b.k, b.k), cross(b.l, b.k), zz(b.l, b.l);
  for (int j = 0; j < b.k; ++j) energy.col(j) = m.project_disp(b.disp_strain.col(j));
  for (int j = 0; j < b.k; ++j) cross.col(j) = m.project_comp(b.disp_strain.col(j));
  for (int j = 0; j < b.l; ++j) zz.col(j) = m.project_comp(b.comp_strain.col(j));
  add("displacement_energy_orthogonality",
      (energy - Eigen::MatrixXd(b.disp_values.asDiagonal())).cwiseAbs().maxCoeff() /
          std::max(1.0, b.disp_values.cwiseAbs().maxCoeff()),
      1e-9);
  add("temperature_mu1", std::abs(b.temp_values[0]), 1e-11);
  add("temperature_constant_mode",
      (b.temp_modes.col(0).array() - b.temp_modes(0, 0)).abs().maxCoeff(), 1e-10);
  add("complement_orthogonality", cross.cwiseAbs().maxCoeff(), 1e-10);
  add("complement_orthonormality", (zz - Eigen::MatrixXd::Identity(b.l, b.l)).cwiseAbs().maxCoeff(), 1e-10);
  const ProjectionNormReport pr = projection_norm_check(ops, b, 1000, cfg.seed);
  add("projection_norm_ratio", pr.max_ratio, 1.0 + 1e-10);

  const bool ok = all_passed(checks);
  json s = header(cfg, "basis");
  s["passed"] = ok;
  s["exit_code"] = ok ? kExitOk : kExitInvariant;
  s["k"] = b.k;
  s["l"] = b.l;
  s["mesh_hash"] = fmt::format("{:016x}", b.mesh_hash);
  s["displacement_eigenvalues"] = std::vector<double>(b.disp_values.begin(), b.disp_values.end());
  s["temperature_eigenvalues"] = std::vector<double>(b.temp_values.begin(), b.temp_values.end());
  s["complement_eigenvalues"] = std::vector<double>(b.comp_values.begin(), b.comp_values.end());
  s["checks"] = checks_json(checks);
  write_json(dir / "summary.json", s);
  if (!opts.quiet) {
    std::ostream& log = log_of(opts);
    log << fmt::format("basis: k={} l={} written to {}\n", b.k, b.l, (dir / "basis.csv").string());
    print_checks(log, checks);
  }
  return ok ? kExitOk : kExitInvariant;
}

int guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const ValidationError& e) {
    err << "config error:\n";
    for (const auto& v : e.violations) err << "  " << v << '\n';
    return kExitConfig;
  } catch (const ParseError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const BadConfig& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const PreconditionError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const CertificationFailure& e) {
    err << "invariant violation: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const StateCorrupt& e) {
    err << "invariant violation: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const NonlinearSolveFailure& e) {
    err << "solver failure: " << e.what() << '\n';
    if (!e.residual_history.empty())
      err << fmt::format("  last residuals: first {:.3e}, last {:.3e} after {} iterations\n",
                         e.residual_history.front(), e.residual_history.back(), e.residual_history.size());
    return kExitSolver;
  } catch (const std::exception& e) {
    err << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  }
}

}  // namespace tve
