#include "tve/diagnostics.hpp"

#include <doctest.h>

#include <cmath>

using namespace tve;

namespace {

AssembledOperators make_ops() {
  return assemble(BoxMesh::build(MeshConfig{2, {2.0, 1.0, 1.0}, {4, 2, 1}}), ElasticityTensor::isotropic(1.0, 2.0));
}

FieldSet uniform_fields(const AssembledOperators& ops, const Mandel& strain, const Mandel& plastic, double theta) {
  FieldSet f;
  const auto nq = static_cast<Eigen::Index>(ops.num_qp());
  f.u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ops.num_dofs()));
  f.theta = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(ops.num_nodes()), theta);
  f.strain = strain.replicate(1, nq);
  f.plastic = plastic.replicate(1, nq);
  f.stress = apply_D(ops, f.strain - f.plastic);
  return f;
}

}  // namespace

TEST_SUITE("diagnostics") {

TEST_CASE("energies of uniform fields") {
  const auto ops = make_ops();
  const Mandel e = SymTensor3(0.1, -0.05, 0.0, 0.02, 0.0, 0.0).mandel();
  const Mandel p = SymTensor3(0.03, -0.03, 0.0, 0.0, 0.0, 0.0).mandel();
  const FieldSet f = uniform_fields(ops, e, p, 1.5);
  const Mandel el = e - p;
  CHECK(potential_energy(ops, f) == doctest::Approx(0.5 * 2.0 * el.dot(ops.D.apply(el))));
  CHECK(thermal_energy(ops, f) == doctest::Approx(3.0));
  CHECK(total_energy(ops, f) == doctest::Approx(thermal_energy(ops, f) + potential_energy(ops, f)));
  CHECK(*entropy(ops, f.theta) == doctest::Approx(2.0 * std::log(1.5)));
  Eigen::VectorXd cold = f.theta;
  cold[3] = 0.0;
  CHECK_FALSE(entropy(ops, cold).has_value());
}

TEST_CASE("report statistics") {
  EnergyReport r;
  for (int i = 0; i < 4; ++i) {
    DiagnosticRow row;
    row.step = static_cast<std::size_t>(i);
    row.total = 10.0 + (i == 2 ? 1e-7 : 0.0);
    row.potential = 5.0 - i;
    row.dissipation = i == 0 ? 0.0 : 0.5 * i;
    row.min_theta = 1.0 - 0.1 * i;
    row.entropy = 0.1 * i;
    row.energy_defect = i * 1e-15;
    row.equilibrium = 1e-16;
    r.rows.push_back(row);
  }
  CHECK(r.relative_drift() == doctest::Approx(1e-8));
  CHECK(r.max_potential_increase() == doctest::Approx(-1.0));
  CHECK(r.min_dissipation() == doctest::Approx(0.5));
  CHECK(r.min_temperature() == doctest::Approx(0.7));
  CHECK(r.min_entropy_increment() == doctest::Approx(0.1));
  CHECK(r.max_energy_defect() == doctest::Approx(3e-15));
}

TEST_CASE("a priori monitor constants") {
  // Norton-Hoff c=1, p=2: κ = 1, p' = 2, ε = (2·1/2)^{1/2} = 1, young = 1/2.
  const ConstitutiveLaw nh(NortonHoff{1.0, 2.0});
  AprioriMonitor m(nh, 2.0, 1.0);
  CHECK(m.applicable());
  CHECK(m.lhs() == doctest::Approx(2.0));
  CHECK(m.bound() == doctest::Approx(2.0));
  StepInfo info;
  info.stress_lp = 4.0;
  info.lift_l1 = 1.0;
  info.lift_lp = 2.0;
  m.add(1.5, 0.5, info, 1.0);
  CHECK(m.dissipation_integral() == doctest::Approx(2.0));
  CHECK(m.lhs() == doctest::Approx(2.0 + 0.5 * 2.0));
  CHECK(m.bound() == doctest::Approx(2.0 + 0.5 * (1.0 + 0.5 * 2.0)));
  CHECK(m.ok());
}

TEST_CASE("recorder over an isolated run") {
  const auto ops = make_ops();
  const GalerkinBasis b = build_basis(ops, 3, 3);
  const Model m(ops, b, ConstitutiveLaw(NortonHoff{1.0, 3.0}));
  EvolutionConfig cfg;
  cfg.k = cfg.l = 3;
  cfg.dt = 0.01;
  cfg.horizon = 0.1;
  cfg.truncation_level = 1e30;
  const LiftedFields lift = LiftedFields::zero(ops);
  const SimState s0 = initialize(m, Eigen::VectorXd::Ones(static_cast<Eigen::Index>(ops.num_nodes())),
                                 b.comp_strain.col(0) + b.comp_strain.col(2), cfg);
  DiagnosticsRecorder rec(m, lift);
  (void)run(m, s0, lift, cfg, {&rec});
  const EnergyReport& r = rec.report();
  CHECK(r.isolated);
  CHECK(r.rows.size() == 11);
  CHECK(r.rows.front().step == 0);
  CHECK(r.relative_drift() < 1e-10);
  CHECK(r.max_potential_increase() < 0.0);
  CHECK(r.min_dissipation() > 0.0);
  CHECK(r.max_energy_defect() < 1e-11);
  CHECK(r.max_equilibrium_residual() < 1e-12);
  CHECK(r.min_entropy_increment() >= 0.0);
  CHECK(r.monitor_ok());
  CHECK(diagnostic_columns().size() == 17);

  // The default level k = 3 sits below the early dissipation density, so the
  // clipped source heats less than the mechanical energy released.
  cfg.truncation_level.reset();
  DiagnosticsRecorder clipped(m, lift);
  (void)run(m, s0, lift, cfg, {&clipped});
  CHECK(clipped.report().rows[1].dissipation > 3.0);
  CHECK(clipped.report().rows.back().total < r.rows.back().total - 1e-3);
  CHECK(diagnostic_columns().front() == "step");
}

}
