#include "tve/diagnostics.hpp"
#include "tve/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace tve;

namespace {

struct Fixture {
  AssembledOperators ops;
  GalerkinBasis basis;
  Fixture(int k, int l, int cells = 6)
      : ops(assemble(BoxMesh::build(MeshConfig{2, {1.0, 1.0, 1.0}, {cells, cells, 1}}),
                     ElasticityTensor::isotropic(1.0, 1.0))),
        basis(build_basis(ops, k, l)) {}
  Eigen::VectorXd ones() const { return Eigen::VectorXd::Ones(static_cast<Eigen::Index>(ops.num_nodes())); }
  Eigen::VectorXd zero_plastic() const { return Eigen::VectorXd::Zero(6 * static_cast<Eigen::Index>(ops.num_qp())); }
};

EvolutionConfig config(int k, int l, double dt, double horizon, TimeScheme s = TimeScheme::Midpoint) {
  EvolutionConfig c;
  c.k = k;
  c.l = l;
  c.dt = dt;
  c.horizon = horizon;
  c.scheme = s;
  return c;
}

}  // namespace

TEST_SUITE("evolution") {

TEST_CASE("config validation") {
  CHECK_NOTHROW(config(1, 1, 0.1, 1.0).validate());
  CHECK_THROWS_AS(config(0, 1, 0.1, 1.0).validate(), PreconditionError);
  CHECK_THROWS_AS(config(1, 1, 0.0, 1.0).validate(), PreconditionError);
  CHECK_THROWS_AS(config(1, 1, 0.1, -1.0).validate(), PreconditionError);
  auto c = config(1, 1, 0.1, 1.0);
  c.truncation_level = -2.0;
  CHECK_THROWS_AS(c.validate(), PreconditionError);
  CHECK(config(7, 1, 0.1, 1.0).truncation() == 7.0);
}

TEST_CASE("initialization projects onto the bases") {
  Fixture f(4, 4);
  const Model m(f.ops, f.basis, ConstitutiveLaw(NortonHoff{}));
  const Eigen::Vector4d g(0.3, -0.1, 0.2, 0.05), d(1.0, 0.0, -0.5, 0.25);
  const Eigen::VectorXd plastic = f.basis.disp_strain * g + f.basis.comp_strain * d;
  const SimState s = initialize(m, 2.0 * f.ones(), plastic, config(4, 4, 0.1, 1.0));
  CHECK((s.gamma - g).norm() < 1e-10);
  CHECK((s.delta - d).norm() < 1e-10);
  CHECK(s.alpha == s.gamma);
  // A constant temperature lives on v₁ = 1/√|Ω| only.
  CHECK(s.beta[0] == doctest::Approx(2.0));
  CHECK(s.beta.tail(3).norm() < 1e-10);
  CHECK_THROWS_AS(initialize(m, f.ones().head(3), plastic, config(4, 4, 0.1, 1.0)), BadData);
  CHECK_THROWS_AS(initialize(m, f.ones(), plastic, config(3, 4, 0.1, 1.0)), PreconditionError);
}

TEST_CASE("zero data is a steady state") {
  Fixture f(3, 3);
  const Model m(f.ops, f.basis, ConstitutiveLaw(NortonHoff{1.0, 3.0}));
  const auto cfg = config(3, 3, 0.1, 0.5);
  const SimState s0 = initialize(m, f.ones(), f.zero_plastic(), cfg);
  const RunSummary r = run(m, s0, LiftedFields::zero(f.ops), cfg);
  CHECK(r.steps == 5);
  CHECK(r.final_state.t == doctest::Approx(0.5));
  CHECK((r.final_state.beta - s0.beta).norm() < 1e-14);
  CHECK(r.final_state.delta.norm() == 0.0);
}

TEST_CASE("heat modes decay by the implicit euler factor") {
  Fixture f(2, 5);
  const Model m(f.ops, f.basis, ConstitutiveLaw(NortonHoff{}));
  Eigen::VectorXd th0 = f.ones();
  th0 += f.basis.temp_modes.col(1) * 0.3 + f.basis.temp_modes.col(3) * 0.2;
  const auto cfg = config(2, 5, 0.01, 0.1);
  const SimState s0 = initialize(m, th0, f.zero_plastic(), cfg);
  const RunSummary r = run(m, s0, LiftedFields::zero(f.ops), cfg);
  for (int j = 0; j < 5; ++j) {
    const double want = s0.beta[j] / std::pow(1.0 + 0.01 * f.basis.temp_values[j], 10);
    CHECK(r.final_state.beta[j] == doctest::Approx(want).epsilon(1e-10));
  }
}

TEST_CASE("linear single-mode relaxation matches the discrete amplification factors") {
  Fixture f(1, 1);
  const Model m(f.ops, f.basis, ConstitutiveLaw(Mroz{MrozProfile::constant(1.0)}));
  // ζ₁ is a deviatoric constant: δ' = −2μδ.
  const double c = 2.0, dt = 0.05;
  for (auto scheme : {TimeScheme::Midpoint, TimeScheme::ImplicitEuler}) {
    const auto cfg = config(1, 1, dt, 0.5, scheme);
    const SimState s0 = initialize(m, f.ones(), f.basis.comp_strain.col(0), cfg);
    CHECK(s0.delta[0] == doctest::Approx(1.0));
    const RunSummary r = run(m, s0, LiftedFields::zero(f.ops), cfg);
    const double amp = scheme == TimeScheme::Midpoint ? (1.0 - c * dt / 2) / (1.0 + c * dt / 2) : 1.0 / (1.0 + c * dt);
    CHECK(r.final_state.delta[0] == doctest::Approx(std::pow(amp, 10)).epsilon(1e-10));
    CHECK(std::abs(r.final_state.gamma[0]) < 1e-12);
    // Dissipated energy heats the body.
    CHECK(r.final_state.beta[0] > s0.beta[0]);
  }
}

TEST_CASE("reconstructed stress is D(eps(u) - eps_p)") {
  Fixture f(4, 4);
  const Model m(f.ops, f.basis, ConstitutiveLaw(NortonHoff{1.0, 3.0}));
  const auto cfg = config(4, 4, 0.01, 0.05);
  const Eigen::VectorXd p0 = f.basis.disp_strain.col(0) * 0.2 + f.basis.comp_strain.col(1) * 0.5;
  const RunSummary r = run(m, initialize(m, f.ones(), p0, cfg), LiftedFields::zero(f.ops), cfg);
  const FieldSet h = reconstruct_homogeneous(m, r.final_state);
  CHECK((h.strain - strain_of(f.ops, h.u)).norm() < 1e-12);
  CHECK((h.stress - apply_D(f.ops, h.strain - h.plastic)).norm() < 1e-12);
  const FieldSet phys = reconstruct_fields(m, r.final_state, LiftedFields::zero(f.ops));
  CHECK((phys.stress - h.stress).norm() == 0.0);
}

TEST_CASE("failed fixed point raises with its residual history") {
  Fixture f(3, 3);
  const Model m(f.ops, f.basis, ConstitutiveLaw(NortonHoff{1.0, 4.0}));
  auto cfg = config(3, 3, 0.5, 0.5);
  cfg.max_iterations = 1;
  cfg.max_halvings = 0;
  const SimState s0 = initialize(m, f.ones(), f.basis.comp_strain.col(0) * 3.0, cfg);
  try {
    (void)step(m, s0, LiftedFields::zero(f.ops), cfg);
    FAIL("expected NonlinearSolveFailure");
  } catch (const NonlinearSolveFailure& e) {
    CHECK_FALSE(e.residual_history.empty());
  }
  CHECK_THROWS_AS(run(m, s0, LiftedFields::zero(f.ops), cfg), NonlinearSolveFailure);
}

TEST_CASE("step halving recovers from a stiff step") {
  Fixture f(3, 3);
  const Model m(f.ops, f.basis, ConstitutiveLaw(NortonHoff{1.0, 4.0}));
  auto cfg = config(3, 3, 0.5, 0.5);
  cfg.max_iterations = 40;
  cfg.max_halvings = 10;
  const SimState s0 = initialize(m, f.ones(), f.basis.comp_strain.col(0) * 3.0, cfg);
  const RunSummary r = run(m, s0, LiftedFields::zero(f.ops), cfg);
  CHECK(r.halvings > 0);
  CHECK(r.final_state.t == doctest::Approx(0.5));
  CHECK(std::abs(r.final_state.delta[0]) < std::abs(s0.delta[0]));
}

TEST_CASE("hardening stays within its bounds") {
  Fixture f(3, 3, 4);
  BodnerPartom bp;
  bp.a = 1.0;
  bp.p = 2.0;
  bp.gamma0 = 5.0;
  bp.y0 = 1.0;
  bp.y_max = 1.2;
  const Model m(f.ops, f.basis, ConstitutiveLaw(bp));
  const auto cfg = config(3, 3, 0.05, 0.5, TimeScheme::ImplicitEuler);
  const SimState s0 = initialize(m, f.ones(), f.basis.comp_strain.col(0) * 2.0, cfg);
  CHECK(s0.hardening.size() == static_cast<Eigen::Index>(f.ops.num_qp()));
  const RunSummary r = run(m, s0, LiftedFields::zero(f.ops), cfg);
  CHECK(r.final_state.hardening.minCoeff() >= 1.0);
  CHECK(r.final_state.hardening.maxCoeff() <= 1.2);
  CHECK(r.final_state.hardening.maxCoeff() > 1.0);
}

}
