#include "tve/errors.hpp"
#include "tve/lifting.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

using namespace tve;

namespace {

AssembledOperators make_ops(int nx = 6, int ny = 4) {
  MeshConfig mc;
  mc.cells = {nx, ny, 1};
  mc.extents = {1.0, 0.6, 1.0};
  return assemble(BoxMesh::build(mc), ElasticityTensor::isotropic(1.0, 0.8));
}

std::filesystem::path write_tmp(const std::string& name, const std::string& body) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << body;
  return p;
}

}  // namespace

TEST_SUITE("lifting") {

TEST_CASE("time profiles") {
  TimeProfile c;
  c.value = 2.0;
  CHECK(c.at(7.0) == 2.0);
  TimeProfile r;
  r.kind = TimeProfile::Kind::Ramp;
  r.value = 3.0;
  r.ramp_time = 0.5;
  CHECK(r.at(0.25) == doctest::Approx(1.5));
  CHECK(r.at(2.0) == doctest::Approx(3.0));
  TimeProfile s;
  s.kind = TimeProfile::Kind::Sinusoid;
  s.frequency = 2.0;
  CHECK(s.at(0.125) == doctest::Approx(1.0));
  TimeProfile t;
  t.kind = TimeProfile::Kind::Table;
  t.table = {{0.0, 1.0}, {1.0, 3.0}};
  CHECK(t.at(0.5) == doctest::Approx(2.0));
  CHECK(t.at(-1.0) == doctest::Approx(1.0));
  CHECK(t.at(5.0) == doctest::Approx(3.0));
}

TEST_CASE("profile csv") {
  const auto good = write_tmp("tve_profile_good.csv", "# comment\nt,value\n0,0\n0.5,1\n1.0,4\n");
  const TimeProfile p = TimeProfile::from_csv(good);
  CHECK(p.kind == TimeProfile::Kind::Table);
  CHECK(p.at(0.75) == doctest::Approx(2.5));
  const auto bad = write_tmp("tve_profile_bad.csv", "0,1\n0.5,x\n");
  CHECK_THROWS_AS(TimeProfile::from_csv(bad), BadData);
  const auto order = write_tmp("tve_profile_order.csv", "0,1\n0,2\n");
  CHECK_THROWS_AS(TimeProfile::from_csv(order), BadData);
  CHECK_THROWS_AS(TimeProfile::from_csv("/nonexistent/profile.csv"), BadData);
  for (const auto& f : {good, bad, order}) std::filesystem::remove(f);
}

TEST_CASE("elastic lift honours boundary data and the load") {
  const auto ops = make_ops();
  const VectorFn g = [](const Eigen::Vector3d& x) { return Eigen::Vector3d(0.1 * x.y(), -0.05 * x.x() * x.x(), 0.0); };
  const Eigen::VectorXd bc = dirichlet_values(ops, g);
  for (int dof : ops.free_dofs) CHECK(bc[dof] == 0.0);
  const Eigen::VectorXd load =
      load_vector(ops, [](const Eigen::Vector3d& x) { return Eigen::Vector3d(std::sin(3 * x.x()), 1.0, 0.0); });
  const ElasticLift lift = solve_elastic_lift(ops, load, bc);
  CHECK(lift.residual <= 1e-10);
  for (int n : ops.mesh.boundary_nodes())
    for (int c = 0; c < 2; ++c) CHECK(lift.u[2 * n + c] == bc[2 * n + c]);
  // Galerkin orthogonality on the free DOFs: ∫Dε(ũ):ε(φ) = ∫f·φ.
  const Eigen::VectorXd r = ops.stiffness_u * lift.u - load;
  for (int dof : ops.free_dofs) CHECK(std::abs(r[dof]) < 1e-12);
  // Stress is D applied to the strain.
  CHECK((lift.stress - apply_D(ops, lift.strain)).norm() < 1e-13);
  // Linearity in the data.
  const ElasticLift twice = solve_elastic_lift(ops, 2.0 * load, 2.0 * bc);
  CHECK((twice.u - 2.0 * lift.u).norm() < 1e-12 * lift.u.norm());
  CHECK_THROWS_AS(solve_elastic_lift(ops, load.head(3), bc), DimensionMismatch);
  Eigen::VectorXd nan_load = load;
  nan_load[0] = NAN;
  CHECK_THROWS_AS(solve_elastic_lift(ops, nan_load, bc), BadData);
}

TEST_CASE("heat lift decays to the mean and rejects bad grids") {
  const auto ops = make_ops();
  const auto nn = static_cast<Eigen::Index>(ops.num_nodes());
  Eigen::VectorXd th0(nn);
  for (Eigen::Index n = 0; n < nn; ++n) th0[n] = std::cos(std::numbers::pi * ops.mesh.node(static_cast<std::size_t>(n)).x());
  std::vector<double> times;
  for (int i = 0; i <= 40; ++i) times.push_back(0.05 * i);
  const auto zero = [&](double) { return Eigen::VectorXd::Zero(nn); };
  const auto th = solve_heat_lift(ops, zero, th0, times);
  CHECK(th.size() == times.size());
  CHECK(th.front() == th0);
  const double mean = ops.mass_theta_lumped.dot(th0) / ops.mesh.volume();
  // The slowest mode decays like exp(−π²t); after t = 2 it is gone.
  CHECK((th.back().array() - mean).abs().maxCoeff() < 1e-6);
  CHECK_THROWS_AS(solve_heat_lift(ops, zero, th0, {0.0, 0.0}), PreconditionError);
  CHECK_THROWS_AS(solve_heat_lift(ops, zero, th0, {}), PreconditionError);
  CHECK_THROWS_AS(solve_heat_lift(ops, zero, th0.head(2), times), DimensionMismatch);
}

TEST_CASE("lifted fields scale with their profiles and interpolate in time") {
  const auto ops = make_ops();
  LiftData d;
  d.force = [](const Eigen::Vector3d&) { return Eigen::Vector3d(1.0, 0.0, 0.0); };
  d.force_profile.kind = TimeProfile::Kind::Ramp;
  d.force_profile.ramp_time = 1.0;
  d.flux = [](const Eigen::Vector3d&) { return 1.0; };
  const std::vector<double> times{0.0, 0.5, 1.0};
  const LiftedFields lf = LiftedFields::build(ops, d, times);
  CHECK_FALSE(lf.mechanical_zero());
  CHECK_FALSE(lf.thermal_zero());
  const Eigen::VectorXd u1 = lf.displacement(1.0);
  CHECK(u1.norm() > 0.0);
  CHECK((lf.displacement(0.25) - 0.25 * u1).norm() < 1e-13);
  CHECK((lf.theta(0.25) - 0.5 * (lf.theta(0.0) + lf.theta(0.5))).norm() < 1e-13);
  // ∫θ̃ grows at rate |∂Ω| between grid times.
  const double rate = (ops.mass_theta_lumped.dot(lf.theta(1.0)) - ops.mass_theta_lumped.dot(lf.theta(0.5))) / 0.5;
  CHECK(rate == doctest::Approx(ops.mesh.boundary_measure()).epsilon(1e-10));

  const LiftedFields z = LiftedFields::zero(ops);
  CHECK(z.mechanical_zero());
  CHECK(z.thermal_zero());
  CHECK(z.displacement(3.0).norm() == 0.0);
  CHECK(z.theta(3.0).norm() == 0.0);
}

TEST_CASE("recombine and remove_lift are inverse") {
  const auto ops = make_ops(3, 3);
  LiftData d;
  d.displacement = [](const Eigen::Vector3d& x) { return Eigen::Vector3d(0.1 * x.x(), 0.2 * x.y(), 0.0); };
  d.theta0 = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(ops.num_nodes()), 0.5);
  const LiftedFields lf = LiftedFields::build(ops, d, {0.0, 1.0});
  const FieldSet lift = lift_fields(lf, 0.3);
  CHECK(lift.plastic.norm() == 0.0);
  FieldSet h;
  h.u = Eigen::VectorXd::Random(lift.u.size());
  h.theta = Eigen::VectorXd::Random(lift.theta.size());
  h.strain = StrainField::Random(6, lift.strain.cols());
  h.plastic = StrainField::Random(6, lift.strain.cols());
  h.stress = StrainField::Random(6, lift.strain.cols());
  const FieldSet phys = recombine(h, lift);
  CHECK(phys.plastic == h.plastic);
  const FieldSet back = remove_lift(phys, lift);
  // Exact up to one rounding of the sum.
  CHECK((back.u - h.u).cwiseAbs().maxCoeff() <= 4 * std::numeric_limits<double>::epsilon());
  CHECK((back.theta - h.theta).cwiseAbs().maxCoeff() <= 4 * std::numeric_limits<double>::epsilon());
  CHECK((back.stress - h.stress).cwiseAbs().maxCoeff() <= 4 * std::numeric_limits<double>::epsilon());
  FieldSet wrong = h;
  wrong.u = Eigen::VectorXd::Zero(3);
  CHECK_THROWS_AS(recombine(wrong, lift), DimensionMismatch);
}

}
