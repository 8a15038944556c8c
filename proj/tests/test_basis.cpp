#include "tve/basis.hpp"
#include "tve/errors.hpp"

#include <doctest.h>

#include <filesystem>
#include <numbers>

using namespace tve;

namespace {

AssembledOperators make_ops(int dim, std::array<int, 3> cells, std::array<double, 3> ext = {1.0, 1.0, 1.0}) {
  MeshConfig mc;
  mc.dim = dim;
  mc.cells = cells;
  mc.extents = ext;
  return assemble(BoxMesh::build(mc), ElasticityTensor::isotropic(1.0, 1.0));
}

// (a, b)_D for flattened fields.
double d_inner(const AssembledOperators& ops, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return inner_D(ops, unflatten(a), unflatten(b));
}

}  // namespace

TEST_SUITE("basis") {

TEST_CASE("displacement modes solve the elasticity eigenproblem") {
  const auto ops = make_ops(2, {6, 6, 1});
  const DisplacementModes d = displacement_eigenbasis(ops, 5);
  for (int j = 0; j < 5; ++j) {
    const Eigen::VectorXd w = d.modes.col(j);
    Eigen::VectorXd r = ops.stiffness_u * w - d.values[j] * (ops.mass_u * w);
    for (std::size_t n : ops.mesh.boundary_nodes())
      for (int c = 0; c < 2; ++c) {
        CHECK(w[static_cast<Eigen::Index>(2 * n + c)] == 0.0);
        r[static_cast<Eigen::Index>(2 * n + c)] = 0.0;
      }
    CHECK(r.norm() < 1e-9 * d.values[j]);
    if (j > 0) CHECK(d.values[j] >= d.values[j - 1]);
  }
  CHECK_THROWS_AS(displacement_eigenbasis(ops, 1000), PreconditionError);
}

TEST_CASE("neumann temperature spectrum on a rectangle") {
  // Separation of variables on [0,2]x[0,1]: μ = π²(i²/4 + j²).
  const auto ops = make_ops(2, {40, 20, 1}, {2.0, 1.0, 1.0});
  const TemperatureModes t = temperature_eigenbasis(ops, 4);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  CHECK(std::abs(t.values[0]) < 1e-11);
  CHECK(t.values[1] == doctest::Approx(pi2 / 4.0).epsilon(5e-3));
  CHECK(t.values[2] == doctest::Approx(pi2).epsilon(5e-3));
  CHECK(t.values[3] == doctest::Approx(pi2).epsilon(5e-3));
  const Eigen::VectorXd v1 = t.modes.col(0);
  CHECK(v1.maxCoeff() - v1.minCoeff() < 1e-12);
  CHECK(v1[0] == doctest::Approx(1.0 / std::sqrt(2.0)));
  const Eigen::MatrixXd g = t.modes.transpose() * ops.mass_theta_lumped.asDiagonal() * t.modes;
  CHECK((g - Eigen::MatrixXd::Identity(4, 4)).norm() < 1e-10);
}

TEST_CASE("complement modes are orthogonal to displacement strains") {
  for (int dim : {2, 3}) {
    const auto ops = dim == 2 ? make_ops(2, {6, 5, 1}) : make_ops(3, {3, 3, 3});
    const GalerkinBasis b = build_basis(ops, 5, 6);
    for (int m = 0; m < 6; ++m) {
      for (int n = 0; n < 5; ++n) CHECK(std::abs(d_inner(ops, b.comp_strain.col(m), b.disp_strain.col(n))) < 1e-10);
      for (int j = 0; j < 6; ++j)
        CHECK(d_inner(ops, b.comp_strain.col(m), b.comp_strain.col(j)) == doctest::Approx(m == j ? 1.0 : 0.0));
      CHECK(b.comp_values[m] >= 1.0 - 1e-10);
    }
    // Constant tensors are gradient-free: the surrogate quotient is exactly 1.
    CHECK(b.comp_values[0] == doctest::Approx(1.0));
    for (int n = 0; n < 5; ++n)
      CHECK(d_inner(ops, b.disp_strain.col(n), b.disp_strain.col(n)) == doctest::Approx(b.disp_values[n]));
  }
}

TEST_CASE("first complement mode is a deviatoric constant") {
  const auto ops = make_ops(2, {8, 8, 1});
  const GalerkinBasis b = build_basis(ops, 3, 3);
  const Eigen::VectorXd z = b.comp_strain.col(0);
  const Mandel z0 = z.segment<6>(0);
  double spread = 0.0, trace = 0.0;
  for (Eigen::Index q = 0; q < z.size() / 6; ++q) {
    spread = std::max(spread, (z.segment<6>(6 * q) - z0).norm());
    trace = std::max(trace, std::abs(z[6 * q] + z[6 * q + 1] + z[6 * q + 2]));
  }
  CHECK(spread < 1e-12);
  CHECK(trace < 1e-12);
}

TEST_CASE("complement projection") {
  const auto ops = make_ops(2, {5, 5, 1});
  const GalerkinBasis b = build_basis(ops, 4, 5);
  for (int j = 0; j < 5; ++j) {
    const Eigen::VectorXd c = project_complement(ops, b, b.comp_strain.col(j));
    CHECK((c - Eigen::VectorXd::Unit(5, j)).norm() < 1e-10);
  }
  const ProjectionNormReport r = projection_norm_check(ops, b, 200, 3);
  CHECK(r.passed);
  CHECK(r.samples == 200);
  CHECK(r.max_ratio <= 1.0 + 1e-10);
}

TEST_CASE("sizes out of range") {
  const auto ops = make_ops(2, {2, 2, 1});
  CHECK_THROWS_AS(build_basis(ops, 1, 40), PreconditionError);
  CHECK_THROWS_AS(temperature_eigenbasis(ops, 10), PreconditionError);
  CHECK_THROWS_AS(build_basis(ops, 3, 1), PreconditionError);
}

TEST_CASE("basis artifact round trip") {
  const auto ops = make_ops(2, {5, 4, 1});
  const GalerkinBasis b = build_basis(ops, 4, 3, 0.5);
  const auto path = std::filesystem::temp_directory_path() / "tve_test_basis.csv";
  save_basis(b, path, "unit test");
  const GalerkinBasis r = load_basis(ops, path);
  CHECK(r.k == 4);
  CHECK(r.l == 3);
  CHECK(r.surrogate_length == 0.5);
  CHECK(r.disp_modes == b.disp_modes);
  CHECK(r.temp_values == b.temp_values);
  CHECK(r.comp_modes == b.comp_modes);
  CHECK(r.comp_stress == b.comp_stress);
  const auto other = make_ops(2, {4, 5, 1});
  CHECK_THROWS_AS(load_basis(other, path), BadData);
  std::filesystem::remove(path);
}

}
