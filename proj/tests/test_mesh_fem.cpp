#include "tve/eigensolver.hpp"
#include "tve/errors.hpp"
#include "tve/fem.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace tve;

namespace {

AssembledOperators ops2d(int nx = 3, int ny = 2, double lx = 1.5, double ly = 0.5) {
  MeshConfig mc;
  mc.cells = {nx, ny, 1};
  mc.extents = {lx, ly, 1.0};
  return assemble(BoxMesh::build(mc), ElasticityTensor::isotropic(1.0, 1.0));
}

AssembledOperators ops3d() {
  MeshConfig mc;
  mc.dim = 3;
  mc.cells = {2, 3, 2};
  mc.extents = {1.0, 0.6, 0.4};
  return assemble(BoxMesh::build(mc), ElasticityTensor::isotropic(0.5, 1.0));
}

}  // namespace

TEST_SUITE("mesh_fem") {

TEST_CASE("box mesh topology") {
  MeshConfig mc;
  mc.cells = {3, 2, 1};
  mc.extents = {1.5, 0.5, 1.0};
  const BoxMesh m = BoxMesh::build(mc);
  CHECK(m.num_nodes() == 12);
  CHECK(m.num_cells() == 6);
  CHECK(m.boundary_nodes().size() == 10);
  CHECK(m.volume() == doctest::Approx(0.75));
  CHECK(m.boundary_measure() == doctest::Approx(4.0));
  CHECK(m.node(1).x() == doctest::Approx(0.5));
  CHECK(m.node(4).y() == doctest::Approx(0.25));
  CHECK_FALSE(m.is_boundary(5));
  CHECK(m.hash() == BoxMesh::build(mc).hash());
  mc.cells[0] = 4;
  CHECK(m.hash() != BoxMesh::build(mc).hash());

  MeshConfig bad;
  bad.dim = 4;
  CHECK_THROWS_AS(BoxMesh::build(bad), BadConfig);
  bad.dim = 2;
  bad.cells = {0, 1, 1};
  CHECK_THROWS_AS(BoxMesh::build(bad), BadConfig);
  bad.cells = {1, 1, 1};
  bad.extents = {-1.0, 1.0, 1.0};
  CHECK_THROWS_AS(BoxMesh::build(bad), BadConfig);
}

TEST_CASE("3d box boundary") {
  const auto o = ops3d();
  CHECK(o.num_nodes() == 3 * 4 * 3);
  CHECK(o.mesh.boundary_measure() == doctest::Approx(2.0 * (0.6 + 0.4 + 0.24)));
  CHECK(o.free_dofs.size() == 1 * 2 * 1 * 3);
  CHECK(o.active_components().size() == 6);
  CHECK(o.num_qp() == 12 * 8);
}

TEST_CASE("quadrature integrates bilinear functions exactly") {
  const auto o = ops2d();
  CHECK(o.num_qp() == 24);
  CHECK(integrate(o, Eigen::VectorXd::Ones(24)) == doctest::Approx(0.75));
  Eigen::VectorXd xy(24);
  for (std::size_t q = 0; q < 24; ++q) xy[q] = o.quad.point(q).x() * o.quad.point(q).y();
  // ∫₀^1.5 x dx · ∫₀^0.5 y dy
  CHECK(integrate(o, xy) == doctest::Approx(1.125 * 0.125).epsilon(1e-14));
  CHECK_THROWS_AS(integrate(o, Eigen::VectorXd::Ones(3)), DimensionMismatch);
}

TEST_CASE("assembled forms satisfy their identities") {
  for (const auto& o : {ops2d(), ops3d()}) {
    const auto nn = static_cast<Eigen::Index>(o.num_nodes());
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(nn);
    const double vol = o.mesh.volume();
    CHECK(one.dot(o.mass_theta * one) == doctest::Approx(vol));
    CHECK(o.mass_theta_lumped.sum() == doctest::Approx(vol));
    CHECK((o.stiffness_theta * one).norm() < 1e-13);
    CHECK(one.dot(o.boundary_mass * one) == doctest::Approx(o.mesh.boundary_measure()));
    const SparseMatrix ku = o.stiffness_u, kt = SparseMatrix(o.stiffness_u.transpose());
    CHECK((ku - kt).norm() < 1e-13);
    // ∫ e_x·e_x over Ω
    Eigen::VectorXd ex = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(o.num_dofs()));
    for (Eigen::Index n = 0; n < nn; ++n) ex[n * o.dim()] = 1.0;
    CHECK(ex.dot(o.mass_u * ex) == doctest::Approx(vol));
    // Rigid translation has no strain energy.
    CHECK((o.stiffness_u * ex).norm() < 1e-13);
  }
}

TEST_CASE("linear displacement gives constant strain") {
  const auto o = ops3d();
  Eigen::Matrix3d a;
  a << 0.1, 0.2, -0.1, 0.0, 0.3, 0.05, 0.4, -0.2, 0.15;
  Eigen::VectorXd u(static_cast<Eigen::Index>(o.num_dofs()));
  for (std::size_t n = 0; n < o.num_nodes(); ++n) u.segment<3>(static_cast<Eigen::Index>(3 * n)) = a * o.mesh.node(n);
  const StrainField e = strain_of(o, u);
  const Mandel want = sym_grad(a).mandel();
  for (Eigen::Index q = 0; q < e.cols(); ++q) CHECK((e.col(q) - want).norm() < 1e-13);
  CHECK(inner_D(o, e, e) == doctest::Approx(o.mesh.volume() * want.dot(o.D.apply(want))));
  CHECK_THROWS_AS(strain_of(o, Eigen::VectorXd::Zero(5)), DimensionMismatch);
}

TEST_CASE("plane strain leaves 13 and 23 empty") {
  const auto o = ops2d();
  CHECK(o.active_components() == std::vector<int>{0, 1, 2, 3});
  Eigen::VectorXd u = Eigen::VectorXd::Random(static_cast<Eigen::Index>(o.num_dofs()));
  const StrainField e = strain_of(o, u);
  CHECK(e.row(2).norm() == 0.0);
  CHECK(e.row(4).norm() == 0.0);
  CHECK(e.row(5).norm() == 0.0);
}

TEST_CASE("load vector and interpolation") {
  const auto o = ops2d();
  const Eigen::VectorXd f = load_vector(o, [](const Eigen::Vector3d&) { return Eigen::Vector3d(2.0, -1.0, 0.0); });
  double fx = 0.0, fy = 0.0;
  for (Eigen::Index i = 0; i < f.size(); i += 2) fx += f[i], fy += f[i + 1];
  CHECK(fx == doctest::Approx(1.5));
  CHECK(fy == doctest::Approx(-0.75));
  Eigen::VectorXd x(static_cast<Eigen::Index>(o.num_nodes()));
  for (std::size_t n = 0; n < o.num_nodes(); ++n) x[static_cast<Eigen::Index>(n)] = o.mesh.node(n).x();
  const Eigen::VectorXd xq = interpolate(o, x);
  for (std::size_t q = 0; q < o.num_qp(); ++q) CHECK(xq[static_cast<Eigen::Index>(q)] == doctest::Approx(o.quad.point(q).x()));
  const Eigen::VectorXd g = boundary_load(o, [](const Eigen::Vector3d&) { return 3.0; });
  CHECK(g.sum() == doctest::Approx(12.0));
}

TEST_CASE("galerkin projection recovers coefficients in the span") {
  const auto o = ops2d();
  const auto nn = static_cast<Eigen::Index>(o.num_nodes());
  const Eigen::MatrixXd span = Eigen::MatrixXd::Random(nn, 3);
  const Eigen::Vector3d c(0.5, -2.0, 1.25);
  CHECK((project_field(span * c, span, o.mass_theta) - c).norm() < 1e-12);
  CHECK((project_field(span * c, span, o.mass_theta_lumped) - c).norm() < 1e-12);
  CHECK_THROWS_AS(project_field(Eigen::VectorXd::Zero(2), span, o.mass_theta), DimensionMismatch);
  const StrainField s = StrainField::Random(6, 5);
  CHECK(unflatten(flatten(s)) == s);
}

TEST_CASE("dense generalized eigenpairs") {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(4, 4), B = Eigen::MatrixXd::Zero(4, 4);
  A.diagonal() << 8.0, 2.0, 6.0, 3.0;
  B.diagonal() << 2.0, 1.0, 1.0, 3.0;
  const EigenPairs e = smallest_eigenpairs(A, B, 3);
  CHECK(e.values[0] == doctest::Approx(1.0));
  CHECK(e.values[1] == doctest::Approx(2.0));
  CHECK(e.values[2] == doctest::Approx(4.0));
  CHECK((e.vectors.transpose() * B * e.vectors - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-13);
  CHECK_THROWS_AS(smallest_eigenpairs(A, B, 5), PreconditionError);
  B(0, 0) = -1.0;
  CHECK_THROWS_AS(smallest_eigenpairs(A, B, 2), SolverFailure);
}

TEST_CASE("subspace iteration matches the 1d laplacian spectrum") {
  const int n = 300;
  SparseMatrix A(n, n), B(n, n);
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i < n; ++i) {
    t.emplace_back(i, i, 2.0);
    if (i > 0) t.emplace_back(i, i - 1, -1.0);
    if (i + 1 < n) t.emplace_back(i, i + 1, -1.0);
  }
  A.setFromTriplets(t.begin(), t.end());
  B.setIdentity();
  const EigenPairs it = smallest_eigenpairs_iterative(A, B, 5);
  const EigenPairs dense = smallest_eigenpairs(A, B, 5);
  for (int j = 1; j <= 5; ++j) {
    const double exact = 2.0 - 2.0 * std::cos(j * std::numbers::pi / (n + 1));
    CHECK(it.values[j - 1] == doctest::Approx(exact).epsilon(1e-9));
    CHECK(dense.values[j - 1] == doctest::Approx(exact).epsilon(1e-9));
    CHECK(std::abs(it.vectors.col(j - 1).dot(dense.vectors.col(j - 1))) == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("sign convention") {
  Eigen::MatrixXd v(3, 2);
  v << 1e-12, 0.0, -0.5, 0.0, 0.3, -2.0;
  apply_sign_convention(v);
  CHECK(v(1, 0) == doctest::Approx(0.5));
  CHECK(v(2, 1) == doctest::Approx(2.0));
}

}
