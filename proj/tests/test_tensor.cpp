#include "tve/errors.hpp"
#include "tve/tensor.hpp"

#include <doctest.h>

#include <cmath>

using namespace tve;

TEST_SUITE("tensor") {

TEST_CASE("mandel storage and double contraction") {
  const SymTensor3 a(1.0, 2.0, 3.0, 0.5, -0.25, 4.0);
  CHECK(a(0, 1) == doctest::Approx(0.5));
  CHECK(a(1, 0) == doctest::Approx(0.5));
  CHECK(a(2, 1) == doctest::Approx(4.0));
  CHECK(a.mandel()[3] == doctest::Approx(0.5 * kSqrt2));

  const SymTensor3 b(-1.0, 0.5, 2.0, 1.0, 3.0, -2.0);
  double by_hand = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) by_hand += a(i, j) * b(i, j);
  CHECK(ddot(a, b) == doctest::Approx(by_hand).epsilon(1e-14));

  const SymTensor3 back = SymTensor3::from_matrix(a.matrix());
  CHECK((back.mandel() - a.mandel()).norm() < 1e-15);
  CHECK(SymTensor3::from_mandel(a.mandel()) == a);
}

TEST_CASE("deviatoric part is traceless and idempotent") {
  const SymTensor3 t(3.0, -1.0, 5.0, 0.2, 0.3, 0.4);
  const DevTensor3 d = deviatoric(t);
  CHECK(std::abs(d.trace()) < 1e-15);
  CHECK((deviatoric(d.tensor()).mandel() - d.mandel()).norm() < 1e-15);
  CHECK(d.tensor()(0, 1) == doctest::Approx(0.2));
  CHECK(d.tensor()(0, 0) == doctest::Approx(3.0 - 7.0 / 3.0));
}

TEST_CASE("checked deviatoric construction rejects a trace") {
  CHECK_THROWS_AS(DevTensor3(SymTensor3::identity()), PreconditionError);
  CHECK_NOTHROW(DevTensor3(SymTensor3(1.0, -1.0, 0.0, 2.0, 0.0, 0.0)));
  CHECK(std::abs(DevTensor3::project(SymTensor3::identity()).norm()) < 1e-15);
}

TEST_CASE("symmetric gradient drops the skew part") {
  Eigen::Matrix3d skew;
  skew << 0, 1, -2, -1, 0, 3, 2, -3, 0;
  CHECK(sym_grad(skew).norm() < 1e-15);
  const std::array<double, 9> g{1, 2, 0, 4, 5, 0, 0, 0, 0};
  const SymTensor3 e = sym_grad(g);
  CHECK(e(0, 1) == doctest::Approx(3.0));
  CHECK(e(1, 1) == doctest::Approx(5.0));
}

TEST_CASE("isotropic elasticity against Hooke's law") {
  const double lambda = 1.7, mu = 0.6;
  const auto D = ElasticityTensor::isotropic(lambda, mu);
  const SymTensor3 e(0.1, -0.2, 0.05, 0.3, 0.0, -0.1);
  const SymTensor3 hooke = 2.0 * mu * e + lambda * e.trace() * SymTensor3::identity();
  CHECK((D.apply(e).mandel() - hooke.mandel()).norm() < 1e-14);
  CHECK(D.component(0, 0, 0, 0) == doctest::Approx(lambda + 2.0 * mu));
  CHECK(D.component(0, 0, 1, 1) == doctest::Approx(lambda));
  CHECK(D.component(0, 1, 0, 1) == doctest::Approx(mu));
  CHECK(D.component(0, 1, 1, 0) == doctest::Approx(mu));
  CHECK(D.coercivity() == doctest::Approx(2.0 * mu));
  CHECK(D.bound() == doctest::Approx(3.0 * lambda + 2.0 * mu));
  CHECK(inner_D(D, e, e) == doctest::Approx(ddot(hooke, e)));
  CHECK(((D.inverse_mandel() * D.mandel()) - Mandel66::Identity()).norm() < 1e-13);
}

TEST_CASE("voigt input reproduces the isotropic operator") {
  const double lambda = 2.0, mu = 0.5;
  Mandel66 c = Mandel66::Zero();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) c(i, j) = lambda + (i == j ? 2.0 * mu : 0.0);
  for (int i = 3; i < 6; ++i) c(i, i) = mu;
  const auto a = ElasticityTensor::from_voigt(c);
  const auto b = ElasticityTensor::isotropic(lambda, mu);
  CHECK((a.mandel() - b.mandel()).norm() < 1e-14);
}

TEST_CASE("invalid elasticity operators are rejected") {
  CHECK_THROWS_AS(ElasticityTensor::isotropic(1.0, 0.0), BadConfig);
  CHECK_THROWS_AS(ElasticityTensor::isotropic(-1.0, 1.0), BadConfig);
  CHECK_THROWS_AS(ElasticityTensor::isotropic(NAN, 1.0), NonFiniteInput);
  Mandel66 asym = Mandel66::Identity();
  asym(0, 1) = 0.5;
  CHECK_THROWS_AS(ElasticityTensor::from_mandel(asym), BadConfig);
  Mandel66 indefinite = Mandel66::Identity();
  indefinite(2, 2) = -1.0;
  CHECK_THROWS_AS(ElasticityTensor::from_mandel(indefinite), BadConfig);
}

}
