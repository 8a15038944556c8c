#include "tve/tensor.hpp"

#include "tve/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace tve {

namespace {

// Mandel slot for a (i,j) index pair.
constexpr int kSlot[3][3] = {{0, 3, 4}, {3, 1, 5}, {4, 5, 2}};

double slot_weight(int slot) { return slot < 3 ? 1.0 : kSqrt2; }

}  // namespace

SymTensor3::SymTensor3(double a11, double a22, double a33, double a12, double a13, double a23) {
  m_ << a11, a22, a33, kSqrt2 * a12, kSqrt2 * a13, kSqrt2 * a23;
}

SymTensor3 SymTensor3::from_mandel(const Mandel& m) {
  SymTensor3 t;
  t.m_ = m;
  return t;
}

SymTensor3 SymTensor3::from_matrix(const Eigen::Matrix3d& m) {
  return {m(0, 0), m(1, 1), m(2, 2), 0.5 * (m(0, 1) + m(1, 0)), 0.5 * (m(0, 2) + m(2, 0)),
          0.5 * (m(1, 2) + m(2, 1))};
}

double SymTensor3::operator()(int i, int j) const {
  const int s = kSlot[i][j];
  return m_[s] / slot_weight(s);
}

Eigen::Matrix3d SymTensor3::matrix() const {
  Eigen::Matrix3d r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = (*this)(i, j);
  return r;
}

DevTensor3::DevTensor3(const SymTensor3& t) : t_(t) {
  if (std::abs(t.trace()) > 1e-14 * std::max(1.0, t.norm()))
    throw PreconditionError("DevTensor3: trace " + std::to_string(t.trace()) + " is not zero");
}

DevTensor3 DevTensor3::project(const SymTensor3& t) { return deviatoric(t); }

DevTensor3 deviatoric(const SymTensor3& t) {
  return DevTensor3(SymTensor3::from_mandel(deviatoric(t.mandel())), DevTensor3::Unchecked{});
}

SymTensor3 sym_grad(const Eigen::Matrix3d& grad) { return SymTensor3::from_matrix(grad); }

SymTensor3 sym_grad(const std::array<double, 9>& g) {
  return sym_grad(Eigen::Matrix3d{{g[0], g[1], g[2]}, {g[3], g[4], g[5]}, {g[6], g[7], g[8]}});
}

ElasticityTensor::ElasticityTensor(const Mandel66& d) : d_(d) {
  if (!d.allFinite()) throw NonFiniteInput("ElasticityTensor: non-finite entries");
  const double scale = std::max(1.0, d.cwiseAbs().maxCoeff());
  if ((d - d.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw BadConfig("ElasticityTensor: Mandel matrix is not symmetric (major symmetry fails)");
  d_ = 0.5 * (d + d.transpose());
  Eigen::SelfAdjointEigenSolver<Mandel66> eig(d_);
  c0_ = eig.eigenvalues()[0];
  c1_ = eig.eigenvalues()[5];
  if (!(c0_ > 0.0))
    throw BadConfig("ElasticityTensor: not positive definite (smallest eigenvalue " +
                    std::to_string(c0_) + ")");
  d_inv_ = d_.inverse();
}

ElasticityTensor ElasticityTensor::isotropic(double lambda, double mu) {
  if (!std::isfinite(lambda) || !std::isfinite(mu)) throw NonFiniteInput("isotropic: non-finite Lamé parameter");
  if (lambda < 0.0 || mu <= 0.0) throw BadConfig("isotropic: need lambda >= 0 and mu > 0");
  Mandel66 d = Mandel66::Zero();
  d.topLeftCorner<3, 3>().setConstant(lambda);
  d.diagonal().array() += 2.0 * mu;
  ElasticityTensor t(d);
  t.isotropic_ = true;
  t.lambda_ = lambda;
  t.mu_ = mu;
  return t;
}

ElasticityTensor ElasticityTensor::from_mandel(const Mandel66& d) { return ElasticityTensor(d); }

ElasticityTensor ElasticityTensor::from_voigt(const Mandel66& c) {
  // Voigt stiffness maps engineering strain to stress; Mandel needs √2 (resp. 2)
  // on the mixed (resp. shear-shear) blocks.
  Mandel66 d = c;
  d.topRightCorner<3, 3>() *= kSqrt2;
  d.bottomLeftCorner<3, 3>() *= kSqrt2;
  d.bottomRightCorner<3, 3>() *= 2.0;
  return ElasticityTensor(d);
}

double ElasticityTensor::component(int i, int j, int k, int l) const {
  const int a = kSlot[i][j];
  const int b = kSlot[k][l];
  return d_(a, b) / (slot_weight(a) * slot_weight(b));
}

SymTensor3 apply_D(const ElasticityTensor& d, const SymTensor3& e) { return d.apply(e); }

double inner_D(const ElasticityTensor& d, const SymTensor3& a, const SymTensor3& b) { return d.inner(a, b); }

}  // namespace tve
