#pragma once

#include <Eigen/Dense>

#include <array>

namespace tve {

/// Mandel 6-vector: (a11, a22, a33, √2·a12, √2·a13, √2·a23). The plain dot
/// product of two such vectors is the double contraction A:B.
using Mandel = Eigen::Matrix<double, 6, 1>;
using Mandel66 = Eigen::Matrix<double, 6, 6>;

inline constexpr double kSqrt2 = 1.41421356237309504880;

/// Symmetric 3x3 tensor (element of S³).
class SymTensor3 {
public:
  SymTensor3() { m_.setZero(); }

  /// Build from the six independent entries.
  SymTensor3(double a11, double a22, double a33, double a12, double a13, double a23);

  static SymTensor3 from_mandel(const Mandel& m);
  static SymTensor3 from_matrix(const Eigen::Matrix3d& m);
  static SymTensor3 identity() { return {1.0, 1.0, 1.0, 0.0, 0.0, 0.0}; }

  double operator()(int i, int j) const;

  const Mandel& mandel() const { return m_; }
  Eigen::Matrix3d matrix() const;

  double trace() const { return m_[0] + m_[1] + m_[2]; }
  double norm() const { return m_.norm(); }
  bool is_finite() const { return m_.allFinite(); }

  SymTensor3& operator+=(const SymTensor3& o) { m_ += o.m_; return *this; }
  SymTensor3& operator-=(const SymTensor3& o) { m_ -= o.m_; return *this; }
  SymTensor3& operator*=(double s) { m_ *= s; return *this; }

  friend SymTensor3 operator+(SymTensor3 a, const SymTensor3& b) { return a += b; }
  friend SymTensor3 operator-(SymTensor3 a, const SymTensor3& b) { return a -= b; }
  friend SymTensor3 operator*(double s, SymTensor3 a) { return a *= s; }
  friend SymTensor3 operator*(SymTensor3 a, double s) { return a *= s; }
  friend bool operator==(const SymTensor3& a, const SymTensor3& b) { return a.m_ == b.m_; }

private:
  Mandel m_;
};

/// Frobenius double contraction A:B.
inline double ddot(const SymTensor3& a, const SymTensor3& b) { return a.mandel().dot(b.mandel()); }

/// A traceless SymTensor3 (element of S³_d). Construction from an arbitrary
/// tensor throws unless |tr| <= 1e-14·max(1,|t|).
class DevTensor3 {
public:
  DevTensor3() = default;
  explicit DevTensor3(const SymTensor3& t);

  /// Projects away the trace instead of checking it.
  static DevTensor3 project(const SymTensor3& t);

  const SymTensor3& tensor() const { return t_; }
  const Mandel& mandel() const { return t_.mandel(); }
  double norm() const { return t_.norm(); }
  double trace() const { return t_.trace(); }

  friend bool operator==(const DevTensor3& a, const DevTensor3& b) { return a.t_ == b.t_; }

private:
  friend DevTensor3 deviatoric(const SymTensor3& t);
  struct Unchecked {};
  DevTensor3(const SymTensor3& t, Unchecked) : t_(t) {}

  SymTensor3 t_;
};

/// Tᵈ = T − ⅓tr(T)I.
DevTensor3 deviatoric(const SymTensor3& t);

/// Deviatoric part of a Mandel vector (the shear entries are untouched).
inline Mandel deviatoric(const Mandel& m) {
  Mandel r = m;
  const double third = (m[0] + m[1] + m[2]) / 3.0;
  r[0] -= third;
  r[1] -= third;
  r[2] -= third;
  return r;
}

/// ε = ½(∇u + ∇ᵀu) from a full 3x3 gradient (row i = ∂u_i/∂x_j).
SymTensor3 sym_grad(const Eigen::Matrix3d& grad);

/// Overload taking the nine gradient entries in row-major order.
SymTensor3 sym_grad(const std::array<double, 9>& grad);

/// Linear elasticity operator D on S³, stored as a symmetric 6x6 Mandel
/// matrix. Minor symmetries are implicit in the storage; major symmetry and
/// positive definiteness are validated on construction.
class ElasticityTensor {
public:
  /// Isotropic: D e = 2μ e + λ tr(e) I. Requires λ >= 0, μ > 0.
  static ElasticityTensor isotropic(double lambda, double mu);

  /// Full anisotropic operator given as a 6x6 Mandel matrix.
  static ElasticityTensor from_mandel(const Mandel66& d);

  /// Same, but in engineering Voigt convention (σ = C γ with γ_ij = 2ε_ij).
  static ElasticityTensor from_voigt(const Mandel66& c);

  SymTensor3 apply(const SymTensor3& e) const { return SymTensor3::from_mandel(d_ * e.mandel()); }
  Mandel apply(const Mandel& e) const { return d_ * e; }

  /// (D a):b.
  double inner(const SymTensor3& a, const SymTensor3& b) const { return a.mandel().dot(d_ * b.mandel()); }

  const Mandel66& mandel() const { return d_; }
  const Mandel66& inverse_mandel() const { return d_inv_; }

  /// Smallest eigenvalue of the Mandel matrix: (Dξ):ξ >= c0 |ξ|².
  double coercivity() const { return c0_; }
  double bound() const { return c1_; }

  bool is_isotropic() const { return isotropic_; }
  double lambda() const { return lambda_; }
  double mu() const { return mu_; }

  /// Component d_ijkl of the four-index tensor.
  double component(int i, int j, int k, int l) const;

private:
  explicit ElasticityTensor(const Mandel66& d);

  Mandel66 d_;
  Mandel66 d_inv_;
  double c0_ = 0.0;
  double c1_ = 0.0;
  bool isotropic_ = false;
  double lambda_ = 0.0;
  double mu_ = 0.0;
};

SymTensor3 apply_D(const ElasticityTensor& d, const SymTensor3& e);
double inner_D(const ElasticityTensor& d, const SymTensor3& a, const SymTensor3& b);

}  // namespace tve
