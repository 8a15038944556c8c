#pragma once

#include "tve/fem.hpp"

#include <filesystem>
#include <functional>
#include <utility>
#include <vector>

namespace tve {

/// Scalar amplitude of a data term as a function of time.
struct TimeProfile {
  enum class Kind { Constant, Ramp, Sinusoid, Table };
  Kind kind = Kind::Constant;
  double value = 1.0;      // amplitude
  double ramp_time = 1.0;  // Ramp: value * min(1, t / ramp_time)
  double frequency = 1.0;  // Sinusoid: value * sin(2π f t + phase)
  double phase = 0.0;
  std::vector<std::pair<double, double>> table;  // (t, value), piecewise linear, constant outside

  double at(double t) const;
  bool is_constant() const { return kind == Kind::Constant; }

  /// Two-column CSV (t,value); '#' lines and a non-numeric header row are skipped.
  /// Throws BadData on malformed rows or non-increasing times.
  static TimeProfile from_csv(const std::filesystem::path& path);
};

using VectorFn = std::function<Eigen::Vector3d(const Eigen::Vector3d&)>;
using ScalarFn = std::function<double(const Eigen::Vector3d&)>;

/// Inhomogeneous data of the auxiliary problems: body force f, boundary
/// displacement g, boundary heat flux g_θ, each a spatial pattern times a
/// time profile, plus the initial temperature of the auxiliary heat problem.
struct LiftData {
  VectorFn force;          // empty means zero
  TimeProfile force_profile;
  VectorFn displacement;   // empty means zero
  TimeProfile displacement_profile;
  ScalarFn flux;           // empty means zero
  TimeProfile flux_profile;
  Eigen::VectorXd theta0;  // nodal; empty means zero

  bool mechanical_zero() const { return !force && !displacement; }
  bool thermal_zero() const { return !flux && theta0.size() == 0; }
};

struct ElasticLift {
  Eigen::VectorXd u;   // full DOF vector
  StrainField strain;  // ε(ũ)
  StrainField stress;  // T̃ = Dε(ũ)
  double residual = 0.0;  // ‖K ũ − rhs‖ / ‖rhs‖ on free DOFs
};

/// Nodal interpolation of boundary displacement data (zero on interior DOFs).
Eigen::VectorXd dirichlet_values(const AssembledOperators& ops, const VectorFn& g);

/// −div Dε(ũ) = f, ũ = g on ∂Ω. `load` is the assembled ∫f·φ over all DOFs,
/// `boundary` the full DOF vector whose boundary entries are imposed.
/// Throws SolverFailure if the residual exceeds 1e-10 and BadData on
/// non-finite input.
ElasticLift solve_elastic_lift(const AssembledOperators& ops, const Eigen::VectorXd& load, const Eigen::VectorXd& boundary);

/// Implicit Euler for θ̃_t − Δθ̃ = 0, ∂θ̃/∂n = g_θ with lumped mass:
///   (M_L + Δt K) θ̃^{n+1} = M_L θ̃^n + Δt · B g_θ(t^{n+1}).
/// Returns one nodal vector per grid time (the first is theta0).
/// `flux_at(t)` returns the nodal flux values (only boundary entries matter).
std::vector<Eigen::VectorXd> solve_heat_lift(const AssembledOperators& ops,
                                             const std::function<Eigen::VectorXd(double)>& flux_at,
                                             const Eigen::VectorXd& theta0, const std::vector<double>& times);

/// Lifted fields on a time grid, linearly interpolated in between.
class LiftedFields {
public:
  /// All-zero lift (isolated system).
  static LiftedFields zero(const AssembledOperators& ops);
  static LiftedFields build(const AssembledOperators& ops, const LiftData& data, const std::vector<double>& times);

  bool mechanical_zero() const { return mech_zero_; }
  bool thermal_zero() const { return heat_zero_; }
  const std::vector<double>& times() const { return times_; }

  Eigen::VectorXd displacement(double t) const;
  StrainField strain(double t) const;
  StrainField stress(double t) const;
  Eigen::VectorXd theta(double t) const;  // nodal
  const Eigen::VectorXd& theta0() const { return theta0_; }

private:
  struct Bracket {
    std::size_t lo = 0, hi = 0;
    double w = 0.0;  // weight of hi
  };
  Bracket bracket(double t) const;
  template <class T>
  T blend(const std::vector<T>& v, double t) const;

  std::vector<double> times_;
  bool mech_zero_ = true;
  bool heat_zero_ = true;
  std::vector<Eigen::VectorXd> u_;       // one entry when time-independent
  std::vector<StrainField> strain_;
  std::vector<StrainField> stress_;
  std::vector<Eigen::VectorXd> theta_;   // one per grid time
  Eigen::VectorXd theta0_;
};

/// Fields of either the homogeneous problem or a lift, or their sum.
struct FieldSet {
  Eigen::VectorXd u;       // full DOF vector
  Eigen::VectorXd theta;   // nodal
  StrainField strain;      // ε(u) at quadrature points
  StrainField plastic;     // ε^p
  StrainField stress;      // T
};

/// û = u + ũ, θ̂ = θ + θ̃, T̂ = T + T̃, ε(û) = ε(u) + ε(ũ); ε^p is carried by the
/// homogeneous part alone. Throws DimensionMismatch on size disagreement.
FieldSet recombine(const FieldSet& homogeneous, const FieldSet& lift);
FieldSet remove_lift(const FieldSet& physical, const FieldSet& lift);

/// Lift sampled at time t as a FieldSet (ε^p = 0).
FieldSet lift_fields(const LiftedFields& lift, double t);

}  // namespace tve
