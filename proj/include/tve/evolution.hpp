#pragma once

#include "tve/basis.hpp"
#include "tve/constitutive.hpp"
#include "tve/lifting.hpp"

#include <optional>
#include <vector>

namespace tve {

/// Evaluation point of the nonlinear terms inside a step: θ = 1/2
/// (midpoint) or θ = 1 (implicit Euler). Heat diffusion is always implicit.
enum class TimeScheme { Midpoint, ImplicitEuler };

struct EvolutionConfig {
  int k = 1;
  int l = 1;
  std::optional<double> truncation_level;  // defaults to k
  double dt = 1e-3;
  double horizon = 0.0;
  double tolerance = 1e-12;
  int max_iterations = 200;
  int max_halvings = 6;
  TimeScheme scheme = TimeScheme::Midpoint;
  ClampPolicy hardening_policy = ClampPolicy::Clamp;

  double truncation() const { return truncation_level.value_or(static_cast<double>(k)); }
  /// Throws PreconditionError on k, l < 1, dt <= 0, horizon < 0,
  /// truncation <= 0, tolerance <= 0 or max_iterations < 1.
  void validate() const;
};

/// Coefficients of the Galerkin ansatz plus cached quadrature fields of the
/// homogeneous problem. α = γ at every accepted step.
struct SimState {
  double t = 0.0;
  Eigen::VectorXd alpha;
  Eigen::VectorXd beta;
  Eigen::VectorXd gamma;
  Eigen::VectorXd delta;
  Eigen::VectorXd hardening;  // y per quadrature point; empty without hardening

  Eigen::VectorXd theta_qp;  // θ_{k,l}
  Eigen::VectorXd stress;    // T_{k,l}, flattened
  Eigen::VectorXd plastic;   // ε^p_{k,l}, flattened
};

struct StepInfo {
  double dt = 0.0;
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> residual_history;
  double energy_rate = 0.0;       // ∫ G*:T*ᵈ with the homogeneous stress
  double dissipation = 0.0;       // ∫ T̂*ᵈ:G*
  double source = 0.0;            // ∫ S*, truncated and clipped
  double max_dissipation_density = 0.0;
  double stress_lp = 0.0;         // ‖T̂*ᵈ‖_p^p
  double lift_l1 = 0.0;           // ‖T̃ᵈ(t*)‖_1
  double lift_lp = 0.0;           // ‖T̃ᵈ(t*)‖_p^p
};

/// Operators, basis and law of one discretized problem, with the
/// quadrature-weighted projection matrices the stepper needs.
class Model {
public:
  Model(const AssembledOperators& ops, const GalerkinBasis& basis, ConstitutiveLaw law);

  const AssembledOperators& ops() const { return *ops_; }
  const GalerkinBasis& basis() const { return *basis_; }
  const ConstitutiveLaw& law() const { return law_; }

  /// (f, ε(w_n))_D and (f, ζ_m)_D for a flattened field f.
  Eigen::VectorXd project_disp(const Eigen::VectorXd& f) const { return w_disp_stress_.transpose() * f; }
  Eigen::VectorXd project_comp(const Eigen::VectorXd& f) const { return w_comp_stress_.transpose() * f; }
  /// (s, v_m) for quadrature values s.
  Eigen::VectorXd project_temp(const Eigen::VectorXd& s) const { return w_temp_.transpose() * s; }
  const Eigen::VectorXd& qp_weights() const { return weights_; }

private:
  const AssembledOperators* ops_;
  const GalerkinBasis* basis_;
  ConstitutiveLaw law_;
  Eigen::VectorXd weights_;          // per quadrature point
  Eigen::MatrixXd w_disp_stress_;    // diag(w) Dε(w_n)
  Eigen::MatrixXd w_comp_stress_;    // diag(w) Dζ_m
  Eigen::MatrixXd w_temp_;           // diag(w) v_m
};

/// β from the lumped-L² projection of T_L(θ₀); (γ, δ) from the (·,·)_D
/// projections of ε^p₀; α = γ. theta0 is nodal, plastic0 a flattened
/// quadrature field. Throws BadData on non-finite or mis-sized data.
SimState initialize(const Model& model, const Eigen::VectorXd& theta0, const Eigen::VectorXd& plastic0,
                    const EvolutionConfig& cfg);

/// One step of size dt (cfg.dt when dt <= 0). Throws NonlinearSolveFailure
/// with the residual history if the damped fixed point does not converge,
/// StateCorrupt if the new state is not finite.
SimState step(const Model& model, const SimState& state, const LiftedFields& lift, const EvolutionConfig& cfg,
              double dt = 0.0, StepInfo* info = nullptr);

/// Receives the initial state and every accepted step.
class Sink {
public:
  virtual ~Sink() = default;
  virtual void start(const SimState&) {}
  virtual void accept(const SimState& before, const SimState& after, const StepInfo& info, std::size_t index) = 0;
  virtual void finish(const SimState&) {}
};

struct RunSummary {
  SimState final_state;
  std::size_t steps = 0;     // accepted steps, including halved sub-steps
  std::size_t halvings = 0;
  long long iterations = 0;
};

/// Advances to cfg.horizon in steps of cfg.dt, halving a failed step up to
/// cfg.max_halvings times. Errors are rethrown with the failing time.
RunSummary run(const Model& model, const SimState& initial, const LiftedFields& lift, const EvolutionConfig& cfg,
               const std::vector<Sink*>& sinks = {});

/// Homogeneous fields u_{k,l}, θ_{k,l}, ε(u), ε^p, T = D(ε(u) − ε^p).
FieldSet reconstruct_homogeneous(const Model& model, const SimState& state);

/// Physical fields at state.t: homogeneous fields recombined with the lift.
FieldSet reconstruct_fields(const Model& model, const SimState& state, const LiftedFields& lift);

/// Deviatoric part of every column.
StrainField deviatoric_field(const StrainField& f);

}  // namespace tve
