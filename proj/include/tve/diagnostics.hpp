#pragma once

#include "tve/evolution.hpp"

#include <limits>
#include <string>
#include <vector>

namespace tve {

/// ½ ∫ D(ε(u) − ε^p):(ε(u) − ε^p).
double potential_energy(const AssembledOperators& ops, const FieldSet& f);
/// ∫ θ with the lumped mass.
double thermal_energy(const AssembledOperators& ops, const FieldSet& f);
/// Thermal plus potential energy.
double total_energy(const AssembledOperators& ops, const FieldSet& f);

/// Σ m_i ln θ_i (lumped). Empty when some nodal θ is not positive.
std::optional<double> entropy(const AssembledOperators& ops, const Eigen::VectorXd& theta_nodal);

/// One row per recorded time.
struct DiagnosticRow {
  std::size_t step = 0;
  double t = 0.0;
  double dt = 0.0;
  double potential = 0.0;       // physical fields
  double thermal = 0.0;
  double total = 0.0;
  double min_theta = 0.0;
  double entropy = std::numeric_limits<double>::quiet_NaN();  // NaN when undefined
  double dissipation = 0.0;     // ∫ T̂ᵈ:G at the implicit state
  double energy_defect = 0.0;   // E^{n+1} − E^n + Δt ∫G:Tᵈ (homogeneous energy)
  double equilibrium = 0.0;     // max_n |∫ T_{k,l}:ε(w_n)|
  double plastic_trace = 0.0;   // max |tr ε^p| over quadrature points
  int iterations = 0;
  double residual = 0.0;
  double monitor_lhs = 0.0;     // sup E + (β/2) Σ Δt ‖T̂ᵈ‖_p^p
  double monitor_bound = 0.0;
  double theta_l1_sup = 0.0;    // sup_t ∫|θ̂|
};

/// Time series of a run and the statistics its checks use.
struct EnergyReport {
  std::vector<DiagnosticRow> rows;
  bool isolated = false;
  bool entropy_undefined = false;  // some sample had a nonpositive temperature

  double relative_drift() const;        // max |total − total₀| / max(|total₀|, tiny)
  double max_potential_increase() const;
  double min_dissipation() const;
  double min_temperature() const;
  double min_entropy_increment() const;  // over samples where entropy is defined
  double max_energy_defect() const;
  double max_equilibrium_residual() const;
  bool monitor_ok() const;
};

/// Running a-priori bound mirror: with κ = C·2^{p−2}, ε = (p'β/2)^{1/p'},
///   E(t) + (β/2)∫₀ᵗ‖T̂ᵈ‖_p^p <= E(0) + ∫₀ᵗ κ‖T̃ᵈ‖₁ + κ^p/(p ε^p) ‖T̃ᵈ‖_p^p.
/// Both sides are nondecreasing in time. Inapplicable when β = 0.
class AprioriMonitor {
public:
  AprioriMonitor(const ConstitutiveLaw& law, double e0, double theta_l1);
  void add(double energy, double dt, const StepInfo& info, double theta_l1);

  bool applicable() const { return beta_ > 0.0; }
  double sup_energy() const { return sup_e_; }
  double dissipation_integral() const { return lp_sum_; }
  double lhs() const { return sup_e_ + 0.5 * beta_ * lp_sum_; }
  double bound() const { return bound_; }
  double theta_l1_sup() const { return theta_sup_; }
  /// lhs <= 2·bound + 1e-12 (factor 2 absorbs the discrete time quadrature).
  bool ok() const;

private:
  double beta_, p_, kappa_, young_;
  double sup_e_, lp_sum_ = 0.0, bound_, theta_sup_;
};

/// Sink computing a DiagnosticRow for the initial state and every accepted
/// step from the reconstructed physical fields.
class DiagnosticsRecorder : public Sink {
public:
  DiagnosticsRecorder(const Model& model, const LiftedFields& lift);

  void start(const SimState& s) override;
  void accept(const SimState& before, const SimState& after, const StepInfo& info, std::size_t index) override;

  const EnergyReport& report() const { return report_; }
  const AprioriMonitor& monitor() const { return *monitor_; }

private:
  DiagnosticRow row_for(const SimState& s) const;
  double homogeneous_energy(const SimState& s) const;

  const Model* model_;
  const LiftedFields* lift_;
  EnergyReport report_;
  std::optional<AprioriMonitor> monitor_;
};

/// Column names in CSV order.
const std::vector<std::string>& diagnostic_columns();

}  // namespace tve
