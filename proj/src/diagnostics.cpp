#include "tve/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace tve {

double potential_energy(const AssembledOperators& ops, const FieldSet& f) {
  const StrainField e = f.strain - f.plastic;
  return 0.5 * inner_D(ops, e, e);
}

double thermal_energy(const AssembledOperators& ops, const FieldSet& f) { return ops.mass_theta_lumped.dot(f.theta); }

double total_energy(const AssembledOperators& ops, const FieldSet& f) {
  return thermal_energy(ops, f) + potential_energy(ops, f);
}

std::optional<double> entropy(const AssembledOperators& ops, const Eigen::VectorXd& theta) {
  if (theta.size() == 0 || !(theta.minCoeff() > 0.0)) return std::nullopt;
  return ops.mass_theta_lumped.dot(theta.array().log().matrix());
}

double EnergyReport::relative_drift() const {
  if (rows.empty()) return 0.0;
  const double e0 = rows.front().total;
  double worst = 0.0;
  for (const auto& r : rows) worst = std::max(worst, std::abs(r.total - e0));
  return worst / std::max(std::abs(e0), 1e-300);
}

double EnergyReport::max_potential_increase() const {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < rows.size(); ++i) worst = std::max(worst, rows[i].potential - rows[i - 1].potential);
  return rows.size() < 2 ? 0.0 : worst;
}

double EnergyReport::min_dissipation() const {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < rows.size(); ++i) m = std::min(m, rows[i].dissipation);
  return rows.size() < 2 ? 0.0 : m;
}

double EnergyReport::min_temperature() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) m = std::min(m, r.min_theta);
  return m;
}

double EnergyReport::min_entropy_increment() const {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (!std::isnan(rows[i].entropy) && !std::isnan(rows[i - 1].entropy))
      m = std::min(m, rows[i].entropy - rows[i - 1].entropy);
  return std::isinf(m) ? 0.0 : m;
}

double EnergyReport::max_energy_defect() const {
  double m = 0.0;
  for (const auto& r : rows) m = std::max(m, std::abs(r.energy_defect));
  return m;
}

double EnergyReport::max_equilibrium_residual() const {
  double m = 0.0;
  for (const auto& r : rows) m = std::max(m, r.equilibrium);
  return m;
}

bool EnergyReport::monitor_ok() const {
  for (const auto& r : rows)
    if (r.monitor_bound > 0.0 && r.monitor_lhs > 2.0 * r.monitor_bound + 1e-12) return false;
  return true;
}

AprioriMonitor::AprioriMonitor(const ConstitutiveLaw& law, double e0, double theta_l1)
    : beta_(law.coercivity_constant()),
      p_(law.exponent()),
      kappa_(law.growth_constant() * std::pow(2.0, law.exponent() - 2.0)),
      young_(0.0),
      sup_e_(e0),
      bound_(e0),
      theta_sup_(theta_l1) {
  if (beta_ > 0.0) {
    const double pc = p_ / (p_ - 1.0);
    const double eps = std::pow(pc * beta_ / 2.0, 1.0 / pc);
    young_ = std::pow(kappa_, p_) / (p_ * std::pow(eps, p_));
  }
}

void AprioriMonitor::add(double energy, double dt, const StepInfo& info, double theta_l1) {
  sup_e_ = std::max(sup_e_, energy);
  lp_sum_ += dt * info.stress_lp;
  bound_ += dt * (kappa_ * info.lift_l1 + young_ * info.lift_lp);
  theta_sup_ = std::max(theta_sup_, theta_l1);
}

bool AprioriMonitor::ok() const { return !applicable() || lhs() <= 2.0 * bound_ + 1e-12; }

DiagnosticsRecorder::DiagnosticsRecorder(const Model& model, const LiftedFields& lift) : model_(&model), lift_(&lift) {
  report_.isolated = lift.mechanical_zero() && lift.thermal_zero();
}

double DiagnosticsRecorder::homogeneous_energy(const SimState& s) const {
  const FieldSet h = reconstruct_homogeneous(*model_, s);
  return potential_energy(model_->ops(), h);
}

DiagnosticRow DiagnosticsRecorder::row_for(const SimState& s) const {
  const auto& ops = model_->ops();
  const FieldSet h = reconstruct_homogeneous(*model_, s);
  const FieldSet f = recombine(h, lift_fields(*lift_, s.t));
  DiagnosticRow r;
  r.t = s.t;
  r.potential = potential_energy(ops, f);
  r.thermal = thermal_energy(ops, f);
  r.total = r.potential + r.thermal;
  r.min_theta = f.theta.minCoeff();
  if (const auto e = entropy(ops, f.theta)) r.entropy = *e;
  const Eigen::VectorXd& w = model_->qp_weights();
  const Eigen::VectorXd t = flatten(h.stress);
  const Eigen::MatrixXd& es = model_->basis().disp_strain;
  Eigen::VectorXd work = Eigen::VectorXd::Zero(es.cols());
  for (Eigen::Index q = 0; q < w.size(); ++q) work += w[q] * es.middleRows<6>(6 * q).transpose() * t.segment<6>(6 * q);
  r.equilibrium = work.cwiseAbs().maxCoeff();
  r.theta_l1_sup = ops.mass_theta_lumped.dot(f.theta.cwiseAbs());  // replaced by the running sup by the caller
  r.plastic_trace = f.plastic.topRows<3>().colwise().sum().cwiseAbs().maxCoeff();
  return r;
}

void DiagnosticsRecorder::start(const SimState& s) {
  DiagnosticRow r = row_for(s);
  monitor_.emplace(model_->law(), homogeneous_energy(s), r.theta_l1_sup);
  r.monitor_lhs = monitor_->lhs();
  r.monitor_bound = monitor_->bound();
  r.theta_l1_sup = monitor_->theta_l1_sup();
  report_.rows.push_back(r);
}

void DiagnosticsRecorder::accept(const SimState& before, const SimState& after, const StepInfo& info,
                                 std::size_t index) {
  DiagnosticRow r = row_for(after);
  r.step = index + 1;
  r.dt = info.dt;
  r.dissipation = info.dissipation;
  r.iterations = info.iterations;
  r.residual = info.residual;
  const double e1 = homogeneous_energy(after);
  const double e0 = homogeneous_energy(before);
  r.energy_defect = e1 - e0 + info.dt * info.energy_rate;
  if (r.min_theta <= 0.0) report_.entropy_undefined = true;
  monitor_->add(e1, info.dt, info, r.theta_l1_sup);
  r.monitor_lhs = monitor_->lhs();
  r.monitor_bound = monitor_->bound();
  r.theta_l1_sup = monitor_->theta_l1_sup();
  report_.rows.push_back(r);
}

const std::vector<std::string>& diagnostic_columns() {
  static const std::vector<std::string> cols{
      "step",        "t",           "dt",          "potential_energy", "thermal_energy", "total_energy",
      "min_theta",   "entropy",     "dissipation", "energy_defect",    "equilibrium_residual",
      "max_plastic_trace", "iterations", "residual", "monitor_lhs", "monitor_bound", "theta_l1_sup"};
  return cols;
}

}  // namespace tve
