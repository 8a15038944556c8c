#include "tve/evolution.hpp"

#include "tve/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace tve {

void EvolutionConfig::validate() const {
  if (k < 1 || l < 1) throw PreconditionError("evolution: k and l must be >= 1");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw PreconditionError("evolution: dt must be > 0");
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) throw PreconditionError("evolution: horizon must be >= 0");
  if (!(truncation() > 0.0)) throw PreconditionError("evolution: truncation level must be > 0");
  if (!(tolerance > 0.0)) throw PreconditionError("evolution: tolerance must be > 0");
  if (max_iterations < 1) throw PreconditionError("evolution: max_iterations must be >= 1");
  if (max_halvings < 0) throw PreconditionError("evolution: max_halvings must be >= 0");
}

Model::Model(const AssembledOperators& ops, const GalerkinBasis& basis, ConstitutiveLaw law)
    : ops_(&ops), basis_(&basis), law_(std::move(law)) {
  const auto nq = static_cast<Eigen::Index>(ops.num_qp());
  if (basis.disp_stress.rows() != 6 * nq || basis.temp_qp.rows() != nq)
    throw DimensionMismatch("Model: basis quadrature caches do not match the operators");
  weights_.resize(nq);
  for (Eigen::Index q = 0; q < nq; ++q) weights_[q] = ops.quad.weight(static_cast<std::size_t>(q));
  Eigen::VectorXd w6(6 * nq);
  for (Eigen::Index q = 0; q < nq; ++q) w6.segment<6>(6 * q).setConstant(weights_[q]);
  w_disp_stress_ = w6.asDiagonal() * basis.disp_stress;
  w_comp_stress_ = w6.asDiagonal() * basis.comp_stress;
  w_temp_ = weights_.asDiagonal() * basis.temp_qp;
}

StrainField deviatoric_field(const StrainField& f) {
  StrainField out = f;
  const Eigen::RowVectorXd mean = f.topRows<3>().colwise().sum() / 3.0;
  for (int i = 0; i < 3; ++i) out.row(i) -= mean;
  return out;
}

namespace {

double theta_weight(TimeScheme s) { return s == TimeScheme::Midpoint ? 0.5 : 1.0; }

void fill_cache(const Model& m, SimState& s) {
  const auto& b = m.basis();
  s.theta_qp = b.temp_qp * s.beta;
  s.stress = -(b.comp_stress * s.delta);
  s.plastic = b.disp_strain * s.gamma + b.comp_strain * s.delta;
}

void require_finite(const SimState& s) {
  if (!s.alpha.allFinite() || !s.beta.allFinite() || !s.gamma.allFinite() || !s.delta.allFinite() ||
      !s.hardening.allFinite())
    throw StateCorrupt(fmt::format("evolution: non-finite coefficients at t={:.17g}", s.t));
}

// Everything the fixed-point map produces at one evaluation state.
struct Evaluation {
  Eigen::VectorXd rates;  // G at quadrature points, flattened
  Eigen::VectorXd source; // truncated, clipped dissipation density
  double energy_rate = 0.0;
  double dissipation = 0.0;
  double max_density = 0.0;
  double stress_lp = 0.0;
};

Evaluation evaluate_state(const Model& m, const Eigen::VectorXd& delta, const Eigen::VectorXd& beta,
                          const Eigen::VectorXd& hardening, const StrainField* lift_stress,
                          const Eigen::VectorXd* lift_theta_qp, double truncation) {
  const auto& b = m.basis();
  const auto& law = m.law();
  const Eigen::VectorXd& w = m.qp_weights();
  const Eigen::Index nq = w.size();
  const double p = law.exponent();

  const Eigen::VectorXd t_hom = -(b.comp_stress * delta);
  const Eigen::VectorXd theta = b.temp_qp * beta;

  Evaluation ev;
  ev.rates.resize(6 * nq);
  ev.source.resize(nq);
  for (Eigen::Index q = 0; q < nq; ++q) {
    Mandel th = t_hom.segment<6>(6 * q);
    Mandel tt = th;
    if (lift_stress) tt += lift_stress->col(q);
    const Mandel td = deviatoric(tt);
    const Mandel hd = deviatoric(th);
    const double th_q = theta[q] + (lift_theta_qp ? (*lift_theta_qp)[q] : 0.0);
    const double y = hardening.size() ? hardening[q] : 1.0;
    const Mandel g = law.rate(th_q, td, y);
    ev.rates.segment<6>(6 * q) = g;
    const double dens = td.dot(g);
    ev.source[q] = std::min(std::max(dens, 0.0), truncation);
    ev.energy_rate += w[q] * g.dot(hd);
    ev.dissipation += w[q] * dens;
    ev.max_density = std::max(ev.max_density, dens);
    ev.stress_lp += w[q] * std::pow(td.norm(), p);
  }
  return ev;
}

}  // namespace

SimState initialize(const Model& m, const Eigen::VectorXd& theta0, const Eigen::VectorXd& plastic0,
                    const EvolutionConfig& cfg) {
  cfg.validate();
  const auto& ops = m.ops();
  const auto& b = m.basis();
  if (cfg.k != b.k || cfg.l != b.l) throw PreconditionError("initialize: config (k, l) differs from the basis");
  if (theta0.size() != static_cast<Eigen::Index>(ops.num_nodes()))
    throw BadData("initialize: initial temperature must be a nodal field");
  if (plastic0.size() != 6 * static_cast<Eigen::Index>(ops.num_qp()))
    throw BadData("initialize: initial plastic strain must be a quadrature field");
  if (!theta0.allFinite() || !plastic0.allFinite()) throw BadData("initialize: non-finite initial data");

  const double L = cfg.truncation();
  const Eigen::VectorXd clipped = theta0.cwiseMax(-L).cwiseMin(L);

  SimState s;
  s.beta = b.temp_modes.transpose() * ops.mass_theta_lumped.cwiseProduct(clipped);
  s.gamma = m.project_disp(plastic0).cwiseQuotient(b.disp_values);
  s.delta = m.project_comp(plastic0);
  s.alpha = s.gamma;
  if (m.law().has_hardening()) {
    const auto& bp = std::get<BodnerPartom>(m.law().law());
    s.hardening = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(ops.num_qp()), bp.y0);
  }
  fill_cache(m, s);
  return s;
}

SimState step(const Model& m, const SimState& s, const LiftedFields& lift, const EvolutionConfig& cfg, double dt,
              StepInfo* info) {
  if (dt <= 0.0) dt = cfg.dt;
  if (!(dt > 0.0)) throw PreconditionError("step: dt must be > 0");
  const auto& ops = m.ops();
  const auto& b = m.basis();
  const int l = b.l;
  const double th = theta_weight(cfg.scheme);
  const double t_star = s.t + th * dt;
  const double L = cfg.truncation();

  StrainField lift_stress;
  Eigen::VectorXd lift_theta;
  if (!lift.mechanical_zero()) lift_stress = lift.stress(t_star);
  if (!lift.thermal_zero()) lift_theta = interpolate(ops, lift.theta(t_star));
  const StrainField* ls = lift.mechanical_zero() ? nullptr : &lift_stress;
  const Eigen::VectorXd* lt = lift.thermal_zero() ? nullptr : &lift_theta;

  const Eigen::VectorXd decay = (1.0 + dt * b.temp_values.array()).matrix();
  Eigen::VectorXd x0(2 * l);
  x0 << s.delta, s.beta;
  Eigen::VectorXd x = x0;

  StepInfo local;
  local.dt = dt;
  double eta = 1.0;
  double prev = std::numeric_limits<double>::infinity();
  Evaluation ev;
  bool converged = false;
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    const Eigen::VectorXd star = (1.0 - th) * x0 + th * x;
    ev = evaluate_state(m, star.head(l), star.tail(l), s.hardening, ls, lt, L);
    Eigen::VectorXd xn(2 * l);
    xn.head(l) = s.delta + dt * m.project_comp(ev.rates);
    xn.tail(l) = (s.beta + dt * m.project_temp(ev.source)).cwiseQuotient(decay);
    if (!xn.allFinite()) {
      local.residual_history.push_back(std::numeric_limits<double>::infinity());
      break;
    }
    const double r = (xn - x).norm();
    local.residual_history.push_back(r);
    local.iterations = it;
    local.residual = r;
    if (r <= cfg.tolerance * std::max(1.0, x.norm())) {
      converged = true;
      break;
    }
    if (r > prev) eta = std::max(0.5 * eta, 1.0 / 1024.0);
    prev = r;
    x += eta * (xn - x);
  }
  if (!converged)
    throw NonlinearSolveFailure(fmt::format("step: fixed point did not converge at t={:.17g}, dt={:.17g}", s.t, dt),
                                local.residual_history);

  SimState out;
  out.t = s.t + dt;
  out.delta = x.head(l);
  out.beta = x.tail(l);
  out.gamma = s.gamma + dt * m.project_disp(ev.rates).cwiseQuotient(b.disp_values);
  out.alpha = out.gamma;
  out.hardening = s.hardening;
  if (m.law().has_hardening()) {
    const auto& bp = std::get<BodnerPartom>(m.law().law());
    const Eigen::VectorXd t_new = -(b.comp_stress * out.delta);
    const Eigen::VectorXd theta_new = b.temp_qp * out.beta;
    StrainField ls_new;
    Eigen::VectorXd lt_new;
    if (!lift.mechanical_zero()) ls_new = lift.stress(out.t);
    if (!lift.thermal_zero()) lt_new = interpolate(ops, lift.theta(out.t));
    for (Eigen::Index q = 0; q < out.hardening.size(); ++q) {
      Mandel tq = t_new.segment<6>(6 * q);
      if (ls_new.size()) tq += ls_new.col(q);
      const double thq = theta_new[q] + (lt_new.size() ? lt_new[q] : 0.0);
      const DevTensor3 td = deviatoric(SymTensor3::from_mandel(tq));
      out.hardening[q] = advance_hardening(bp, {s.hardening[q]}, thq, td, dt, cfg.hardening_policy).y;
    }
  }
  require_finite(out);
  fill_cache(m, out);

  if (info) {
    local.energy_rate = ev.energy_rate;
    local.dissipation = ev.dissipation;
    local.max_dissipation_density = ev.max_density;
    local.source = m.qp_weights().dot(ev.source);
    local.stress_lp = ev.stress_lp;
    if (ls) {
      const StrainField d = deviatoric_field(*ls);
      const double p = m.law().exponent();
      for (Eigen::Index q = 0; q < d.cols(); ++q) {
        const double n = d.col(q).norm();
        local.lift_l1 += m.qp_weights()[q] * n;
        local.lift_lp += m.qp_weights()[q] * std::pow(n, p);
      }
    }
    *info = std::move(local);
  }
  return out;
}

namespace {

// Advance by dt, splitting into halves on nonlinear failure.
void advance(const Model& m, SimState& s, const LiftedFields& lift, const EvolutionConfig& cfg, double dt, int depth,
             const std::vector<Sink*>& sinks, RunSummary& sum) {
  StepInfo info;
  try {
    SimState next = step(m, s, lift, cfg, dt, &info);
    for (Sink* k : sinks) k->accept(s, next, info, sum.steps);
    sum.iterations += info.iterations;
    ++sum.steps;
    s = std::move(next);
  } catch (const NonlinearSolveFailure&) {
    if (depth >= cfg.max_halvings) throw;
    ++sum.halvings;
    advance(m, s, lift, cfg, 0.5 * dt, depth + 1, sinks, sum);
    advance(m, s, lift, cfg, 0.5 * dt, depth + 1, sinks, sum);
  }
}

}  // namespace

RunSummary run(const Model& m, const SimState& initial, const LiftedFields& lift, const EvolutionConfig& cfg,
               const std::vector<Sink*>& sinks) {
  cfg.validate();
  RunSummary sum;
  SimState s = initial;
  for (Sink* k : sinks) k->start(s);
  const auto n = static_cast<long long>(std::llround(cfg.horizon / cfg.dt));
  for (long long i = 0; i < n; ++i) {
    // Step from the nominal grid time so that round-off does not accumulate.
    const double target = initial.t + static_cast<double>(i + 1) * cfg.dt;
    const double dt = target - s.t;
    try {
      advance(m, s, lift, cfg, dt, 0, sinks, sum);
    } catch (const NonlinearSolveFailure& e) {
      throw NonlinearSolveFailure(fmt::format("run: step {} failed after {} halvings: {}", i, cfg.max_halvings, e.what()),
                                  e.residual_history);
    }
    s.t = target;
  }
  for (Sink* k : sinks) k->finish(s);
  sum.final_state = std::move(s);
  return sum;
}

FieldSet reconstruct_homogeneous(const Model& m, const SimState& s) {
  const auto& b = m.basis();
  const auto& ops = m.ops();
  if (s.alpha.size() != b.k || s.gamma.size() != b.k || s.beta.size() != b.l || s.delta.size() != b.l)
    throw DimensionMismatch("reconstruct_fields: coefficient sizes differ from the basis");
  FieldSet f;
  f.u = b.disp_modes * s.alpha;
  f.theta = b.temp_modes * s.beta;
  f.strain = unflatten(b.disp_strain * s.alpha);
  f.plastic = unflatten(b.disp_strain * s.gamma + b.comp_strain * s.delta);
  f.stress = apply_D(ops, f.strain - f.plastic);
  return f;
}

FieldSet reconstruct_fields(const Model& m, const SimState& s, const LiftedFields& lift) {
  return recombine(reconstruct_homogeneous(m, s), lift_fields(lift, s.t));
}

}  // namespace tve
