#include "tve/lifting.hpp"

#include "tve/errors.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace tve {

double TimeProfile::at(double t) const {
  switch (kind) {
    case Kind::Constant:
      return value;
    case Kind::Ramp:
      return value * std::min(1.0, std::max(0.0, t / ramp_time));
    case Kind::Sinusoid:
      return value * std::sin(2.0 * std::numbers::pi * frequency * t + phase);
    case Kind::Table: {
      if (table.empty()) return 0.0;
      if (t <= table.front().first) return value * table.front().second;
      if (t >= table.back().first) return value * table.back().second;
      const auto hi = std::upper_bound(table.begin(), table.end(), t,
                                       [](double x, const auto& p) { return x < p.first; });
      const auto lo = hi - 1;
      const double w = (t - lo->first) / (hi->first - lo->first);
      return value * ((1.0 - w) * lo->second + w * hi->second);
    }
  }
  return 0.0;
}

TimeProfile TimeProfile::from_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw BadData("time profile: cannot open " + path.string());
  TimeProfile p;
  p.kind = Kind::Table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double t = 0.0, v = 0.0;
    if (!(ss >> t >> v)) {
      if (first) {
        first = false;
        continue;  // header row
      }
      throw BadData("time profile: malformed row '" + line + "' in " + path.string());
    }
    first = false;
    if (!std::isfinite(t) || !std::isfinite(v)) throw BadData("time profile: non-finite entry in " + path.string());
    if (!p.table.empty() && t <= p.table.back().first)
      throw BadData("time profile: times must be strictly increasing in " + path.string());
    p.table.emplace_back(t, v);
  }
  if (p.table.empty()) throw BadData("time profile: no samples in " + path.string());
  return p;
}

Eigen::VectorXd dirichlet_values(const AssembledOperators& ops, const VectorFn& g) {
  const int d = ops.dim();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ops.num_dofs()));
  if (!g) return out;
  for (int n : ops.mesh.boundary_nodes()) {
    const Eigen::Vector3d v = g(ops.mesh.node(n));
    for (int c = 0; c < d; ++c) out[n * d + c] = v[c];
  }
  return out;
}

ElasticLift solve_elastic_lift(const AssembledOperators& ops, const Eigen::VectorXd& load, const Eigen::VectorXd& boundary) {
  const auto ndof = static_cast<Eigen::Index>(ops.num_dofs());
  if (load.size() != ndof || boundary.size() != ndof) throw DimensionMismatch("solve_elastic_lift: vector sizes");
  if (!load.allFinite() || !boundary.allFinite()) throw BadData("solve_elastic_lift: non-finite data");

  ElasticLift out;
  out.u = Eigen::VectorXd::Zero(ndof);
  for (int n : ops.mesh.boundary_nodes())
    for (int c = 0; c < ops.dim(); ++c) out.u[n * ops.dim() + c] = boundary[n * ops.dim() + c];

  const auto nf = static_cast<Eigen::Index>(ops.free_dofs.size());
  Eigen::VectorXd rhs(nf);
  const Eigen::VectorXd ku = ops.stiffness_u * out.u;
  for (Eigen::Index i = 0; i < nf; ++i) rhs[i] = load[ops.free_dofs[i]] - ku[ops.free_dofs[i]];

  if (nf > 0 && rhs.norm() > 0.0) {
    const SparseMatrix K = restrict(ops.stiffness_u, ops.free_dofs, ops.free_dofs);
    Eigen::SimplicialLDLT<SparseMatrix> solver(K);
    if (solver.info() != Eigen::Success) throw SolverFailure("solve_elastic_lift: factorization failed");
    Eigen::VectorXd x = solver.solve(rhs);
    // One step of iterative refinement keeps the residual well inside the gate.
    x += solver.solve(rhs - K * x);
    out.residual = (K * x - rhs).norm() / rhs.norm();
    if (!(out.residual <= 1e-10)) throw SolverFailure("solve_elastic_lift: residual above 1e-10");
    for (Eigen::Index i = 0; i < nf; ++i) out.u[ops.free_dofs[i]] = x[i];
  }
  out.strain = strain_of(ops, out.u);
  out.stress = apply_D(ops, out.strain);
  return out;
}

std::vector<Eigen::VectorXd> solve_heat_lift(const AssembledOperators& ops,
                                             const std::function<Eigen::VectorXd(double)>& flux_at,
                                             const Eigen::VectorXd& theta0, const std::vector<double>& times) {
  const auto nn = static_cast<Eigen::Index>(ops.num_nodes());
  if (theta0.size() != nn) throw DimensionMismatch("solve_heat_lift: theta0 size");
  if (!theta0.allFinite()) throw BadData("solve_heat_lift: non-finite initial temperature");
  if (times.empty()) throw PreconditionError("solve_heat_lift: empty time grid");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw PreconditionError("solve_heat_lift: time grid must be strictly increasing");

  std::vector<Eigen::VectorXd> out;
  out.reserve(times.size());
  out.push_back(theta0);

  const Eigen::VectorXd& m = ops.mass_theta_lumped;
  double factored_dt = -1.0;
  Eigen::SimplicialLDLT<SparseMatrix> solver;
  SparseMatrix A;
  for (std::size_t n = 1; n < times.size(); ++n) {
    const double dt = times[n] - times[n - 1];
    if (dt != factored_dt) {
      A = ops.stiffness_theta * dt;
      for (Eigen::Index i = 0; i < nn; ++i) A.coeffRef(i, i) += m[i];
      solver.compute(A);
      if (solver.info() != Eigen::Success) throw SolverFailure("solve_heat_lift: factorization failed");
      factored_dt = dt;
    }
    Eigen::VectorXd rhs = m.cwiseProduct(out.back());
    if (flux_at) {
      const Eigen::VectorXd g = flux_at(times[n]);
      if (g.size() != nn || !g.allFinite()) throw BadData("solve_heat_lift: flux must be finite nodal data");
      rhs += dt * (ops.boundary_mass * g);
    }
    Eigen::VectorXd x = solver.solve(rhs);
    x += solver.solve(rhs - A * x);
    const double scale = std::max(rhs.norm(), 1e-300);
    if ((A * x - rhs).norm() > 1e-12 * scale) throw SolverFailure("solve_heat_lift: residual above 1e-12");
    out.push_back(std::move(x));
  }
  return out;
}

LiftedFields LiftedFields::zero(const AssembledOperators& ops) {
  LiftedFields lf;
  lf.times_ = {0.0};
  lf.u_ = {Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ops.num_dofs()))};
  lf.strain_ = {StrainField::Zero(6, static_cast<Eigen::Index>(ops.num_qp()))};
  lf.stress_ = lf.strain_;
  lf.theta0_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ops.num_nodes()));
  lf.theta_ = {lf.theta0_};
  return lf;
}

LiftedFields LiftedFields::build(const AssembledOperators& ops, const LiftData& data, const std::vector<double>& times) {
  if (times.empty()) throw PreconditionError("LiftedFields: empty time grid");
  LiftedFields lf = zero(ops);
  lf.times_ = times;
  lf.mech_zero_ = data.mechanical_zero();
  lf.heat_zero_ = data.thermal_zero();

  if (!lf.mech_zero_) {
    const Eigen::VectorXd f0 = data.force ? load_vector(ops, data.force) : Eigen::VectorXd::Zero(ops.num_dofs());
    const Eigen::VectorXd g0 = dirichlet_values(ops, data.displacement);
    const bool steady = data.force_profile.is_constant() && data.displacement_profile.is_constant();
    lf.u_.clear();
    lf.strain_.clear();
    lf.stress_.clear();
    // The lift is linear in (f, g): scaling by the profiles is exact.
    const ElasticLift unit_f = solve_elastic_lift(ops, f0, Eigen::VectorXd::Zero(f0.size()));
    const ElasticLift unit_g = solve_elastic_lift(ops, Eigen::VectorXd::Zero(f0.size()), g0);
    const std::size_t samples = steady ? 1 : times.size();
    for (std::size_t i = 0; i < samples; ++i) {
      const double a = data.force_profile.at(times[i]);
      const double b = data.displacement_profile.at(times[i]);
      lf.u_.push_back(a * unit_f.u + b * unit_g.u);
      lf.strain_.push_back(a * unit_f.strain + b * unit_g.strain);
      lf.stress_.push_back(a * unit_f.stress + b * unit_g.stress);
    }
  }

  if (!lf.heat_zero_) {
    const auto nn = static_cast<Eigen::Index>(ops.num_nodes());
    lf.theta0_ = data.theta0.size() == nn ? data.theta0 : Eigen::VectorXd::Zero(nn);
    Eigen::VectorXd pattern = Eigen::VectorXd::Zero(nn);
    if (data.flux)
      for (int n : ops.mesh.boundary_nodes()) pattern[n] = data.flux(ops.mesh.node(n));
    const TimeProfile prof = data.flux_profile;
    lf.theta_ = solve_heat_lift(
        ops, [&](double t) -> Eigen::VectorXd { return prof.at(t) * pattern; }, lf.theta0_, times);
  }
  return lf;
}

LiftedFields::Bracket LiftedFields::bracket(double t) const {
  Bracket b;
  if (times_.size() < 2 || t <= times_.front()) return b;
  if (t >= times_.back()) {
    b.lo = b.hi = times_.size() - 1;
    return b;
  }
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  b.hi = static_cast<std::size_t>(it - times_.begin());
  b.lo = b.hi - 1;
  b.w = (t - times_[b.lo]) / (times_[b.hi] - times_[b.lo]);
  return b;
}

template <class T>
T LiftedFields::blend(const std::vector<T>& v, double t) const {
  if (v.size() == 1) return v.front();
  const Bracket b = bracket(t);
  if (b.w == 0.0) return v[b.lo];
  return (1.0 - b.w) * v[b.lo] + b.w * v[b.hi];
}

Eigen::VectorXd LiftedFields::displacement(double t) const { return blend(u_, t); }
StrainField LiftedFields::strain(double t) const { return blend(strain_, t); }
StrainField LiftedFields::stress(double t) const { return blend(stress_, t); }
Eigen::VectorXd LiftedFields::theta(double t) const { return blend(theta_, t); }

namespace {

void check_same(const FieldSet& a, const FieldSet& b) {
  if (a.u.size() != b.u.size() || a.theta.size() != b.theta.size() || a.strain.cols() != b.strain.cols() ||
      a.stress.cols() != b.stress.cols() || a.plastic.cols() != b.plastic.cols())
    throw DimensionMismatch("recombine: homogeneous and lifted fields live on different grids");
}

}  // namespace

FieldSet recombine(const FieldSet& h, const FieldSet& lift) {
  check_same(h, lift);
  return {h.u + lift.u, h.theta + lift.theta, h.strain + lift.strain, h.plastic, h.stress + lift.stress};
}

FieldSet remove_lift(const FieldSet& p, const FieldSet& lift) {
  check_same(p, lift);
  return {p.u - lift.u, p.theta - lift.theta, p.strain - lift.strain, p.plastic, p.stress - lift.stress};
}

FieldSet lift_fields(const LiftedFields& lift, double t) {
  FieldSet f;
  f.u = lift.displacement(t);
  f.theta = lift.theta(t);
  f.strain = lift.strain(t);
  f.stress = lift.stress(t);
  f.plastic = StrainField::Zero(6, f.strain.cols());
  return f;
}

}  // namespace tve
