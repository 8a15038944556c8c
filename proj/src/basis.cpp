#include "tve/basis.hpp"

#include "tve/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <Eigen/SparseCholesky>
#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace tve {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

SparseMatrix kron(const SparseMatrix& scalar, const Eigen::MatrixXd& block) {
  const Eigen::Index nb = block.rows();
  Triplets t;
  for (int k = 0; k < scalar.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(scalar, k); it; ++it)
      for (Eigen::Index a = 0; a < nb; ++a)
        for (Eigen::Index b = 0; b < nb; ++b)
          if (block(a, b) != 0.0) t.emplace_back(it.row() * nb + a, it.col() * nb + b, it.value() * block(a, b));
  SparseMatrix m(scalar.rows() * nb, scalar.cols() * nb);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

Eigen::MatrixXd active_block(const Mandel66& m, const std::vector<int>& active) {
  const auto na = static_cast<Eigen::Index>(active.size());
  Eigen::MatrixXd r(na, na);
  for (Eigen::Index a = 0; a < na; ++a)
    for (Eigen::Index b = 0; b < na; ++b) r(a, b) = m(active[a], active[b]);
  return r;
}

Mandel66 deviatoric_projector() {
  Mandel trace_dir = Mandel::Zero();
  trace_dir.head<3>().setOnes();
  return Mandel66::Identity() - trace_dir * trace_dir.transpose() / 3.0;
}

// Rotate each cluster of (numerically) equal eigenvalues so that the
// deviatoric form is diagonal inside it, largest deviatoric content first.
void canonicalize_clusters(Eigen::VectorXd& values, Eigen::MatrixXd& modes, const SparseMatrix& dev) {
  const Eigen::Index n = values.size();
  Eigen::Index start = 0;
  while (start < n) {
    Eigen::Index end = start + 1;
    while (end < n && values[end] - values[start] <= 1e-8 * std::max(1.0, std::abs(values[start]))) ++end;
    const Eigen::Index c = end - start;
    if (c > 1) {
      const Eigen::MatrixXd block = modes.middleCols(start, c);
      Eigen::MatrixXd f = block.transpose() * (dev * block);
      f = 0.5 * (f + f.transpose()).eval();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(f);
      const Eigen::MatrixXd rot = es.eigenvectors().rowwise().reverse();
      modes.middleCols(start, c) = block * rot;
    }
    start = end;
  }
}

}  // namespace

TensorSpace tensor_space(const AssembledOperators& ops, double surrogate_length) {
  TensorSpace ts;
  ts.active = ops.active_components();
  const Eigen::MatrixXd d_act = active_block(ops.D.mandel(), ts.active);
  const Eigen::MatrixXd p_act = active_block(deviatoric_projector(), ts.active);
  ts.gram = kron(ops.mass_theta, d_act);
  const SparseMatrix h1 = ops.mass_theta + surrogate_length * surrogate_length * ops.stiffness_theta;
  ts.surrogate = kron(h1, d_act);
  ts.deviatoric = kron(ops.mass_theta, p_act);
  return ts;
}

Eigen::VectorXd tensor_space_field(const AssembledOperators& ops, const Eigen::VectorXd& coeffs) {
  const auto& active = ops.active_components();
  const auto na = static_cast<Eigen::Index>(active.size());
  if (coeffs.size() != static_cast<Eigen::Index>(ops.num_nodes()) * na)
    throw DimensionMismatch("tensor_space_field: coefficient vector has wrong size");
  Eigen::MatrixXd nodal = Eigen::MatrixXd::Zero(6, static_cast<Eigen::Index>(ops.num_nodes()));
  for (Eigen::Index n = 0; n < nodal.cols(); ++n)
    for (Eigen::Index a = 0; a < na; ++a) nodal(active[a], n) = coeffs[n * na + a];
  return flatten(interpolate_tensor(ops, nodal));
}

Eigen::MatrixXd complement_constraints(const AssembledOperators& ops, const Eigen::MatrixXd& disp_stress) {
  const auto& active = ops.active_components();
  const auto na = static_cast<Eigen::Index>(active.size());
  const auto& rule = ops.quad.rule();
  const Eigen::Index k = disp_stress.cols();
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(k, static_cast<Eigen::Index>(ops.num_nodes()) * na);
  for (std::size_t c = 0; c < ops.mesh.num_cells(); ++c) {
    const auto nodes = ops.mesh.cell(c);
    for (int q = 0; q < rule.points; ++q) {
      const std::size_t gq = c * rule.points + q;
      for (int a = 0; a < rule.nodes; ++a) {
        const double wn = rule.weights[q] * rule.shape(q, a);
        for (Eigen::Index s = 0; s < na; ++s)
          R.col(nodes[a] * na + s) += wn * disp_stress.row(6 * gq + active[s]).transpose();
      }
    }
  }
  return R;
}

DisplacementModes displacement_eigenbasis(const AssembledOperators& ops, int k) {
  const auto nfree = static_cast<int>(ops.free_dofs.size());
  if (k < 1 || k > nfree) throw PreconditionError(fmt::format("displacement_eigenbasis: k={} outside [1, {}]", k, nfree));
  const SparseMatrix K = restrict(ops.stiffness_u, ops.free_dofs, ops.free_dofs);
  const SparseMatrix M = restrict(ops.mass_u, ops.free_dofs, ops.free_dofs);
  EigenPairs ep = smallest_eigenpairs(K, M, k);
  DisplacementModes dm;
  dm.values = ep.values;
  dm.modes = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(ops.num_dofs()), k);
  for (int i = 0; i < nfree; ++i) dm.modes.row(ops.free_dofs[i]) = ep.vectors.row(i);
  return dm;
}

TemperatureModes temperature_eigenbasis(const AssembledOperators& ops, int l) {
  const auto nn = static_cast<int>(ops.num_nodes());
  if (l < 1 || l > nn) throw PreconditionError(fmt::format("temperature_eigenbasis: l={} outside [1, {}]", l, nn));
  SparseMatrix M(nn, nn);
  M.reserve(Eigen::VectorXi::Constant(nn, 1));
  for (int i = 0; i < nn; ++i) M.insert(i, i) = ops.mass_theta_lumped[i];
  EigenPairs ep = smallest_eigenpairs(ops.stiffness_theta, M, l);

  // The Neumann kernel is known exactly; replace the first mode by the
  // normalized constant once the solver has confirmed it.
  const Eigen::VectorXd c = Eigen::VectorXd::Constant(nn, 1.0 / std::sqrt(ops.mesh.volume()));
  const double spread = (ep.vectors.col(0) - c).cwiseAbs().maxCoeff() / c[0];
  if (spread > 1e-6) throw SolverFailure("temperature_eigenbasis: first mode is not constant");
  ep.vectors.col(0) = c;
  ep.values[0] = c.dot(ops.stiffness_theta * c);
  for (int j = 1; j < l; ++j) {
    auto v = ep.vectors.col(j);
    v -= c.dot(ops.mass_theta_lumped.cwiseProduct(v)) * c;
  }
  return {ep.values, ep.vectors};
}

ComplementModes complement_strain_basis(const AssembledOperators& ops, const DisplacementModes& disp, int l,
                                        double surrogate_length) {
  if (l < 1) throw PreconditionError("complement_strain_basis: l must be >= 1");
  const TensorSpace ts = tensor_space(ops, surrogate_length);
  const auto n = static_cast<Eigen::Index>(ts.size());

  Eigen::MatrixXd disp_stress(6 * static_cast<Eigen::Index>(ops.num_qp()), disp.modes.cols());
  for (Eigen::Index j = 0; j < disp.modes.cols(); ++j)
    disp_stress.col(j) = flatten(apply_D(ops, strain_of(ops, disp.modes.col(j))));
  const Eigen::MatrixXd R = complement_constraints(ops, disp_stress);

  // Work in coordinates where (·,·)_D is Euclidean: x = L^{-T} y.
  Eigen::LLT<Eigen::MatrixXd> llt{Eigen::MatrixXd(ts.gram)};
  if (llt.info() != Eigen::Success) throw SolverFailure("complement_strain_basis: D-Gram is not SPD");
  const auto L = llt.matrixL();
  Eigen::MatrixXd S = L.solve(Eigen::MatrixXd(ts.surrogate));
  S = L.solve(Eigen::MatrixXd(S.transpose())).transpose().eval();
  const Eigen::MatrixXd Rt = L.solve(R.transpose());  // columns: constraint directions in y

  // Deflation of span{ε(w_n)}: orthonormal basis of the constraint span via
  // pivoted Householder QR; its orthogonal complement spans the search space.
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Rt);
  qr.setThreshold(1e-12);
  const Eigen::Index rank = qr.rank();
  const Eigen::Index m = n - rank;
  if (m < 1) throw EmptyComplement("complement_strain_basis: displacement modes exhaust the strain space");
  if (l > m) throw PreconditionError(fmt::format("complement_strain_basis: l={} exceeds complement dimension {}", l, m));
  const Eigen::MatrixXd Q = qr.householderQ();
  const Eigen::MatrixXd N = Q.rightCols(m);

  Eigen::MatrixXd A = N.transpose() * S * N;
  A = 0.5 * (A + A.transpose()).eval();
  const Eigen::Index want = std::min<Eigen::Index>(m, l + 8);
  EigenPairs ep = smallest_eigenpairs(A, Eigen::MatrixXd::Identity(m, m), want);

  ComplementModes cm;
  cm.values = ep.values;
  cm.modes = L.transpose().solve(N * ep.vectors);
  canonicalize_clusters(cm.values, cm.modes, ts.deviatoric);
  cm.values.conservativeResize(l);
  cm.modes.conservativeResize(Eigen::NoChange, l);
  apply_sign_convention(cm.modes);
  return cm;
}

void attach_quadrature(const AssembledOperators& ops, GalerkinBasis& b) {
  const auto nq6 = 6 * static_cast<Eigen::Index>(ops.num_qp());
  b.disp_strain.resize(nq6, b.k);
  b.disp_stress.resize(nq6, b.k);
  for (int j = 0; j < b.k; ++j) {
    const StrainField e = strain_of(ops, b.disp_modes.col(j));
    b.disp_strain.col(j) = flatten(e);
    b.disp_stress.col(j) = flatten(apply_D(ops, e));
  }
  b.comp_strain.resize(nq6, b.l);
  b.comp_stress.resize(nq6, b.l);
  for (int j = 0; j < b.l; ++j) {
    const Eigen::VectorXd z = tensor_space_field(ops, b.comp_modes.col(j));
    b.comp_strain.col(j) = z;
    b.comp_stress.col(j) = flatten(apply_D(ops, unflatten(z)));
  }
  b.temp_qp.resize(static_cast<Eigen::Index>(ops.num_qp()), b.l);
  for (int j = 0; j < b.l; ++j) b.temp_qp.col(j) = interpolate(ops, b.temp_modes.col(j));
}

GalerkinBasis build_basis(const AssembledOperators& ops, int k, int l, double surrogate_length) {
  GalerkinBasis b;
  b.k = k;
  b.l = l;
  b.mesh_hash = ops.mesh.hash();
  b.surrogate_length = surrogate_length;
  const DisplacementModes dm = displacement_eigenbasis(ops, k);
  const TemperatureModes tm = temperature_eigenbasis(ops, l);
  const ComplementModes cm = complement_strain_basis(ops, dm, l, surrogate_length);
  b.disp_values = dm.values;
  b.disp_modes = dm.modes;
  b.temp_values = tm.values;
  b.temp_modes = tm.modes;
  b.comp_values = cm.values;
  b.comp_modes = cm.modes;
  attach_quadrature(ops, b);
  return b;
}

Eigen::VectorXd project_complement(const AssembledOperators& ops, const GalerkinBasis& basis,
                                   const Eigen::VectorXd& field) {
  if (field.size() != basis.comp_stress.rows()) throw DimensionMismatch("project_complement: field size");
  Eigen::VectorXd out(basis.l);
  const auto& rule = ops.quad.rule();
  for (int m = 0; m < basis.l; ++m) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < field.size(); ++i) s += rule.weights[(i / 6) % rule.points] * field[i] * basis.comp_stress(i, m);
    out[m] = s;
  }
  return out;
}

ProjectionNormReport projection_norm_check(const AssembledOperators& ops, const GalerkinBasis& basis,
                                           std::size_t samples, std::uint64_t seed) {
  const TensorSpace ts = tensor_space(ops, basis.surrogate_length);
  const Eigen::MatrixXd R = complement_constraints(ops, basis.disp_stress);
  Eigen::SimplicialLDLT<SparseMatrix> gram(ts.gram);
  const Eigen::MatrixXd GiRt = gram.solve(Eigen::MatrixXd(R.transpose()));
  const Eigen::LDLT<Eigen::MatrixXd> schur(R * GiRt);
  const Eigen::MatrixXd GZ = ts.gram * basis.comp_modes;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  ProjectionNormReport rep;
  rep.samples = samples;
  for (std::size_t s = 0; s < samples; ++s) {
    Eigen::VectorXd phi(static_cast<Eigen::Index>(ts.size()));
    for (Eigen::Index i = 0; i < phi.size(); ++i) phi[i] = normal(rng);
    if (s % 2 == 1) phi = gram.solve(ts.gram * phi);  // alternate rough and smoother draws
    phi -= GiRt * schur.solve(R * phi);             // D-orthogonal projection onto the complement
    const Eigen::VectorXd coeff = GZ.transpose() * phi;
    const Eigen::VectorXd proj = basis.comp_modes * coeff;
    const double num = std::sqrt(proj.dot(ts.surrogate * proj));
    const double den = std::sqrt(phi.dot(ts.surrogate * phi));
    if (den > 0.0) rep.max_ratio = std::max(rep.max_ratio, num / den);
  }
  rep.passed = rep.max_ratio <= 1.0 + 1e-10;
  return rep;
}

void save_basis(const GalerkinBasis& b, const std::filesystem::path& path, const std::string& provenance) {
  std::ofstream out(path);
  if (!out) throw BadData("save_basis: cannot open " + path.string());
  out << "# tve-basis v1\n";
  if (!provenance.empty()) out << "# " << provenance << "\n";
  out << fmt::format("# mesh_hash={:016x} k={} l={} sign=first-nonzero-positive surrogate_length={:.17g}\n",
                     b.mesh_hash, b.k, b.l, b.surrogate_length);
  out << "family,index,eigenvalue,values\n";
  auto dump = [&](const char* family, const Eigen::VectorXd& values, const Eigen::MatrixXd& modes) {
    for (Eigen::Index j = 0; j < modes.cols(); ++j) {
      out << family << ',' << j + 1 << ',' << fmt::format("{:.17g}", values[j]);
      for (Eigen::Index i = 0; i < modes.rows(); ++i) out << ',' << fmt::format("{:.17g}", modes(i, j));
      out << '\n';
    }
  };
  dump("displacement", b.disp_values, b.disp_modes);
  dump("temperature", b.temp_values, b.temp_modes);
  dump("complement", b.comp_values, b.comp_modes);
}

GalerkinBasis load_basis(const AssembledOperators& ops, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw BadData("load_basis: cannot open " + path.string());
  GalerkinBasis b;
  std::string line;
  bool have_meta = false;
  std::vector<std::vector<double>> rows[3];
  std::vector<double> vals[3];
  while (std::getline(in, line)) {
    if (line.rfind("# mesh_hash=", 0) == 0) {
      unsigned long long h = 0;
      if (std::sscanf(line.c_str(), "# mesh_hash=%llx k=%d l=%d", &h, &b.k, &b.l) != 3)
        throw BadData("load_basis: malformed metadata line");
      b.mesh_hash = h;
      const auto pos = line.find("surrogate_length=");
      if (pos != std::string::npos) b.surrogate_length = std::stod(line.substr(pos + 17));
      have_meta = true;
      continue;
    }
    if (line.empty() || line[0] == '#' || line.rfind("family,", 0) == 0) continue;
    std::stringstream ss(line);
    std::string family, cell;
    std::getline(ss, family, ',');
    const int f = family == "displacement" ? 0 : family == "temperature" ? 1 : family == "complement" ? 2 : -1;
    if (f < 0) throw BadData("load_basis: unknown family " + family);
    std::getline(ss, cell, ',');
    std::getline(ss, cell, ',');
    vals[f].push_back(std::stod(cell));
    std::vector<double> r;
    while (std::getline(ss, cell, ',')) r.push_back(std::stod(cell));
    rows[f].push_back(std::move(r));
  }
  if (!have_meta) throw BadData("load_basis: missing metadata header");
  if (b.mesh_hash != ops.mesh.hash()) throw BadData("load_basis: artifact was built on a different mesh");
  auto to_matrix = [](const std::vector<std::vector<double>>& r, const std::vector<double>& v, Eigen::VectorXd& values,
                      Eigen::MatrixXd& modes) {
    values = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    modes.resize(r.empty() ? 0 : static_cast<Eigen::Index>(r[0].size()), static_cast<Eigen::Index>(r.size()));
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (static_cast<Eigen::Index>(r[j].size()) != modes.rows()) throw BadData("load_basis: ragged rows");
      modes.col(static_cast<Eigen::Index>(j)) = Eigen::Map<const Eigen::VectorXd>(r[j].data(), modes.rows());
    }
  };
  to_matrix(rows[0], vals[0], b.disp_values, b.disp_modes);
  to_matrix(rows[1], vals[1], b.temp_values, b.temp_modes);
  to_matrix(rows[2], vals[2], b.comp_values, b.comp_modes);
  if (b.disp_modes.cols() != b.k || b.temp_modes.cols() != b.l || b.comp_modes.cols() != b.l ||
      b.disp_modes.rows() != static_cast<Eigen::Index>(ops.num_dofs()) ||
      b.temp_modes.rows() != static_cast<Eigen::Index>(ops.num_nodes()))
    throw BadData("load_basis: mode counts or sizes do not match the header");
  attach_quadrature(ops, b);
  return b;
}

}  // namespace tve
