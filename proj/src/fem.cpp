#include "tve/fem.hpp"

#include "tve/errors.hpp"

#include <Eigen/Cholesky>

#include <string>

namespace tve {

namespace {

constexpr int kSlot[3][3] = {{0, 3, 4}, {3, 1, 5}, {4, 5, 2}};

// Mandel strain of the shape function N_a moving component c.
Mandel shape_strain(const Eigen::MatrixXd& grad, int a, int c, int dim) {
  Mandel e = Mandel::Zero();
  for (int j = 0; j < dim; ++j) {
    const int s = kSlot[c][j];
    e[s] += (c == j) ? grad(a, j) : 0.5 * kSqrt2 * grad(a, j);
  }
  return e;
}

using Triplets = std::vector<Eigen::Triplet<double>>;

void scatter(Triplets& t, const Eigen::MatrixXd& ke, std::span<const int> nodes, int per_node) {
  const int n = static_cast<int>(nodes.size());
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < per_node; ++i)
      for (int b = 0; b < n; ++b)
        for (int j = 0; j < per_node; ++j) {
          const double v = ke(a * per_node + i, b * per_node + j);
          if (v != 0.0) t.emplace_back(nodes[a] * per_node + i, nodes[b] * per_node + j, v);
        }
}

SparseMatrix from_triplets(std::size_t n, const Triplets& t) {
  SparseMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

}  // namespace

AssembledOperators assemble(const BoxMesh& mesh, const ElasticityTensor& D) {
  AssembledOperators ops{mesh, QuadratureSet(mesh), D, {}, {}, {}, {}, {}, {}, {}, {}, {}};
  const int d = mesh.dim();
  const auto& rule = ops.quad.rule();
  const int nn = rule.nodes;

  ops.active_ = d == 2 ? std::vector<int>{0, 1, 2, 3} : std::vector<int>{0, 1, 2, 3, 4, 5};

  Eigen::MatrixXd ku = Eigen::MatrixXd::Zero(nn * d, nn * d);
  Eigen::MatrixXd mu = Eigen::MatrixXd::Zero(nn * d, nn * d);
  Eigen::MatrixXd kt = Eigen::MatrixXd::Zero(nn, nn);
  Eigen::MatrixXd mt = Eigen::MatrixXd::Zero(nn, nn);
  for (int q = 0; q < rule.points; ++q) {
    const double w = rule.weights[q];
    const auto& g = rule.gradients[q];
    Eigen::MatrixXd B(6, nn * d);
    for (int a = 0; a < nn; ++a)
      for (int c = 0; c < d; ++c) B.col(a * d + c) = shape_strain(g, a, c, d);
    ku += w * B.transpose() * D.mandel() * B;
    const Eigen::VectorXd N = rule.shape.row(q).transpose();
    kt += w * g * g.transpose();
    mt += w * N * N.transpose();
    for (int c = 0; c < d; ++c)
      for (int a = 0; a < nn; ++a)
        for (int b = 0; b < nn; ++b) mu(a * d + c, b * d + c) += w * N[a] * N[b];
  }

  Triplets tku, tmu, tkt, tmt;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto nodes = mesh.cell(c);
    scatter(tku, ku, nodes, d);
    scatter(tmu, mu, nodes, d);
    scatter(tkt, kt, nodes, 1);
    scatter(tmt, mt, nodes, 1);
  }
  ops.stiffness_u = from_triplets(ops.num_dofs(), tku);
  ops.mass_u = from_triplets(ops.num_dofs(), tmu);
  ops.stiffness_theta = from_triplets(mesh.num_nodes(), tkt);
  ops.mass_theta = from_triplets(mesh.num_nodes(), tmt);
  ops.mass_theta_lumped = ops.mass_theta * Eigen::VectorXd::Ones(static_cast<Eigen::Index>(mesh.num_nodes()));

  // Facet mass: tensor product of the 1D linear mass h/6 [[2,1],[1,2]].
  Triplets tb;
  for (const auto& f : mesh.facets()) {
    const int corners = d == 3 ? 4 : 2;
    for (int a = 0; a < corners; ++a)
      for (int b = 0; b < corners; ++b) {
        double v = f.sizes[0] / 6.0 * ((a & 1) == (b & 1) ? 2.0 : 1.0);
        if (d == 3) v *= f.sizes[1] / 6.0 * (((a >> 1) & 1) == ((b >> 1) & 1) ? 2.0 : 1.0);
        tb.emplace_back(f.nodes[a], f.nodes[b], v);
      }
  }
  ops.boundary_mass = from_triplets(mesh.num_nodes(), tb);

  ops.dof_to_free.assign(ops.num_dofs(), -1);
  for (std::size_t n = 0; n < mesh.num_nodes(); ++n) {
    if (mesh.is_boundary(n)) continue;
    for (int c = 0; c < d; ++c) {
      const int dof = static_cast<int>(n) * d + c;
      ops.dof_to_free[dof] = static_cast<int>(ops.free_dofs.size());
      ops.free_dofs.push_back(dof);
    }
  }
  return ops;
}

SparseMatrix restrict(const SparseMatrix& a, const std::vector<int>& rows, const std::vector<int>& cols) {
  std::vector<int> rmap(a.rows(), -1), cmap(a.cols(), -1);
  for (std::size_t i = 0; i < rows.size(); ++i) rmap[rows[i]] = static_cast<int>(i);
  for (std::size_t j = 0; j < cols.size(); ++j) cmap[cols[j]] = static_cast<int>(j);
  Triplets t;
  for (int k = 0; k < a.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) {
      const int r = rmap[it.row()], c = cmap[it.col()];
      if (r >= 0 && c >= 0) t.emplace_back(r, c, it.value());
    }
  SparseMatrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  out.setFromTriplets(t.begin(), t.end());
  out.makeCompressed();
  return out;
}

StrainField strain_of(const AssembledOperators& ops, const Eigen::VectorXd& u) {
  const int d = ops.dim();
  if (u.size() != static_cast<Eigen::Index>(ops.num_dofs()))
    throw DimensionMismatch("strain_of: displacement vector has wrong size");
  const auto& rule = ops.quad.rule();
  StrainField out(6, static_cast<Eigen::Index>(ops.num_qp()));
  for (std::size_t c = 0; c < ops.mesh.num_cells(); ++c) {
    const auto nodes = ops.mesh.cell(c);
    for (int q = 0; q < rule.points; ++q) {
      Eigen::Matrix3d grad = Eigen::Matrix3d::Zero();
      const auto& g = rule.gradients[q];
      for (int a = 0; a < rule.nodes; ++a)
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j) grad(i, j) += u[nodes[a] * d + i] * g(a, j);
      out.col(c * rule.points + q) = sym_grad(grad).mandel();
    }
  }
  return out;
}

Eigen::VectorXd interpolate(const AssembledOperators& ops, const Eigen::VectorXd& nodal) {
  if (nodal.size() != static_cast<Eigen::Index>(ops.num_nodes()))
    throw DimensionMismatch("interpolate: nodal field has wrong size");
  const auto& rule = ops.quad.rule();
  Eigen::VectorXd out(static_cast<Eigen::Index>(ops.num_qp()));
  for (std::size_t c = 0; c < ops.mesh.num_cells(); ++c) {
    const auto nodes = ops.mesh.cell(c);
    for (int q = 0; q < rule.points; ++q) {
      double v = 0.0;
      for (int a = 0; a < rule.nodes; ++a) v += rule.shape(q, a) * nodal[nodes[a]];
      out[c * rule.points + q] = v;
    }
  }
  return out;
}

StrainField interpolate_tensor(const AssembledOperators& ops, const Eigen::MatrixXd& nodal) {
  if (nodal.rows() != 6 || nodal.cols() != static_cast<Eigen::Index>(ops.num_nodes()))
    throw DimensionMismatch("interpolate: tensor nodal field must be 6 x nodes");
  const auto& rule = ops.quad.rule();
  StrainField out = StrainField::Zero(6, static_cast<Eigen::Index>(ops.num_qp()));
  for (std::size_t c = 0; c < ops.mesh.num_cells(); ++c) {
    const auto nodes = ops.mesh.cell(c);
    for (int q = 0; q < rule.points; ++q)
      for (int a = 0; a < rule.nodes; ++a) out.col(c * rule.points + q) += rule.shape(q, a) * nodal.col(nodes[a]);
  }
  return out;
}

double integrate(const AssembledOperators& ops, const Eigen::VectorXd& qvalues) {
  if (qvalues.size() != static_cast<Eigen::Index>(ops.num_qp()))
    throw DimensionMismatch("integrate: wrong number of quadrature values");
  double s = 0.0;
  for (Eigen::Index q = 0; q < qvalues.size(); ++q) s += ops.quad.weight(q) * qvalues[q];
  return s;
}

double inner_D(const AssembledOperators& ops, const StrainField& a, const StrainField& b) {
  if (a.cols() != static_cast<Eigen::Index>(ops.num_qp()) || b.cols() != a.cols())
    throw DimensionMismatch("inner_D: strain fields do not match the quadrature");
  double s = 0.0;
  const auto& D = ops.D.mandel();
  for (Eigen::Index q = 0; q < a.cols(); ++q) s += ops.quad.weight(q) * a.col(q).dot(D * b.col(q));
  return s;
}

StrainField apply_D(const AssembledOperators& ops, const StrainField& f) { return ops.D.mandel() * f; }

SparseMatrix strain_gram(const AssembledOperators& ops) {
  Triplets t;
  const auto& D = ops.D.mandel();
  for (std::size_t q = 0; q < ops.num_qp(); ++q)
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j)
        if (D(i, j) != 0.0) t.emplace_back(6 * q + i, 6 * q + j, ops.quad.weight(q) * D(i, j));
  return from_triplets(6 * ops.num_qp(), t);
}

Eigen::VectorXd load_vector(const AssembledOperators& ops,
                            const std::function<Eigen::Vector3d(const Eigen::Vector3d&)>& force) {
  const int d = ops.dim();
  const auto& rule = ops.quad.rule();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ops.num_dofs()));
  for (std::size_t c = 0; c < ops.mesh.num_cells(); ++c) {
    const auto nodes = ops.mesh.cell(c);
    for (int q = 0; q < rule.points; ++q) {
      const std::size_t gq = c * rule.points + q;
      const Eigen::Vector3d f = force(ops.quad.point(gq));
      for (int a = 0; a < rule.nodes; ++a)
        for (int i = 0; i < d; ++i) out[nodes[a] * d + i] += rule.weights[q] * rule.shape(q, a) * f[i];
    }
  }
  return out;
}

Eigen::VectorXd boundary_load(const AssembledOperators& ops, const std::function<double(const Eigen::Vector3d&)>& flux) {
  Eigen::VectorXd g(static_cast<Eigen::Index>(ops.num_nodes()));
  for (std::size_t n = 0; n < ops.num_nodes(); ++n) g[n] = ops.mesh.is_boundary(n) ? flux(ops.mesh.node(n)) : 0.0;
  return ops.boundary_mass * g;
}

Eigen::VectorXd flatten(const StrainField& f) { return Eigen::Map<const Eigen::VectorXd>(f.data(), f.size()); }

StrainField unflatten(const Eigen::VectorXd& v) {
  if (v.size() % 6 != 0) throw DimensionMismatch("unflatten: size is not a multiple of 6");
  return Eigen::Map<const StrainField>(v.data(), 6, v.size() / 6);
}

Eigen::VectorXd project_field(const Eigen::VectorXd& field, const Eigen::MatrixXd& span, const SparseMatrix& gram) {
  if (field.size() != span.rows() || gram.rows() != field.size() || gram.cols() != field.size())
    throw DimensionMismatch("project_field: field, span and Gram sizes differ");
  const Eigen::MatrixXd gs = gram * span;
  const Eigen::MatrixXd normal = span.transpose() * gs;
  return normal.ldlt().solve(gs.transpose() * field);
}

Eigen::VectorXd project_field(const Eigen::VectorXd& field, const Eigen::MatrixXd& span,
                              const Eigen::VectorXd& diagonal_gram) {
  if (field.size() != span.rows() || diagonal_gram.size() != field.size())
    throw DimensionMismatch("project_field: field, span and Gram sizes differ");
  const Eigen::MatrixXd gs = diagonal_gram.asDiagonal() * span;
  const Eigen::MatrixXd normal = span.transpose() * gs;
  return normal.ldlt().solve(gs.transpose() * field);
}

}  // namespace tve
