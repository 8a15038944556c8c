#pragma once

#include "tve/mesh.hpp"
#include "tve/tensor.hpp"

#include <Eigen/Sparse>

#include <functional>
#include <vector>

namespace tve {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Symmetric tensor field sampled at quadrature points, one Mandel column
/// per point.
using StrainField = Eigen::Matrix<double, 6, Eigen::Dynamic>;

/// Mesh, quadrature, elasticity operator and every assembled bilinear form
/// the Galerkin families are built from. Displacement DOFs are numbered
/// node*dim + component; in 2D the model is plane strain.
struct AssembledOperators {
  BoxMesh mesh;
  QuadratureSet quad;
  ElasticityTensor D;

  SparseMatrix stiffness_u;    // ∫ Dε(w):ε(v)
  SparseMatrix mass_u;         // ∫ w·v
  SparseMatrix stiffness_theta;  // ∫ ∇φ·∇ψ (Neumann)
  SparseMatrix mass_theta;     // consistent ∫ φψ
  Eigen::VectorXd mass_theta_lumped;
  SparseMatrix boundary_mass;  // ∫_∂Ω φψ

  std::vector<int> free_dofs;    // displacement DOFs off the Dirichlet boundary
  std::vector<int> dof_to_free;  // -1 when constrained

  int dim() const { return mesh.dim(); }
  std::size_t num_nodes() const { return mesh.num_nodes(); }
  std::size_t num_dofs() const { return mesh.num_nodes() * mesh.dim(); }
  std::size_t num_qp() const { return quad.size(); }

  /// Mandel slots a strain field can occupy: {11,22,33,12} in plane strain,
  /// all six in 3D.
  const std::vector<int>& active_components() const { return active_; }

  std::vector<int> active_;
};

AssembledOperators assemble(const BoxMesh& mesh, const ElasticityTensor& D);

/// Restriction of a sparse matrix to the given rows/columns.
SparseMatrix restrict(const SparseMatrix& a, const std::vector<int>& rows, const std::vector<int>& cols);

/// ε(u) at every quadrature point for a full displacement DOF vector.
StrainField strain_of(const AssembledOperators& ops, const Eigen::VectorXd& u);

/// Scalar nodal field -> quadrature values.
Eigen::VectorXd interpolate(const AssembledOperators& ops, const Eigen::VectorXd& nodal);

/// Tensor nodal field (6 x nodes, Mandel) -> quadrature values.
StrainField interpolate_tensor(const AssembledOperators& ops, const Eigen::MatrixXd& nodal);

/// Σ_q w_q f_q.
double integrate(const AssembledOperators& ops, const Eigen::VectorXd& qvalues);

/// (a, b)_D = ∫ Da:b.
double inner_D(const AssembledOperators& ops, const StrainField& a, const StrainField& b);

/// D applied pointwise.
StrainField apply_D(const AssembledOperators& ops, const StrainField& f);

/// Block-diagonal Gram matrix of (·,·)_D on flattened strain fields
/// (index 6q + slot).
SparseMatrix strain_gram(const AssembledOperators& ops);

/// ∫ f·φ_i for a body force given pointwise.
Eigen::VectorXd load_vector(const AssembledOperators& ops,
                            const std::function<Eigen::Vector3d(const Eigen::Vector3d&)>& force);

/// ∫_∂Ω g φ_i for a flux given pointwise on the boundary.
Eigen::VectorXd boundary_load(const AssembledOperators& ops,
                              const std::function<double(const Eigen::Vector3d&)>& flux);

/// Flatten a strain field to 6*nq entries (6q + slot).
Eigen::VectorXd flatten(const StrainField& f);
StrainField unflatten(const Eigen::VectorXd& v);

/// Galerkin projection of `field` onto span(columns of `span`) in the
/// inner product given by `gram`: returns c with (f − span·c, s_j) = 0.
/// Throws DimensionMismatch on inconsistent sizes.
Eigen::VectorXd project_field(const Eigen::VectorXd& field, const Eigen::MatrixXd& span, const SparseMatrix& gram);

/// Same with a diagonal Gram matrix (lumped mass).
Eigen::VectorXd project_field(const Eigen::VectorXd& field, const Eigen::MatrixXd& span,
                              const Eigen::VectorXd& diagonal_gram);

}  // namespace tve
