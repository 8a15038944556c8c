#pragma once

#include "tve/eigensolver.hpp"
#include "tve/fem.hpp"

#include <cstdint>
#include <filesystem>
#include <string>

namespace tve {

/// Discrete Galerkin families:
///  - displacement modes w_n: K_D w = λ M_u w on the Dirichlet subspace,
///    L²-orthonormal, so (ε(w_i), ε(w_j))_D = λ_i δ_ij;
///  - temperature modes v_m: K_θ v = μ M_L v (lumped mass), v_1 constant;
///  - complement strain modes ζ_m: nodal Q1 tensor fields, (·,·)_D-orthogonal
///    to every ε(w_n), orthonormal in (·,·)_D and ordered by the surrogate
///    quotient ⟨ζ,ζ⟩_s / (ζ,ζ)_D >= 1.
///
/// Quadrature caches are flattened strain fields (row 6q + slot), one column
/// per mode.
struct GalerkinBasis {
  int k = 0;
  int l = 0;
  std::uint64_t mesh_hash = 0;
  double surrogate_length = 1.0;

  Eigen::VectorXd disp_values;
  Eigen::MatrixXd disp_modes;  // num_dofs x k
  Eigen::VectorXd temp_values;
  Eigen::MatrixXd temp_modes;  // nodes x l
  Eigen::VectorXd comp_values;
  Eigen::MatrixXd comp_modes;  // (nodes * active comps) x l

  Eigen::MatrixXd disp_strain;  // ε(w_n)
  Eigen::MatrixXd disp_stress;  // Dε(w_n)
  Eigen::MatrixXd comp_strain;  // ζ_m
  Eigen::MatrixXd comp_stress;  // Dζ_m
  Eigen::MatrixXd temp_qp;      // v_m at quadrature points (nq x l)
};

struct DisplacementModes {
  Eigen::VectorXd values;
  Eigen::MatrixXd modes;  // full DOF vectors
};

struct TemperatureModes {
  Eigen::VectorXd values;
  Eigen::MatrixXd modes;
};

struct ComplementModes {
  Eigen::VectorXd values;
  Eigen::MatrixXd modes;  // coefficients in the nodal tensor space
};

/// Nodal Q1 tensor-field space the complement modes live in. Index
/// node * active.size() + a holds Mandel slot active[a].
struct TensorSpace {
  SparseMatrix gram;       // (·,·)_D
  SparseMatrix surrogate;  // (·,·)_D + ℓ²(∇·,∇·)_D
  SparseMatrix deviatoric; // ∫ ξᵈ:ηᵈ
  std::vector<int> active;
  std::size_t size() const { return static_cast<std::size_t>(gram.rows()); }
};

TensorSpace tensor_space(const AssembledOperators& ops, double surrogate_length);

/// Flattened quadrature field of a tensor-space coefficient vector.
Eigen::VectorXd tensor_space_field(const AssembledOperators& ops, const Eigen::VectorXd& coeffs);

/// Rows (ε(w_n), ψ_j)_D for every tensor-space basis function ψ_j.
Eigen::MatrixXd complement_constraints(const AssembledOperators& ops, const Eigen::MatrixXd& disp_strain_stress);

DisplacementModes displacement_eigenbasis(const AssembledOperators& ops, int k);
TemperatureModes temperature_eigenbasis(const AssembledOperators& ops, int l);

/// Throws EmptyComplement when the displacement modes exhaust the tensor
/// space and PreconditionError when l exceeds the complement dimension.
ComplementModes complement_strain_basis(const AssembledOperators& ops, const DisplacementModes& disp, int l,
                                        double surrogate_length = 1.0);

GalerkinBasis build_basis(const AssembledOperators& ops, int k, int l, double surrogate_length = 1.0);

/// (field, ζ_i)_D for a flattened quadrature strain field.
Eigen::VectorXd project_complement(const AssembledOperators& ops, const GalerkinBasis& basis,
                                   const Eigen::VectorXd& field);

struct ProjectionNormReport {
  std::size_t samples = 0;
  double max_ratio = 0.0;  // max ‖Pφ‖_s / ‖φ‖_s
  bool passed = false;
};

/// Draws random φ from the discrete complement and checks
/// ‖Pφ‖_s <= ‖φ‖_s (1 + 1e-10).
ProjectionNormReport projection_norm_check(const AssembledOperators& ops, const GalerkinBasis& basis,
                                           std::size_t samples = 1000, std::uint64_t seed = 7);

/// Flat CSV artifact; the header records the mesh hash, k, l and the sign
/// convention. load_basis rejects artifacts built on another mesh.
void save_basis(const GalerkinBasis& basis, const std::filesystem::path& path, const std::string& provenance = {});
GalerkinBasis load_basis(const AssembledOperators& ops, const std::filesystem::path& path);

/// Fill the quadrature caches from the mode coefficients.
void attach_quadrature(const AssembledOperators& ops, GalerkinBasis& basis);

}  // namespace tve
