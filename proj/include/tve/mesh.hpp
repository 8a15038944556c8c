#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace tve {

struct MeshConfig {
  int dim = 2;
  std::array<double, 3> extents{1.0, 1.0, 1.0};
  std::array<int, 3> cells{1, 1, 1};
};

/// Axis-aligned box [0,L1]x[0,L2](x[0,L3]) split into uniform quad/hex
/// cells. Nodes are numbered lexicographically with x fastest; the local
/// node a of a cell has offsets (a&1, (a>>1)&1, (a>>2)&1).
class BoxMesh {
public:
  /// Throws BadConfig on dim ∉ {2,3}, non-positive extents or zero cells.
  static BoxMesh build(const MeshConfig& cfg);

  int dim() const { return dim_; }
  const MeshConfig& config() const { return cfg_; }
  std::size_t num_nodes() const { return coords_.size(); }
  std::size_t num_cells() const { return cell_nodes_.size() / nodes_per_cell(); }
  int nodes_per_cell() const { return 1 << dim_; }

  const Eigen::Vector3d& node(std::size_t i) const { return coords_[i]; }
  std::span<const int> cell(std::size_t c) const {
    return {cell_nodes_.data() + c * nodes_per_cell(), static_cast<std::size_t>(nodes_per_cell())};
  }
  /// Lower corner of a cell.
  Eigen::Vector3d cell_origin(std::size_t c) const { return coords_[cell(c)[0]]; }
  const std::array<double, 3>& cell_size() const { return h_; }
  std::array<int, 3> node_counts() const;

  /// Nodes on face f = 2*axis + side (side 0: coordinate 0, side 1: extent).
  const std::vector<int>& face_nodes(int f) const { return face_nodes_[f]; }
  int num_faces() const { return 2 * dim_; }
  bool is_boundary(std::size_t node) const { return boundary_[node] != 0; }
  const std::vector<int>& boundary_nodes() const { return boundary_list_; }

  /// Boundary facets (edges in 2D, quads in 3D) with their nodes in
  /// tensor-product order and the tangential cell sizes.
  struct Facet {
    std::array<int, 4> nodes{};
    std::array<double, 2> sizes{};
    int face = 0;
  };
  const std::vector<Facet>& facets() const { return facets_; }

  double volume() const;
  double boundary_measure() const;

  /// FNV-1a hash of the defining parameters; identical configs hash equal.
  std::uint64_t hash() const;

private:
  int dim_ = 2;
  MeshConfig cfg_;
  std::array<double, 3> h_{1.0, 1.0, 1.0};
  std::vector<Eigen::Vector3d> coords_;
  std::vector<int> cell_nodes_;
  std::vector<std::vector<int>> face_nodes_;
  std::vector<char> boundary_;
  std::vector<int> boundary_list_;
  std::vector<Facet> facets_;
};

/// Tensor-product 2-point Gauss rule on one cell with Q1 shape data. All
/// cells of a BoxMesh share the same rule; only the physical points shift.
struct CellQuadrature {
  int points = 0;
  int nodes = 0;
  std::vector<double> weights;             // includes the Jacobian
  Eigen::MatrixXd shape;                   // points x nodes
  std::vector<Eigen::MatrixXd> gradients;  // per point: nodes x dim
  std::vector<Eigen::Vector3d> offsets;    // point position relative to the cell origin

  static CellQuadrature for_mesh(const BoxMesh& mesh);
};

/// Quadrature points of the whole mesh, indexed q = cell*points + local.
class QuadratureSet {
public:
  explicit QuadratureSet(const BoxMesh& mesh);

  std::size_t size() const { return points_.size(); }
  const CellQuadrature& rule() const { return rule_; }
  double weight(std::size_t q) const { return rule_.weights[q % rule_.points]; }
  const Eigen::Vector3d& point(std::size_t q) const { return points_[q]; }

private:
  CellQuadrature rule_;
  std::vector<Eigen::Vector3d> points_;
};

}  // namespace tve
