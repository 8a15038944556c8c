#include "tve/mesh.hpp"

#include "tve/errors.hpp"

#include <cmath>
#include <cstring>
#include <string>

namespace tve {

namespace {

constexpr double kGauss = 0.57735026918962576451;  // 1/√3

void fnv(std::uint64_t& h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
}

}  // namespace

BoxMesh BoxMesh::build(const MeshConfig& cfg) {
  if (cfg.dim != 2 && cfg.dim != 3) throw BadConfig("mesh: dim must be 2 or 3");
  for (int a = 0; a < cfg.dim; ++a) {
    if (!(cfg.extents[a] > 0.0) || !std::isfinite(cfg.extents[a]))
      throw BadConfig("mesh: extent " + std::to_string(a) + " must be positive");
    if (cfg.cells[a] < 1) throw BadConfig("mesh: cells " + std::to_string(a) + " must be >= 1");
  }
  BoxMesh m;
  m.dim_ = cfg.dim;
  m.cfg_ = cfg;
  for (int a = cfg.dim; a < 3; ++a) {
    m.cfg_.cells[a] = 0;
    m.cfg_.extents[a] = 0.0;
  }
  for (int a = 0; a < cfg.dim; ++a) m.h_[a] = cfg.extents[a] / cfg.cells[a];

  const auto n = m.node_counts();
  const std::size_t nn = static_cast<std::size_t>(n[0]) * n[1] * n[2];
  m.coords_.reserve(nn);
  for (int k = 0; k < n[2]; ++k)
    for (int j = 0; j < n[1]; ++j)
      for (int i = 0; i < n[0]; ++i) m.coords_.emplace_back(i * m.h_[0], j * m.h_[1], cfg.dim == 3 ? k * m.h_[2] : 0.0);

  auto id = [&](int i, int j, int k) { return i + n[0] * (j + n[1] * k); };
  const int cz = cfg.dim == 3 ? cfg.cells[2] : 1;
  for (int k = 0; k < cz; ++k)
    for (int j = 0; j < cfg.cells[1]; ++j)
      for (int i = 0; i < cfg.cells[0]; ++i)
        for (int a = 0; a < m.nodes_per_cell(); ++a)
          m.cell_nodes_.push_back(id(i + (a & 1), j + ((a >> 1) & 1), k + ((a >> 2) & 1)));

  m.face_nodes_.assign(2 * cfg.dim, {});
  m.boundary_.assign(nn, 0);
  for (int k = 0; k < n[2]; ++k)
    for (int j = 0; j < n[1]; ++j)
      for (int i = 0; i < n[0]; ++i) {
        const int idx[3] = {i, j, k};
        for (int a = 0; a < cfg.dim; ++a) {
          if (idx[a] == 0) m.face_nodes_[2 * a].push_back(id(i, j, k));
          if (idx[a] == n[a] - 1) m.face_nodes_[2 * a + 1].push_back(id(i, j, k));
          if (idx[a] == 0 || idx[a] == n[a] - 1) m.boundary_[id(i, j, k)] = 1;
        }
      }
  for (std::size_t i = 0; i < nn; ++i)
    if (m.boundary_[i]) m.boundary_list_.push_back(static_cast<int>(i));

  // Facets: for each face, the cells of the remaining axes.
  for (int axis = 0; axis < cfg.dim; ++axis) {
    int t[2] = {-1, -1};
    int nt = 0;
    for (int a = 0; a < cfg.dim; ++a)
      if (a != axis) t[nt++] = a;
    for (int side = 0; side < 2; ++side) {
      const int fixed = side == 0 ? 0 : cfg.cells[axis];
      const int c0 = cfg.cells[t[0]];
      const int c1 = cfg.dim == 3 ? cfg.cells[t[1]] : 1;
      for (int b = 0; b < c1; ++b)
        for (int a = 0; a < c0; ++a) {
          Facet f;
          f.face = 2 * axis + side;
          f.sizes = {m.h_[t[0]], cfg.dim == 3 ? m.h_[t[1]] : 1.0};
          const int corners = cfg.dim == 3 ? 4 : 2;
          for (int c = 0; c < corners; ++c) {
            int idx[3] = {0, 0, 0};
            idx[axis] = fixed;
            idx[t[0]] = a + (c & 1);
            if (cfg.dim == 3) idx[t[1]] = b + ((c >> 1) & 1);
            f.nodes[c] = id(idx[0], idx[1], idx[2]);
          }
          m.facets_.push_back(f);
        }
    }
  }
  return m;
}

std::array<int, 3> BoxMesh::node_counts() const {
  return {cfg_.cells[0] + 1, cfg_.cells[1] + 1, dim_ == 3 ? cfg_.cells[2] + 1 : 1};
}

double BoxMesh::volume() const {
  double v = 1.0;
  for (int a = 0; a < dim_; ++a) v *= cfg_.extents[a];
  return v;
}

double BoxMesh::boundary_measure() const {
  if (dim_ == 2) return 2.0 * (cfg_.extents[0] + cfg_.extents[1]);
  const auto& e = cfg_.extents;
  return 2.0 * (e[0] * e[1] + e[1] * e[2] + e[0] * e[2]);
}

std::uint64_t BoxMesh::hash() const {
  std::uint64_t h = 14695981039346656037ull;
  fnv(h, &dim_, sizeof dim_);
  for (int a = 0; a < dim_; ++a) {
    fnv(h, &cfg_.extents[a], sizeof(double));
    fnv(h, &cfg_.cells[a], sizeof(int));
  }
  return h;
}

CellQuadrature CellQuadrature::for_mesh(const BoxMesh& mesh) {
  const int d = mesh.dim();
  CellQuadrature r;
  r.points = 1 << d;
  r.nodes = 1 << d;
  const auto& h = mesh.cell_size();
  double jac = 1.0;
  for (int a = 0; a < d; ++a) jac *= 0.5 * h[a];
  r.shape.resize(r.points, r.nodes);
  for (int q = 0; q < r.points; ++q) {
    double xi[3] = {0.0, 0.0, 0.0};
    for (int a = 0; a < d; ++a) xi[a] = ((q >> a) & 1) ? kGauss : -kGauss;
    r.weights.push_back(jac);
    Eigen::Vector3d off = Eigen::Vector3d::Zero();
    for (int a = 0; a < d; ++a) off[a] = 0.5 * h[a] * (1.0 + xi[a]);
    r.offsets.push_back(off);
    Eigen::MatrixXd grad(r.nodes, d);
    for (int n = 0; n < r.nodes; ++n) {
      double s[3], ds[3];
      for (int a = 0; a < d; ++a) {
        const double sign = ((n >> a) & 1) ? 1.0 : -1.0;
        s[a] = 0.5 * (1.0 + sign * xi[a]);
        ds[a] = sign / h[a];  // d/dx of 0.5(1±ξ) with dξ/dx = 2/h
      }
      double val = 1.0;
      for (int a = 0; a < d; ++a) val *= s[a];
      r.shape(q, n) = val;
      for (int a = 0; a < d; ++a) {
        double g = ds[a];
        for (int b = 0; b < d; ++b)
          if (b != a) g *= s[b];
        grad(n, a) = g;
      }
    }
    r.gradients.push_back(std::move(grad));
  }
  return r;
}

QuadratureSet::QuadratureSet(const BoxMesh& mesh) : rule_(CellQuadrature::for_mesh(mesh)) {
  points_.reserve(mesh.num_cells() * rule_.points);
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const Eigen::Vector3d o = mesh.cell_origin(c);
    for (int q = 0; q < rule_.points; ++q) points_.push_back(o + rule_.offsets[q]);
  }
}

}  // namespace tve
