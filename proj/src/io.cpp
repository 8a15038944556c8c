#include "tve/io.hpp"

#include "tve/errors.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>

#ifndef TVE_VERSION
#define TVE_VERSION "0.0.0"
#endif

namespace tve {

const char* version() { return TVE_VERSION; }

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string provenance_line(std::uint64_t config_hash) {
  return fmt::format("# tve {} config_hash={:016x}", version(), config_hash);
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", v);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw BadData("cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace

void write_diagnostics_csv(const std::filesystem::path& path, const EnergyReport& report, std::uint64_t config_hash) {
  std::ofstream out = open_out(path);
  out << provenance_line(config_hash) << '\n';
  const auto& cols = diagnostic_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& r : report.rows) {
    out << r.step;
    for (double v : {r.t, r.dt, r.potential, r.thermal, r.total, r.min_theta, r.entropy, r.dissipation,
                     r.energy_defect, r.equilibrium, r.plastic_trace})
      out << ',' << format_number(v);
    out << ',' << r.iterations;
    for (double v : {r.residual, r.monitor_lhs, r.monitor_bound, r.theta_l1_sup}) out << ',' << format_number(v);
    out << '\n';
  }
}

void write_nodal_csv(const std::filesystem::path& path, const AssembledOperators& ops, const FieldSet& f,
                     std::uint64_t config_hash) {
  std::ofstream out = open_out(path);
  const int d = ops.dim();
  out << provenance_line(config_hash) << '\n';
  out << "node,x,y,z,theta";
  for (int c = 0; c < d; ++c) out << ",u" << c + 1;
  out << '\n';
  for (std::size_t n = 0; n < ops.num_nodes(); ++n) {
    const auto& x = ops.mesh.node(n);
    out << n << ',' << format_number(x[0]) << ',' << format_number(x[1]) << ',' << format_number(x[2]) << ','
        << format_number(f.theta[n]);
    for (int c = 0; c < d; ++c) out << ',' << format_number(f.u[n * d + c]);
    out << '\n';
  }
}

void write_vtk(const std::filesystem::path& path, const AssembledOperators& ops, const FieldSet& f, double t,
               std::uint64_t config_hash) {
  std::ofstream out = open_out(path);
  const auto& mesh = ops.mesh;
  const int d = ops.dim();
  const std::size_t nn = mesh.num_nodes(), nc = mesh.num_cells();
  const int npc = mesh.nodes_per_cell();
  const int pts = ops.quad.rule().points;

  out << "# vtk DataFile Version 3.0\n";
  out << provenance_line(config_hash).substr(2) << " t=" << format_number(t) << '\n';
  out << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << nn << " double\n";
  for (std::size_t n = 0; n < nn; ++n) {
    const auto& x = mesh.node(n);
    out << format_number(x[0]) << ' ' << format_number(x[1]) << ' ' << format_number(x[2]) << '\n';
  }
  // Lexicographic local numbering -> VTK's counter-clockwise ordering.
  static constexpr int kQuad[4] = {0, 1, 3, 2};
  static constexpr int kHex[8] = {0, 1, 3, 2, 4, 5, 7, 6};
  out << "CELLS " << nc << ' ' << nc * (npc + 1) << '\n';
  for (std::size_t c = 0; c < nc; ++c) {
    const auto nodes = mesh.cell(c);
    out << npc;
    for (int a = 0; a < npc; ++a) out << ' ' << nodes[d == 2 ? kQuad[a] : kHex[a]];
    out << '\n';
  }
  out << "CELL_TYPES " << nc << '\n';
  for (std::size_t c = 0; c < nc; ++c) out << (d == 2 ? 9 : 12) << '\n';

  out << "POINT_DATA " << nn << '\n';
  out << "SCALARS theta double 1\nLOOKUP_TABLE default\n";
  for (std::size_t n = 0; n < nn; ++n) out << format_number(f.theta[n]) << '\n';
  out << "VECTORS displacement double\n";
  for (std::size_t n = 0; n < nn; ++n) {
    for (int c = 0; c < 3; ++c) out << (c ? " " : "") << format_number(c < d ? f.u[n * d + c] : 0.0);
    out << '\n';
  }

  auto cell_mean = [&](const StrainField& s, std::size_t c) {
    Mandel m = Mandel::Zero();
    for (int q = 0; q < pts; ++q) m += s.col(static_cast<Eigen::Index>(c * pts + q));
    return SymTensor3::from_mandel(m / pts);
  };
  auto tensor = [&](const char* name, const StrainField& s) {
    out << "TENSORS " << name << " double\n";
    for (std::size_t c = 0; c < nc; ++c) {
      const SymTensor3 m = cell_mean(s, c);
      for (int i = 0; i < 3; ++i)
        out << format_number(m(i, 0)) << ' ' << format_number(m(i, 1)) << ' ' << format_number(m(i, 2)) << '\n';
    }
  };
  out << "CELL_DATA " << nc << '\n';
  tensor("stress", f.stress);
  tensor("plastic_strain", f.plastic);
  out << "SCALARS deviatoric_stress_norm double 1\nLOOKUP_TABLE default\n";
  for (std::size_t c = 0; c < nc; ++c) out << format_number(deviatoric(cell_mean(f.stress, c)).norm()) << '\n';
}

}  // namespace tve
