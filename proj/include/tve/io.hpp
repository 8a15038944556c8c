#pragma once

#include "tve/diagnostics.hpp"

#include <cstdint>
#include <filesystem>
#include <string>

namespace tve {

/// Library version string.
const char* version();

/// FNV-1a 64-bit.
std::uint64_t fnv1a(const std::string& bytes);

/// "# tve <version> config_hash=<16 hex digits>"
std::string provenance_line(std::uint64_t config_hash);

/// Shortest round-trip-safe text: %.17g, with nan/inf spelled out.
std::string format_number(double v);

/// RFC-4180 quoting when the field contains a comma, quote or newline.
std::string csv_field(const std::string& s);

void write_diagnostics_csv(const std::filesystem::path& path, const EnergyReport& report, std::uint64_t config_hash);

/// node id, coordinates, θ and displacement components.
void write_nodal_csv(const std::filesystem::path& path, const AssembledOperators& ops, const FieldSet& fields,
                     std::uint64_t config_hash);

/// Legacy VTK ASCII unstructured grid: point data θ and displacement,
/// cell data (cell-averaged) stress, plastic strain and |Tᵈ|.
void write_vtk(const std::filesystem::path& path, const AssembledOperators& ops, const FieldSet& fields, double t,
               std::uint64_t config_hash);

}  // namespace tve
