#pragma once

#include "tve/constitutive.hpp"
#include "tve/evolution.hpp"
#include "tve/lifting.hpp"
#include "tve/mesh.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace tve {

/// Vector-valued spatial pattern times a time profile.
struct VectorSource {
  bool enabled = false;
  enum class Pattern { Uniform, Sine } pattern = Pattern::Uniform;  // Sine: v·Π sin(πx_i/L_i)
  std::array<double, 3> vector{0.0, 0.0, 0.0};
  TimeProfile profile;
};

/// Boundary displacement g(x) = A x + b times a time profile.
struct AffineDisplacement {
  bool enabled = false;
  std::array<std::array<double, 3>, 3> matrix{};
  std::array<double, 3> offset{0.0, 0.0, 0.0};
  TimeProfile profile;
};

struct FluxSource {
  bool enabled = false;
  double value = 0.0;  // uniform flux on the whole boundary
  TimeProfile profile;
};

/// θ₀(x) = value + perturbation·Π cos(πx_i/L_i).
struct ScalarInitial {
  double value = 0.0;
  double perturbation = 0.0;
};

/// ε^p₀(x) = amplitude·s(x)·E with s ≡ 1 (constant) or Π sin(πx_i/L_i).
struct TensorInitial {
  enum class Pattern { Zero, Constant, Sine } pattern = Pattern::Zero;
  double amplitude = 1.0;
  std::array<double, 6> tensor{0, 0, 0, 0, 0, 0};  // a11 a22 a33 a12 a13 a23
};

struct RunConfig {
  MeshConfig mesh;

  // material
  double lambda = 1.0;
  double mu = 1.0;
  std::optional<std::array<std::array<double, 6>, 6>> voigt;  // full Voigt matrix overrides (λ, μ)
  ConstitutiveLaw law{NortonHoff{}};

  // data
  VectorSource body_force;
  AffineDisplacement boundary_displacement;
  FluxSource heat_flux;
  ScalarInitial theta0{1.0, 0.0};
  ScalarInitial theta0_aux{0.0, 0.0};
  TensorInitial plastic0;

  // discretization
  EvolutionConfig evolution;
  double surrogate_length = 1.0;

  // output
  std::filesystem::path output_dir = "tve_out";
  int snapshot_every = 0;  // 0: only the final state
  bool write_vtk = true;

  // certify / converge
  CertificationOptions certification;
  std::vector<std::pair<int, int>> ladder{{4, 4}, {8, 8}, {16, 16}};

  std::uint64_t seed = 20240601;

  nlohmann::json effective;  // every field, defaults filled in
  std::uint64_t hash = 0;    // FNV-1a of effective.dump()
};

/// Reads and validates a JSON config. Throws ParseError on malformed JSON
/// or an unreadable file and ValidationError listing every violation with
/// its field path. CSV profile paths are resolved relative to the file.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = ".");

ElasticityTensor make_elasticity(const RunConfig& cfg);
LiftData make_lift_data(const RunConfig& cfg, const AssembledOperators& ops);
Eigen::VectorXd initial_temperature(const RunConfig& cfg, const AssembledOperators& ops);
Eigen::VectorXd initial_plastic_strain(const RunConfig& cfg, const AssembledOperators& ops);

}  // namespace tve
