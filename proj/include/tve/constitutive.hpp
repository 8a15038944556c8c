#pragma once

#include "tve/errors.hpp"
#include "tve/tensor.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace tve {

/// Power-law creep G = c |Tᵈ|^{p-2} Tᵈ, so that G:Tᵈ = c|Tᵈ|^p.
struct NortonHoff {
  double c = 1.0;
  double p = 2.0;
};

/// Temperature modulation g(θ) of the Mróz law. Below theta_min the profile
/// is extended by the constant g(theta_min).
struct MrozProfile {
  enum class Kind { Constant, Rational, Table };

  Kind kind = Kind::Constant;
  double value = 1.0;                                // Constant
  double a = 0.0, b = 0.0;                           // Rational: a/(1+θ²) + b
  std::vector<std::pair<double, double>> table;      // Table: (θ, g), piecewise linear
  double theta_min = 0.0;

  static MrozProfile constant(double g) {
    MrozProfile m;
    m.value = g;
    return m;
  }
  static MrozProfile rational(double a, double b) {
    MrozProfile m;
    m.kind = Kind::Rational;
    m.a = a;
    m.b = b;
    return m;
  }
  static MrozProfile tabulated(std::vector<std::pair<double, double>> pts);

  double operator()(double theta) const;
  /// Infimum and supremum of g over θ ∈ ℝ.
  std::pair<double, double> range() const;
};

/// G = g(θ) Tᵈ.
struct Mroz {
  MrozProfile g;
};

/// Bodner–Partom with 𝒢(s) = a s^{p-1}, β(θ) ≡ threshold (<= 0),
/// γ(y) ≡ gamma0 and δ(y) = delta0·y. The hardening variable y lives in
/// [y_min, y_max].
struct BodnerPartom {
  double a = 1.0;
  double p = 2.0;
  double threshold = 0.0;
  double gamma0 = 0.0;
  double delta0 = 0.0;
  double A = 0.0;
  double y0 = 1.0;
  double y_min = 0.5;
  double y_max = 2.0;

  double rate_function(double s) const;  // 𝒢
};

/// A monotone constitutive map G(θ, Tᵈ) together with its declared
/// constants: monotone, |G| <= C(1+|Tᵈ|)^{p-1} and
/// G:Tᵈ >= β|Tᵈ|^p.
class ConstitutiveLaw {
public:
  using Variant = std::variant<NortonHoff, Mroz, BodnerPartom>;

  explicit ConstitutiveLaw(NortonHoff law);
  explicit ConstitutiveLaw(Mroz law);
  explicit ConstitutiveLaw(BodnerPartom law);

  DevTensor3 evaluate(double theta, const DevTensor3& td) const;
  /// Hardening-aware evaluation; y is ignored by laws without hardening.
  DevTensor3 evaluate(double theta, const DevTensor3& td, double y) const;

  /// Tᵈ : G(θ, Tᵈ).
  double dissipation_density(double theta, const DevTensor3& td) const;
  double dissipation_density(double theta, const DevTensor3& td, double y) const;

  /// Hot-path variant on Mandel vectors; td must already be deviatoric.
  Mandel rate(double theta, const Mandel& td, double y) const;

  double growth_constant() const { return c_growth_; }
  double coercivity_constant() const { return beta_; }
  double exponent() const { return p_; }

  bool has_hardening() const { return std::holds_alternative<BodnerPartom>(law_); }
  bool is_temperature_dependent() const;
  const Variant& law() const { return law_; }
  std::string name() const;

private:
  Variant law_;
  double c_growth_ = 0.0;
  double beta_ = 0.0;
  double p_ = 2.0;
};

struct CertificationSample {
  double theta = 0.0;
  double y = 1.0;
  SymTensor3 t1;
  SymTensor3 t2;
  double value = 0.0;
};

struct CertificationReport {
  std::string law;
  std::size_t samples = 0;
  double p = 2.0;
  double declared_growth = 0.0;        // C
  double declared_coercivity = 0.0;    // β
  double min_monotonicity = 0.0;       // min (G1-G2):(T1-T2)
  double max_growth_ratio = 0.0;       // max |G|/(1+|T|)^{p-1}
  double min_coercivity_ratio = 0.0;   // min G:T/|T|^p
  double max_trace = 0.0;              // max |tr G|/max(1,|G|)
  bool monotone = false;
  bool growth = false;
  bool coercive = false;
  bool passed = false;
  CertificationSample worst_monotonicity;
  CertificationSample worst_growth;
  CertificationSample worst_coercivity;
};

class CertificationFailure : public Error {
public:
  CertificationFailure(const std::string& what, CertificationReport r) : Error(what), report(std::move(r)) {}

  CertificationReport report;
};

struct CertificationOptions {
  std::size_t sample_count = 10000;
  double radius = 10.0;
  double theta_lo = 0.0;
  double theta_hi = 100.0;
  std::uint64_t seed = 20240601;
};

/// Randomized sweep of monotonicity, growth and coercivity. Returns the report on success
/// and throws CertificationFailure (carrying the report and the violating
/// samples) otherwise.
CertificationReport certify_assumption1(const ConstitutiveLaw& law, const CertificationOptions& opts);

/// Same sweep, never throws on a failed check.
CertificationReport run_certification(const ConstitutiveLaw& law, const CertificationOptions& opts);

struct HardeningState {
  double y = 1.0;
};

enum class ClampPolicy { Clamp, Reject };

/// Explicit Euler step of y_t = γ(y)𝒢(|Tᵈ|/y)|Tᵈ| − Aδ(y).
HardeningState advance_hardening(const BodnerPartom& law, const HardeningState& state, double theta,
                                 const DevTensor3& td, double dt, ClampPolicy policy = ClampPolicy::Clamp);

}  // namespace tve
