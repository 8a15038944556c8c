#include "tve/constitutive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace tve {

MrozProfile MrozProfile::tabulated(std::vector<std::pair<double, double>> pts) {
  if (pts.empty()) throw BadConfig("Mroz table: needs at least one point");
  std::sort(pts.begin(), pts.end());
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (pts[i].first == pts[i - 1].first) throw BadConfig("Mroz table: duplicate temperature");
  MrozProfile m;
  m.kind = Kind::Table;
  m.table = std::move(pts);
  return m;
}

double MrozProfile::operator()(double theta) const {
  const double t = std::max(theta, theta_min);
  switch (kind) {
    case Kind::Constant:
      return value;
    case Kind::Rational:
      return a / (1.0 + t * t) + b;
    case Kind::Table: {
      if (t <= table.front().first) return table.front().second;
      if (t >= table.back().first) return table.back().second;
      auto hi = std::upper_bound(table.begin(), table.end(), t,
                                 [](double v, const auto& pt) { return v < pt.first; });
      auto lo = hi - 1;
      const double w = (t - lo->first) / (hi->first - lo->first);
      return (1.0 - w) * lo->second + w * hi->second;
    }
  }
  return value;
}

std::pair<double, double> MrozProfile::range() const {
  switch (kind) {
    case Kind::Constant:
      return {value, value};
    case Kind::Rational: {
      const double peak = theta_min <= 0.0 ? 1.0 : 1.0 / (1.0 + theta_min * theta_min);
      return a >= 0.0 ? std::pair{b, a * peak + b} : std::pair{a * peak + b, b};
    }
    case Kind::Table: {
      double lo = (*this)(theta_min), hi = lo;
      for (const auto& [t, g] : table) {
        if (t <= theta_min) continue;
        lo = std::min(lo, g);
        hi = std::max(hi, g);
      }
      return {lo, hi};
    }
  }
  return {value, value};
}

double BodnerPartom::rate_function(double s) const { return s <= 0.0 ? 0.0 : a * std::pow(s, p - 1.0); }

ConstitutiveLaw::ConstitutiveLaw(NortonHoff law) : law_(law) {
  if (!(law.c > 0.0) || !std::isfinite(law.c)) throw BadConfig("NortonHoff: c must be positive");
  if (!(law.p >= 2.0) || !std::isfinite(law.p)) throw BadConfig("NortonHoff: p must be >= 2");
  c_growth_ = law.c;
  beta_ = law.c;
  p_ = law.p;
}

ConstitutiveLaw::ConstitutiveLaw(Mroz law) : law_(std::move(law)) {
  const auto& m = std::get<Mroz>(law_);
  const auto [lo, hi] = m.g.range();
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw BadConfig("Mroz: g must be finite");
  c_growth_ = std::max(std::abs(lo), std::abs(hi));
  beta_ = lo;
  p_ = 2.0;
}

ConstitutiveLaw::ConstitutiveLaw(BodnerPartom law) : law_(law) {
  if (!(law.a > 0.0)) throw BadConfig("BodnerPartom: a must be positive");
  if (!(law.p >= 2.0)) throw BadConfig("BodnerPartom: p must be >= 2");
  if (law.threshold > 0.0) throw BadConfig("BodnerPartom: threshold must be <= 0 (G continuous at 0)");
  if (!(law.y_min > 0.0) || !(law.y_max >= law.y_min) || law.y0 < law.y_min || law.y0 > law.y_max)
    throw BadConfig("BodnerPartom: need 0 < y_min <= y0 <= y_max");
  if (law.gamma0 < 0.0 || law.delta0 < 0.0 || law.A < 0.0)
    throw BadConfig("BodnerPartom: gamma0, delta0 and A must be nonnegative");
  p_ = law.p;
  c_growth_ = law.a / std::pow(law.y_min, law.p - 1.0);
  beta_ = law.threshold == 0.0 ? law.a / std::pow(law.y_max, law.p - 1.0) : 0.0;
}

bool ConstitutiveLaw::is_temperature_dependent() const {
  if (const auto* m = std::get_if<Mroz>(&law_)) return m->g.kind != MrozProfile::Kind::Constant;
  return false;
}

std::string ConstitutiveLaw::name() const {
  struct Visitor {
    std::string operator()(const NortonHoff&) const { return "norton_hoff"; }
    std::string operator()(const Mroz&) const { return "mroz"; }
    std::string operator()(const BodnerPartom&) const { return "bodner_partom"; }
  };
  return std::visit(Visitor{}, law_);
}

Mandel ConstitutiveLaw::rate(double theta, const Mandel& td, double y) const {
  const double n = td.norm();
  double scale = 0.0;
  if (const auto* nh = std::get_if<NortonHoff>(&law_)) {
    scale = nh->p == 2.0 ? nh->c : (n == 0.0 ? 0.0 : nh->c * std::pow(n, nh->p - 2.0));
  } else if (const auto* mr = std::get_if<Mroz>(&law_)) {
    scale = mr->g(theta);
  } else {
    const auto& bp = std::get<BodnerPartom>(law_);
    const double excess = std::max(n + bp.threshold, 0.0);
    scale = n == 0.0 ? 0.0 : bp.rate_function(excess / y) / n;
  }
  return deviatoric(Mandel(scale * td));
}

DevTensor3 ConstitutiveLaw::evaluate(double theta, const DevTensor3& td) const {
  const double y = has_hardening() ? std::get<BodnerPartom>(law_).y0 : 1.0;
  return evaluate(theta, td, y);
}

DevTensor3 ConstitutiveLaw::evaluate(double theta, const DevTensor3& td, double y) const {
  if (!std::isfinite(theta) || !td.tensor().is_finite() || !std::isfinite(y))
    throw NonFiniteInput("constitutive law: non-finite argument");
  return DevTensor3::project(SymTensor3::from_mandel(rate(theta, td.mandel(), y)));
}

double ConstitutiveLaw::dissipation_density(double theta, const DevTensor3& td) const {
  return td.mandel().dot(evaluate(theta, td).mandel());
}

double ConstitutiveLaw::dissipation_density(double theta, const DevTensor3& td, double y) const {
  return td.mandel().dot(evaluate(theta, td, y).mandel());
}

namespace {

SymTensor3 random_deviatoric(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> r01(0.0, 1.0);
  Mandel m;
  for (int i = 0; i < 6; ++i) m[i] = u(rng);
  m = deviatoric(m);
  const double n = m.norm();
  if (n == 0.0) return {};
  return SymTensor3::from_mandel(m * (radius * r01(rng) / n));
}

}  // namespace

CertificationReport run_certification(const ConstitutiveLaw& law, const CertificationOptions& opts) {
  if (opts.sample_count < 1) throw PreconditionError("certify_assumption1: sample_count must be >= 1");
  if (!(opts.radius > 0.0)) throw PreconditionError("certify_assumption1: radius must be positive");
  if (opts.theta_hi < opts.theta_lo) throw PreconditionError("certify_assumption1: empty theta range");

  CertificationReport rep;
  rep.law = law.name();
  rep.samples = opts.sample_count;
  rep.p = law.exponent();
  rep.declared_growth = law.growth_constant();
  rep.declared_coercivity = law.coercivity_constant();
  rep.min_monotonicity = std::numeric_limits<double>::infinity();
  rep.min_coercivity_ratio = std::numeric_limits<double>::infinity();

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> theta_dist(opts.theta_lo, std::nextafter(opts.theta_hi, INFINITY));
  double y_lo = 1.0, y_hi = 1.0;
  if (const auto* bp = std::get_if<BodnerPartom>(&law.law())) {
    y_lo = bp->y_min;
    y_hi = bp->y_max;
  }
  std::uniform_real_distribution<double> y_dist(y_lo, std::nextafter(y_hi, INFINITY));
  const double p = law.exponent();

  for (std::size_t s = 0; s < opts.sample_count; ++s) {
    const double theta = theta_dist(rng);
    const double y = y_dist(rng);
    const SymTensor3 t1 = random_deviatoric(rng, opts.radius);
    const SymTensor3 t2 = random_deviatoric(rng, opts.radius);
    const Mandel g1 = law.rate(theta, t1.mandel(), y);
    const Mandel g2 = law.rate(theta, t2.mandel(), y);

    const double mono = (g1 - g2).dot(t1.mandel() - t2.mandel());
    if (mono < rep.min_monotonicity) {
      rep.min_monotonicity = mono;
      rep.worst_monotonicity = {theta, y, t1, t2, mono};
    }
    for (const auto& [t, g] : {std::pair{t1, g1}, std::pair{t2, g2}}) {
      const double n = t.norm();
      const double growth = g.norm() / std::pow(1.0 + n, p - 1.0);
      if (growth > rep.max_growth_ratio) {
        rep.max_growth_ratio = growth;
        rep.worst_growth = {theta, y, t, t, growth};
      }
      if (n > 1e-8) {
        const double coerc = g.dot(t.mandel()) / std::pow(n, p);
        if (coerc < rep.min_coercivity_ratio) {
          rep.min_coercivity_ratio = coerc;
          rep.worst_coercivity = {theta, y, t, t, coerc};
        }
      }
      rep.max_trace = std::max(rep.max_trace, std::abs(g[0] + g[1] + g[2]) / std::max(1.0, g.norm()));
    }
  }

  rep.monotone = rep.min_monotonicity >= -1e-12;
  rep.growth = rep.max_growth_ratio <= rep.declared_growth * (1.0 + 1e-12);
  rep.coercive = rep.declared_coercivity > 0.0 &&
                 rep.min_coercivity_ratio >= rep.declared_coercivity * (1.0 - 1e-9);
  rep.passed = rep.monotone && rep.growth && rep.coercive && rep.max_trace <= 1e-14;
  return rep;
}

CertificationReport certify_assumption1(const ConstitutiveLaw& law, const CertificationOptions& opts) {
  CertificationReport rep = run_certification(law, opts);
  if (!rep.passed) {
    std::string what = "certification failed for " + rep.law + ":";
    if (!rep.monotone) what += " monotonicity";
    if (!rep.growth) what += " growth";
    if (!rep.coercive) what += " coercivity";
    if (rep.max_trace > 1e-14) what += " trace";
    throw CertificationFailure(what, std::move(rep));
  }
  return rep;
}

HardeningState advance_hardening(const BodnerPartom& law, const HardeningState& state, double theta,
                                 const DevTensor3& td, double dt, ClampPolicy policy) {
  if (!(dt > 0.0)) throw PreconditionError("advance_hardening: dt must be positive");
  if (!(state.y > 0.0) || !std::isfinite(state.y)) throw PreconditionError("advance_hardening: invalid state");
  if (!std::isfinite(theta) || !td.tensor().is_finite()) throw NonFiniteInput("advance_hardening: non-finite input");
  const double n = td.norm();
  const double rhs = law.gamma0 * law.rate_function(n / state.y) * n - law.A * law.delta0 * state.y;
  const double y = state.y + dt * rhs;
  if (!std::isfinite(y)) throw DomainExit("advance_hardening: y became non-finite");
  if (y < law.y_min || y > law.y_max) {
    if (policy == ClampPolicy::Reject)
      throw DomainExit("advance_hardening: y = " + std::to_string(y) + " left [y_min, y_max]");
    return {std::clamp(y, law.y_min, law.y_max)};
  }
  return {y};
}

}  // namespace tve
