#include "tve/config.hpp"

#include "tve/errors.hpp"
#include "tve/io.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

namespace tve {

using nlohmann::json;

namespace {

enum class Bound { Any, Positive, NonNegative };

// Walks the user JSON, records every violation with its dotted path and
// mirrors each value (user-supplied or default) into the effective config.
class Reader {
public:
  std::vector<std::string> errors;

  void fail(const std::string& path, const std::string& msg) { errors.push_back(path + ": " + msg); }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

  // Returns the sub-object (or an empty object when absent) and reports
  // unknown keys.
  json section(const json& parent, const std::string& path, const std::string& key,
               const std::set<std::string>& allowed) {
    const std::string p = join(path, key);
    if (!parent.is_object() || !parent.contains(key)) return json::object();
    const json& v = parent.at(key);
    if (!v.is_object()) {
      fail(p, "expected an object");
      return json::object();
    }
    keys(v, p, allowed);
    return v;
  }

  void keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
    for (const auto& [k, _] : obj.items())
      if (!allowed.count(k)) fail(join(path, k), "unknown key");
  }

  double number(const json& obj, const std::string& path, const std::string& key, double def, Bound b, json& eff) {
    const std::string p = join(path, key);
    double v = def;
    if (obj.contains(key)) {
      const json& x = obj.at(key);
      if (!x.is_number()) {
        fail(p, "expected a number");
      } else {
        v = x.get<double>();
        if (!std::isfinite(v)) fail(p, "must be finite");
        else if (b == Bound::Positive && !(v > 0.0)) fail(p, fmt::format("must be > 0 (got {})", format_number(v)));
        else if (b == Bound::NonNegative && !(v >= 0.0)) fail(p, fmt::format("must be >= 0 (got {})", format_number(v)));
      }
    }
    eff[key] = v;
    return v;
  }

  int integer(const json& obj, const std::string& path, const std::string& key, int def, int lo, json& eff) {
    const std::string p = join(path, key);
    int v = def;
    if (obj.contains(key)) {
      const json& x = obj.at(key);
      if (!x.is_number_integer()) {
        fail(p, "expected an integer");
      } else {
        const auto raw = x.get<long long>();
        if (raw < lo || raw > 1000000000) fail(p, fmt::format("must be >= {} (got {})", lo, raw));
        else v = static_cast<int>(raw);
      }
    }
    eff[key] = v;
    return v;
  }

  bool boolean(const json& obj, const std::string& path, const std::string& key, bool def, json& eff) {
    bool v = def;
    if (obj.contains(key)) {
      if (!obj.at(key).is_boolean()) fail(join(path, key), "expected true or false");
      else v = obj.at(key).get<bool>();
    }
    eff[key] = v;
    return v;
  }

  std::string choice(const json& obj, const std::string& path, const std::string& key, const std::string& def,
                     const std::set<std::string>& allowed, json& eff) {
    std::string v = def;
    if (obj.contains(key)) {
      const json& x = obj.at(key);
      if (!x.is_string()) {
        fail(join(path, key), "expected a string");
      } else if (!allowed.count(x.get<std::string>())) {
        std::string opts;
        for (const auto& a : allowed) opts += (opts.empty() ? "" : ", ") + a;
        fail(join(path, key), fmt::format("unknown value '{}' (expected one of: {})", x.get<std::string>(), opts));
      } else {
        v = x.get<std::string>();
      }
    }
    eff[key] = v;
    return v;
  }

  std::vector<double> numbers(const json& obj, const std::string& path, const std::string& key,
                              std::vector<double> def, std::size_t lo, std::size_t hi, json& eff) {
    const std::string p = join(path, key);
    if (obj.contains(key)) {
      const json& x = obj.at(key);
      if (!x.is_array() || x.size() < lo || x.size() > hi) {
        fail(p, fmt::format("expected an array of {} to {} numbers", lo, hi));
      } else {
        std::vector<double> v;
        bool ok = true;
        for (std::size_t i = 0; i < x.size(); ++i) {
          if (!x[i].is_number() || !std::isfinite(x[i].get<double>())) {
            fail(fmt::format("{}[{}]", p, i), "expected a finite number");
            ok = false;
          } else {
            v.push_back(x[i].get<double>());
          }
        }
        if (ok) def = std::move(v);
      }
    }
    eff[key] = def;
    return def;
  }
};

TimeProfile read_profile(Reader& r, const json& parent, const std::string& path, const std::filesystem::path& base,
                         json& eff) {
  const json o = r.section(parent, path, "profile", {"kind", "value", "ramp_time", "frequency", "phase", "path"});
  const std::string p = Reader::join(path, "profile");
  json e = json::object();
  TimeProfile tp;
  const std::string kind = r.choice(o, p, "kind", "constant", {"constant", "ramp", "sinusoid", "csv"}, e);
  tp.value = r.number(o, p, "value", 1.0, Bound::Any, e);
  if (kind == "ramp") {
    tp.kind = TimeProfile::Kind::Ramp;
    tp.ramp_time = r.number(o, p, "ramp_time", 1.0, Bound::Positive, e);
  } else if (kind == "sinusoid") {
    tp.kind = TimeProfile::Kind::Sinusoid;
    tp.frequency = r.number(o, p, "frequency", 1.0, Bound::Any, e);
    tp.phase = r.number(o, p, "phase", 0.0, Bound::Any, e);
  } else if (kind == "csv") {
    if (!o.contains("path") || !o.at("path").is_string()) {
      r.fail(Reader::join(p, "path"), "required string for kind 'csv'");
    } else {
      std::filesystem::path file = o.at("path").get<std::string>();
      e["path"] = file.string();
      if (file.is_relative()) file = base / file;
      try {
        const double scale = tp.value;
        tp = TimeProfile::from_csv(file);
        tp.value = scale;
      } catch (const BadData& ex) {
        r.fail(Reader::join(p, "path"), ex.what());
      }
    }
  }
  for (const char* k : {"ramp_time", "frequency", "phase", "path"})
    if (o.contains(k) && !e.contains(k)) r.fail(Reader::join(p, k), "not used by kind '" + kind + "'");
  eff["profile"] = e;
  return tp;
}

MrozProfile read_mroz(Reader& r, const json& law, const std::string& path, json& eff) {
  const json o = r.section(law, path, "g", {"kind", "value", "a", "b", "points", "theta_min"});
  const std::string p = Reader::join(path, "g");
  json e = json::object();
  MrozProfile g;
  const std::string kind = r.choice(o, p, "kind", "constant", {"constant", "rational", "table"}, e);
  if (kind == "constant") {
    g = MrozProfile::constant(r.number(o, p, "value", 1.0, Bound::Any, e));
  } else if (kind == "rational") {
    const double a = r.number(o, p, "a", 1.0, Bound::Any, e);
    const double b = r.number(o, p, "b", 0.5, Bound::Any, e);
    g = MrozProfile::rational(a, b);
  } else {
    std::vector<std::pair<double, double>> pts;
    if (!o.contains("points") || !o.at("points").is_array() || o.at("points").empty()) {
      r.fail(Reader::join(p, "points"), "required non-empty array of [theta, g] pairs");
    } else {
      for (std::size_t i = 0; i < o.at("points").size(); ++i) {
        const json& q = o.at("points")[i];
        if (!q.is_array() || q.size() != 2 || !q[0].is_number() || !q[1].is_number()) {
          r.fail(fmt::format("{}.points[{}]", p, i), "expected [theta, g]");
          continue;
        }
        if (!pts.empty() && q[0].get<double>() <= pts.back().first)
          r.fail(fmt::format("{}.points[{}]", p, i), "theta values must be strictly increasing");
        pts.emplace_back(q[0].get<double>(), q[1].get<double>());
      }
      e["points"] = o.at("points");
    }
    if (!pts.empty()) {
      try {
        g = MrozProfile::tabulated(pts);
      } catch (const Error& ex) {
        r.fail(Reader::join(p, "points"), ex.what());
      }
    }
  }
  g.theta_min = r.number(o, p, "theta_min", 0.0, Bound::Any, e);
  for (const char* k : {"value", "a", "b", "points"})
    if (o.contains(k) && !e.contains(k)) r.fail(Reader::join(p, k), "not used by kind '" + kind + "'");
  eff["g"] = e;
  return g;
}

ConstitutiveLaw read_law(Reader& r, const json& material, json& eff) {
  const std::string p = "material.law";
  const json o = r.section(material, "material", "law",
                           {"type", "c", "p", "g", "a", "threshold", "gamma0", "delta0", "A", "y0", "y_min", "y_max"});
  json e = json::object();
  const std::string type = r.choice(o, p, "type", "norton_hoff", {"norton_hoff", "mroz", "bodner_partom"}, e);
  std::set<std::string> used{"type"};
  ConstitutiveLaw law{NortonHoff{}};
  if (type == "norton_hoff") {
    NortonHoff nh;
    nh.c = r.number(o, p, "c", 1.0, Bound::Positive, e);
    nh.p = r.number(o, p, "p", 2.0, Bound::Positive, e);
    if (nh.p < 2.0) r.fail(p + ".p", "must be >= 2");
    used.insert({"c", "p"});
    if (nh.c > 0.0 && nh.p >= 2.0) law = ConstitutiveLaw(nh);
  } else if (type == "mroz") {
    law = ConstitutiveLaw(Mroz{read_mroz(r, o, p, e)});
    used.insert("g");
  } else {
    BodnerPartom bp;
    bp.a = r.number(o, p, "a", 1.0, Bound::Positive, e);
    bp.p = r.number(o, p, "p", 2.0, Bound::Positive, e);
    bp.threshold = r.number(o, p, "threshold", 0.0, Bound::Any, e);
    bp.gamma0 = r.number(o, p, "gamma0", 0.0, Bound::NonNegative, e);
    bp.delta0 = r.number(o, p, "delta0", 0.0, Bound::NonNegative, e);
    bp.A = r.number(o, p, "A", 0.0, Bound::NonNegative, e);
    bp.y0 = r.number(o, p, "y0", 1.0, Bound::Positive, e);
    bp.y_min = r.number(o, p, "y_min", 0.5, Bound::Positive, e);
    bp.y_max = r.number(o, p, "y_max", 2.0, Bound::Positive, e);
    used.insert({"a", "p", "threshold", "gamma0", "delta0", "A", "y0", "y_min", "y_max"});
    if (bp.p < 2.0) r.fail(p + ".p", "must be >= 2");
    if (bp.threshold > 0.0) r.fail(p + ".threshold", "must be <= 0");
    if (!(bp.y_min <= bp.y0 && bp.y0 <= bp.y_max)) r.fail(p + ".y0", "must lie in [y_min, y_max]");
    if (r.errors.empty()) law = ConstitutiveLaw(bp);
  }
  for (const auto& [k, _] : o.items())
    if (!used.count(k)) r.fail(Reader::join(p, k), "not used by law type '" + type + "'");
  eff["law"] = e;
  return law;
}

template <std::size_t N>
std::array<double, N> to_array(const std::vector<double>& v) {
  std::array<double, N> a{};
  for (std::size_t i = 0; i < N && i < v.size(); ++i) a[i] = v[i];
  return a;
}

}  // namespace

RunConfig parse_config(const json& j, const std::filesystem::path& base) {
  Reader r;
  RunConfig cfg;
  json eff = json::object();
  if (!j.is_object()) throw ValidationError({"(root): expected an object"});
  r.keys(j, "", {"mesh", "material", "data", "discretization", "output", "certify", "converge", "seed"});

  {  // mesh
    const json o = r.section(j, "", "mesh", {"dim", "extents", "cells"});
    json e = json::object();
    cfg.mesh.dim = r.integer(o, "mesh", "dim", 2, 2, e);
    if (cfg.mesh.dim > 3) r.fail("mesh.dim", "must be 2 or 3");
    const std::size_t d = static_cast<std::size_t>(std::clamp(cfg.mesh.dim, 2, 3));
    const auto ext = r.numbers(o, "mesh", "extents", std::vector<double>(d, 1.0), d, d, e);
    const auto cells = r.numbers(o, "mesh", "cells", std::vector<double>(d, 8.0), d, d, e);
    for (std::size_t i = 0; i < ext.size(); ++i) {
      if (!(ext[i] > 0.0)) r.fail(fmt::format("mesh.extents[{}]", i), "must be > 0");
      cfg.mesh.extents[i] = ext[i];
    }
    json cells_int = json::array();
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (cells[i] < 1.0 || cells[i] != std::floor(cells[i]) || cells[i] > 4096)
        r.fail(fmt::format("mesh.cells[{}]", i), "must be an integer in [1, 4096]");
      cfg.mesh.cells[i] = static_cast<int>(cells[i]);
      cells_int.push_back(cfg.mesh.cells[i]);
    }
    e["cells"] = cells_int;
    eff["mesh"] = e;
  }

  {  // material
    const json o = r.section(j, "", "material", {"lambda", "mu", "voigt", "law"});
    json e = json::object();
    cfg.lambda = r.number(o, "material", "lambda", 1.0, Bound::NonNegative, e);
    cfg.mu = r.number(o, "material", "mu", 1.0, Bound::Positive, e);
    if (o.contains("voigt")) {
      const json& v = o.at("voigt");
      bool ok = v.is_array() && v.size() == 6;
      std::array<std::array<double, 6>, 6> m{};
      for (std::size_t i = 0; ok && i < 6; ++i) {
        ok = v[i].is_array() && v[i].size() == 6;
        for (std::size_t k = 0; ok && k < 6; ++k) {
          ok = v[i][k].is_number();
          if (ok) m[i][k] = v[i][k].get<double>();
        }
      }
      if (!ok) {
        r.fail("material.voigt", "expected a 6x6 array of numbers");
      } else {
        cfg.voigt = m;
        e["voigt"] = v;
        try {
          (void)make_elasticity(cfg);
        } catch (const Error& ex) {
          r.fail("material.voigt", ex.what());
        }
      }
    }
    cfg.law = read_law(r, o, e);
    eff["material"] = e;
  }

  {  // data
    const json o = r.section(j, "", "data",
                             {"body_force", "boundary_displacement", "heat_flux", "theta0", "theta0_aux", "plastic0"});
    json e = json::object();
    if (o.contains("body_force")) {
      const json b = r.section(o, "data", "body_force", {"pattern", "vector", "profile"});
      json be = json::object();
      cfg.body_force.enabled = true;
      cfg.body_force.pattern = r.choice(b, "data.body_force", "pattern", "uniform", {"uniform", "sine"}, be) == "sine"
                                   ? VectorSource::Pattern::Sine
                                   : VectorSource::Pattern::Uniform;
      cfg.body_force.vector = to_array<3>(r.numbers(b, "data.body_force", "vector", {0, 0, 0}, 2, 3, be));
      cfg.body_force.profile = read_profile(r, b, "data.body_force", base, be);
      e["body_force"] = be;
    }
    if (o.contains("boundary_displacement")) {
      const json b = r.section(o, "data", "boundary_displacement", {"matrix", "offset", "profile"});
      json be = json::object();
      cfg.boundary_displacement.enabled = true;
      const auto flat = r.numbers(b, "data.boundary_displacement", "matrix", std::vector<double>(9, 0.0), 9, 9, be);
      for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) cfg.boundary_displacement.matrix[i][k] = flat[3 * i + k];
      cfg.boundary_displacement.offset =
          to_array<3>(r.numbers(b, "data.boundary_displacement", "offset", {0, 0, 0}, 2, 3, be));
      cfg.boundary_displacement.profile = read_profile(r, b, "data.boundary_displacement", base, be);
      e["boundary_displacement"] = be;
    }
    if (o.contains("heat_flux")) {
      const json b = r.section(o, "data", "heat_flux", {"value", "profile"});
      json be = json::object();
      cfg.heat_flux.enabled = true;
      cfg.heat_flux.value = r.number(b, "data.heat_flux", "value", 0.0, Bound::Any, be);
      cfg.heat_flux.profile = read_profile(r, b, "data.heat_flux", base, be);
      e["heat_flux"] = be;
    }
    for (const char* key : {"theta0", "theta0_aux"}) {
      const json b = r.section(o, "data", key, {"value", "perturbation"});
      json be = json::object();
      ScalarInitial& s = std::string(key) == "theta0" ? cfg.theta0 : cfg.theta0_aux;
      s.value = r.number(b, std::string("data.") + key, "value", s.value, Bound::Any, be);
      s.perturbation = r.number(b, std::string("data.") + key, "perturbation", 0.0, Bound::Any, be);
      e[key] = be;
    }
    {
      const json b = r.section(o, "data", "plastic0", {"pattern", "amplitude", "tensor"});
      json be = json::object();
      const std::string pat = r.choice(b, "data.plastic0", "pattern", "zero", {"zero", "constant", "sine"}, be);
      cfg.plastic0.pattern = pat == "zero"       ? TensorInitial::Pattern::Zero
                             : pat == "constant" ? TensorInitial::Pattern::Constant
                                                 : TensorInitial::Pattern::Sine;
      cfg.plastic0.amplitude = r.number(b, "data.plastic0", "amplitude", 1.0, Bound::Any, be);
      cfg.plastic0.tensor = to_array<6>(r.numbers(b, "data.plastic0", "tensor", {0, 0, 0, 0, 0, 0}, 6, 6, be));
      e["plastic0"] = be;
    }
    eff["data"] = e;
  }

  {  // discretization
    const json o = r.section(j, "", "discretization",
                             {"k", "l", "dt", "horizon", "truncation_level", "tolerance", "max_iterations",
                              "max_halvings", "scheme", "surrogate_length"});
    json e = json::object();
    auto& ev = cfg.evolution;
    ev.k = r.integer(o, "discretization", "k", 4, 1, e);
    ev.l = r.integer(o, "discretization", "l", 4, 1, e);
    ev.dt = r.number(o, "discretization", "dt", 1e-3, Bound::Positive, e);
    ev.horizon = r.number(o, "discretization", "horizon", 0.1, Bound::NonNegative, e);
    if (o.contains("truncation_level"))
      ev.truncation_level = r.number(o, "discretization", "truncation_level", ev.k, Bound::Positive, e);
    else
      e["truncation_level"] = ev.k;
    ev.tolerance = r.number(o, "discretization", "tolerance", 1e-12, Bound::Positive, e);
    ev.max_iterations = r.integer(o, "discretization", "max_iterations", 200, 1, e);
    ev.max_halvings = r.integer(o, "discretization", "max_halvings", 6, 0, e);
    ev.scheme = r.choice(o, "discretization", "scheme", "midpoint", {"midpoint", "implicit_euler"}, e) == "midpoint"
                    ? TimeScheme::Midpoint
                    : TimeScheme::ImplicitEuler;
    cfg.surrogate_length = r.number(o, "discretization", "surrogate_length", 1.0, Bound::Positive, e);
    if (ev.dt > 0.0 && ev.horizon / ev.dt > 1e7) r.fail("discretization.horizon", "more than 1e7 steps");
    eff["discretization"] = e;
  }

  {  // output
    const json o = r.section(j, "", "output", {"dir", "every", "vtk"});
    json e = json::object();
    if (o.contains("dir")) {
      if (!o.at("dir").is_string() || o.at("dir").get<std::string>().empty()) r.fail("output.dir", "expected a path");
      else cfg.output_dir = o.at("dir").get<std::string>();
    }
    e["dir"] = cfg.output_dir.string();
    cfg.snapshot_every = r.integer(o, "output", "every", 0, 0, e);
    cfg.write_vtk = r.boolean(o, "output", "vtk", true, e);
    eff["output"] = e;
  }

  {  // certify
    const json o = r.section(j, "", "certify", {"samples", "radius", "theta_range"});
    json e = json::object();
    cfg.certification.sample_count = static_cast<std::size_t>(r.integer(o, "certify", "samples", 10000, 1, e));
    cfg.certification.radius = r.number(o, "certify", "radius", 10.0, Bound::Positive, e);
    const auto range = r.numbers(o, "certify", "theta_range", {0.0, 100.0}, 2, 2, e);
    if (range.size() == 2 && !(range[0] <= range[1])) r.fail("certify.theta_range", "lower bound exceeds upper bound");
    cfg.certification.theta_lo = range[0];
    cfg.certification.theta_hi = range[1];
    eff["certify"] = e;
  }

  {  // converge
    const json o = r.section(j, "", "converge", {"ladder"});
    json e = json::object();
    if (o.contains("ladder")) {
      const json& ld = o.at("ladder");
      std::vector<std::pair<int, int>> lad;
      if (!ld.is_array() || ld.size() < 2) r.fail("converge.ladder", "expected at least two [k, l] pairs");
      else
        for (std::size_t i = 0; i < ld.size(); ++i) {
          if (!ld[i].is_array() || ld[i].size() != 2 || !ld[i][0].is_number_integer() ||
              !ld[i][1].is_number_integer() || ld[i][0].get<int>() < 1 || ld[i][1].get<int>() < 1)
            r.fail(fmt::format("converge.ladder[{}]", i), "expected [k, l] with positive integers");
          else
            lad.emplace_back(ld[i][0].get<int>(), ld[i][1].get<int>());
        }
      if (lad.size() == ld.size() && lad.size() >= 2) cfg.ladder = lad;
    }
    json lad = json::array();
    for (const auto& [k, l] : cfg.ladder) lad.push_back({k, l});
    e["ladder"] = lad;
    eff["converge"] = e;
  }

  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) r.fail("seed", "expected a non-negative integer");
    else cfg.seed = j.at("seed").get<std::uint64_t>();
  }
  eff["seed"] = cfg.seed;
  cfg.certification.seed = cfg.seed;

  if (!r.errors.empty()) throw ValidationError(r.errors);
  cfg.effective = eff;
  cfg.hash = fnv1a(eff.dump());
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read config file " + path.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return parse_config(j, path.has_parent_path() ? path.parent_path() : std::filesystem::path("."));
}

ElasticityTensor make_elasticity(const RunConfig& cfg) {
  if (!cfg.voigt) return ElasticityTensor::isotropic(cfg.lambda, cfg.mu);
  Mandel66 v;
  for (int i = 0; i < 6; ++i)
    for (int k = 0; k < 6; ++k) v(i, k) = (*cfg.voigt)[i][k];
  return ElasticityTensor::from_voigt(v);
}

namespace {

double sine_bump(const Eigen::Vector3d& x, const MeshConfig& m) {
  double s = 1.0;
  for (int i = 0; i < m.dim; ++i) s *= std::sin(std::numbers::pi * x[i] / m.extents[i]);
  return s;
}

double cosine_bump(const Eigen::Vector3d& x, const MeshConfig& m) {
  double s = 1.0;
  for (int i = 0; i < m.dim; ++i) s *= std::cos(std::numbers::pi * x[i] / m.extents[i]);
  return s;
}

}  // namespace

LiftData make_lift_data(const RunConfig& cfg, const AssembledOperators& ops) {
  LiftData d;
  const MeshConfig mc = cfg.mesh;
  if (cfg.body_force.enabled) {
    const Eigen::Vector3d v(cfg.body_force.vector[0], cfg.body_force.vector[1], cfg.body_force.vector[2]);
    if (cfg.body_force.pattern == VectorSource::Pattern::Sine)
      d.force = [v, mc](const Eigen::Vector3d& x) -> Eigen::Vector3d { return v * sine_bump(x, mc); };
    else
      d.force = [v](const Eigen::Vector3d&) -> Eigen::Vector3d { return v; };
    d.force_profile = cfg.body_force.profile;
  }
  if (cfg.boundary_displacement.enabled) {
    Eigen::Matrix3d a;
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) a(i, k) = cfg.boundary_displacement.matrix[i][k];
    const Eigen::Vector3d b(cfg.boundary_displacement.offset[0], cfg.boundary_displacement.offset[1],
                            cfg.boundary_displacement.offset[2]);
    d.displacement = [a, b](const Eigen::Vector3d& x) -> Eigen::Vector3d { return a * x + b; };
    d.displacement_profile = cfg.boundary_displacement.profile;
  }
  if (cfg.heat_flux.enabled) {
    const double q = cfg.heat_flux.value;
    d.flux = [q](const Eigen::Vector3d&) { return q; };
    d.flux_profile = cfg.heat_flux.profile;
  }
  if (cfg.theta0_aux.value != 0.0 || cfg.theta0_aux.perturbation != 0.0) {
    d.theta0.resize(static_cast<Eigen::Index>(ops.num_nodes()));
    for (std::size_t n = 0; n < ops.num_nodes(); ++n)
      d.theta0[n] = cfg.theta0_aux.value + cfg.theta0_aux.perturbation * cosine_bump(ops.mesh.node(n), mc);
  }
  return d;
}

Eigen::VectorXd initial_temperature(const RunConfig& cfg, const AssembledOperators& ops) {
  Eigen::VectorXd t(static_cast<Eigen::Index>(ops.num_nodes()));
  for (std::size_t n = 0; n < ops.num_nodes(); ++n)
    t[n] = cfg.theta0.value + cfg.theta0.perturbation * cosine_bump(ops.mesh.node(n), cfg.mesh);
  return t;
}

Eigen::VectorXd initial_plastic_strain(const RunConfig& cfg, const AssembledOperators& ops) {
  const auto nq = static_cast<Eigen::Index>(ops.num_qp());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(6 * nq);
  if (cfg.plastic0.pattern == TensorInitial::Pattern::Zero) return out;
  const auto& a = cfg.plastic0.tensor;
  const Mandel e = SymTensor3(a[0], a[1], a[2], a[3], a[4], a[5]).mandel();
  for (Eigen::Index q = 0; q < nq; ++q) {
    const double s = cfg.plastic0.pattern == TensorInitial::Pattern::Sine
                         ? sine_bump(ops.quad.point(static_cast<std::size_t>(q)), cfg.mesh)
                         : 1.0;
    out.segment<6>(6 * q) = cfg.plastic0.amplitude * s * e;
  }
  // Plane strain: components outside the active set cannot be represented.
  if (ops.dim() == 2)
    for (Eigen::Index q = 0; q < nq; ++q) out[6 * q + 4] = out[6 * q + 5] = 0.0;
  return out;
}

}  // namespace tve
