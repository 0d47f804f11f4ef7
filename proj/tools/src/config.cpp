#include "config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "geoperiods/errors.hpp"

namespace geoperiods::cli {

namespace {

const char* type_name(const json& j) { return j.type_name(); }

template <class... S>
void require_one_of(const std::string& value, const std::string& ptr, S... options) {
  if (((value == options) || ...)) return;
  std::string list;
  ((list += (list.empty() ? "" : ", ") + std::string(options)), ...);
  throw ConfigError(ptr, "unknown value '" + value + "' (expected one of: " + list + ")");
}

void require(bool ok, const std::string& ptr, const std::string& what) {
  if (!ok) throw ConfigError(ptr, what);
}

}  // namespace

ObjectReader::ObjectReader(const json& j, std::string pointer) : j_(j), ptr_(std::move(pointer)) {
  if (!j_.is_object()) throw ConfigError(ptr_, std::string("expected object, got ") + type_name(j_));
}

const json& ObjectReader::at(const std::string& key) {
  seen_.insert(key);
  if (!j_.contains(key)) throw ConfigError(path(key), "missing required field");
  return j_.at(key);
}

const json& ObjectReader::raw(const std::string& key) { return at(key); }

double ObjectReader::number(const std::string& key) {
  const json& v = at(key);
  if (!v.is_number()) throw ConfigError(path(key), std::string("expected number, got ") + type_name(v));
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(path(key), "expected a finite number");
  return x;
}

double ObjectReader::number(const std::string& key, double fallback) {
  seen_.insert(key);
  return has(key) ? number(key) : fallback;
}

long ObjectReader::integer(const std::string& key) {
  const json& v = at(key);
  if (!v.is_number_integer())
    throw ConfigError(path(key), std::string("expected integer, got ") + type_name(v));
  return v.get<long>();
}

long ObjectReader::integer(const std::string& key, long fallback) {
  seen_.insert(key);
  return has(key) ? integer(key) : fallback;
}

bool ObjectReader::boolean(const std::string& key, bool fallback) {
  seen_.insert(key);
  if (!has(key)) return fallback;
  const json& v = j_.at(key);
  if (!v.is_boolean()) throw ConfigError(path(key), std::string("expected boolean, got ") + type_name(v));
  return v.get<bool>();
}

std::string ObjectReader::string(const std::string& key) {
  const json& v = at(key);
  if (!v.is_string()) throw ConfigError(path(key), std::string("expected string, got ") + type_name(v));
  return v.get<std::string>();
}

std::string ObjectReader::string(const std::string& key, const std::string& fallback) {
  seen_.insert(key);
  return has(key) ? string(key) : fallback;
}

std::vector<double> ObjectReader::numbers(const std::string& key) {
  const json& v = at(key);
  if (!v.is_array()) throw ConfigError(path(key), std::string("expected array, got ") + type_name(v));
  require(!v.empty(), path(key), "array must not be empty");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string p = path(key) + "/" + std::to_string(i);
    if (!v[i].is_number()) throw ConfigError(p, std::string("expected number, got ") + type_name(v[i]));
    out.push_back(v[i].get<double>());
    require(std::isfinite(out.back()), p, "expected a finite number");
  }
  return out;
}

std::array<double, 2> ObjectReader::pair(const std::string& key, std::array<double, 2> fallback) {
  seen_.insert(key);
  if (!has(key)) return fallback;
  const auto v = numbers(key);
  require(v.size() == 2, path(key), "expected an array of two numbers");
  return {v[0], v[1]};
}

ObjectReader ObjectReader::object(const std::string& key) { return ObjectReader(at(key), path(key)); }

void ObjectReader::finish() const {
  for (const auto& item : j_.items())
    if (!seen_.count(item.key())) throw ConfigError(path(item.key()), "unknown field");
}

SurfaceSpec SurfaceConfig::build() const {
  if (kind == "flat_torus") return SurfaceSpec::flat_torus(L1, L2);
  if (kind == "hyperbolic") return SurfaceSpec::hyperbolic(a);
  if (kind == "round_sphere") return SurfaceSpec::round_sphere(R);
  const Rect half_plane{-1e25, 1e25, 1e-25, 1e25};
  if (field == "half_plane") return SurfaceSpec::conformal(std::make_shared<HalfPlaneField>(a), half_plane);
  if (field == "bumped_half_plane")
    return SurfaceSpec::conformal(std::make_shared<BumpedHalfPlaneField>(beta, x0, y0, sigma), half_plane);
  return SurfaceSpec::conformal(std::make_shared<PoincareDiskField>(), Rect{-0.7, 0.7, -0.7, 0.7});
}

Curve CurveConfig::build(const SurfaceSpec& S) const {
  const auto n_cache = static_cast<std::size_t>(cache);
  const Orientation o = ccw ? Orientation::CounterClockwise : Orientation::Clockwise;
  if (kind == "geodesic_circle") return geodesic_circle(S, {center[0], center[1]}, radius, o, n_cache);
  if (kind == "vertical_geodesic") return vertical_geodesic(S, ell, y0);
  if (kind == "hypercycle") return hypercycle(S, d, ell);
  if (kind == "torus_line") return torus_line(S, {center[0], center[1]}, m, n);
  if (kind == "perturbed_circle")
    return perturbed_circle(S, {center[0], center[1]}, radius, eta, static_cast<int>(k), n_cache);
  return Curve::from_csv(S, path, n_cache);
}

DeckTransform DeckConfig::build() const {
  if (kind == "axis_translation") return DeckTransform::axis_translation(length);
  if (kind == "translation") return DeckTransform::translation(m, n);
  return DeckTransform::mobius(a, b, c, d);
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a64(canonical.dump()); }

std::string ExperimentConfig::hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
  return buf;
}

json read_json_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw ConfigError("", "cannot open " + p.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
}

namespace {

SurfaceConfig parse_surface(ObjectReader r) {
  SurfaceConfig s;
  s.kind = r.string("kind");
  require_one_of(s.kind, r.path("kind"), "flat_torus", "hyperbolic", "conformal", "round_sphere");
  const double tau = 2 * std::numbers::pi;
  if (s.kind == "flat_torus") {
    s.L1 = r.number("L1", tau);
    s.L2 = r.number("L2", tau);
    require(s.L1 > 0, r.path("L1"), "must be positive");
    require(s.L2 > 0, r.path("L2"), "must be positive");
  } else if (s.kind == "hyperbolic") {
    s.a = r.number("a", 1.0);
    require(s.a > 0, r.path("a"), "must be positive");
  } else if (s.kind == "round_sphere") {
    s.R = r.number("R", 1.0);
    require(s.R > 0, r.path("R"), "must be positive");
  } else {
    s.field = r.string("field");
    require_one_of(s.field, r.path("field"), "half_plane", "bumped_half_plane", "poincare_disk");
    if (s.field == "half_plane") {
      s.a = r.number("a", 1.0);
      require(s.a > 0, r.path("a"), "must be positive");
    } else if (s.field == "bumped_half_plane") {
      s.beta = r.number("beta", 0.05);
      s.x0 = r.number("x0", 0.0);
      s.y0 = r.number("y0", 1.0);
      s.sigma = r.number("sigma", 0.5);
      require(s.y0 > 0, r.path("y0"), "must be positive");
      require(s.sigma > 0, r.path("sigma"), "must be positive");
    }
  }
  r.finish();
  try {
    (void)s.build();
  } catch (const geoperiods::Error& e) {
    throw ConfigError(r.pointer(), e.what());
  }
  return s;
}

CurveConfig parse_curve(ObjectReader r, const SurfaceConfig& surface) {
  CurveConfig c;
  c.kind = r.string("kind");
  require_one_of(c.kind, r.path("kind"), "geodesic_circle", "vertical_geodesic", "hypercycle",
                 "torus_line", "perturbed_circle", "csv");
  auto is = [&](const char* k) { return surface.kind == k; };
  if (c.kind == "geodesic_circle" || c.kind == "perturbed_circle") {
    c.center = r.pair("center", is("round_sphere") ? std::array<double, 2>{0, 0}
                                : is("flat_torus") ? std::array<double, 2>{0, 0}
                                                   : std::array<double, 2>{0, 1});
    c.radius = r.number("radius", 1.0);
    require(c.radius > 0, r.path("radius"), "must be positive");
    const std::string o = r.string("orientation", "ccw");
    require_one_of(o, r.path("orientation"), "ccw", "cw");
    c.ccw = o == "ccw";
    c.cache = r.integer("cache", 4096);
    require(c.cache >= 16 && c.cache <= (1 << 20), r.path("cache"), "must lie in [16, 2^20]");
    if (c.kind == "perturbed_circle") {
      c.eta = r.number("eta", 0.0);
      c.k = r.integer("k", 0);
    }
  } else if (c.kind == "vertical_geodesic" || c.kind == "hypercycle") {
    require(is("hyperbolic"), r.path("kind"), c.kind + " requires a hyperbolic surface");
    c.ell = r.number("ell", 1.0);
    require(c.ell > 0, r.path("ell"), "must be positive");
    if (c.kind == "vertical_geodesic") c.y0 = r.number("y0", 1.0);
    if (c.kind == "hypercycle") {
      c.d = r.number("d", 1.0);
      require(c.d > 0, r.path("d"), "must be positive");
    }
  } else if (c.kind == "torus_line") {
    require(is("flat_torus"), r.path("kind"), "torus_line requires a flat_torus surface");
    c.center = r.pair("point", {0, 0});
    c.m = r.integer("m", 1);
    c.n = r.integer("n", 0);
    require(c.m != 0 || c.n != 0, r.pointer(), "(m, n) must be nonzero");
  } else {
    c.path = r.string("path");
    c.cache = r.integer("cache", 4096);
  }
  r.finish();
  return c;
}

DeckConfig parse_deck(ObjectReader r) {
  DeckConfig d;
  d.kind = r.string("kind");
  require_one_of(d.kind, r.path("kind"), "axis_translation", "translation", "mobius");
  if (d.kind == "axis_translation") {
    d.length = r.number("length");
  } else if (d.kind == "translation") {
    d.m = r.integer("m");
    d.n = r.integer("n");
  } else {
    d.a = r.number("a");
    d.b = r.number("b");
    d.c = r.number("c");
    d.d = r.number("d");
  }
  r.finish();
  try {
    if (d.build().is_identity()) throw ConfigError(r.pointer(), "deck transform must not be the identity");
  } catch (const geoperiods::Error& e) {
    throw ConfigError(r.pointer(), e.what());
  }
  return d;
}

EigenConfig parse_eigen(ObjectReader r, const SurfaceConfig& surface, bool decay) {
  EigenConfig e;
  e.family = r.string("family");
  require_one_of(e.family, r.path("family"), "torus_wave", "sphere_zonal", "sphere_highest_weight",
                 "hyperbolic_wave_sum");
  const std::string need = e.family == "torus_wave"         ? "flat_torus"
                           : e.family == "hyperbolic_wave_sum" ? "hyperbolic"
                                                               : "round_sphere";
  require(surface.kind == need, r.path("family"), e.family + " requires a " + need + " surface");
  require(!decay || e.family == "hyperbolic_wave_sum", r.path("family"),
          "decay_scan uses hyperbolic_wave_sum");
  if (e.family == "torus_wave") e.cosine = r.boolean("cosine", false);
  if (e.family == "hyperbolic_wave_sum") {
    e.terms = r.integer("terms", 16);
    e.spread = r.number("spread", 4.0);
    require(e.terms >= (decay ? 8 : 1) && e.terms <= (decay ? 32 : 64), r.path("terms"),
            decay ? "must lie in [8, 32]" : "must lie in [1, 64]");
    require(e.spread > 0, r.path("spread"), "must be positive");
    if (decay) {
      e.ensemble = r.integer("ensemble", 16);
      require(e.ensemble >= 1 && e.ensemble <= 256, r.path("ensemble"), "must lie in [1, 256]");
    }
  }
  r.finish();
  return e;
}

void parse_grid_values(const std::vector<double>& v, const std::string& ptr, double lo, double hi) {
  for (std::size_t i = 0; i < v.size(); ++i)
    require(v[i] >= lo && v[i] <= hi, ptr + "/" + std::to_string(i),
            "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

}  // namespace

ExperimentConfig parse_config(const json& j, const std::string& subcommand,
                              std::optional<std::uint64_t> seed_override) {
  ObjectReader r(j, "");
  ExperimentConfig cfg;
  require_one_of(subcommand, "/subcommand", "limiting_curvature", "admissibility", "periods_scan",
                 "phase_check", "decay_scan");
  cfg.subcommand = subcommand;
  {
    const json& v = r.raw("schema_version");
    require(v.is_number_integer(), r.path("schema_version"), "expected integer");
    require(v.get<long>() == kSchemaVersion, r.path("schema_version"),
            "unsupported schema version (this build reads " + std::to_string(kSchemaVersion) + ")");
  }
  const std::string named = r.string("subcommand", subcommand);
  require(named == subcommand, r.path("subcommand"),
          "config is for '" + named + "', invoked as '" + subcommand + "'");
  cfg.surface = parse_surface(r.object("surface"));
  cfg.curve = parse_curve(r.object("curve"), cfg.surface);
  if (r.has("seed")) {
    const json& v = r.raw("seed");
    require(v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0),
            r.path("seed"), "expected a nonnegative integer");
    cfg.seed = v.get<std::uint64_t>();
  }
  if (seed_override) cfg.seed = *seed_override;
  cfg.output = r.string("output", "out");

  const bool nonpositive = cfg.surface.kind != "round_sphere";
  if (subcommand == "limiting_curvature" || subcommand == "admissibility") {
    require(nonpositive, "/surface/kind", subcommand + " requires nonpositive curvature");
    const bool adm = subcommand == "admissibility";
    cfg.samples = r.integer("samples", adm ? 512 : 64);
    require(cfg.samples >= 1 && cfg.samples <= 65536, r.path("samples"), "must lie in [1, 65536]");
    cfg.k_tol = r.number("k_tol", adm ? 1e-6 : 1e-8);
    require(cfg.k_tol > 0 && cfg.k_tol < 1, r.path("k_tol"), "must lie in (0, 1)");
    if (adm) {
      cfg.n_eps = r.integer("n_eps", 1001);
      require(cfg.n_eps >= 3 && cfg.n_eps <= 1000001, r.path("n_eps"), "must lie in [3, 1000001]");
    }
  } else if (subcommand == "periods_scan" || subcommand == "decay_scan") {
    const bool decay = subcommand == "decay_scan";
    require(!decay || cfg.surface.kind == "hyperbolic", "/surface/kind",
            "decay_scan requires a hyperbolic surface");
    cfg.eigen = parse_eigen(r.object("eigenfunction"), cfg.surface, decay);
    cfg.lambda = r.numbers("lambda");
    parse_grid_values(cfg.lambda, r.path("lambda"), decay ? 1e-6 : 0.0, 1e5);
    if (cfg.eigen->family.rfind("sphere_", 0) == 0)
      for (std::size_t i = 0; i < cfg.lambda.size(); ++i)
        require(cfg.lambda[i] == std::floor(cfg.lambda[i]) && cfg.lambda[i] <= 4096,
                r.path("lambda") + "/" + std::to_string(i),
                "sphere families take integer degrees n ≤ 4096");
    cfg.eps = r.numbers("eps");
    parse_grid_values(cfg.eps, r.path("eps"), -1.0, 1.0);
    cfg.envelope = r.integer("envelope", 8);
    require(cfg.envelope >= 1 && cfg.envelope <= 64, r.path("envelope"), "must lie in [1, 64]");
    if (r.has("quadrature")) {
      ObjectReader q = r.object("quadrature");
      cfg.quad_samples = q.integer("samples", 0);
      require(cfg.quad_samples == 0 || (cfg.quad_samples >= 8 && cfg.quad_samples % 2 == 0 &&
                                        cfg.quad_samples <= (1L << 24)),
              q.path("samples"), "must be 0 (automatic) or an even count in [8, 2^24]");
      q.finish();
    }
  } else {
    require(nonpositive, "/surface/kind", "phase_check requires nonpositive curvature");
    ObjectReader p = r.object("phase");
    cfg.phase.deck = parse_deck(p.object("deck"));
    const bool torus_deck = cfg.phase.deck.kind == "translation";
    require(torus_deck == (cfg.surface.kind == "flat_torus"), p.path("deck") + "/kind",
            torus_deck ? "translation requires a flat_torus surface"
                       : "Möbius deck transforms require a hyperbolic or conformal half-plane surface");
    cfg.phase.eps = p.number("eps", 0.0);
    require(std::abs(cfg.phase.eps) < 1, p.path("eps"), "|eps| must be < 1");
    cfg.phase.grid = p.integer("grid", 64);
    require(cfg.phase.grid >= 2 && cfg.phase.grid <= 1024, p.path("grid"), "must lie in [2, 1024]");
    cfg.phase.r_min = p.number("r_min", 1.0);
    cfg.phase.slack = p.number("slack", 1e-4);
    require(cfg.phase.slack >= 0, p.path("slack"), "must be nonnegative");
    cfg.phase.sandwich = p.boolean("sandwich", true);
    cfg.phase.seeds = p.integer("seeds", 8);
    require(cfg.phase.seeds >= 0 && cfg.phase.seeds <= 64, p.path("seeds"), "must lie in [0, 64]");
    if (p.has("pure")) {
      ObjectReader q = p.object("pure");
      PureConfig pc;
      const auto iv = q.numbers("interval");
      require(iv.size() == 2 && iv[0] < iv[1], q.path("interval"), "expected [a, b] with a < b");
      pc.a = iv[0];
      pc.b = iv[1];
      if (q.has("eps0")) {
        pc.eps0 = q.number("eps0");
        require(*pc.eps0 > 0, q.path("eps0"), "must be positive");
      }
      pc.delta = q.number("delta", 0.5);
      require(pc.delta > 0 && pc.delta < 1, q.path("delta"), "must lie in (0, 1)");
      pc.n = q.integer("n", 33);
      require(pc.n >= 2 && pc.n <= 512, q.path("n"), "must lie in [2, 512]");
      q.finish();
      cfg.phase.pure = pc;
    }
    p.finish();
  }
  r.finish();

  cfg.canonical = j;
  cfg.canonical.erase("output");
  cfg.canonical["subcommand"] = subcommand;
  cfg.canonical["seed"] = cfg.seed;
  return cfg;
}

}  // namespace geoperiods::cli
