#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "config.hpp"
#include "doctest.h"
#include "geoperiods/periods.hpp"
#include "runner.hpp"

using namespace geoperiods;
using namespace geoperiods::cli;
using std::numbers::pi;
using cplx = std::complex<double>;
namespace fs = std::filesystem;

namespace {

json limiting_cfg() {
  return json::parse(R"({
    "schema_version": 1,
    "subcommand": "limiting_curvature",
    "surface": {"kind": "hyperbolic", "a": 1},
    "curve": {"kind": "geodesic_circle", "center": [0, 1], "radius": 1},
    "samples": 16
  })");
}

json decay_cfg() {
  return json::parse(R"({
    "schema_version": 1,
    "surface": {"kind": "hyperbolic", "a": 1},
    "curve": {"kind": "geodesic_circle", "center": [0, 1], "radius": 1},
    "eigenfunction": {"family": "hyperbolic_wave_sum", "terms": 8, "ensemble": 2},
    "lambda": [20],
    "eps": [0, 0.5],
    "envelope": 2,
    "seed": 3
  })");
}

std::string error_of(const json& j, const std::string& sub) {
  try {
    parse_config(j, sub);
  } catch (const ConfigError& e) {
    return e.pointer();
  }
  return "<none>";
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("geoperiods_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("config errors carry a JSON pointer") {
  json j = limiting_cfg();
  j["surface"]["bogus"] = 1;
  CHECK(error_of(j, "limiting_curvature") == "/surface/bogus");

  j = limiting_cfg();
  j.erase("schema_version");
  CHECK(error_of(j, "limiting_curvature") == "/schema_version");

  j = limiting_cfg();
  j["schema_version"] = 2;
  CHECK(error_of(j, "limiting_curvature") == "/schema_version");

  j = limiting_cfg();
  CHECK(error_of(j, "admissibility") == "/subcommand");

  j = limiting_cfg();
  j["curve"]["radius"] = -1;
  CHECK(error_of(j, "limiting_curvature") == "/curve/radius");

  j = decay_cfg();
  j["eigenfunction"]["terms"] = 40;
  CHECK(error_of(j, "decay_scan") == "/eigenfunction/terms");

  j = decay_cfg();
  j["surface"] = {{"kind", "flat_torus"}};
  CHECK(error_of(j, "decay_scan") == "/surface/kind");

  try {
    json k = limiting_cfg();
    k["extra"] = true;
    parse_config(k, "limiting_curvature");
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("config error at /extra") == 0);
  }
}

TEST_CASE("hash ignores key order and output, follows the seed") {
  const auto a = parse_config(limiting_cfg(), "limiting_curvature");
  const json reordered = json::parse(R"({
    "samples": 16,
    "curve": {"radius": 1, "center": [0, 1], "kind": "geodesic_circle"},
    "surface": {"a": 1, "kind": "hyperbolic"},
    "subcommand": "limiting_curvature",
    "schema_version": 1,
    "output": "elsewhere"
  })");
  const auto b = parse_config(reordered, "limiting_curvature");
  CHECK(a.hash_hex() == b.hash_hex());
  CHECK(a.hash_hex().size() == 16);
  const auto c = parse_config(limiting_cfg(), "limiting_curvature", 99);
  CHECK(c.hash_hex() != a.hash_hex());
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("limiting curvature subcommand") {
  auto cfg = parse_config(limiting_cfg(), "limiting_curvature");
  const auto b = run(cfg, 2);
  CHECK(b.status == kOk);
  CHECK(b.summary["k_min"].get<double>() == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(b.summary["k_max"].get<double>() == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(b.csv.at("limiting_curvature.csv").rfind("t,k_plus,k_minus\n", 0) == 0);

  json flat = limiting_cfg();
  flat["surface"] = {{"kind", "flat_torus"}};
  flat["curve"]["center"] = {3, 3};
  const auto f = run(parse_config(flat, "limiting_curvature"), 2);
  CHECK(std::abs(f.summary["k_max"].get<double>()) <= 1e-8);
}

TEST_CASE("determinism across runs and thread counts") {
  const auto cfg = parse_config(limiting_cfg(), "limiting_curvature");
  const auto a = run(cfg, 1), b = run(cfg, 4);
  CHECK(a.csv == b.csv);
  CHECK(a.summary == b.summary);

  const fs::path d1 = scratch("det1"), d2 = scratch("det2");
  write_bundle(a, d1);
  write_bundle(b, d2);
  CHECK(slurp(d1 / "limiting_curvature.csv") == slurp(d2 / "limiting_curvature.csv"));
  CHECK(slurp(d1 / "summary.json") == slurp(d2 / "summary.json"));
  CHECK(fs::exists(d1 / "metadata.json"));
  CHECK(fs::exists(d1 / "plot.py"));
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST_CASE("cached bundle equals recomputed bundle") {
  const fs::path dir = scratch("cache");
  const auto cfg = parse_config(decay_cfg(), "decay_scan");
  const auto fresh = run(cfg, 2);
  CHECK_FALSE(cache_load(dir, fresh.hash).has_value());
  cache_store(dir, fresh);
  const auto hit = cache_load(dir, cfg.hash_hex());
  REQUIRE(hit.has_value());
  CHECK(hit->csv == fresh.csv);
  CHECK(hit->summary == fresh.summary);
  CHECK(hit->status == fresh.status);
  const auto again = run(cfg, 3);
  CHECK(again.csv == hit->csv);

  const auto rt = bundle_from_json(bundle_to_json(fresh));
  CHECK(rt.csv == fresh.csv);
  CHECK(rt.plot_script == fresh.plot_script);

  setenv("GEOPERIODS_CACHE", dir.c_str(), 1);
  CHECK(cache_dir() == dir);
  unsetenv("GEOPERIODS_CACHE");
  fs::remove_all(dir);
}

TEST_CASE("admissibility subcommand on a hyperbolic circle") {
  json j = json::parse(R"({
    "schema_version": 1,
    "surface": {"kind": "hyperbolic", "a": 1},
    "curve": {"kind": "geodesic_circle", "center": [0, 1], "radius": 1},
    "samples": 32,
    "n_eps": 201
  })");
  const auto b = run(parse_config(j, "admissibility"), 0);
  CHECK(b.summary["margin_at_0"].get<double>() == doctest::Approx(1 / std::tanh(1.0) - 1).epsilon(1e-6));
  CHECK(b.summary["admissible_at_0"].get<bool>());
  REQUIRE(b.summary["E"].size() == 1);
  CHECK(b.summary["E"][0][0].get<double>() == doctest::Approx(-1.0));
  CHECK(b.summary["E"][0][1].get<double>() == doctest::Approx(1.0));
}

TEST_CASE("decay scan: single lambda is a trivial trend") {
  const auto b = run(parse_config(decay_cfg(), "decay_scan"), 0);
  CHECK(b.summary["all_nonincreasing"].get<bool>());
  for (const auto& t : b.summary["trend"]) CHECK(t["spearman_rho"].get<double>() == 0.0);
  CHECK(b.summary["certified"].get<bool>());
}

TEST_CASE("single b = infinity term against a one-dimensional oracle") {
  // Geodesic circle of radius r about i in hyperbolic polar angle ψ:
  // z = i(1 + w)/(1 − w), w = tanh(r/2)e^{iψ}, ds = sinh(r) dψ.
  const auto H = SurfaceSpec::hyperbolic(1.0);
  const double r = 1.0, lam = 10.0;
  const auto c = geodesic_circle(H, {0.0, 1.0}, r);
  const auto e = EigenfunctionSpec::hyperbolic_wave_sum(H, {WaveTerm{std::nullopt, {1.0, 0.0}}}, lam);
  const double rho = std::tanh(r / 2);
  auto oracle = [&](long m) {
    auto f = [&](double psi, bool imag) {
      const cplx w = std::polar(rho, psi);
      const double y = (1 - rho * rho) / std::norm(1.0 - w);
      const cplx v = std::pow(cplx(y, 0), cplx(0.5, lam)) * std::polar(1.0, -double(m) * psi);
      return imag ? v.imag() : v.real();
    };
    cplx sum = 0;
    for (int k = 0; k < 16; ++k) {
      const double a = 2 * pi * k / 16, b = 2 * pi * (k + 1) / 16;
      const double re = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
          [&](double p) { return f(p, false); }, a, b, 15, 1e-14);
      const double im = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
          [&](double p) { return f(p, true); }, a, b, 15, 1e-14);
      sum += cplx(re, im);
    }
    return std::sinh(r) * sum;
  };
  const auto p0 = generalized_period_m(e, c, 0);
  const cplx o0 = oracle(0);
  CHECK(std::abs(p0.coeff - o0) <= 1e-8);
  for (long m : {1L, 3L, 7L}) {
    const auto p = generalized_period_m(e, c, m);
    CHECK(std::abs(std::abs(p.coeff) - std::abs(oracle(m))) <= 1e-8);
  }
}

TEST_CASE("statistics helpers") {
  CHECK(spearman_rho({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0));
  CHECK(spearman_rho({1, 2, 3, 4}, {1, 4, 3, 2}) == doctest::Approx(0.2));
  CHECK(spearman_rho({1}, {5}) == 0.0);
  CHECK(spearman_rho({1, 2, 3}, {1, 1, 1}) == 0.0);
  CHECK(loglog_slope({1, 2, 4, 8}, {1, 0.5, 0.25, 0.125}) == doctest::Approx(-1.0));
  CHECK(fmt(0.1) == "0.10000000000000001");
  const auto [m1, m2] = nearest_lattice_vector(2 * pi, 2 * pi, 5.0);
  CHECK(std::hypot(double(m1), double(m2)) == 5.0);
}

TEST_CASE("atomic write replaces the target") {
  const fs::path dir = scratch("atomic");
  atomic_write(dir / "x.txt", "one");
  atomic_write(dir / "x.txt", "two");
  CHECK(slurp(dir / "x.txt") == "two");
  std::size_t n = 0;
  for ([[maybe_unused]] const auto& _ : fs::directory_iterator(dir)) ++n;
  CHECK(n == 1);
  fs::remove_all(dir);
}
