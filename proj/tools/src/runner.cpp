#include "runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <numbers>
#include <numeric>
#include <sstream>
#include <unistd.h>

#include "geoperiods/admissibility.hpp"
#include "geoperiods/eigenfun.hpp"
#include "geoperiods/errors.hpp"
#include "geoperiods/jacobi.hpp"
#include "geoperiods/parallel.hpp"
#include "geoperiods/periods.hpp"
#include "geoperiods/phase.hpp"
#include "plot_scripts.hpp"

namespace geoperiods::cli {

namespace fs = std::filesystem;
using std::numbers::pi;

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

class Csv {
 public:
  explicit Csv(std::initializer_list<const char*> header) : cols_(header.size()) {
    bool first = true;
    for (const char* h : header) {
      out_ += first ? "" : ",";
      out_ += h;
      first = false;
    }
    out_ += '\n';
  }
  void row(std::initializer_list<double> v) {
    if (v.size() != cols_) throw std::logic_error("csv: column count mismatch");
    bool first = true;
    for (double x : v) {
      out_ += first ? "" : ",";
      out_ += fmt(x);
      first = false;
    }
    out_ += '\n';
  }
  std::string str() const { return out_; }

 private:
  std::size_t cols_;
  std::string out_;
};

ResultBundle start(const ExperimentConfig& cfg) {
  ResultBundle b;
  b.hash = cfg.hash_hex();
  b.subcommand = cfg.subcommand;
  b.summary = json::object();
  b.metadata = {{"version", kVersion}, {"schema_version", kSchemaVersion},
                {"hash", b.hash},      {"subcommand", cfg.subcommand},
                {"seed", cfg.seed},    {"config", cfg.canonical}};
  b.plot_script = plot_script_for(cfg.subcommand);
  return b;
}

Curve build_curve(const ExperimentConfig& cfg, const SurfaceSpec& S) {
  try {
    return cfg.curve.build(S);
  } catch (const ConvergenceError&) {
    throw;
  } catch (const geoperiods::Error& e) {
    throw ConfigError("/curve", e.what());
  }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

long nu_index(double nu_target, double L) { return std::llround(nu_target * L / (2 * pi)); }

}  // namespace

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) return std::nan("");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0) || !(y[i] > 0)) return std::nan("");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = 0.5 * (i + j) + 1;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman_rho(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() < 2 || x.size() != y.size()) return 0.0;
  const auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0 || syy == 0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

std::pair<long, long> nearest_lattice_vector(double L1, double L2, double rho) {
  const double u1 = 2 * pi / L1, u2 = 2 * pi / L2;
  std::pair<long, long> best{0, 0};
  double err = rho;
  const long m1_max = static_cast<long>(std::ceil(rho / u1)) + 1;
  for (long m1 = 0; m1 <= m1_max; ++m1) {
    const double k1 = m1 * u1;
    const double rest = std::sqrt(std::max(0.0, rho * rho - k1 * k1));
    for (long m2 : {static_cast<long>(std::floor(rest / u2)), static_cast<long>(std::ceil(rest / u2))}) {
      const double e = std::abs(std::hypot(k1, m2 * u2) - rho);
      if (e < err) err = e, best = {m1, m2};
    }
  }
  return best;
}

ResultBundle run_limiting_curvature(const ExperimentConfig& cfg, unsigned jobs) {
  const auto t0 = std::chrono::steady_clock::now();
  ResultBundle b = start(cfg);
  const SurfaceSpec S = cfg.surface.build();
  const Curve c = build_curve(cfg, S);
  const auto n = static_cast<std::size_t>(cfg.samples);
  struct Row {
    double t, kp, km;
  };
  const auto rows = parallel_map<Row>(n, jobs, [&](std::size_t i) {
    const double t = c.length() * static_cast<double>(i) / static_cast<double>(n);
    const TangentVec nv = c.normal(t);
    return Row{t, limiting_circle_curvature(S, nv.base, nv, cfg.k_tol),
               limiting_circle_curvature(S, nv.base, TangentVec{nv.base, -nv.v}, cfg.k_tol)};
  });
  Csv csv({"t", "k_plus", "k_minus"});
  double lo = 1e300, hi = -1e300;
  for (const auto& r : rows) {
    csv.row({r.t, r.kp, r.km});
    lo = std::min({lo, r.kp, r.km});
    hi = std::max({hi, r.kp, r.km});
  }
  b.csv["limiting_curvature.csv"] = csv.str();
  b.summary = {{"samples", n}, {"k_min", lo}, {"k_max", hi}, {"length", c.length()}};
  b.metadata["runtime_s"] = seconds_since(t0);
  return b;
}

ResultBundle run_admissibility(const ExperimentConfig& cfg, unsigned jobs) {
  const auto t0 = std::chrono::steady_clock::now();
  ResultBundle b = start(cfg);
  const SurfaceSpec S = cfg.surface.build();
  const Curve c = build_curve(cfg, S);
  const auto rep = admissible_eps(c, static_cast<std::size_t>(cfg.samples),
                                  static_cast<std::size_t>(cfg.n_eps), cfg.k_tol, jobs);
  std::ostringstream curve_csv, margin_csv;
  curve_csv.precision(17);
  margin_csv.precision(17);
  rep.write_curve_csv(curve_csv);
  rep.write_margin_csv(margin_csv);
  b.csv["admissibility_curve.csv"] = curve_csv.str();
  b.csv["admissibility_margin.csv"] = margin_csv.str();
  json E = json::array();
  for (const auto& iv : rep.E) E.push_back({iv.lo, iv.hi});
  b.summary = {{"E", E}, {"margin_at_0", rep.margin_at(0.0)}, {"admissible_at_0", rep.admissible(0.0)},
               {"length", c.length()}};
  b.metadata["runtime_s"] = seconds_since(t0);
  return b;
}

ResultBundle run_periods_scan(const ExperimentConfig& cfg, unsigned jobs) {
  const auto t0 = std::chrono::steady_clock::now();
  ResultBundle b = start(cfg);
  const SurfaceSpec S = cfg.surface.build();
  const Curve c = build_curve(cfg, S);
  const EigenConfig& ec = *cfg.eigen;
  const double L = c.length();
  const double r_eff = L / (2 * pi);
  const bool torus = ec.family == "torus_wave";

  struct Task {
    std::size_t ie, il;
    long member;
  };
  std::vector<Task> tasks;
  std::vector<long> members(cfg.eps.size());
  for (std::size_t ie = 0; ie < cfg.eps.size(); ++ie) {
    const bool env = torus && cfg.envelope > 1 && std::abs(cfg.eps[ie]) < 1;
    members[ie] = env ? cfg.envelope : 1;
    for (std::size_t il = 0; il < cfg.lambda.size(); ++il)
      for (long j = 0; j < members[ie]; ++j) tasks.push_back({ie, il, j});
  }
  struct Out {
    long i1, i2, m;
    double freq;
    PeriodResult res;
  };
  const auto outs = parallel_map<Out>(tasks.size(), jobs, [&](std::size_t k) {
    const Task& tk = tasks[k];
    const double eps = cfg.eps[tk.ie], lam = cfg.lambda[tk.il];
    std::optional<EigenfunctionSpec> e;
    long i1 = 0, i2 = 0;
    double nu_target;
    if (torus) {
      const auto* T = S.get_if<FlatTorus>();
      const double Q = static_cast<double>(members[tk.ie]);
      const double spacing = Q > 1 ? pi / (r_eff * std::sqrt(1 - eps * eps)) / Q : 0.0;
      const auto [m1, m2] = nearest_lattice_vector(T->L1, T->L2, lam + tk.member * spacing);
      e = EigenfunctionSpec::torus_wave(S, m1, m2, ec.cosine);
      i1 = m1, i2 = m2;
      nu_target = eps * lam;
    } else if (ec.family == "hyperbolic_wave_sum") {
      e = EigenfunctionSpec::random_wave_sum(S, lam, static_cast<int>(ec.terms), cfg.seed, ec.spread);
      nu_target = eps * e->frequency();
    } else {
      const int n = static_cast<int>(lam);
      e = ec.family == "sphere_zonal" ? EigenfunctionSpec::sphere_zonal(S, n)
                                      : EigenfunctionSpec::sphere_highest_weight(S, n);
      i1 = n;
      nu_target = eps * e->frequency();
    }
    const long m = nu_index(nu_target, L);
    return Out{i1, i2, m, e->frequency(),
               generalized_period_m(*e, c, m, static_cast<std::size_t>(cfg.quad_samples))};
  });

  Csv rows({"eps", "lambda", "member", "index1", "index2", "frequency", "m", "nu", "re", "im", "abs",
            "N", "err_est"});
  Csv env({"eps", "lambda", "m", "nu", "abs_raw", "abs_envelope"});
  Csv slopes({"eps", "slope_raw", "slope_envelope"});
  json slope_summary = json::array();
  double worst = 0.0;
  std::size_t k = 0;
  for (std::size_t ie = 0; ie < cfg.eps.size(); ++ie) {
    std::vector<double> raw, rms;
    for (std::size_t il = 0; il < cfg.lambda.size(); ++il) {
      double sq = 0, first = 0;
      long m = 0;
      double nu = 0;
      for (long j = 0; j < members[ie]; ++j, ++k) {
        const Out& o = outs[k];
        const double a = std::abs(o.res.coeff);
        rows.row({cfg.eps[ie], cfg.lambda[il], double(j), double(o.i1), double(o.i2), o.freq,
                  double(o.res.m), o.res.nu, o.res.coeff.real(), o.res.coeff.imag(), a,
                  double(o.res.N), o.res.err_est});
        worst = std::max(worst, o.res.err_est / (1 + a));
        sq += a * a;
        if (j == 0) first = a, m = o.res.m, nu = o.res.nu;
      }
      const double r = std::sqrt(sq / members[ie]);
      raw.push_back(first);
      rms.push_back(r);
      env.row({cfg.eps[ie], cfg.lambda[il], double(m), nu, first, r});
    }
    const double s_raw = loglog_slope(cfg.lambda, raw), s_env = loglog_slope(cfg.lambda, rms);
    slopes.row({cfg.eps[ie], s_raw, s_env});
    slope_summary.push_back({{"eps", cfg.eps[ie]},
                             {"slope_raw", std::isfinite(s_raw) ? json(s_raw) : json(nullptr)},
                             {"slope_envelope", std::isfinite(s_env) ? json(s_env) : json(nullptr)},
                             {"members", members[ie]}});
  }
  b.csv["periods.csv"] = rows.str();
  b.csv["periods_envelope.csv"] = env.str();
  b.csv["periods_slopes.csv"] = slopes.str();
  b.summary = {{"family", ec.family},
               {"length", L},
               {"slopes", slope_summary},
               {"max_err_ratio", worst},
               {"certified", worst <= 1e-8}};
  b.metadata["notes"] = json::array(
      {"nu is the multiple of 2*pi/L nearest eps*lambda", "sphere grids list degrees n; frequency is sqrt(n(n+1))/R",
       "torus envelope: RMS over lattice frequencies spaced pi/(r sqrt(1-eps^2))/Q above lambda, nu fixed"});
  b.metadata["runtime_s"] = seconds_since(t0);
  return b;
}

ResultBundle run_phase_check(const ExperimentConfig& cfg, unsigned jobs) {
  const auto t0 = std::chrono::steady_clock::now();
  ResultBundle b = start(cfg);
  const SurfaceSpec S = cfg.surface.build();
  const auto c = std::make_shared<const Curve>(build_curve(cfg, S));
  const PhaseConfig& pc = cfg.phase;
  const DeckTransform alpha = pc.deck.build();
  const double L = c->length();
  std::vector<double> grid(static_cast<std::size_t>(pc.grid));
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = L * static_cast<double>(i) / grid.size();

  PhaseGrid g;
  try {
    g = build_phase_grid(c, alpha, pc.eps, grid, grid, jobs);
  } catch (const ProximityError& e) {
    throw ConfigError("/phase/deck", e.what());
  }
  std::ostringstream dump;
  g.write_csv(dump);
  b.csv["phase_grid.csv"] = dump.str();

  const auto mixed = mixed_bound_check(g, pc.r_min, pc.slack);
  std::size_t good = 0;
  double worst_rel = 0;
  for (const auto& n : g.nodes) {
    const double rt = std::abs(n.tt - n.fd_tt) / std::max(std::abs(n.fd_tt), 1e-12);
    const double rs = std::abs(n.ss - n.fd_ss) / std::max(std::abs(n.fd_ss), 1e-12);
    worst_rel = std::max({worst_rel, rt, rs});
    good += rt <= 1e-3 && rs <= 1e-3;
  }
  b.summary["mixed_bound"] = {{"holds", mixed.holds},
                              {"checked", mixed.checked},
                              {"max_excess", mixed.max_excess},
                              {"r_min", pc.r_min}};
  b.summary["hessian_formulas"] = {{"nodes", g.nodes.size()},
                                   {"within_1e-3", good},
                                   {"fraction", double(good) / g.nodes.size()},
                                   {"max_relative_error", worst_rel}};
  if (pc.sandwich) {
    const auto sw = circle_sandwich_check(g, 1e-10, jobs);
    b.summary["circle_sandwich"] = {
        {"holds", sw.holds}, {"checked", sw.checked}, {"min_gap", sw.min_gap}, {"max_excess", sw.max_excess}};
  }
  if (pc.pure) {
    const PureConfig& q = *pc.pure;
    const double eps0 =
        q.eps0 ? *q.eps0 : admissible_eps(*c, 64, 201, 1e-6, jobs).margin_at(pc.eps) / 2;
    if (!(eps0 > 0)) throw ConfigError("/phase/pure/eps0", "curve has zero admissibility margin at eps");
    const auto rep = pure_derivative_check(*c, alpha, pc.eps, q.a, q.b, eps0, q.delta,
                                           static_cast<std::size_t>(q.n), jobs);
    b.summary["pure_derivative"] = {{"hypothesis_met", rep.hypothesis_met},
                                    {"min_hypothesis", rep.min_hypothesis},
                                    {"eps0", eps0},
                                    {"delta", q.delta},
                                    {"antecedent", rep.antecedent},
                                    {"min_abs_ds", rep.min_abs_ds},
                                    {"min_abs_dss", rep.min_abs_dss},
                                    {"bound", rep.bound},
                                    {"implication_holds", rep.implication_holds},
                                    {"r_min", rep.r_min},
                                    {"large_r_threshold", rep.large_r_threshold},
                                    {"large_r_applicable", rep.large_r_applicable},
                                    {"max_abs_ts", rep.max_abs_ts},
                                    {"large_r_holds", rep.large_r_holds}};
    if (!rep.hypothesis_met) b.status = kHypothesisNotMet;
  }
  if (pc.seeds > 0 && std::abs(pc.eps) <= 1 - 1e-3) {
    const auto cp = critical_points(*c, alpha, pc.eps, grid_seeds(L, static_cast<std::size_t>(pc.seeds)), jobs);
    Csv csv({"t", "s", "cos_t", "cos_s", "grad_norm", "hessian_det"});
    double worst = 0;
    for (const auto& p : cp.points) {
      csv.row({p.t, p.s, p.cos_t, p.cos_s, p.grad_norm, p.det});
      worst = std::max({worst, std::abs(p.cos_t + pc.eps), std::abs(p.cos_s - pc.eps)});
    }
    b.csv["critical_points.csv"] = csv.str();
    b.summary["critical_points"] = {{"found", cp.points.size()},
                                    {"skipped_seeds", cp.skipped.size()},
                                    {"max_cosine_error", worst},
                                    {"angle_law_holds", worst <= 1e-6}};
  }
  b.metadata["runtime_s"] = seconds_since(t0);
  return b;
}

ResultBundle run_decay_scan(const ExperimentConfig& cfg, unsigned jobs) {
  const auto t0 = std::chrono::steady_clock::now();
  ResultBundle b = start(cfg);
  const SurfaceSpec S = cfg.surface.build();
  const Curve c = build_curve(cfg, S);
  const EigenConfig& ec = *cfg.eigen;
  const double L = c.length();
  const auto E = static_cast<std::size_t>(ec.ensemble);
  const auto Q = static_cast<std::size_t>(cfg.envelope);
  const bool circle = cfg.curve.kind == "geodesic_circle" || cfg.curve.kind == "perturbed_circle";
  const double r_eff = circle ? cfg.curve.radius : L / (2 * pi);
  const std::size_t nl = cfg.lambda.size(), ne = cfg.eps.size();
  struct Out {
    PeriodResult res;
    double l2;
  };
  // index = ((ie * nl + il) * Q + q) * E + member
  const auto outs = parallel_map<Out>(ne * nl * Q * E, jobs, [&](std::size_t k) {
    const std::size_t member = k % E, q = (k / E) % Q, il = (k / (E * Q)) % nl, ie = k / (E * Q * nl);
    const double eps = cfg.eps[ie], lam = cfg.lambda[il];
    const auto nominal = EigenfunctionSpec::random_wave_sum(S, lam, 1, 0, ec.spread);
    const long m = nu_index(eps * nominal.frequency(), L);
    const double spacing = Q > 1 ? pi / (r_eff * std::sqrt(1 - eps * eps)) / double(Q) : 0.0;
    const double lq = lam + double(q) * spacing * lam / nominal.frequency();
    const auto e = EigenfunctionSpec::random_wave_sum(S, lq, static_cast<int>(ec.terms),
                                                      cfg.seed + member, ec.spread);
    std::size_t N = static_cast<std::size_t>(cfg.quad_samples);
    if (N == 0) N = auto_samples(e.frequency(), 2 * pi * m / L, L);
    const auto res = generalized_period_m(e, c, m, N);
    double sq = 0;
    for (const auto& v : sample_on_curve(e, c, N)) sq += std::norm(v);
    return Out{res, std::sqrt(sq * L / N)};
  });
  Csv members({"eps", "lambda", "window", "lambda_window", "member", "m", "nu", "re", "im", "abs",
               "l2_on_curve", "ratio", "N", "err_est"});
  Csv decay({"eps", "lambda", "m", "nu", "rms_ratio", "max_err_est"});
  Csv trend({"eps", "spearman_rho"});
  json trend_summary = json::array();
  bool all_ok = true;
  double worst = 0;
  for (std::size_t ie = 0; ie < ne; ++ie) {
    std::vector<double> rms;
    for (std::size_t il = 0; il < nl; ++il) {
      double sq = 0, err = 0;
      const Out& first = outs[(ie * nl + il) * Q * E];
      for (std::size_t q = 0; q < Q; ++q)
        for (std::size_t j = 0; j < E; ++j) {
          const Out& o = outs[((ie * nl + il) * Q + q) * E + j];
          const double a = std::abs(o.res.coeff);
          const double ratio = o.l2 > 0 ? a / (std::sqrt(L) * o.l2) : 0.0;
          members.row({cfg.eps[ie], cfg.lambda[il], double(q), o.res.lambda, double(j), double(o.res.m),
                       o.res.nu, o.res.coeff.real(), o.res.coeff.imag(), a, o.l2, ratio,
                       double(o.res.N), o.res.err_est});
          sq += ratio * ratio;
          err = std::max(err, o.res.err_est);
          worst = std::max(worst, o.res.err_est / (1 + a));
        }
      rms.push_back(std::sqrt(sq / double(E * Q)));
      decay.row({cfg.eps[ie], cfg.lambda[il], double(first.res.m), first.res.nu, rms.back(), err});
    }
    const double rho = spearman_rho(cfg.lambda, rms);
    trend.row({cfg.eps[ie], rho});
    all_ok = all_ok && rho <= 0;
    trend_summary.push_back({{"eps", cfg.eps[ie]}, {"spearman_rho", rho}, {"nonincreasing", rho <= 0}});
  }
  b.csv["decay_members.csv"] = members.str();
  b.csv["decay.csv"] = decay.str();
  b.csv["decay_trend.csv"] = trend.str();
  b.summary = {{"trend", trend_summary},
               {"all_nonincreasing", all_ok},
               {"ensemble", E},
               {"envelope", Q},
               {"terms", ec.terms},
               {"length", L},
               {"max_err_ratio", worst},
               {"certified", worst <= 1e-8}};
  b.metadata["notes"] = json::array(
      {"ratio = |coeff| / (sqrt(L) * ||e||_L2(curve)), bounded by 1",
       "rms over the ensemble and over Q spectral parameters spaced pi/(r sqrt(1-eps^2))/Q above lambda, nu fixed",
       "ensemble member j uses seed + j", "frequency is the spectral parameter a*lambda"});
  b.metadata["runtime_s"] = seconds_since(t0);
  return b;
}

ResultBundle run(const ExperimentConfig& cfg, unsigned jobs) {
  if (cfg.subcommand == "limiting_curvature") return run_limiting_curvature(cfg, jobs);
  if (cfg.subcommand == "admissibility") return run_admissibility(cfg, jobs);
  if (cfg.subcommand == "periods_scan") return run_periods_scan(cfg, jobs);
  if (cfg.subcommand == "phase_check") return run_phase_check(cfg, jobs);
  if (cfg.subcommand == "decay_scan") return run_decay_scan(cfg, jobs);
  throw ConfigError("/subcommand", "unknown subcommand '" + cfg.subcommand + "'");
}

void atomic_write(const fs::path& target, const std::string& contents) {
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

void write_bundle(const ResultBundle& b, const fs::path& dir) {
  fs::create_directories(dir);
  for (const auto& [name, text] : b.csv) atomic_write(dir / name, text);
  atomic_write(dir / "summary.json", b.summary.dump(2) + "\n");
  atomic_write(dir / "metadata.json", b.metadata.dump(2) + "\n");
  atomic_write(dir / "plot.py", b.plot_script);
}

json bundle_to_json(const ResultBundle& b) {
  return {{"hash", b.hash},     {"subcommand", b.subcommand}, {"csv", b.csv},
          {"summary", b.summary}, {"metadata", b.metadata},     {"plot_script", b.plot_script},
          {"status", b.status}};
}

ResultBundle bundle_from_json(const json& j) {
  ResultBundle b;
  b.hash = j.at("hash").get<std::string>();
  b.subcommand = j.at("subcommand").get<std::string>();
  b.csv = j.at("csv").get<std::map<std::string, std::string>>();
  b.summary = j.at("summary");
  b.metadata = j.at("metadata");
  b.plot_script = j.at("plot_script").get<std::string>();
  b.status = j.at("status").get<int>();
  return b;
}

fs::path cache_dir() {
  if (const char* p = std::getenv("GEOPERIODS_CACHE"); p && *p) return p;
  if (const char* p = std::getenv("XDG_CACHE_HOME"); p && *p) return fs::path(p) / "geoperiods";
  if (const char* p = std::getenv("HOME"); p && *p) return fs::path(p) / ".cache" / "geoperiods";
  return fs::temp_directory_path() / "geoperiods-cache";
}

std::optional<ResultBundle> cache_load(const fs::path& dir, const std::string& hash) {
  const fs::path p = dir / (hash + ".json");
  std::ifstream in(p);
  if (!in) return std::nullopt;
  try {
    ResultBundle b = bundle_from_json(json::parse(in));
    if (b.hash != hash) return std::nullopt;
    return b;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

void cache_store(const fs::path& dir, const ResultBundle& b) {
  atomic_write(dir / (b.hash + ".json"), bundle_to_json(b).dump());
}

}  // namespace geoperiods::cli
