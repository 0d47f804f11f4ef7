#include "geoperiods/admissibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "geoperiods/errors.hpp"
#include "geoperiods/jacobi.hpp"
#include "geoperiods/parallel.hpp"

namespace geoperiods {

namespace {

double margin_formula(const std::vector<double>& h, const std::vector<double>& kp,
                      const std::vector<double>& km, double eps) {
  const double s = std::sqrt(std::max(0.0, 1.0 - eps * eps));
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < h.size(); ++i)
    m = std::min({m, std::abs(h[i] + s * kp[i]), std::abs(h[i] - s * km[i])});
  return m;
}

void write_row(std::ostream& os, std::initializer_list<double> v) {
  bool first = true;
  for (double x : v) {
    if (!first) os << ',';
    os << x;
    first = false;
  }
  os << '\n';
}

}  // namespace

AdmissibilityReport AdmissibilityReport::from_samples(std::vector<double> t, std::vector<double> h,
                                                      std::vector<double> k_plus,
                                                      std::vector<double> k_minus,
                                                      std::size_t n_eps) {
  if (h.empty() || h.size() != t.size() || k_plus.size() != h.size() || k_minus.size() != h.size())
    throw RangeError("admissibility: sample arrays must be nonempty and of equal length");
  if (n_eps < 3) throw RangeError("admissibility: n_eps must be at least 3");
  AdmissibilityReport r;
  r.t = std::move(t);
  r.h = std::move(h);
  r.k_plus = std::move(k_plus);
  r.k_minus = std::move(k_minus);
  r.eps.resize(n_eps);
  r.margin.resize(n_eps);
  for (std::size_t j = 0; j < n_eps; ++j) {
    r.eps[j] = j + 1 == n_eps ? 1.0 : -1.0 + 2.0 * static_cast<double>(j) / static_cast<double>(n_eps - 1);
    r.margin[j] = margin_formula(r.h, r.k_plus, r.k_minus, r.eps[j]);
  }
  std::size_t j = 0;
  while (j < n_eps) {
    if (!(r.margin[j] > 0)) {
      ++j;
      continue;
    }
    std::size_t k = j;
    while (k + 1 < n_eps && r.margin[k + 1] > 0) ++k;
    const double lo = j == 0 ? -1.0 : r.eps[j - 1];
    const double hi = k + 1 == n_eps ? 1.0 : r.eps[k + 1];
    if (hi > lo) r.E.push_back({lo, hi});
    j = k + 1;
  }
  // Tangential zeros of the margin fall between grid points; locate them by
  // golden-section search around discrete local minima and split E there.
  double scale = 1.0;
  for (std::size_t i = 0; i < r.h.size(); ++i)
    scale = std::max({scale, std::abs(r.h[i]), std::abs(r.k_plus[i]), std::abs(r.k_minus[i])});
  const double zero_tol = 1e-10 * scale;
  auto f = [&](double e) { return margin_formula(r.h, r.k_plus, r.k_minus, e); };
  for (std::size_t i = 1; i + 1 < n_eps; ++i) {
    if (!(r.margin[i] > 0) || r.margin[i] > r.margin[i - 1] || r.margin[i] > r.margin[i + 1]) continue;
    double a = r.eps[i - 1], b = std::min(r.eps[i + 1], std::nextafter(1.0, 0.0));
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - g * (b - a), d = a + g * (b - a), fc = f(c), fd = f(d);
    while (b - a > 1e-14) {
      if (fc < fd) {
        b = d, d = c, fd = fc, c = b - g * (b - a), fc = f(c);
      } else {
        a = c, c = d, fc = fd, d = a + g * (b - a), fd = f(d);
      }
    }
    const double z = 0.5 * (a + b);
    if (f(z) > zero_tol) continue;
    for (std::size_t q = 0; q < r.E.size(); ++q) {
      const EpsInterval iv = r.E[q];
      if (!(z > iv.lo && z < iv.hi)) continue;
      r.E[q] = {iv.lo, z};
      r.E.insert(r.E.begin() + static_cast<std::ptrdiff_t>(q) + 1, EpsInterval{z, iv.hi});
      break;
    }
  }
  return r;
}

double AdmissibilityReport::margin_at(double e) const {
  if (!(std::abs(e) < 1.0)) throw RangeError("margin_at: |eps| must be < 1");
  return margin_formula(h, k_plus, k_minus, e);
}

bool AdmissibilityReport::admissible(double e) const {
  for (const auto& iv : E)
    if (e > iv.lo && e < iv.hi) return margin_at(e) > 0;
  return false;
}

void AdmissibilityReport::write_curve_csv(std::ostream& os) const {
  os << "t,h,k_plus,k_minus\n";
  for (std::size_t i = 0; i < t.size(); ++i) write_row(os, {t[i], h[i], k_plus[i], k_minus[i]});
}

void AdmissibilityReport::write_margin_csv(std::ostream& os) const {
  os << "eps,margin\n";
  for (std::size_t j = 0; j < eps.size(); ++j) write_row(os, {eps[j], margin[j]});
}

AdmissibilityReport admissible_eps(const Curve& c, std::size_t n_t, std::size_t n_eps, double k_tol,
                                   unsigned jobs) {
  const SurfaceSpec& S = c.surface();
  require_nonpositive(S, "admissible_eps");
  if (n_t < 1) throw RangeError("admissible_eps: n_t must be positive");
  struct Row {
    double t, h, kp, km;
  };
  const auto rows = parallel_map<Row>(n_t, jobs, [&](std::size_t i) {
    const double t = c.length() * static_cast<double>(i) / static_cast<double>(n_t);
    const TangentVec n = c.normal(t);
    const double kp = limiting_circle_curvature(S, n.base, n, k_tol);
    const double km = limiting_circle_curvature(S, n.base, TangentVec{n.base, -n.v}, k_tol);
    return Row{t, c.signed_normal_curvature(t), kp, km};
  });
  std::vector<double> t, h, kp, km;
  for (const auto& r : rows) {
    t.push_back(r.t);
    h.push_back(r.h);
    kp.push_back(r.kp);
    km.push_back(r.km);
  }
  return AdmissibilityReport::from_samples(std::move(t), std::move(h), std::move(kp), std::move(km),
                                           n_eps);
}

}  // namespace geoperiods
