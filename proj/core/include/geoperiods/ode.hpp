#pragma once

// Adaptive Dormand–Prince 5(4) integrator with a pluggable error scale, plus a
// cubic-Hermite dense path built from the accepted steps.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <utility>
#include <vector>

#include "geoperiods/errors.hpp"

namespace geoperiods::ode {

template <std::size_t N>
using State = std::array<double, N>;

struct Options {
  double rtol = 1e-11;
  double atol = 1e-13;
  double h_init = 0.0;  // 0 selects 1e-2 of the span
  double h_max = 0.0;   // 0 means unbounded
  std::size_t max_steps = 2'000'000;
};

template <std::size_t N>
struct StepRecord {
  double t;
  State<N> y;
  State<N> f;
};

namespace detail {

template <std::size_t N>
State<N> axpy(const State<N>& y, double h, std::initializer_list<std::pair<double, const State<N>*>> terms) {
  State<N> out = y;
  for (const auto& [c, k] : terms) {
    if (c == 0.0) continue;
    for (std::size_t i = 0; i < N; ++i) out[i] += h * c * (*k)[i];
  }
  return out;
}

}  // namespace detail

/// Default error scale: atol + rtol·max(|y_old|, |y_new|) per component.
struct MixedScale {
  double rtol, atol;
  template <std::size_t N>
  double operator()(const State<N>& y_old, const State<N>& y_new, std::size_t i) const {
    return atol + rtol * std::max(std::abs(y_old[i]), std::abs(y_new[i]));
  }
};

struct NoObserver {
  template <class T>
  void operator()(const T&) const {}
};

/// Integrates y' = rhs(t, y) from t0 to t1 (either direction). `rhs` returns
/// std::nullopt when the state is outside the domain of the vector field; the
/// step is then rejected and shrunk, and an EscapeError carrying the last
/// accepted parameter is raised once the step collapses.
template <std::size_t N, class Rhs, class Scale = MixedScale, class Observer = NoObserver>
State<N> dopri5(Rhs&& rhs, double t0, State<N> y, double t1, const Options& opt,
                Scale&& scale, Observer&& observe) {
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  const double span = t1 - t0;
  if (span == 0.0) {
    if (auto f0 = rhs(t0, y)) observe(StepRecord<N>{t0, y, *f0});
    return y;
  }
  const double dir = span > 0 ? 1.0 : -1.0;
  auto f0 = rhs(t0, y);
  if (!f0) throw DomainError("ode: initial state outside the domain of the vector field");
  State<N> k1 = *f0;
  observe(StepRecord<N>{t0, y, k1});

  double h = opt.h_init > 0 ? opt.h_init : 1e-2 * std::abs(span);
  h = std::min(h, std::abs(span));
  if (opt.h_max > 0) h = std::min(h, opt.h_max);
  double t = t0;
  std::size_t steps = 0;
  const double h_floor = 1e-14 * std::max(1.0, std::abs(t1));

  while (dir * (t1 - t) > 0) {
    if (++steps > opt.max_steps) throw ConvergenceError("ode: step budget exhausted");
    if (h > std::abs(t1 - t)) h = std::abs(t1 - t);
    const double hs = dir * h;

    bool ok = true;
    auto stage = [&](double c, const State<N>& ys) -> State<N> {
      if (!ok) return ys;
      auto f = rhs(t + c * hs, ys);
      if (!f) { ok = false; return ys; }
      return *f;
    };
    const State<N> k2 = stage(c2, detail::axpy<N>(y, hs, {{a21, &k1}}));
    const State<N> k3 = stage(c3, detail::axpy<N>(y, hs, {{a31, &k1}, {a32, &k2}}));
    const State<N> k4 = stage(c4, detail::axpy<N>(y, hs, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const State<N> k5 =
        stage(c5, detail::axpy<N>(y, hs, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const State<N> k6 = stage(
        1.0, detail::axpy<N>(y, hs, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    const State<N> y_new =
        detail::axpy<N>(y, hs, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    const State<N> k7 = stage(1.0, y_new);

    double err = 0.0;
    if (ok) {
      for (std::size_t i = 0; i < N; ++i) {
        const double ei =
            hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        const double sc = scale(y, y_new, i);
        err += (ei / sc) * (ei / sc);
      }
      err = std::sqrt(err / static_cast<double>(N));
      if (!std::isfinite(err)) ok = false;
    }
    if (!ok) {
      h *= 0.25;
      if (h < h_floor) throw EscapeError("ode: trajectory left the domain", t);
      continue;
    }
    if (err <= 1.0) {
      t += hs;
      y = y_new;
      k1 = k7;
      observe(StepRecord<N>{t, y, k1});
      const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      h *= fac;
    } else {
      h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
      if (h < h_floor) throw ConvergenceError("ode: step size underflow");
    }
    if (opt.h_max > 0) h = std::min(h, opt.h_max);
  }
  return y;
}

template <std::size_t N, class Rhs>
State<N> dopri5(Rhs&& rhs, double t0, State<N> y, double t1, const Options& opt = {}) {
  return dopri5<N>(std::forward<Rhs>(rhs), t0, y, t1, opt, MixedScale{opt.rtol, opt.atol},
                   NoObserver{});
}

/// Piecewise cubic Hermite interpolant through accepted steps. Records may be
/// appended in increasing or decreasing parameter order, but not mixed.
template <std::size_t N>
class DensePath {
 public:
  void push(const StepRecord<N>& rec) {
    if (!steps_.empty() && rec.t == steps_.back().t) return;
    steps_.push_back(rec);
  }
  bool empty() const { return steps_.empty(); }
  double front_t() const { return steps_.front().t; }
  double back_t() const { return steps_.back().t; }
  const std::vector<StepRecord<N>>& steps() const { return steps_; }

  State<N> at(double t) const {
    if (steps_.size() == 1) return steps_.front().y;
    const bool increasing = steps_.back().t > steps_.front().t;
    auto less = [&](const StepRecord<N>& rec, double value) {
      return increasing ? rec.t < value : rec.t > value;
    };
    auto it = std::lower_bound(steps_.begin(), steps_.end(), t, less);
    std::size_t j = static_cast<std::size_t>(it - steps_.begin());
    j = std::clamp<std::size_t>(j, 1, steps_.size() - 1);
    const auto& p0 = steps_[j - 1];
    const auto& p1 = steps_[j];
    const double h = p1.t - p0.t;
    const double s = (t - p0.t) / h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    const double h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s);
    const double h11 = s * s * (s - 1);
    State<N> out{};
    for (std::size_t i = 0; i < N; ++i)
      out[i] = h00 * p0.y[i] + h10 * h * p0.f[i] + h01 * p1.y[i] + h11 * h * p1.f[i];
    return out;
  }

 private:
  std::vector<StepRecord<N>> steps_;
};

}  // namespace geoperiods::ode
