#pragma once

// Exact model eigenfunctions: torus plane waves, zonal and highest-weight
// spherical harmonics, and finite Poisson-kernel sums on the half-plane.

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "geoperiods/surface.hpp"

namespace geoperiods {

/// exp(i⟨k, x⟩) with k = (2πm/L1, 2πn/L2); `cosine` selects cos⟨k, x⟩.
struct TorusWave {
  long m = 0, n = 0;
  bool cosine = false;
};
struct SphereZonal {
  int n = 0;
};
struct SphereHighestWeight {
  int n = 1;
};
/// One term amp·P(z, b)^{1/2 + iλ}; b = nullopt is the point at infinity.
struct WaveTerm {
  std::optional<double> b;
  std::complex<double> amp{1.0, 0.0};
};
struct HyperbolicWaveSum {
  std::vector<WaveTerm> terms;
  double lambda = 1.0;
};

class EigenfunctionSpec {
 public:
  using Variant = std::variant<TorusWave, SphereZonal, SphereHighestWeight, HyperbolicWaveSum>;
  static constexpr int kMaxDegree = 4096;

  static EigenfunctionSpec torus_wave(const SurfaceSpec& S, long m, long n, bool cosine = false);
  static EigenfunctionSpec sphere_zonal(const SurfaceSpec& S, int n);
  static EigenfunctionSpec sphere_highest_weight(const SurfaceSpec& S, int n);
  static EigenfunctionSpec hyperbolic_wave_sum(const SurfaceSpec& S, std::vector<WaveTerm> terms,
                                               double lambda);
  /// `count` terms with boundary points uniform in [−spread, spread] and
  /// unit-modulus amplitudes, drawn from a seeded mt19937_64.
  static EigenfunctionSpec random_wave_sum(const SurfaceSpec& S, double lambda, int count,
                                           std::uint64_t seed, double spread = 4.0);

  const SurfaceSpec& surface() const { return surface_; }
  const Variant& variant() const { return v_; }
  /// √eigenvalue: |k| (torus), √(n(n+1))/R (sphere), a·λ (half-plane).
  double frequency() const;
  double eigenvalue() const;
  std::complex<double> evaluate(const SurfacePoint& p) const;
  bool real_valued() const;
  std::string family() const;
  std::string describe() const;

 private:
  EigenfunctionSpec(SurfaceSpec S, Variant v) : surface_(std::move(S)), v_(std::move(v)) {}
  SurfaceSpec surface_;
  Variant v_;
  double norm_ = 1.0;  // sphere normalizing constant
};

/// Legendre P_n(x) by the upward three-term recurrence.
double legendre_p(int n, double x);
/// L²-normalizing constant of sinⁿθ e^{inφ} on the sphere of radius R.
double highest_weight_norm(int n, double R = 1.0);

/// |Δ_g e(p) + eigenvalue·e(p)| with a 5-point metric-aware stencil of step h.
double laplacian_residual(const EigenfunctionSpec& e, const SurfacePoint& p, double h);

}  // namespace geoperiods
