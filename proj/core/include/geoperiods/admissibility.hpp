#pragma once

// The admissible frequency-ratio set E_γ and its margin function.

#include <cstddef>
#include <ostream>
#include <vector>

#include "geoperiods/curve.hpp"

namespace geoperiods {

struct EpsInterval {
  double lo = -1.0;
  double hi = 1.0;
};

struct AdmissibilityReport {
  std::vector<double> t;
  std::vector<double> h;        // signed normal curvature
  std::vector<double> k_plus;   // 𝐤(γ′^⊥)
  std::vector<double> k_minus;  // 𝐤(−γ′^⊥)
  std::vector<double> eps;      // ε_j = −1 + 2j/(n_eps − 1)
  std::vector<double> margin;
  std::vector<EpsInterval> E;

  /// Builds the ε grid, margins and intervals from curve samples.
  static AdmissibilityReport from_samples(std::vector<double> t, std::vector<double> h,
                                          std::vector<double> k_plus, std::vector<double> k_minus,
                                          std::size_t n_eps = 1001);

  /// min_t min(|h + √(1−ε²) k₊|, |h − √(1−ε²) k₋|); RangeError unless |ε| < 1.
  double margin_at(double eps) const;
  bool admissible(double eps) const;

  void write_curve_csv(std::ostream& os) const;   // t,h,k_plus,k_minus
  void write_margin_csv(std::ostream& os) const;  // eps,margin
};

/// Samples h and 𝐤(±γ′^⊥) at n_t uniform parameters (parallel over t).
AdmissibilityReport admissible_eps(const Curve& c, std::size_t n_t = 512, std::size_t n_eps = 1001,
                                   double k_tol = 1e-6, unsigned jobs = 0);

inline double margin_at(const AdmissibilityReport& r, double eps) { return r.margin_at(eps); }

}  // namespace geoperiods
