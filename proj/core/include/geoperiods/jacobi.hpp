#pragma once

// Scalar Jacobi fields along geodesics, the stable Riccati branch giving the
// limiting-circle curvature 𝐤ₚ(v), and geodesic-circle curvature κ_S.

#include <vector>

#include "geoperiods/surface.hpp"

namespace geoperiods {

struct GeodesicRay {
  SurfaceSpec surface;
  SurfacePoint p;
  TangentVec v;

  double curvature_at(double r) const;
};

struct JacobiValue {
  double j = 0.0;
  double dj = 0.0;
};

/// Solves j'' + K(ζ(t)) j = 0, j(0) = j0, j'(0) = dj0, and returns (j, j') at r.
JacobiValue jacobi_solve(const GeodesicRay& ray, double j0, double dj0, double r);

struct RiccatiTrace {
  std::vector<double> grid;  // increasing, from −horizon to 0
  std::vector<double> u;
  bool converged = false;
  double horizon = 0.0;
};

/// 𝐤ₚ(v): stable solution of u' = −u² − K integrated from u(−R) = 0, with R
/// doubling from 20 up to 1280 until successive u(0) agree within tol.
double limiting_circle_curvature(const SurfaceSpec& S, const SurfacePoint& p, const TangentVec& v,
                                 double tol = 1e-8, RiccatiTrace* trace = nullptr);

/// Geodesic flow together with the scalar Jacobi field j along it.
struct RayJacobi {
  SurfacePoint x;
  TangentVec arrival;
  double j = 0.0;
  double dj = 0.0;
};
RayJacobi flow_with_jacobi(const SurfaceSpec& S, const SurfacePoint& p, const TangentVec& v,
                           double r, double j0, double dj0);

/// Curvature c'(r)/c(r) of the geodesic circle of radius r through the point
/// reached from `center` along v.
double circle_curvature(const SurfaceSpec& S, const SurfacePoint& center, const TangentVec& v,
                        double r);

}  // namespace geoperiods
