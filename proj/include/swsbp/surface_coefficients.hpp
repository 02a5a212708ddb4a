#ifndef SWSBP_SURFACE_COEFFICIENTS_HPP
#define SWSBP_SURFACE_COEFFICIENTS_HPP

#include <algorithm>
#include <cmath>

#include "swsbp/fluxes.hpp"

namespace swsbp {

/// Coefficients of the general-basis surface correction terms.  They solve
/// three linear condition systems (mass conservation, discharge conservation,
/// entropy stability) for given family parameters (a1, a2) and the five free
/// parameters m4, k9, k10, k11, l10.
struct SurfaceCoefficients {
  double b1, b2, b3, b4;
  double c1, c2, c3, c4;
  double d1, d2, d3, d4, d5, d6, d7, d8;
  double e1, e2, e3;
  double k1, k2, k3, k4, k5, k6, k7, k8, k9, k10, k11;
  double l1, l2, l3, l4, l5, l6, l7, l8, l9, l10;
  double m1, m2, m3, m4;
};

/// Closed-form solution of the three condition systems.
inline SurfaceCoefficients surface_coefficients(const FluxParams& p) {
  const double a1 = p.a1, a2 = p.a2;
  const double m4 = p.m4, k9 = p.k9, k10 = p.k10, k11 = p.k11, l10 = p.l10;
  SurfaceCoefficients c{};

  c.b1 = -a1 / 4.0 + 3.0 / 4.0;
  c.b2 = a1 / 4.0 + m4 + 1.0 / 4.0;
  c.b3 = 0.0;
  c.b4 = -m4;

  c.c1 = a1 / 8.0 + 3.0 * a2 / 8.0 - 1.0 / 4.0;
  c.c2 = -a1 / 8.0 - 3.0 * a2 / 8.0 - 2.0 * k10 - 2.0 * k9 + 1.0 / 4.0;
  c.c3 = 2.0 * k10 - 2.0 * k11 + 2.0 * k9;
  c.c4 = 2.0 * k11;

  c.d1 = -a1 / 4.0 - 3.0 * a2 / 8.0 + 5.0 / 8.0;
  c.d2 = (2.0 * a1 + 3.0 * a2 - 1.0) / 8.0 + 2.0 * k10 + 2.0 * k9 + m4 / 2.0;
  c.d3 = 0.0;
  c.d4 = 0.0;
  c.d5 = 2.0 * k11 + 0.5;
  c.d6 = -2.0 * k11;
  c.d7 = -m4 / 2.0;
  c.d8 = -2.0 * k10 - 2.0 * k9;

  c.e1 = a1 / 4.0 + 1.0 / 4.0;
  c.e2 = -a1 / 4.0 - m4 + 1.0 / 4.0;
  c.e3 = m4;

  c.k1 = a1 / 16.0 + 3.0 * a2 / 16.0 - 1.0 / 8.0;
  c.k2 = -k10;
  c.k3 = -a1 / 16.0 - 3.0 * a2 / 16.0 - k9 + 1.0 / 8.0;
  c.k4 = 0.0;
  c.k5 = 0.0;
  c.k6 = k10 - k11;
  c.k7 = -k10;
  c.k8 = 0.0;
  c.k9 = k9;
  c.k10 = k10;
  c.k11 = k11;

  c.l1 = a1 / 8.0 + 3.0 * a2 / 8.0 - 1.0 / 4.0;
  c.l2 = (a1 + 3.0 * a2 - 2.0) / 8.0 + 2.0 * k10 + 2.0 * k9 - l10;
  c.l3 = l10;
  c.l4 = 0.0;
  c.l5 = l10 - (a1 + 3.0 * a2 - 2.0) / 4.0 - 2.0 * k10 - 2.0 * k9;
  c.l6 = 0.0;
  c.l7 = -2.0 * k11;
  c.l8 = 2.0 * k11 - l10;
  c.l9 = -l10;
  c.l10 = l10;

  c.m1 = a1 / 4.0 + 1.0 / 4.0;
  c.m2 = -a1 / 4.0 - m4 - 1.0 / 4.0;
  c.m3 = 0.0;
  c.m4 = m4;
  return c;
}

/// Max residual of the mass-conservation condition system.
inline double conservation_h_residual(const SurfaceCoefficients& c, const FluxParams& p) {
  const double a1 = p.a1, a2 = p.a2;
  double r = 0.0;
  r = std::max(r, std::abs(c.b1 - (3.0 - a1) / 4.0));
  r = std::max(r, std::abs(c.b2 + c.b3 + c.b4 - (1.0 + a1) / 4.0));
  r = std::max(r, std::abs(c.c1 - (a1 + 3.0 * a2 - 2.0) / 8.0));
  r = std::max(r, std::abs(c.c2 + c.c3 + c.c4 + (a1 + 3.0 * a2 - 2.0) / 8.0));
  return r;
}

/// Max residual of the discharge-conservation condition system.
inline double conservation_hv_residual(const SurfaceCoefficients& c, const FluxParams& p) {
  const double a1 = p.a1, a2 = p.a2;
  const double s = a1 + 3.0 * a2 - 2.0;
  double r = 0.0;
  r = std::max(r, std::abs(c.d1 - (5.0 - 2.0 * a1 - 3.0 * a2) / 8.0));
  r = std::max(r, std::abs(c.d2 + c.d7 + c.d8 - (2.0 * a1 + 3.0 * a2 - 1.0) / 8.0));
  r = std::max(r, std::abs(c.d3 + c.d5 + c.d6 - 0.5));
  r = std::max(r, std::abs(c.d4));
  r = std::max(r, std::abs(c.e1 - (1.0 + a1) / 4.0));
  r = std::max(r, std::abs(c.e2 + c.e3 - (1.0 - a1) / 4.0));
  r = std::max(r, std::abs(c.k1 - s / 16.0));
  r = std::max(r, std::abs(c.k2 + c.k6 + c.k11));
  r = std::max(r, std::abs(c.k3 + c.k9 + s / 16.0));
  r = std::max(r, std::abs(c.k4 + c.k7 + c.k10));
  r = std::max(r, std::abs(c.k5 + c.k8));
  r = std::max(r, std::abs(c.l1 - s / 8.0));
  r = std::max(r, std::abs(c.l2 + c.l5 + c.l6 + s / 8.0));
  r = std::max(r, std::abs(c.l3 + c.l7 + c.l8));
  r = std::max(r, std::abs(c.l4 + c.l9 + c.l10));
  r = std::max(r, std::abs(c.m1 - (1.0 + a1) / 4.0));
  r = std::max(r, std::abs(c.m2 + c.m3 + c.m4 + (1.0 + a1) / 4.0));
  return r;
}

/// Max residual of the entropy-stability condition system.
inline double stability_residual(const SurfaceCoefficients& c, const FluxParams& p) {
  const double a1 = p.a1, a2 = p.a2;
  const double s = a1 + 3.0 * a2 - 2.0;
  double r = 0.0;
  r = std::max(r, std::abs(c.b1 + c.b4 + c.e3 - (3.0 - a1) / 4.0));
  r = std::max(r, std::abs(c.b2 + c.e2 - 0.5));
  r = std::max(r, std::abs(c.b3 + c.e1 - (1.0 + a1) / 4.0));
  r = std::max(r, std::abs(c.c1 - c.b4 / 2.0 + c.d7 - s / 8.0));
  r = std::max(r, std::abs(c.c2 - c.b2 / 2.0 + c.d2));
  r = std::max(r, std::abs(c.c3 - c.b1 / 2.0 + c.d5 + c.d8 - (a1 + 1.0) / 8.0));
  r = std::max(r, std::abs(c.c4 - c.b3 / 2.0 + c.d1 + c.d6 - (5.0 - 2.0 * a1 - 3.0 * a2) / 8.0));
  r = std::max(r, std::abs(c.b1 + c.m3 - (3.0 - a1) / 4.0));
  r = std::max(r, std::abs(c.b2 + c.m2));
  r = std::max(r, std::abs(c.b3 + c.m1 - (a1 + 1.0) / 4.0));
  r = std::max(r, std::abs(c.b4 + c.m4));
  r = std::max(r, std::abs(c.c1 + c.l6 - s / 8.0));
  r = std::max(r, std::abs(c.c2 + c.l2 + c.l10));
  r = std::max(r, std::abs(c.c3 + c.l5 + c.l8 + s / 4.0));
  r = std::max(r, std::abs(c.c4 + c.l1 + c.l7 - s / 8.0));
  r = std::max(r, std::abs(c.l4));
  r = std::max(r, std::abs(-c.c1 / 2.0 - c.c3 / 2.0 + c.k6 + c.k9 + s / 16.0));
  r = std::max(r, std::abs(-c.c2 / 2.0 + c.k3 + c.k7));
  r = std::max(r, std::abs(-c.c4 / 2.0 + c.k1 + c.k11 - s / 16.0));
  r = std::max(r, std::abs(c.d3));
  r = std::max(r, std::abs(c.d4));
  r = std::max(r, std::abs(c.k2 + c.k10));
  r = std::max(r, std::abs(c.k4 + c.k8));
  r = std::max(r, std::abs(c.k5));
  r = std::max(r, std::abs(c.l3 + c.l9));
  return r;
}

}  // namespace swsbp

#endif  // SWSBP_SURFACE_COEFFICIENTS_HPP
