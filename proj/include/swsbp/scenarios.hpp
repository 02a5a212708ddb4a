#ifndef SWSBP_SCENARIOS_HPP
#define SWSBP_SCENARIOS_HPP

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "swsbp/semidiscretization.hpp"
#include "swsbp/time_integration.hpp"

namespace swsbp {

/// A complete experiment definition: domain, data, final time and the
/// discretisation defaults it was designed for.
struct Scenario {
  std::string name;
  double x_left = 0.0;
  double x_right = 1.0;
  double g = 9.81;
  double t_final = 1.0;
  std::function<double(double)> bottom;
  std::function<double(double)> h0;
  std::function<double(double)> hv0;
  // Exact solution (h, hv) as a function of (x, t), when available.
  std::function<std::pair<double, double>(double, double)> exact;

  // Discretisation defaults.
  int n_elements = 1;
  int degree = 1;
  NodeFamily family = NodeFamily::gauss;
  SurfaceFluxKind surface_flux = SurfaceFluxKind::entropy_conservative;
  FluxParams params{};
  bool limiter = false;
  bool limit_discharge = false;
  double subcell_threshold = 0.0;
  bool include_neighbors = false;
  int fixed_steps = 0;  // 0 = adaptive
  double cfl = 0.5;
};

/// Steady lake at rest over a smooth sine bottom.  The bottom is the
/// periodic reading sin(pi x)/4: on the periodic domain [-1, 1] the
/// alternative grouping sin(pi x / 4) would jump by 2 sin(pi/4) across the
/// wrap boundary and turn the flat-surface variant into a dam-break there.
inline Scenario lake_at_rest() {
  Scenario s;
  s.name = "lake_at_rest";
  s.x_left = -1.0;
  s.x_right = 1.0;
  s.g = 1.0;
  s.t_final = 1.0;
  s.bottom = [](double x) { return 0.25 * std::sin(M_PI * x); };
  s.h0 = [b = s.bottom](double x) { return 1.0 - b(x); };
  s.hv0 = [](double) { return 0.0; };
  s.exact = [b = s.bottom](double x, double) {
    return std::make_pair(1.0 - b(x), 0.0);
  };
  s.n_elements = 15;
  s.degree = 7;
  s.family = NodeFamily::gauss;
  s.surface_flux = SurfaceFluxKind::entropy_conservative;
  s.fixed_steps = 1000;
  return s;
}

/// Same bottom as the lake at rest but with a flat initial surface, so the
/// solution moves while staying smooth; used for entropy-drift studies.
inline Scenario smooth_perturbation() {
  Scenario s = lake_at_rest();
  s.name = "smooth_perturbation";
  s.h0 = [](double) { return 1.0; };
  s.exact = nullptr;
  return s;
}

/// Lake at rest with an emerged parabolic bump (wet-dry front at rest).
inline Scenario emerged_bump() {
  Scenario s;
  s.name = "emerged_bump";
  s.x_left = 0.0;
  s.x_right = 25.0;
  s.g = 9.81;
  s.t_final = 1.0;
  s.bottom = [](double x) {
    return (x > 8.0 && x < 12.0) ? 0.2 - 0.05 * (x - 10.0) * (x - 10.0) : 0.0;
  };
  s.h0 = [b = s.bottom](double x) { return std::max(0.1, b(x)) - b(x); };
  s.hv0 = [](double) { return 0.0; };
  s.exact = [b = s.bottom](double x, double) {
    return std::make_pair(std::max(0.1, b(x)) - b(x), 0.0);
  };
  s.n_elements = 40;
  s.degree = 5;
  s.family = NodeFamily::gauss;
  s.surface_flux = SurfaceFluxKind::hr_llf;
  s.limiter = true;
  s.subcell_threshold = 1e-5;
  s.include_neighbors = false;
  s.cfl = 0.5;
  return s;
}

/// Water height of the moving-water equilibrium m^2/(2 h^2) + g (h + b) = E
/// on the subcritical branch.  Newton iteration started above the critical
/// height, with a bisection fallback on the bracket [h_crit, E/g].
inline double equilibrium_height(double m, double energy, double b, double g) {
  const auto f = [&](double h) { return 0.5 * m * m / (h * h) + g * (h + b) - energy; };
  if (m == 0.0) {
    const double h = energy / g - b;
    if (h <= 0.0) throw std::domain_error("equilibrium_height: infeasible rest state");
    return h;
  }
  const double h_crit = std::cbrt(m * m / g);
  const double f_crit = f(h_crit);
  if (f_crit > 1e-9 * std::max(1.0, energy))
    throw std::domain_error("equilibrium_height: no subcritical root (E too small)");
  if (f_crit >= 0.0) return h_crit;

  double h = std::max((energy - g * b) / g, h_crit * (1.0 + 1e-8));
  for (int it = 0; it < 100; ++it) {
    const double df = -m * m / (h * h * h) + g;
    const double dh = f(h) / df;
    const double h_new = h - dh;
    if (h_new <= h_crit) break;  // Newton left the branch; bisect instead
    h = h_new;
    if (std::abs(dh) <= 1e-15 * h) return h;
  }
  double lo = h_crit, hi = std::max(energy / g, h_crit * 2.0);
  while (f(hi) < 0.0) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) <= 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Moving water equilibrium hv = m, v^2/2 + g(h+b) = E over a compactly
/// supported cosine bump.  The exact solution equals the initial condition.
inline Scenario moving_water_equilibrium(double m = 1.0, double energy = 25.0) {
  Scenario s;
  s.name = "moving_water";
  s.x_left = -1.0;
  s.x_right = 1.0;
  s.g = 9.81;
  s.t_final = 1.0;
  s.bottom = [](double x) {
    return (x > -0.1 && x < 0.1) ? 0.25 * std::cos(10.0 * M_PI * (x + 1.0)) + 0.25 : 0.0;
  };
  s.h0 = [b = s.bottom, m, energy, g = s.g](double x) {
    return equilibrium_height(m, energy, b(x), g);
  };
  s.hv0 = [m](double) { return m; };
  s.exact = [h0 = s.h0, m](double x, double) { return std::make_pair(h0(x), m); };
  s.n_elements = 40;
  s.degree = 5;
  s.family = NodeFamily::gauss;
  s.surface_flux = SurfaceFluxKind::llf;
  s.cfl = 0.5;
  return s;
}

/// Preset m = 3 energy from the critical-touching configuration.
inline double moving_water_critical_energy(double m = 3.0, double g = 9.81) {
  return 1.5 * std::cbrt(m * g * m * g) + 0.5 * g;
}

/// Exact dry-bed dam-break solution (rarefaction fan onto a dry bed).
/// Velocity in the dry region is defined as zero.
inline std::pair<double, double> dam_break_exact(double x, double t, double h_l = 0.005,
                                                 double x0 = 5.0, double g = 9.81) {
  if (t < 0.0) throw std::domain_error("dam_break_exact: negative time");
  const double c0 = std::sqrt(g * h_l);
  if (t == 0.0) return x < x0 ? std::make_pair(h_l, 0.0) : std::make_pair(0.0, 0.0);
  const double xi = (x - x0) / t;
  if (xi <= -c0) return {h_l, 0.0};
  if (xi >= 2.0 * c0) return {0.0, 0.0};
  const double h = (2.0 * c0 - xi) * (2.0 * c0 - xi) / (9.0 * g);
  const double v = 2.0 / 3.0 * (xi + c0);
  return {h, h * v};
}

/// Exact solution of the dam break on the periodic domain [0, L]: the dam at
/// x0 also exists at the wrap boundary (wet water at x = 0+ meets the dry bed
/// at x = L-), spawning a mirrored fan moving left.  The two fans stay
/// essentially disjoint for the times of interest (overlap heights are below
/// 1e-8 at t = 6), so a piecewise split between the two Ritter solutions is
/// exact to well below the discretisation error.
inline std::pair<double, double> dam_break_periodic_exact(double x, double t,
                                                          double h_l = 0.005,
                                                          double x0 = 5.0, double length = 10.0,
                                                          double g = 9.81) {
  const double c0 = std::sqrt(g * h_l);
  const double zeta = x < x0 ? x + length : x;  // unwrap around the boundary dam
  if (zeta >= length - 2.0 * c0 * t) {
    const auto [h, hv] = dam_break_exact(2.0 * length - zeta, t, h_l, length, g);
    return {h, -hv};
  }
  return dam_break_exact(x, t, h_l, x0, g);
}

/// Dam break onto a dry bed with flat bottom.  Time integration defaults to
/// small fixed steps: near the draining fronts the nodal wave-speed bound is
/// polluted by velocity noise at vanishing heights, which makes adaptive
/// step-size control erratic there.
inline Scenario dam_break() {
  Scenario s;
  s.name = "dam_break";
  s.x_left = 0.0;
  s.x_right = 10.0;
  s.g = 9.81;
  s.t_final = 6.0;
  s.bottom = [](double) { return 0.0; };
  s.h0 = [](double x) { return x < 5.0 ? 0.005 : 0.0; };
  s.hv0 = [](double) { return 0.0; };
  s.exact = [](double x, double t) { return dam_break_periodic_exact(x, t); };
  s.n_elements = 100;
  s.degree = 2;
  s.family = NodeFamily::gauss;
  s.surface_flux = SurfaceFluxKind::llf;
  s.params.a1 = -1.0;
  s.params.a2 = 1.0;
  s.limiter = true;
  s.subcell_threshold = 1e-6;
  s.include_neighbors = true;
  s.fixed_steps = 2000;
  s.cfl = 0.5;
  return s;
}

struct ErrorNorms {
  double l2_squared_h = 0.0;
  double l2_squared_hv = 0.0;
  double linf_h = 0.0;
  double linf_hv = 0.0;

  double max_linf() const { return std::max(linf_h, linf_hv); }
};

/// Quadrature L2^2 and nodal max-norm errors against an exact solution.
inline ErrorNorms error_norms(const SolutionField& state, const Mesh& mesh,
                              const SbpOperator& op,
                              const std::function<std::pair<double, double>(double)>& exact) {
  ErrorNorms norms;
  const double scale = 0.5 * mesh.dx();
  for (int e = 0; e < mesh.n_elements; ++e) {
    const double* h = state.h_at(e);
    const double* hv = state.hv_at(e);
    for (int k = 0; k < op.n(); ++k) {
      const double x = mesh.node(e, op.nodes[static_cast<std::size_t>(k)]);
      const auto [he, hve] = exact(x);
      const double dh = h[k] - he;
      const double dhv = hv[k] - hve;
      const double w = op.weights[static_cast<std::size_t>(k)] * scale;
      norms.l2_squared_h += w * dh * dh;
      norms.l2_squared_hv += w * dhv * dhv;
      norms.linf_h = std::max(norms.linf_h, std::abs(dh));
      norms.linf_hv = std::max(norms.linf_hv, std::abs(dhv));
    }
  }
  return norms;
}

/// Samples scenario data on the mesh nodes.
inline void sample_scenario(const Scenario& s, const Mesh& mesh, const SbpOperator& op,
                            SolutionField& state, std::vector<double>& bottom) {
  state = SolutionField(mesh.n_elements, op.n());
  bottom.assign(state.size(), 0.0);
  for (int e = 0; e < mesh.n_elements; ++e) {
    for (int k = 0; k < op.n(); ++k) {
      const double x = mesh.node(e, op.nodes[static_cast<std::size_t>(k)]);
      state.h_at(e)[k] = s.h0(x);
      state.hv_at(e)[k] = s.hv0(x);
      bottom[state.offset(e) + static_cast<std::size_t>(k)] = s.bottom(x);
    }
  }
}

}  // namespace swsbp

#endif  // SWSBP_SCENARIOS_HPP
