#ifndef SWSBP_PHYSICS_HPP
#define SWSBP_PHYSICS_HPP

#include <array>
#include <cmath>
#include <stdexcept>

namespace swsbp {

/// Conserved state of the one-dimensional shallow water equations:
/// water height h and discharge hv.
struct SweState {
  double h = 0.0;
  double hv = 0.0;
};

/// Entropy variables w = U'(u) for the total-energy entropy,
/// w1 = g(h+b) - v^2/2, w2 = v.
struct EntropyVars {
  double w1 = 0.0;
  double w2 = 0.0;
};

struct PhysicsContext {
  double g = 9.81;       // gravitational constant, > 0
  double h_dry = 1e-12;  // below this height the velocity is treated as zero
};

/// Desingularised velocity: hv/h above the dry tolerance, zero below.
/// Heights in [-h_dry, h_dry] count as dry; anything more negative is a
/// genuine domain violation.
inline double velocity(const SweState& s, const PhysicsContext& ctx) {
  if (s.h < -ctx.h_dry) throw std::domain_error("velocity: negative water height");
  return s.h > ctx.h_dry ? s.hv / s.h : 0.0;
}

inline std::array<double, 2> physical_flux(const SweState& s, const PhysicsContext& ctx) {
  const double v = velocity(s, ctx);
  return {s.h * v, s.h * v * v + 0.5 * ctx.g * s.h * s.h};
}

/// Total energy U = h v^2/2 + g h^2/2 + g h b.
inline double entropy(const SweState& s, double b, const PhysicsContext& ctx) {
  const double v = velocity(s, ctx);
  return 0.5 * s.h * v * v + 0.5 * ctx.g * s.h * s.h + ctx.g * s.h * b;
}

/// Entropy flux F = h v^3/2 + g h^2 v + g b h v.
inline double entropy_flux(const SweState& s, double b, const PhysicsContext& ctx) {
  const double v = velocity(s, ctx);
  return 0.5 * s.h * v * v * v + ctx.g * s.h * s.h * v + ctx.g * b * s.h * v;
}

/// Flux potential psi = g h^2 v / 2 (flat bottom), satisfying psi'(w) = f(u(w)).
inline double flux_potential(const SweState& s, const PhysicsContext& ctx) {
  const double v = velocity(s, ctx);
  return 0.5 * ctx.g * s.h * s.h * v;
}

inline EntropyVars to_entropy_vars(const SweState& s, double b, const PhysicsContext& ctx) {
  const double v = velocity(s, ctx);
  return {ctx.g * (s.h + b) - 0.5 * v * v, v};
}

inline SweState from_entropy_vars(const EntropyVars& w, double b, const PhysicsContext& ctx) {
  const double h = (w.w1 + 0.5 * w.w2 * w.w2) / ctx.g - b;
  if (!(h > 0.0))
    throw std::domain_error("from_entropy_vars: entropy variables do not describe a wet state");
  return {h, h * w.w2};
}

/// Entropy Jacobian du/dw = [[1/g, v/g], [v/g, h + v^2/g]] (row-major).
/// Returned even for h = 0, where it is singular; callers must guard.
inline std::array<double, 4> entropy_jacobian(const SweState& s, const PhysicsContext& ctx) {
  const double v = velocity(s, ctx);
  return {1.0 / ctx.g, v / ctx.g, v / ctx.g, s.h + v * v / ctx.g};
}

/// Eigenvector scaling R with R R^T = du/dw; columns are eigenvectors of the
/// flux Jacobian.  Degenerate (parallel columns) at h = 0.
inline std::array<double, 4> barth_scaling(const SweState& s, const PhysicsContext& ctx) {
  const double v = velocity(s, ctx);
  const double c = std::sqrt(ctx.g * std::max(s.h, 0.0));
  const double scale = 1.0 / std::sqrt(2.0 * ctx.g);
  return {scale, scale, scale * (v - c), scale * (v + c)};
}

/// Single-state wave speed bound |v| + sqrt(g h).
inline double max_wave_speed(const SweState& s, const PhysicsContext& ctx) {
  const double v = velocity(s, ctx);
  return std::abs(v) + std::sqrt(ctx.g * std::max(s.h, 0.0));
}

}  // namespace swsbp

#endif  // SWSBP_PHYSICS_HPP
