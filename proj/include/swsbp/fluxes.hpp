#ifndef SWSBP_FLUXES_HPP
#define SWSBP_FLUXES_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "swsbp/physics.hpp"

namespace swsbp {

/// Parameters of the two-parameter entropy conservative flux family plus the
/// five free parameters of the general-basis surface terms.
struct FluxParams {
  double a1 = -1.0;
  double a2 = 1.0;
  double m4 = 0.0;
  double k9 = 0.0;
  double k10 = 0.0;
  double k11 = 0.0;
  double l10 = 0.0;

  /// True iff a2 = (2 - a1)/3, the one-parameter subfamily without the
  /// higher-order velocity terms.
  bool one_param_consistent() const { return std::abs(a2 - (2.0 - a1) / 3.0) <= 1e-14; }
};

struct FluxPair {
  double f_h = 0.0;
  double f_hv = 0.0;
};

/// Interface flux with source contribution.  The mass component is symmetric
/// under exchange of the two states; the discharge component carries the
/// non-symmetric source part and therefore differs per receiving side.
struct ExtendedFluxPair {
  double f_h = 0.0;
  double f_hv_into_left = 0.0;
  double f_hv_into_right = 0.0;
};

namespace detail {
inline void require_finite(const SweState& s, const char* who) {
  if (!std::isfinite(s.h) || !std::isfinite(s.hv))
    throw std::invalid_argument(std::string(who) + ": non-finite input state");
}
}  // namespace detail

/// Two-parameter entropy conservative flux in primitive variables.
/// Symmetric and consistent for every (a1, a2); entropy conservative for the
/// flat-bottom entropy variables.
inline FluxPair ec_flux(const SweState& uL, const SweState& uR, const FluxParams& p,
                        const PhysicsContext& ctx) {
  detail::require_finite(uL, "ec_flux");
  detail::require_finite(uR, "ec_flux");
  const double g = ctx.g;
  const double hL = uL.h, hR = uR.h;
  const double vL = velocity(uL, ctx), vR = velocity(uR, ctx);
  const double a1 = p.a1, a2 = p.a2;
  const double c123 = a1 + 3.0 * a2 - 2.0;

  // The odd-power velocity terms are evaluated in factored form,
  // v+^3 - v+^2 v- - v+ v-^2 + v-^3 = (v+ + v-)(v+ - v-)^2 and
  // v+^4 - 2 v+^2 v-^2 + v-^4 = (v+^2 - v-^2)^2, which makes the flux
  // bitwise symmetric under exchange of the arguments.
  const double dv = vR - vL;
  const double dv2 = vR * vR - vL * vL;
  FluxPair f;
  f.f_h = (3.0 - a1) / 8.0 * (hR * vR + hL * vL) + (1.0 + a1) / 8.0 * (hR * vL + hL * vR) +
          c123 / (16.0 * g) * (vR + vL) * dv * dv;
  f.f_hv = (1.0 + a1) / 8.0 * g * (hR * hR + hL * hL) + (1.0 - a1) / 4.0 * g * (hR * hL) -
           (2.0 * a1 + 3.0 * a2 - 5.0) / 16.0 * (hR * vR * vR + hL * vL * vL) +
           (2.0 * a1 + 3.0 * a2 - 1.0) / 16.0 * (hR * vL * vL + hL * vR * vR) +
           0.25 * (hR + hL) * (vR * vL) + c123 / (32.0 * g) * dv2 * dv2;
  return f;
}

/// The same family expressed in entropy variables.
inline FluxPair ec_flux_entropy_form(const EntropyVars& wL, const EntropyVars& wR,
                                     const FluxParams& p, const PhysicsContext& ctx) {
  const double g = ctx.g;
  if ((wL.w1 + 0.5 * wL.w2 * wL.w2) <= 0.0 || (wR.w1 + 0.5 * wR.w2 * wR.w2) <= 0.0)
    throw std::domain_error("ec_flux_entropy_form: entropy variables not invertible (h <= 0)");
  const double w1m = wL.w1, w2m = wL.w2, w1p = wR.w1, w2p = wR.w2;
  const double a1 = p.a1, a2 = p.a2;

  FluxPair f;
  f.f_h = (3.0 - a1) / (8.0 * g) * (w1p * w2p + w1m * w2m) +
          (1.0 + a1) / (8.0 * g) * (w1p * w2m + w1m * w2p) +
          (1.0 + 3.0 * a2) / (16.0 * g) * (w2p * w2p * w2p + w2m * w2m * w2m) +
          (3.0 - 3.0 * a2) / (16.0 * g) * (w2p * w2p * w2m + w2p * w2m * w2m);
  f.f_hv = (1.0 + a1) / (8.0 * g) * (w1p * w1p + w1m * w1m) +
           (1.0 - a1) / (4.0 * g) * w1p * w1m +
           (7.0 - 3.0 * a2) / (16.0 * g) * (w1p * w2p * w2p + w1m * w2m * w2m) +
           (1.0 + 3.0 * a2) / (16.0 * g) * (w1p * w2m * w2m + w1m * w2p * w2p) +
           w1p * w2p * w2m / (4.0 * g) + w1m * w2p * w2m / (4.0 * g) +
           (w2p * w2p * w2p * w2p + w2p * w2p * w2p * w2m + w2p * w2p * w2m * w2m +
            w2p * w2m * w2m * w2m + w2m * w2m * w2m * w2m) /
               (8.0 * g);
  return f;
}

/// Non-symmetric source contribution S_{i,k} to the extended discharge flux,
/// for the receiving cell i coupled with cell k.
inline double extended_source_term(double h_i, double v_i, double b_i, double h_k, double v_k,
                                   double b_k, const FluxParams& p, const PhysicsContext& ctx) {
  const double dv = v_k - v_i;
  const double db = b_k - b_i;
  return (p.a1 + 3.0 * p.a2 - 2.0) / 16.0 * dv * dv * db +
         0.25 * ctx.g * ((3.0 - p.a1) / 2.0 * h_i + (1.0 + p.a1) / 2.0 * h_k) * db;
}

/// Entropy conservative and well-balanced extended flux for general bottom
/// topography.  The discharge side into cell i uses roles (i, k).
inline ExtendedFluxPair ec_flux_extended(const SweState& uL, const SweState& uR, double bL,
                                         double bR, const FluxParams& p,
                                         const PhysicsContext& ctx) {
  const FluxPair sym = ec_flux(uL, uR, p, ctx);
  const double vL = velocity(uL, ctx), vR = velocity(uR, ctx);
  ExtendedFluxPair f;
  f.f_h = sym.f_h;
  f.f_hv_into_left = sym.f_hv + extended_source_term(uL.h, vL, bL, uR.h, vR, bR, p, ctx);
  f.f_hv_into_right = sym.f_hv + extended_source_term(uR.h, vR, bR, uL.h, vL, bL, p, ctx);
  return f;
}

inline double llf_wave_speed(const SweState& uL, const SweState& uR, const PhysicsContext& ctx) {
  return std::max(max_wave_speed(uL, ctx), max_wave_speed(uR, ctx));
}

/// Local Lax-Friedrichs type entropy stable flux: the one-parameter entropy
/// conservative flux (a2 = (2-a1)/3) plus dissipation proportional to the
/// jump of the entropy variables, with the entropy Jacobian frozen at the
/// arithmetic mean state.  The dissipation then reduces to
/// -(lambda/2) (jump(h+b), jump(hv) + mean(v) jump(b)).
inline FluxPair es_flux_llf_type(const SweState& uL, const SweState& uR, double bL, double bR,
                                 double a1, const PhysicsContext& ctx) {
  FluxParams p;
  p.a1 = a1;
  p.a2 = (2.0 - a1) / 3.0;
  FluxPair f = ec_flux(uL, uR, p, ctx);
  const double lambda = llf_wave_speed(uL, uR, ctx);
  const double vL = velocity(uL, ctx), vR = velocity(uR, ctx);
  f.f_h -= 0.5 * lambda * ((uR.h + bR) - (uL.h + bL));
  f.f_hv -= 0.5 * lambda * ((uR.hv - uL.hv) + 0.5 * (vL + vR) * (bR - bL));
  return f;
}

/// Classical local Lax-Friedrichs flux, mean(f) - (lambda/2) jump(u).
inline FluxPair llf_flux(const SweState& uL, const SweState& uR, const PhysicsContext& ctx) {
  const auto fL = physical_flux(uL, ctx);
  const auto fR = physical_flux(uR, ctx);
  const double lambda = llf_wave_speed(uL, uR, ctx);
  return {0.5 * (fL[0] + fR[0]) - 0.5 * lambda * (uR.h - uL.h),
          0.5 * (fL[1] + fR[1]) - 0.5 * lambda * (uR.hv - uL.hv)};
}

namespace detail {

/// Intermediate data of the Suliciu relaxation Riemann solver.
struct SuliciuFan {
  double c_l = 0.0, c_r = 0.0;       // relaxation parameters, units h * velocity
  double u_star = 0.0, pi_star = 0.0;
  double h_star_l = 0.0, h_star_r = 0.0;
  double sigma_l = 0.0, sigma_r = 0.0;  // outer wave speeds
};

inline double guarded_quotient(double num, double den) {
  // Dry-side denominators only occur with non-positive numerators; the
  // relaxation-speed correction then contributes nothing.
  if (den <= 0.0) return num > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  return num / den;
}

inline SuliciuFan suliciu_fan(double h_l, double v_l, double h_r, double v_r,
                              const PhysicsContext& ctx) {
  const double g = ctx.g;
  const double a_l = std::sqrt(g * std::max(h_l, 0.0));
  const double a_r = std::sqrt(g * std::max(h_r, 0.0));
  const double p_l = 0.5 * g * h_l * h_l;
  const double p_r = 0.5 * g * h_r * h_r;
  constexpr double alpha = 1.5;  // (gamma + 1)/2 for the h^2 pressure law

  SuliciuFan fan;
  if (p_r >= p_l) {
    fan.c_l = h_l * (a_l + alpha * std::max(0.0, guarded_quotient(p_r - p_l, h_r * a_r) + v_l - v_r));
    fan.c_r = h_r * (a_r + alpha * std::max(0.0, guarded_quotient(p_l - p_r, fan.c_l) + v_l - v_r));
  } else {
    fan.c_r = h_r * (a_r + alpha * std::max(0.0, guarded_quotient(p_l - p_r, h_l * a_l) + v_l - v_r));
    fan.c_l = h_l * (a_l + alpha * std::max(0.0, guarded_quotient(p_r - p_l, fan.c_r) + v_l - v_r));
  }

  const double csum = fan.c_l + fan.c_r;
  fan.u_star = (fan.c_l * v_l + fan.c_r * v_r + p_l - p_r) / csum;
  fan.pi_star = (fan.c_r * p_l + fan.c_l * p_r - fan.c_l * fan.c_r * (v_r - v_l)) / csum;
  if (h_l > 0.0 && fan.c_l > 0.0) {
    const double inv = 1.0 / h_l + (fan.c_r * (v_r - v_l) + p_l - p_r) / (fan.c_l * csum);
    fan.h_star_l = inv > 0.0 ? 1.0 / inv : 0.0;
    fan.sigma_l = v_l - fan.c_l / h_l;
  }
  if (h_r > 0.0 && fan.c_r > 0.0) {
    const double inv = 1.0 / h_r + (fan.c_l * (v_r - v_l) + p_r - p_l) / (fan.c_r * csum);
    fan.h_star_r = inv > 0.0 ? 1.0 / inv : 0.0;
    fan.sigma_r = v_r + fan.c_r / h_r;
  }
  return fan;
}

}  // namespace detail

/// Suliciu relaxation flux for constant bottom topography, with vacuum
/// handling: a dry side gets zero relaxation parameter and contributes zero
/// flux left (right) of the contact.
inline FluxPair suliciu_flux(const SweState& uL, const SweState& uR, const PhysicsContext& ctx) {
  const double g = ctx.g;
  const bool dry_l = uL.h <= ctx.h_dry;
  const bool dry_r = uR.h <= ctx.h_dry;
  if (dry_l && dry_r) return {0.0, 0.0};
  const double v_l = velocity(uL, ctx), v_r = velocity(uR, ctx);

  if (dry_l) {
    const double a_r = std::sqrt(g * uR.h);
    const double u_star = v_r - 0.5 * a_r;        // limit c_l -> 0, pi* -> 0
    const double h_star = 2.0 * uR.h / 3.0;       // 1/h* = 1/h + 1/(2h)
    const double sigma_r = v_r + a_r;
    if (u_star >= 0.0) return {0.0, 0.0};
    if (sigma_r > 0.0) return {h_star * u_star, h_star * u_star * u_star};
    return {uR.h * v_r, uR.h * v_r * v_r + 0.5 * g * uR.h * uR.h};
  }
  if (dry_r) {
    const double a_l = std::sqrt(g * uL.h);
    const double u_star = v_l + 0.5 * a_l;
    const double h_star = 2.0 * uL.h / 3.0;
    const double sigma_l = v_l - a_l;
    if (u_star <= 0.0) return {0.0, 0.0};
    if (sigma_l < 0.0) return {h_star * u_star, h_star * u_star * u_star};
    return {uL.h * v_l, uL.h * v_l * v_l + 0.5 * g * uL.h * uL.h};
  }

  const auto fan = detail::suliciu_fan(uL.h, v_l, uR.h, v_r, ctx);
  if (fan.sigma_l > 0.0) return {uL.h * v_l, uL.h * v_l * v_l + 0.5 * g * uL.h * uL.h};
  if (fan.u_star > 0.0)
    return {fan.h_star_l * fan.u_star, fan.h_star_l * fan.u_star * fan.u_star + fan.pi_star};
  if (fan.sigma_r > 0.0)
    return {fan.h_star_r * fan.u_star, fan.h_star_r * fan.u_star * fan.u_star + fan.pi_star};
  return {uR.h * v_r, uR.h * v_r * v_r + 0.5 * g * uR.h * uR.h};
}

/// Largest signal speed of the Suliciu fan, for CFL control.
inline double suliciu_max_speed(const SweState& uL, const SweState& uR,
                                const PhysicsContext& ctx) {
  const bool dry_l = uL.h <= ctx.h_dry;
  const bool dry_r = uR.h <= ctx.h_dry;
  if (dry_l && dry_r) return 0.0;
  const double v_l = velocity(uL, ctx), v_r = velocity(uR, ctx);
  if (dry_l) {
    const double a_r = std::sqrt(ctx.g * uR.h);
    return std::max(std::abs(v_r - 0.5 * a_r), std::abs(v_r + a_r));
  }
  if (dry_r) {
    const double a_l = std::sqrt(ctx.g * uL.h);
    return std::max(std::abs(v_l + 0.5 * a_l), std::abs(v_l - a_l));
  }
  const auto fan = detail::suliciu_fan(uL.h, v_l, uR.h, v_r, ctx);
  return std::max(std::abs(fan.sigma_l), std::abs(fan.sigma_r));
}

namespace detail {

/// Upwind kinetic half flux: moments of the shallow-water Maxwellian over
/// non-negative (plus = true) or non-positive velocities.  The closed forms
/// come from integrating sqrt(2 g h - (xi - v)^2)/(g pi) against xi and xi^2.
inline FluxPair kinetic_half_flux(const SweState& u, bool plus, const PhysicsContext& ctx) {
  if (u.h <= ctx.h_dry) return {0.0, 0.0};
  const double g = ctx.g;
  const double v = velocity(u, ctx);
  const double r = std::sqrt(2.0 * g * u.h);  // support radius of the Maxwellian
  const auto full = [&]() -> FluxPair { return {u.h * v, u.h * v * v + 0.5 * g * u.h * u.h}; };
  if (plus) {
    if (v - r >= 0.0) return full();
    if (v + r <= 0.0) return {0.0, 0.0};
  } else {
    if (v + r <= 0.0) return full();
    if (v - r >= 0.0) return {0.0, 0.0};
  }
  const double t0 = std::asin(std::clamp(-v / r, -1.0, 1.0));
  const double t1 = plus ? M_PI / 2.0 : -M_PI / 2.0;
  const auto A = [](double t) { return 0.5 * t + 0.25 * std::sin(2.0 * t); };
  const auto B = [](double t) { const double c = std::cos(t); return -c * c * c / 3.0; };
  const auto C = [](double t) { return t / 8.0 - std::sin(4.0 * t) / 32.0; };
  const double dA = A(t1) - A(t0);
  const double dB = B(t1) - B(t0);
  const double dC = C(t1) - C(t0);
  const double r2 = r * r, r3 = r2 * r, r4 = r2 * r2;
  const double scale = plus ? 1.0 : -1.0;  // orientation of the theta interval
  return {scale * (v * r2 * dA + r3 * dB) / (g * M_PI),
          scale * (v * v * r2 * dA + 2.0 * v * r3 * dB + r4 * dC) / (g * M_PI)};
}

}  // namespace detail

/// Kinetic flux f+(uL) + f-(uR) for constant bottom topography.
inline FluxPair kinetic_flux(const SweState& uL, const SweState& uR, const PhysicsContext& ctx) {
  const FluxPair fp = detail::kinetic_half_flux(uL, true, ctx);
  const FluxPair fm = detail::kinetic_half_flux(uR, false, ctx);
  return {fp.f_h + fm.f_h, fp.f_hv + fm.f_hv};
}

inline double kinetic_max_speed(const SweState& uL, const SweState& uR,
                                const PhysicsContext& ctx) {
  const auto speed = [&](const SweState& u) {
    if (u.h <= ctx.h_dry) return 0.0;
    return std::abs(velocity(u, ctx)) + std::sqrt(2.0 * ctx.g * u.h);
  };
  return std::max(speed(uL), speed(uR));
}

/// Hydrostatic reconstruction wrapper: limits the interface heights with the
/// bottom jump, applies a constant-bottom flux to the limited states and adds
/// the per-side hydrostatic correction to the discharge component.
template <typename InnerFlux>
inline ExtendedFluxPair hydrostatic_reconstruction(InnerFlux&& inner, const SweState& uL,
                                                   const SweState& uR, double bL, double bR,
                                                   const PhysicsContext& ctx) {
  const double b_max = std::max(bL, bR);
  const double vL = velocity(uL, ctx), vR = velocity(uR, ctx);
  const double htL = std::max(0.0, uL.h + bL - b_max);
  const double htR = std::max(0.0, uR.h + bR - b_max);
  const SweState tL{htL, htL * vL};
  const SweState tR{htR, htR * vR};
  const FluxPair f = inner(tL, tR, ctx);
  ExtendedFluxPair out;
  out.f_h = f.f_h;
  out.f_hv_into_left = f.f_hv + 0.5 * ctx.g * (uL.h * uL.h - htL * htL);
  out.f_hv_into_right = f.f_hv + 0.5 * ctx.g * (uR.h * uR.h - htR * htR);
  return out;
}

}  // namespace swsbp

#endif  // SWSBP_FLUXES_HPP
