#ifndef SWSBP_TIME_INTEGRATION_HPP
#define SWSBP_TIME_INTEGRATION_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "swsbp/limiter.hpp"
#include "swsbp/semidiscretization.hpp"

namespace swsbp {

struct StepControl {
  double cfl = 0.5;       // Courant number for adaptive stepping
  int fixed_steps = 0;    // > 0: exactly this many equal steps over [0, T]
  double dt_max = 1e30;   // returned when the state is entirely dry
};

namespace detail {

inline void axpby(double a, const SolutionField& x, double b, const SolutionField& y,
                  SolutionField& out) {
  const std::size_t m = x.size();
  for (std::size_t i = 0; i < m; ++i) {
    out.h[i] = a * x.h[i] + b * y.h[i];
    out.hv[i] = a * x.hv[i] + b * y.hv[i];
  }
}

}  // namespace detail

/// One step of the three-stage, third-order strong stability preserving
/// Runge-Kutta method.  `post_stage` is applied after every Euler sub-step
/// (the positivity limiter, or a no-op).
template <typename Rhs, typename PostStage>
inline void ssprk33_step(Rhs&& rhs, PostStage&& post_stage, SolutionField& u, double dt,
                         SolutionField& u1, SolutionField& u2, SolutionField& k) {
  rhs(u, k);
  detail::axpby(1.0, u, dt, k, u1);
  post_stage(u1);

  rhs(u1, k);
  detail::axpby(1.0, u1, dt, k, u2);
  detail::axpby(0.75, u, 0.25, u2, u2);
  post_stage(u2);

  rhs(u2, k);
  detail::axpby(1.0, u2, dt, k, u1);
  detail::axpby(1.0 / 3.0, u, 2.0 / 3.0, u1, u);
  post_stage(u);
}

/// CFL time step dt = cfl * (w_min/2) * dx / max wave speed, where w_min is
/// the smallest quadrature weight of the active positivity check basis
/// (for p = 0 the solution basis itself, recovering the plain finite volume
/// CFL).  Entirely dry states yield dt_max.
inline double compute_dt(const SolutionField& state, const Mesh& mesh, const SbpOperator& op,
                         const LimiterConfig& limiter, const StepControl& control,
                         const PhysicsContext& ctx) {
  double lambda = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i)
    lambda = std::max(lambda, max_wave_speed({state.h[i], state.hv[i]}, ctx));
  if (lambda <= 0.0) return control.dt_max;

  double w_min = op.weights[0];
  for (double w : op.weights) w_min = std::min(w_min, w);
  if (limiter.enabled && limiter.n_check_nodes() > 0)
    for (double w : limiter.check_weights) w_min = std::min(w_min, w);

  return std::min(control.dt_max, control.cfl * 0.5 * w_min * mesh.dx() / lambda);
}

/// Per-step record emitted by evolve().
struct StepRecord {
  int step = 0;
  double t = 0.0;
  double dt = 0.0;
  Diagnostics diagnostics;
  double min_h = 0.0;
  int n_subcell_elements = 0;
};

/// Advances the state to the final time, applying the limiter after every
/// stage, and reports diagnostics for each accepted step through `sink`.
/// Fixed-count mode uses exactly control.fixed_steps equal steps; adaptive
/// mode uses compute_dt with the final step clipped to land on t_final.
inline double evolve(const SpatialOperator& spatial, SolutionField& u, double t_final,
                     const StepControl& control, const LimiterConfig& limiter,
                     const std::function<void(const StepRecord&)>& sink = {}) {
  const SbpOperator& op = spatial.op();
  SolutionField u1 = spatial.make_field();
  SolutionField u2 = spatial.make_field();
  SolutionField k = spatial.make_field();

  auto post_stage = [&](SolutionField& f) {
    if (!limiter.enabled) return;
    for (int e = 0; e < f.n_elements; ++e) {
      const LimiterResult res = positivity_limit(f.h_at(e), op, limiter);
      if (limiter.limit_discharge) limit_discharge_consistency(f.hv_at(e), op, res.theta);
    }
  };

  int n_subcell = 0;
  auto rhs = [&](const SolutionField& state, SolutionField& out) {
    spatial.rhs(state, out, &n_subcell);
  };

  double t = 0.0;
  int step = 0;
  while (t < t_final - 1e-14 * std::max(1.0, t_final)) {
    double dt;
    if (control.fixed_steps > 0) {
      dt = t_final / control.fixed_steps;
      if (step + 1 == control.fixed_steps) dt = t_final - t;  // absorb roundoff
    } else {
      dt = compute_dt(u, spatial.mesh(), op, limiter, control, spatial.ctx());
      dt = std::min(dt, t_final - t);
    }

    if (sink) {
      SolutionField rate = spatial.make_field();
      rhs(u, rate);
      StepRecord rec;
      rec.step = step;
      rec.t = t;
      rec.dt = dt;
      rec.diagnostics = spatial.diagnostics(u, &rate);
      rec.min_h = u.min_h();
      rec.n_subcell_elements = n_subcell;
      sink(rec);
    }

    ssprk33_step(rhs, post_stage, u, dt, u1, u2, k);
    t += dt;
    ++step;
    if (control.fixed_steps > 0 && step >= control.fixed_steps) break;
  }
  return t;
}

}  // namespace swsbp

#endif  // SWSBP_TIME_INTEGRATION_HPP
