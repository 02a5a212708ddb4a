#ifndef SWSBP_SEMIDISCRETIZATION_HPP
#define SWSBP_SEMIDISCRETIZATION_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "swsbp/fluxes.hpp"
#include "swsbp/physics.hpp"
#include "swsbp/sbp.hpp"
#include "swsbp/surface_coefficients.hpp"

namespace swsbp {

/// Uniform periodic partition of [x_left, x_right].
struct Mesh {
  double x_left = 0.0;
  double x_right = 1.0;
  int n_elements = 1;
  bool periodic = true;

  Mesh() = default;
  Mesh(double xl, double xr, int n, bool per = true)
      : x_left(xl), x_right(xr), n_elements(n), periodic(per) {
    if (!(xr > xl) || n < 1) throw std::invalid_argument("Mesh: invalid extents");
    if (!per) throw std::invalid_argument("Mesh: only periodic meshes are supported");
  }

  double dx() const { return (x_right - x_left) / n_elements; }
  /// Physical coordinate of reference node xi in element i.
  double node(int element, double xi) const {
    return x_left + element * dx() + 0.5 * (xi + 1.0) * dx();
  }
};

/// Nodal degrees of freedom, n_elements x (p+1) per component.
struct SolutionField {
  int n_elements = 0;
  int nodes_per_element = 0;
  std::vector<double> h;
  std::vector<double> hv;

  SolutionField() = default;
  SolutionField(int ne, int n)
      : n_elements(ne),
        nodes_per_element(n),
        h(static_cast<std::size_t>(ne) * n, 0.0),
        hv(static_cast<std::size_t>(ne) * n, 0.0) {}

  std::size_t offset(int e) const { return static_cast<std::size_t>(e) * nodes_per_element; }
  double* h_at(int e) { return h.data() + offset(e); }
  double* hv_at(int e) { return hv.data() + offset(e); }
  const double* h_at(int e) const { return h.data() + offset(e); }
  const double* hv_at(int e) const { return hv.data() + offset(e); }
  std::size_t size() const { return h.size(); }

  double min_h() const {
    double m = std::numeric_limits<double>::infinity();
    for (double x : h) m = std::min(m, x);
    return m;
  }
};

enum class SurfaceFluxKind {
  entropy_conservative,
  es_llf_type,
  llf,
  suliciu,
  kinetic,
  hr_llf,
  hr_suliciu,
  hr_kinetic,
};

struct SubcellConfig {
  double threshold = 0.0;  // <= 0 disables the finite volume subcells
  bool include_neighbors = false;
  bool enabled() const { return threshold > 0.0; }
};

struct SemidiscConfig {
  FluxParams volume_params{};
  FluxParams surface_params{};  // parameters of the entropy conservative surface flux
  SurfaceFluxKind surface_flux = SurfaceFluxKind::entropy_conservative;
  SubcellConfig subcell{};
};

/// Raised when a right-hand-side evaluation produces a non-finite value.
struct SolverAbort : std::runtime_error {
  int element;
  std::string component;
  SolverAbort(int e, std::string comp)
      : std::runtime_error("non-finite right-hand side in element " + std::to_string(e) +
                           ", component " + comp),
        element(e),
        component(std::move(comp)) {}
};

/// True iff the minimal nodal water height over the element (and, when
/// requested, its periodic neighbors) falls below the threshold.
inline bool subcell_detector(const SolutionField& state, int element, double threshold,
                             bool include_neighbors) {
  const int n = state.nodes_per_element;
  const int ne = state.n_elements;
  auto element_min = [&](int e) {
    const double* h = state.h_at(e);
    double m = h[0];
    for (int k = 1; k < n; ++k) m = std::min(m, h[k]);
    return m;
  };
  double m = element_min(element);
  if (include_neighbors) {
    m = std::min(m, element_min((element + 1) % ne));
    m = std::min(m, element_min((element + ne - 1) % ne));
  }
  return m < threshold;
}

namespace detail {

/// Per-element scratch arrays for the split-form evaluation.
struct ElementWorkspace {
  std::vector<double> v, v2, v3, v4, h2, hv, hv2, hb, bv, bv2, sigma, hsigma;
  std::vector<double> d_hv, d_v, d_h, d_v3, d_v2, d_hv2, d_v4, d_bv2, d_bv, d_sigma, d_hsigma,
      d_b;

  void resize(int n) {
    for (auto* vec : {&v, &v2, &v3, &v4, &h2, &hv, &hv2, &hb, &bv, &bv2, &sigma, &hsigma,
                      &d_hv, &d_v, &d_h, &d_v3, &d_v2, &d_hv2, &d_v4, &d_bv2, &d_bv, &d_sigma,
                      &d_hsigma, &d_b})
      vec->resize(static_cast<std::size_t>(n));
  }

  void fill_products(const double* h, const double* hv_cons, const double* b, int n,
                     const PhysicsContext& ctx) {
    for (int k = 0; k < n; ++k) {
      const double vk = velocity({h[k], hv_cons[k]}, ctx);
      v[k] = vk;
      v2[k] = vk * vk;
      v3[k] = vk * vk * vk;
      v4[k] = v2[k] * v2[k];
      h2[k] = h[k] * h[k];
      hv[k] = h[k] * vk;
      hv2[k] = h[k] * v2[k];
      hb[k] = h[k] * b[k];
      bv[k] = b[k] * vk;
      bv2[k] = b[k] * v2[k];
      sigma[k] = h[k] + b[k];
      hsigma[k] = h[k] * sigma[k];
    }
  }
};

}  // namespace detail

/// Split-form volume terms for one element on the reference scale, including
/// the bottom-topography source rows.  Valid for diagonal-norm nodal bases,
/// where the M-adjoint of a multiplication operator is the operator itself.
inline void volume_terms(const double* h, const double* hv_cons, const double* b,
                         const SbpOperator& op, const FluxParams& p, const PhysicsContext& ctx,
                         double* rate_h, double* rate_hv,
                         detail::ElementWorkspace& ws) {
  const int n = op.n();
  const double g = ctx.g;
  const double a1 = p.a1, a2 = p.a2;
  const double c123 = a1 + 3.0 * a2 - 2.0;
  ws.resize(n);
  ws.fill_products(h, hv_cons, b, n, ctx);

  op.apply_d(ws.hv.data(), ws.d_hv.data());
  op.apply_d(ws.v.data(), ws.d_v.data());
  op.apply_d(h, ws.d_h.data());
  op.apply_d(ws.v3.data(), ws.d_v3.data());
  op.apply_d(ws.v2.data(), ws.d_v2.data());
  op.apply_d(ws.hv2.data(), ws.d_hv2.data());
  op.apply_d(ws.v4.data(), ws.d_v4.data());
  op.apply_d(ws.bv2.data(), ws.d_bv2.data());
  op.apply_d(ws.bv.data(), ws.d_bv.data());
  op.apply_d(ws.sigma.data(), ws.d_sigma.data());
  op.apply_d(ws.hsigma.data(), ws.d_hsigma.data());
  op.apply_d(b, ws.d_b.data());

  for (int i = 0; i < n; ++i) {
    rate_h[i] = (3.0 - a1) / 4.0 * ws.d_hv[i] +
                (1.0 + a1) / 4.0 * (h[i] * ws.d_v[i] + ws.v[i] * ws.d_h[i]) +
                c123 / (8.0 * g) *
                    (ws.d_v3[i] - ws.v[i] * ws.d_v2[i] - ws.v2[i] * ws.d_v[i]);
    // Hydrostatic pressure and bottom source combined in terms of the free
    // surface sigma = h + b; identical to the plain split form but with
    // exact cancellation on lake-at-rest data.
    rate_hv[i] =
        (1.0 + a1) / 4.0 * g * (ws.d_hsigma[i] - ws.sigma[i] * ws.d_h[i]) +
        (3.0 - a1) / 4.0 * g * h[i] * ws.d_sigma[i] -
        (2.0 * a1 + 3.0 * a2 - 5.0) / 8.0 * ws.d_hv2[i] +
        (2.0 * a1 + 3.0 * a2 - 1.0) / 8.0 * (h[i] * ws.d_v2[i] + ws.v2[i] * ws.d_h[i]) +
        0.5 * (ws.hv[i] * ws.d_v[i] + ws.v[i] * ws.d_hv[i]) +
        c123 / (16.0 * g) * (ws.d_v4[i] - 2.0 * ws.v2[i] * ws.d_v2[i]) +
        c123 / 8.0 *
            (ws.d_bv2[i] - b[i] * ws.d_v2[i] - 2.0 * ws.v[i] * ws.d_bv[i] +
             ws.v2[i] * ws.d_b[i] + 2.0 * ws.bv[i] * ws.d_v[i]);
  }
}

/// Second evaluation path for the volume terms: flux differencing with the
/// extended two-point flux, 2 sum_k D_{ik} f(u_i, u_k).
inline void volume_terms_flux_differencing(const double* h, const double* hv_cons,
                                           const double* b, const SbpOperator& op,
                                           const FluxParams& p, const PhysicsContext& ctx,
                                           double* rate_h, double* rate_hv) {
  const int n = op.n();
  for (int i = 0; i < n; ++i) {
    double acc_h = 0.0, acc_hv = 0.0;
    const SweState ui{h[i], hv_cons[i]};
    for (int k = 0; k < n; ++k) {
      const SweState uk{h[k], hv_cons[k]};
      const FluxPair sym = ec_flux(ui, uk, p, ctx);
      const double src = extended_source_term(ui.h, velocity(ui, ctx), b[i], uk.h,
                                              velocity(uk, ctx), b[k], p, ctx);
      acc_h += 2.0 * op.d(i, k) * sym.f_h;
      acc_hv += 2.0 * op.d(i, k) * (sym.f_hv + src);
    }
    rate_h[i] = acc_h;
    rate_hv[i] = acc_hv;
  }
}

/// Surface correction terms of the general-basis ansatz, reference scale.
/// `f_h_boundary` carries the h-component of the interface numerical flux at
/// the element's left and right boundary; the two flux correction structures
/// pair it with the interpolated velocity.  On bases with boundary nodes the
/// whole expression collapses to the plain boundary evaluation of the fluxes.
inline void surface_correction_terms(const double* h, const double* hv_cons, const double* b,
                                     const SbpOperator& op, const SurfaceCoefficients& c,
                                     const PhysicsContext& ctx,
                                     const std::array<double, 2>& f_h_boundary,
                                     double* rate_h, double* rate_hv,
                                     detail::ElementWorkspace& ws) {
  const int n = op.n();
  const double g = ctx.g;
  ws.resize(n);
  ws.fill_products(h, hv_cons, b, n, ctx);

  const auto th = op.trace(h);
  const auto tv = op.trace(ws.v);
  const auto tv2 = op.trace(ws.v2);
  const auto tv3 = op.trace(ws.v3);
  const auto tv4 = op.trace(ws.v4);
  const auto th2 = op.trace(ws.h2);
  const auto thv = op.trace(ws.hv);
  const auto thv2 = op.trace(ws.hv2);
  const auto thb = op.trace(ws.hb);
  const auto tb = op.trace(b);
  const auto tbv = op.trace(ws.bv);
  const auto tbv2 = op.trace(ws.bv2);

  // Boundary payloads: one accumulator per nodal multiplier, per component.
  std::array<double, 2> h_plain{}, h_mul_h{}, h_mul_v{}, h_mul_v2{};
  std::array<double, 2> q_plain{}, q_mul_v{}, q_mul_v2{}, q_mul_v3{}, q_mul_h{}, q_mul_b{},
      q_mul_bv{}, q_mul_hv{};

  for (int s = 0; s < 2; ++s) {
    h_plain[s] = c.b1 * thv[s] + c.b2 * th[s] * tv[s] +
                 (c.c1 * tv3[s] + c.c2 * tv[s] * tv2[s]) / g;
    h_mul_h[s] = c.b3 * tv[s];
    h_mul_v[s] = c.b4 * th[s] + c.c3 / g * tv2[s];
    h_mul_v2[s] = c.c4 / g * tv[s];

    q_plain[s] = c.d1 * thv2[s] + c.d2 * th[s] * tv2[s] + c.d3 * thv[s] * tv[s] +
                 c.d4 * th[s] * tv[s] * tv[s] +
                 g * (c.e1 * th2[s] + c.e2 * th[s] * th[s]) +
                 (c.k1 * tv4[s] + c.k2 * tv[s] * tv3[s] + c.k3 * tv2[s] * tv2[s] +
                  c.k4 * tv[s] * tv[s] * tv2[s] + c.k5 * tv[s] * tv[s] * tv[s] * tv[s]) /
                     g +
                 c.l1 * tbv2[s] + c.l2 * tb[s] * tv2[s] + c.l3 * tbv[s] * tv[s] +
                 c.l4 * tb[s] * tv[s] * tv[s] +
                 g * (c.m1 * thb[s] + c.m2 * tb[s] * th[s]) +
                 0.5 * f_h_boundary[s] * tv[s];
    q_mul_v[s] = c.d5 * thv[s] + (c.k6 * tv3[s] + c.k7 * tv[s] * tv2[s] +
                                  c.k8 * tv[s] * tv[s] * tv[s]) /
                                     g +
                 c.l8 * tbv[s] + c.l10 * tb[s] * tv[s] - 0.5 * f_h_boundary[s];
    q_mul_v2[s] = c.d7 * th[s] + (c.k9 * tv2[s] + c.k10 * tv[s] * tv[s]) / g + c.l6 * tb[s];
    q_mul_v3[s] = c.k11 / g * tv[s];
    q_mul_h[s] = c.d8 * tv2[s] + g * c.e3 * th[s] + g * c.m3 * tb[s];
    q_mul_b[s] = c.l5 * tv2[s] + c.l9 * tv[s] * tv[s] + g * c.m4 * th[s];
    q_mul_bv[s] = c.l7 * tv[s];
    q_mul_hv[s] = c.d6 * tv[s];
  }

  for (int j = 0; j < n; ++j) {
    const double lift1 = op.r(1, j) / op.weights[static_cast<std::size_t>(j)];
    const double lift0 = op.r(0, j) / op.weights[static_cast<std::size_t>(j)];
    auto lift = [&](const std::array<double, 2>& s) { return lift1 * s[1] - lift0 * s[0]; };
    rate_h[j] = lift(h_plain) + h[j] * lift(h_mul_h) + ws.v[j] * lift(h_mul_v) +
                ws.v2[j] * lift(h_mul_v2);
    rate_hv[j] = lift(q_plain) + ws.v[j] * lift(q_mul_v) + ws.v2[j] * lift(q_mul_v2) +
                 ws.v3[j] * lift(q_mul_v3) + h[j] * lift(q_mul_h) + b[j] * lift(q_mul_b) +
                 ws.bv[j] * lift(q_mul_bv) + ws.hv[j] * lift(q_mul_hv);
  }
}

namespace detail {

/// One interface between two elements; stores the flux into each side.
struct InterfaceFlux {
  double f_h = 0.0;
  double f_hv_into_left = 0.0;
  double f_hv_into_right = 0.0;
};

struct Trace {
  double h = 0.0, v = 0.0, b = 0.0;
  SweState state() const { return {h, h * v}; }
};

inline InterfaceFlux evaluate_interface_flux(SurfaceFluxKind kind, const Trace& L,
                                             const Trace& R, const FluxParams& surface_params,
                                             const PhysicsContext& ctx) {
  const SweState uL = L.state();
  const SweState uR = R.state();
  InterfaceFlux out;
  switch (kind) {
    case SurfaceFluxKind::entropy_conservative: {
      const auto f = ec_flux_extended(uL, uR, L.b, R.b, surface_params, ctx);
      out = {f.f_h, f.f_hv_into_left, f.f_hv_into_right};
      break;
    }
    case SurfaceFluxKind::es_llf_type: {
      FluxParams p = surface_params;
      p.a2 = (2.0 - p.a1) / 3.0;
      const auto f = ec_flux_extended(uL, uR, L.b, R.b, p, ctx);
      const double lambda = llf_wave_speed(uL, uR, ctx);
      const double dh = 0.5 * lambda * ((uR.h + R.b) - (uL.h + L.b));
      const double dhv = 0.5 * lambda * ((uR.hv - uL.hv) + 0.5 * (L.v + R.v) * (R.b - L.b));
      out = {f.f_h - dh, f.f_hv_into_left - dhv, f.f_hv_into_right - dhv};
      break;
    }
    case SurfaceFluxKind::llf: {
      const auto f = llf_flux(uL, uR, ctx);
      out = {f.f_h, f.f_hv, f.f_hv};
      break;
    }
    case SurfaceFluxKind::suliciu: {
      const auto f = suliciu_flux(uL, uR, ctx);
      out = {f.f_h, f.f_hv, f.f_hv};
      break;
    }
    case SurfaceFluxKind::kinetic: {
      const auto f = kinetic_flux(uL, uR, ctx);
      out = {f.f_h, f.f_hv, f.f_hv};
      break;
    }
    case SurfaceFluxKind::hr_llf: {
      const auto f = hydrostatic_reconstruction(
          [](const SweState& a, const SweState& b2, const PhysicsContext& c) {
            return llf_flux(a, b2, c);
          },
          uL, uR, L.b, R.b, ctx);
      out = {f.f_h, f.f_hv_into_left, f.f_hv_into_right};
      break;
    }
    case SurfaceFluxKind::hr_suliciu: {
      const auto f = hydrostatic_reconstruction(
          [](const SweState& a, const SweState& b2, const PhysicsContext& c) {
            return suliciu_flux(a, b2, c);
          },
          uL, uR, L.b, R.b, ctx);
      out = {f.f_h, f.f_hv_into_left, f.f_hv_into_right};
      break;
    }
    case SurfaceFluxKind::hr_kinetic: {
      const auto f = hydrostatic_reconstruction(
          [](const SweState& a, const SweState& b2, const PhysicsContext& c) {
            return kinetic_flux(a, b2, c);
          },
          uL, uR, L.b, R.b, ctx);
      out = {f.f_h, f.f_hv_into_left, f.f_hv_into_right};
      break;
    }
  }
  return out;
}

}  // namespace detail

/// First-order finite volume update on the subcells of one element,
/// reference scale.  Subcell k has width M_kk; the element-boundary subcells
/// receive the interface fluxes computed from the outer nodal values.
inline void fv_subcell_rhs(const double* h, const double* hv_cons, const double* b,
                           const SbpOperator& op, SurfaceFluxKind kind,
                           const FluxParams& surface_params, const PhysicsContext& ctx,
                           const detail::InterfaceFlux& left_interface,
                           const detail::InterfaceFlux& right_interface, double* rate_h,
                           double* rate_hv) {
  const int n = op.n();
  // Flux into subcell k from the pair (k, k+1), and into k+1 from (k+1, k).
  std::vector<detail::InterfaceFlux> inner(static_cast<std::size_t>(std::max(0, n - 1)));
  for (int k = 0; k + 1 < n; ++k) {
    const detail::Trace L{h[k], velocity({h[k], hv_cons[k]}, ctx), b[k]};
    const detail::Trace R{h[k + 1], velocity({h[k + 1], hv_cons[k + 1]}, ctx), b[k + 1]};
    inner[static_cast<std::size_t>(k)] = detail::evaluate_interface_flux(kind, L, R, surface_params, ctx);
  }
  for (int k = 0; k < n; ++k) {
    const double fl_h = k == 0 ? left_interface.f_h : inner[static_cast<std::size_t>(k - 1)].f_h;
    const double fl_hv = k == 0 ? left_interface.f_hv_into_right
                                : inner[static_cast<std::size_t>(k - 1)].f_hv_into_right;
    const double fr_h = k == n - 1 ? right_interface.f_h : inner[static_cast<std::size_t>(k)].f_h;
    const double fr_hv = k == n - 1 ? right_interface.f_hv_into_left
                                    : inner[static_cast<std::size_t>(k)].f_hv_into_left;
    const double w = op.weights[static_cast<std::size_t>(k)];
    rate_h[k] = -(fr_h - fl_h) / w;
    rate_hv[k] = -(fr_hv - fl_hv) / w;
  }
}

struct Diagnostics {
  double mass = 0.0;
  double momentum = 0.0;
  double total_entropy = 0.0;
  double entropy_rate = 0.0;
};

/// Assembles the global spatial right-hand side d/dt (h, hv) for the
/// split-form semidiscretisation on a periodic mesh.
class SpatialOperator {
 public:
  SpatialOperator(Mesh mesh, const SbpOperator& op, std::vector<double> bottom,
                  SemidiscConfig config, PhysicsContext ctx)
      : mesh_(mesh),
        op_(op),
        bottom_(std::move(bottom)),
        config_(config),
        coeffs_(surface_coefficients(config.volume_params)),
        ctx_(ctx) {
    const std::size_t expected =
        static_cast<std::size_t>(mesh_.n_elements) * static_cast<std::size_t>(op_.n());
    if (bottom_.size() != expected)
      throw std::invalid_argument("SpatialOperator: bottom array shape mismatch");
    bottom_traces_.resize(static_cast<std::size_t>(mesh_.n_elements));
    for (int e = 0; e < mesh_.n_elements; ++e)
      bottom_traces_[static_cast<std::size_t>(e)] = op_.trace(bottom_at(e));
  }

  const Mesh& mesh() const { return mesh_; }
  const SbpOperator& op() const { return op_; }
  const PhysicsContext& ctx() const { return ctx_; }
  const SemidiscConfig& config() const { return config_; }
  const double* bottom_at(int e) const {
    return bottom_.data() + static_cast<std::size_t>(e) * op_.n();
  }
  const std::vector<double>& bottom() const { return bottom_; }

  SolutionField make_field() const { return SolutionField(mesh_.n_elements, op_.n()); }

  /// Evaluates the right-hand side; throws SolverAbort on non-finite output.
  void rhs(const SolutionField& state, SolutionField& out, int* n_subcell = nullptr) const {
    const int ne = mesh_.n_elements;
    const int n = op_.n();
    if (state.n_elements != ne || state.nodes_per_element != n)
      throw std::invalid_argument("SpatialOperator::rhs: state shape mismatch");
    if (out.n_elements != ne || out.nodes_per_element != n) out = SolutionField(ne, n);

    for (int e = 0; e < ne; ++e) {
      for (int k = 0; k < n; ++k) {
        if (!std::isfinite(state.h_at(e)[k])) throw SolverAbort(e, "h");
        if (!std::isfinite(state.hv_at(e)[k])) throw SolverAbort(e, "hv");
      }
    }

    flags_.assign(static_cast<std::size_t>(ne), 0);
    flag_count_ = 0;
    if (config_.subcell.enabled()) {
      for (int e = 0; e < ne; ++e) {
        if (subcell_detector(state, e, config_.subcell.threshold,
                             config_.subcell.include_neighbors)) {
          flags_[static_cast<std::size_t>(e)] = 1;
          ++flag_count_;
        }
      }
    }
    if (n_subcell) *n_subcell = flag_count_;

    // Boundary traces per element.  High-order elements interpolate h and v
    // separately; subcell elements use the outer nodal values.
    traces_.resize(static_cast<std::size_t>(ne));
    for (int e = 0; e < ne; ++e) {
      const double* h = state.h_at(e);
      const double* hv = state.hv_at(e);
      const double* b = bottom_at(e);
      auto& tr = traces_[static_cast<std::size_t>(e)];
      if (flags_[static_cast<std::size_t>(e)]) {
        tr[0] = {h[0], velocity({h[0], hv[0]}, ctx_), b[0]};
        tr[1] = {h[n - 1], velocity({h[n - 1], hv[n - 1]}, ctx_), b[n - 1]};
      } else {
        vbuf_.resize(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) vbuf_[static_cast<std::size_t>(k)] = velocity({h[k], hv[k]}, ctx_);
        const auto th = op_.trace(h);
        const auto tv = op_.trace(vbuf_);
        const auto& tb = bottom_traces_[static_cast<std::size_t>(e)];
        tr[0] = {th[0], tv[0], tb[0]};
        tr[1] = {th[1], tv[1], tb[1]};
      }
    }

    // One flux per interface; interface e sits between elements e and e+1.
    interface_fluxes_.resize(static_cast<std::size_t>(ne));
    for (int e = 0; e < ne; ++e) {
      const int right = (e + 1) % ne;
      interface_fluxes_[static_cast<std::size_t>(e)] = detail::evaluate_interface_flux(
          config_.surface_flux, traces_[static_cast<std::size_t>(e)][1],
          traces_[static_cast<std::size_t>(right)][0], config_.surface_params, ctx_);
    }

    const double jac = 2.0 / mesh_.dx();
    vol_h_.resize(static_cast<std::size_t>(n));
    vol_hv_.resize(static_cast<std::size_t>(n));
    surf_h_.resize(static_cast<std::size_t>(n));
    surf_hv_.resize(static_cast<std::size_t>(n));
    for (int e = 0; e < ne; ++e) {
      const double* h = state.h_at(e);
      const double* hv = state.hv_at(e);
      const double* b = bottom_at(e);
      double* rh = out.h_at(e);
      double* rhv = out.hv_at(e);
      const auto& fl = interface_fluxes_[static_cast<std::size_t>((e + ne - 1) % ne)];
      const auto& fr = interface_fluxes_[static_cast<std::size_t>(e)];

      if (flags_[static_cast<std::size_t>(e)]) {
        fv_subcell_rhs(h, hv, b, op_, config_.surface_flux, config_.surface_params, ctx_, fl,
                       fr, rh, rhv);
        for (int k = 0; k < n; ++k) {
          rh[k] *= jac;
          rhv[k] *= jac;
        }
      } else {
        volume_terms(h, hv, b, op_, config_.volume_params, ctx_, vol_h_.data(), vol_hv_.data(),
                     ws_);
        surface_correction_terms(h, hv, b, op_, coeffs_, ctx_, {fl.f_h, fr.f_h}, surf_h_.data(),
                                 surf_hv_.data(), ws_);
        for (int k = 0; k < n; ++k) {
          rh[k] = surf_h_[static_cast<std::size_t>(k)] - vol_h_[static_cast<std::size_t>(k)];
          rhv[k] = surf_hv_[static_cast<std::size_t>(k)] - vol_hv_[static_cast<std::size_t>(k)];
        }
        op_.add_lifted(-1.0, {fl.f_h, fr.f_h}, rh);
        op_.add_lifted(-1.0, {fl.f_hv_into_right, fr.f_hv_into_left}, rhv);
        for (int k = 0; k < n; ++k) {
          rh[k] *= jac;
          rhv[k] *= jac;
        }
      }
      for (int k = 0; k < n; ++k) {
        if (!std::isfinite(rh[k])) throw SolverAbort(e, "h");
        if (!std::isfinite(rhv[k])) throw SolverAbort(e, "hv");
      }
    }
  }

  SolutionField rhs(const SolutionField& state) const {
    SolutionField out(mesh_.n_elements, op_.n());
    rhs(state, out);
    return out;
  }

  /// Quadrature-weighted conservation sums and the semidiscrete entropy rate.
  /// When `rate` is null the right-hand side is evaluated internally.
  Diagnostics diagnostics(const SolutionField& state, const SolutionField* rate = nullptr) const {
    SolutionField tmp;
    if (!rate) {
      tmp = rhs(state);
      rate = &tmp;
    }
    Diagnostics d;
    const int n = op_.n();
    const double scale = 0.5 * mesh_.dx();
    for (int e = 0; e < mesh_.n_elements; ++e) {
      const double* h = state.h_at(e);
      const double* hv = state.hv_at(e);
      const double* b = bottom_at(e);
      const double* rh = rate->h_at(e);
      const double* rhv = rate->hv_at(e);
      for (int k = 0; k < n; ++k) {
        const double w = op_.weights[static_cast<std::size_t>(k)] * scale;
        const SweState s{h[k], hv[k]};
        d.mass += w * h[k];
        d.momentum += w * hv[k];
        d.total_entropy += w * entropy(s, b[k], ctx_);
        const EntropyVars ww = to_entropy_vars(s, b[k], ctx_);
        d.entropy_rate += w * (ww.w1 * rh[k] + ww.w2 * rhv[k]);
      }
    }
    return d;
  }

  int subcell_count(const SolutionField& state) const {
    if (!config_.subcell.enabled()) return 0;
    int count = 0;
    for (int e = 0; e < mesh_.n_elements; ++e)
      count += subcell_detector(state, e, config_.subcell.threshold,
                                config_.subcell.include_neighbors);
    return count;
  }

 private:
  Mesh mesh_;
  const SbpOperator& op_;
  std::vector<double> bottom_;
  SemidiscConfig config_;
  SurfaceCoefficients coeffs_;
  PhysicsContext ctx_;
  std::vector<std::array<double, 2>> bottom_traces_;

  // Scratch storage; rhs() is logically const and single-threaded.
  mutable std::vector<char> flags_;
  mutable int flag_count_ = 0;
  mutable std::vector<std::array<detail::Trace, 2>> traces_;
  mutable std::vector<detail::InterfaceFlux> interface_fluxes_;
  mutable std::vector<double> vbuf_, vol_h_, vol_hv_, surf_h_, surf_hv_;
  mutable detail::ElementWorkspace ws_;
};

}  // namespace swsbp

#endif  // SWSBP_SEMIDISCRETIZATION_HPP
