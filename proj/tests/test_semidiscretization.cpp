#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <functional>

#include "swsbp/random.hpp"
#include "swsbp/semidiscretization.hpp"
#include "test_util.hpp"

using namespace swsbp;

namespace {

const PhysicsContext unit_g{1.0, 1e-12};

struct Setup {
  Mesh mesh;
  const SbpOperator& op;
  std::vector<double> bottom;
  SolutionField state;
};

Setup sampled(NodeFamily fam, int p, int ne, const std::function<double(double)>& b,
              const std::function<double(double)>& h0,
              const std::function<double(double)>& v0, double xl = -1.0, double xr = 1.0) {
  const SbpOperator& op = sbp_operator(fam, p);
  Mesh mesh(xl, xr, ne);
  SolutionField state(ne, op.n());
  std::vector<double> bottom(state.size());
  for (int e = 0; e < ne; ++e) {
    for (int k = 0; k < op.n(); ++k) {
      const double x = mesh.node(e, op.nodes[static_cast<std::size_t>(k)]);
      const double h = h0(x);
      state.h_at(e)[k] = h;
      state.hv_at(e)[k] = h * v0(x);
      bottom[state.offset(e) + static_cast<std::size_t>(k)] = b(x);
    }
  }
  return {mesh, op, std::move(bottom), std::move(state)};
}

FluxParams random_params(Rng& rng, bool with_free = true) {
  FluxParams p;
  p.a1 = rng.uniform(-3.0, 3.0);
  p.a2 = rng.uniform(-3.0, 3.0);
  if (with_free) {
    p.m4 = rng.uniform(-1.0, 1.0);
    p.k9 = rng.uniform(-1.0, 1.0);
    p.k10 = rng.uniform(-1.0, 1.0);
    p.k11 = rng.uniform(-1.0, 1.0);
    p.l10 = rng.uniform(-1.0, 1.0);
  }
  return p;
}

}  // namespace

TEST_CASE("volume terms vanish on constant data", "[semidisc]") {
  Rng rng(41);
  detail::ElementWorkspace ws;
  for (NodeFamily fam : {NodeFamily::lobatto, NodeFamily::gauss}) {
    const SbpOperator& op = sbp_operator(fam, 4);
    const std::size_t n = static_cast<std::size_t>(op.n());
    std::vector<double> h(n, 1.3), hv(n, 0.65), b(n, 0.2), rh(n), rhv(n);
    const FluxParams p = random_params(rng);
    volume_terms(h.data(), hv.data(), b.data(), op, p, unit_g, rh.data(), rhv.data(), ws);
    for (std::size_t k = 0; k < n; ++k) {
      REQUIRE(std::abs(rh[k]) <= 1e-14);
      REQUIRE(std::abs(rhv[k]) <= 1e-14);
    }
  }
}

TEST_CASE("volume terms vanish on a lake-at-rest element", "[semidisc]") {
  Rng rng(43);
  detail::ElementWorkspace ws;
  for (NodeFamily fam : {NodeFamily::lobatto, NodeFamily::gauss}) {
    for (int p_deg : {2, 5}) {
      const SbpOperator& op = sbp_operator(fam, p_deg);
      const std::size_t n = static_cast<std::size_t>(op.n());
      std::vector<double> h(n), hv(n, 0.0), b(n), rh(n), rhv(n);
      for (std::size_t k = 0; k < n; ++k) {
        b[k] = 0.3 * std::sin(2.0 * op.nodes[k]);
        h[k] = 1.0 - b[k];
      }
      for (int trial = 0; trial < 10; ++trial) {
        const FluxParams p = random_params(rng);
        volume_terms(h.data(), hv.data(), b.data(), op, p, unit_g, rh.data(), rhv.data(), ws);
        for (std::size_t k = 0; k < n; ++k) {
          REQUIRE(std::abs(rh[k]) <= 1e-13);
          REQUIRE(std::abs(rhv[k]) <= 1e-13);
        }
      }
    }
  }
}

TEST_CASE("split form and flux differencing agree", "[semidisc]") {
  Rng rng(47);
  detail::ElementWorkspace ws;
  for (auto [fam, p_deg] : {std::pair{NodeFamily::lobatto, 4}, std::pair{NodeFamily::gauss, 3}}) {
    const SbpOperator& op = sbp_operator(fam, p_deg);
    const std::size_t n = static_cast<std::size_t>(op.n());
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> h(n), hv(n), b(n), rh(n), rhv(n), fh(n), fhv(n);
      for (std::size_t k = 0; k < n; ++k) {
        h[k] = rng.uniform(0.5, 2.0);
        hv[k] = rng.uniform(-1.0, 1.0);
        b[k] = rng.uniform(-0.5, 0.5);
      }
      const FluxParams p = random_params(rng);
      volume_terms(h.data(), hv.data(), b.data(), op, p, unit_g, rh.data(), rhv.data(), ws);
      volume_terms_flux_differencing(h.data(), hv.data(), b.data(), op, p, unit_g, fh.data(),
                                     fhv.data());
      for (std::size_t k = 0; k < n; ++k) {
        REQUIRE(std::abs(rh[k] - fh[k]) <= 1e-12 * (1.0 + std::abs(rh[k])));
        REQUIRE(std::abs(rhv[k] - fhv[k]) <= 1e-12 * (1.0 + std::abs(rhv[k])));
      }
    }
  }
}

TEST_CASE("surface corrections reduce to plain boundary evaluation on Lobatto bases",
          "[semidisc]") {
  Rng rng(53);
  detail::ElementWorkspace ws;
  for (int p_deg = 1; p_deg <= 7; ++p_deg) {
    const SbpOperator& op = lobatto_operator(p_deg);
    const std::size_t n = static_cast<std::size_t>(op.n());
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> h(n), hv(n), b(n), sh(n), shv(n);
      for (std::size_t k = 0; k < n; ++k) {
        h[k] = rng.uniform(0.5, 2.0);
        hv[k] = rng.uniform(-1.0, 1.0);
        b[k] = rng.uniform(-0.5, 0.5);
      }
      const FluxParams p = random_params(rng);
      const auto coeffs = surface_coefficients(p);
      const std::array<double, 2> f_h{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
      surface_correction_terms(h.data(), hv.data(), b.data(), op, coeffs, unit_g, f_h,
                               sh.data(), shv.data(), ws);
      std::vector<double> ref_h(n, 0.0), ref_hv(n, 0.0), hvv(n), hv2(n), h2(n);
      for (std::size_t k = 0; k < n; ++k) {
        const double v = hv[k] / h[k];
        hvv[k] = h[k] * v;
        hv2[k] = h[k] * v * v;
        h2[k] = h[k] * h[k];
      }
      op.add_lifted(1.0, op.trace(hvv), ref_h.data());
      const auto t2 = op.trace(hv2);
      const auto t3 = op.trace(h2);
      op.add_lifted(1.0, {t2[0] + 0.5 * unit_g.g * t3[0], t2[1] + 0.5 * unit_g.g * t3[1]},
                    ref_hv.data());
      for (std::size_t k = 0; k < n; ++k) {
        REQUIRE(sh[k] == Catch::Approx(ref_h[k]).margin(1e-12).epsilon(1e-12));
        REQUIRE(shv[k] == Catch::Approx(ref_hv[k]).margin(1e-12).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("surface corrections vanish for constant bases (p = 0)", "[semidisc]") {
  const SbpOperator& op = gauss_operator(0);
  detail::ElementWorkspace ws;
  std::vector<double> h{1.4}, hv{0.7}, b{0.2}, sh(1), shv(1);
  const FluxParams p{0.7, -1.3};
  surface_correction_terms(h.data(), hv.data(), b.data(), op, surface_coefficients(p), unit_g,
                           {0.33, 0.33}, sh.data(), shv.data(), ws);
  REQUIRE(std::abs(sh[0]) <= 1e-15);
  REQUIRE(std::abs(shv[0]) <= 1e-15);
}

TEST_CASE("one-parameter surface corrections match the reduced form", "[semidisc]") {
  Rng rng(59);
  detail::ElementWorkspace ws;
  const SbpOperator& op = gauss_operator(4);
  const std::size_t n = static_cast<std::size_t>(op.n());
  for (int trial = 0; trial < 30; ++trial) {
    FluxParams p;
    p.a1 = rng.uniform(-3.0, 3.0);
    p.a2 = (2.0 - p.a1) / 3.0;
    p.m4 = rng.uniform(-1.0, 1.0);
    std::vector<double> h(n), hv(n), b(n), sh(n), shv(n);
    std::vector<double> v(n), v2(n), hvv(n), hv2(n), h2(n), hb(n);
    for (std::size_t k = 0; k < n; ++k) {
      h[k] = rng.uniform(0.5, 2.0);
      hv[k] = rng.uniform(-1.0, 1.0);
      b[k] = rng.uniform(-0.5, 0.5);
      v[k] = hv[k] / h[k];
      v2[k] = v[k] * v[k];
      hvv[k] = h[k] * v[k];
      hv2[k] = h[k] * v2[k];
      h2[k] = h[k] * h[k];
      hb[k] = h[k] * b[k];
    }
    const std::array<double, 2> f_h{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    surface_correction_terms(h.data(), hv.data(), b.data(), op, surface_coefficients(p), unit_g,
                             f_h, sh.data(), shv.data(), ws);

    const double g = unit_g.g, a1 = p.a1, m4 = p.m4;
    const auto th = op.trace(h);
    const auto tv = op.trace(v);
    const auto tv2 = op.trace(v2);
    const auto thv = op.trace(hvv);
    const auto thv2 = op.trace(hv2);
    const auto th2 = op.trace(h2);
    const auto thb = op.trace(hb);
    const auto tb = op.trace(b);

    std::vector<double> ref_h(n, 0.0), lift_h(n, 0.0);
    op.add_lifted((3.0 - a1) / 4.0, thv, ref_h.data());
    op.add_lifted((a1 + 1.0 + 4.0 * m4) / 4.0, {th[0] * tv[0], th[1] * tv[1]}, ref_h.data());
    op.add_lifted(1.0, th, lift_h.data());
    for (std::size_t k = 0; k < n; ++k) ref_h[k] -= m4 * v[k] * lift_h[k];

    std::vector<double> ref_hv(n, 0.0), lift_hv(n, 0.0), lift_fh(n, 0.0), lift_fhv(n, 0.0);
    op.add_lifted((3.0 - a1) / 8.0, thv2, ref_hv.data());
    op.add_lifted((a1 + 1.0 + 4.0 * m4) / 8.0, {th[0] * tv2[0], th[1] * tv2[1]}, ref_hv.data());
    op.add_lifted((a1 + 1.0) / 4.0 * g, th2, ref_hv.data());
    op.add_lifted((1.0 - a1 - 4.0 * m4) / 4.0 * g, {th[0] * th[0], th[1] * th[1]}, ref_hv.data());
    op.add_lifted((a1 + 1.0) / 4.0 * g, thb, ref_hv.data());
    op.add_lifted(-(a1 + 1.0 + 4.0 * m4) / 4.0 * g, {tb[0] * th[0], tb[1] * th[1]},
                  ref_hv.data());
    op.add_lifted(1.0, thv, lift_hv.data());
    op.add_lifted(1.0, f_h, lift_fh.data());
    op.add_lifted(1.0, {f_h[0] * tv[0], f_h[1] * tv[1]}, lift_fhv.data());
    for (std::size_t k = 0; k < n; ++k) {
      ref_hv[k] += 0.5 * v[k] * lift_hv[k] - 0.5 * m4 * v2[k] * lift_h[k] +
                   m4 * g * (h[k] + b[k]) * lift_h[k] - 0.5 * v[k] * lift_fh[k] +
                   0.5 * lift_fhv[k];
    }
    for (std::size_t k = 0; k < n; ++k) {
      REQUIRE(sh[k] == Catch::Approx(ref_h[k]).margin(1e-12).epsilon(1e-12));
      REQUIRE(shv[k] == Catch::Approx(ref_hv[k]).margin(1e-12).epsilon(1e-12));
    }
  }
}

TEST_CASE("constant state with flat bottom gives a zero right-hand side", "[semidisc]") {
  // On Lobatto bases the traces are nodal selections, so the cancellation is
  // bitwise; Gauss extrapolation leaves rounding noise.
  auto lob = sampled(NodeFamily::lobatto, 3, 4, [](double) { return 0.0; },
                     [](double) { return 1.0; }, [](double) { return 0.0; });
  SemidiscConfig cfg;
  SpatialOperator spatial_lob(lob.mesh, lob.op, lob.bottom, cfg, unit_g);
  const auto rate_lob = spatial_lob.rhs(lob.state);
  for (double r : rate_lob.h) REQUIRE(r == 0.0);
  for (double r : rate_lob.hv) REQUIRE(r == 0.0);

  auto gau = sampled(NodeFamily::gauss, 3, 4, [](double) { return 0.0; },
                     [](double) { return 1.0; }, [](double) { return 0.0; });
  SpatialOperator spatial_gau(gau.mesh, gau.op, gau.bottom, cfg, unit_g);
  const auto rate_gau = spatial_gau.rhs(gau.state);
  for (double r : rate_gau.h) REQUIRE(std::abs(r) <= 1e-14);
  for (double r : rate_gau.hv) REQUIRE(std::abs(r) <= 1e-14);
}

TEST_CASE("global lake-at-rest right-hand side vanishes", "[semidisc][wellbalance]") {
  Rng rng(61);
  const auto b_fun = [](double x) { return std::sin(M_PI * x / 4.0); };
  const auto h_fun = [&](double x) { return 1.0 - b_fun(x); };
  const auto v_fun = [](double) { return 0.0; };

  for (NodeFamily fam : {NodeFamily::lobatto, NodeFamily::gauss}) {
    for (int p_deg : {0, 1, 3, 7}) {
      auto setup = sampled(fam, p_deg, 6, b_fun, h_fun, v_fun);
      // Moderate parameter choices stay within 1e-13 for all p <= 7.
      for (FluxParams p : {FluxParams{-1.0, 1.0}, FluxParams{1.0, 1.0 / 3.0},
                           FluxParams{0.5, 0.5}}) {
        SemidiscConfig cfg;
        cfg.volume_params = p;
        cfg.surface_params = p;
        SpatialOperator spatial(setup.mesh, setup.op, setup.bottom, cfg, unit_g);
        const auto rate = spatial.rhs(setup.state);
        CAPTURE(static_cast<int>(fam), p_deg, p.a1, p.a2);
        for (double r : rate.h) REQUIRE(std::abs(r) <= 1e-13);
        for (double r : rate.hv) REQUIRE(std::abs(r) <= 1e-13);
      }
      // Adversarial draws over the full parameter box accumulate more
      // rounding in the split form; allow an order of magnitude.
      for (int trial = 0; trial < 5; ++trial) {
        SemidiscConfig cfg;
        cfg.volume_params = random_params(rng);
        cfg.surface_params = random_params(rng, false);
        SpatialOperator spatial(setup.mesh, setup.op, setup.bottom, cfg, unit_g);
        const auto rate = spatial.rhs(setup.state);
        CAPTURE(static_cast<int>(fam), p_deg, trial);
        for (double r : rate.h) REQUIRE(std::abs(r) <= 1e-12);
        for (double r : rate.hv) REQUIRE(std::abs(r) <= 1e-12);
      }
    }
  }
}

TEST_CASE("lake-at-rest stays exact with dissipative fluxes and subcells",
          "[semidisc][wellbalance]") {
  const auto b_fun = [](double x) { return std::sin(M_PI * x / 4.0); };
  const auto h_fun = [&](double x) { return 1.0 - b_fun(x); };
  auto setup = sampled(NodeFamily::gauss, 5, 6, b_fun, h_fun, [](double) { return 0.0; });
  for (SurfaceFluxKind kind : {SurfaceFluxKind::entropy_conservative,
                               SurfaceFluxKind::es_llf_type, SurfaceFluxKind::hr_llf,
                               SurfaceFluxKind::hr_suliciu, SurfaceFluxKind::hr_kinetic}) {
    for (double threshold : {0.0, 10.0}) {  // large threshold forces all-subcell mode
      SemidiscConfig cfg;
      cfg.surface_flux = kind;
      cfg.subcell.threshold = threshold;
      SpatialOperator spatial(setup.mesh, setup.op, setup.bottom, cfg, unit_g);
      int n_subcell = 0;
      SolutionField rate = spatial.make_field();
      spatial.rhs(setup.state, rate, &n_subcell);
      if (threshold > 0.0) REQUIRE(n_subcell == setup.mesh.n_elements);
      CAPTURE(static_cast<int>(kind), threshold);
      for (double r : rate.h) REQUIRE(std::abs(r) <= 1e-13);
      for (double r : rate.hv) REQUIRE(std::abs(r) <= 1e-13);
    }
  }
}

TEST_CASE("free parameters do not disturb the lake-at-rest balance",
          "[semidisc][wellbalance]") {
  Rng rng(67);
  const auto b_fun = [](double x) { return std::sin(M_PI * x / 4.0); };
  auto setup = sampled(NodeFamily::gauss, 4, 5, b_fun,
                       [&](double x) { return 1.0 - b_fun(x); }, [](double) { return 0.0; });
  for (int trial = 0; trial < 10; ++trial) {
    SemidiscConfig cfg;
    cfg.volume_params = random_params(rng, true);
    cfg.surface_params = cfg.volume_params;
    SpatialOperator spatial(setup.mesh, setup.op, setup.bottom, cfg, unit_g);
    const auto rate = spatial.rhs(setup.state);
    for (double r : rate.h) REQUIRE(std::abs(r) <= 1e-13);
    for (double r : rate.hv) REQUIRE(std::abs(r) <= 1e-13);
  }
}

TEST_CASE("mass is conserved for every flux choice", "[semidisc]") {
  Rng rng(71);
  auto setup = sampled(NodeFamily::gauss, 4, 6, [](double x) { return 0.2 * std::cos(M_PI * x); },
                       [](double x) { return 1.5 + 0.3 * std::sin(M_PI * x); },
                       [](double x) { return 0.4 * std::cos(M_PI * x); });
  for (SurfaceFluxKind kind :
       {SurfaceFluxKind::entropy_conservative, SurfaceFluxKind::es_llf_type,
        SurfaceFluxKind::llf, SurfaceFluxKind::suliciu, SurfaceFluxKind::kinetic,
        SurfaceFluxKind::hr_llf, SurfaceFluxKind::hr_suliciu, SurfaceFluxKind::hr_kinetic}) {
    SemidiscConfig cfg;
    cfg.volume_params = random_params(rng);
    cfg.surface_flux = kind;
    SpatialOperator spatial(setup.mesh, setup.op, setup.bottom, cfg, unit_g);
    const auto rate = spatial.rhs(setup.state);
    double mass_rate = 0.0;
    const double scale = 0.5 * setup.mesh.dx();
    for (int e = 0; e < setup.mesh.n_elements; ++e)
      for (int k = 0; k < setup.op.n(); ++k)
        mass_rate += scale * setup.op.weights[static_cast<std::size_t>(k)] * rate.h_at(e)[k];
    CAPTURE(static_cast<int>(kind));
    REQUIRE(std::abs(mass_rate) <= 1e-13 * setup.mesh.n_elements);
  }
}

TEST_CASE("single-element periodic mesh conserves mass", "[semidisc]") {
  auto setup = sampled(NodeFamily::gauss, 6, 1, [](double) { return 0.0; },
                       [](double x) { return 1.0 + 0.1 * std::sin(M_PI * x); },
                       [](double) { return 0.0; });
  SemidiscConfig cfg;
  SpatialOperator spatial(setup.mesh, setup.op, setup.bottom, cfg, unit_g);
  const auto rate = spatial.rhs(setup.state);
  double mass_rate = 0.0;
  for (int k = 0; k < setup.op.n(); ++k)
    mass_rate +=
        0.5 * setup.mesh.dx() * setup.op.weights[static_cast<std::size_t>(k)] * rate.h_at(0)[k];
  REQUIRE(std::abs(mass_rate) <= 1e-14);
}

TEST_CASE("semidiscrete entropy is conserved for independent volume and surface parameters",
          "[semidisc][entropy]") {
  Rng rng(73);
  for (NodeFamily fam : {NodeFamily::lobatto, NodeFamily::gauss}) {
    for (int p_deg : {1, 3, 5}) {
      for (int trial = 0; trial < 10; ++trial) {
        const double ah = rng.uniform(0.05, 0.3);
        const double av = rng.uniform(0.05, 0.4);
        const double ab = rng.uniform(0.05, 0.3);
        const double ph = rng.uniform(0.0, 2.0 * M_PI);
        const double pv = rng.uniform(0.0, 2.0 * M_PI);
        const double pb = rng.uniform(0.0, 2.0 * M_PI);
        auto setup =
            sampled(fam, p_deg, 6, [&](double x) { return ab * std::cos(M_PI * x + pb); },
                    [&](double x) { return 1.5 + ah * std::sin(M_PI * x + ph); },
                    [&](double x) { return av * std::sin(M_PI * x + pv); });
        SemidiscConfig cfg;
        cfg.volume_params = random_params(rng, true);
        cfg.surface_params = random_params(rng, false);
        SpatialOperator spatial(setup.mesh, setup.op, setup.bottom, cfg, unit_g);
        const auto d = spatial.diagnostics(setup.state);
        CAPTURE(static_cast<int>(fam), p_deg, trial);
        REQUIRE(std::abs(d.entropy_rate) <= 1e-12 * (1.0 + std::abs(d.total_entropy)));
      }
    }
  }
}

TEST_CASE("dissipative surface fluxes give a non-positive entropy rate",
          "[semidisc][entropy]") {
  Rng rng(79);
  for (int trial = 0; trial < 10; ++trial) {
    auto varying = sampled(NodeFamily::gauss, 4, 6,
                           [](double x) { return 0.2 * std::cos(M_PI * x); },
                           [](double x) { return 1.5 + 0.2 * std::sin(2.0 * M_PI * x); },
                           [](double x) { return 0.5 * std::cos(M_PI * x); });
    auto flat = sampled(NodeFamily::gauss, 4, 6, [](double) { return 0.0; },
                        [](double x) { return 1.5 + 0.2 * std::sin(2.0 * M_PI * x); },
                        [](double x) { return 0.5 * std::cos(M_PI * x); });
    for (SurfaceFluxKind kind : {SurfaceFluxKind::es_llf_type, SurfaceFluxKind::llf,
                                 SurfaceFluxKind::suliciu, SurfaceFluxKind::kinetic}) {
      const auto& setup = kind == SurfaceFluxKind::es_llf_type ? varying : flat;
      SemidiscConfig cfg;
      cfg.volume_params = random_params(rng);
      cfg.surface_params.a1 = rng.uniform(-2.0, 2.0);
      cfg.surface_flux = kind;
      SpatialOperator spatial(setup.mesh, setup.op, setup.bottom, cfg, unit_g);
      const auto d = spatial.diagnostics(setup.state);
      CAPTURE(static_cast<int>(kind), trial);
      REQUIRE(d.entropy_rate <= 1e-12 * (1.0 + std::abs(d.total_entropy)));
    }
  }
}

TEST_CASE("momentum rate converges to the bottom source term", "[semidisc]") {
  // With varying bottom the momentum rate approaches -integral(g h db/dx).
  const FluxParams general{0.5, 1.0};  // not in the one-parameter subfamily
  for (int p_deg = 1; p_deg <= 3; ++p_deg) {
    double previous = 0.0;
    for (int level = 0; level < 2; ++level) {
      const int ne = 8 << level;
      auto setup = sampled(NodeFamily::gauss, p_deg, ne,
                           [](double x) { return 0.2 * std::sin(M_PI * x); },
                           [](double x) { return 1.5 + 0.2 * std::cos(M_PI * x); },
                           [](double x) { return 0.3 * std::sin(M_PI * x); });
      SemidiscConfig cfg;
      cfg.volume_params = general;
      cfg.surface_params = general;
      SpatialOperator spatial(setup.mesh, setup.op, setup.bottom, cfg, unit_g);
      const auto rate = spatial.rhs(setup.state);
      double residual = 0.0;
      std::vector<double> db(static_cast<std::size_t>(setup.op.n()));
      for (int e = 0; e < ne; ++e) {
        setup.op.apply_d(setup.bottom.data() + setup.state.offset(e), db.data());
        for (int k = 0; k < setup.op.n(); ++k) {
          const double w = 0.5 * setup.mesh.dx() * setup.op.weights[static_cast<std::size_t>(k)];
          residual += w * rate.hv_at(e)[k];
          residual += w * unit_g.g * setup.state.h_at(e)[k] * (2.0 / setup.mesh.dx()) *
                      db[static_cast<std::size_t>(k)];
        }
      }
      residual = std::abs(residual);
      if (level > 0) {
        CAPTURE(p_deg, previous, residual);
        REQUIRE(residual <= previous / std::pow(2.0, p_deg - 0.5));
      }
      previous = residual;
    }
  }
}

TEST_CASE("p = 0 reduces to the classical finite volume method", "[semidisc][subcell]") {
  auto setup = sampled(NodeFamily::gauss, 0, 5, [](double) { return 0.0; },
                       [](double x) { return 1.0 + 0.3 * std::sin(M_PI * x); },
                       [](double x) { return 0.2 * std::cos(M_PI * x); });
  SemidiscConfig cfg;
  cfg.surface_flux = SurfaceFluxKind::llf;
  SpatialOperator spatial(setup.mesh, setup.op, setup.bottom, cfg, unit_g);
  const auto rate = spatial.rhs(setup.state);

  const int ne = setup.mesh.n_elements;
  for (int e = 0; e < ne; ++e) {
    const SweState uc{setup.state.h_at(e)[0], setup.state.hv_at(e)[0]};
    const SweState ul{setup.state.h_at((e + ne - 1) % ne)[0],
                      setup.state.hv_at((e + ne - 1) % ne)[0]};
    const SweState ur{setup.state.h_at((e + 1) % ne)[0], setup.state.hv_at((e + 1) % ne)[0]};
    const auto f_left = llf_flux(ul, uc, unit_g);
    const auto f_right = llf_flux(uc, ur, unit_g);
    REQUIRE(rate.h_at(e)[0] ==
            Catch::Approx(-(f_right.f_h - f_left.f_h) / setup.mesh.dx()).margin(1e-14));
    REQUIRE(rate.hv_at(e)[0] ==
            Catch::Approx(-(f_right.f_hv - f_left.f_hv) / setup.mesh.dx()).margin(1e-14));
  }
}

TEST_CASE("subcell detector thresholds", "[semidisc][subcell]") {
  SolutionField state(3, 2);
  for (auto& v : state.h) v = 1.0;
  REQUIRE_FALSE(subcell_detector(state, 1, 1e-5, false));
  state.h_at(1)[0] = 1e-6;
  REQUIRE(subcell_detector(state, 1, 1e-5, false));
  REQUIRE_FALSE(subcell_detector(state, 0, 1e-5, false));
  REQUIRE(subcell_detector(state, 0, 1e-5, true));  // right neighbor is nearly dry
  REQUIRE(subcell_detector(state, 2, 1e-5, true));  // left neighbor wraps around
}

TEST_CASE("non-finite right-hand side raises a diagnostic error", "[semidisc]") {
  auto setup = sampled(NodeFamily::gauss, 2, 4, [](double) { return 0.0; },
                       [](double) { return 1.0; }, [](double) { return 0.0; });
  setup.state.hv_at(2)[1] = std::numeric_limits<double>::quiet_NaN();
  SemidiscConfig cfg;
  SpatialOperator spatial(setup.mesh, setup.op, setup.bottom, cfg, unit_g);
  try {
    spatial.rhs(setup.state);
    FAIL("expected SolverAbort");
  } catch (const SolverAbort& e) {
    REQUIRE((e.element >= 0 && e.element < 4));
  }
}

TEST_CASE("diagnostics: mass of unit height on [-1, 1] is 2", "[semidisc]") {
  auto setup = sampled(NodeFamily::lobatto, 3, 4, [](double) { return 0.0; },
                       [](double) { return 1.0; }, [](double) { return 0.0; });
  SemidiscConfig cfg;
  SpatialOperator spatial(setup.mesh, setup.op, setup.bottom, cfg, unit_g);
  const auto d = spatial.diagnostics(setup.state);
  REQUIRE(d.mass == Catch::Approx(2.0).epsilon(1e-14));
  REQUIRE(d.momentum == Catch::Approx(0.0).margin(1e-14));
  REQUIRE(d.total_entropy == Catch::Approx(1.0).epsilon(1e-14));
}
