#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "swsbp/scenarios.hpp"
#include "test_util.hpp"

using namespace swsbp;

TEST_CASE("lake at rest scenario data", "[scenarios]") {
  const auto s = lake_at_rest();
  REQUIRE(s.g == 1.0);
  REQUIRE(s.n_elements == 15);
  REQUIRE(s.degree == 7);
  REQUIRE(s.fixed_steps == 1000);
  for (double x : {-1.0, -0.3, 0.0, 0.7, 1.0}) {
    REQUIRE(s.h0(x) + s.bottom(x) == Catch::Approx(1.0));
    REQUIRE(s.hv0(x) == 0.0);
  }
  REQUIRE(s.h0(0.0) == Catch::Approx(1.0));
  const auto [he, hve] = s.exact(0.4, 123.0);
  REQUIRE(he == Catch::Approx(s.h0(0.4)));
  REQUIRE(hve == 0.0);
}

TEST_CASE("smooth perturbation scenario", "[scenarios]") {
  const auto s = smooth_perturbation();
  REQUIRE_FALSE(s.exact);
  // h + b is not constant.
  REQUIRE(s.h0(0.5) + s.bottom(0.5) != Catch::Approx(s.h0(-0.5) + s.bottom(-0.5)));

  // The initial total entropy matches a fine-quadrature oracle, and the
  // entropy rate vanishes at t = 0 for the entropy conservative flux.
  const SbpOperator& op = sbp_operator(s.family, s.degree);
  Mesh mesh(s.x_left, s.x_right, s.n_elements);
  SolutionField state;
  std::vector<double> bottom;
  sample_scenario(s, mesh, op, state, bottom);
  SemidiscConfig cfg;
  SpatialOperator spatial(mesh, op, bottom, cfg, PhysicsContext{s.g, 1e-12});
  const auto d = spatial.diagnostics(state);

  const auto [xs, ws] = testutil::gauss_rule_01(200);
  double ref = 0.0;
  for (std::size_t q = 0; q < xs.size(); ++q) {
    const double x = -1.0 + 2.0 * xs[q];
    const double h = s.h0(x);
    ref += 2.0 * ws[q] * (0.5 * s.g * h * h + s.g * h * s.bottom(x));
  }
  REQUIRE(d.total_entropy == Catch::Approx(ref).epsilon(1e-12));
  REQUIRE(std::abs(d.entropy_rate) <= 1e-12 * (1.0 + std::abs(d.total_entropy)));
}

TEST_CASE("emerged bump scenario data", "[scenarios]") {
  const auto s = emerged_bump();
  REQUIRE(s.bottom(10.0) == Catch::Approx(0.2));
  REQUIRE(s.h0(10.0) == 0.0);
  REQUIRE(s.h0(0.0) == Catch::Approx(0.1));
  for (double x : {1.0, 5.0, 8.2, 13.0, 24.0}) {
    if (s.bottom(x) < 0.1) REQUIRE(s.h0(x) + s.bottom(x) == Catch::Approx(0.1));
  }
  REQUIRE(s.subcell_threshold == 1e-5);
  REQUIRE_FALSE(s.include_neighbors);
}

TEST_CASE("moving water equilibrium heights", "[scenarios]") {
  const double g = 9.81;
  // Flat bottom, m = 1, E = 25: subcritical root of the energy relation.
  const double h = equilibrium_height(1.0, 25.0, 0.0, g);
  REQUIRE(h == Catch::Approx(2.54053).margin(1e-4));
  const double residual = 0.5 / (h * h) + g * h - 25.0;
  REQUIRE(std::abs(residual) <= 1e-12);

  // m = 0 reduces to the rest relation h + b = E/g.
  REQUIRE(equilibrium_height(0.0, 25.0, 0.3, g) == Catch::Approx(25.0 / g - 0.3));

  // Infeasible energy is rejected.
  REQUIRE_THROWS_AS(equilibrium_height(3.0, 1.0, 0.0, g), std::domain_error);

  // Critical-touching preset value.
  REQUIRE(moving_water_critical_energy() == Catch::Approx(19.203311922761937).epsilon(1e-15));
}

TEST_CASE("moving water scenario satisfies both equilibrium relations", "[scenarios]") {
  for (auto [m, energy] : {std::pair{1.0, 25.0}, std::pair{3.0, moving_water_critical_energy()}}) {
    const auto s = moving_water_equilibrium(m, energy);
    const SbpOperator& op = sbp_operator(s.family, 4);
    Mesh mesh(s.x_left, s.x_right, s.n_elements);
    for (int e = 0; e < mesh.n_elements; ++e) {
      for (int k = 0; k < op.n(); ++k) {
        const double x = mesh.node(e, op.nodes[static_cast<std::size_t>(k)]);
        const double h = s.h0(x);
        const double hv = s.hv0(x);
        REQUIRE(hv == m);
        const double res = 0.5 * m * m / (h * h) + s.g * (h + s.bottom(x)) - energy;
        REQUIRE(std::abs(res) <= 1e-11 * energy);
      }
    }
  }
}

TEST_CASE("dry dam break exact solution", "[scenarios]") {
  const double g = 9.81, h_l = 0.005, x0 = 5.0;

  // t = 0 reproduces the initial condition.
  REQUIRE(dam_break_exact(4.0, 0.0).first == h_l);
  REQUIRE(dam_break_exact(6.0, 0.0).first == 0.0);

  // At the dam position the fan gives h = 4 h_l / 9 and v = (2/3) c0.
  const auto [h, hv] = dam_break_exact(x0, 2.0);
  REQUIRE(h == Catch::Approx(4.0 * h_l / 9.0));
  REQUIRE(hv / h == Catch::Approx(2.0 / 3.0 * std::sqrt(g * h_l)));

  REQUIRE_THROWS_AS(dam_break_exact(1.0, -0.1), std::domain_error);

  // Inside the fan the solution satisfies the smooth equations, checked by
  // central finite differences of the flux and time derivative.
  const double t = 3.0;
  const double c0 = std::sqrt(g * h_l);
  const double eps_x = 1e-5, eps_t = 1e-5;
  const PhysicsContext ctx{g, 1e-12};
  for (double frac : {-0.5, -0.1, 0.2, 0.6, 0.9}) {
    const double x = x0 + frac * c0 * t;  // strictly inside the fan
    const auto fm = dam_break_exact(x - eps_x, t);
    const auto fp = dam_break_exact(x + eps_x, t);
    const auto gm = dam_break_exact(x, t - eps_t);
    const auto gp = dam_break_exact(x, t + eps_t);
    const auto flux_m = physical_flux({fm.first, fm.second}, ctx);
    const auto flux_p = physical_flux({fp.first, fp.second}, ctx);
    const double r_h = (gp.first - gm.first) / (2.0 * eps_t) +
                       (flux_p[0] - flux_m[0]) / (2.0 * eps_x);
    const double r_hv = (gp.second - gm.second) / (2.0 * eps_t) +
                        (flux_p[1] - flux_m[1]) / (2.0 * eps_x);
    REQUIRE(std::abs(r_h) <= 1e-6);
    REQUIRE(std::abs(r_hv) <= 1e-6);
  }

  // Total mass is conserved in time.
  const auto [xs, ws] = testutil::gauss_rule_01(2000);
  auto mass_at = [&](double tt) {
    double m = 0.0;
    for (std::size_t q = 0; q < xs.size(); ++q)
      m += 10.0 * ws[q] * dam_break_exact(10.0 * xs[q], tt).first;
    return m;
  };
  const double m0 = mass_at(0.0);
  REQUIRE(mass_at(3.0) == Catch::Approx(m0).margin(1e-10));
  REQUIRE(mass_at(6.0) == Catch::Approx(m0).margin(1e-10));
}

TEST_CASE("error norms", "[scenarios]") {
  const auto s = dam_break();
  const SbpOperator& op = sbp_operator(NodeFamily::gauss, 2);
  Mesh mesh(0.0, 10.0, 20);
  SolutionField state;
  std::vector<double> bottom;
  sample_scenario(s, mesh, op, state, bottom);

  // Numeric equals exact: zero errors.
  auto exact0 = [&](double x) { return std::make_pair(s.h0(x), s.hv0(x)); };
  auto norms = error_norms(state, mesh, op, exact0);
  REQUIRE(norms.l2_squared_h == 0.0);
  REQUIRE(norms.linf_h == 0.0);

  // Constant offset delta: L2^2 = 10 delta^2 on [0, 10], Linf = delta.
  const double delta = 0.125;
  for (auto& h : state.h) h += delta;
  norms = error_norms(state, mesh, op, exact0);
  REQUIRE(norms.l2_squared_h == Catch::Approx(10.0 * delta * delta).epsilon(1e-13));
  REQUIRE(norms.linf_h == Catch::Approx(delta));
  REQUIRE(norms.l2_squared_hv == 0.0);
}

TEST_CASE("scenario initial heights are non-negative on sampled grids", "[scenarios]") {
  for (const Scenario& s : {lake_at_rest(), smooth_perturbation(), emerged_bump(),
                            moving_water_equilibrium(), dam_break()}) {
    for (NodeFamily fam : {NodeFamily::lobatto, NodeFamily::gauss}) {
      for (int p : {1, 4}) {
        const SbpOperator& op = sbp_operator(fam, p);
        Mesh mesh(s.x_left, s.x_right, s.n_elements);
        SolutionField state;
        std::vector<double> bottom;
        sample_scenario(s, mesh, op, state, bottom);
        REQUIRE(state.min_h() >= 0.0);
      }
    }
  }
}
