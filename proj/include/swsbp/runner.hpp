#ifndef SWSBP_RUNNER_HPP
#define SWSBP_RUNNER_HPP

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "swsbp/limiter.hpp"
#include "swsbp/random.hpp"
#include "swsbp/scenarios.hpp"
#include "swsbp/semidiscretization.hpp"
#include "swsbp/surface_coefficients.hpp"
#include "swsbp/time_integration.hpp"

namespace swsbp {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Scenario selection plus overrides, parsed from a flat JSON document.
struct RunConfig {
  std::string scenario;
  std::optional<int> n_elements;
  std::optional<int> degree;
  std::optional<NodeFamily> family;
  std::optional<SurfaceFluxKind> flux;
  std::optional<double> a1, a2, m4, k9, k10, k11, l10;
  std::optional<double> surface_a1, surface_a2;
  std::optional<bool> limiter;
  std::optional<bool> limit_discharge;
  std::optional<double> subcell_threshold;
  std::optional<bool> include_neighbors;
  std::optional<double> cfl;
  std::optional<int> fixed_steps;
  std::optional<double> final_time;
  std::optional<double> m, energy;
  std::string output_dir = "out";
  std::uint64_t seed = 20170930;
  double dt_max = 1e30;
};

namespace detail {

inline NodeFamily parse_family(const std::string& s) {
  if (s == "lobatto") return NodeFamily::lobatto;
  if (s == "gauss") return NodeFamily::gauss;
  throw ConfigError("unknown node family '" + s + "' (expected lobatto or gauss)");
}

inline SurfaceFluxKind parse_flux(const std::string& s) {
  if (s == "ec") return SurfaceFluxKind::entropy_conservative;
  if (s == "es_llf_type") return SurfaceFluxKind::es_llf_type;
  if (s == "llf") return SurfaceFluxKind::llf;
  if (s == "suliciu") return SurfaceFluxKind::suliciu;
  if (s == "kinetic") return SurfaceFluxKind::kinetic;
  if (s == "hr_llf") return SurfaceFluxKind::hr_llf;
  if (s == "hr_suliciu") return SurfaceFluxKind::hr_suliciu;
  if (s == "hr_kinetic") return SurfaceFluxKind::hr_kinetic;
  throw ConfigError("unknown flux '" + s + "'");
}

inline const char* flux_name(SurfaceFluxKind kind) {
  switch (kind) {
    case SurfaceFluxKind::entropy_conservative: return "ec";
    case SurfaceFluxKind::es_llf_type: return "es_llf_type";
    case SurfaceFluxKind::llf: return "llf";
    case SurfaceFluxKind::suliciu: return "suliciu";
    case SurfaceFluxKind::kinetic: return "kinetic";
    case SurfaceFluxKind::hr_llf: return "hr_llf";
    case SurfaceFluxKind::hr_suliciu: return "hr_suliciu";
    case SurfaceFluxKind::hr_kinetic: return "hr_kinetic";
  }
  return "?";
}

inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace detail

inline RunConfig parse_config(const nlohmann::json& j) {
  static const std::set<std::string> known{
      "scenario",  "elements",          "degree",     "nodes",
      "flux",      "a1",                "a2",         "m4",
      "k9",        "k10",               "k11",        "l10",
      "surface_a1", "surface_a2",       "limiter",    "limit_discharge",
      "subcell_threshold", "include_neighbors", "cfl", "fixed_steps",
      "final_time", "output_dir",       "seed",       "m",
      "E",         "dt_max"};
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  RunConfig cfg;
  if (!j.contains("scenario")) throw ConfigError("missing required key 'scenario'");
  cfg.scenario = j.at("scenario").get<std::string>();
  if (j.contains("elements")) cfg.n_elements = j.at("elements").get<int>();
  if (j.contains("degree")) cfg.degree = j.at("degree").get<int>();
  if (j.contains("nodes")) cfg.family = detail::parse_family(j.at("nodes").get<std::string>());
  if (j.contains("flux")) cfg.flux = detail::parse_flux(j.at("flux").get<std::string>());
  for (auto [key, field] : {std::pair{"a1", &cfg.a1}, {"a2", &cfg.a2}, {"m4", &cfg.m4},
                            {"k9", &cfg.k9}, {"k10", &cfg.k10}, {"k11", &cfg.k11},
                            {"l10", &cfg.l10}, {"surface_a1", &cfg.surface_a1},
                            {"surface_a2", &cfg.surface_a2}, {"cfl", &cfg.cfl},
                            {"subcell_threshold", &cfg.subcell_threshold},
                            {"final_time", &cfg.final_time}, {"m", &cfg.m},
                            {"E", &cfg.energy}})
    if (j.contains(key)) *field = j.at(key).get<double>();
  if (j.contains("limiter")) cfg.limiter = j.at("limiter").get<bool>();
  if (j.contains("limit_discharge")) cfg.limit_discharge = j.at("limit_discharge").get<bool>();
  if (j.contains("include_neighbors"))
    cfg.include_neighbors = j.at("include_neighbors").get<bool>();
  if (j.contains("fixed_steps")) cfg.fixed_steps = j.at("fixed_steps").get<int>();
  if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("dt_max")) cfg.dt_max = j.at("dt_max").get<double>();
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

/// Builds the scenario with all overrides applied.
inline Scenario make_scenario(const RunConfig& cfg) {
  Scenario s;
  if (cfg.scenario == "lake_at_rest") {
    s = lake_at_rest();
  } else if (cfg.scenario == "smooth_perturbation") {
    s = smooth_perturbation();
  } else if (cfg.scenario == "emerged_bump") {
    s = emerged_bump();
  } else if (cfg.scenario == "moving_water") {
    s = moving_water_equilibrium(cfg.m.value_or(1.0), cfg.energy.value_or(25.0));
  } else if (cfg.scenario == "dam_break") {
    s = dam_break();
  } else {
    throw ConfigError("unknown scenario '" + cfg.scenario + "'");
  }
  if (cfg.n_elements) {
    if (*cfg.n_elements < 1) throw ConfigError("elements must be positive");
    s.n_elements = *cfg.n_elements;
  }
  if (cfg.degree) {
    if (*cfg.degree < 0 || *cfg.degree > kMaxDegree) throw ConfigError("degree out of range");
    s.degree = *cfg.degree;
  }
  if (cfg.family) s.family = *cfg.family;
  if (cfg.flux) s.surface_flux = *cfg.flux;
  if (cfg.a1) s.params.a1 = *cfg.a1;
  if (cfg.a2) s.params.a2 = *cfg.a2;
  if (cfg.m4) s.params.m4 = *cfg.m4;
  if (cfg.k9) s.params.k9 = *cfg.k9;
  if (cfg.k10) s.params.k10 = *cfg.k10;
  if (cfg.k11) s.params.k11 = *cfg.k11;
  if (cfg.l10) s.params.l10 = *cfg.l10;
  if (cfg.limiter) s.limiter = *cfg.limiter;
  if (cfg.limit_discharge) s.limit_discharge = *cfg.limit_discharge;
  if (cfg.subcell_threshold) s.subcell_threshold = *cfg.subcell_threshold;
  if (cfg.include_neighbors) s.include_neighbors = *cfg.include_neighbors;
  if (cfg.cfl) s.cfl = *cfg.cfl;
  if (cfg.fixed_steps) s.fixed_steps = *cfg.fixed_steps;
  if (cfg.final_time) s.t_final = *cfg.final_time;
  return s;
}

struct CoreResult {
  SolutionField state;
  Mesh mesh{0.0, 1.0, 1};
  Diagnostics initial;
  Diagnostics final_;
  double min_h = 0.0;
  int steps = 0;
  double t_end = 0.0;
};

/// Runs one scenario to its final time; `sink` (optional) receives per-step
/// records.
inline CoreResult run_core(const Scenario& s, const RunConfig& cfg,
                           const std::function<void(const StepRecord&)>& sink = {}) {
  const SbpOperator& op = sbp_operator(s.family, s.degree);
  Mesh mesh(s.x_left, s.x_right, s.n_elements);
  SolutionField state;
  std::vector<double> bottom;
  sample_scenario(s, mesh, op, state, bottom);

  SemidiscConfig semi;
  semi.volume_params = s.params;
  semi.surface_params = s.params;
  if (cfg.surface_a1) semi.surface_params.a1 = *cfg.surface_a1;
  if (cfg.surface_a2) semi.surface_params.a2 = *cfg.surface_a2;
  semi.surface_flux = s.surface_flux;
  semi.subcell.threshold = s.subcell_threshold;
  semi.subcell.include_neighbors = s.include_neighbors;

  PhysicsContext ctx{s.g, 1e-12};
  SpatialOperator spatial(mesh, op, bottom, semi, ctx);
  LimiterConfig limiter = make_limiter_config(op, s.limiter, s.limit_discharge);
  StepControl control;
  control.cfl = s.cfl;
  control.fixed_steps = s.fixed_steps;
  control.dt_max = cfg.dt_max;

  CoreResult result;
  result.mesh = mesh;
  result.initial = spatial.diagnostics(state);
  double min_h = state.min_h();
  int steps = 0;
  result.t_end = evolve(spatial, state, s.t_final, control, limiter,
                        [&](const StepRecord& rec) {
                          ++steps;
                          min_h = std::min(min_h, rec.min_h);
                          if (sink) sink(rec);
                        });
  min_h = std::min(min_h, state.min_h());
  result.final_ = spatial.diagnostics(state);
  result.min_h = min_h;
  result.steps = steps;
  result.state = std::move(state);
  return result;
}

namespace detail {

inline std::filesystem::path output_directory(const RunConfig& cfg) {
  std::filesystem::path dir = cfg.output_dir;
  if (const char* root = std::getenv("SWSBP_OUTPUT_ROOT"); root && *root)
    dir = std::filesystem::path(root) / dir;
  std::filesystem::create_directories(dir);
  return dir;
}

inline nlohmann::json parameter_echo(const Scenario& s, const RunConfig& cfg) {
  nlohmann::json j;
  j["scenario"] = s.name;
  j["elements"] = s.n_elements;
  j["degree"] = s.degree;
  j["nodes"] = to_string(s.family);
  j["flux"] = flux_name(s.surface_flux);
  j["a1"] = s.params.a1;
  j["a2"] = s.params.a2;
  j["m4"] = s.params.m4;
  j["k9"] = s.params.k9;
  j["k10"] = s.params.k10;
  j["k11"] = s.params.k11;
  j["l10"] = s.params.l10;
  j["surface_a1"] = cfg.surface_a1.value_or(s.params.a1);
  j["surface_a2"] = cfg.surface_a2.value_or(s.params.a2);
  j["limiter"] = s.limiter;
  j["limit_discharge"] = s.limit_discharge;
  j["subcell_threshold"] = s.subcell_threshold;
  j["include_neighbors"] = s.include_neighbors;
  j["cfl"] = s.cfl;
  j["fixed_steps"] = s.fixed_steps;
  j["final_time"] = s.t_final;
  j["g"] = s.g;
  j["seed"] = cfg.seed;
  return j;
}

}  // namespace detail

/// Executes `run <config>`: writes solution.csv, diagnostics.csv and
/// summary.json into the output directory.  Returns the process exit code
/// (0 success, 1 configuration error, 2 solver abort).
inline int run(const RunConfig& cfg, std::ostream& log = std::cerr) {
  Scenario s;
  std::filesystem::path dir;
  try {
    s = make_scenario(cfg);
    dir = detail::output_directory(cfg);
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return 1;
  }

  const auto t_start = std::chrono::steady_clock::now();
  std::ofstream diag(dir / "diagnostics.csv");
  diag << "step,t,dt,mass,momentum,entropy,entropy_rate,min_h,n_subcell_elements\n";
  CoreResult result;
  try {
    result = run_core(s, cfg, [&](const StepRecord& r) {
      diag << r.step << ',' << detail::fmt(r.t) << ',' << detail::fmt(r.dt) << ','
           << detail::fmt(r.diagnostics.mass) << ',' << detail::fmt(r.diagnostics.momentum)
           << ',' << detail::fmt(r.diagnostics.total_entropy) << ','
           << detail::fmt(r.diagnostics.entropy_rate) << ',' << detail::fmt(r.min_h) << ','
           << r.n_subcell_elements << '\n';
    });
  } catch (const SolverAbort& e) {
    log << "solver abort: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    log << "config error: " << e.what() << "\n";
    return 1;
  }
  diag.close();
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

  const SbpOperator& op = sbp_operator(s.family, s.degree);
  std::ofstream sol(dir / "solution.csv");
  sol << "element,node,x,b,h,hv,v\n";
  const PhysicsContext ctx{s.g, 1e-12};
  for (int e = 0; e < result.mesh.n_elements; ++e) {
    for (int k = 0; k < op.n(); ++k) {
      const double x = result.mesh.node(e, op.nodes[static_cast<std::size_t>(k)]);
      const double h = result.state.h_at(e)[k];
      const double hv = result.state.hv_at(e)[k];
      sol << e << ',' << k << ',' << detail::fmt(x) << ',' << detail::fmt(s.bottom(x)) << ','
          << detail::fmt(h) << ',' << detail::fmt(hv) << ','
          << detail::fmt(velocity({h, hv}, ctx)) << '\n';
    }
  }
  sol.close();

  nlohmann::json summary;
  summary["parameters"] = detail::parameter_echo(s, cfg);
  summary["steps"] = result.steps;
  summary["t_end"] = result.t_end;
  summary["min_h"] = result.min_h;
  summary["mass"] = result.final_.mass;
  summary["momentum"] = result.final_.momentum;
  summary["entropy"] = result.final_.total_entropy;
  summary["entropy_initial"] = result.initial.total_entropy;
  summary["entropy_drift_relative"] =
      (result.final_.total_entropy - result.initial.total_entropy) /
      result.initial.total_entropy;
  if (s.exact) {
    const auto norms = error_norms(result.state, result.mesh, op, [&](double x) {
      return s.exact(x, result.t_end);
    });
    summary["error_l2_squared_h"] = norms.l2_squared_h;
    summary["error_l2_squared_hv"] = norms.l2_squared_hv;
    summary["error_linf_h"] = norms.linf_h;
    summary["error_linf_hv"] = norms.linf_hv;
    summary["error_max"] = norms.max_linf();
  }
  summary["wall_time_seconds"] = wall;
  std::ofstream(dir / "summary.json") << summary.dump(2) << "\n";
  return 0;
}

struct SweepRange {
  double lo = -3.0;
  double step = 0.1;
  double hi = 3.0;

  int count() const { return static_cast<int>(std::floor((hi - lo) / step + 0.5)) + 1; }
  double value(int i) const { return lo + i * step; }
};

/// Parses "lo:step:hi".
inline SweepRange parse_range(const std::string& text) {
  SweepRange r;
  const auto first = text.find(':');
  const auto second = text.find(':', first + 1);
  if (first == std::string::npos || second == std::string::npos)
    throw ConfigError("range must have the form lo:step:hi, got '" + text + "'");
  try {
    r.lo = std::stod(text.substr(0, first));
    r.step = std::stod(text.substr(first + 1, second - first - 1));
    r.hi = std::stod(text.substr(second + 1));
  } catch (const std::exception&) {
    throw ConfigError("range must have the form lo:step:hi, got '" + text + "'");
  }
  if (r.step <= 0.0 || r.hi < r.lo) throw ConfigError("invalid range '" + text + "'");
  return r;
}

/// Executes `sweep <config>` over an (a1, a2) grid.  Each row reports the
/// max-norm error against the exact solution when one exists, otherwise the
/// relative entropy drift.
inline int sweep(const RunConfig& cfg, const SweepRange& a1_range, const SweepRange& a2_range,
                 std::ostream& log = std::cerr) {
  std::filesystem::path dir;
  try {
    make_scenario(cfg);  // validate early
    dir = detail::output_directory(cfg);
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return 1;
  }

  std::ofstream out(dir / "sweep.csv");
  out << "a1,a2,metric\n";
  for (int i = 0; i < a1_range.count(); ++i) {
    for (int k = 0; k < a2_range.count(); ++k) {
      RunConfig point = cfg;
      point.a1 = a1_range.value(i);
      point.a2 = a2_range.value(k);
      const Scenario s = make_scenario(point);
      double metric;
      try {
        const CoreResult result = run_core(s, point);
        if (s.exact) {
          const SbpOperator& op = sbp_operator(s.family, s.degree);
          metric = error_norms(result.state, result.mesh, op, [&](double x) {
                     return s.exact(x, result.t_end);
                   }).max_linf();
        } else {
          metric = std::abs((result.final_.total_entropy - result.initial.total_entropy) /
                            result.initial.total_entropy);
        }
      } catch (const SolverAbort& e) {
        log << "solver abort at a1=" << a1_range.value(i) << " a2=" << a2_range.value(k)
            << ": " << e.what() << "\n";
        return 2;
      }
      out << detail::fmt(a1_range.value(i)) << ',' << detail::fmt(a2_range.value(k)) << ','
          << detail::fmt(metric) << '\n';
    }
  }
  return 0;
}

/// Executes `verify <config>`: the property suite over the core invariants.
/// Prints one PASS/FAIL line per invariant; returns 0 iff all pass.
inline int verify(const RunConfig& cfg, std::ostream& out = std::cout) {
  bool all_ok = true;
  const auto report = [&](const char* name, bool ok, double worst) {
    all_ok = all_ok && ok;
    out << (ok ? "PASS " : "FAIL ") << name << " (worst " << detail::fmt(worst) << ")\n";
  };
  out << "seed " << cfg.seed << "\n";
  const PhysicsContext ctx{1.0, 1e-12};

  {
    double worst = 0.0;
    for (int p = 0; p <= 9; ++p) {
      worst = std::max(worst, verify_sbp(lobatto_operator(p)));
      worst = std::max(worst, verify_sbp(gauss_operator(p)));
    }
    report("sbp_property_residual", worst <= 1e-13, worst);
  }
  {
    Rng rng(cfg.seed);
    double worst = 0.0;
    for (int ia = 0; ia <= 60; ++ia) {
      for (int ik = 0; ik <= 60; ++ik) {
        const FluxParams p{-3.0 + 0.1 * ia, -3.0 + 0.1 * ik};
        for (int trial = 0; trial < 4; ++trial) {
          const double hl = rng.uniform(0.05, 2.0), hr = rng.uniform(0.05, 2.0);
          const double vl = rng.uniform(-1.5, 1.5), vr = rng.uniform(-1.5, 1.5);
          const SweState a{hl, hl * vl}, b{hr, hr * vr};
          const auto f = ec_flux(a, b, p, ctx);
          const auto wl = to_entropy_vars(a, 0.0, ctx);
          const auto wr = to_entropy_vars(b, 0.0, ctx);
          const double dpsi = flux_potential(b, ctx) - flux_potential(a, ctx);
          const double res =
              std::abs((wr.w1 - wl.w1) * f.f_h + (wr.w2 - wl.w2) * f.f_hv - dpsi) /
              (1.0 + std::abs(dpsi));
          worst = std::max(worst, res);
        }
      }
    }
    report("ec_condition_parameter_grid", worst <= 1e-12, worst);
  }
  {
    Rng rng(cfg.seed + 1);
    double worst = 0.0;
    for (int trial = 0; trial < 5000; ++trial) {
      const FluxParams p{rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)};
      const double hl = rng.uniform(0.05, 2.0), hr = rng.uniform(0.05, 2.0);
      const double vl = rng.uniform(-1.5, 1.5), vr = rng.uniform(-1.5, 1.5);
      const double bl = rng.uniform(-1.0, 1.0), br = rng.uniform(-1.0, 1.0);
      const SweState a{hl, hl * vl}, b{hr, hr * vr};
      const auto f = ec_flux_extended(a, b, bl, br, p, ctx);
      const double s_ab = extended_source_term(hl, vl, bl, hr, vr, br, p, ctx);
      const double s_ba = extended_source_term(hr, vr, br, hl, vl, bl, p, ctx);
      const double res = std::abs(ctx.g * f.f_h * (br - bl) + vr * s_ba - vl * s_ab) /
                         (1.0 + std::abs(ctx.g * f.f_h * (br - bl)));
      worst = std::max(worst, res);
    }
    report("extended_flux_source_coupling", worst <= 1e-12, worst);
  }
  {
    Rng rng(cfg.seed + 2);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      FluxParams p{rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)};
      p.m4 = rng.uniform(-1.0, 1.0);
      p.k9 = rng.uniform(-1.0, 1.0);
      p.k10 = rng.uniform(-1.0, 1.0);
      p.k11 = rng.uniform(-1.0, 1.0);
      p.l10 = rng.uniform(-1.0, 1.0);
      const auto c = surface_coefficients(p);
      worst = std::max({worst, conservation_h_residual(c, p), conservation_hv_residual(c, p),
                        stability_residual(c, p)});
    }
    report("surface_coefficient_systems", worst <= 1e-13, worst);
  }
  {
    Rng rng(cfg.seed + 3);
    double worst = 0.0;
    const auto sample = [&]() -> SweState {
      double h = rng.uniform(0.0, 2.0);
      if (rng.uniform() < 0.1) h = 0.0;
      return {h, h * rng.uniform(-2.0, 2.0)};
    };
    for (int trial = 0; trial < 100000; ++trial) {
      const SweState a = sample(), b = sample(), c = sample();
      // llf
      {
        const double lam = std::max(
            {llf_wave_speed(a, b, ctx), llf_wave_speed(b, c, ctx), 1e-12});
        const auto f1 = llf_flux(a, b, ctx);
        const auto f2 = llf_flux(b, c, ctx);
        worst = std::min(worst, b.h - 0.5 / lam * (f2.f_h - f1.f_h));
      }
      // llf-type (continuous bottom); the positivity guarantee needs both
      // interpolation weights (3-a1)/8 and (1+a1)/8 non-negative.
      {
        const double a1 = rng.uniform(-1.0, 3.0);
        const double lam1 = llf_wave_speed(a, b, ctx);
        const double lam2 = llf_wave_speed(b, c, ctx);
        const double denom = std::abs(1.0 + a1) / 8.0 *
                                 (std::abs(velocity(a, ctx)) + std::abs(velocity(c, ctx))) +
                             0.5 * (lam1 + lam2);
        const double dt = denom > 0.0 ? 1.0 / denom : 1.0;
        const auto f1 = es_flux_llf_type(a, b, 0.0, 0.0, a1, ctx);
        const auto f2 = es_flux_llf_type(b, c, 0.0, 0.0, a1, ctx);
        worst = std::min(worst, b.h - dt * (f2.f_h - f1.f_h));
      }
      // suliciu
      {
        const double s =
            std::max({suliciu_max_speed(a, b, ctx), suliciu_max_speed(b, c, ctx), 1e-12});
        const auto f1 = suliciu_flux(a, b, ctx);
        const auto f2 = suliciu_flux(b, c, ctx);
        worst = std::min(worst, b.h - 0.5 / s * (f2.f_h - f1.f_h));
      }
      // kinetic
      {
        const double s =
            std::max({kinetic_max_speed(a, b, ctx), kinetic_max_speed(b, c, ctx), 1e-12});
        const auto f1 = kinetic_flux(a, b, ctx);
        const auto f2 = kinetic_flux(b, c, ctx);
        worst = std::min(worst, b.h - 0.5 / s * (f2.f_h - f1.f_h));
      }
      // hydrostatic reconstruction of llf with random bottoms
      {
        const double ba = rng.uniform(-0.5, 0.5), bb = rng.uniform(-0.5, 0.5),
                     bc = rng.uniform(-0.5, 0.5);
        const double lam = std::max(
            {llf_wave_speed(a, b, ctx), llf_wave_speed(b, c, ctx), 1e-12});
        const auto inner = [](const SweState& x, const SweState& y, const PhysicsContext& cc) {
          return llf_flux(x, y, cc);
        };
        const auto f1 = hydrostatic_reconstruction(inner, a, b, ba, bb, ctx);
        const auto f2 = hydrostatic_reconstruction(inner, b, c, bb, bc, ctx);
        worst = std::min(worst, b.h - 0.5 / lam * (f2.f_h - f1.f_h));
      }
    }
    report("positivity_sampling", worst >= -1e-15, worst);

    // The plain entropy conservative flux must fail positivity.
    const SweState left{1.0, -1.0}, mid{0.0, 0.0}, right{1.0, 1.0};
    const FluxParams p{-1.0, 1.0};
    const auto f1 = ec_flux(left, mid, p, ctx);
    const auto f2 = ec_flux(mid, right, p, ctx);
    const double h_after = mid.h - 1e-3 * (f2.f_h - f1.f_h);
    report("ec_flux_positivity_counterexample", h_after < 0.0, h_after);
  }
  {
    Rng rng(cfg.seed + 4);
    double worst_mean = 0.0, worst_min = 0.0;
    for (int p = 1; p <= 7; ++p) {
      for (NodeFamily fam : {NodeFamily::lobatto, NodeFamily::gauss}) {
        const SbpOperator& op = sbp_operator(fam, p);
        const auto lim_cfg = make_limiter_config(op);
        for (int trial = 0; trial < 700; ++trial) {
          std::vector<double> h(static_cast<std::size_t>(op.n()));
          for (auto& x : h) x = rng.uniform(-0.4, 1.6);
          double mean = 0.0;
          for (int k = 0; k < op.n(); ++k)
            mean += 0.5 * op.weights[static_cast<std::size_t>(k)] * h[static_cast<std::size_t>(k)];
          if (mean < 0.0) continue;
          positivity_limit(h.data(), op, lim_cfg);
          double mean_after = 0.0, min_after = h[0];
          for (int k = 0; k < op.n(); ++k) {
            mean_after += 0.5 * op.weights[static_cast<std::size_t>(k)] * h[static_cast<std::size_t>(k)];
            min_after = std::min(min_after, h[static_cast<std::size_t>(k)]);
          }
          for (int r = 0; r < lim_cfg.n_check_nodes(); ++r) {
            double val = 0.0;
            for (int jn = 0; jn < op.n(); ++jn)
              val += lim_cfg.interpolation[static_cast<std::size_t>(r) * op.n() + jn] *
                     h[static_cast<std::size_t>(jn)];
            min_after = std::min(min_after, val);
          }
          worst_mean =
              std::max(worst_mean, std::abs(mean_after - mean) / (1.0 + std::abs(mean)));
          worst_min = std::min(worst_min, min_after);
        }
      }
    }
    report("limiter_mean_preservation", worst_mean <= 1e-15, worst_mean);
    report("limiter_nonnegativity", worst_min >= -1e-15, worst_min);
  }
  {
    Rng rng(cfg.seed + 5);
    double worst = 0.0;
    detail::ElementWorkspace ws;
    for (int p_deg = 1; p_deg <= 7; ++p_deg) {
      const SbpOperator& op = lobatto_operator(p_deg);
      const std::size_t n = static_cast<std::size_t>(op.n());
      for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> h(n), hv(n), b(n), sh(n), shv(n);
        std::vector<double> hvv(n), hv2(n), h2(n);
        for (std::size_t k = 0; k < n; ++k) {
          h[k] = rng.uniform(0.5, 2.0);
          hv[k] = rng.uniform(-1.0, 1.0);
          b[k] = rng.uniform(-0.5, 0.5);
          const double v = hv[k] / h[k];
          hvv[k] = h[k] * v;
          hv2[k] = h[k] * v * v;
          h2[k] = h[k] * h[k];
        }
        FluxParams p{rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)};
        p.m4 = rng.uniform(-1.0, 1.0);
        p.k9 = rng.uniform(-1.0, 1.0);
        p.k10 = rng.uniform(-1.0, 1.0);
        p.k11 = rng.uniform(-1.0, 1.0);
        p.l10 = rng.uniform(-1.0, 1.0);
        const std::array<double, 2> f_h{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        surface_correction_terms(h.data(), hv.data(), b.data(), op, surface_coefficients(p),
                                 ctx, f_h, sh.data(), shv.data(), ws);
        std::vector<double> ref_h(n, 0.0), ref_hv(n, 0.0);
        op.add_lifted(1.0, op.trace(hvv), ref_h.data());
        const auto t2 = op.trace(hv2);
        const auto t3 = op.trace(h2);
        op.add_lifted(1.0, {t2[0] + 0.5 * ctx.g * t3[0], t2[1] + 0.5 * ctx.g * t3[1]},
                      ref_hv.data());
        for (std::size_t k = 0; k < n; ++k) {
          worst = std::max(worst, std::abs(sh[k] - ref_h[k]));
          worst = std::max(worst, std::abs(shv[k] - ref_hv[k]));
        }
      }
    }
    report("lobatto_surface_reduction", worst <= 1e-12, worst);
  }

  out << (all_ok ? "verify: all checks passed\n" : "verify: FAILURES detected\n");
  return all_ok ? 0 : 1;
}

}  // namespace swsbp

#endif  // SWSBP_RUNNER_HPP
