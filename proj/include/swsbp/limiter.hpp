#ifndef SWSBP_LIMITER_HPP
#define SWSBP_LIMITER_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "swsbp/sbp.hpp"

namespace swsbp {

/// Linear scaling limiter enforcing nodal non-negativity of the water height
/// while preserving the element mean.  For bases without boundary nodes the
/// minimum is also taken over q+1 auxiliary Lobatto check nodes with
/// 2q - 1 >= p, reached through an interpolation matrix.
struct LimiterConfig {
  bool enabled = true;
  bool limit_discharge = false;  // co-limit hv with the same theta
  int check_degree = 0;          // q; 0 means no auxiliary nodes (p = 0)
  std::vector<double> check_weights;         // Lobatto weights of the check rule
  std::vector<double> interpolation;         // (q+1) x (p+1), check nodes from solution nodes

  int n_check_nodes() const { return check_degree > 0 ? check_degree + 1 : 0; }
};

/// Builds the limiter configuration for a solution basis of degree p.
/// The auxiliary check rule uses q+1 Lobatto nodes with q = ceil((p+1)/2),
/// the smallest degree with 2q - 1 >= p so that the check-rule quadrature
/// reproduces the element mean exactly.
inline LimiterConfig make_limiter_config(const SbpOperator& op, bool enabled = true,
                                         bool limit_discharge = false) {
  LimiterConfig cfg;
  cfg.enabled = enabled;
  cfg.limit_discharge = limit_discharge;
  const int p = op.degree;
  if (p == 0) return cfg;  // the single nodal value is the mean
  const int q = std::max(1, (p + 2) / 2);  // ceil((p+1)/2)
  cfg.check_degree = q;
  const SbpOperator& check = lobatto_operator(q);
  cfg.check_weights = check.weights;
  // Lagrange interpolation from the solution nodes to the check nodes.
  const int n = op.n();
  const int m = q + 1;
  const auto bw = detail::barycentric_weights(op.nodes);
  cfg.interpolation.resize(static_cast<std::size_t>(m) * n);
  for (int r = 0; r < m; ++r) {
    const auto row = detail::lagrange_row(op.nodes, bw, check.nodes[static_cast<std::size_t>(r)]);
    for (int j = 0; j < n; ++j)
      cfg.interpolation[static_cast<std::size_t>(r) * n + j] = row[static_cast<std::size_t>(j)];
  }
  return cfg;
}

struct LimiterResult {
  double theta = 1.0;
  double mean = 0.0;
};

/// Applies the scaling limiter to the nodal heights of one element and
/// returns the applied theta.  Throws when the element mean is negative,
/// which signals a CFL violation upstream.
inline LimiterResult positivity_limit(double* h, const SbpOperator& op,
                                      const LimiterConfig& cfg) {
  const int n = op.n();
  double mean = 0.0;
  for (int k = 0; k < n; ++k) mean += op.weights[static_cast<std::size_t>(k)] * h[k];
  mean /= 2.0;

  if (mean < -1e-12)
    throw std::domain_error("positivity_limit: negative element mean water height");
  if (mean < 0.0) mean = 0.0;

  double min_h = h[0];
  for (int k = 1; k < n; ++k) min_h = std::min(min_h, h[k]);
  const int m = cfg.n_check_nodes();
  for (int r = 0; r < m; ++r) {
    double val = 0.0;
    for (int j = 0; j < n; ++j)
      val += cfg.interpolation[static_cast<std::size_t>(r) * n + j] * h[j];
    min_h = std::min(min_h, val);
  }

  LimiterResult res;
  res.mean = mean;
  if (min_h >= 0.0) return res;
  res.theta = mean > 0.0 ? mean / (mean - min_h) : 0.0;
  for (int k = 0; k < n; ++k) h[k] = mean + res.theta * (h[k] - mean);
  return res;
}

/// Scales the discharge about its mean with the theta applied to the height,
/// preserving the mean discharge.  Off by default.
inline void limit_discharge_consistency(double* hv, const SbpOperator& op, double theta) {
  if (theta == 1.0) return;
  const int n = op.n();
  double mean = 0.0;
  for (int k = 0; k < n; ++k) mean += op.weights[static_cast<std::size_t>(k)] * hv[k];
  mean /= 2.0;
  for (int k = 0; k < n; ++k) hv[k] = mean + theta * (hv[k] - mean);
}

}  // namespace swsbp

#endif  // SWSBP_LIMITER_HPP
