#ifndef SWSBP_SBP_HPP
#define SWSBP_SBP_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace swsbp {

enum class NodeFamily { lobatto, gauss };

inline const char* to_string(NodeFamily f) {
  return f == NodeFamily::lobatto ? "lobatto" : "gauss";
}

/// Nodal summation-by-parts operator on the reference interval [-1, 1].
///
/// Holds the nodes, the diagonal mass matrix (stored as the weight vector),
/// the dense differentiation matrix D, and the 2 x (p+1) boundary restriction
/// R (row 0 evaluates at -1, row 1 at +1).  The boundary matrix is
/// B = diag(-1, +1) and is kept implicit.  All operators satisfy
/// M D + D^T M = R^T B R to machine precision.
struct SbpOperator {
  int degree = 0;
  NodeFamily family = NodeFamily::lobatto;
  std::vector<double> nodes;    // strictly increasing, size p+1
  std::vector<double> weights;  // positive, sum = 2
  std::vector<double> deriv;    // (p+1)^2, row-major
  std::vector<double> restrict_to_boundary;  // 2 x (p+1), row-major

  int n() const { return degree + 1; }
  double d(int i, int j) const { return deriv[static_cast<std::size_t>(i) * n() + j]; }
  double r(int row, int j) const { return restrict_to_boundary[static_cast<std::size_t>(row) * n() + j]; }

  /// Applies D to nodal values.
  std::vector<double> apply_d(const std::vector<double>& u) const {
    std::vector<double> out(static_cast<std::size_t>(n()), 0.0);
    apply_d(u.data(), out.data());
    return out;
  }
  void apply_d(const double* u, double* out) const {
    const int m = n();
    for (int i = 0; i < m; ++i) {
      double acc = 0.0;
      const double* row = deriv.data() + static_cast<std::size_t>(i) * m;
      for (int j = 0; j < m; ++j) acc += row[j] * u[j];
      out[i] = acc;
    }
  }

  /// Boundary traces (value at -1, value at +1) of nodal data.
  std::array<double, 2> trace(const double* u) const {
    const int m = n();
    double lo = 0.0, hi = 0.0;
    for (int j = 0; j < m; ++j) {
      lo += r(0, j) * u[j];
      hi += r(1, j) * u[j];
    }
    return {lo, hi};
  }
  std::array<double, 2> trace(const std::vector<double>& u) const { return trace(u.data()); }

  /// Adds M^{-1} R^T B s to `out`, where s = (value at -1, value at +1).
  void add_lifted(double coeff, const std::array<double, 2>& s, double* out) const {
    const int m = n();
    for (int j = 0; j < m; ++j)
      out[j] += coeff * (r(1, j) * s[1] - r(0, j) * s[0]) / weights[j];
  }
};

inline constexpr int kMaxDegree = 20;

namespace detail {

/// Legendre polynomial P_n and its derivative at x, by the three-term
/// recurrence.
inline std::array<double, 2> legendre(int n, double x) {
  if (n == 0) return {1.0, 0.0};
  double pm1 = 1.0, p = x;
  for (int k = 1; k < n; ++k) {
    const double pp1 = ((2 * k + 1) * x * p - k * pm1) / (k + 1);
    pm1 = p;
    p = pp1;
  }
  double dp;
  if (std::abs(x) == 1.0) {
    dp = x == 1.0 ? 0.5 * n * (n + 1) : (n % 2 == 0 ? -1.0 : 1.0) * 0.5 * n * (n + 1);
  } else {
    dp = n * (x * p - pm1) / (x * x - 1.0);
  }
  return {p, dp};
}

inline void newton_symmetrize(std::vector<double>& x) {
  const std::size_t m = x.size();
  for (std::size_t i = 0; i < m / 2; ++i) {
    const double v = 0.5 * (x[i] - x[m - 1 - i]);
    x[i] = v;
    x[m - 1 - i] = -v;
  }
  if (m % 2 == 1) x[m / 2] = 0.0;
}

inline std::vector<double> gauss_nodes(int n) {
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    // Chebyshev initial guess, refined by Newton on P_n.
    double xi = -std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 60; ++it) {
      const auto [p, dp] = legendre(n, xi);
      const double dx = p / dp;
      xi -= dx;
      if (std::abs(dx) <= 1e-15) break;
    }
    x[static_cast<std::size_t>(i)] = xi;
  }
  newton_symmetrize(x);
  return x;
}

inline std::vector<double> lobatto_nodes(int n) {
  std::vector<double> x(static_cast<std::size_t>(n));
  x.front() = -1.0;
  x.back() = 1.0;
  const int m = n - 1;  // interior nodes are roots of P_m'
  for (int i = 1; i < n - 1; ++i) {
    double xi = -std::cos(M_PI * i / m);
    for (int it = 0; it < 60; ++it) {
      const auto [p, dp] = legendre(m, xi);
      const double d2p = (2.0 * xi * dp - m * (m + 1) * p) / (1.0 - xi * xi);
      const double dx = dp / d2p;
      xi -= dx;
      if (std::abs(dx) <= 1e-15) break;
    }
    x[static_cast<std::size_t>(i)] = xi;
  }
  newton_symmetrize(x);
  return x;
}

inline std::vector<double> barycentric_weights(const std::vector<double>& x) {
  const std::size_t m = x.size();
  std::vector<double> w(m, 1.0);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t k = 0; k < m; ++k)
      if (k != j) w[j] /= (x[j] - x[k]);
  return w;
}

inline std::vector<double> differentiation_matrix(const std::vector<double>& x,
                                                  const std::vector<double>& w) {
  const std::size_t m = x.size();
  std::vector<double> d(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double diag = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      const double dij = (w[j] / w[i]) / (x[i] - x[j]);
      d[i * m + j] = dij;
      diag -= dij;
    }
    d[i * m + i] = diag;
  }
  return d;
}

/// Lagrange basis evaluation at a point that may coincide with a node.
inline std::vector<double> lagrange_row(const std::vector<double>& x,
                                        const std::vector<double>& w, double pt) {
  const std::size_t m = x.size();
  std::vector<double> row(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    if (std::abs(pt - x[j]) < 1e-14) {
      row[j] = 1.0;
      return row;
    }
  }
  double denom = 0.0;
  for (std::size_t j = 0; j < m; ++j) denom += w[j] / (pt - x[j]);
  for (std::size_t j = 0; j < m; ++j) row[j] = (w[j] / (pt - x[j])) / denom;
  return row;
}

inline SbpOperator build_operator(NodeFamily family, int p) {
  SbpOperator op;
  op.degree = p;
  op.family = family;
  const int n = p + 1;
  if (p == 0) {
    op.nodes = {0.0};
    op.weights = {2.0};
    op.deriv = {0.0};
    op.restrict_to_boundary = {1.0, 1.0};
    return op;
  }
  if (family == NodeFamily::gauss) {
    op.nodes = gauss_nodes(n);
    op.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const double xi = op.nodes[static_cast<std::size_t>(i)];
      const auto [pv, dp] = legendre(n, xi);
      (void)pv;
      op.weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - xi * xi) * dp * dp);
    }
  } else {
    op.nodes = lobatto_nodes(n);
    op.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const double xi = op.nodes[static_cast<std::size_t>(i)];
      const auto [pv, dp] = legendre(n - 1, xi);
      (void)dp;
      op.weights[static_cast<std::size_t>(i)] = 2.0 / (n * (n - 1) * pv * pv);
    }
  }
  const auto bw = barycentric_weights(op.nodes);
  op.deriv = differentiation_matrix(op.nodes, bw);
  op.restrict_to_boundary.resize(2 * static_cast<std::size_t>(n));
  const auto row_lo = lagrange_row(op.nodes, bw, -1.0);
  const auto row_hi = lagrange_row(op.nodes, bw, 1.0);
  for (int j = 0; j < n; ++j) {
    op.restrict_to_boundary[static_cast<std::size_t>(j)] = row_lo[static_cast<std::size_t>(j)];
    op.restrict_to_boundary[static_cast<std::size_t>(n + j)] = row_hi[static_cast<std::size_t>(j)];
  }
  return op;
}

}  // namespace detail

/// Returns the cached operator for the requested family and degree.
/// Operators are immutable after construction; the cache is guarded so
/// shared read access from several threads is safe.
inline const SbpOperator& sbp_operator(NodeFamily family, int p) {
  if (p < 0 || p > kMaxDegree)
    throw std::invalid_argument("sbp_operator: unsupported degree " + std::to_string(p) +
                                " (supported range is 0.." + std::to_string(kMaxDegree) + ")");
  static std::map<std::pair<int, int>, SbpOperator> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  const auto key = std::make_pair(static_cast<int>(family), p);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, detail::build_operator(family, p)).first;
  return it->second;
}

inline const SbpOperator& lobatto_operator(int p) { return sbp_operator(NodeFamily::lobatto, p); }
inline const SbpOperator& gauss_operator(int p) { return sbp_operator(NodeFamily::gauss, p); }

/// Max-norm residual of M D + D^T M - R^T B R.
inline double verify_sbp(const SbpOperator& op) {
  const int n = op.n();
  double res = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double md = op.weights[static_cast<std::size_t>(i)] * op.d(i, j) +
                        op.d(j, i) * op.weights[static_cast<std::size_t>(j)];
      const double rbr = op.r(1, i) * op.r(1, j) - op.r(0, i) * op.r(0, j);
      res = std::max(res, std::abs(md - rbr));
    }
  }
  return res;
}

/// Applies the M-adjoint of the multiplication operator diag(a) to x.
/// For a diagonal mass matrix M^{-1} diag(a)^T M = diag(a), so this is the
/// pointwise product a*x; the operators built here are all diagonal-norm.
inline std::vector<double> adjoint_multiply(const SbpOperator& op, const std::vector<double>& a,
                                            const std::vector<double>& x) {
  if (a.size() != static_cast<std::size_t>(op.n()) || x.size() != a.size())
    throw std::invalid_argument("adjoint_multiply: length mismatch");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * x[i];
  return out;
}

}  // namespace swsbp

#endif  // SWSBP_SBP_HPP
