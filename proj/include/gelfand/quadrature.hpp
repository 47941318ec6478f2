#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "errors.hpp"
#include "special_functions.hpp"
#include "tolerances.hpp"

namespace gelfand {

// Gauss rule for the weight (1-x)^α (1+x)^β on [-1, 1]. Nodes ascending.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  double alpha = 0.0;
  double beta = 0.0;
  int order = 0;

  std::size_t size() const noexcept { return nodes.size(); }
  double node(std::size_t i) const { return nodes[i]; }
  double weight(std::size_t i) const { return weights[i]; }
};

// Composite probability rule on the closed unit disc for the density
// (q-1)/π r (1-r²)^{q-2} dr dφ. The radial part is Gauss-Jacobi(q-2, 0) in
// x = 2r² - 1; the angular part is the uniform grid 2πj/M.
struct DiscQuadratureRule {
  QuadratureRule radial;
  int angular_count = 0;
  int q = 2;

  std::vector<std::complex<double>> points;
  std::vector<double> point_weights;

  std::size_t size() const noexcept { return points.size(); }
  std::complex<double> node(std::size_t i) const { return points[i]; }
  double weight(std::size_t i) const { return point_weights[i]; }
};

// Uniform tensor grid on [0, 2π)^N with equal weights (per_axis)^{-N}. Exact
// for every trigonometric monomial exp(i j·x) with all |j_a| < per_axis.
struct TorusGrid {
  int dims = 1;
  int per_axis = 1;

  std::size_t size() const noexcept {
    std::size_t s = 1;
    for (int a = 0; a < dims; ++a) s *= static_cast<std::size_t>(per_axis);
    return s;
  }
  std::vector<double> node(std::size_t i) const {
    std::vector<double> x(static_cast<std::size_t>(dims));
    for (int a = dims - 1; a >= 0; --a) {
      const auto j = i % static_cast<std::size_t>(per_axis);
      i /= static_cast<std::size_t>(per_axis);
      x[static_cast<std::size_t>(a)] = 2.0 * std::numbers::pi * static_cast<double>(j) / per_axis;
    }
    return x;
  }
  double weight(std::size_t) const { return 1.0 / static_cast<double>(size()); }
};

namespace detail {

// Eigenvalues of the symmetric tridiagonal matrix (diag, off) by implicit QL
// with Wilkinson-type shifts. Only the first component of each normalized
// eigenvector is tracked, which is all Golub-Welsch needs. `off[i]` couples
// rows i and i+1; on return `diag` holds eigenvalues (unsorted) and `first`
// the matching first eigenvector components.
inline void tridiagonal_ql(std::vector<double>& diag, std::vector<double> off,
                           std::vector<double>& first) {
  const std::size_t n = diag.size();
  first.assign(n, 0.0);
  if (n == 0) return;
  first[0] = 1.0;
  off.resize(n, 0.0);
  off[n - 1] = 0.0;

  constexpr int max_sweeps = 60;
  constexpr double eps = std::numeric_limits<double>::epsilon();

  for (std::size_t l = 0; l < n; ++l) {
    int sweeps = 0;
    std::size_t m = l;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(diag[m]) + std::abs(diag[m + 1]);
        if (std::abs(off[m]) <= eps * dd) break;
      }
      if (m == l) break;
      if (++sweeps > max_sweeps) {
        throw numeric_error("tridiagonal eigensolve did not converge after " +
                            std::to_string(max_sweeps) + " QL sweeps");
      }
      double g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
      double r = std::hypot(g, 1.0);
      g = diag[m] - diag[l] + off[l] / (g + std::copysign(r, g));
      double s = 1.0;
      double c = 1.0;
      double p = 0.0;
      bool deflated = false;
      for (std::size_t ii = m; ii-- > l;) {
        double f = s * off[ii];
        const double b = c * off[ii];
        r = std::hypot(f, g);
        off[ii + 1] = r;
        if (r == 0.0) {
          diag[ii + 1] -= p;
          off[m] = 0.0;
          deflated = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = diag[ii + 1] - p;
        r = (diag[ii] - g) * s + 2.0 * c * b;
        p = s * r;
        diag[ii + 1] = g + p;
        g = c * r - b;
        f = first[ii + 1];
        first[ii + 1] = s * first[ii] + c * f;
        first[ii] = c * first[ii] - s * f;
      }
      if (deflated) continue;
      diag[l] -= p;
      off[l] = g;
      off[m] = 0.0;
    } while (m != l);
  }
}

} // namespace detail

// ∫_{-1}^{1} (1-x)^α (1+x)^β dx = 2^{α+β+1} B(α+1, β+1).
inline double jacobi_mass(double alpha, double beta) {
  return std::exp((alpha + beta + 1.0) * std::numbers::ln2 + std::lgamma(alpha + 1.0) +
                  std::lgamma(beta + 1.0) - std::lgamma(alpha + beta + 2.0));
}

// Golub-Welsch construction of the order-point Gauss-Jacobi rule.
inline QuadratureRule gauss_jacobi(int order, double alpha, double beta) {
  if (order < 1) throw parameter_error("gauss_jacobi: order must be >= 1");
  if (!(alpha > -1.0) || !(beta > -1.0)) {
    throw parameter_error("gauss_jacobi: exponents must satisfy alpha > -1 and beta > -1");
  }
  const auto n = static_cast<std::size_t>(order);
  const double ab = alpha + beta;

  std::vector<double> diag(n);
  std::vector<double> off(n, 0.0);
  diag[0] = (beta - alpha) / (ab + 2.0);
  for (std::size_t k = 1; k < n; ++k) {
    const double s = 2.0 * static_cast<double>(k) + ab;
    diag[k] = (beta * beta - alpha * alpha) / (s * (s + 2.0));
  }
  for (std::size_t k = 1; k < n; ++k) {
    const double kk = static_cast<double>(k);
    const double s = 2.0 * kk + ab;
    double b;
    if (k == 1) {
      b = 4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
    } else {
      b = 4.0 * kk * (kk + alpha) * (kk + beta) * (kk + ab) / (s * s * (s + 1.0) * (s - 1.0));
    }
    off[k - 1] = std::sqrt(b);
  }

  std::vector<double> first;
  detail::tridiagonal_ql(diag, off, first);

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) { return diag[a] < diag[b]; });

  const double mass = jacobi_mass(alpha, beta);
  QuadratureRule rule;
  rule.alpha = alpha;
  rule.beta = beta;
  rule.order = order;
  rule.nodes.reserve(n);
  rule.weights.reserve(n);
  for (std::size_t i : perm) {
    rule.nodes.push_back(diag[i]);
    rule.weights.push_back(mass * first[i] * first[i]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(std::abs(rule.nodes[i]) < 1.0) || !(rule.weights[i] > 0.0) ||
        (i > 0 && !(rule.nodes[i] > rule.nodes[i - 1]))) {
      throw numeric_error("gauss_jacobi: eigensolve produced an invalid rule at order " +
                          std::to_string(order));
    }
  }
  return rule;
}

// Probability rule for the image of the uniform measure on S^d under ξ ↦ ξ·e₁:
// density (σ_{d-1}/σ_d)(1-x²)^{d/2-1} on [-1, 1].
inline QuadratureRule sphere_rule(int order, int d) {
  if (d < 1) throw parameter_error("sphere_rule: sphere dimension d must be >= 1");
  const double a = d / 2.0 - 1.0;
  QuadratureRule rule = gauss_jacobi(order, a, a);
  // σ_{d-1}/σ_d times the raw Jacobi mass is 1 analytically; normalizing by
  // the computed sum keeps the mass identity at rounding level.
  const double total = std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0);
  for (double& w : rule.weights) w /= total;
  return rule;
}

inline DiscQuadratureRule disc_rule(int radial_order, int angular_count, int q) {
  if (q < 2) throw parameter_error("disc_rule: q must be >= 2");
  if (angular_count < 1) throw parameter_error("disc_rule: angular_count must be >= 1");
  DiscQuadratureRule rule;
  rule.q = q;
  rule.angular_count = angular_count;
  rule.radial = gauss_jacobi(radial_order, static_cast<double>(q - 2), 0.0);

  const double radial_total =
      std::accumulate(rule.radial.weights.begin(), rule.radial.weights.end(), 0.0);
  const std::size_t m = static_cast<std::size_t>(angular_count);
  rule.points.reserve(rule.radial.size() * m);
  rule.point_weights.reserve(rule.radial.size() * m);
  for (std::size_t i = 0; i < rule.radial.size(); ++i) {
    const double r = std::sqrt((1.0 + rule.radial.nodes[i]) / 2.0);
    const double w = rule.radial.weights[i] / radial_total / static_cast<double>(m);
    for (std::size_t j = 0; j < m; ++j) {
      const double phi = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(m);
      rule.points.push_back(std::polar(r, phi));
      rule.point_weights.push_back(w);
    }
  }
  return rule;
}

inline TorusGrid torus_grid(int dims, int per_axis) {
  if (dims < 1) throw parameter_error("torus_grid: dimension must be >= 1");
  if (per_axis < 1) throw parameter_error("torus_grid: points per axis must be >= 1");
  return TorusGrid{dims, per_axis};
}

// Σ_i w_i f(node_i), summed in node order so results are reproducible.
template <class Rule, class F>
std::complex<double> integrate(const Rule& rule, F&& f) {
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t i = 0; i < rule.size(); ++i) {
    acc += rule.weight(i) * std::complex<double>(f(rule.node(i)));
  }
  return acc;
}

template <class Rule>
double total_mass(const Rule& rule) {
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) acc += rule.weight(i);
  return acc;
}

} // namespace gelfand
