#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "errors.hpp"
#include "tolerances.hpp"

namespace gelfand {

namespace detail {

inline double clamp_unit(double x, const char* what) {
  if (!(std::abs(x) <= 1.0 + tolerance::boundary)) {
    throw domain_error(std::string(what) + ": argument " + std::to_string(x) +
                       " outside [-1, 1]");
  }
  return x > 1.0 ? 1.0 : (x < -1.0 ? -1.0 : x);
}

using u128 = unsigned __int128;

inline u128 checked_mul(u128 a, u128 b) {
  if (b != 0 && a > std::numeric_limits<u128>::max() / b) {
    throw numeric_error("dimension constant overflows 128-bit intermediate arithmetic");
  }
  return a * b;
}

inline std::uint64_t narrow_u64(u128 v) {
  if (v > std::numeric_limits<std::uint64_t>::max()) {
    throw numeric_error("dimension constant exceeds 64-bit range");
  }
  return static_cast<std::uint64_t>(v);
}

// Exact binomial coefficient; each partial product c * (n-k+i) is divisible by i.
inline u128 binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  u128 c = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    c = checked_mul(c, n - k + i) / i;
  }
  return c;
}

} // namespace detail

// c_n(d, x) = C_n^{(λ)}(x) / C_n^{(λ)}(1) with λ = (d-1)/2.
//
// Uses the three-term recurrence for the normalized polynomials directly,
//   (n+d-1) c_{n+1} = (2n+d-1) x c_n - n c_{n-1},   c_0 = 1, c_1 = x,
// which never forms the raw Pochhammer normalizers. At d = 1 it reduces to the
// Chebyshev recurrence, so c_n(1, cos t) = cos(n t). c_n(d, 1) == 1 exactly.
inline double gegenbauer_norm(int n, int d, double x) {
  if (n < 0) throw parameter_error("gegenbauer_norm: degree must be >= 0");
  if (d < 1) throw parameter_error("gegenbauer_norm: sphere dimension d must be >= 1");
  x = detail::clamp_unit(x, "gegenbauer_norm");
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = x;
  for (int k = 1; k < n; ++k) {
    const double next = ((2.0 * k + d - 1) * x * cur - k * prev) / (k + d - 1);
    prev = cur;
    cur = next;
  }
  return cur;
}

// All of c_0(d,x) .. c_nmax(d,x).
inline std::vector<double> gegenbauer_norm_all(int nmax, int d, double x) {
  if (nmax < 0) throw parameter_error("gegenbauer_norm_all: degree must be >= 0");
  if (d < 1) throw parameter_error("gegenbauer_norm_all: sphere dimension d must be >= 1");
  x = detail::clamp_unit(x, "gegenbauer_norm_all");
  std::vector<double> out(static_cast<std::size_t>(nmax) + 1);
  out[0] = 1.0;
  if (nmax >= 1) out[1] = x;
  for (int k = 1; k < nmax; ++k) {
    out[k + 1] = ((2.0 * k + d - 1) * x * out[k] - k * out[k - 1]) / (k + d - 1);
  }
  return out;
}

// R_k^{(α,β)}(x) = P_k^{(α,β)}(x) / P_k^{(α,β)}(1).
//
// Runs the Jacobi recurrence at x and at 1 in lockstep and rescales both
// tracks by the current value at 1 after every step, so nothing overflows for
// large k and the result at x = 1 is exactly 1.
inline double jacobi_norm(int k, double alpha, double beta, double x) {
  if (k < 0) throw parameter_error("jacobi_norm: degree must be >= 0");
  if (!(alpha > -1.0) || !(beta > -1.0)) {
    throw parameter_error("jacobi_norm: exponents must satisfy alpha > -1 and beta > -1");
  }
  x = detail::clamp_unit(x, "jacobi_norm");
  if (k == 0) return 1.0;

  const double ab = alpha + beta;
  double px_prev = 1.0;
  double px = (alpha + 1.0) + (ab + 2.0) * (x - 1.0) / 2.0;
  double p1_prev = 1.0;
  double p1 = alpha + 1.0;
  px_prev /= p1;
  px /= p1;
  p1_prev /= p1;
  p1 = 1.0;

  for (int n = 1; n < k; ++n) {
    const double s = 2.0 * n + ab;
    const double a1 = 2.0 * (n + 1) * (n + ab + 1.0) * s;
    const double a2 = (s + 1.0) * (alpha * alpha - beta * beta);
    const double a3 = s * (s + 1.0) * (s + 2.0);
    const double a4 = 2.0 * (n + alpha) * (n + beta) * (s + 2.0);
    const double px_next = ((a2 + a3 * x) * px - a4 * px_prev) / a1;
    const double p1_next = ((a2 + a3) * p1 - a4 * p1_prev) / a1;
    px_prev = px / p1_next;
    px = px_next / p1_next;
    p1_prev = p1 / p1_next;
    p1 = 1.0;
  }
  return px;
}

// Disc polynomial R^α_{m,n}(r e^{iφ}) = r^{|m-n|} e^{i(m-n)φ} R^{(α,|m-n|)}_{min(m,n)}(2r²-1).
// The angular-radial prefactor is z^{m-n} (or conj(z)^{n-m}), formed by repeated
// multiplication so that R^α_{m,n}(1) == 1 exactly.
inline std::complex<double> disc_polynomial(int m, int n, double alpha, std::complex<double> z) {
  if (m < 0 || n < 0) throw parameter_error("disc_polynomial: bidegree must be >= 0");
  if (!(alpha > -1.0)) throw parameter_error("disc_polynomial: alpha must be > -1");
  const double r = std::abs(z);
  if (!(r <= 1.0 + tolerance::boundary)) {
    throw domain_error("disc_polynomial: |z| = " + std::to_string(r) + " exceeds 1");
  }
  if (r > 1.0) z /= r;
  const double rr = r > 1.0 ? 1.0 : r;

  const int h = std::abs(m - n);
  const int k = std::min(m, n);
  const std::complex<double> base = m >= n ? z : std::conj(z);
  std::complex<double> angular{1.0, 0.0};
  for (int i = 0; i < h; ++i) angular *= base;

  const double x = std::clamp(2.0 * rr * rr - 1.0, -1.0, 1.0);
  return angular * jacobi_norm(k, alpha, static_cast<double>(h), x);
}

// N_n(d) = (d)_{n-1} (2n+d-1) / n!, evaluated as C(n+d-2, n-1) (2n+d-1) / n in
// exact integer arithmetic. N_0(d) = 1.
inline std::uint64_t dimension_real(int n, int d) {
  if (n < 0) throw parameter_error("dimension_real: degree must be >= 0");
  if (d < 1) throw parameter_error("dimension_real: sphere dimension d must be >= 1");
  if (n == 0) return 1;
  const auto un = static_cast<std::uint64_t>(n);
  const auto ud = static_cast<std::uint64_t>(d);
  const detail::u128 c = detail::binomial(un + ud - 2, un - 1);
  return detail::narrow_u64(detail::checked_mul(c, 2 * un + ud - 1) / un);
}

// N(q; m, n) = (m+n+q-1)/(q-1) · C(m+q-2, q-2) · C(n+q-2, q-2).
inline std::uint64_t dimension_complex(int q, int m, int n) {
  if (q < 2) throw parameter_error("dimension_complex: q must be >= 2");
  if (m < 0 || n < 0) throw parameter_error("dimension_complex: bidegree must be >= 0");
  const auto uq = static_cast<std::uint64_t>(q);
  const auto um = static_cast<std::uint64_t>(m);
  const auto un = static_cast<std::uint64_t>(n);
  detail::u128 v = detail::checked_mul(detail::binomial(um + uq - 2, uq - 2),
                                       detail::binomial(un + uq - 2, uq - 2));
  v = detail::checked_mul(v, um + un + uq - 1);
  return detail::narrow_u64(v / (uq - 1));
}

// σ_d = 2 π^{(d+1)/2} / Γ((d+1)/2), the surface area of S^d. σ_0 = 2 counts
// the two points of S^0.
inline double sphere_surface(int d) {
  if (d < 0) throw parameter_error("sphere_surface: d must be >= 0");
  const double h = (d + 1) / 2.0;
  return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

} // namespace gelfand
