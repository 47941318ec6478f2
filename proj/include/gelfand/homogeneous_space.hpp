#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "gelfand_core.hpp"
#include "random.hpp"

namespace gelfand {

// Points of the homogeneous space G/K for each pair factor: a unit vector of
// R^{d+1}, a unit vector of C^q, or an angle vector on T^N.
using FactorSpherePoint = std::variant<Eigen::VectorXd, Eigen::VectorXcd, std::vector<double>>;

struct SpherePoint {
  std::vector<FactorSpherePoint> parts;
};

namespace detail {

inline Eigen::VectorXd gaussian_vector(Eigen::Index n, splitmix64& rng) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.normal();
  return v;
}

inline Eigen::VectorXcd complex_gaussian_vector(Eigen::Index n, splitmix64& rng) {
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double re = rng.normal();
    const double im = rng.normal();
    v(i) = {re, im};
  }
  return v;
}

} // namespace detail

// Uniform point on G/K: normalized Gaussian vectors on S^d and Ω_{2q}, uniform
// angles on the torus.
inline SpherePoint random_sphere_point(const PairDescriptor& pair, splitmix64& rng) {
  SpherePoint p;
  for (const auto& f : pair.factors()) {
    if (const auto* rs = std::get_if<RealSphere>(&f)) {
      Eigen::VectorXd v;
      do {
        v = detail::gaussian_vector(rs->d + 1, rng);
      } while (v.norm() == 0.0);
      p.parts.emplace_back(Eigen::VectorXd(v / v.norm()));
    } else if (const auto* cs = std::get_if<ComplexSphere>(&f)) {
      Eigen::VectorXcd v;
      do {
        v = detail::complex_gaussian_vector(cs->q, rng);
      } while (v.norm() == 0.0);
      p.parts.emplace_back(Eigen::VectorXcd(v / v.norm()));
    } else {
      std::vector<double> x(static_cast<std::size_t>(std::get<TorusGroup>(f).n));
      for (double& a : x) a = rng.uniform(0.0, 2.0 * std::numbers::pi);
      p.parts.emplace_back(std::move(x));
    }
  }
  return p;
}

// The base point e₁ (or 0 on the torus), whose stabilizer is K.
inline SpherePoint base_point(const PairDescriptor& pair) {
  SpherePoint p;
  for (const auto& f : pair.factors()) {
    if (const auto* rs = std::get_if<RealSphere>(&f)) {
      p.parts.emplace_back(Eigen::VectorXd(Eigen::VectorXd::Unit(rs->d + 1, 0)));
    } else if (const auto* cs = std::get_if<ComplexSphere>(&f)) {
      p.parts.emplace_back(Eigen::VectorXcd(Eigen::VectorXcd::Unit(cs->q, 0)));
    } else {
      p.parts.emplace_back(std::vector<double>(static_cast<std::size_t>(std::get<TorusGroup>(f).n), 0.0));
    }
  }
  return p;
}

// Double coset of x⁻¹y for x e₁ = ξ and y e₁ = η: the inner product ξ·η on
// S^d, Σ η_i conj(ξ_i) on Ω_{2q}, and η - ξ on the torus. Inner products are
// clamped into the closed domain.
inline DoubleCosetPoint coset_between(const PairDescriptor& pair, const SpherePoint& xi,
                                      const SpherePoint& eta) {
  const auto& f = pair.factors();
  if (xi.parts.size() != f.size() || eta.parts.size() != f.size()) {
    throw usage_error("coset_between: sphere point does not match pair " + pair.to_string());
  }
  DoubleCosetPoint out;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (std::holds_alternative<RealSphere>(f[i])) {
      const auto& a = std::get<Eigen::VectorXd>(xi.parts[i]);
      const auto& b = std::get<Eigen::VectorXd>(eta.parts[i]);
      out.parts.push_back(IntervalPoint{std::clamp(a.dot(b), -1.0, 1.0)});
    } else if (std::holds_alternative<ComplexSphere>(f[i])) {
      const auto& a = std::get<Eigen::VectorXcd>(xi.parts[i]);
      const auto& b = std::get<Eigen::VectorXcd>(eta.parts[i]);
      std::complex<double> z = a.dot(b); // Eigen conjugates the first argument
      if (std::abs(z) > 1.0) z /= std::abs(z);
      out.parts.push_back(DiscPoint{z});
    } else {
      const auto& a = std::get<std::vector<double>>(xi.parts[i]);
      const auto& b = std::get<std::vector<double>>(eta.parts[i]);
      std::vector<double> d(a.size());
      for (std::size_t j = 0; j < a.size(); ++j) d[j] = b[j] - a[j];
      out.parts.push_back(AnglePoint{std::move(d)});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Haar sampling

// Haar-distributed orthogonal (real) or unitary (complex) n×n matrix: QR of a
// Gaussian matrix with the diagonal of R normalized to positive real.
inline Eigen::MatrixXd haar_orthogonal(int n, splitmix64& rng) {
  Eigen::MatrixXd a(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) a(i, j) = rng.normal();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd& r = qr.matrixQR();
  for (int j = 0; j < n; ++j) {
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  }
  return q;
}

inline Eigen::MatrixXcd haar_unitary(int n, splitmix64& rng) {
  Eigen::MatrixXcd a(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double re = rng.normal();
      const double im = rng.normal();
      a(i, j) = {re, im};
    }
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd& r = qr.matrixQR();
  for (int j = 0; j < n; ++j) {
    const double m = std::abs(r(j, j));
    if (m > 0) q.col(j) *= r(j, j) / m;
  }
  return q;
}

// Random elements of the stabilizer K of e₁: block diag(1, M) with M Haar on
// O(d) (real sphere S^d) or U(q-1) (complex sphere Ω_{2q}).
class StabilizerSampler {
public:
  StabilizerSampler(PairFactor factor, std::uint64_t seed) : factor_(factor), rng_(seed) {
    if (std::holds_alternative<TorusGroup>(factor_)) {
      throw usage_error("StabilizerSampler: the torus has trivial stabilizer");
    }
  }

  int ambient_dimension() const {
    if (const auto* rs = std::get_if<RealSphere>(&factor_)) return rs->d + 1;
    return std::get<ComplexSphere>(factor_).q;
  }

  Eigen::MatrixXd next_real() {
    const int n = ambient_dimension();
    Eigen::MatrixXd k = Eigen::MatrixXd::Identity(n, n);
    if (n > 1) k.bottomRightCorner(n - 1, n - 1) = haar_orthogonal(n - 1, rng_);
    return k;
  }

  Eigen::MatrixXcd next_complex() {
    const int n = ambient_dimension();
    Eigen::MatrixXcd k = Eigen::MatrixXcd::Identity(n, n);
    if (n > 1) k.bottomRightCorner(n - 1, n - 1) = haar_unitary(n - 1, rng_);
    return k;
  }

private:
  PairFactor factor_;
  splitmix64 rng_;
};

// Orthogonal (unitary) matrix whose first column is the unit vector v, built
// from a QR factorization of [v | I]; the first column's sign/phase is fixed
// so that A e₁ = v exactly up to rounding.
inline Eigen::MatrixXd completion(const Eigen::VectorXd& v) {
  const auto n = v.size();
  Eigen::MatrixXd a(n, n + 1);
  a.col(0) = v;
  a.rightCols(n) = Eigen::MatrixXd::Identity(n, n);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  if (q.col(0).dot(v) < 0) q.col(0) = -q.col(0);
  return q;
}

inline Eigen::MatrixXcd completion(const Eigen::VectorXcd& v) {
  const auto n = v.size();
  Eigen::MatrixXcd a(n, n + 1);
  a.col(0) = v;
  a.rightCols(n) = Eigen::MatrixXcd::Identity(n, n);
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
  Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(n, n);
  const std::complex<double> c = q.col(0).dot(v);
  q.col(0) *= c / std::abs(c);
  return q;
}

} // namespace gelfand
