#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "gelfand_core.hpp"
#include "homogeneous_space.hpp"
#include "linalg.hpp"
#include "random.hpp"
#include "tolerances.hpp"

namespace gelfand {

struct FieldPoint {
  SpherePoint xi;
  GroupElement u;
};

struct FieldSample {
  std::vector<FieldPoint> points;
  // Real fields carry zero imaginary parts and complex_valued == false.
  std::vector<std::complex<double>> values;
  bool complex_valued = false;
  std::uint64_t seed = 0;
  double jitter_used = 0.0;
  std::string generator = splitmix64::name;
};

// Thrown when the covariance on the requested points is indefinite beyond the
// jitter budget.
class indefinite_kernel_error : public std::runtime_error {
public:
  indefinite_kernel_error(const std::string& what, GramReport r)
      : std::runtime_error(what), report(r) {}
  GramReport report;
};

// Uniform points on G/K (S^d or Ω_{2q}, angles on tori), deterministic per seed.
inline std::vector<SpherePoint> sample_sphere_points(const PairDescriptor& pair, int count,
                                                     std::uint64_t seed) {
  if (count < 1) throw parameter_error("sample_sphere_points: count must be >= 1");
  splitmix64 rng(seed);
  std::vector<SpherePoint> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out.push_back(random_sphere_point(pair, rng));
  return out;
}

// Covariance [f(ξ_j⁻¹ξ_k, u_j⁻¹u_k)] of the field with kernel synthesized from
// `spec`. Exactly hermitian by construction.
inline cmatrix field_covariance(const KernelSpec& spec, const std::vector<FieldPoint>& points) {
  const auto n = static_cast<Eigen::Index>(points.size());
  cmatrix c(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& pj = points[static_cast<std::size_t>(j)];
    for (Eigen::Index k = j; k < n; ++k) {
      const auto& pk = points[static_cast<std::size_t>(k)];
      const auto v = synthesize(spec, coset_between(spec.pair(), pj.xi, pk.xi),
                                difference(spec.group(), pj.u, pk.u));
      if (j == k) {
        c(j, j) = v.real();
      } else {
        c(j, k) = v;
        c(k, j) = std::conj(v);
      }
    }
  }
  return c;
}

// Square-root factor S with S Sᴴ = C, from a pivoted LDLᴴ factorization so
// that rank-deficient covariances (repeated points, finite-rank kernels) are
// handled without jitter. Jitter ε = jitter_scale · trace/n is added once only
// when a pivot comes out negative beyond rounding; the eigenvalue budget
// decides refusal.
struct CovarianceFactor {
  cmatrix factor;
  double jitter = 0.0;
  double min_eigenvalue = 0.0;
};

inline CovarianceFactor factor_covariance(cmatrix c) {
  const auto n = c.rows();
  if (n == 0) throw usage_error("factor_covariance: empty covariance");
  const double mean_var = std::max(c.diagonal().real().sum() / static_cast<double>(n), 0.0);
  const double scale = std::max(1.0, mean_var);
  const double budget = tolerance::jitter_budget * scale;

  CovarianceFactor out;
  out.min_eigenvalue = min_eigen_hermitian(c);
  auto refuse = [&](const std::string& why) {
    GramReport r;
    r.size = static_cast<int>(n);
    r.min_eigenvalue = out.min_eigenvalue;
    r.tolerance = budget;
    r.trials = 1;
    r.pass = false;
    throw indefinite_kernel_error("field covariance is indefinite: " + why, r);
  };
  if (out.min_eigenvalue < -budget) {
    refuse("minimum eigenvalue " + std::to_string(out.min_eigenvalue) + " below -" +
           std::to_string(budget));
  }
  // pivots this small are rounding noise of an exactly singular matrix
  const double roundoff = static_cast<double>(n) * std::numeric_limits<double>::epsilon() * scale;
  auto factor = [&](const cmatrix& m, double floor) {
    Eigen::LDLT<cmatrix> ldlt(m);
    if (ldlt.info() != Eigen::Success) return std::optional<Eigen::LDLT<cmatrix>>{};
    const Eigen::VectorXcd d = ldlt.vectorD();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (d(i).real() < -floor) return std::optional<Eigen::LDLT<cmatrix>>{};
    }
    return std::optional<Eigen::LDLT<cmatrix>>{std::move(ldlt)};
  };
  auto ldlt = factor(c, roundoff);
  if (!ldlt) {
    out.jitter = tolerance::jitter_scale * mean_var;
    c.diagonal().array() += out.jitter;
    ldlt = factor(c, budget);
    if (!ldlt) refuse("negative pivot after jitter " + std::to_string(out.jitter));
  }
  const Eigen::VectorXcd d = ldlt->vectorD();
  Eigen::VectorXd root(n);
  for (Eigen::Index i = 0; i < n; ++i) root(i) = std::sqrt(std::max(d(i).real(), 0.0));
  cmatrix l = ldlt->matrixL();
  cmatrix lr = l * root.asDiagonal();
  out.factor = ldlt->transpositionsP().transpose() * lr;
  return out;
}

// One draw of the centred Gaussian field with covariance synthesized from
// `spec` on `points`. Complex-valued kernels give circularly symmetric complex
// fields (E[v vᴴ] = C); real kernels give real fields.
inline FieldSample sample_field(const KernelSpec& spec, std::vector<FieldPoint> points,
                                std::uint64_t seed) {
  if (points.empty()) throw parameter_error("sample_field: needs at least one point");
  for (const auto& p : points) check_element(spec.group(), p.u);
  const cmatrix c = field_covariance(spec, points);
  const auto f = factor_covariance(c);

  const bool is_complex = c.imag().cwiseAbs().maxCoeff() > 0.0;
  splitmix64 rng(seed);
  const auto n = c.rows();
  Eigen::VectorXcd g(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (is_complex) {
      const double re = rng.normal();
      const double im = rng.normal();
      g(i) = std::complex<double>(re, im) / std::sqrt(2.0);
    } else {
      g(i) = rng.normal();
    }
  }
  const Eigen::VectorXcd v = f.factor * g;

  FieldSample out;
  out.points = std::move(points);
  out.values.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values[static_cast<std::size_t>(i)] = is_complex ? v(i) : std::complex<double>(v(i).real(), 0.0);
  }
  out.complex_valued = is_complex;
  out.seed = seed;
  out.jitter_used = f.jitter;
  return out;
}

} // namespace gelfand
