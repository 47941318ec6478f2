#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "gelfand_core.hpp"
#include "homogeneous_space.hpp"
#include "linalg.hpp"
#include "pd_group.hpp"
#include "random.hpp"
#include "tolerances.hpp"

namespace gelfand {

// |quadrature ⟨φ₁, φ₂⟩ - target|, target 1/δ(φ) for equal indices and 0
// otherwise.
inline double orthogonality_residual(const PairDescriptor& pair, const SphericalIndex& a,
                                     const SphericalIndex& b, const PairRule& rule) {
  const auto ip = inner_product(pair, a, b, rule);
  const double target = a == b ? 1.0 / static_cast<double>(dimension(pair, a)) : 0.0;
  return std::abs(ip - target);
}

// ---------------------------------------------------------------------------
// Functional equation ∫_K φ(xky) dω_K(k) = φ(x) φ(y)

// Monte Carlo residuals |mean_k φ(x k y) - φ(x) φ(y)| for several indices,
// all sharing the same stabilizer samples. x and y are given through the
// points x e₁, y e₁ of G/K; the group elements are the completions A_x, A_y
// with first columns x e₁, y e₁. For a pure torus pair K is trivial and the
// residuals are 0 without sampling.
inline std::vector<double> functional_equation_residuals(const PairDescriptor& pair,
                                                         const std::vector<SphericalIndex>& indices,
                                                         const SpherePoint& x, const SpherePoint& y,
                                                         long long mc_samples, std::uint64_t seed) {
  if (mc_samples < 1) throw parameter_error("functional_equation_residual: mc_samples must be >= 1");
  for (const auto& idx : indices) check_index(pair, idx);
  const auto& f = pair.factors();
  if (x.parts.size() != f.size() || y.parts.size() != f.size()) {
    throw usage_error("functional_equation_residual: sphere point does not match pair");
  }

  bool any_sphere = false;
  for (const auto& fac : f) any_sphere = any_sphere || !std::holds_alternative<TorusGroup>(fac);
  if (!any_sphere) return std::vector<double>(indices.size(), 0.0);

  struct RealFactor {
    Eigen::RowVectorXd row;
    Eigen::VectorXd col;
  };
  struct ComplexFactor {
    Eigen::RowVectorXcd row;
    Eigen::VectorXcd col;
  };

  std::vector<RealFactor> real_f(f.size());
  std::vector<ComplexFactor> complex_f(f.size());
  std::vector<splitmix64> rngs;
  DoubleCosetPoint px;
  DoubleCosetPoint py;
  DoubleCosetPoint fixed; // torus parts of x k y, independent of k
  for (std::size_t i = 0; i < f.size(); ++i) {
    rngs.emplace_back(derive_seed(seed, i));
    if (std::holds_alternative<RealSphere>(f[i])) {
      const auto& vx = std::get<Eigen::VectorXd>(x.parts[i]);
      const auto& vy = std::get<Eigen::VectorXd>(y.parts[i]);
      real_f[i] = {completion(vx).row(0), completion(vy).col(0)};
      px.parts.push_back(IntervalPoint{std::clamp(vx(0), -1.0, 1.0)});
      py.parts.push_back(IntervalPoint{std::clamp(vy(0), -1.0, 1.0)});
      fixed.parts.push_back(IntervalPoint{1.0});
    } else if (std::holds_alternative<ComplexSphere>(f[i])) {
      const auto& vx = std::get<Eigen::VectorXcd>(x.parts[i]);
      const auto& vy = std::get<Eigen::VectorXcd>(y.parts[i]);
      complex_f[i] = {completion(vx).row(0), completion(vy).col(0)};
      px.parts.push_back(DiscPoint{vx(0)});
      py.parts.push_back(DiscPoint{vy(0)});
      fixed.parts.push_back(DiscPoint{1.0});
    } else {
      const auto& ax = std::get<std::vector<double>>(x.parts[i]);
      const auto& ay = std::get<std::vector<double>>(y.parts[i]);
      std::vector<double> s(ax.size());
      for (std::size_t j = 0; j < s.size(); ++j) s[j] = ax[j] + ay[j];
      px.parts.push_back(AnglePoint{ax});
      py.parts.push_back(AnglePoint{ay});
      fixed.parts.push_back(AnglePoint{std::move(s)});
    }
  }

  std::vector<std::complex<double>> sums(indices.size(), {0.0, 0.0});
  DoubleCosetPoint p = fixed;
  for (long long s = 0; s < mc_samples; ++s) {
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (const auto* rs = std::get_if<RealSphere>(&f[i])) {
        const auto& rf = real_f[i];
        double a = rf.row(0) * rf.col(0);
        if (rs->d >= 1) {
          const Eigen::MatrixXd m = haar_orthogonal(rs->d, rngs[i]);
          a += (rf.row.tail(rs->d) * (m * rf.col.tail(rs->d)))(0, 0);
        }
        p.parts[i] = IntervalPoint{std::clamp(a, -1.0, 1.0)};
      } else if (const auto* cs = std::get_if<ComplexSphere>(&f[i])) {
        const auto& cf = complex_f[i];
        std::complex<double> a = cf.row(0) * cf.col(0);
        const int n = cs->q - 1;
        const Eigen::MatrixXcd m = haar_unitary(n, rngs[i]);
        a += (cf.row.tail(n) * (m * cf.col.tail(n)))(0, 0);
        if (std::abs(a) > 1.0) a /= std::abs(a);
        p.parts[i] = DiscPoint{a};
      }
    }
    for (std::size_t j = 0; j < indices.size(); ++j) sums[j] += spherical_eval(pair, indices[j], p);
  }

  std::vector<double> out(indices.size());
  for (std::size_t j = 0; j < indices.size(); ++j) {
    const auto rhs = spherical_eval(pair, indices[j], px) * spherical_eval(pair, indices[j], py);
    out[j] = std::abs(sums[j] / static_cast<double>(mc_samples) - rhs);
  }
  return out;
}

inline double functional_equation_residual(const PairDescriptor& pair, const SphericalIndex& index,
                                           const SpherePoint& x, const SpherePoint& y,
                                           long long mc_samples, std::uint64_t seed) {
  return functional_equation_residuals(pair, {index}, x, y, mc_samples, seed).front();
}

// Norm of the sample mean of M v for M ~ Haar(O(d)) and a fixed unit vector v.
// Isotropy predicts O(1/sqrt(samples)).
inline double haar_isotropy_mean_norm(int d, long long samples, std::uint64_t seed) {
  if (d < 1 || samples < 1) throw parameter_error("haar_isotropy_mean_norm: bad arguments");
  splitmix64 rng(seed);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
  v(d - 1) = 1.0;
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(d);
  for (long long s = 0; s < samples; ++s) acc += haar_orthogonal(d, rng) * v;
  return (acc / static_cast<double>(samples)).norm();
}

// ---------------------------------------------------------------------------
// Gram checks on G/K × L

using PairKernel = std::function<std::complex<double>(const DoubleCosetPoint&, const GroupElement&)>;

// Kernel evaluation failed inside a PSD job; carries the sample to reproduce it.
class kernel_evaluation_error : public std::runtime_error {
public:
  kernel_evaluation_error(const std::string& what, int trial, std::uint64_t trial_seed, int row,
                          int col)
      : std::runtime_error(what), trial(trial), trial_seed(trial_seed), row(row), col(col) {}
  int trial;
  std::uint64_t trial_seed;
  int row;
  int col;
};

struct KernelMatrixJob {
  PairDescriptor pair = PairDescriptor::real_sphere(2);
  GroupDescriptor group = GroupDescriptor::trivial();
  // f(x⁻¹y, u⁻¹v) as a function of the double coset and the group difference.
  PairKernel kernel;
  int n_points = 30;
  int trials = 100;
  std::uint64_t seed = 0;
  SamplingBox box{};
  // Negative means the default psd_per_point * n_points.
  double tolerance = -1.0;
  // Optional samplers; default to the uniform measure on G/K and `box` on L.
  std::function<SpherePoint(splitmix64&)> sphere_sampler;
  std::function<GroupElement(splitmix64&)> group_sampler;
};

// Hermitian matrix [f(ξ_j⁻¹ξ_k, u_j⁻¹u_k)] for one point set.
inline cmatrix kernel_matrix(const KernelMatrixJob& job, const std::vector<SpherePoint>& xi,
                             const std::vector<GroupElement>& u) {
  const auto n = static_cast<Eigen::Index>(xi.size());
  cmatrix m(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = j; k < n; ++k) {
      const auto p = coset_between(job.pair, xi[static_cast<std::size_t>(j)], xi[static_cast<std::size_t>(k)]);
      const auto v = job.kernel(p, difference(job.group, u[static_cast<std::size_t>(j)], u[static_cast<std::size_t>(k)]));
      if (j == k) {
        m(j, j) = v.real();
      } else {
        m(j, k) = v;
        m(k, j) = std::conj(v);
      }
    }
  }
  return m;
}

inline GramReport kernel_psd_check(const KernelMatrixJob& job) {
  if (job.n_points < 2) throw parameter_error("kernel_psd_check: n_points must be >= 2");
  if (job.trials < 1) throw parameter_error("kernel_psd_check: trials must be >= 1");
  if (!job.kernel) throw usage_error("kernel_psd_check: no kernel");
  GramReport report;
  report.seed = job.seed;
  report.size = job.n_points;
  report.tolerance = job.tolerance >= 0 ? job.tolerance : tolerance::psd_per_point * job.n_points;

  std::vector<SpherePoint> xi(static_cast<std::size_t>(job.n_points));
  std::vector<GroupElement> u(static_cast<std::size_t>(job.n_points));
  for (int t = 0; t < job.trials; ++t) {
    const auto trial_seed = derive_seed(job.seed, static_cast<std::uint64_t>(t));
    splitmix64 rng(trial_seed);
    for (int j = 0; j < job.n_points; ++j) {
      xi[static_cast<std::size_t>(j)] =
          job.sphere_sampler ? job.sphere_sampler(rng) : random_sphere_point(job.pair, rng);
      u[static_cast<std::size_t>(j)] =
          job.group_sampler ? job.group_sampler(rng) : random_element(job.group, rng, job.box);
    }
    cmatrix m;
    try {
      m = kernel_matrix(job, xi, u);
    } catch (const std::exception& e) {
      throw kernel_evaluation_error(std::string("kernel evaluation failed: ") + e.what(), t,
                                    trial_seed, -1, -1);
    }
    report.record(t, trial_seed, min_eigen_hermitian(m));
  }
  return report;
}

// Job for the kernel synthesized from a spec.
inline KernelMatrixJob spec_job(const KernelSpec& spec, int n_points, int trials, std::uint64_t seed) {
  KernelMatrixJob job;
  job.pair = spec.pair();
  job.group = spec.group();
  job.kernel = [spec](const DoubleCosetPoint& p, const GroupElement& u) { return synthesize(spec, p, u); };
  job.n_points = n_points;
  job.trials = trials;
  job.seed = seed;
  return job;
}

// ---------------------------------------------------------------------------
// Kernel-valued coefficients on a finite set X = {0, ..., s-1}

struct CoefficientMatrix {
  SphericalIndex index;
  cmatrix matrix;
  double hermitian_defect = 0.0;
  double min_eigenvalue = 0.0;
  bool psd = true;
};

// M_φ[i][j] = δ(φ) ∫ f(x, i, j) conj φ(x) dω for every index. Each M_φ is
// tested for PSD-ness (after symmetrization) at `psd_tolerance`; a hermitian
// defect above 1e-10 also fails the test.
template <class F>
std::vector<CoefficientMatrix> kernel_coefficient_expand(const PairDescriptor& pair, F&& f, int s,
                                                         const std::vector<SphericalIndex>& indices,
                                                         const PairRule& rule,
                                                         double psd_tolerance = -1.0) {
  if (s < 1) throw parameter_error("kernel_coefficient_expand: s must be >= 1");
  check_rule(pair, rule);
  for (const auto& idx : indices) check_index(pair, idx);
  const double tol = psd_tolerance >= 0 ? psd_tolerance : tolerance::psd_per_point * s;

  const auto nodes = tensor_nodes(rule);
  const std::size_t nn = nodes.points.size();
  const auto ss = static_cast<std::size_t>(s);
  std::vector<std::vector<std::complex<double>>> fv(ss * ss, std::vector<std::complex<double>>(nn));
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < s; ++j) {
      for (std::size_t p = 0; p < nn; ++p) {
        fv[static_cast<std::size_t>(i) * ss + static_cast<std::size_t>(j)][p] =
            std::complex<double>(f(nodes.points[p], i, j));
      }
    }
  }

  std::vector<CoefficientMatrix> out;
  out.reserve(indices.size());
  for (const auto& idx : indices) {
    const double dim = static_cast<double>(dimension(pair, idx));
    std::vector<std::complex<double>> cphi(nn);
    for (std::size_t p = 0; p < nn; ++p) cphi[p] = std::conj(spherical_eval(pair, idx, nodes.points[p]));
    CoefficientMatrix cm{idx, cmatrix(s, s)};
    for (int i = 0; i < s; ++i) {
      for (int j = 0; j < s; ++j) {
        const auto& v = fv[static_cast<std::size_t>(i) * ss + static_cast<std::size_t>(j)];
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t p = 0; p < nn; ++p) acc += nodes.weights[p] * v[p] * cphi[p];
        cm.matrix(i, j) = dim * acc;
      }
    }
    cm.hermitian_defect = hermitian_defect(cm.matrix);
    const cmatrix sym = (cm.matrix + cm.matrix.adjoint()) / 2.0;
    cm.min_eigenvalue = min_eigen_hermitian(sym);
    cm.psd = cm.hermitian_defect <= 1e-10 && cm.min_eigenvalue >= -tol;
    out.push_back(std::move(cm));
  }
  return out;
}

struct ConvergenceViolation {
  SphericalIndex index;
  int row = 0;
  double value = 0.0;
  double bound = 0.0;
};

struct ConvergenceVerdict {
  bool ok = true;
  std::vector<ConvergenceViolation> violations;
};

// Checks M_φ[i][i] <= b(φ) + 1e-10 for every coefficient matrix and row.
template <class Bound>
ConvergenceVerdict uniform_convergence_check(const std::vector<CoefficientMatrix>& matrices,
                                             Bound&& b) {
  ConvergenceVerdict verdict;
  for (const auto& cm : matrices) {
    const double bound = b(cm.index);
    for (Eigen::Index i = 0; i < cm.matrix.rows(); ++i) {
      const double v = cm.matrix(i, i).real();
      if (v > bound + 1e-10) {
        verdict.ok = false;
        verdict.violations.push_back({cm.index, static_cast<int>(i), v, bound});
      }
    }
  }
  return verdict;
}

} // namespace gelfand
