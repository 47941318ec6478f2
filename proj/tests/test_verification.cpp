#include <cmath>
#include <complex>

#include <gtest/gtest.h>

#include <gelfand/verification.hpp>

using namespace gelfand;
using cd = std::complex<double>;

namespace {

double t_of(const DoubleCosetPoint& p) { return std::get<IntervalPoint>(p.parts[0]).t; }

} // namespace

TEST(Orthogonality, ReferenceResiduals) {
  const auto r2 = PairDescriptor::real_sphere(2);
  EXPECT_LE(orthogonality_residual(r2, SphericalIndex::real(2), SphericalIndex::real(2), PairRule{{sphere_rule(16, 2)}}),
            1e-12);
  const auto r3 = PairDescriptor::real_sphere(3);
  EXPECT_LE(orthogonality_residual(r3, SphericalIndex::real(1), SphericalIndex::real(4), PairRule{{sphere_rule(16, 3)}}),
            1e-12);
  const auto c2 = PairDescriptor::complex_sphere(2);
  EXPECT_LE(orthogonality_residual(c2, SphericalIndex::complex(1, 0), SphericalIndex::complex(0, 1), default_rule(c2, 2)),
            1e-12);
}

TEST(Orthogonality, DetectsInsufficientRule) {
  // order 3 integrates degree <= 5 only; c_4^2 has degree 8
  const auto r2 = PairDescriptor::real_sphere(2);
  EXPECT_GT(orthogonality_residual(r2, SphericalIndex::real(4), SphericalIndex::real(4), PairRule{{sphere_rule(3, 2)}}),
            1e-3);
}

TEST(Homogeneous, HaarMatricesAreOrthogonal) {
  splitmix64 rng(1);
  for (int n : {1, 2, 3, 6}) {
    const auto m = haar_orthogonal(n, rng);
    EXPECT_LE((m.transpose() * m - Eigen::MatrixXd::Identity(n, n)).norm(), 1e-13);
    const auto u = haar_unitary(n, rng);
    EXPECT_LE((u.adjoint() * u - Eigen::MatrixXcd::Identity(n, n)).norm(), 1e-13);
  }
}

TEST(Homogeneous, CompletionHasGivenFirstColumn) {
  splitmix64 rng(2);
  for (int n : {2, 3, 7}) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = rng.normal();
    v.normalize();
    const auto a = completion(v);
    EXPECT_LE((a.col(0) - v).norm(), 1e-14);
    EXPECT_LE((a.transpose() * a - Eigen::MatrixXd::Identity(n, n)).norm(), 1e-13);

    Eigen::VectorXcd w(n);
    for (int i = 0; i < n; ++i) w(i) = cd(rng.normal(), rng.normal());
    w.normalize();
    const auto b = completion(w);
    EXPECT_LE((b.col(0) - w).norm(), 1e-14);
    EXPECT_LE((b.adjoint() * b - Eigen::MatrixXcd::Identity(n, n)).norm(), 1e-13);
  }
}

TEST(Homogeneous, CosetBetweenIsInnerProduct) {
  const auto pair = PairDescriptor::parse("product:real:3,complex:2");
  splitmix64 rng(3);
  for (int i = 0; i < 20; ++i) {
    const auto a = random_sphere_point(pair, rng);
    const auto b = random_sphere_point(pair, rng);
    const auto p = coset_between(pair, a, b);
    const auto& ra = std::get<Eigen::VectorXd>(a.parts[0]);
    const auto& rb = std::get<Eigen::VectorXd>(b.parts[0]);
    EXPECT_NEAR(std::get<IntervalPoint>(p.parts[0]).t, ra.dot(rb), 1e-15);
    const auto& ca = std::get<Eigen::VectorXcd>(a.parts[1]);
    const auto& cb = std::get<Eigen::VectorXcd>(b.parts[1]);
    // <η, ξ> = Σ η_i conj(ξ_i)
    cd z = 0;
    for (Eigen::Index k = 0; k < ca.size(); ++k) z += cb(k) * std::conj(ca(k));
    EXPECT_NEAR(std::abs(std::get<DiscPoint>(p.parts[1]).z - z), 0.0, 1e-15);
  }
}

TEST(Homogeneous, HaarIsotropy) {
  for (int d : {2, 3, 5}) {
    const long long n = 20000;
    EXPECT_LE(haar_isotropy_mean_norm(d, n, 100 + d), 4.0 / std::sqrt(static_cast<double>(n))) << d;
  }
}

TEST(FunctionalEquation, TorusIsExact) {
  const auto pair = PairDescriptor::torus(2);
  splitmix64 rng(4);
  const auto x = random_sphere_point(pair, rng);
  const auto y = random_sphere_point(pair, rng);
  EXPECT_EQ(functional_equation_residual(pair, SphericalIndex::torus({2, -1}), x, y, 10, 1), 0.0);
}

TEST(FunctionalEquation, RealSphereMonteCarlo) {
  const auto pair = PairDescriptor::real_sphere(2);
  splitmix64 rng(5);
  const auto x = random_sphere_point(pair, rng);
  const auto y = random_sphere_point(pair, rng);
  EXPECT_LE(functional_equation_residual(pair, SphericalIndex::real(2), x, y, 1000000, 6), 5e-3);
}

TEST(FunctionalEquation, ComplexAndProductPairs) {
  for (const char* s : {"complex:2", "complex:3", "product:real:2,complex:2"}) {
    const auto pair = PairDescriptor::parse(s);
    splitmix64 rng(9);
    const auto x = random_sphere_point(pair, rng);
    const auto y = random_sphere_point(pair, rng);
    const auto idx = enumerate_indices(pair, 2);
    const auto res = functional_equation_residuals(pair, idx, x, y, 100000, 10);
    for (std::size_t i = 0; i < idx.size(); ++i) EXPECT_LE(res[i], 2e-2) << s << " " << idx[i].to_string();
  }
}

TEST(FunctionalEquation, HandPickedPoints) {
  const auto pair = PairDescriptor::real_sphere(2);
  Eigen::VectorXd a(3), b(3);
  a << 0.6, 0.8, 0.0;
  b << 0.0, 0.6, 0.8;
  const SpherePoint x{{a}}, y{{b}};
  for (int n = 0; n <= 4; ++n) {
    EXPECT_LE(functional_equation_residual(pair, SphericalIndex::real(n), x, y, 200000, 3), 1e-2) << n;
  }
}

TEST(KernelPsd, SpecWithCertifiedCoefficientsPasses) {
  const auto e1 = GroupDescriptor::euclidean(1);
  const KernelSpec spec(PairDescriptor::real_sphere(2), e1,
                        {{SphericalIndex::real(0), PDFunction::gaussian(e1, 1.0)},
                         {SphericalIndex::real(1), PDFunction::scale(0.5, PDFunction::exponential(e1, 0.5))},
                         {SphericalIndex::real(3), PDFunction::scale(0.3, PDFunction::cosine(e1, {2.0}))}});
  const auto r = kernel_psd_check(spec_job(spec, 30, 50, 17));
  EXPECT_TRUE(r.pass) << r.min_eigenvalue;
  EXPECT_EQ(r.trials, 50);
  EXPECT_DOUBLE_EQ(r.tolerance, 30e-9);
}

TEST(KernelPsd, FirstSphericalFunctionIsPsd) {
  KernelMatrixJob job;
  job.pair = PairDescriptor::real_sphere(2);
  job.group = GroupDescriptor::trivial();
  job.kernel = [](const DoubleCosetPoint& p, const GroupElement&) { return cd(t_of(p)); };
  job.trials = 30;
  job.seed = 5;
  const auto r = kernel_psd_check(job);
  EXPECT_TRUE(r.pass);
  EXPECT_GE(r.min_eigenvalue, -1e-10);
}

TEST(KernelPsd, NegativeCoefficientIsCaught) {
  KernelMatrixJob job;
  job.pair = PairDescriptor::real_sphere(2);
  job.group = GroupDescriptor::trivial();
  job.kernel = [](const DoubleCosetPoint& p, const GroupElement&) {
    return cd(gegenbauer_norm(2, 2, t_of(p)) - 0.5 * gegenbauer_norm(1, 2, t_of(p)));
  };
  job.trials = 100;
  job.seed = 8;
  const auto r = kernel_psd_check(job);
  EXPECT_FALSE(r.pass);
  EXPECT_LT(r.min_eigenvalue, -1e-3);
  EXPECT_NE(r.worst_trial_seed, 0u);
}

TEST(KernelPsd, EvaluationErrorsCarryTheTrial) {
  KernelMatrixJob job;
  job.kernel = [](const DoubleCosetPoint&, const GroupElement&) -> cd { throw std::runtime_error("boom"); };
  job.trials = 2;
  try {
    kernel_psd_check(job);
    FAIL();
  } catch (const kernel_evaluation_error& e) {
    EXPECT_EQ(e.trial, 0);
  }
}

TEST(KernelCoefficients, IsolatesSingleTerm) {
  const auto pair = PairDescriptor::real_sphere(2);
  Eigen::Matrix2d g;
  g << 2.0, 0.5, 0.5, 1.0;
  auto f = [&](const DoubleCosetPoint& p, int i, int j) { return g(i, j) * t_of(p); };
  const auto idx = enumerate_indices(pair, 3);
  const auto ms = kernel_coefficient_expand(pair, f, 2, idx, default_rule(pair, 3));
  for (const auto& cm : ms) {
    const double target_scale = cm.index == SphericalIndex::real(1) ? 1.0 : 0.0;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) EXPECT_NEAR(std::abs(cm.matrix(i, j) - target_scale * g(i, j)), 0.0, 1e-10);
    }
    EXPECT_TRUE(cm.psd);
  }
}

TEST(KernelCoefficients, ConstantGivesAllOnes) {
  const auto pair = PairDescriptor::complex_sphere(2);
  auto f = [](const DoubleCosetPoint&, int, int) { return 1.0; };
  const auto ms = kernel_coefficient_expand(pair, f, 3, {SphericalIndex::complex(0, 0)}, default_rule(pair, 1));
  ASSERT_EQ(ms.size(), 1u);
  EXPECT_LE((ms[0].matrix - cmatrix::Ones(3, 3)).norm(), 1e-12);
  EXPECT_TRUE(ms[0].psd);
}

TEST(KernelCoefficients, IndefiniteMatrixFlagged) {
  const auto pair = PairDescriptor::real_sphere(3);
  Eigen::Matrix2d bad;
  bad << 1.0, 2.0, 2.0, 1.0;
  auto f = [&](const DoubleCosetPoint& p, int i, int j) { return bad(i, j) * gegenbauer_norm(2, 3, t_of(p)); };
  const auto ms = kernel_coefficient_expand(pair, f, 2, {SphericalIndex::real(2)}, default_rule(pair, 2));
  EXPECT_FALSE(ms[0].psd);
  EXPECT_NEAR(ms[0].min_eigenvalue, -1.0, 1e-10);
}

TEST(UniformConvergence, Verdicts) {
  const auto pair = PairDescriptor::real_sphere(2);
  auto f = [](const DoubleCosetPoint& p, int i, int j) {
    return (i == j ? 1.0 : 0.3) * (0.5 + 0.25 * t_of(p));
  };
  const auto ms = kernel_coefficient_expand(pair, f, 2, enumerate_indices(pair, 2), default_rule(pair, 2));
  EXPECT_TRUE(uniform_convergence_check(ms, [](const SphericalIndex&) { return 1.0; }).ok);

  auto self = [&](const SphericalIndex& idx) {
    for (const auto& cm : ms) {
      if (cm.index == idx) return std::max(cm.matrix(0, 0).real(), cm.matrix(1, 1).real());
    }
    return 0.0;
  };
  EXPECT_TRUE(uniform_convergence_check(ms, self).ok);

  const auto v = uniform_convergence_check(ms, [](const SphericalIndex& idx) {
    return idx == SphericalIndex::real(0) ? 0.4 : 1.0;
  });
  EXPECT_FALSE(v.ok);
  ASSERT_EQ(v.violations.size(), 2u);
  EXPECT_EQ(v.violations[0].index, SphericalIndex::real(0));
  EXPECT_EQ(v.violations[0].row, 0);
  EXPECT_NEAR(v.violations[0].value, 0.5, 1e-12);
}
