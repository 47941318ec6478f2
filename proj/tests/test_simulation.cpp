#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <gtest/gtest.h>

#include <gelfand/simulation.hpp>

using namespace gelfand;
using cd = std::complex<double>;

namespace {

const auto e1 = GroupDescriptor::euclidean(1);
const auto s2 = PairDescriptor::real_sphere(2);

KernelSpec s2_spec() {
  return KernelSpec(s2, e1,
                    {{SphericalIndex::real(0), PDFunction::gaussian(e1, 1.0)},
                     {SphericalIndex::real(1), PDFunction::scale(0.5, PDFunction::exponential(e1, 2.0))},
                     {SphericalIndex::real(2), PDFunction::scale(0.25, PDFunction::gaussian(e1, 0.5))}});
}

std::vector<FieldPoint> field_points(const PairDescriptor& pair, int n, std::uint64_t seed) {
  const auto xs = sample_sphere_points(pair, n, seed);
  std::vector<FieldPoint> pts;
  for (int i = 0; i < n; ++i) pts.push_back({xs[static_cast<std::size_t>(i)], GroupElement{{0.3 * i}}});
  return pts;
}

} // namespace

TEST(SpherePoints, UnitNorm) {
  for (const char* s : {"real:2", "real:7", "complex:3", "product:real:1,complex:2"}) {
    const auto pair = PairDescriptor::parse(s);
    for (const auto& p : sample_sphere_points(pair, 500, 4)) {
      for (const auto& part : p.parts) {
        if (const auto* r = std::get_if<Eigen::VectorXd>(&part)) {
          EXPECT_NEAR(r->norm(), 1.0, 1e-12);
        }
        if (const auto* c = std::get_if<Eigen::VectorXcd>(&part)) {
          EXPECT_NEAR(c->norm(), 1.0, 1e-12);
        }
      }
    }
  }
}

TEST(SpherePoints, MeanNearZero) {
  const auto pts = sample_sphere_points(s2, 100000, 11);
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& p : pts) mean += std::get<Eigen::VectorXd>(p.parts[0]);
  mean /= 100000.0;
  EXPECT_LE(mean.norm(), 0.02);
}

TEST(SpherePoints, FirstCoordinateUniformOnS2) {
  // on S^2 the height of a uniform point is uniform on [-1, 1]
  const auto pts = sample_sphere_points(s2, 100000, 12);
  std::vector<double> h;
  h.reserve(pts.size());
  for (const auto& p : pts) h.push_back(std::get<Eigen::VectorXd>(p.parts[0])(0));
  std::sort(h.begin(), h.end());
  double ks = 0;
  const double n = static_cast<double>(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double cdf = (h[i] + 1) / 2;
    ks = std::max({ks, std::abs(cdf - i / n), std::abs(cdf - (i + 1) / n)});
  }
  EXPECT_LE(ks, 0.01);
}

TEST(SpherePoints, Reproducible) {
  const auto a = sample_sphere_points(PairDescriptor::complex_sphere(3), 10, 99);
  const auto b = sample_sphere_points(PairDescriptor::complex_sphere(3), 10, 99);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(std::get<Eigen::VectorXcd>(a[i].parts[0]), std::get<Eigen::VectorXcd>(b[i].parts[0]));
  }
  EXPECT_THROW(sample_sphere_points(s2, 0, 1), parameter_error);
}

TEST(Covariance, MatchesSynthesis) {
  const auto spec = s2_spec();
  const auto pts = field_points(s2, 6, 3);
  const auto c = field_covariance(spec, pts);
  EXPECT_TRUE(c == c.adjoint());
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      const auto& a = pts[static_cast<std::size_t>(i)];
      const auto& b = pts[static_cast<std::size_t>(j)];
      const auto p = coset_between(s2, a.xi, b.xi);
      const auto u = difference(e1, a.u, b.u);
      EXPECT_NEAR(std::abs(c(i, j) - synthesize(spec, p, u)), 0.0, 1e-14);
    }
  }
}

TEST(Sample, ConstantKernelGivesEqualValues) {
  const auto g = GroupDescriptor::trivial();
  const KernelSpec spec(s2, g, {{SphericalIndex::real(0), PDFunction::constant(g, 1.0)}});
  const auto x = sample_sphere_points(s2, 1, 1)[0];
  const std::vector<FieldPoint> pts(3, FieldPoint{x, GroupElement{}});
  const auto s = sample_field(spec, pts, 7);
  EXPECT_FALSE(s.complex_valued);
  EXPECT_EQ(s.jitter_used, 0.0);
  EXPECT_EQ(s.values[0], s.values[1]);
  EXPECT_EQ(s.values[0], s.values[2]);
}

TEST(Sample, ConstantKernelAtDistinctPoints) {
  const auto g = GroupDescriptor::trivial();
  const KernelSpec spec(s2, g, {{SphericalIndex::real(0), PDFunction::constant(g, 2.0)}});
  std::vector<FieldPoint> pts;
  for (const auto& p : sample_sphere_points(s2, 3, 1)) pts.push_back({p, GroupElement{}});
  const auto s = sample_field(spec, pts, 7);
  const double slack = 10 * std::sqrt(s.jitter_used) + 1e-14;
  EXPECT_NEAR(std::abs(s.values[0] - s.values[1]), 0.0, slack);
  EXPECT_NEAR(std::abs(s.values[0] - s.values[2]), 0.0, slack);
}

TEST(Sample, DistantLagsDecorrelate) {
  const KernelSpec spec(s2, e1, {{SphericalIndex::real(0), PDFunction::gaussian(e1, 1.0)}});
  const auto x = sample_sphere_points(s2, 1, 2)[0];
  const std::vector<FieldPoint> pts{{x, GroupElement{{0.0}}}, {x, GroupElement{{10.0}}}};
  double sab = 0, saa = 0, sbb = 0;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    const auto s = sample_field(spec, pts, seed);
    const double a = s.values[0].real(), b = s.values[1].real();
    sab += a * b;
    saa += a * a;
    sbb += b * b;
  }
  EXPECT_LE(std::abs(sab / std::sqrt(saa * sbb)), 0.05);
}

TEST(Sample, EmpiricalCovariance) {
  const auto spec = s2_spec();
  const auto pts = field_points(s2, 5, 21);
  const auto c = field_covariance(spec, pts);
  const int draws = 100000;
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(5, 5);
  for (int k = 0; k < draws; ++k) {
    const auto s = sample_field(spec, pts, 1000 + static_cast<std::uint64_t>(k));
    Eigen::VectorXd v(5);
    for (int i = 0; i < 5; ++i) v(i) = s.values[static_cast<std::size_t>(i)].real();
    acc += v * v.transpose();
  }
  acc /= draws;
  const double scale = c.cwiseAbs().maxCoeff();
  EXPECT_LE((acc - c.real()).cwiseAbs().maxCoeff(), 5.0 / std::sqrt(double(draws)) * scale);
}

TEST(Sample, ComplexField) {
  const auto pair = PairDescriptor::complex_sphere(2);
  const auto z1 = GroupDescriptor::integers(1);
  const KernelSpec spec(pair, z1,
                        {{SphericalIndex::complex(0, 0), PDFunction::exponential(z1, 0.5)},
                         {SphericalIndex::complex(1, 0), PDFunction::scale(0.5, PDFunction::gaussian(z1, 0.3))}});
  const auto x = sample_sphere_points(pair, 4, 5);
  std::vector<FieldPoint> pts;
  for (int i = 0; i < 4; ++i) pts.push_back({x[static_cast<std::size_t>(i)], GroupElement{{double(i)}}});
  const auto c = field_covariance(spec, pts);
  const auto s = sample_field(spec, pts, 3);
  EXPECT_TRUE(s.complex_valued);

  // E[v vᴴ] = C for circular complex fields
  const int draws = 40000;
  cmatrix acc = cmatrix::Zero(4, 4);
  for (int k = 0; k < draws; ++k) {
    const auto t = sample_field(spec, pts, static_cast<std::uint64_t>(k));
    Eigen::VectorXcd v(4);
    for (int i = 0; i < 4; ++i) v(i) = t.values[static_cast<std::size_t>(i)];
    acc += v * v.adjoint();
  }
  acc /= draws;
  EXPECT_LE((acc - c).cwiseAbs().maxCoeff(), 5.0 / std::sqrt(double(draws)) * c.cwiseAbs().maxCoeff());
}

TEST(Sample, Reproducible) {
  const auto spec = s2_spec();
  const auto pts = field_points(s2, 8, 6);
  const auto a = sample_field(spec, pts, 42);
  const auto b = sample_field(spec, pts, 42);
  const auto c = sample_field(spec, pts, 43);
  EXPECT_EQ(a.values, b.values);
  EXPECT_NE(a.values, c.values);
  EXPECT_EQ(a.seed, 42u);
  EXPECT_FALSE(a.generator.empty());
}

TEST(Sample, JitterOnlyWhenNeeded) {
  // rank-one covariance at repeated points still factors
  const auto g = GroupDescriptor::trivial();
  const KernelSpec spec(s2, g, {{SphericalIndex::real(1), PDFunction::constant(g, 1.0)}});
  const auto x = sample_sphere_points(s2, 1, 3)[0];
  const std::vector<FieldPoint> pts(4, FieldPoint{x, GroupElement{}});
  const auto s = sample_field(spec, pts, 1);
  EXPECT_LE(s.jitter_used, 1e-9);
  for (const auto& v : s.values) EXPECT_NEAR(std::abs(v - s.values[0]), 0.0, 1e-4);
}

TEST(Factor, JitterForSlightlyNegativePivots) {
  // eigenvalues 2 and -1e-11: within budget, needs the jitter
  cmatrix c(2, 2);
  const double e = -1e-11;
  c << (2 + e) / 2, (2 - e) / 2, (2 - e) / 2, (2 + e) / 2;
  const auto f = factor_covariance(c);
  EXPECT_GT(f.jitter, 0.0);
  EXPECT_LE((f.factor * f.factor.adjoint() - c).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Factor, RefusesIndefinite) {
  cmatrix c(2, 2);
  c << 1.0, 2.0, 2.0, 1.0;
  try {
    factor_covariance(c);
    FAIL();
  } catch (const indefinite_kernel_error& e) {
    EXPECT_NEAR(e.report.min_eigenvalue, -1.0, 1e-12);
    EXPECT_FALSE(e.report.pass);
    EXPECT_EQ(e.report.size, 2);
  }
}

TEST(Factor, ReconstructsCovariance) {
  const auto c = field_covariance(s2_spec(), field_points(s2, 10, 8));
  const auto f = factor_covariance(c);
  EXPECT_LE((f.factor * f.factor.adjoint() - c).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Sample, Errors) {
  EXPECT_THROW(sample_field(s2_spec(), {}, 1), parameter_error);
  const auto x = sample_sphere_points(s2, 1, 3)[0];
  EXPECT_THROW(sample_field(s2_spec(), {{x, GroupElement{{0.0, 1.0}}}}, 1), usage_error);
}
