#include <cmath>
#include <complex>
#include <numbers>

#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/special_functions/gegenbauer.hpp>
#include <boost/math/special_functions/jacobi.hpp>
#include <gtest/gtest.h>

#include <gelfand/special_functions.hpp>

using namespace gelfand;
using cd = std::complex<double>;

namespace {

// Boost's unnormalized families divided by their value at 1.
double oracle_gegenbauer(int n, int d, double x) {
  if (d == 1) return std::cos(n * std::acos(x));
  const double lambda = (d - 1) / 2.0;
  return boost::math::gegenbauer(static_cast<unsigned>(n), lambda, x) /
         boost::math::gegenbauer(static_cast<unsigned>(n), lambda, 1.0);
}

double oracle_jacobi(int k, double a, double b, double x) {
  return boost::math::jacobi(static_cast<unsigned>(k), a, b, x) /
         boost::math::jacobi(static_cast<unsigned>(k), a, b, 1.0);
}

cd oracle_disc(int m, int n, double alpha, cd z) {
  const double r = std::abs(z);
  const int lo = std::min(m, n);
  const int gap = std::abs(m - n);
  const cd ang = m >= n ? std::pow(z, gap) : std::pow(std::conj(z), gap);
  return ang * oracle_jacobi(lo, alpha, gap, 2 * r * r - 1);
}

} // namespace

TEST(Gegenbauer, ReferenceValues) {
  EXPECT_DOUBLE_EQ(gegenbauer_norm(0, 3, 0.7), 1.0);
  EXPECT_NEAR(gegenbauer_norm(1, 5, 0.25), 0.25, 1e-15);
  EXPECT_NEAR(gegenbauer_norm(2, 2, 0.5), -0.125, 1e-15);
}

TEST(Gegenbauer, MatchesBoostOracle) {
  for (int d : {1, 2, 3, 4, 5, 7, 10, 20}) {
    for (int n = 0; n <= 40; ++n) {
      for (double x : {-1.0, -0.93, -0.5, -0.1, 0.0, 0.33, 0.71, 0.999, 1.0}) {
        EXPECT_NEAR(gegenbauer_norm(n, d, x), oracle_gegenbauer(n, d, x), 1e-12)
            << "n=" << n << " d=" << d << " x=" << x;
      }
    }
  }
}

TEST(Gegenbauer, ClosedFormsUpToDegreeThree) {
  for (int d : {2, 3, 5, 9}) {
    const double l = (d - 1) / 2.0;
    for (double x = -1.0; x <= 1.0; x += 0.0625) {
      // C_2 = 2l(l+1)x^2 - l, C_3 = (4/3)l(l+1)(l+2)x^3 - 2l(l+1)x
      const double c2 = (2 * l * (l + 1) * x * x - l) / (2 * l * (l + 1) - l);
      const double c3 = (4.0 / 3 * l * (l + 1) * (l + 2) * x * x * x - 2 * l * (l + 1) * x) /
                        (4.0 / 3 * l * (l + 1) * (l + 2) - 2 * l * (l + 1));
      EXPECT_NEAR(gegenbauer_norm(1, d, x), x, 1e-12);
      EXPECT_NEAR(gegenbauer_norm(2, d, x), c2, 1e-12);
      EXPECT_NEAR(gegenbauer_norm(3, d, x), c3, 1e-12);
    }
  }
}

TEST(Gegenbauer, CircleIsChebyshev) {
  for (int n = 0; n <= 60; ++n) {
    for (double th = 0; th <= std::numbers::pi; th += 0.05) {
      EXPECT_NEAR(gegenbauer_norm(n, 1, std::cos(th)), std::cos(n * th), 1e-12);
    }
  }
}

TEST(Gegenbauer, ParityAndBound) {
  for (int d = 1; d <= 10; ++d) {
    for (int n = 0; n <= 30; ++n) {
      for (double x = 0; x <= 1.0; x += 0.03) {
        const double p = gegenbauer_norm(n, d, x);
        EXPECT_NEAR(gegenbauer_norm(n, d, -x), (n % 2 ? -p : p), 1e-13);
        EXPECT_LE(std::abs(p), 1.0 + 1e-13);
      }
    }
  }
}

TEST(Gegenbauer, HighDegreeStaysFinite) {
  for (int d : {2, 10, 50}) {
    const double v = gegenbauer_norm(400, d, 0.3);
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_LE(std::abs(v), 1.0);
    EXPECT_NEAR(gegenbauer_norm(400, d, 1.0), 1.0, 1e-12);
  }
}

TEST(Gegenbauer, AllDegreesAgreeWithSingle) {
  const auto all = gegenbauer_norm_all(25, 4, -0.37);
  ASSERT_EQ(all.size(), 26u);
  for (int n = 0; n <= 25; ++n) EXPECT_DOUBLE_EQ(all[static_cast<std::size_t>(n)], gegenbauer_norm(n, 4, -0.37));
}

TEST(Gegenbauer, Errors) {
  EXPECT_THROW(gegenbauer_norm(2, 3, 1.01), domain_error);
  EXPECT_THROW(gegenbauer_norm(-1, 3, 0.0), parameter_error);
  EXPECT_THROW(gegenbauer_norm(1, 0, 0.0), parameter_error);
  // nodes may sit a hair outside the interval
  EXPECT_NEAR(gegenbauer_norm(3, 2, 1.0 + 5e-13), 1.0, 1e-11);
}

TEST(Jacobi, ReferenceValues) {
  EXPECT_DOUBLE_EQ(jacobi_norm(0, 1.5, 0.0, -0.3), 1.0);
  EXPECT_NEAR(jacobi_norm(1, 0, 0, 0.5), 0.5, 1e-15);
  EXPECT_NEAR(jacobi_norm(2, 0, 0, 0.5), -0.125, 1e-15);
}

TEST(Jacobi, MatchesBoostOracle) {
  for (double a : {-0.5, 0.0, 0.5, 1.0, 3.0, 7.5}) {
    for (double b : {-0.5, 0.0, 1.0, 4.0}) {
      for (int k = 0; k <= 30; ++k) {
        for (double x : {-1.0, -0.6, 0.0, 0.2, 0.95, 1.0}) {
          const double ref = oracle_jacobi(k, a, b, x);
          EXPECT_NEAR(jacobi_norm(k, a, b, x), ref, 1e-12 * std::max(1.0, std::abs(ref)))
              << k << " " << a << " " << b << " " << x;
        }
      }
    }
  }
}

TEST(Jacobi, Errors) {
  EXPECT_THROW(jacobi_norm(1, -1.0, 0.0, 0.0), parameter_error);
  EXPECT_THROW(jacobi_norm(1, 0.0, -1.5, 0.0), parameter_error);
  EXPECT_THROW(jacobi_norm(1, 0.0, 0.0, -1.1), domain_error);
}

TEST(Disc, ReferenceValues) {
  EXPECT_NEAR(std::abs(disc_polynomial(3, 1, 0.0, 1.0) - cd(1.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(disc_polynomial(2, 0, 1.0, cd(0, 0.5)) - cd(-0.25)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(disc_polynomial(1, 1, 0.0, std::polar(0.6, std::numbers::pi / 3)) - cd(-0.28)), 0.0, 1e-15);
}

TEST(Disc, MatchesOracle) {
  for (double alpha : {0.0, 1.0, 2.0}) {
    for (int m = 0; m <= 6; ++m) {
      for (int n = 0; n <= 6; ++n) {
        for (cd z : {cd(0.3, -0.4), cd(-0.9, 0.1), cd(0, 0), std::polar(1.0, 2.0), cd(0.5, 0.5)}) {
          EXPECT_NEAR(std::abs(disc_polynomial(m, n, alpha, z) - oracle_disc(m, n, alpha, z)), 0.0, 1e-12);
        }
      }
    }
  }
}

TEST(Disc, SymmetriesAndBound) {
  for (int m = 0; m <= 8; ++m) {
    for (int n = 0; n <= 8; ++n) {
      for (double r = 0; r <= 1.0; r += 0.125) {
        for (double th = 0; th < 6.3; th += 0.7) {
          const cd z = std::polar(r, th);
          const cd v = disc_polynomial(m, n, 1.0, z);
          EXPECT_NEAR(std::abs(disc_polynomial(m, n, 1.0, std::conj(z)) - std::conj(v)), 0.0, 1e-13);
          EXPECT_LE(std::abs(v), 1.0 + 1e-13);
        }
        EXPECT_NEAR(std::abs(disc_polynomial(m, n, 0.5, r) - disc_polynomial(n, m, 0.5, r)), 0.0, 1e-13);
      }
    }
  }
}

TEST(Disc, Errors) {
  EXPECT_THROW(disc_polynomial(1, 0, 0.0, cd(1.0, 1e-3)), domain_error);
  EXPECT_THROW(disc_polynomial(-1, 0, 0.0, cd(0.1)), parameter_error);
  EXPECT_THROW(disc_polynomial(1, 0, -1.0, cd(0.1)), parameter_error);
  EXPECT_NO_THROW(disc_polynomial(1, 0, 0.0, cd(1.0 + 1e-13)));
}

TEST(Dimension, RealReferenceValues) {
  EXPECT_EQ(dimension_real(0, 7), 1u);
  EXPECT_EQ(dimension_real(1, 2), 3u);
  EXPECT_EQ(dimension_real(2, 2), 5u);
  // circle: cos and sin for every n >= 1
  for (int n = 1; n < 10; ++n) EXPECT_EQ(dimension_real(n, 1), 2u);
}

TEST(Dimension, RealAlternativeForm) {
  // (2n+d-1)(n+d-2)! / (n!(d-1)!) by exact integer products
  for (int d = 1; d <= 10; ++d) {
    for (int n = 0; n <= 30; ++n) {
      if (d == 1 && n == 0) {
        EXPECT_EQ(dimension_real(0, 1), 1u);
        continue;
      }
      // (n+d-2)!/n! cancels to the product n+1 .. n+d-2
      unsigned __int128 num = 2 * n + d - 1;
      for (int i = n + 1; i <= n + d - 2; ++i) num *= static_cast<unsigned>(i);
      unsigned __int128 den = d == 1 ? static_cast<unsigned>(n) : 1u;  // (n-1)!/n! = 1/n
      for (int i = 1; i <= d - 1; ++i) den *= static_cast<unsigned>(i);
      ASSERT_EQ(num % den, 0u);
      EXPECT_EQ(dimension_real(n, d), static_cast<std::uint64_t>(num / den)) << n << " " << d;
    }
  }
}

TEST(Dimension, ComplexReferenceValues) {
  EXPECT_EQ(dimension_complex(2, 0, 0), 1u);
  EXPECT_EQ(dimension_complex(2, 3, 2), 6u);
  // (m+n+q-1)/(q-1) * C(m+q-2, m) * C(n+q-2, n) = (4/2)*2*2 at q=3, m=n=1
  EXPECT_EQ(dimension_complex(3, 1, 1), 8u);
}

TEST(Dimension, ComplexMatchesFloatingFormula) {
  for (int q = 2; q <= 8; ++q) {
    for (int m = 0; m <= 12; ++m) {
      for (int n = 0; n <= 12; ++n) {
        const double ref = (m + n + q - 1.0) / (q - 1.0) * boost::math::binomial_coefficient<double>(m + q - 2, m) *
                           boost::math::binomial_coefficient<double>(n + q - 2, n);
        EXPECT_NEAR(static_cast<double>(dimension_complex(q, m, n)), ref, 1e-9 * ref);
      }
    }
  }
}

TEST(Dimension, ComplexIsRealWhenRealified) {
  // Ω_2q = S^{2q-1}; summing N(q;m,n) over m+n = k gives N_k(2q-1)
  for (int q = 2; q <= 5; ++q) {
    for (int k = 0; k <= 10; ++k) {
      std::uint64_t s = 0;
      for (int m = 0; m <= k; ++m) s += dimension_complex(q, m, k - m);
      EXPECT_EQ(s, dimension_real(k, 2 * q - 1));
    }
  }
}

TEST(Dimension, OverflowIsReported) {
  EXPECT_THROW(dimension_real(200000, 60), numeric_error);
  EXPECT_THROW(dimension_real(-1, 2), parameter_error);
  EXPECT_THROW(dimension_complex(1, 0, 0), parameter_error);
}

TEST(SphereSurface, Values) {
  EXPECT_NEAR(sphere_surface(1), 2 * std::numbers::pi, 1e-14);
  EXPECT_NEAR(sphere_surface(2), 4 * std::numbers::pi, 1e-14);
  EXPECT_NEAR(sphere_surface(3), 2 * std::numbers::pi * std::numbers::pi, 1e-13);
  EXPECT_NEAR(sphere_surface(0), 2.0, 1e-15);
  // σ_{d+2} = 2π σ_d / (d+1)
  for (int d = 1; d < 20; ++d) {
    EXPECT_NEAR(sphere_surface(d + 2), 2 * std::numbers::pi * sphere_surface(d) / (d + 1), 1e-12 * sphere_surface(d));
  }
}
