#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "sigma0/hankel.hpp"
#include "sigma0/symbols.hpp"

using namespace sigma0;

TEST(Cayley, ZeroSymbol) {
  const SymbolFunction zero("zero", [](double) { return 0.0; }, {0.0, 2.0});
  for (cplx v : cayley_transfer(zero, 8).samples) EXPECT_EQ(v, cplx(0.0));
}

TEST(Cayley, PointAtOriginAndInfinity) {
  const auto cs = cayley_transfer(symbols::poisson(), 7);
  ASSERT_EQ(cs.size(), 128u);
  EXPECT_NEAR(cs.samples[64].real(), 1.0, 1e-15);  // theta = pi  <->  x = 0
  EXPECT_EQ(cs.samples[0], cplx(0.0));           // theta = 0   <->  x = infinity
  for (cplx v : cs.samples) EXPECT_EQ(v.imag(), 0.0);
}

TEST(Cayley, GridExponentRange) {
  EXPECT_THROW(cayley_transfer(symbols::poisson(), 5), Error);
  EXPECT_THROW(cayley_transfer(symbols::poisson(), 17), Error);
}

TEST(Cayley, PoissonCoefficientsAreExact) {
  // psi(w) = -1/(4w) + 1/2 - w/4
  const auto c = fourier_coefficients(cayley_transfer(symbols::poisson(), 8));
  EXPECT_NEAR(std::abs(c[0] - 0.5), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(c[1] + 0.25), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(c[255] + 0.25), 0.0, 1e-15);
  for (std::size_t n = 2; n < 255; ++n) EXPECT_LE(std::abs(c[n]), 1e-15);
}

TEST(SingularValues, RankOnePoisson) {
  const auto hs = singular_values(symbols::poisson(), 512);
  EXPECT_NEAR(hs[0], 0.25, 1e-12);
  EXPECT_LE(hs[1], 1e-8);
  EXPECT_EQ(hs.truncation, 512);
  EXPECT_LE(hs.tail_bound, 1e-8);
  for (std::size_t i = 1; i < hs.singular_values.size(); ++i) EXPECT_LE(hs[i], hs[i - 1]);
}

TEST(SingularValues, ZeroSymbol) {
  const SymbolFunction zero("zero", [](double) { return 0.0; }, {0.0, 2.0});
  const auto hs = singular_values(zero, 64);
  for (double v : hs.singular_values) EXPECT_EQ(v, 0.0);
}

TEST(SingularValues, LinearInScale) {
  EXPECT_NEAR(singular_values(symbols::poisson(1.0, 2.0), 128)[0], 0.5, 1e-12);
  const auto g = singular_values(symbols::gaussian(), 256);
  const SymbolFunction scaled("3g", [](double x) { return -3.0 * std::exp(-x * x); }, {12.0, 2.0});
  const auto g3 = singular_values(scaled, 256);
  for (std::size_t i = 0; i < 10; ++i) EXPECT_NEAR(g3[i], 3.0 * g[i], 1e-8);
}

TEST(SingularValues, RationalSymbolHasFiniteRankAndFastDecay) {
  const auto hs = singular_values(symbols::rational({1.0}, {1.0, 0.0, 0.0, 0.0, 1.0}), 128);
  EXPECT_GT(hs[0], 0.1);
  EXPECT_GT(hs[1], 1e-3);
  EXPECT_LT(hs[19] / hs[0], 1e-6);
  EXPECT_LT(hs[2], 1e-12);  // 1/(1+x^4) has two poles in each half-plane: rank two
}

TEST(SingularValues, DilationInvariance) {
  for (const auto& phi : {symbols::poisson(), symbols::gaussian(), symbols::rational({1.0}, {1.0, 0.0, 0.0, 0.0, 1.0})}) {
    const auto base = singular_values(phi, 512);
    for (double d : {0.5, 2.0}) {
      const auto hs = singular_values(dilate_symbol(phi, d), 512);
      for (std::size_t i = 0; i < 10; ++i) EXPECT_NEAR(hs[i], base[i], 1e-6) << phi.label() << " delta=" << d << " i=" << i;
    }
  }
}

TEST(SingularValues, MonotoneUnderTruncationOnFixedGrid) {
  const auto cs = cayley_transfer(symbols::gaussian(0.6), 12);
  for (Index m : {16, 64, 256}) {
    const auto small = matrix_singular_values(hankel_matrix(cs, m));
    const auto large = matrix_singular_values(hankel_matrix(cs, 2 * m));
    for (std::size_t i = 0; i < small.size(); ++i) EXPECT_LE(small[i], large[i] + 1e-9);
  }
}

TEST(SingularValues, ConvergenceFailureAsksForLargerM) {
  // A kink at the origin gives slowly decaying coefficients: M = 8 is far from converged.
  const SymbolFunction tent("tent", [](double x) { return std::max(0.0, 1.0 - std::abs(x)); }, {2.0, 2.0});
  try {
    singular_values(tent, 8);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::increase_m);
    EXPECT_NE(std::string(e.what()).find("2M:"), std::string::npos);
  }
}

TEST(SingularValues, TruncationMustFitGrid) {
  HankelOptions opts;
  opts.p = 8;
  EXPECT_THROW(singular_values(symbols::poisson(), 128, opts), Error);
  EXPECT_NO_THROW(singular_values(symbols::poisson(), 32, opts));
}

TEST(RankOneOracle, DilationFamily) {
  for (double a : {1.0, 2.0, 0.5}) {
    const auto exact = rank_one_oracle(a);
    ASSERT_EQ(exact.singular_values.size(), 1u);
    EXPECT_EQ(exact.singular_values[0], 0.25);
    EXPECT_TRUE(exact.analytic);
    const auto numeric = singular_values(symbols::poisson(a), 256);
    EXPECT_NEAR(numeric[0], exact[0], 1e-10) << a;
    EXPECT_LE(numeric[1], 1e-8);
  }
  EXPECT_THROW(rank_one_oracle(0.0), Error);
}
