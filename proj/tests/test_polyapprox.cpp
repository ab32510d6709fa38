#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "thermo/polyapprox.hpp"

using namespace thermo;

namespace {

Eigen::MatrixXcd random_hermitian(int n, std::uint64_t seed, double radius) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXcd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = {g(rng), g(rng)};
  m = (m + m.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  return m * (radius / es.eigenvalues().cwiseAbs().maxCoeff());
}

}  // namespace

TEST(Sqrt, KnownValues) {
  const auto p = sqrt_poly(1e-4);
  EXPECT_NEAR(evaluate(p, 0.0), 1.0, 1e-4);
  EXPECT_NEAR(evaluate(p, -1.0), std::sqrt(0.5), 1e-4);
  EXPECT_NEAR(evaluate(p, 1.0), std::sqrt(1.5), 1e-4);
}

TEST(Sqrt, CertifiedOnDenseGrid) {
  for (double eps : {1e-2, 1e-4, 1e-6}) {
    const auto p = sqrt_poly(eps);
    EXPECT_LE(grid_error(p, 10001), eps) << eps;
    EXPECT_LE(p.degree(), sqrt_degree_bound(eps)) << eps;
  }
}

TEST(Sqrt, RejectsOutOfRangeEps) {
  EXPECT_THROW(sqrt_poly(0.0), InvalidArgument);
  EXPECT_THROW(sqrt_poly(0.75), InvalidArgument);
}

TEST(Gaussian, KnownValues) {
  const auto p = gaussian_poly(1.0, 1e-6);
  EXPECT_NEAR(evaluate(p, 0.0), 1.0, 1e-6);
  EXPECT_NEAR(evaluate(p, 1.0), std::exp(-std::numbers::pi / 2.0), 1e-6);
  EXPECT_NEAR(evaluate(p, 1.0), 0.20787957635076193, 1e-6);
  EXPECT_NEAR(evaluate(p, -0.5), evaluate(p, 0.5), 1e-14);
}

TEST(Gaussian, CertifiedOnDenseGrid) {
  for (double w : {1.0, 0.5, 0.25})
    for (double eps : {1e-2, 1e-3, 1e-4}) {
      const auto p = gaussian_poly(w, eps);
      EXPECT_LE(grid_error(p, 10001), eps) << w << " " << eps;
      EXPECT_LE(p.degree(), gaussian_degree_bound(w, eps)) << w << " " << eps;
      EXPECT_EQ(p.degree() % 2, 0);
    }
}

TEST(Rescale, SupOneHalves) {
  const auto t1 = rescale_half(from_chebyshev({0.0, 1.0}));
  EXPECT_NEAR(t1.scale, 0.5, 1e-15);
  EXPECT_NEAR(evaluate(t1, 1.0), 0.5, 1e-15);
  EXPECT_NEAR(sup_norm(t1), 0.5, 1e-12);
}

TEST(Rescale, SqrtGetsQuarter) {
  const auto p = rescale_half(sqrt_poly(1e-4));
  EXPECT_NEAR(p.scale, 0.25, 1e-15);
  EXPECT_LE(sup_norm(p), 0.5);
  EXPECT_NEAR(evaluate(p, 0.0), 0.25, 0.25e-4);
  const auto back = unscale(p);
  EXPECT_NEAR(back.scale, 1.0, 1e-15);
  EXPECT_NEAR(evaluate(back, 0.3), evaluate(sqrt_poly(1e-4), 0.3), 1e-14);
}

TEST(Reflect, MirrorsArgument) {
  const auto p = sqrt_poly(1e-4);
  const auto r = reflect(p);
  EXPECT_TRUE(r.reflected);
  for (double x : {-0.9, -0.1, 0.4, 1.0}) EXPECT_NEAR(evaluate(r, x), evaluate(p, -x), 1e-14);
  EXPECT_NEAR(evaluate(r, 0.5), std::sqrt(1.0 - 0.25), 1e-4);
}

TEST(Monomial, MatchesChebyshevEvaluation) {
  const auto p = gaussian_poly(0.5, 1e-3);
  const auto c = monomial_coefficients(p);
  for (double x : {-1.0, -0.3, 0.0, 0.6, 1.0}) {
    double v = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) v = v * x + c[k];
    EXPECT_NEAR(v, evaluate(p, x), 1e-9) << x;
  }
}

TEST(MatrixApply, ConstantGivesIdentity) {
  const auto m = random_hermitian(5, 1, 0.9);
  const auto out = matrix_apply(from_chebyshev({1.0}), m);
  EXPECT_LT((out - Eigen::MatrixXcd::Identity(5, 5)).norm(), 1e-14);
}

TEST(MatrixApply, SqrtOnDiagonal) {
  const auto p = sqrt_poly(1e-4);
  const Eigen::MatrixXcd d = Eigen::Vector3cd(-1.0, 0.0, 1.0).asDiagonal();
  const auto out = matrix_apply(p, d);
  EXPECT_NEAR(out(0, 0).real(), std::sqrt(0.5), 1e-4);
  EXPECT_NEAR(out(1, 1).real(), 1.0, 1e-4);
  EXPECT_NEAR(out(2, 2).real(), std::sqrt(1.5), 1e-4);
  EXPECT_LT(std::abs(out(0, 1)), 1e-15);
}

TEST(MatrixApply, RecurrenceMatchesEigenOracle) {
  for (std::uint64_t seed : {3u, 4u, 5u}) {
    const auto m = random_hermitian(8, seed, 1.0);
    for (const auto& p : {sqrt_poly(1e-6), gaussian_poly(0.25, 1e-4)})
      EXPECT_LE((matrix_apply_chebyshev(p, m) - matrix_apply_eigen(p, m)).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(MatrixApply, RejectsWideSpectrum) {
  EXPECT_THROW(matrix_apply(sqrt_poly(1e-2), random_hermitian(4, 9, 1.3)), SpectrumOutOfRange);
}

TEST(Export, TextFormatCarriesCoefficients) {
  const auto p = rescale_half(gaussian_poly(0.5, 1e-3));
  std::stringstream out;
  write_polynomial(p, out);
  std::string head;
  std::getline(out, head);
  EXPECT_EQ(head, "polynomial chebyshev");
  EXPECT_NE(out.str().find("scale"), std::string::npos);
}
