#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "thermo/corpus.hpp"
#include "thermo/harness.hpp"
#include "thermo/qsim.hpp"

using namespace thermo;

namespace {

Eigen::MatrixXcd random_hermitian(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXcd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = {g(rng), g(rng)};
  return (m + m.adjoint()) / 2.0;
}

double op_norm(const Eigen::MatrixXcd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues()(0);
}

LTAResult run_lta(const FSRelaxInstance& inst, double eps, std::int64_t shots, std::uint64_t seed) {
  LTAOptions o;
  o.eps = eps;
  o.d = inst.basis.d();
  o.N = inst.N;
  o.promise_gap = inst.gap.min_gap;
  o.shots = shots;
  o.seed = seed;
  return estimate_long_time_average(inst.heff.matrix, inst.observable(), inst.initial_state(), o);
}

}  // namespace

TEST(BlockEncoding, ZeroAndIdentity) {
  const auto z = block_encode_exact(Eigen::MatrixXcd::Zero(3, 3), 1.0);
  EXPECT_LT(encoded_block(z).norm(), 1e-15);
  EXPECT_LT(unitarity_error(z), 1e-14);
  const auto id = block_encode_exact(Eigen::MatrixXcd::Identity(2, 2), 1.0);
  Eigen::MatrixXcd expect = Eigen::MatrixXcd::Zero(4, 4);
  expect.topLeftCorner(2, 2).setIdentity();
  expect.bottomRightCorner(2, 2) = -Eigen::MatrixXcd::Identity(2, 2);
  EXPECT_LT((id.U - expect).norm(), 1e-14);
}

TEST(BlockEncoding, RandomHermitianBlock) {
  const auto m = random_hermitian(8, 11);
  const double a = op_norm(m);
  const auto be = block_encode_exact(m, a);
  EXPECT_LT((encoded_block(be) - m / a).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(unitarity_error(be), 1e-12);
  EXPECT_THROW(block_encode_exact(m, 0.5 * a), NormTooLarge);
}

TEST(BlockEncoding, LinearPolynomialKeepsBlock) {
  const auto m = random_hermitian(4, 2);
  const auto be = block_encode_exact(m, op_norm(m));
  const auto out = apply_poly_to_encoding(be, rescale_half(from_chebyshev({0.0, 1.0})));
  EXPECT_LT((encoded_block(out) - 0.5 * encoded_block(be)).norm(), 1e-12);
  EXPECT_EQ(out.a, be.a + 2);
}

TEST(BlockEncoding, SqrtPolynomialOnDensity) {
  // Diagonal intensive observable with values in [0, 1], encoded at dN.
  const int dN = 12;
  const Eigen::VectorXd vals = Eigen::VectorXd::LinSpaced(5, 0.0, 1.0);
  const Eigen::MatrixXcd A = vals.cast<std::complex<double>>().asDiagonal();
  const auto be = block_encode_exact(A, dN);
  const auto p = rescale_half(reflect(sqrt_poly(1e-4)));
  const auto out = apply_poly_to_encoding(be, p);
  for (int i = 0; i < 5; ++i)
    EXPECT_NEAR(encoded_block(out)(i, i).real(), 0.25 * std::sqrt(1.0 - vals(i) / (2.0 * dN)), out.eps);
  EXPECT_THROW(apply_poly_to_encoding(be, sqrt_poly(1e-4)), PolyNotSubnormalized);
}

TEST(BlockEncoding, GaussianPolynomialMatchesMatrixFunction) {
  const auto H = random_hermitian(4, 5);
  const double alpha = op_norm(H);
  const double w = 0.5 * alpha;
  const auto be = block_encode_exact(H, alpha);
  const auto p = rescale_half(gaussian_poly(w / alpha, 1e-6));
  const auto out = apply_poly_to_encoding(be, p);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
  // The polynomial carries the amplitude exp(-(pi/2)(x/w)^2); its square is the window.
  const Eigen::VectorXd g =
      (-0.5 * std::numbers::pi * (es.eigenvalues() / w).array().square()).exp().matrix() * p.scale;
  const Eigen::MatrixXcd expect = es.eigenvectors() * g.cast<std::complex<double>>().asDiagonal() *
                                  es.eigenvectors().adjoint();
  EXPECT_LT((encoded_block(out) - expect).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Postselect, IdentityKeepsState) {
  const auto be = block_encode_exact(Eigen::MatrixXcd::Identity(3, 3), 1.0);
  Eigen::VectorXcd v(3);
  v << 0.6, std::complex<double>(0, 0.8), 0.0;
  const auto s = product_state({{"sys", 3}}, {v});
  const auto r = apply_and_postselect(be, s, "sys");
  EXPECT_NEAR(r.success_prob, 1.0, 1e-14);
  EXPECT_LT((r.state.amp - v).norm(), 1e-14);
}

TEST(Postselect, KernelOfProjectorHasZeroProbability) {
  Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(2, 2);
  P(0, 0) = 1.0;
  const auto be = block_encode_exact(P, 1.0);
  const auto s = product_state({{"sys", 2}}, {Eigen::Vector2cd(0.0, 1.0)});
  EXPECT_THROW(apply_and_postselect(be, s, "sys"), ZeroProbability);
}

TEST(Postselect, ActsOnNamedRegisterOnly) {
  Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(2, 2);
  P(1, 1) = 1.0;
  const auto be = block_encode_exact(P, 1.0);
  const Eigen::Vector2cd plus(1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0));
  const auto s = product_state({{"a", 2}, {"b", 2}}, {plus, plus});
  const auto r = apply_and_postselect(be, s, "b");
  EXPECT_NEAR(r.success_prob, 0.5, 1e-14);
  // Remaining state is |+>|1>.
  EXPECT_NEAR(std::abs(r.state.amp(1)), 1.0 / std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(std::abs(r.state.amp(3)), 1.0 / std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(std::abs(r.state.amp(0)), 0.0, 1e-14);
}

TEST(PhaseEstimation, RegisterBits) {
  EXPECT_EQ(qpe_register_bits(3, 0.25), 3 + 1 + 4);
  EXPECT_EQ(qpe_register_bits(5, 0.1), 5 + 1 + 7);
}

TEST(PhaseEstimation, GridPhaseLandsInOneBin) {
  const int m = 3;
  const double eps = 0.25;
  const int mp = qpe_register_bits(m, eps);
  const std::int64_t b = 37;
  const double phi = double(b) / std::ldexp(1.0, mp);
  const auto r = phase_estimation({phi}, Eigen::VectorXcd::Ones(1), m, eps);
  ASSERT_TRUE(r.full_register);
  EXPECT_NEAR(r.bin_mass[b], 1.0, 1e-12);
  EXPECT_NEAR(qpe_kernel(phi, b, mp), 1.0, 1e-12);
}

TEST(PhaseEstimation, SeparatedPhasesSplitEvenly) {
  const int m = 3;
  const double eps = 0.1;
  const int mp = qpe_register_bits(m, eps);
  const double M = std::ldexp(1.0, mp);
  const std::vector<double> phases{0.2037, 0.7113};
  const auto r = phase_estimation(phases, Eigen::VectorXcd::Constant(2, 1.0 / std::sqrt(2.0)), m, eps);
  ASSERT_TRUE(r.full_register);
  for (double phi : phases) {
    double near = 0.0;
    for (std::int64_t b = 0; b < static_cast<std::int64_t>(M); ++b) {
      double d = std::abs(double(b) / M - phi);
      d = std::min(d, 1.0 - d);
      if (d <= std::ldexp(1.0, -(m + 1))) near += r.bin_mass[b];
    }
    EXPECT_NEAR(near, 0.5, eps);
  }
  EXPECT_LE(std::abs(qpe_overlap(phases[1] - phases[0], mp)), 2.0 * eps);
  EXPECT_NEAR(std::abs(qpe_overlap(0.0, mp)), 1.0, 1e-15);
}

TEST(LongTimeAverage, ScheduleFractions) {
  const auto s = lta_schedule(0.1, 10, 4);
  EXPECT_NEAR(s.eps2, 0.1 / 320.0, 1e-18);
  EXPECT_NEAR(s.eps3, 0.1 / 2560.0, 1e-18);
  EXPECT_NEAR(s.eps4, 0.1 / 5120.0, 1e-18);
  EXPECT_EQ(s.shots, static_cast<std::int64_t>(std::ceil(std::pow(5120.0 / 0.1, 2))));
  EXPECT_LE(s.systematic_budget, 0.1);
}

TEST(LongTimeAverage, ExactModeWithinSystematicBudget) {
  for (const char* id : {"scan", "flip_once", "mover", "flipper"}) {
    const auto inst = build_hardness_instance(corpus_program(id), corpus_entry(id).input, 8, Rational{1, 2}, false);
    const double exact = infinite_time_average_spectral(inst.sd, inst.observable());
    const auto r = run_lta(inst, 0.0625, 0, 0);
    EXPECT_LE(std::abs(r.gamma - exact), r.schedule.systematic_budget) << id;
    EXPECT_NEAR(r.probability, (1.0 - exact / (2.0 * inst.basis.d() * inst.N)) / 16.0,
                r.schedule.systematic_budget / (32.0 * inst.basis.d() * inst.N))
        << id;
  }
}

TEST(LongTimeAverage, SampledEstimatesMostlyWithinEps) {
  const auto inst = build_hardness_instance(corpus_program("flip_once"), "1", 8, Rational{1, 2}, false);
  const double exact = infinite_time_average_spectral(inst.sd, inst.observable());
  int good = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed)
    good += std::abs(run_lta(inst, 0.0625, -1, seed).gamma - exact) <= 0.0625;
  EXPECT_GE(good, 20);
}

TEST(LongTimeAverage, MissingGapIsRejected) {
  const auto inst = build_hardness_instance(corpus_program("scan"), "11", 8, Rational{1, 2}, false);
  LTAOptions o;
  o.d = inst.basis.d();
  o.N = 8;
  o.promise_gap = 0.0;
  EXPECT_THROW(estimate_long_time_average(inst.heff.matrix, inst.observable(), inst.initial_state(), o),
               PromiseUnknown);
}

TEST(Prep, WideWindowGivesMaximallyMixed) {
  const auto H = random_hermitian(4, 21);
  const double n = op_norm(H);
  const double w = 50.0 * n;
  const auto r = prepare_microcanonical(H, 0.0, w, make_prep_schedule(0.05, n, w));
  EXPECT_LE(trace_distance(r.rho, Eigen::MatrixXcd::Identity(4, 4) / 4.0), 0.05);
}

TEST(Prep, TwoQubitWithinTolerance) {
  const auto H = random_hermitian(4, 22);
  const double n = op_norm(H);
  const double w = 0.5 * n;
  const auto r = prepare_microcanonical(H, 0.0, w, make_prep_schedule(0.05, n, w));
  EXPECT_LE(r.trace_distance, 0.05);
  EXPECT_NEAR(r.trace_distance, trace_distance(r.rho, exact_microcanonical(H, 0.0, w)), 1e-14);
  EXPECT_GE(r.success_prob, r.floor);
  EXPECT_NEAR(r.rho.trace().real(), 1.0, 1e-12);
}

TEST(Prep, WidthBelowTryBudgetIsRejected) {
  const auto H = random_hermitian(4, 23);
  const double n = op_norm(H);
  PrepOptions o;
  o.prep_tries = 1e3;
  const double w = 0.05 * n;
  EXPECT_THROW(prepare_microcanonical(H, 0.0, w, make_prep_schedule(0.1, n, w), o), WidthBelowBudget);
}

TEST(Prep, IdentityObservableEstimatesOne) {
  const auto H = random_hermitian(4, 24);
  const double n = op_norm(H);
  const auto est = estimate_mc_observable(H, Eigen::MatrixXcd::Identity(4, 4), 0.0, 0.5 * n, 0.1, 7);
  EXPECT_NEAR(est.estimate, 1.0, 1e-12);
}

TEST(Prep, SpectrumRouteAgreesWithDenseRoute) {
  const auto H = random_hermitian(4, 25);
  const double n = op_norm(H);
  const double w = 0.5 * n;
  const auto sched = make_prep_schedule(0.1, n, w);
  const auto dense = prepare_microcanonical(H, 0.0, w, sched);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
  const auto spec = prepare_microcanonical_spectrum(es.eigenvalues(), 0.0, w, sched);
  const Eigen::MatrixXcd rho = es.eigenvectors() * spec.weights.cast<std::complex<double>>().asDiagonal() *
                               es.eigenvectors().adjoint();
  EXPECT_LT(trace_distance(rho, dense.rho), 1e-9);
  EXPECT_NEAR(spec.success_prob, dense.success_prob, 1e-9);
}
