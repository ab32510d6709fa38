#include <gtest/gtest.h>

#include <cmath>

#include "thermo/corpus.hpp"
#include "thermo/harness.hpp"
#include "thermo/observables.hpp"

using namespace thermo;

namespace {

FSRelaxInstance instance(const char* id, int N, Rational alpha, bool padded = false) {
  return build_hardness_instance(corpus_program(id), corpus_entry(id).input, N, alpha, padded);
}

}  // namespace

TEST(ClosedForm, QuotedHaltingValue) {
  EXPECT_NEAR(closed_form_halting(Rational{1, 2}, 10, 9), 7.0 / 30.0, 1e-15);
  EXPECT_EQ(closed_form_halting(Rational{1, 1}, 10, 9), 0.0);
  EXPECT_NEAR(closed_form_halting(Rational{1, 4}, 100000000, 8), 0.375, 1e-8);
}

TEST(ClosedForm, PaddedDeltaIsSmall) {
  for (int N : {4, 8, 12})
    for (int T_h : {1, 5, 40}) {
      const auto pc = closed_form_halting_padded(Rational{1, 4}, T_h, N);
      EXPECT_GT(pc.delta, 0.0);
      EXPECT_LE(pc.delta, 2.0 / N);
      EXPECT_GT(pc.exact_delta, 0.0);
      EXPECT_LT(pc.exact_delta, pc.delta);
    }
  EXPECT_EQ(closed_form_halting_padded(Rational{1, 1}, 5, 8).value, 0.0);
}

TEST(Average, LoopingInstancesRelaxToZero) {
  for (const char* id : {"mover", "flipper", "alternator", "left_mover"}) {
    const auto inst = instance(id, 8, Rational{1, 4});
    EXPECT_NEAR(infinite_time_average_spectral(inst.sd, inst.A_a2), 0.0, 1e-12) << id;
  }
}

TEST(Average, IdentityObservableIsNormalized) {
  const auto inst = instance("bounce", 8, Rational{1, 2});
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(inst.orbit.T, inst.orbit.T);
  EXPECT_NEAR(infinite_time_average_spectral(inst.sd, I), 1.0, 1e-12);
  EXPECT_NEAR(infinite_time_average_structural(inst.orbit, I), 1.0, 1e-12);
}

TEST(Average, StructuralMatchesSpectralOnHaltingOrbits) {
  for (const char* id : {"scan", "bounce", "flip_once", "chain3"})
    for (Rational a : {Rational{1, 2}, Rational{1, 4}}) {
      const auto inst = instance(id, 8, a);
      const double s = infinite_time_average_spectral(inst.sd, inst.A_a2);
      EXPECT_NEAR(infinite_time_average_structural(inst.orbit, inst.A_a2), s, 1e-10) << id;
      // The a2 density is diagonal in the configuration basis.
      EXPECT_LT((inst.A_a2 - Eigen::MatrixXd(inst.A_a2.diagonal().asDiagonal())).norm(), 1e-15);
    }
}

TEST(Average, CompositeValueMatchesExactRamp) {
  for (const char* id : {"scan", "bounce", "flip_once", "chain3"})
    for (int N : {6, 8, 12}) {
      const Rational a{1, 2};
      const auto inst = instance(id, N, a);
      const double s = infinite_time_average_spectral(inst.sd, inst.A_a2);
      EXPECT_NEAR(s, closed_form_halting_exact(a, inst.orbit.T_h, N, inst.orbit.T), 1e-10) << id;
      EXPECT_NEAR(s, (1.0 - a.value()) / 2.0, 1e-10) << id;
    }
}

TEST(Average, PaddedValueMatchesExactDelta) {
  for (const char* id : {"scan", "flip_once"}) {
    const auto inst = instance(id, 8, Rational{1, 4}, true);
    const auto pc = closed_form_halting_padded(Rational{1, 4}, inst.orbit.T_h, 8);
    EXPECT_NEAR(infinite_time_average_spectral(inst.sd, inst.A_a2), pc.exact_value, 1e-8) << id;
  }
}

TEST(FiniteTime, ConvergesToInfiniteAverage) {
  const auto inst = instance("flip_once", 6, Rational{1, 2});
  const double inf = infinite_time_average_spectral(inst.sd, inst.A_a2);
  const double T = inst.orbit.T;
  EXPECT_NEAR(finite_time_average(inst.sd, inst.A_a2, 1e6 * T * T), inf, 1e-6);
}

TEST(FiniteTime, DiagonalInEigenbasisIsStationary) {
  const auto inst = instance("scan", 8, Rational{1, 2});
  const Eigen::MatrixXd& V = inst.sd.eigenvectors;
  const Eigen::MatrixXd A = V * Eigen::VectorXd::LinSpaced(V.cols(), 0.0, 1.0).asDiagonal() * V.transpose();
  const double inf = infinite_time_average_spectral(inst.sd, A);
  for (double tau : {0.5, 3.0, 100.0}) EXPECT_NEAR(finite_time_average(inst.sd, A, tau), inf, 1e-10);
}

TEST(FiniteTime, DeviationStaysUnderExplicitBound) {
  for (const char* id : {"scan", "bounce"}) {
    const auto inst = instance(id, 8, Rational{1, 2});
    const double inf = infinite_time_average_spectral(inst.sd, inst.A_a2);
    const double w = coherence_weight(inst.sd, inst.A_a2);
    for (double tau = 10.0; tau < 1e5; tau *= 3.7) {
      const double dev = std::abs(finite_time_average(inst.sd, inst.A_a2, tau) - inf);
      EXPECT_LE(dev, finite_time_bound(inst.orbit.T, tau, w)) << id << " tau " << tau;
    }
  }
  EXPECT_EQ(finite_time_bound(10, std::numeric_limits<double>::infinity(), 1.0), 0.0);
}

TEST(FiniteTime, EnvelopeDecaysInverselyWithTime) {
  const auto inst = instance("scan", 8, Rational{1, 2});
  const double w = relaxation_window(inst.sd, inst.A_a2);
  const SlopeFit fit = relaxation_slope(inst.sd, inst.A_a2, 10.0 * w, 1e3 * w);
  EXPECT_NEAR(fit.slope, -1.0, 0.1);
}

TEST(Groups, DegenerateLevelsShareAGroup) {
  Eigen::VectorXd e(4);
  e << 1.0, 1.0 + 1e-13, -2.0, 0.5;
  const auto g = eigenvalue_groups(e);
  EXPECT_EQ(g[0], g[1]);
  EXPECT_NE(g[0], g[2]);
  EXPECT_NE(g[2], g[3]);
}
