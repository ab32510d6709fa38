#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "thermo/hamiltonian.hpp"

namespace thermo {

struct MicrocanonicalParams {
  double E = 0.0;
  double w = 1.0;  // window exp(-pi ((lambda - E)/w)^2)
};

struct GibbsParams {
  double beta = 0.0;
};

struct EnsembleWeights {
  std::vector<double> weights;  // normalized
  double log_norm = 0.0;        // log of the unshifted normalization W or Z
};

EnsembleWeights microcanonical_weights(const Eigen::VectorXd& eigs, const MicrocanonicalParams& mc);
EnsembleWeights gibbs_weights(const Eigen::VectorXd& eigs, const GibbsParams& g);

// sum_i rho_i <lambda_i|A|lambda_i>
double ensemble_expectation(const SpectralDecomposition& sd, const Eigen::MatrixXd& A,
                            const EnsembleWeights& w);
double mc_expectation(const SpectralDecomposition& sd, const Eigen::MatrixXd& A,
                      const MicrocanonicalParams& mc);
double gibbs_expectation(const SpectralDecomposition& sd, const Eigen::MatrixXd& A,
                         const GibbsParams& g);

// tr(H rho_G(beta)).
double gibbs_energy(const Eigen::VectorXd& eigs, double beta);

// Bisection on the decreasing map beta -> tr(H rho_G(beta)). The bracket
// starts at [-1, 1] and doubles up to |beta| = beta_cap.
double solve_beta(const Eigen::VectorXd& eigs, double E, double tol = 1e-10, double beta_cap = 1e6);

// Energies plus per-level expectation values of diagonal observables. Any
// orthonormal eigenbasis works because ensemble states are functions of H.
struct LevelData {
  Eigen::VectorXd eigenvalues;
  std::map<std::string, Eigen::VectorXd> expectations;
  double flip_commutator = 0.0;  // ||[F, H]|| of the Hamiltonian the levels came from
  int orbits = 0;                // number of orbits per copy (0 for dense data)
};

double level_expectation(const LevelData& levels, const std::string& name, const EnsembleWeights& w);

// Levels of the doubled machine restricted to the sector spanned by the orbits
// of every valid initial configuration (all inputs of length alpha N, all N
// rotations), in the unprimed and the primed copy. The sector is invariant
// under H, under F and under translations. Names: a2_site0, a2_density (both on
// the unprimed half), prime_site0, prime_density.
LevelData tuned_sector_levels(const ReversibleTM& tm, int N, const Rational& alpha);

// Same quantities from a dense diagonalization of the full doubled ring.
LevelData tuned_dense_levels(const ReversibleTM& tm, int N, std::int64_t budget = 20000);

struct TunedExpectation {
  double value = 0.0;          // tr(A_N rho) from the per-level densities
  double a2_site = 0.0;        // tr(|a2><a2|_1 rho)
  double prime_site = 0.0;     // tr(Pi'_1 rho)
  double identity_gap = 0.0;   // |value - (q/2 + p a2_site)|
};

// Raises SymmetryViolation when the flip commutator exceeds 1e-10 or the
// primed weight differs from 1/2 by more than 1e-8.
TunedExpectation tuned_ensemble_expectation(const LevelData& levels, double p, double q,
                                            const EnsembleWeights& w);

enum class EstimateSource { ExactTrace, Sampled };

struct TuningResult {
  double p = 0.0;
  double q = 0.5;
  double A_hat = 0.0;
  double residual = 0.0;  // |(1-alpha)(1-delta) p - (q/2 + p A_hat/2)|
  EstimateSource source = EstimateSource::ExactTrace;
};

// p = 1/(4(1-alpha) - 2 A_hat) with A_hat the a2 density conditional on the
// unprimed half (twice tr(|a2><a2|_1 rho)).
TuningResult tune_p(double A_hat, const Rational& alpha, double delta = 0.0,
                    EstimateSource source = EstimateSource::ExactTrace);

struct ConjecturePoint {
  double E = 0.0;
  double beta = 0.0;
};

struct ConjectureReport {
  std::vector<ConjecturePoint> points;
  double max_abs_beta = 0.0;
};

// Solves for beta on every grid energy inside [E_min + eps N, E_max - eps N].
ConjectureReport probe_conjecture(const Eigen::VectorXd& eigs, double eps, int N,
                                  const std::vector<double>& E_grid);

}  // namespace thermo
