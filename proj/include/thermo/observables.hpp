#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

#include "thermo/hamiltonian.hpp"

namespace thermo {

// d x d site operators in the local basis of a compiled machine.
Eigen::MatrixXd a2_projector(const ReversibleTM& tm, const SiteBasis& basis);
// Projector onto basis values whose underlying symbol is `symbol`, heads included.
Eigen::MatrixXd symbol_projector(const ReversibleTM& tm, const SiteBasis& basis, int symbol);
// Pi' on the doubled space: identity on the primed half.
Eigen::MatrixXd primed_projector(int base_d);
// p |a2><a2| (unprimed half) + q Pi' on the doubled space.
Eigen::MatrixXd tuned_site_observable(const Eigen::MatrixXd& a2_site, double p, double q);

// Local basis values of each orbit configuration, shifted by `offset` (d for
// the primed copy of a doubled space).
std::vector<std::vector<int>> orbit_values(const SiteBasis& basis, const Orbit& o, int offset = 0);

// (1/N) sum_i A_i written in the orbit basis, cross terms included.
Eigen::MatrixXd observable_in_orbit(const Eigen::MatrixXd& site,
                                    const std::vector<std::vector<int>>& values);

enum class AverageMethod { Spectral, Structural, ClosedForm, FiniteTime };
std::string to_string(AverageMethod m);

struct AverageReport {
  std::string instance;
  AverageMethod method = AverageMethod::Spectral;
  double tau = 0.0;  // only for FiniteTime
  double value = 0.0;
  double bound = 0.0;
};
void write_csv_header(std::ostream& out);
void write_csv_row(const AverageReport& r, std::ostream& out);

// Index groups of numerically equal eigenvalues (relative tolerance scaled by
// the largest |lambda|, floored at 1).
std::vector<int> eigenvalue_groups(const Eigen::VectorXd& eigenvalues, double rel_tol = 1e-9);

// sum over equal-eigenvalue pairs of c_i c_j <lambda_i|A|lambda_j>.
double infinite_time_average_spectral(const SpectralDecomposition& sd, const Eigen::MatrixXd& A_orbit,
                                      double rel_tol = 1e-9);

// Position-space formula for a path started at its first configuration.
double infinite_time_average_structural(const Orbit& o, const Eigen::MatrixXd& A_orbit);
double infinite_time_average_structural(OrbitKind kind, int initial_index,
                                        const Eigen::MatrixXd& A_orbit);

// (1-alpha)/2 * (1 - 2/(2 T_h + N + 1)), the halting value as usually quoted.
double closed_form_halting(const Rational& alpha, int T_h, int N);

// Exact value of the a2 density average on a halting path of length T whose
// sweep starts at step T_h: (1-alpha)(T - T_h - N/2 + 1/2)/(T+1). The sweep
// ramp contributes (1-alpha)(N+2)/2, so with T = 2 T_h + N this is exactly
// (1-alpha)/2; the quoted form above is smaller by (1-alpha)/(2 T_h + N + 1).
double closed_form_halting_exact(const Rational& alpha, int T_h, int N, long long T);

struct PaddedClosedForm {
  double value = 0.0;          // (1-alpha)(1-delta) <a2|A|a2>
  double delta = 0.0;          // (T_h + N/2 + 3/2) / (T + 1)
  double exact_value = 0.0;    // same with the ramp counted exactly
  double exact_delta = 0.0;    // (T_h + N/2 + 1/2) / (T + 1)
};
PaddedClosedForm closed_form_halting_padded(const Rational& alpha, int T_h, int N,
                                            double a2_weight = 1.0);

// (1/tau) int_0^tau <psi(t)|A|psi(t)> dt evaluated in the eigenbasis.
double finite_time_average(const SpectralDecomposition& sd, const Eigen::MatrixXd& A_orbit,
                           double tau, double rel_tol = 1e-9);

// sum over pairs with different eigenvalues of |c_i c_j <lambda_i|A|lambda_j>|.
double coherence_weight(const SpectralDecomposition& sd, const Eigen::MatrixXd& A_orbit,
                        double rel_tol = 1e-9);

// A_norm * 2 (T+1)^2 / (pi^2 tau). Valid whenever distinct eigenvalues are at
// least pi^2/(T+1)^2 apart, which holds for every path and cycle.
double finite_time_bound(int T, double tau, double A_norm);

struct SlopeFit {
  std::vector<double> taus;
  std::vector<double> envelope;  // max |A(t) - A_inf| for t in [tau, tau + window]
  double slope = 0.0;
};

// Log-log slope of the deviation envelope on `points` log-spaced times.
// Envelope window: two periods of the slowest beat among the coherences.
// Sweeps are in the 1/tau regime once tau is several windows long.
double relaxation_window(const SpectralDecomposition& sd, const Eigen::MatrixXd& A_orbit);

SlopeFit relaxation_slope(const SpectralDecomposition& sd, const Eigen::MatrixXd& A_orbit,
                          double tau_min, double tau_max, int points = 24);

}  // namespace thermo
