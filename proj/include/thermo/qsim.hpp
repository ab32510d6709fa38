#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "thermo/common.hpp"
#include "thermo/hamiltonian.hpp"
#include "thermo/polyapprox.hpp"

namespace thermo {

// Operator-level block encoding. U is the unitary dilation on system (+) one
// ancilla block; `a` is the ancilla count the gate-level circuit would use.
struct BlockEncoding {
  Eigen::MatrixXcd U;
  double alpha = 1.0;
  int a = 1;
  double eps = 0.0;
  Eigen::Index system_dim() const { return U.rows() / 2; }
};

// <0|U|0>, the encoded block (equal to target / alpha).
Eigen::MatrixXcd encoded_block(const BlockEncoding& be);
double unitarity_error(const BlockEncoding& be);

// U = [[B, sqrt(I - B B^+)], [sqrt(I - B^+ B), -B^+]] with B = M / alpha.
BlockEncoding block_encode_exact(const Eigen::MatrixXcd& M, double alpha);

// Encoding of p(block) with the error law 4 deg sqrt(eps/alpha) + delta.
BlockEncoding apply_poly_to_encoding(const BlockEncoding& be, const CertifiedPolynomial& p);

struct Register {
  std::string name;
  Eigen::Index dim = 1;
};

// Amplitudes in row-major order over the registers (first register slowest).
struct QuantumState {
  Eigen::VectorXcd amp;
  std::vector<Register> registers;
  Eigen::Index dim() const { return amp.size(); }
};

QuantumState product_state(const std::vector<Register>& regs, const std::vector<Eigen::VectorXcd>& parts);

struct PostselectResult {
  QuantumState state;
  double success_prob = 0.0;
};

// Applies the block to `reg` and keeps the ancilla-zero branch.
PostselectResult apply_and_postselect(const BlockEncoding& be, const QuantumState& s, const std::string& reg);

struct QPEResult {
  int m = 0;
  int m_prime = 0;
  double eps = 0.0;
  // component_bins[i][b] = |overlap_i|^2 |amp(b | phase_i)|^2, only when m' <= 20.
  std::vector<std::vector<double>> component_bins;
  std::vector<double> bin_mass;   // marginal over components, only when m' <= 20
  std::vector<double> tail_mass;  // per component, mass outside +-2^-(m+1)
  bool full_register = false;
};

// Rounding bits m' = m + 1 + ceil(2 log2(1/eps)).
int qpe_register_bits(int m, double eps);

// |amp(b | phi)|^2 for an M = 2^m' register.
double qpe_kernel(double phi, std::int64_t b, int m_prime);

// sum_b conj(amp(b|phi_i)) amp(b|phi_j), which depends only on phi_j - phi_i.
std::complex<double> qpe_overlap(double delta_phi, int m_prime);

QPEResult phase_estimation(const std::vector<double>& phases, const Eigen::VectorXcd& overlaps, int m,
                           double eps);

// Estimator for the long-time average of an intensive observable.
struct LTASchedule {
  double eps = 0.0;
  double eps1 = 0.0;  // evolution error, vacuous in this simulator
  double eps2 = 0.0;  // polynomial accuracy, eps / 8dN
  double eps3 = 0.0;  // phase-estimation tail, eps / 64dN
  double eps4 = 0.0;  // sampling accuracy, eps / 128dN
  std::int64_t shots = 0;
  double systematic_budget = 0.0;  // 32 dN (eps2 (2 + eps2)/16 + eps3/2)
};

LTASchedule lta_schedule(double eps, int d, int N);

struct LTAResult {
  double gamma = 0.0;
  double probability = 0.0;   // exact Pr[0^a]
  double sampled_probability = 0.0;
  std::int64_t shots = 0;     // 0 in exact-probability mode
  int m = 0;
  int m_prime = 0;
  double poly_scale = 0.0;
  LTASchedule schedule;
};

struct LTAOptions {
  double eps = 0.1;
  int d = 1;                  // local dimension
  int N = 1;                  // ring length
  double promise_gap = 0.0;   // smallest distinct eigenvalue gap of H_eff
  std::int64_t shots = -1;    // -1: ceil(eps4^-2); 0: exact probability mode
  std::uint64_t seed = 0;
};

// Raises PromiseUnknown without a positive promise gap.
LTAResult estimate_long_time_average(const Eigen::MatrixXd& H_eff, const Eigen::MatrixXd& A_orbit,
                                     const Eigen::VectorXd& psi0, const LTAOptions& opt);

struct PrepSchedule {
  double eps = 0.0;
  double eps_p = 0.0;
  double eta = 0.0;
  double delta = 0.0;
  double eps_H = 0.0;  // exact encoding of H
  double eta_bound = 0.0;
  double delta_bound = 0.0;
};

// eta is floored at 1e-13 so the Gaussian polynomial stays certifiable in
// double precision; the trace distance is then checked against the exact
// ensemble instead of relying on the worst-case cascade.
PrepSchedule make_prep_schedule(double eps, double alpha, double w);
void validate_schedule(const PrepSchedule& s, double alpha, double w);

struct PrepResult {
  Eigen::MatrixXcd rho;
  double success_prob = 0.0;
  double expected_tries = 0.0;
  double trace_distance = -1.0;  // to the exact ensemble when requested
  double bound = 0.0;            // sqrt(8 eps') + eps_p
  double floor = 0.0;            // (s (e^{-pi alpha^2/(2 w^2)} - eta - delta))^2, s the encoding scale
  int degree = 0;
  double alpha = 0.0;
  PrepSchedule schedule;
};

struct PrepOptions {
  double alpha = 0.0;  // 0: ||H|| + |E|
  double prep_tries = 1e30;
  bool compare_exact = true;
};

PrepResult prepare_microcanonical(const Eigen::MatrixXcd& H, double E, double w, const PrepSchedule& schedule,
                                  const PrepOptions& opt = {});

// Same pipeline when H is given by its spectrum. The prepared state is a
// function of H, so its eigenbasis weights describe it completely.
struct SpectralPrep {
  Eigen::VectorXd weights;
  double success_prob = 0.0;
  double expected_tries = 0.0;
  double trace_distance = 0.0;
  double floor = 0.0;
  int degree = 0;
  double alpha = 0.0;
  PrepSchedule schedule;
};
SpectralPrep prepare_microcanonical_spectrum(const Eigen::VectorXd& eigs, double E, double w,
                                             const PrepSchedule& schedule, const PrepOptions& opt = {});

// Exact rho_MC = sum_i e^{-pi ((lambda_i - E)/w)^2} |i><i| / W.
Eigen::MatrixXcd exact_microcanonical(const Eigen::MatrixXcd& H, double E, double w);

double trace_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

struct MCEstimate {
  double estimate = 0.0;
  double exact = 0.0;       // tr(A rho') of the prepared state
  std::int64_t samples = 0;
  double prep_eps = 0.0;
};

// Prepares at eps / (2 ||A||) and averages n single-shot outcomes drawn from
// the spectral measure of A, n = ceil(R^2 ln 6 / (2 (eps/2)^2)) with R the
// spread of A's spectrum (Hoeffding at confidence 2/3).
MCEstimate estimate_mc_observable(const Eigen::MatrixXcd& H, const Eigen::MatrixXcd& A, double E, double w,
                                  double eps, std::uint64_t seed, const PrepOptions& opt = {});

// Projector version on a spectrum: level_values[i] = <i|P|i> in [0, 1], each
// shot is a Bernoulli outcome of measuring P on the prepared state.
MCEstimate estimate_mc_projector(const Eigen::VectorXd& eigs, const Eigen::VectorXd& level_values, double E,
                                 double w, double eps, std::uint64_t seed, const PrepOptions& opt = {});

}  // namespace thermo
