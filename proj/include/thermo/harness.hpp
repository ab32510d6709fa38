#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "thermo/ensembles.hpp"
#include "thermo/hamiltonian.hpp"
#include "thermo/observables.hpp"
#include "thermo/qsim.hpp"
#include "thermo/tm_model.hpp"

namespace thermo {

enum class VerdictKind { Yes, No, PromiseViolated };
std::string to_string(VerdictKind v);
// 0 YES, 1 NO, 2 PROMISE_VIOLATED.
int exit_code(VerdictKind v);

enum class Method { Exact, Qsim };
std::string to_string(Method m);
Method parse_method(const std::string& s);

struct Verdict {
  VerdictKind kind = VerdictKind::PromiseViolated;
  double value = 0.0;   // relaxation value (or estimate)
  double target = 0.0;
  double eps = 0.0;
  double c = 2.0;
  double slack = 0.0;   // widening of both thresholds (estimation or finite-time error)
  double margin() const;  // |value - target|
};

// YES iff |value - target| <= eps + slack, NO iff >= c eps - slack.
Verdict classify(double value, double target, double eps, double c, double slack = 0.0);

struct InstanceOptions {
  std::optional<double> eps;  // default (1 - alpha)/8
  double c = 2.0;
};

struct FSRelaxInstance {
  std::string name;
  TuringProgram program;
  ReversibleTM tm;
  SiteBasis basis;
  std::string input;
  int N = 0;
  Rational alpha;
  bool padded = false;
  Orbit orbit;
  EffectiveHamiltonian heff;
  SpectralDecomposition sd;
  Eigen::MatrixXd A_a2;      // a2 density in the orbit basis
  double p = 1.0;            // observable = p * a2 density + q * primed density
  double q = 0.0;
  double A_star = 0.0;
  double eps = 0.0;
  double c = 2.0;
  GapReport gap;             // path formula, or distinct-gap scan for cycles

  Eigen::MatrixXd observable() const { return p * A_a2; }
  Eigen::VectorXd initial_state() const;
};

// Composite (or padded) machine, orbit, a2 observable and the closed-form
// halting value as target.
FSRelaxInstance build_hardness_instance(const TuringProgram& tm1, const std::string& x, int N,
                                        const Rational& alpha, bool padded, const InstanceOptions& opt = {});

struct QsimOptions {
  std::uint64_t seed = 0;
  std::int64_t shots = -1;  // -1 schedule default, 0 exact probability
  int seeds = 1;            // majority vote over consecutive seeds
};

struct RelaxReport {
  Verdict verdict;
  Method method = Method::Exact;
  double exact_value = 0.0;           // spectral value, always computed
  std::vector<VerdictKind> votes;     // per seed in QSIM mode
};

// EXACT: spectral infinite-time average. QSIM: phase-estimation estimator
// with eps' = (c-1) eps / 4, plurality over seeds; an undecided estimate raises
// PromiseUnknown.
RelaxReport decide_fsrelax(const FSRelaxInstance& inst, Method method, const QsimOptions& q = {});

enum class EnsembleKind { Microcanonical, Gibbs };

struct FSThermInstance {
  FSRelaxInstance base;
  EnsembleKind ensemble = EnsembleKind::Microcanonical;
  double E = 0.0;
  double w = 1.0;
  LevelData levels;
  TuningResult tuning;
};

struct TunedOptions {
  InstanceOptions instance;
  EnsembleKind ensemble = EnsembleKind::Microcanonical;
  std::optional<double> E;  // default <psi0|H|psi0>
  double w = 1.0;
  EstimateSource source = EstimateSource::ExactTrace;
  std::uint64_t seed = 0;
  double prep_tries = 1e30;
};

// Padded machine, doubled levels, p from tune_p and q = 1/2.
FSThermInstance build_tuned_instance(const TuringProgram& tm1, const std::string& x, int N,
                                     const Rational& alpha, const TunedOptions& opt = {});

struct ThermReport {
  Verdict verdict;
  double beta = 0.0;  // Gibbs only
  TunedExpectation ensemble;
};

ThermReport decide_fstherm(const FSThermInstance& inst, Method method, const QsimOptions& q = {});

struct FiniteTimeReport {
  Verdict verdict;
  double tau = 0.0;
  double tau_min = 0.0;
  double bound = 0.0;
};

// Smallest tau with finite_time_bound < (c-1) eps / 2.
double ftfs_tau_threshold(const FSRelaxInstance& inst);
FiniteTimeReport decide_ftfsrelax(const FSRelaxInstance& inst, double tau);

struct CorpusRow {
  std::string id;
  bool halts = false;
  int N = 0;
  Rational alpha;
  bool padded = false;
  int T = 0;
  int T_h = -1;
  double value = 0.0;
  double A_star = 0.0;
  VerdictKind exact = VerdictKind::PromiseViolated;
  VerdictKind qsim = VerdictKind::PromiseViolated;
  int qsim_agree = 0;
  int qsim_seeds = 0;
  std::string error;
};

struct CorpusOptions {
  int N = 8;
  Rational alpha{1, 4};
  bool padded = false;
  int qsim_seeds = 0;  // 0 skips the estimator
  std::uint64_t seed = 0;
  std::int64_t shots = -1;
  InstanceOptions instance;
};

// Runs every corpus entry concurrently; each pipeline is sequential.
std::vector<CorpusRow> run_corpus(const CorpusOptions& opt);
void write_corpus_csv(const std::vector<CorpusRow>& rows, std::ostream& out);

// tau sweep: finite-time averages with their bound.
std::vector<AverageReport> sweep_tau(const FSRelaxInstance& inst, const std::vector<double>& taus);

struct EnsembleSweepRow {
  double E = 0.0;
  double w = 0.0;
  double target = 0.0;
  double a2_site = 0.0;
  double prime_site = 0.0;
};
// Tuned ensemble expectation over a grid of windows (fixed E) or energies (fixed w).
std::vector<EnsembleSweepRow> sweep_w(const FSThermInstance& inst, const std::vector<double>& ws);
std::vector<EnsembleSweepRow> sweep_E(const FSThermInstance& inst, const std::vector<double>& Es);

}  // namespace thermo
