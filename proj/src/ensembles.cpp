#include "thermo/ensembles.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_set>

#include "thermo/observables.hpp"

namespace thermo {

namespace {

EnsembleWeights normalize_log(const std::vector<double>& logw) {
  EnsembleWeights out;
  if (logw.empty()) return out;
  const double m = *std::max_element(logw.begin(), logw.end());
  double s = 0.0;
  out.weights.resize(logw.size());
  for (std::size_t i = 0; i < logw.size(); ++i) {
    out.weights[i] = std::exp(logw[i] - m);
    s += out.weights[i];
  }
  for (double& w : out.weights) w /= s;
  out.log_norm = m + std::log(s);
  return out;
}

}  // namespace

EnsembleWeights microcanonical_weights(const Eigen::VectorXd& eigs, const MicrocanonicalParams& mc) {
  if (!(mc.w > 0)) throw InvalidArgument("window width must be positive");
  std::vector<double> logw(eigs.size());
  for (int i = 0; i < eigs.size(); ++i) {
    const double x = (eigs(i) - mc.E) / mc.w;
    logw[i] = -std::numbers::pi * x * x;
  }
  return normalize_log(logw);
}

EnsembleWeights gibbs_weights(const Eigen::VectorXd& eigs, const GibbsParams& g) {
  if (!std::isfinite(g.beta)) throw InvalidArgument("beta must be finite");
  std::vector<double> logw(eigs.size());
  for (int i = 0; i < eigs.size(); ++i) logw[i] = -g.beta * eigs(i);
  return normalize_log(logw);
}

double ensemble_expectation(const SpectralDecomposition& sd, const Eigen::MatrixXd& A,
                            const EnsembleWeights& w) {
  const auto n = sd.eigenvectors.rows();
  if (A.rows() != n || A.cols() != n || static_cast<Eigen::Index>(w.weights.size()) != sd.eigenvalues.size())
    throw DimensionMismatch("observable, eigenbasis and weights disagree in size");
  double s = 0.0;
  for (Eigen::Index i = 0; i < sd.eigenvalues.size(); ++i) {
    if (w.weights[i] == 0.0) continue;
    const auto v = sd.eigenvectors.col(i);
    s += w.weights[i] * v.dot(A * v);
  }
  return s;
}

double mc_expectation(const SpectralDecomposition& sd, const Eigen::MatrixXd& A,
                      const MicrocanonicalParams& mc) {
  return ensemble_expectation(sd, A, microcanonical_weights(sd.eigenvalues, mc));
}

double gibbs_expectation(const SpectralDecomposition& sd, const Eigen::MatrixXd& A,
                         const GibbsParams& g) {
  return ensemble_expectation(sd, A, gibbs_weights(sd.eigenvalues, g));
}

double gibbs_energy(const Eigen::VectorXd& eigs, double beta) {
  const auto w = gibbs_weights(eigs, {beta});
  double e = 0.0;
  for (int i = 0; i < eigs.size(); ++i) e += w.weights[i] * eigs(i);
  return e;
}

double solve_beta(const Eigen::VectorXd& eigs, double E, double tol, double beta_cap) {
  if (eigs.size() == 0) throw InvalidArgument("empty spectrum");
  const double lo = eigs.minCoeff(), hi = eigs.maxCoeff();
  if (!(E > lo && E < hi))
    throw EnergyOutOfRange("E must lie strictly inside the spectrum range");
  // Energy decreases in beta: find b_lo with energy >= E and b_hi with energy <= E.
  double b_lo = -1.0, b_hi = 1.0;
  while (gibbs_energy(eigs, b_hi) > E) {
    b_lo = b_hi;
    b_hi *= 2.0;
    if (b_hi > beta_cap) throw BetaOverflow("beta exceeds " + std::to_string(beta_cap));
  }
  while (gibbs_energy(eigs, b_lo) < E) {
    b_hi = b_lo;
    b_lo *= 2.0;
    if (-b_lo > beta_cap) throw BetaOverflow("beta below -" + std::to_string(beta_cap));
  }
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (b_lo + b_hi);
    const double e = gibbs_energy(eigs, mid);
    if (std::abs(e - E) <= tol) return mid;
    if (e > E)
      b_lo = mid;
    else
      b_hi = mid;
    if (b_hi - b_lo < 1e-15 * std::max(1.0, std::abs(mid))) return mid;
  }
  return 0.5 * (b_lo + b_hi);
}

double level_expectation(const LevelData& levels, const std::string& name, const EnsembleWeights& w) {
  auto it = levels.expectations.find(name);
  if (it == levels.expectations.end()) throw InvalidArgument("no per-level data named " + name);
  if (static_cast<Eigen::Index>(w.weights.size()) != it->second.size())
    throw DimensionMismatch("weights and levels disagree in size");
  double s = 0.0;
  for (Eigen::Index i = 0; i < it->second.size(); ++i) s += w.weights[i] * it->second(i);
  return s;
}

namespace {

std::vector<std::string> all_inputs(const ReversibleTM& tm, int length) {
  std::vector<int> alphabet;
  for (std::size_t s = 0; s < tm.symbols.size(); ++s)
    if (tm.symbols[s].kind == CellKind::M && !tm.symbols[s].marked) alphabet.push_back(static_cast<int>(s));
  std::vector<std::string> out{""};
  for (int i = 0; i < length; ++i) {
    std::vector<std::string> next;
    for (const auto& prefix : out)
      for (int s : alphabet) next.push_back(prefix + (prefix.empty() ? "" : " ") + tm.symbols[s].name);
    out = std::move(next);
  }
  return out;
}

TMConfig rotate(const TMConfig& c, int shift) {
  TMConfig r = c;
  const int N = c.N();
  for (int i = 0; i < N; ++i) {
    r.cells[(i + shift) % N] = c.cells[i];
    if (!c.layout.empty()) r.layout[(i + shift) % N] = c.layout[i];
  }
  return r;
}

}  // namespace

LevelData tuned_sector_levels(const ReversibleTM& tm, int N, const Rational& alpha) {
  const int m_cells = static_cast<int>(N * alpha.num / alpha.den);
  std::unordered_set<TMConfig, ConfigHash> covered;
  std::vector<double> eig, a2s, a2d;
  int orbits = 0;
  for (const auto& x : all_inputs(tm, m_cells)) {
    const TMConfig base = initial_configuration(tm, x, N, alpha);
    for (int s = 0; s < N; ++s) {
      TMConfig c0 = rotate(base, s);
      if (covered.count(c0)) continue;
      const Orbit o = orbit(tm, c0);
      for (const auto& c : o.configs) covered.insert(c);
      ++orbits;
      const auto sd = spectral_decomposition(effective_hamiltonian(o), o.initial_index);
      Eigen::VectorXd site0(o.T), dens(o.T);
      for (int k = 0; k < o.T; ++k) {
        const Site& c = o.configs[k].cells[0];
        site0(k) = tm.a2 >= 0 && tm.symbols[c.symbol].base == tm.a2 ? 1.0 : 0.0;
        dens(k) = double(count_a2(tm, o.configs[k])) / N;
      }
      const Eigen::MatrixXd sq = sd.eigenvectors.cwiseAbs2();
      const Eigen::VectorXd l_site0 = sq.transpose() * site0;
      const Eigen::VectorXd l_dens = sq.transpose() * dens;
      for (int j = 0; j < o.T; ++j) {
        eig.push_back(sd.eigenvalues(j));
        a2s.push_back(l_site0(j));
        a2d.push_back(l_dens(j));
      }
    }
  }
  // The primed copy repeats every level with the a2 terms switched off and
  // the primed projector switched on.
  const Eigen::Index n = static_cast<Eigen::Index>(eig.size());
  LevelData L;
  L.orbits = orbits;
  L.eigenvalues.resize(2 * n);
  Eigen::VectorXd s0 = Eigen::VectorXd::Zero(2 * n), d0 = Eigen::VectorXd::Zero(2 * n);
  Eigen::VectorXd p0 = Eigen::VectorXd::Zero(2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    L.eigenvalues(i) = L.eigenvalues(n + i) = eig[i];
    s0(i) = a2s[i];
    d0(i) = a2d[i];
    p0(n + i) = 1.0;
  }
  L.expectations["a2_site0"] = s0;
  L.expectations["a2_density"] = d0;
  L.expectations["prime_site0"] = p0;
  L.expectations["prime_density"] = p0;
  L.flip_commutator =
      build_tuned_hamiltonian(compile_hamiltonian(tm, std::max(N, 2))).term_commutator_norm;
  return L;
}

LevelData tuned_dense_levels(const ReversibleTM& tm, int N, std::int64_t budget) {
  const SiteBasis basis = site_basis(tm);
  const TunedHamiltonian th = build_tuned_hamiltonian(compile_hamiltonian(tm, basis, N));
  const Eigen::MatrixXd H = dense_hamiltonian(th.h, budget);
  const Eigen::MatrixXd F = dense_flip(th, budget);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  const int d = basis.d(), D = 2 * d;
  const Eigen::Index dim = H.rows();
  Eigen::VectorXd s0(dim), sd(dim), p0(dim), pd(dim);
  for (Eigen::Index x = 0; x < dim; ++x) {
    std::int64_t rest = x;
    double a2 = 0, pr = 0;
    for (int i = 0; i < N; ++i) {
      const int v = static_cast<int>(rest % D);
      rest /= D;
      const bool primed = v >= d;
      const bool is_a2 = !primed && tm.a2 >= 0 && tm.symbols[basis.values[v].symbol].base == tm.a2;
      if (i == 0) {
        s0(x) = is_a2 ? 1.0 : 0.0;
        p0(x) = primed ? 1.0 : 0.0;
      }
      a2 += is_a2 ? 1.0 : 0.0;
      pr += primed ? 1.0 : 0.0;
    }
    sd(x) = a2 / N;
    pd(x) = pr / N;
  }
  const Eigen::MatrixXd sq = es.eigenvectors().cwiseAbs2();
  LevelData L;
  L.eigenvalues = es.eigenvalues();
  L.expectations["a2_site0"] = sq.transpose() * s0;
  L.expectations["a2_density"] = sq.transpose() * sd;
  L.expectations["prime_site0"] = sq.transpose() * p0;
  L.expectations["prime_density"] = sq.transpose() * pd;
  L.flip_commutator = (F * H - H * F).norm();
  return L;
}

TunedExpectation tuned_ensemble_expectation(const LevelData& levels, double p, double q,
                                            const EnsembleWeights& w) {
  if (levels.flip_commutator > 1e-10)
    throw SymmetryViolation("[F, H] has norm " + std::to_string(levels.flip_commutator));
  TunedExpectation r;
  r.a2_site = level_expectation(levels, "a2_site0", w);
  r.prime_site = level_expectation(levels, "prime_site0", w);
  r.value = p * level_expectation(levels, "a2_density", w) + q * level_expectation(levels, "prime_density", w);
  r.identity_gap = std::abs(r.value - (q / 2.0 + p * r.a2_site));
  if (std::abs(r.prime_site - 0.5) > 1e-8)
    throw SymmetryViolation("tr(Pi'_1 rho) = " + std::to_string(r.prime_site) + ", expected 1/2");
  return r;
}

TuningResult tune_p(double A_hat, const Rational& alpha, double delta, EstimateSource source) {
  const double denom = 4.0 * (1.0 - alpha.value()) - 2.0 * A_hat;
  if (std::abs(denom) < 0.5)
    throw DegenerateDenominator("4(1-alpha) - 2 A_hat = " + std::to_string(denom));
  TuningResult r;
  r.p = 1.0 / denom;
  r.q = 0.5;
  r.A_hat = A_hat;
  r.source = source;
  r.residual = std::abs((1.0 - alpha.value()) * (1.0 - delta) * r.p - (r.q / 2.0 + r.p * A_hat / 2.0));
  return r;
}

ConjectureReport probe_conjecture(const Eigen::VectorXd& eigs, double eps, int N,
                                  const std::vector<double>& E_grid) {
  ConjectureReport rep;
  const double lo = eigs.minCoeff() + eps * N, hi = eigs.maxCoeff() - eps * N;
  for (double E : E_grid) {
    if (E < lo || E > hi) continue;
    const double b = solve_beta(eigs, E, 1e-10);
    rep.points.push_back({E, b});
    rep.max_abs_beta = std::max(rep.max_abs_beta, std::abs(b));
  }
  return rep;
}

}  // namespace thermo
