#include "thermo/observables.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <iomanip>
#include <numbers>
#include <numeric>
#include <ostream>

namespace thermo {

namespace {
constexpr double kPi = std::numbers::pi;
}

Eigen::MatrixXd symbol_projector(const ReversibleTM& tm, const SiteBasis& basis, int symbol) {
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(basis.d(), basis.d());
  for (int v = 0; v < basis.d(); ++v)
    if (tm.symbols[basis.values[v].symbol].base == symbol) P(v, v) = 1.0;
  return P;
}

Eigen::MatrixXd a2_projector(const ReversibleTM& tm, const SiteBasis& basis) {
  if (tm.a2 < 0) return Eigen::MatrixXd::Zero(basis.d(), basis.d());
  return symbol_projector(tm, basis, tm.a2);
}

Eigen::MatrixXd primed_projector(int base_d) {
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(2 * base_d, 2 * base_d);
  P.bottomRightCorner(base_d, base_d).setIdentity();
  return P;
}

Eigen::MatrixXd tuned_site_observable(const Eigen::MatrixXd& a2_site, double p, double q) {
  const int d = static_cast<int>(a2_site.rows());
  Eigen::MatrixXd A = q * primed_projector(d);
  A.topLeftCorner(d, d) += p * a2_site;
  return A;
}

std::vector<std::vector<int>> orbit_values(const SiteBasis& basis, const Orbit& o, int offset) {
  std::vector<std::vector<int>> out(o.T);
  for (int k = 0; k < o.T; ++k) {
    out[k].reserve(o.configs[k].N());
    for (const Site& s : o.configs[k].cells) out[k].push_back(basis.of(s) + offset);
  }
  return out;
}

Eigen::MatrixXd observable_in_orbit(const Eigen::MatrixXd& site,
                                    const std::vector<std::vector<int>>& values) {
  const int T = static_cast<int>(values.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(T, T);
  if (T == 0) return A;
  const int N = static_cast<int>(values[0].size());
  for (int j = 0; j < T; ++j) {
    double s = 0.0;
    for (int v : values[j]) s += site(v, v);
    A(j, j) = s / N;
  }
  const bool diagonal = (site - Eigen::MatrixXd(site.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
  if (diagonal) return A;
  // Distinct configurations contribute only when they differ on exactly one site.
  for (int j = 0; j < T; ++j)
    for (int k = j + 1; k < T; ++k) {
      int diff = -1, count = 0;
      for (int i = 0; i < N && count < 2; ++i)
        if (values[j][i] != values[k][i]) {
          ++count;
          diff = i;
        }
      if (count != 1) continue;
      A(j, k) = site(values[j][diff], values[k][diff]) / N;
      A(k, j) = site(values[k][diff], values[j][diff]) / N;
    }
  return A;
}

std::string to_string(AverageMethod m) {
  switch (m) {
    case AverageMethod::Spectral: return "SPECTRAL";
    case AverageMethod::Structural: return "STRUCTURAL";
    case AverageMethod::ClosedForm: return "CLOSED_FORM";
    case AverageMethod::FiniteTime: return "FINITE_TIME";
  }
  return "UNKNOWN";
}

void write_csv_header(std::ostream& out) { out << "instance,method,tau,value,bound\n"; }

void write_csv_row(const AverageReport& r, std::ostream& out) {
  out << std::setprecision(15) << r.instance << ',' << to_string(r.method) << ',' << r.tau << ','
      << r.value << ',' << r.bound << "\n";
}

std::vector<int> eigenvalue_groups(const Eigen::VectorXd& ev, double rel_tol) {
  const int n = static_cast<int>(ev.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return ev(a) < ev(b); });
  const double scale = std::max(1.0, n ? ev.cwiseAbs().maxCoeff() : 1.0);
  std::vector<int> group(n, 0);
  int g = 0;
  for (int i = 0; i < n; ++i) {
    if (i > 0 && ev(order[i]) - ev(order[i - 1]) > rel_tol * scale) ++g;
    group[order[i]] = g;
  }
  return group;
}

namespace {

Eigen::MatrixXd eigenbasis_matrix(const SpectralDecomposition& sd, const Eigen::MatrixXd& A) {
  if (A.rows() != sd.eigenvectors.rows() || A.cols() != sd.eigenvectors.rows())
    throw DimensionMismatch("observable is " + std::to_string(A.rows()) + "x" +
                            std::to_string(A.cols()) + " but the orbit has " +
                            std::to_string(sd.eigenvectors.rows()) + " configurations");
  return sd.eigenvectors.transpose() * A * sd.eigenvectors;
}

}  // namespace

double infinite_time_average_spectral(const SpectralDecomposition& sd, const Eigen::MatrixXd& A,
                                      double rel_tol) {
  const Eigen::MatrixXd B = eigenbasis_matrix(sd, A);
  const auto group = eigenvalue_groups(sd.eigenvalues, rel_tol);
  const int n = static_cast<int>(group.size());
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (group[i] == group[j]) s += sd.coefficients(i) * sd.coefficients(j) * B(i, j);
  return s;
}

double infinite_time_average_structural(OrbitKind kind, int initial_index, const Eigen::MatrixXd& A) {
  if (kind != OrbitKind::Path) throw WrongOrbitKind("the structural formula needs a path orbit");
  if (initial_index != 0)
    throw InvalidArgument("the structural formula assumes the walk starts at an endpoint");
  const int T = static_cast<int>(A.rows());
  if (T == 1) return A(0, 0);
  const double w = 1.0 / (T + 1);
  double s = 1.5 * w * (A(0, 0) + A(T - 1, T - 1));
  for (int j = 1; j <= T - 2; ++j) s += w * A(j, j);
  double cross = 0.0;
  for (int j = 0; j < T; ++j) {
    if (j + 2 < T) cross += A(j, j + 2);
    if (j - 2 >= 0) cross += A(j, j - 2);
  }
  return s - 0.5 * w * cross;
}

double infinite_time_average_structural(const Orbit& o, const Eigen::MatrixXd& A) {
  return infinite_time_average_structural(o.kind, o.initial_index, A);
}

double closed_form_halting(const Rational& alpha, int T_h, int N) {
  if (T_h < 1) throw InvalidArgument("T_h must be at least 1");
  return (1.0 - alpha.value()) / 2.0 * (1.0 - 2.0 / (2.0 * T_h + N + 1.0));
}

double closed_form_halting_exact(const Rational& alpha, int T_h, int N, long long T) {
  if (T_h < 1 || T < 1) throw InvalidArgument("T_h and T must be positive");
  return (1.0 - alpha.value()) * (double(T) - T_h - N / 2.0 + 0.5) / (double(T) + 1.0);
}

PaddedClosedForm closed_form_halting_padded(const Rational& alpha, int T_h, int N, double a2_weight) {
  if (T_h < 1) throw InvalidArgument("T_h must be at least 1");
  PaddedClosedForm r;
  const double Th = T_h, n = N;
  const double T1 = (n + 2.0) * Th + (n + 1.0) * n + 1.0;
  r.delta = (Th + n / 2.0 + 1.5) / T1;
  r.value = (1.0 - alpha.value()) * (1.0 - r.delta) * a2_weight;
  r.exact_delta = (Th + n / 2.0 + 0.5) / T1;
  r.exact_value = (1.0 - alpha.value()) * (1.0 - r.exact_delta) * a2_weight;
  return r;
}

namespace {

// The time dependence in compact form: a constant from equal-eigenvalue pairs
// plus one (gap, weight) entry per coherent pair.
struct Coherences {
  double stationary = 0.0;
  std::vector<std::pair<double, double>> pairs;

  Coherences(const SpectralDecomposition& sd, const Eigen::MatrixXd& A, double rel_tol) {
    const Eigen::MatrixXd B = eigenbasis_matrix(sd, A);
    const auto group = eigenvalue_groups(sd.eigenvalues, rel_tol);
    const int n = static_cast<int>(group.size());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double w = sd.coefficients(i) * sd.coefficients(j) * B(i, j);
        if (w == 0.0) continue;
        if (group[i] == group[j])
          stationary += w;
        else
          pairs.emplace_back(sd.eigenvalues(i) - sd.eigenvalues(j), w);
      }
  }

  double at(double tau) const {
    std::complex<double> s = stationary;
    for (const auto& [gap, w] : pairs) {
      const double x = gap * tau;
      // (e^{ix} - 1)/(ix)
      s += w * std::complex<double>(std::sin(x) / x, (1.0 - std::cos(x)) / x);
    }
    if (std::abs(s.imag()) > 1e-10 * std::max(1.0, std::abs(s.real())))
      throw SymmetryViolation("finite-time average has a non-negligible imaginary part");
    return s.real();
  }
};

}  // namespace

double finite_time_average(const SpectralDecomposition& sd, const Eigen::MatrixXd& A, double tau,
                           double rel_tol) {
  if (!(tau > 0)) throw InvalidArgument("tau must be positive");
  return Coherences(sd, A, rel_tol).at(tau);
}

double coherence_weight(const SpectralDecomposition& sd, const Eigen::MatrixXd& A, double rel_tol) {
  const Eigen::MatrixXd B = eigenbasis_matrix(sd, A);
  const auto group = eigenvalue_groups(sd.eigenvalues, rel_tol);
  const int n = static_cast<int>(group.size());
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (group[i] != group[j]) s += std::abs(sd.coefficients(i) * sd.coefficients(j) * B(i, j));
  return s;
}

double finite_time_bound(int T, double tau, double A_norm) {
  if (!(tau > 0)) throw InvalidArgument("tau must be positive");
  if (std::isinf(tau)) return 0.0;
  const double t1 = T + 1.0;
  return A_norm * 2.0 * t1 * t1 / (kPi * kPi * tau);
}

double relaxation_window(const SpectralDecomposition& sd, const Eigen::MatrixXd& A) {
  const Coherences coh(sd, A, 1e-9);
  double min_gap = INFINITY;
  for (const auto& [gap, w] : coh.pairs) min_gap = std::min(min_gap, std::abs(gap));
  if (!std::isfinite(min_gap)) throw InvalidArgument("no coherences: the average does not depend on tau");
  return 2.0 * 2.0 * kPi / min_gap;
}

SlopeFit relaxation_slope(const SpectralDecomposition& sd, const Eigen::MatrixXd& A, double tau_min,
                          double tau_max, int points) {
  if (!(tau_min > 0) || !(tau_max > tau_min) || points < 3)
    throw InvalidArgument("need 0 < tau_min < tau_max and at least 3 points");
  const Coherences coh(sd, A, 1e-9);
  const double inf = coh.stationary;
  // The deviation is g(tau)/tau with g bounded and quasi-periodic; the window
  // spans two periods of the slowest beat so the envelope tracks max|g|/tau.
  const double window = relaxation_window(sd, A);
  constexpr int kSamples = 64;
  SlopeFit fit;
  for (int k = 0; k < points; ++k) {
    const double tau = tau_min * std::pow(tau_max / tau_min, double(k) / (points - 1));
    double env = 0.0;
    for (int s = 0; s < kSamples; ++s) {
      const double t = tau + window * s / kSamples;
      env = std::max(env, std::abs(coh.at(t) - inf));
    }
    fit.taus.push_back(tau);
    fit.envelope.push_back(env);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int n = points;
  for (int k = 0; k < n; ++k) {
    const double x = std::log(fit.taus[k]), y = std::log(std::max(fit.envelope[k], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return fit;
}

}  // namespace thermo
