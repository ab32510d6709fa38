#include "thermo/qsim.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "thermo/ensembles.hpp"
#include "thermo/observables.hpp"

namespace thermo {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEtaFloor = 1e-13;

double spectral_norm(const Eigen::MatrixXcd& M) {
  if (M.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
  return svd.singularValues()(0);
}

bool is_hermitian(const Eigen::MatrixXcd& M, double tol = 1e-10) {
  return M.rows() == M.cols() && (M - M.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace

Eigen::MatrixXcd encoded_block(const BlockEncoding& be) {
  const Eigen::Index n = be.system_dim();
  return be.U.topLeftCorner(n, n);
}

double unitarity_error(const BlockEncoding& be) {
  const Eigen::Index n = be.U.rows();
  return (be.U.adjoint() * be.U - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
}

BlockEncoding block_encode_exact(const Eigen::MatrixXcd& M, double alpha) {
  if (M.rows() != M.cols()) throw DimensionMismatch("block encodings need a square operator");
  if (!(alpha > 0)) throw InvalidArgument("alpha must be positive");
  const double norm = spectral_norm(M);
  if (norm > alpha * (1.0 + 1e-12)) throw NormTooLarge("||M|| = " + std::to_string(norm) + " > alpha");
  const Eigen::Index n = M.rows();
  const Eigen::MatrixXcd B = M / alpha;
  // With B = W S V^+ the off-diagonal blocks are W sqrt(1-S^2) W^+ and
  // V sqrt(1-S^2) V^+, which stay accurate when singular values touch 1.
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(B, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd c =
      (1.0 - svd.singularValues().cwiseMin(1.0).array().square()).cwiseMax(0.0).sqrt().matrix();
  BlockEncoding be;
  be.alpha = alpha;
  be.U.resize(2 * n, 2 * n);
  be.U.topLeftCorner(n, n) = B;
  be.U.topRightCorner(n, n) = svd.matrixU() * c.asDiagonal() * svd.matrixU().adjoint();
  be.U.bottomLeftCorner(n, n) = svd.matrixV() * c.asDiagonal() * svd.matrixV().adjoint();
  be.U.bottomRightCorner(n, n) = -B.adjoint();
  be.eps = unitarity_error(be);
  return be;
}

BlockEncoding apply_poly_to_encoding(const BlockEncoding& be, const CertifiedPolynomial& p) {
  const Eigen::MatrixXcd B = encoded_block(be);
  if (!is_hermitian(B)) throw InvalidArgument("polynomial transforms need a Hermitian block");
  const double sup = sup_norm(p);
  if (sup > 0.5 + 1e-12) throw PolyNotSubnormalized("sup|p| = " + std::to_string(sup) + " > 1/2");
  const Eigen::MatrixXcd P = matrix_apply(p, B);
  BlockEncoding out = block_encode_exact(P, 1.0);
  // Implementation error: recurrence against the eigendecomposition oracle.
  const double delta = std::max(out.eps, (P - matrix_apply_eigen(p, B)).cwiseAbs().maxCoeff());
  out.a = be.a + 2;
  out.eps = 4.0 * p.degree() * std::sqrt(be.eps / be.alpha) + delta;
  return out;
}

QuantumState product_state(const std::vector<Register>& regs, const std::vector<Eigen::VectorXcd>& parts) {
  if (regs.size() != parts.size() || regs.empty()) throw DimensionMismatch("one vector per register");
  Eigen::VectorXcd amp = Eigen::VectorXcd::Ones(1);
  for (std::size_t r = 0; r < regs.size(); ++r) {
    if (parts[r].size() != regs[r].dim) throw DimensionMismatch("register " + regs[r].name);
    Eigen::VectorXcd next(amp.size() * parts[r].size());
    for (Eigen::Index i = 0; i < amp.size(); ++i) next.segment(i * parts[r].size(), parts[r].size()) = amp(i) * parts[r];
    amp = std::move(next);
  }
  const double nrm = amp.norm();
  if (std::abs(nrm - 1.0) > 1e-12) throw InvalidArgument("state must have unit norm");
  return {amp, regs};
}

PostselectResult apply_and_postselect(const BlockEncoding& be, const QuantumState& s, const std::string& reg) {
  Eigen::Index outer = 1, inner = 1, R = 0;
  bool found = false;
  for (const auto& r : s.registers) {
    if (r.name == reg) {
      found = true;
      R = r.dim;
    } else if (found) {
      inner *= r.dim;
    } else {
      outer *= r.dim;
    }
  }
  if (!found) throw InvalidArgument("no register named " + reg);
  if (R != be.system_dim()) throw DimensionMismatch("register " + reg + " does not match the encoding");
  if (outer * R * inner != s.dim()) throw DimensionMismatch("register sizes do not match the state");
  using RowMat = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::MatrixXcd B = encoded_block(be);
  PostselectResult res;
  res.state.registers = s.registers;
  res.state.amp.resize(s.dim());
  for (Eigen::Index o = 0; o < outer; ++o) {
    Eigen::Map<const RowMat> in(s.amp.data() + o * R * inner, R, inner);
    Eigen::Map<RowMat> out(res.state.amp.data() + o * R * inner, R, inner);
    out = B * in;
  }
  res.success_prob = res.state.amp.squaredNorm();
  if (res.success_prob < 1e-300) throw ZeroProbability("ancilla-zero outcome has probability 0");
  res.state.amp /= std::sqrt(res.success_prob);
  return res;
}

int qpe_register_bits(int m, double eps) {
  if (m < 0 || !(eps > 0 && eps < 1)) throw InvalidArgument("qpe needs m >= 0 and 0 < eps < 1");
  return m + 1 + static_cast<int>(std::ceil(2.0 * std::log2(1.0 / eps)));
}

double qpe_kernel(double phi, std::int64_t b, int m_prime) {
  const double M = std::ldexp(1.0, m_prime);
  double delta = phi - static_cast<double>(b) / M;
  delta -= std::round(delta);
  const double den = std::sin(kPi * delta);
  if (std::abs(den) < 1e-300) return 1.0;
  const double x = std::fmod(std::ldexp(delta, m_prime), 2.0);
  const double num = std::sin(kPi * x);
  return (num * num) / (M * M * den * den);
}

std::complex<double> qpe_overlap(double delta_phi, int m_prime) {
  double delta = delta_phi - std::round(delta_phi);
  if (delta == 0.0) return 1.0;
  const double M = std::ldexp(1.0, m_prime);
  const double x = std::fmod(std::ldexp(delta, m_prime), 2.0);
  const double mag = std::sin(kPi * x) / (M * std::sin(kPi * delta));
  return std::polar(mag, kPi * (x - delta));
}

QPEResult phase_estimation(const std::vector<double>& phases, const Eigen::VectorXcd& overlaps, int m,
                           double eps) {
  if (static_cast<Eigen::Index>(phases.size()) != overlaps.size())
    throw DimensionMismatch("one overlap per eigenphase");
  if (std::abs(overlaps.squaredNorm() - 1.0) > 1e-10) throw InvalidArgument("overlaps must have unit norm");
  for (double p : phases)
    if (p < 0.0 || p >= 1.0) throw InvalidArgument("eigenphases must lie in [0, 1)");
  QPEResult r;
  r.m = m;
  r.eps = eps;
  r.m_prime = qpe_register_bits(m, eps);
  const double half_window = std::ldexp(1.0, -(m + 1));
  if (r.m_prime <= 20) {
    r.full_register = true;
    const std::int64_t M = std::int64_t{1} << r.m_prime;
    r.bin_mass.assign(M, 0.0);
    for (std::size_t i = 0; i < phases.size(); ++i) {
      const double w = std::norm(overlaps(static_cast<Eigen::Index>(i)));
      std::vector<double> bins(M);
      double inside = 0.0;
      for (std::int64_t b = 0; b < M; ++b) {
        const double k = qpe_kernel(phases[i], b, r.m_prime);
        bins[b] = w * k;
        r.bin_mass[b] += w * k;
        double dist = std::abs(static_cast<double>(b) / M - phases[i]);
        dist = std::min(dist, 1.0 - dist);
        if (dist <= half_window) inside += k;
      }
      r.component_bins.push_back(std::move(bins));
      r.tail_mass.push_back(std::max(0.0, 1.0 - inside));
    }
  } else {
    // Standard tail estimate: mass farther than k bins from the phase is at
    // most 1/(2(k-1)).
    const double k = std::ldexp(1.0, r.m_prime - m - 1);
    r.tail_mass.assign(phases.size(), 1.0 / (2.0 * (k - 1.0)));
  }
  return r;
}

LTASchedule lta_schedule(double eps, int d, int N) {
  if (!(eps > 0)) throw InvalidArgument("eps must be positive");
  if (d < 1 || N < 1) throw InvalidArgument("d and N must be positive");
  const double dN = double(d) * N;
  LTASchedule s;
  s.eps = eps;
  s.eps1 = 0.0;
  s.eps2 = eps / (8.0 * dN);
  s.eps3 = eps / (64.0 * dN);
  s.eps4 = eps / (128.0 * dN);
  s.shots = static_cast<std::int64_t>(std::ceil(1.0 / (s.eps4 * s.eps4)));
  s.systematic_budget = 32.0 * dN * (s.eps2 * (2.0 + s.eps2) / 16.0 + s.eps3 / 2.0);
  return s;
}

LTAResult estimate_long_time_average(const Eigen::MatrixXd& H_eff, const Eigen::MatrixXd& A_orbit,
                                     const Eigen::VectorXd& psi0, const LTAOptions& opt) {
  if (!(opt.promise_gap > 0)) throw PromiseUnknown("no eigenvalue gap supplied");
  const Eigen::Index T = H_eff.rows();
  if (H_eff.cols() != T || A_orbit.rows() != T || A_orbit.cols() != T || psi0.size() != T)
    throw DimensionMismatch("H_eff, A and psi0 must share the orbit dimension");
  LTAResult res;
  res.schedule = lta_schedule(opt.eps, opt.d, opt.N);
  const double dN = double(opt.d) * opt.N;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H_eff);
  Eigen::VectorXd lam = es.eigenvalues();
  // Snap numerically equal eigenvalues so degenerate pairs see the kernel at 0.
  const std::vector<int> group = eigenvalue_groups(lam);
  for (Eigen::Index i = 0; i < T; ++i) lam(i) = lam(group[i]);
  const Eigen::MatrixXd& V = es.eigenvectors();
  const Eigen::VectorXd c = V.transpose() * psi0;

  // e^{iH t} with eigenphases lam / (2R) inside (-1/2, 1/2).
  const double R = (T > 0 ? lam.cwiseAbs().maxCoeff() : 0.0) + 1.0;
  res.m = std::max(0, static_cast<int>(std::ceil(std::log2(2.0 * R / opt.promise_gap))));
  res.m_prime = std::min(62, qpe_register_bits(res.m, res.schedule.eps3));

  const CertifiedPolynomial p = rescale_half(reflect(sqrt_poly(std::min(0.5, res.schedule.eps2))));
  res.poly_scale = p.scale;
  const Eigen::MatrixXcd X = (A_orbit / dN).cast<std::complex<double>>();
  const Eigen::MatrixXd B = matrix_apply(p, X).real();
  const Eigen::MatrixXd G = V.transpose() * (B * B) * V;

  double pr = 0.0;
  for (Eigen::Index i = 0; i < T; ++i) {
    if (c(i) == 0.0) continue;
    for (Eigen::Index j = 0; j < T; ++j) {
      if (c(j) == 0.0) continue;
      const double dphi = (lam(j) - lam(i)) / (2.0 * R);
      pr += c(i) * c(j) * std::real(qpe_overlap(dphi, res.m_prime)) * G(i, j);
    }
  }
  res.probability = std::clamp(pr, 0.0, 1.0);

  std::int64_t shots = opt.shots < 0 ? res.schedule.shots : opt.shots;
  if (shots == 0) {
    res.sampled_probability = res.probability;
  } else {
    std::mt19937_64 rng(opt.seed);
    std::binomial_distribution<std::int64_t> draw(shots, res.probability);
    res.sampled_probability = static_cast<double>(draw(rng)) / static_cast<double>(shots);
  }
  res.shots = shots;
  res.gamma = 2.0 * dN * (1.0 - 16.0 * res.sampled_probability);
  return res;
}

PrepSchedule make_prep_schedule(double eps, double alpha, double w) {
  if (!(eps > 0 && eps <= 2)) throw ScheduleInvalid("eps must lie in (0, 2]");
  if (!(alpha > 0 && w > 0)) throw ScheduleInvalid("alpha and w must be positive");
  PrepSchedule s;
  s.eps = eps;
  s.eps_p = eps / 2.0;
  s.eta_bound = eps * std::exp(-kPi * alpha * alpha / (w * w)) / 18.0;
  s.eta = std::max(s.eta_bound, kEtaFloor);
  s.delta_bound = eps * eps * std::exp(-kPi * alpha * alpha / (2.0 * w * w)) / 32.0;
  s.delta = 0.5 * s.delta_bound;
  s.eps_H = 0.0;
  return s;
}

void validate_schedule(const PrepSchedule& s, double alpha, double w) {
  const PrepSchedule ref = make_prep_schedule(s.eps, alpha, w);
  if (std::abs(s.eps_p - s.eps / 2.0) > 1e-12 * s.eps) throw ScheduleInvalid("eps_p must equal eps/2");
  if (!(s.eta > 0) || s.eta > std::max(ref.eta_bound, kEtaFloor) * (1.0 + 1e-12))
    throw ScheduleInvalid("eta exceeds eps e^{-pi alpha^2/w^2}/18");
  if (!(s.delta >= 0) || s.delta >= ref.delta_bound) throw ScheduleInvalid("delta must stay below its bound");
  if (s.eps_H != 0.0) throw ScheduleInvalid("the simulator encodes H exactly, eps_H must be 0");
}

namespace {

struct GaussianEncoding {
  CertifiedPolynomial p;  // sup |p| <= 1/2, approximates s * g(x)
  double s = 1.0;
};

GaussianEncoding gaussian_encoding(double alpha, double w, const PrepSchedule& schedule) {
  CertifiedPolynomial g = gaussian_poly(w / alpha, std::min(1.0, schedule.eta));
  const double sup = sup_norm(g);
  if (sup > 1.0) g = scaled(g, 1.0 / sup);
  GaussianEncoding enc;
  enc.p = rescale_half(g);
  enc.s = enc.p.scale;
  return enc;
}

void check_width(double alpha, double w, double tries) {
  const double min_w = alpha / std::sqrt(std::log(tries));
  if (w < min_w)
    throw WidthBelowBudget("w = " + std::to_string(w) + " < alpha/sqrt(ln budget) = " + std::to_string(min_w));
}

double floor_probability(double s, double alpha, double w, const PrepSchedule& sch) {
  const double v = std::exp(-kPi * alpha * alpha / (2.0 * w * w)) - sch.eta - sch.delta;
  return v > 0 ? (s * v) * (s * v) : 0.0;
}

}  // namespace

Eigen::MatrixXcd exact_microcanonical(const Eigen::MatrixXcd& H, double E, double w) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
  const EnsembleWeights ew = microcanonical_weights(es.eigenvalues(), {E, w});
  const Eigen::VectorXd wv = Eigen::Map<const Eigen::VectorXd>(ew.weights.data(), ew.weights.size());
  return es.eigenvectors() * wv.cast<std::complex<double>>().asDiagonal() * es.eigenvectors().adjoint();
}

double trace_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a - b, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

PrepResult prepare_microcanonical(const Eigen::MatrixXcd& H, double E, double w, const PrepSchedule& schedule,
                                  const PrepOptions& opt) {
  if (!is_hermitian(H)) throw InvalidArgument("H must be Hermitian");
  const double need = spectral_norm(H) + std::abs(E);
  const double alpha = opt.alpha > 0 ? opt.alpha : need;
  if (alpha < need * (1.0 - 1e-12)) throw NormTooLarge("alpha < ||H|| + |E|");
  check_width(alpha, w, opt.prep_tries);
  validate_schedule(schedule, alpha, w);

  const Eigen::Index n = H.rows();
  const GaussianEncoding enc = gaussian_encoding(alpha, w, schedule);
  const Eigen::MatrixXcd X = (H - E * Eigen::MatrixXcd::Identity(n, n)) / alpha;
  const BlockEncoding bh = block_encode_exact(X, 1.0);
  const BlockEncoding bg = apply_poly_to_encoding(bh, enc.p);

  // Maximally entangled system (x) copy state, block on the system, then
  // trace out the copy.
  Eigen::VectorXcd phi = Eigen::VectorXcd::Zero(n * n);
  for (Eigen::Index i = 0; i < n; ++i) phi(i * n + i) = 1.0 / std::sqrt(double(n));
  const QuantumState s0{phi, {{"system", n}, {"copy", n}}};
  const PostselectResult post = apply_and_postselect(bg, s0, "system");
  using RowMat = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMat> psi(post.state.amp.data(), n, n);

  PrepResult r;
  r.rho = psi * psi.adjoint();
  r.success_prob = post.success_prob;
  r.expected_tries = 1.0 / post.success_prob;
  r.alpha = alpha;
  r.degree = enc.p.degree();
  r.schedule = schedule;
  r.floor = floor_probability(enc.s, alpha, w, schedule);
  const double composed = bg.eps / enc.s + schedule.eta + schedule.delta;
  r.bound = std::sqrt(8.0 * composed) + schedule.eps_p;
  if (opt.compare_exact) r.trace_distance = trace_distance(r.rho, exact_microcanonical(H, E, w));
  return r;
}

SpectralPrep prepare_microcanonical_spectrum(const Eigen::VectorXd& eigs, double E, double w,
                                             const PrepSchedule& schedule, const PrepOptions& opt) {
  if (eigs.size() == 0) throw InvalidArgument("empty spectrum");
  const double need = eigs.cwiseAbs().maxCoeff() + std::abs(E);
  const double alpha = opt.alpha > 0 ? opt.alpha : need;
  if (alpha < need * (1.0 - 1e-12)) throw NormTooLarge("alpha < ||H|| + |E|");
  check_width(alpha, w, opt.prep_tries);
  validate_schedule(schedule, alpha, w);
  const GaussianEncoding enc = gaussian_encoding(alpha, w, schedule);
  SpectralPrep r;
  r.weights.resize(eigs.size());
  for (Eigen::Index i = 0; i < eigs.size(); ++i) {
    const double v = evaluate(enc.p, (eigs(i) - E) / alpha);
    r.weights(i) = v * v;
  }
  const double total = r.weights.sum();
  if (total < 1e-300) throw ZeroProbability("ancilla-zero outcome has probability 0");
  r.success_prob = total / double(eigs.size());
  r.expected_tries = 1.0 / r.success_prob;
  r.weights /= total;
  r.alpha = alpha;
  r.degree = enc.p.degree();
  r.schedule = schedule;
  r.floor = floor_probability(enc.s, alpha, w, schedule);
  const EnsembleWeights ex = microcanonical_weights(eigs, {E, w});
  for (Eigen::Index i = 0; i < eigs.size(); ++i) r.trace_distance += std::abs(r.weights(i) - ex.weights[i]);
  return r;
}

MCEstimate estimate_mc_observable(const Eigen::MatrixXcd& H, const Eigen::MatrixXcd& A, double E, double w,
                                  double eps, std::uint64_t seed, const PrepOptions& opt) {
  if (A.rows() != H.rows() || !is_hermitian(A)) throw DimensionMismatch("A must be Hermitian on H's space");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ea(A);
  const Eigen::VectorXd& a = ea.eigenvalues();
  const double normA = std::max(a.cwiseAbs().maxCoeff(), 1e-300);
  MCEstimate m;
  m.prep_eps = std::min(2.0, eps / (2.0 * normA));
  const double need = spectral_norm(H) + std::abs(E);
  const PrepResult prep = prepare_microcanonical(
      H, E, w, make_prep_schedule(m.prep_eps, opt.alpha > 0 ? opt.alpha : need, w), opt);
  std::vector<double> probs(a.size());
  for (Eigen::Index k = 0; k < a.size(); ++k)
    probs[k] = std::max(0.0, std::real(ea.eigenvectors().col(k).dot(prep.rho * ea.eigenvectors().col(k))));
  m.exact = std::real((A * prep.rho).trace());
  const double spread = a.maxCoeff() - a.minCoeff();
  if (spread <= 1e-14) {
    m.samples = 1;
    m.estimate = a(0);
    return m;
  }
  const double t = eps / 2.0;
  m.samples = static_cast<std::int64_t>(std::ceil(spread * spread * std::log(6.0) / (2.0 * t * t)));
  std::mt19937_64 rng(seed);
  std::discrete_distribution<Eigen::Index> draw(probs.begin(), probs.end());
  double sum = 0.0;
  for (std::int64_t k = 0; k < m.samples; ++k) sum += a(draw(rng));
  m.estimate = sum / double(m.samples);
  return m;
}

MCEstimate estimate_mc_projector(const Eigen::VectorXd& eigs, const Eigen::VectorXd& level_values, double E,
                                 double w, double eps, std::uint64_t seed, const PrepOptions& opt) {
  if (level_values.size() != eigs.size()) throw DimensionMismatch("one value per level");
  MCEstimate m;
  m.prep_eps = std::min(2.0, eps / 2.0);
  const double need = eigs.cwiseAbs().maxCoeff() + std::abs(E);
  const SpectralPrep prep = prepare_microcanonical_spectrum(
      eigs, E, w, make_prep_schedule(m.prep_eps, opt.alpha > 0 ? opt.alpha : need, w), opt);
  m.exact = std::clamp(prep.weights.dot(level_values), 0.0, 1.0);
  const double t = eps / 2.0;
  m.samples = static_cast<std::int64_t>(std::ceil(std::log(6.0) / (2.0 * t * t)));
  std::mt19937_64 rng(seed);
  std::binomial_distribution<std::int64_t> draw(m.samples, m.exact);
  m.estimate = static_cast<double>(draw(rng)) / double(m.samples);
  return m;
}

}  // namespace thermo
