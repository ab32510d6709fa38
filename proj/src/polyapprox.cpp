#include "thermo/polyapprox.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>

namespace thermo {

namespace {

constexpr double kPi = std::numbers::pi;

// Multiply a Chebyshev series by x: x T_k = (T_{k+1} + T_{|k-1|}) / 2.
std::vector<double> times_x(const std::vector<double>& c) {
  std::vector<double> out(c.size() + 1, 0.0);
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (k == 0) {
      out[1] += c[0];
    } else {
      out[k + 1] += 0.5 * c[k];
      out[k - 1] += 0.5 * c[k];
    }
  }
  return out;
}

std::vector<double> monomial_to_chebyshev(const std::vector<double>& m) {
  // Horner in the Chebyshev algebra.
  std::vector<double> acc{0.0};
  for (auto it = m.rbegin(); it != m.rend(); ++it) {
    acc = times_x(acc);
    acc[0] += *it;
  }
  while (acc.size() > 1 && acc.back() == 0.0) acc.pop_back();
  return acc;
}

void check_spectrum(const Eigen::MatrixXcd& M) {
  if (M.rows() != M.cols()) throw DimensionMismatch("matrix must be square");
  if ((M - M.adjoint()).cwiseAbs().maxCoeff() > 1e-10) throw InvalidArgument("matrix must be Hermitian");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M, Eigen::EigenvaluesOnly);
  const double r = es.eigenvalues().cwiseAbs().maxCoeff();
  if (r > 1.0 + 1e-12) throw SpectrumOutOfRange("spectral radius " + std::to_string(r) + " > 1");
}

}  // namespace

double target_value(const CertifiedPolynomial& p, double x) {
  const double y = p.reflected ? -x : x;
  if (p.target == "sqrt") return std::sqrt(1.0 + y / 2.0);
  if (p.target == "gaussian") return std::exp(-kPi * y * y / (2.0 * p.width * p.width));
  throw InvalidArgument("polynomial has no analytic target");
}

double evaluate(const CertifiedPolynomial& p, double x) {
  double b1 = 0.0, b2 = 0.0;
  for (int k = p.degree(); k >= 1; --k) {
    const double b0 = p.cheb[k] + 2.0 * x * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return (p.cheb.empty() ? 0.0 : p.cheb[0]) + x * b1 - b2;
}

double grid_error(const CertifiedPolynomial& p, int points) {
  double e = 0.0;
  for (int i = 0; i < points; ++i) {
    const double x = -1.0 + 2.0 * i / (points - 1);
    e = std::max(e, std::abs(evaluate(p, x) - p.scale * target_value(p, x)));
  }
  return e;
}

CertifiedPolynomial sqrt_poly(double eps) {
  if (!(eps > 0 && eps <= 0.5)) throw InvalidArgument("sqrt_poly needs 0 < eps <= 1/2");
  // On |x| <= 1 the n-th term is at most t_n = C(2n,n)/(2n-1) 8^-n, and
  // sum_{n>=1} t_n = 1 - 2^{-1/2}, so the tail after degree n is known exactly.
  const double total = 1.0 - 1.0 / std::sqrt(2.0);
  std::vector<double> mono{1.0};
  double partial = 0.0;
  double binom = 1.0;  // C(2n, n)
  for (int n = 1; n < 200; ++n) {
    binom *= double(2 * n) * double(2 * n - 1) / (double(n) * double(n));
    const double t = binom / (2.0 * n - 1.0) * std::pow(0.125, n);
    // b_n (-1/8)^n with b_n = C(2n,n)/(1-2n): sign is (-1)^{n+1}
    mono.push_back((n % 2 == 1 ? 1.0 : -1.0) * t);
    partial += t;
    if (total - partial <= 0.9 * eps) break;
  }
  CertifiedPolynomial p;
  p.cheb = monomial_to_chebyshev(mono);
  p.target = "sqrt";
  p.grid_error = grid_error(p);
  const double tail = std::max(0.0, total - partial);
  p.eps = std::max(tail + 1e-14, p.grid_error);
  if (p.eps > eps) throw InvalidArgument("sqrt_poly failed to certify");
  p.eps = eps;
  return p;
}

CertifiedPolynomial gaussian_poly(double w, double eps) {
  if (!(w > 0)) throw InvalidArgument("gaussian_poly needs w/alpha > 0");
  if (!(eps > 0 && eps <= 1)) throw InvalidArgument("gaussian_poly needs 0 < eps <= 1");
  const double Y = kPi / (2.0 * w * w);
  const double z = Y / 2.0;
  // exp(-Y(1+s)/2) = e^{-z} [I_0(z) + 2 sum_j (-1)^j I_j(z) T_j(s)], and s = T_2(x).
  std::vector<double> c;
  for (int j = 0;; ++j) {
    const double v = std::exp(-z) * std::cyl_bessel_i(double(j), z);
    c.push_back(j == 0 ? v : 2.0 * (j % 2 ? -v : v));
    // Once I_{j+1}/I_j < z/(2j+1) <= 1/2 the remaining tail is below the last term.
    if (j > 0 && z / (2.0 * j + 1.0) <= 0.5 && std::abs(c.back()) < 1e-18) break;
    if (j > 4000) throw InvalidArgument("gaussian_poly: expansion did not converge");
  }
  const int J = static_cast<int>(c.size()) - 1;
  std::vector<double> tail(J + 2, 0.0);
  tail[J + 1] = std::abs(c[J]);  // bound on everything beyond J
  for (int j = J; j >= 0; --j) tail[j] = tail[j + 1] + std::abs(c[j]);
  int k = 0;
  while (k < J && tail[k + 1] > 0.5 * eps) ++k;
  CertifiedPolynomial p;
  p.target = "gaussian";
  p.width = w;
  p.cheb.assign(2 * k + 1, 0.0);
  for (int j = 0; j <= k; ++j) p.cheb[2 * j] = c[j];
  p.grid_error = grid_error(p);
  p.eps = std::max(tail[k + 1] + 1e-14, p.grid_error);
  if (p.eps > eps) throw InvalidArgument("gaussian_poly failed to certify");
  p.eps = eps;
  return p;
}

int sqrt_degree_bound(double eps) { return static_cast<int>(std::floor(std::log2(1.0 / eps))) + 2; }

int gaussian_degree_bound(double w_over_alpha, double eps) {
  const double L = std::log(1.0 / eps);
  return static_cast<int>(std::floor(3.0 * std::max(1.0 / w_over_alpha, std::sqrt(L)) * std::sqrt(L))) + 2;
}

CertifiedPolynomial from_chebyshev(std::vector<double> coeffs, const std::string& target) {
  CertifiedPolynomial p;
  p.cheb = std::move(coeffs);
  if (p.cheb.empty()) p.cheb.push_back(0.0);
  p.target = target;
  return p;
}

double sup_norm(const CertifiedPolynomial& p) {
  const int points = std::max(20001, 40 * (p.degree() + 1));
  std::vector<std::pair<double, double>> vals;
  vals.reserve(points);
  for (int i = 0; i < points; ++i) {
    const double x = -1.0 + 2.0 * i / (points - 1);
    vals.push_back({std::abs(evaluate(p, x)), x});
  }
  std::partial_sort(vals.begin(), vals.begin() + std::min(8, points), vals.end(),
                    [](const auto& a, const auto& b) { return a.first > b.first; });
  double best = vals.front().first;
  const double h = 2.0 / (points - 1);
  for (int t = 0; t < std::min(8, points); ++t) {
    double a = std::max(-1.0, vals[t].second - h), b = std::min(1.0, vals[t].second + h);
    for (int it = 0; it < 80; ++it) {
      const double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
      if (std::abs(evaluate(p, m1)) < std::abs(evaluate(p, m2)))
        a = m1;
      else
        b = m2;
    }
    best = std::max(best, std::abs(evaluate(p, 0.5 * (a + b))));
  }
  return best;
}

CertifiedPolynomial scaled(const CertifiedPolynomial& p, double factor) {
  CertifiedPolynomial q = p;
  for (double& c : q.cheb) c *= factor;
  q.scale *= factor;
  q.eps *= std::abs(factor);
  q.grid_error *= std::abs(factor);
  return q;
}

CertifiedPolynomial rescale_half(const CertifiedPolynomial& p) {
  const double s = sup_norm(p);
  double f = 1.0;
  while (s * f > 0.5 + 1e-15) f *= 0.5;
  return scaled(p, f);
}

CertifiedPolynomial unscale(const CertifiedPolynomial& p) { return scaled(p, 1.0 / p.scale); }

CertifiedPolynomial reflect(const CertifiedPolynomial& p) {
  CertifiedPolynomial q = p;
  for (std::size_t k = 1; k < q.cheb.size(); k += 2) q.cheb[k] = -q.cheb[k];
  q.reflected = !p.reflected;
  return q;
}

std::vector<double> monomial_coefficients(const CertifiedPolynomial& p) {
  const int n = p.degree();
  std::vector<double> out(n + 1, 0.0);
  std::vector<double> tkm1{1.0}, tk{0.0, 1.0};
  auto add = [&](const std::vector<double>& t, double c) {
    for (std::size_t i = 0; i < t.size(); ++i) out[i] += c * t[i];
  };
  add(tkm1, p.cheb[0]);
  if (n >= 1) add(tk, p.cheb[1]);
  for (int k = 2; k <= n; ++k) {
    std::vector<double> next(k + 1, 0.0);
    for (std::size_t i = 0; i < tk.size(); ++i) next[i + 1] += 2.0 * tk[i];
    for (std::size_t i = 0; i < tkm1.size(); ++i) next[i] -= tkm1[i];
    add(next, p.cheb[k]);
    tkm1 = std::move(tk);
    tk = std::move(next);
  }
  return out;
}

Eigen::MatrixXcd matrix_apply_eigen(const CertifiedPolynomial& p, const Eigen::MatrixXcd& M) {
  check_spectrum(M);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M);
  Eigen::VectorXd f(M.rows());
  for (Eigen::Index i = 0; i < f.size(); ++i) f(i) = evaluate(p, std::clamp(es.eigenvalues()(i), -1.0, 1.0));
  return es.eigenvectors() * f.asDiagonal() * es.eigenvectors().adjoint();
}

Eigen::MatrixXcd matrix_apply_chebyshev(const CertifiedPolynomial& p, const Eigen::MatrixXcd& M) {
  check_spectrum(M);
  const Eigen::Index n = M.rows();
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n, n);
  Eigen::MatrixXcd b1 = Eigen::MatrixXcd::Zero(n, n), b2 = Eigen::MatrixXcd::Zero(n, n);
  for (int k = p.degree(); k >= 1; --k) {
    Eigen::MatrixXcd b0 = p.cheb[k] * I + 2.0 * M * b1 - b2;
    b2 = std::move(b1);
    b1 = std::move(b0);
  }
  return p.cheb[0] * I + M * b1 - b2;
}

Eigen::MatrixXcd matrix_apply(const CertifiedPolynomial& p, const Eigen::MatrixXcd& M) {
  return matrix_apply_chebyshev(p, M);
}

void write_polynomial(const CertifiedPolynomial& p, std::ostream& out) {
  out << std::setprecision(17);
  out << "polynomial chebyshev\n";
  out << "target " << p.target << "\n";
  if (p.target == "gaussian") out << "width " << p.width << "\n";
  out << "degree " << p.degree() << "\n";
  out << "eps " << p.eps << "\n";
  out << "grid_error " << p.grid_error << "\n";
  out << "scale " << p.scale << "\n";
  out << "reflected " << (p.reflected ? 1 : 0) << "\n";
  out << "coefficients";
  for (double c : p.cheb) out << ' ' << c;
  out << "\n";
}

}  // namespace thermo
