#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

#include "thermo/common.hpp"

namespace thermo {

// Polynomial in the Chebyshev basis on [-1, 1], carrying the target it
// approximates and a certified sup-norm error bound against scale * target.
struct CertifiedPolynomial {
  std::vector<double> cheb;  // p(x) = sum_k cheb[k] T_k(x)
  std::string target;        // "sqrt", "gaussian", "custom"
  double width = 0.0;        // w / alpha for the Gaussian target
  double eps = 0.0;          // certified sup |p - scale * target|
  double grid_error = 0.0;   // measured on the certification grid
  double scale = 1.0;        // factor applied by rescale_half
  bool reflected = false;    // p(-x) of the original construction

  int degree() const { return cheb.empty() ? 0 : static_cast<int>(cheb.size()) - 1; }
};

// sqrt(1 + x/2) and exp(-pi x^2 / (2 w^2)) before scaling and reflection.
double target_value(const CertifiedPolynomial& p, double x);

// Clenshaw evaluation.
double evaluate(const CertifiedPolynomial& p, double x);

// Truncated binomial series of sqrt(1 + x/2), degree chosen so the exact
// tail bound is at most 0.9 eps.
CertifiedPolynomial sqrt_poly(double eps);

// Chebyshev expansion of exp(-y) on [0, Y], Y = pi/(2 w^2), composed with
// y = Y x^2. Coefficients are Bessel-I values; the truncation tail is bounded
// rigorously. Degree is even.
CertifiedPolynomial gaussian_poly(double w_over_alpha, double eps);

// Degree ceilings with frozen constants, shaped like the asymptotic counts:
// log2(1/eps) + 2 for the square root, and
// 3 max{alpha/w, sqrt(L)} sqrt(L) + 2 with L = ln(1/eps) for the Gaussian.
int sqrt_degree_bound(double eps);
int gaussian_degree_bound(double w_over_alpha, double eps);

CertifiedPolynomial from_chebyshev(std::vector<double> coeffs, const std::string& target = "custom");

// Largest 2^-k with sup|p| 2^-k <= 1/2.
CertifiedPolynomial rescale_half(const CertifiedPolynomial& p);
CertifiedPolynomial unscale(const CertifiedPolynomial& p);
CertifiedPolynomial reflect(const CertifiedPolynomial& p);
CertifiedPolynomial scaled(const CertifiedPolynomial& p, double factor);

// sup over [-1,1]: dense grid plus local refinement around the largest values.
double sup_norm(const CertifiedPolynomial& p);

// max |p - scale*target| on `points` equispaced points of [-1, 1].
double grid_error(const CertifiedPolynomial& p, int points = 10001);

// Monomial coefficients, for export only.
std::vector<double> monomial_coefficients(const CertifiedPolynomial& p);

// p(M) for Hermitian M with spectrum in [-1, 1].
Eigen::MatrixXcd matrix_apply_eigen(const CertifiedPolynomial& p, const Eigen::MatrixXcd& M);
Eigen::MatrixXcd matrix_apply_chebyshev(const CertifiedPolynomial& p, const Eigen::MatrixXcd& M);
Eigen::MatrixXcd matrix_apply(const CertifiedPolynomial& p, const Eigen::MatrixXcd& M);

void write_polynomial(const CertifiedPolynomial& p, std::ostream& out);

}  // namespace thermo
