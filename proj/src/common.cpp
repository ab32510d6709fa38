#include "thermo/common.hpp"

#include <cmath>
#include <numeric>

namespace thermo {

std::string Rational::str() const {
  return std::to_string(num) + "/" + std::to_string(den);
}

Rational Rational::parse(const std::string& text) {
  Rational r;
  try {
    auto slash = text.find('/');
    if (slash == std::string::npos) {
      double v = std::stod(text);
      // Accept simple decimals such as 0.25 by snapping to a power-of-ten grid.
      std::int64_t den = 1;
      while (den < 1000000 && std::abs(v * den - std::llround(v * den)) > 1e-12) den *= 10;
      r.num = std::llround(v * den);
      r.den = den;
    } else {
      r.num = std::stoll(text.substr(0, slash));
      r.den = std::stoll(text.substr(slash + 1));
    }
  } catch (const std::exception&) {
    throw ParseError("cannot parse rational '" + text + "'");
  }
  if (r.den <= 0) throw ParseError("rational with non-positive denominator: " + text);
  auto g = std::gcd(r.num, r.den);
  if (g > 1) {
    r.num /= g;
    r.den /= g;
  }
  return r;
}

}  // namespace thermo
