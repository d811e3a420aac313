#include "roadnet/special_functions.hpp"

#include <cmath>
#include <limits>

#include "roadnet/errors.hpp"

namespace roadnet {

namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxIter = 500;

// Σ_{k>=1} (-1)^{k+1} x^k / (k·k!)
double ein_series(double x) {
  double term = x; // x^k / k!
  double sum = x;
  for (int k = 2; k < kMaxIter; ++k) {
    term *= -x / k;
    const double add = term / k;
    sum += add;
    if (std::abs(add) <= kEps * std::abs(sum)) return sum;
  }
  throw InternalError("Ein series did not converge");
}

double e1_continued_fraction(double x) {
  constexpr double kTiny = std::numeric_limits<double>::min() / kEps;
  double b = x + 1.0;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) <= kEps) return h * std::exp(-x);
  }
  throw InternalError("E1 continued fraction did not converge");
}

} // namespace

double expint_e1(double x) {
  if (!(x > 0.0)) throw InputError("expint_e1 requires x > 0");
  if (x <= 1.0) return -kEulerGamma - std::log(x) + ein_series(x);
  return e1_continued_fraction(x);
}

double expint_ein(double x) {
  if (x < 0.0 || std::isnan(x)) throw InputError("expint_ein requires x >= 0");
  if (x == 0.0) return 0.0;
  if (x <= 1.0) return ein_series(x);
  return kEulerGamma + std::log(x) + e1_continued_fraction(x);
}

} // namespace roadnet
