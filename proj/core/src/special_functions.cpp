#include "h2pc/special_functions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace h2pc::math {

namespace {

constexpr double kHalfLogTwoPi = 0.91893853320467274178032973640562;

// Stirling series for log Γ(x), valid for x >= 15.
double stirling_log_gamma(double x) {
  // B_{2k} / (2k (2k - 1)) for k = 1..8
  static constexpr double kCoeffs[] = {
      1.0 / 12.0,          -1.0 / 360.0,         1.0 / 1260.0,
      -1.0 / 1680.0,       1.0 / 1188.0,         -691.0 / 360360.0,
      1.0 / 156.0,         -3617.0 / 122400.0,
  };
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double series = 0.0;
  double power = inv;
  for (double c : kCoeffs) {
    series += c * power;
    power *= inv2;
  }
  return (x - 0.5) * std::log(x) - x + kHalfLogTwoPi + series;
}

double gamma_p_series(double a, double x, double log_prefix) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < 100000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-17) break;
  }
  return sum * std::exp(log_prefix);
}

double gamma_q_fraction(double a, double x, double log_prefix) {
  constexpr double kTiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 100000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-17) break;
  }
  return std::exp(log_prefix) * h;
}

}  // namespace

double log_gamma(double x) {
  if (!(x > 0.0)) {
    throw std::domain_error("log_gamma: argument must be positive");
  }
  if (x >= 15.0) return stirling_log_gamma(x);
  // log Γ(x) = log Γ(x + k) - log(x (x+1) ... (x+k-1))
  double shift = 0.0;
  double product = 1.0;
  while (x < 15.0) {
    product *= x;
    if (product > 1e280) {
      shift += std::log(product);
      product = 1.0;
    }
    x += 1.0;
  }
  shift += std::log(product);
  return stirling_log_gamma(x) - shift;
}

double gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) {
    throw std::domain_error("gamma_q: requires a > 0 and x >= 0");
  }
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  const double log_prefix = a * std::log(x) - x - log_gamma(a);
  if (x < a + 1.0) {
    const double p = gamma_p_series(a, x, log_prefix);
    return p >= 1.0 ? 0.0 : 1.0 - p;
  }
  const double q = gamma_q_fraction(a, x, log_prefix);
  return q < 0.0 ? 0.0 : (q > 1.0 ? 1.0 : q);
}

double chi_square_sf(double statistic, int dof) {
  if (dof < 0) throw std::domain_error("chi_square_sf: negative dof");
  if (dof == 0) return 1.0;
  if (statistic <= 0.0) return 1.0;
  return gamma_q(0.5 * dof, 0.5 * statistic);
}

}  // namespace h2pc::math
