#include "swlme/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <tuple>
#include <utility>

namespace swlme {

namespace {

// Legendre P_n and derivative at x via the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  if (n == 0) return {1.0, 0.0};
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  const double dp = n * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

}  // namespace

GaussRule::GaussRule(int n) {
  if (n < 1) throw std::invalid_argument("GaussRule: need at least one node");
  nodes_.resize(n);
  weights_.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Chebyshev-like initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double p, dp;
    for (int it = 0; it < 100; ++it) {
      std::tie(p, dp) = legendre(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    std::tie(p, dp) = legendre(n, x);
    nodes_[i] = -x;
    nodes_[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weights_[i] = w;
    weights_[n - 1 - i] = w;
  }
  if (n % 2 == 1) nodes_[n / 2] = 0.0;

  // Construction-time verification: positive weights summing to 2, and
  // exactness on monomials through degree 2n-1.
  double wsum = 0.0;
  for (double w : weights_) {
    if (!(w > 0.0)) throw std::logic_error("GaussRule: non-positive weight");
    wsum += w;
  }
  if (std::abs(wsum - 2.0) > 1e-14) throw std::logic_error("GaussRule: weights do not sum to 2");
  for (int deg = 0; deg <= 2 * n - 1; ++deg) {
    double acc = 0.0;
    for (int q = 0; q < n; ++q) acc += weights_[q] * std::pow(nodes_[q], deg);
    const double exact = (deg % 2 == 0) ? 2.0 / (deg + 1.0) : 0.0;
    if (std::abs(acc - exact) > 1e-13) {
      throw std::logic_error("GaussRule: monomial exactness check failed");
    }
  }
}

}  // namespace swlme
