#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "zener/common.hpp"

namespace zener {

// Gauss-Legendre points and weights on [0, 1].
struct LineRule {
  std::vector<double> points;
  std::vector<double> weights;
  int size() const { return static_cast<int>(points.size()); }
};

namespace detail {

// (P_n(x), P_n'(x)) by the three-term recurrence
inline std::pair<double, double> legendre_with_derivative(int n, double x) {
  double p0 = 1.0, p1 = x;
  if (n == 0) return {1.0, 0.0};
  for (int j = 2; j <= n; ++j) {
    const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
    p0 = p1;
    p1 = p2;
  }
  const double dp = n * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

}  // namespace detail

inline LineRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one point");
  LineRule r;
  r.points.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = detail::legendre_with_derivative(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = detail::legendre_with_derivative(n, x).second;
    r.points[n - 1 - i] = 0.5 * (1.0 + x);
    r.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

// exact for polynomials of degree <= `degree` on [0, 1]
inline LineRule line_rule(int degree) { return gauss_legendre(degree / 2 + 1); }

// Orthonormal Legendre polynomial of degree m on [0, 1].
inline double legendre01(int m, double s) {
  return std::sqrt(2.0 * m + 1.0) * detail::legendre_with_derivative(m, 2.0 * s - 1.0).first;
}

// Triangle rule on the reference triangle (0,0), (1,0), (0,1).  Points are
// barycentric (l0, l1, l2); the reference point is (l1, l2).  Weights sum to 1/2.
struct QuadratureRule {
  int degree = 0;
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;

  int size() const { return static_cast<int>(weights.size()); }
  Vec2 reference_point(int q) const { return {points[q][1], points[q][2]}; }
};

inline QuadratureRule make_quadrature(int degree) {
  if (degree < 1 || degree > 10)
    throw std::invalid_argument("make_quadrature: unsupported degree " + std::to_string(degree) +
                                " (need 1..10)");
  QuadratureRule rule;
  rule.degree = degree;
  if (degree == 1) {
    rule.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
    rule.weights.push_back(0.5);
    return rule;
  }
  // collapsed tensor-product Gauss rule; all weights positive
  const int n = (degree + 2 + 1) / 2;
  const LineRule g = gauss_legendre(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const double u = g.points[a], v = g.points[b];
      const double xi = u, eta = v * (1.0 - u);
      rule.points.push_back({1.0 - xi - eta, xi, eta});
      rule.weights.push_back(g.weights[a] * g.weights[b] * (1.0 - u));
    }
  return rule;
}

// integral of xi^p eta^q over the reference triangle
inline double monomial_integral(int p, int q) {
  double num = 1.0, den = 1.0;
  for (int m = 2; m <= p; ++m) num *= m;
  for (int m = 2; m <= q; ++m) num *= m;
  for (int m = 2; m <= p + q + 2; ++m) den *= m;
  return num / den;
}

}  // namespace zener
