#pragma once

#include <cmath>
#include <vector>

#include "zener/common.hpp"
#include "zener/quadrature.hpp"

namespace zener {

// L2-orthonormal modal basis of P_k on the reference triangle.  Built by
// Gram-Schmidt over monomials ordered by total degree, so the first
// scalar_dim(m) functions span P_m for every m <= k.
class ScalarBasis {
 public:
  explicit ScalarBasis(int order) : k_(order) {
    if (order < 0 || order > 5) throw std::invalid_argument("ScalarBasis: order must be in 0..5");
    for (int d = 0; d <= k_; ++d)
      for (int b = 0; b <= d; ++b) exps_.push_back({d - b, b});
    const int n = size();
    coef_ = Matrix::Identity(n, n);
    const QuadratureRule rule = make_quadrature(std::max(1, 2 * k_));
    // two passes: the second cleans up rounding left by the first
    for (int pass = 0; pass < 2; ++pass) {
      Matrix gram = Matrix::Zero(n, n);
      Vector vals(n);
      for (int q = 0; q < rule.size(); ++q) {
        eval_raw(rule.reference_point(q), vals.data(), nullptr, nullptr);
        gram.noalias() += rule.weights[q] * vals * vals.transpose();
      }
      Eigen::LLT<Matrix> llt(gram);
      Matrix linv = llt.matrixL().solve(Matrix::Identity(n, n));
      coef_ = linv * coef_;
    }
    // exact zeros above the diagonal keep the hierarchy exact
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) coef_(i, j) = 0.0;
  }

  int order() const { return k_; }
  int size() const { return scalar_dim(k_); }

  void eval(const Vec2& ref, double* values) const { eval_raw(ref, values, nullptr, nullptr); }

  void eval_grad(const Vec2& ref, double* values, double* dxi, double* deta) const {
    eval_raw(ref, values, dxi, deta);
  }

 private:
  void eval_raw(const Vec2& ref, double* values, double* dxi, double* deta) const {
    const int n = size();
    double m[64], mx[64], my[64];
    for (int a = 0; a < n; ++a) {
      const int p = exps_[a][0], q = exps_[a][1];
      m[a] = ipow(ref[0], p) * ipow(ref[1], q);
      mx[a] = p > 0 ? p * ipow(ref[0], p - 1) * ipow(ref[1], q) : 0.0;
      my[a] = q > 0 ? q * ipow(ref[0], p) * ipow(ref[1], q - 1) : 0.0;
    }
    for (int i = 0; i < n; ++i) {
      double v = 0.0, vx = 0.0, vy = 0.0;
      for (int a = 0; a <= i; ++a) {
        v += coef_(i, a) * m[a];
        vx += coef_(i, a) * mx[a];
        vy += coef_(i, a) * my[a];
      }
      if (values) values[i] = v;
      if (dxi) dxi[i] = vx;
      if (deta) deta[i] = vy;
    }
  }

  static double ipow(double x, int p) {
    double r = 1.0;
    for (int i = 0; i < p; ++i) r *= x;
    return r;
  }

  int k_;
  std::vector<std::array<int, 2>> exps_;
  Matrix coef_;
};

}  // namespace zener
