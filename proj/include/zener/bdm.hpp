#pragma once

#include <cmath>
#include <vector>

#include "zener/common.hpp"
#include "zener/discretization.hpp"
#include "zener/quadrature.hpp"

namespace zener {

// Canonical BDM_k interpolant on one element, applied row by row to a
// tensor field: normal moments against P_k on each edge, and for k >= 2
// interior moments against the Nedelec space of the first kind of
// degree k-1.  The result is expressed in the local gamma block layout.
class BdmLocalInterpolator {
 public:
  BdmLocalInterpolator(const Discretization& disc, int K) : disc_(disc), K_(K) {
    const int n = disc.dofs().n;
    Matrix D = Matrix::Zero(2 * n, 2 * n);
    double val[64];
    for_each_functional([&](int row, const Vec2& x, double w, const Vec2& dir) {
      disc_.eval(K_, x, val);
      for (int d = 0; d < 2; ++d)
        for (int m = 0; m < n; ++m) D(row, d * n + m) += w * val[m] * dir[d];
    }, 2 * disc.order());
    lu_.compute(D);
    if (!(lu_.rcond() > 1e-13)) throw SolverError("BDM moment matrix is singular on element " + std::to_string(K));
  }

  // f(x) -> Mat2; returns 4n coefficients (component c, basis m at c*n + m)
  template <class Fn>
  Vector interpolate(Fn&& f) const {
    const int n = disc_.dofs().n;
    Matrix rhs = Matrix::Zero(2 * n, 2);
    for_each_functional([&](int row, const Vec2& x, double w, const Vec2& dir) {
      const Mat2 t = f(x);
      for (int i = 0; i < 2; ++i) rhs(row, i) += w * (t(i, 0) * dir[0] + t(i, 1) * dir[1]);
    }, std::min(10, 2 * disc_.order() + 4));
    const Matrix c = lu_.solve(rhs);
    Vector out(4 * n);
    for (int i = 0; i < 2; ++i)
      for (int d = 0; d < 2; ++d)
        for (int m = 0; m < n; ++m) out[comp(i, d) * n + m] = c(d * n + m, i);
    return out;
  }

 private:
  // visit(row, x, weight, direction): functional `row` is the sum of
  // weight * v(x) . direction over its quadrature points
  template <class Visit>
  void for_each_functional(Visit&& visit, int degree) const {
    const Mesh& mesh = disc_.mesh();
    const int k = disc_.order();
    const auto& tri = mesh.elements[K_];
    const LineRule lr = line_rule(degree + 1);
    int row = 0;
    for (int e = 0; e < 3; ++e) {
      const auto lv = local_edge_vertices(e);
      const Vec2 a = mesh.vertices[tri[lv[0]]], b = mesh.vertices[tri[lv[1]]];
      const double len = (b - a).norm();
      const Vec2 nrm = Vec2((b - a)[1], -(b - a)[0]) / len;
      for (int m = 0; m <= k; ++m, ++row)
        for (int q = 0; q < lr.size(); ++q) {
          const double s = lr.points[q];
          visit(row, (1.0 - s) * a + s * b, lr.weights[q] * len * legendre01(m, s) / std::sqrt(len), nrm);
        }
    }
    if (k < 2) return;
    const ElementGeometry& g = disc_.geometry(K_);
    const Vec2 xc = g.to_physical(Vec2(1.0 / 3.0, 1.0 / 3.0));
    const double h = g.diameter;
    const QuadratureRule rule = make_quadrature(std::min(10, degree));
    auto mono = [](double X, double Y, int p, int q) { return std::pow(X, p) * std::pow(Y, q); };
    for (int deg = 0; deg <= k - 2; ++deg)
      for (int q = 0; q <= deg; ++q)
        for (int dcomp = 0; dcomp < 2; ++dcomp, ++row)
          for (int iq = 0; iq < rule.size(); ++iq) {
            const Vec2 x = g.to_physical(rule.reference_point(iq));
            const Vec2 X = (x - xc) / h;
            visit(row, x, rule.weights[iq] * g.det * mono(X[0], X[1], deg - q, q),
                  dcomp == 0 ? Vec2(1.0, 0.0) : Vec2(0.0, 1.0));
          }
    for (int q = 0; q <= k - 2; ++q, ++row)
      for (int iq = 0; iq < rule.size(); ++iq) {
        const Vec2 x = g.to_physical(rule.reference_point(iq));
        const Vec2 X = (x - xc) / h;
        visit(row, x, rule.weights[iq] * g.det * mono(X[0], X[1], k - 2 - q, q), Vec2(-X[1], X[0]));
      }
  }

  const Discretization& disc_;
  int K_;
  Eigen::PartialPivLU<Matrix> lu_;
};

}  // namespace zener
