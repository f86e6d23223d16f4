#pragma once

#include <cmath>
#include <random>

#include "zener/zener.hpp"

namespace zt {

using namespace zener;

// unit square cut along the diagonal (0,0)-(1,1)
inline Mesh two_triangles(int left = 1, int right = 1) {
  Mesh m;
  m.vertices = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  m.elements = {{0, 1, 2}, {0, 2, 3}};
  m.subdomain = {right, left};
  return m;
}

inline MaterialTable one_material(double rho = 1.0, double omega = 0.0) {
  MaterialTable t;
  Material m;
  m.rho = rho;
  m.omega = omega;
  m.C = {2.0, 1.0};
  m.D = {3.0, 2.0};
  t.set(1, m);
  t.set(2, m);
  return t;
}

inline MaterialTable viscous_everywhere() {
  MaterialTable t;
  Material m = composite_materials().at(2);
  t.set(1, m);
  t.set(2, m);
  return t;
}

// integral of x^p y^q over the reference triangle, by the beta function
inline double exact_monomial(int p, int q) {
  return std::exp(std::lgamma(p + 1.0) + std::lgamma(q + 1.0) - std::lgamma(p + q + 3.0));
}

inline Vector random_vector(int n, std::mt19937& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = U(rng);
  return v;
}

// integrate f over element K of a discretization with a rule of the given degree
template <class Fn>
double integrate(const Discretization& D, int K, int degree, Fn&& f) {
  const QuadratureRule r = make_quadrature(degree);
  const ElementGeometry& g = D.geometry(K);
  double s = 0.0;
  for (int q = 0; q < r.size(); ++q) s += r.weights[q] * g.det * f(g.to_physical(r.reference_point(q)));
  return s;
}

// Null space basis of a dense matrix (columns), via full-pivot LU.
inline Matrix null_space(const Matrix& A, double tol = 1e-10) {
  Eigen::FullPivLU<Matrix> lu(A);
  lu.setThreshold(tol);
  return lu.kernel();
}

// Coefficients of a pair field (gamma(x), zeta(x)) by L2 projection on each
// element; exact for polynomial fields of degree <= k.
template <class Fn>
Vector project_pair(const Discretization& D, Fn&& f) {
  const DofMap& d = D.dofs();
  Vector p = Vector::Zero(d.num_stress());
  const int n = d.n;
  for (int K = 0; K < D.num_elements(); ++K)
    for (int m = 0; m < n; ++m)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          p[d.gamma(K, comp(i, j), m)] = integrate(D, K, 10, [&](const Vec2& x) {
            double v[64];
            D.eval(K, x, v);
            return f(x, D.subdomain(K)).first(i, j) * v[m];
          });
          if (D.viscous(K))
            p[d.zeta(K, comp(i, j), m)] = integrate(D, K, 10, [&](const Vec2& x) {
              double v[64];
              D.eval(K, x, v);
              return f(x, D.subdomain(K)).second(i, j) * v[m];
            });
        }
  return p;
}

// random polynomial tensor field of total degree <= k
struct PolyTensor {
  int k = 1;
  std::vector<Mat2> c;  // one tensor per monomial x^a y^b, a + b <= k
  PolyTensor(int order, std::mt19937& rng) : k(order) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int d = 0; d <= k; ++d)
      for (int b = 0; b <= d; ++b) {
        Mat2 t;
        t << U(rng), U(rng), U(rng), U(rng);
        c.push_back(t);
      }
  }
  Mat2 operator()(const Vec2& x) const {
    Mat2 s = Mat2::Zero();
    int i = 0;
    for (int d = 0; d <= k; ++d)
      for (int b = 0; b <= d; ++b) s += c[i++] * std::pow(x[0], d - b) * std::pow(x[1], b);
    return s;
  }
  Vec2 div(const Vec2& x) const {
    Vec2 s = Vec2::Zero();
    int i = 0;
    for (int d = 0; d <= k; ++d)
      for (int b = 0; b <= d; ++b) {
        const int a = d - b;
        const double dx = a > 0 ? a * std::pow(x[0], a - 1) * std::pow(x[1], b) : 0.0;
        const double dy = b > 0 ? b * std::pow(x[0], a) * std::pow(x[1], b - 1) : 0.0;
        s += c[i].col(0) * dx + c[i].col(1) * dy;
        ++i;
      }
    return s;
  }
};

// jittered composite mesh with general (non right-angled) elements
inline Mesh jittered_square(int n, double amount = 0.15, unsigned seed = 1) {
  Mesh m = unit_square(n);
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> U(-amount / n, amount / n);
  for (auto& v : m.vertices) {
    const bool bx = v[0] == 0.0 || v[0] == 1.0, by = v[1] == 0.0 || v[1] == 1.0;
    const bool iface = std::abs(v[0] - 0.5) < 1e-14;
    if (!bx && !iface) v[0] += U(rng);
    if (!by) v[1] += U(rng);
  }
  return m;
}

// Random smooth pair: every entry a * sin(b . x + c); div computed exactly.
struct SmoothPair {
  struct Wave {
    double a;
    Vec2 b;
    double c;
  };
  std::array<Wave, 8> w;  // 4 gamma entries then 4 zeta entries
  explicit SmoothPair(std::mt19937& rng) {
    std::uniform_real_distribution<double> A(-1.0, 1.0), B(-3.0, 3.0), C(0.0, 6.28);
    for (auto& e : w) e = {A(rng), Vec2(B(rng), B(rng)), C(rng)};
  }
  Mat2 tensor(int block, const Vec2& x) const {
    Mat2 t;
    for (int c = 0; c < 4; ++c) {
      const Wave& e = w[4 * block + c];
      t(c / 2, c % 2) = e.a * std::sin(e.b.dot(x) + e.c);
    }
    return t;
  }
  Vec2 div(int block, const Vec2& x) const {
    Vec2 d = Vec2::Zero();
    for (int c = 0; c < 4; ++c) {
      const Wave& e = w[4 * block + c];
      d[c / 2] += e.a * std::cos(e.b.dot(x) + e.c) * e.b[c % 2];
    }
    return d;
  }
  PairField field(const MaterialTable& mats) const {
    return [self = *this, mats](const Vec2& x, int j) {
      const Material& m = mats.at(j);
      PairValue v;
      v.gamma = self.tensor(0, x);
      v.div_sigma = self.div(0, x);
      if (m.viscoelastic()) {
        v.zeta = self.tensor(1, x);
        v.div_sigma += m.omega * self.div(1, x);
      }
      return v;
    };
  }
  // sigma = tensor(0) on every subdomain, so the normal stress is continuous
  PairField conforming_field(const MaterialTable& mats) const {
    return [self = *this, mats](const Vec2& x, int j) {
      const Material& m = mats.at(j);
      PairValue v;
      v.gamma = self.tensor(0, x);
      v.div_sigma = self.div(0, x);
      if (m.viscoelastic()) {
        v.zeta = self.tensor(1, x);
        v.gamma -= m.omega * v.zeta;
      }
      return v;
    };
  }
};

}  // namespace zt
