#pragma once

// Truncated bivariate Taylor polynomials, used to differentiate closed-form
// fields (manufactured solutions, initial data) without hand derivation.

#include <array>
#include <cmath>
#include <type_traits>

namespace zener {

template <int N>
class Taylor2 {
  static_assert(N >= 0, "Taylor2 order must be non-negative");

 public:
  static constexpr int order = N;
  static constexpr int size = (N + 1) * (N + 2) / 2;

  static constexpr int index(int i, int j) {
    const int d = i + j;
    return d * (d + 1) / 2 + j;
  }

  Taylor2() { c_.fill(0.0); }
  Taylor2(double v) {  // NOLINT: implicit promotion of constants is wanted
    c_.fill(0.0);
    c_[0] = v;
  }

  // the coordinate function x (axis 0) or y (axis 1) expanded about `at`
  static Taylor2 variable(double at, int axis) {
    Taylor2 t(at);
    if constexpr (N >= 1) t.c_[axis == 0 ? index(1, 0) : index(0, 1)] = 1.0;
    return t;
  }

  double value() const { return c_[0]; }
  double coeff(int i, int j) const { return c_[index(i, j)]; }
  double& coeff(int i, int j) { return c_[index(i, j)]; }

  // partial derivative d^{i+j} / dx^i dy^j at the expansion point
  double derivative(int i, int j) const { return c_[index(i, j)] * factorial(i) * factorial(j); }

  Taylor2& operator+=(const Taylor2& o) {
    for (int a = 0; a < size; ++a) c_[a] += o.c_[a];
    return *this;
  }
  Taylor2& operator-=(const Taylor2& o) {
    for (int a = 0; a < size; ++a) c_[a] -= o.c_[a];
    return *this;
  }
  Taylor2& operator*=(double s) {
    for (auto& v : c_) v *= s;
    return *this;
  }
  Taylor2& operator*=(const Taylor2& o) { return *this = *this * o; }
  Taylor2& operator/=(const Taylor2& o) { return *this = *this / o; }

  friend Taylor2 operator+(Taylor2 a, const Taylor2& b) { return a += b; }
  friend Taylor2 operator-(Taylor2 a, const Taylor2& b) { return a -= b; }
  friend Taylor2 operator-(Taylor2 a) { return a *= -1.0; }
  friend Taylor2 operator*(Taylor2 a, double s) { return a *= s; }
  friend Taylor2 operator*(double s, Taylor2 a) { return a *= s; }

  friend Taylor2 operator*(const Taylor2& a, const Taylor2& b) {
    Taylor2 r;
    r.c_[0] = 0.0;
    for (int d1 = 0; d1 <= N; ++d1)
      for (int j1 = 0; j1 <= d1; ++j1) {
        const double av = a.c_[index(d1 - j1, j1)];
        if (av == 0.0) continue;
        for (int d2 = 0; d1 + d2 <= N; ++d2)
          for (int j2 = 0; j2 <= d2; ++j2)
            r.c_[index(d1 - j1 + d2 - j2, j1 + j2)] += av * b.c_[index(d2 - j2, j2)];
      }
    return r;
  }

  friend Taylor2 operator/(const Taylor2& a, const Taylor2& b) { return a * reciprocal(b); }
  friend Taylor2 operator/(const Taylor2& a, double s) { return a * (1.0 / s); }
  friend Taylor2 operator/(double s, const Taylor2& b) { return s * reciprocal(b); }

  // f(a) where derivs(n) returns the n-th derivative of f at a.value()
  template <class Derivs>
  static Taylor2 compose(const Taylor2& a, Derivs&& derivs) {
    Taylor2 delta = a;
    delta.c_[0] = 0.0;
    Taylor2 result(derivs(0));
    Taylor2 power(1.0);
    double fact = 1.0;
    for (int n = 1; n <= N; ++n) {
      power = power * delta;
      fact *= n;
      result += power * (derivs(n) / fact);
    }
    return result;
  }

  static Taylor2 reciprocal(const Taylor2& b) {
    const double v = b.value();
    return compose(b, [v](int n) {
      double d = ((n % 2) ? -1.0 : 1.0) / v;
      for (int m = 1; m <= n; ++m) d *= m / v;
      return d;
    });
  }

  static double factorial(int n) {
    double f = 1.0;
    for (int m = 2; m <= n; ++m) f *= m;
    return f;
  }

 private:
  std::array<double, size> c_;
};

template <int N>
Taylor2<N> sin(const Taylor2<N>& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  return Taylor2<N>::compose(a, [s, c](int n) {
    switch (n % 4) {
      case 0: return s;
      case 1: return c;
      case 2: return -s;
      default: return -c;
    }
  });
}

template <int N>
Taylor2<N> cos(const Taylor2<N>& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  return Taylor2<N>::compose(a, [s, c](int n) {
    switch (n % 4) {
      case 0: return c;
      case 1: return -s;
      case 2: return -c;
      default: return s;
    }
  });
}

template <int N>
Taylor2<N> exp(const Taylor2<N>& a) {
  const double e = std::exp(a.value());
  return Taylor2<N>::compose(a, [e](int) { return e; });
}

template <int N>
Taylor2<N - 1> d_dx(const Taylor2<N>& a) {
  static_assert(N >= 1);
  Taylor2<N - 1> r;
  for (int d = 0; d <= N - 1; ++d)
    for (int j = 0; j <= d; ++j) r.coeff(d - j, j) = (d - j + 1) * a.coeff(d - j + 1, j);
  return r;
}

template <int N>
Taylor2<N - 1> d_dy(const Taylor2<N>& a) {
  static_assert(N >= 1);
  Taylor2<N - 1> r;
  for (int d = 0; d <= N - 1; ++d)
    for (int j = 0; j <= d; ++j) r.coeff(d - j, j) = (j + 1) * a.coeff(d - j, j + 1);
  return r;
}

template <int M, int N>
Taylor2<M> truncate(const Taylor2<N>& a) {
  static_assert(M <= N);
  Taylor2<M> r;
  for (int d = 0; d <= M; ++d)
    for (int j = 0; j <= d; ++j) r.coeff(d - j, j) = a.coeff(d - j, j);
  return r;
}

template <int N>
using JetVec = std::array<Taylor2<N>, 2>;
template <int N>
using JetTensor = std::array<Taylor2<N>, 4>;

// (grad u)_{ij} = d_j u_i
template <int N>
JetTensor<N - 1> gradient(const JetVec<N>& u) {
  return {d_dx(u[0]), d_dy(u[0]), d_dx(u[1]), d_dy(u[1])};
}

template <int N>
JetTensor<N - 1> sym_gradient(const JetVec<N>& u) {
  auto g = gradient(u);
  auto off = 0.5 * (g[1] + g[2]);
  return {g[0], off, off, g[3]};
}

template <int N>
JetVec<N - 1> divergence(const JetTensor<N>& t) {
  return {d_dx(t[0]) + d_dy(t[1]), d_dx(t[2]) + d_dy(t[3])};
}

template <int M, int N>
JetTensor<M> truncate(const JetTensor<N>& t) {
  return {truncate<M>(t[0]), truncate<M>(t[1]), truncate<M>(t[2]), truncate<M>(t[3])};
}

template <int M, int N>
JetVec<M> truncate(const JetVec<N>& v) {
  return {truncate<M>(v[0]), truncate<M>(v[1])};
}

template <class T>
std::array<T, 4> operator+(const std::array<T, 4>& a, const std::array<T, 4>& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]};
}

template <class T>
std::array<T, 4> operator-(const std::array<T, 4>& a, const std::array<T, 4>& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]};
}

template <class T>
std::array<T, 4> operator*(double s, const std::array<T, 4>& a) {
  return {s * a[0], s * a[1], s * a[2], s * a[3]};
}

template <class T>
std::array<T, 2> operator+(const std::array<T, 2>& a, const std::array<T, 2>& b) {
  return {a[0] + b[0], a[1] + b[1]};
}

template <class T>
std::array<T, 2> operator*(double s, const std::array<T, 2>& a) {
  return {s * a[0], s * a[1]};
}

}  // namespace zener
