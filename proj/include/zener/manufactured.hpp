#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "zener/fields.hpp"
#include "zener/materials.hpp"
#include "zener/taylor.hpp"

namespace zener {

struct TimeFactor {
  std::function<double(double)> value;
  std::function<double(double)> rate;
};

// Spatial part of one separable term of the exact solution.
struct ExactMode {
  Mat2 gamma = Mat2::Zero();
  Mat2 zeta = Mat2::Zero();
  Vec2 div_sigma = Vec2::Zero();
  double rotation = 0.0;  // coefficient of the skew part of grad u
  Mat2 strain = Mat2::Zero();
};

// p(x, t) = sum_m factor_m(t) * mode_m(x)
struct ExactSolution {
  std::vector<TimeFactor> factors;
  std::function<ExactMode(int mode, const Vec2& x, int subdomain)> spatial;

  int num_modes() const { return static_cast<int>(factors.size()); }

  ExactMode at(const Vec2& x, double t, int j, bool rate = false) const {
    ExactMode s;
    for (int m = 0; m < num_modes(); ++m) {
      const double c = rate ? factors[m].rate(t) : factors[m].value(t);
      const ExactMode e = spatial(m, x, j);
      s.gamma += c * e.gamma;
      s.zeta += c * e.zeta;
      s.div_sigma += c * e.div_sigma;
      s.rotation += c * e.rotation;
      s.strain += c * e.strain;
    }
    return s;
  }
};

struct ManufacturedCase {
  std::string name;
  MaterialTable materials;
  ProblemData data;
  ExactSolution exact;
  std::function<Vec2(const Vec2& x, double t)> displacement;
  std::function<Vec2(const Vec2& x, double t, int subdomain)> force;
  InitialDisplacementData initial;
};

// u = sin(t) w(x),  gamma = sin(t) C eps(w),
// zeta = (D - C) eps(w) (cos t + omega sin t) / (1 + omega^2) on viscoelastic parts,
// r = (cos t - 1) skew(grad w),  F = rho u'' - div(gamma + omega zeta).
// zeta solves omega zeta' + zeta = (D - C) eps(u') exactly.  The normal
// stress is continuous across material interfaces only if eps(w) vanishes there.
//
// w must be callable as w(x, y) -> std::array<T, 2> for T = double and Taylor2<N>.
template <class W>
ManufacturedCase make_case_separable(W w, MaterialTable materials, std::string name = "separable") {
  materials.validate();
  ManufacturedCase mc;
  mc.name = std::move(name);
  mc.materials = materials;

  mc.exact.factors = {
      {[](double t) { return std::sin(t); }, [](double t) { return std::cos(t); }},
      {[](double t) { return std::cos(t); }, [](double t) { return -std::sin(t); }},
      {[](double) { return 1.0; }, [](double) { return 0.0; }},
  };
  mc.exact.spatial = [w, materials](int mode, const Vec2& x, int j) {
    const Material& m = materials.at(j);
    using J2 = Taylor2<2>;
    const JetVec<2> wj = w(J2::variable(x[0], 0), J2::variable(x[1], 1));
    const JetTensor<1> grad = gradient(wj);
    const JetTensor<1> eps = sym_gradient(wj);
    const double cw = 0.5 * (grad[1].value() - grad[2].value());
    const double s = 1.0 / (1.0 + m.omega * m.omega);
    ExactMode e;
    if (mode == 0) {
      const JetTensor<1> g = m.C.apply(eps);
      JetTensor<1> sig = g;
      e.gamma = jet_value(g);
      e.strain = jet_value(eps);
      if (m.viscoelastic()) {
        const JetTensor<1> z = (m.omega * s) * m.V().apply(eps);
        e.zeta = jet_value(z);
        sig = g + m.omega * z;
      }
      e.div_sigma = jet_value(divergence(sig));
    } else if (mode == 1) {
      if (m.viscoelastic()) {
        const JetTensor<1> z = s * m.V().apply(eps);
        e.zeta = jet_value(z);
        e.div_sigma = jet_value(divergence(m.omega * z));
      }
      e.rotation = cw;
    } else {
      e.rotation = -cw;
    }
    return e;
  };

  mc.displacement = [w](const Vec2& x, double t) {
    const auto v = w(x[0], x[1]);
    return Vec2(std::sin(t) * v[0], std::sin(t) * v[1]);
  };
  auto spatial = mc.exact.spatial;
  auto force_mode = [w, materials, spatial](int mode, const Vec2& x, int j) {
    const ExactMode e = spatial(mode, x, j);
    Vec2 f = -e.div_sigma;
    if (mode == 0) {
      const auto v = w(x[0], x[1]);
      f -= materials.at(j).rho * Vec2(v[0], v[1]);
    }
    return f;
  };
  mc.force = [force_mode](const Vec2& x, double t, int j) {
    return Vec2(std::sin(t) * force_mode(0, x, j) + std::cos(t) * force_mode(1, x, j));
  };

  LoadMode ls, lc;
  ls.factor = [](double t) { return std::sin(t); };
  ls.force = [force_mode](const Vec2& x, int j) { return force_mode(0, x, j); };
  ls.boundary_accel = [w](const Vec2& x) {
    const auto v = w(x[0], x[1]);
    return Vec2(-v[0], -v[1]);
  };
  lc.factor = [](double t) { return std::cos(t); };
  lc.force = [force_mode](const Vec2& x, int j) { return force_mode(1, x, j); };
  mc.data.loads = {ls, lc};

  // initial data in displacement form, read off at t = 0
  InitialDisplacementData init;
  init.u1 = [w](const Taylor2<4>& x, const Taylor2<4>& y, int) { return w(x, y); };
  init.sigma0 = [w, materials](const Taylor2<3>& x, const Taylor2<3>& y, int j) {
    const Material& m = materials.at(j);
    if (!m.viscoelastic()) return JetTensor<3>{};
    const JetVec<4> wj = w(Taylor2<4>::variable(x.value(), 0), Taylor2<4>::variable(y.value(), 1));
    return JetTensor<3>((m.omega / (1.0 + m.omega * m.omega)) * m.V().apply(sym_gradient(wj)));
  };
  init.force0 = [w, materials](const Taylor2<2>& x, const Taylor2<2>& y, int j) {
    const Material& m = materials.at(j);
    if (!m.viscoelastic()) return JetVec<2>{};
    const JetVec<4> wj = w(Taylor2<4>::variable(x.value(), 0), Taylor2<4>::variable(y.value(), 1));
    const JetTensor<3> z = (m.omega / (1.0 + m.omega * m.omega)) * m.V().apply(sym_gradient(wj));
    const JetVec<2> d = divergence(z);
    return JetVec<2>{-d[0], -d[1]};
  };
  mc.initial = init;
  const CompatiblePairs cp = compatible_initial_pairs(materials, init);
  mc.data.p0 = cp.p0;
  mc.data.p1 = cp.p1;
  mc.data.p2 = cp.p2;
  return mc;
}

// max |omega zeta' + zeta - (D - C) eps(u')| over random samples, from the
// closed form.  Also checks zeta = 0 on elastic parts.
inline double constitutive_residual(const ManufacturedCase& mc, int samples = 200, unsigned seed = 7,
                                    double xmin = 0.0, double xmax = 1.0) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> U(xmin, xmax), T(0.0, 3.0);
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const Vec2 x(U(rng), U(rng));
    const double t = T(rng);
    for (const auto& [j, m] : mc.materials.entries()) {
      const ExactMode v = mc.exact.at(x, t, j);
      const ExactMode r = mc.exact.at(x, t, j, true);
      if (!m.viscoelastic()) {
        worst = std::max(worst, v.zeta.cwiseAbs().maxCoeff());
        continue;
      }
      const Mat2 res = m.omega * r.zeta + v.zeta - m.V().apply(r.strain);
      worst = std::max(worst, res.cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

// Default composite: unit square, left half elastic (id 1), right half
// viscoelastic (id 2, omega = 0.5).
inline MaterialTable composite_materials() {
  MaterialTable t;
  Material e;
  e.rho = 1.0;
  e.omega = 0.0;
  e.C = {2.0, 1.0};
  Material v;
  v.rho = 1.5;
  v.omega = 0.5;
  v.C = {1.0, 0.8};
  v.D = {1.6, 1.5};
  t.set(1, e);
  t.set(2, v);
  return t;
}

inline MaterialTable elastic_materials() {
  MaterialTable t = composite_materials();
  Material m = t.at(2);
  m.omega = 0.0;
  t.set(2, m);
  return t;
}

// eps(w) = 0 on x = 1/2, so the normal stress is continuous there
struct CompositeField {
  template <class T>
  std::array<T, 2> operator()(const T& x, const T& y) const {
    using std::cos;
    using std::sin;
    const T s = (x - 0.5) * (x - 0.5);
    return {s * sin(3.0 * y + 0.5) * (1.0 + x), s * cos(2.0 * x - y) + s * s * y};
  }
};

inline ManufacturedCase composite_case() {
  return make_case_separable(CompositeField{}, composite_materials(), "composite");
}

inline ManufacturedCase elastic_case() { return make_case_separable(CompositeField{}, elastic_materials(), "elastic"); }

// Unforced motion released from a smooth displacement with zero velocity.
inline ProblemData free_vibration_data(const MaterialTable& materials) {
  InitialDisplacementData init;
  init.u0 = [](const Taylor2<4>& x, const Taylor2<4>& y, int) {
    return JetVec<4>{sin(3.0 * x) * sin(2.0 * y + 0.3), cos(2.0 * x + y) * x};
  };
  init.sigma0 = [materials](const Taylor2<3>& x, const Taylor2<3>& y, int j) {
    const Taylor2<4> X = Taylor2<4>::variable(x.value(), 0), Y = Taylor2<4>::variable(y.value(), 1);
    const JetVec<4> u{sin(3.0 * X) * sin(2.0 * Y + 0.3), cos(2.0 * X + Y) * X};
    return JetTensor<3>(materials.at(j).C.apply(sym_gradient(u)));
  };
  const CompatiblePairs cp = compatible_initial_pairs(materials, init);
  ProblemData d;
  d.p0 = cp.p0;
  d.p1 = cp.p1;
  d.p2 = cp.p2;
  return d;
}

}  // namespace zener
