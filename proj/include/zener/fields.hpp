#pragma once

#include <functional>
#include <vector>

#include "zener/assembly.hpp"
#include "zener/common.hpp"
#include "zener/materials.hpp"
#include "zener/taylor.hpp"

namespace zener {

// Stress pair field on the continuum: gamma, zeta and div(gamma + omega zeta).
using PairField = std::function<PairValue(const Vec2& x, int subdomain)>;

// One separable load term: factor(t) * (force(x), boundary_accel(x)).
struct LoadMode {
  std::function<double(double)> factor;
  std::function<Vec2(const Vec2& x, int subdomain)> force;  // F, may be empty
  std::function<Vec2(const Vec2& x)> boundary_accel;        // second time derivative of the boundary displacement
};

struct ProblemData {
  PairField p0;  // p(0)
  PairField p1;  // dp/dt(0)
  PairField p2;  // d2p/dt2(0)
  std::vector<LoadMode> loads;

  Vec2 force(const Vec2& x, double t, int subdomain) const {
    Vec2 f = Vec2::Zero();
    for (const auto& l : loads)
      if (l.force) f += l.factor(t) * l.force(x, subdomain);
    return f;
  }
};

inline PairField zero_pair_field() {
  return [](const Vec2&, int) { return PairValue{}; };
}

template <int N>
using JetVecField = std::function<JetVec<N>(const Taylor2<N>& x, const Taylor2<N>& y, int subdomain)>;
template <int N>
using JetTensorField = std::function<JetTensor<N>(const Taylor2<N>& x, const Taylor2<N>& y, int subdomain)>;

// Continuum initial data in displacement form.  sigma0 is read on
// viscoelastic subdomains only; elsewhere the stress is C eps(u0).
struct InitialDisplacementData {
  JetVecField<4> u0;
  JetVecField<4> u1;
  JetTensorField<3> sigma0;  // empty means zero
  JetVecField<2> force0;     // F(., 0); empty means zero
};

template <int N>
Mat2 jet_value(const JetTensor<N>& t) {
  Mat2 m;
  m << t[0].value(), t[1].value(), t[2].value(), t[3].value();
  return m;
}

template <int N>
Vec2 jet_value(const JetVec<N>& v) {
  return {v[0].value(), v[1].value()};
}

struct CompatibleValues {
  PairValue p0, p1, p2;
};

// Initial pairs compatible with the constitutive law:
//   gamma0 = C eps(u0), zeta0 = w~^-1 (sigma0 - gamma0),
//   gamma1 = C eps(u1), zeta1 = w~^-1 (D eps(u1) - gamma1 - zeta0),
//   u''(0) = rho^-1 (F(0) + div sigma0),
//   gamma2 = C eps(u''(0)), zeta2 = w~^-1 (D eps(u''(0)) - gamma2 - zeta1).
inline CompatibleValues evaluate_compatible(const MaterialTable& mats, const InitialDisplacementData& d,
                                            const Vec2& x, int subdomain) {
  const Material& m = mats.at(subdomain);
  const bool visco = m.viscoelastic();
  const double wi = m.omega_tilde_inv(), w = m.omega;
  using J4 = Taylor2<4>;
  const J4 X = J4::variable(x[0], 0), Y = J4::variable(x[1], 1);
  const JetTensor<3> zero3{};

  const JetTensor<3> eps0 = d.u0 ? sym_gradient(d.u0(X, Y, subdomain)) : zero3;
  const JetTensor<3> gam0 = m.C.apply(eps0);
  JetTensor<3> sig0 = gam0, zeta0 = zero3;
  if (visco) {
    sig0 = d.sigma0 ? d.sigma0(truncate<3>(X), truncate<3>(Y), subdomain) : zero3;
    zeta0 = wi * (sig0 - gam0);
  }
  const JetTensor<3> eps1 = d.u1 ? sym_gradient(d.u1(X, Y, subdomain)) : zero3;
  const JetTensor<3> gam1 = m.C.apply(eps1);
  const JetTensor<3> zeta1 = visco ? wi * (m.D.apply(eps1) - gam1 - zeta0) : zero3;

  JetVec<2> udd = divergence(sig0);
  if (d.force0) udd = udd + d.force0(truncate<2>(X), truncate<2>(Y), subdomain);
  udd = (1.0 / m.rho) * udd;
  const JetTensor<1> epsdd = sym_gradient(udd);
  const JetTensor<1> gam2 = m.C.apply(epsdd);
  const JetTensor<1> zeta2 = visco ? wi * (m.D.apply(epsdd) - gam2 - truncate<1>(zeta1)) : JetTensor<1>{};

  CompatibleValues out;
  out.p0 = {jet_value(gam0), jet_value(zeta0), jet_value(divergence(gam0 + w * zeta0))};
  out.p1 = {jet_value(gam1), jet_value(zeta1), jet_value(divergence(gam1 + w * zeta1))};
  out.p2 = {jet_value(gam2), jet_value(zeta2), jet_value(divergence(gam2 + w * zeta2))};
  return out;
}

struct CompatiblePairs {
  PairField p0, p1, p2;
};

inline CompatiblePairs compatible_initial_pairs(const MaterialTable& mats, const InitialDisplacementData& d) {
  auto eval = [mats, d](const Vec2& x, int j) { return evaluate_compatible(mats, d, x, j); };
  CompatiblePairs out;
  out.p0 = [eval](const Vec2& x, int j) { return eval(x, j).p0; };
  out.p1 = [eval](const Vec2& x, int j) { return eval(x, j).p1; };
  out.p2 = [eval](const Vec2& x, int j) { return eval(x, j).p2; };
  return out;
}

}  // namespace zener
