#pragma once

#include <functional>
#include <vector>

#include "zener/common.hpp"
#include "zener/discretization.hpp"
#include "zener/quadrature.hpp"

namespace zener {

enum class Scheme { CG, DG };

inline const char* to_string(Scheme s) { return s == Scheme::CG ? "cg" : "dg"; }

using ForceField = std::function<Vec2(const Vec2& x, double t, int subdomain)>;
using BoundaryField = std::function<Vec2(const Vec2& x, double t)>;

struct PairValue {
  Mat2 gamma = Mat2::Zero();
  Mat2 zeta = Mat2::Zero();
  Vec2 div_sigma = Vec2::Zero();  // div (gamma + omega zeta)
};

template <class LocalFn>
SparseMatrix assemble_block_diagonal(const Discretization& disc, LocalFn&& local) {
  const DofMap& d = disc.dofs();
  std::vector<Triplet> trip;
  for (int K = 0; K < disc.num_elements(); ++K) {
    const Matrix A = local(disc, K);
    const int off = d.stress_offset[K];
    for (int i = 0; i < A.rows(); ++i)
      for (int j = 0; j < A.cols(); ++j)
        if (A(i, j) != 0.0) trip.emplace_back(off + i, off + j, A(i, j));
  }
  SparseMatrix S(d.num_stress(), d.num_stress());
  S.setFromTriplets(trip.begin(), trip.end());
  return S;
}

inline SparseMatrix assemble_mass_A(const Discretization& disc) { return assemble_block_diagonal(disc, local_mass_A); }
inline SparseMatrix assemble_damping(const Discretization& disc) { return assemble_block_diagonal(disc, local_damping); }
inline SparseMatrix assemble_div_div(const Discretization& disc) { return assemble_block_diagonal(disc, local_div_div); }

// rows: rotation dofs, columns: stress dofs;  (s, j+ q)
inline SparseMatrix assemble_skew_coupling(const Discretization& disc) {
  const DofMap& d = disc.dofs();
  std::vector<Triplet> trip;
  for (int K = 0; K < disc.num_elements(); ++K) {
    const Matrix B = pair_skew(disc, K);
    for (int l = 0; l < B.rows(); ++l)
      for (int j = 0; j < B.cols(); ++j)
        if (B(l, j) != 0.0) trip.emplace_back(d.rotation(K, l), d.stress_offset[K] + j, B(l, j));
  }
  SparseMatrix S(d.num_rotation(), d.num_stress());
  S.setFromTriplets(trip.begin(), trip.end());
  return S;
}

// rows: displacement dofs, columns: stress dofs;  (v, div j+ q)_rho
inline SparseMatrix assemble_displacement_coupling(const Discretization& disc) {
  const DofMap& d = disc.dofs();
  std::vector<Triplet> trip;
  for (int K = 0; K < disc.num_elements(); ++K) {
    const Matrix P = pair_divergence(disc, K) / disc.rho(K);
    for (int r = 0; r < P.rows(); ++r)
      for (int j = 0; j < P.cols(); ++j)
        if (P(r, j) != 0.0) trip.emplace_back(2 * K * d.n_low + r, d.stress_offset[K] + j, P(r, j));
  }
  SparseMatrix S(d.num_displacement(), d.num_stress());
  S.setFromTriplets(trip.begin(), trip.end());
  return S;
}

// Visits every quadrature point of every interior facet with the pointwise
// pair operators of both sides (side 1 uses the reversed normal).
template <class Visitor>
void for_each_interior_facet_point(const Discretization& disc, int degree, Visitor&& visit) {
  const LineRule rule = line_rule(degree);
  Matrix Tn[2], Dv[2];
  for (int F = 0; F < disc.facets().num_interior(); ++F) {
    const InteriorFacet& f = disc.facets().interior[F];
    for (int q = 0; q < rule.size(); ++q) {
      const double s = rule.points[q];
      const Vec2 x = disc.facet_point(f.v0, f.v1, s);
      for (int side = 0; side < 2; ++side)
        pair_point_operators(disc, f.element[side], x, side == 0 ? f.normal : Vec2(-f.normal), Tn[side], Dv[side]);
      visit(F, f, s, x, rule.weights[q] * f.length, Tn, Dv);
    }
  }
}

// (phi, [[j+ q]])_F for phi in [P_k(F)]^2, interior facets only
inline SparseMatrix assemble_trace_coupling(const Discretization& disc) {
  const DofMap& d = disc.dofs();
  std::vector<Triplet> trip;
  for_each_interior_facet_point(
      disc, 2 * d.order + 1,
      [&](int F, const InteriorFacet& f, double s, const Vec2&, double w, const Matrix* Tn, const Matrix*) {
        for (int m = 0; m < d.n_edge; ++m) {
          const double chi = legendre01(m, s) / std::sqrt(f.length);
          for (int side = 0; side < 2; ++side) {
            const int off = d.stress_offset[f.element[side]];
            for (int dd = 0; dd < 2; ++dd)
              for (int l = 0; l < Tn[side].cols(); ++l)
                if (Tn[side](dd, l) != 0.0) trip.emplace_back(d.trace(F, dd, m), off + l, w * chi * Tn[side](dd, l));
          }
        }
      });
  SparseMatrix S(disc.num_trace(), d.num_stress());
  S.setFromTriplets(trip.begin(), trip.end());
  return S;
}

struct DgFacetForms {
  SparseMatrix consistency;  // J_c(i, j) = ({rho^-1 div j+ phi_j}, [[j+ phi_i]])
  SparseMatrix jump;         // (h_F^-1 [[j+ phi_j]], [[j+ phi_i]])
};

inline DgFacetForms assemble_dg_facet_terms(const Discretization& disc) {
  const DofMap& d = disc.dofs();
  std::vector<Triplet> tc, tj;
  for_each_interior_facet_point(
      disc, 2 * d.order + 1,
      [&](int, const InteriorFacet& f, double, const Vec2&, double w, const Matrix* Tn, const Matrix* Dv) {
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) {
            const int Ka = f.element[a], Kb = f.element[b];
            const Matrix C = (0.5 * w / disc.rho(Kb)) * (Tn[a].transpose() * Dv[b]);
            const Matrix J = (w / f.length) * (Tn[a].transpose() * Tn[b]);
            const int oa = d.stress_offset[Ka], ob = d.stress_offset[Kb];
            for (int i = 0; i < C.rows(); ++i)
              for (int j = 0; j < C.cols(); ++j) {
                if (C(i, j) != 0.0) tc.emplace_back(oa + i, ob + j, C(i, j));
                if (J(i, j) != 0.0) tj.emplace_back(oa + i, ob + j, J(i, j));
              }
          }
      });
  DgFacetForms out;
  out.consistency.resize(d.num_stress(), d.num_stress());
  out.consistency.setFromTriplets(tc.begin(), tc.end());
  out.jump.resize(d.num_stress(), d.num_stress());
  out.jump.setFromTriplets(tj.begin(), tj.end());
  return out;
}

// -(F(t), div j+ q)_rho + <gdd(t), j+ q n>_boundary, plus for DG
// ({rho^-1 F(t)}, [[j+ q]]) on interior facets.
inline Vector assemble_rhs(const Discretization& disc, const ForceField& F, const BoundaryField& gdd, double t,
                           Scheme scheme) {
  const DofMap& d = disc.dofs();
  Vector b = Vector::Zero(d.num_stress());
  Matrix Tn, Dv;
  if (F) {
    const QuadratureRule rule = make_quadrature(std::min(10, 2 * d.order + 2));
    for (int K = 0; K < disc.num_elements(); ++K) {
      const ElementGeometry& g = disc.geometry(K);
      const int off = d.stress_offset[K];
      for (int q = 0; q < rule.size(); ++q) {
        const Vec2 x = g.to_physical(rule.reference_point(q));
        pair_point_operators(disc, K, x, Vec2::Zero(), Tn, Dv);
        const Vec2 f = F(x, t, disc.subdomain(K));
        b.segment(off, Dv.cols()) -= (rule.weights[q] * g.det / disc.rho(K)) * (Dv.transpose() * f);
      }
    }
  }
  if (gdd) {
    const LineRule rule = line_rule(2 * d.order + 2);
    for (const BoundaryFacet& f : disc.facets().boundary) {
      const int off = d.stress_offset[f.element];
      for (int q = 0; q < rule.size(); ++q) {
        const Vec2 x = disc.facet_point(f.v0, f.v1, rule.points[q]);
        pair_point_operators(disc, f.element, x, f.normal, Tn, Dv);
        b.segment(off, Tn.cols()) += (rule.weights[q] * f.length) * (Tn.transpose() * gdd(x, t));
      }
    }
  }
  if (scheme == Scheme::DG && F) {
    for_each_interior_facet_point(
        disc, 2 * d.order + 2,
        [&](int, const InteriorFacet& f, double, const Vec2& x, double w, const Matrix* T, const Matrix*) {
          const int K0 = f.element[0], K1 = f.element[1];
          const Vec2 avg =
              0.5 * (F(x, t, disc.subdomain(K0)) / disc.rho(K0) + F(x, t, disc.subdomain(K1)) / disc.rho(K1));
          for (int side = 0; side < 2; ++side)
            b.segment(d.stress_offset[f.element[side]], T[side].cols()) += w * (T[side].transpose() * avg);
        });
  }
  return b;
}

// L2(K) projection of a vector field onto [P_order]^2: coefficients i * dim + l
template <class Fn>
Vector l2_project_vector(const Discretization& disc, int K, int order, Fn&& g) {
  const int nl = scalar_dim(order);
  const ElementGeometry& geo = disc.geometry(K);
  const QuadratureRule rule = make_quadrature(std::min(10, 2 * disc.order() + 4));
  Vector c = Vector::Zero(2 * nl);
  double val[64];
  for (int q = 0; q < rule.size(); ++q) {
    const Vec2 x = geo.to_physical(rule.reference_point(q));
    disc.eval(K, x, val);
    const Vec2 v = g(x);
    const double w = rule.weights[q] * geo.det;
    for (int i = 0; i < 2; ++i)
      for (int l = 0; l < nl; ++l) c[i * nl + l] += w * v[i] * val[l];
  }
  return c;
}

// L2(K) projection onto skew tensors c J with c in P_order; returns c.
// Throws for input that is not skew-symmetric.
template <class Fn>
Vector l2_project_skew(const Discretization& disc, int K, int order, Fn&& s) {
  const int nl = scalar_dim(order);
  const ElementGeometry& geo = disc.geometry(K);
  const QuadratureRule rule = make_quadrature(std::min(10, 2 * disc.order() + 4));
  Vector c = Vector::Zero(nl);
  double val[64];
  for (int q = 0; q < rule.size(); ++q) {
    const Vec2 x = geo.to_physical(rule.reference_point(q));
    disc.eval(K, x, val);
    const Mat2 t = s(x);
    if ((t + t.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, t.cwiseAbs().maxCoeff()))
      throw std::invalid_argument("l2_project_skew: input is not skew-symmetric");
    const double w = rule.weights[q] * geo.det * skew_coefficient(t);
    for (int l = 0; l < nl; ++l) c[l] += w * val[l];
  }
  return c;
}

// gamma_h, zeta_h and div j+ p_h at x in K
inline PairValue evaluate_pair(const Discretization& disc, const Vector& p, int K, const Vec2& x) {
  const DofMap& d = disc.dofs();
  const int n = d.n, off = d.stress_offset[K];
  double val[64];
  Vec2 grad[64];
  disc.eval(K, x, val, grad);
  PairValue out;
  const int blocks = disc.viscous(K) ? 2 : 1;
  for (int b = 0; b < blocks; ++b) {
    Mat2& t = b == 0 ? out.gamma : out.zeta;
    const double scale = b == 0 ? 1.0 : disc.omega(K);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int m = 0; m < n; ++m) {
          const double c = p[off + b * 4 * n + comp(i, j) * n + m];
          t(i, j) += c * val[m];
          out.div_sigma[i] += scale * c * grad[m][j];
        }
  }
  return out;
}

inline Mat2 evaluate_sigma(const Discretization& disc, const Vector& p, int K, const Vec2& x) {
  const PairValue v = evaluate_pair(disc, p, K, x);
  return v.gamma + disc.omega(K) * v.zeta;
}

// scalar P_{k-1} field (rotation coefficient or displacement component) at x
inline double evaluate_low(const Discretization& disc, const double* coeff, int K, const Vec2& x) {
  double val[64];
  disc.eval(K, x, val);
  double s = 0.0;
  for (int l = 0; l < disc.dofs().n_low; ++l) s += coeff[l] * val[l];
  return s;
}

}  // namespace zener
