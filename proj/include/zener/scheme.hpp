#pragma once

#include <cmath>
#include <vector>

#include "zener/assembly.hpp"
#include "zener/condensation.hpp"
#include "zener/discretization.hpp"
#include "zener/fields.hpp"
#include "zener/projector.hpp"

namespace zener {

struct TimeGrid {
  double T = 1.0;
  int L = 2;

  TimeGrid() = default;
  TimeGrid(double final_time, int steps) : T(final_time), L(steps) {
    if (!(final_time > 0.0)) throw std::invalid_argument("TimeGrid: T must be positive");
    if (steps < 2) throw std::invalid_argument("TimeGrid: need at least 2 steps");
  }
  double dt() const { return T / L; }
  double t(int k) const { return k * dt(); }
};

struct AssembledForms {
  SparseMatrix mass;     // M_A
  SparseMatrix damping;  // G
  SparseMatrix divdiv;   // Kdiv
  SparseMatrix skew;     // B_r
  SparseMatrix trace;    // B_psi
};

inline AssembledForms assemble_forms(const Discretization& disc) {
  return {assemble_mass_A(disc), assemble_damping(disc), assemble_div_div(disc), assemble_skew_coupling(disc),
          assemble_trace_coupling(disc)};
}

// Iterates at levels k-1 and k (k = step).  psi vectors stay empty for DG.
struct SchemeState {
  int step = 1;
  Vector p_prev, p_curr;
  Vector r_prev, r_curr;
  Vector psi_prev, psi_curr;
  Vector p_back;  // level k-2, kept for the centred velocity at k-1
  double dt = 0.0;

  // (p^k - p^{k-2}) / (2 dt): the centred rate at level k-1
  Vector centred_rate() const { return (p_curr - p_back) / (2.0 * dt); }
};

using CgState = SchemeState;
using DgState = SchemeState;

// Load modes assembled once; rhs(t) is their factor-weighted sum.
class LoadVectors {
 public:
  LoadVectors() = default;
  LoadVectors(const Discretization& disc, const std::vector<LoadMode>& loads, Scheme scheme) {
    for (const auto& l : loads) {
      ForceField F;
      BoundaryField g;
      if (l.force) F = [f = l.force](const Vec2& x, double, int j) { return f(x, j); };
      if (l.boundary_accel) g = [b = l.boundary_accel](const Vec2& x, double) { return b(x); };
      vectors_.push_back(assemble_rhs(disc, F, g, 0.0, scheme));
      factors_.push_back(l.factor);
    }
    size_ = disc.dofs().num_stress();
  }
  Vector operator()(double t) const {
    Vector b = Vector::Zero(size_);
    for (std::size_t m = 0; m < vectors_.size(); ++m) b += factors_[m](t) * vectors_[m];
    return b;
  }

 private:
  std::vector<Vector> vectors_;
  std::vector<std::function<double(double)>> factors_;
  int size_ = 0;
};

// Split a global stress vector into element blocks and back.
inline std::vector<Vector> split_stress(const DofMap& d, const Vector& v, int extra_per_element = 0) {
  std::vector<Vector> out(d.num_elements());
  for (int K = 0; K < d.num_elements(); ++K) {
    out[K] = Vector::Zero(d.stress_size(K) + extra_per_element);
    out[K].head(d.stress_size(K)) = v.segment(d.stress_offset[K], d.stress_size(K));
  }
  return out;
}

inline Vector join_stress(const DofMap& d, const std::vector<Vector>& x) {
  Vector v(d.num_stress());
  for (int K = 0; K < d.num_elements(); ++K) v.segment(d.stress_offset[K], d.stress_size(K)) = x[K].head(d.stress_size(K));
  return v;
}

inline Vector join_rotation(const DofMap& d, const std::vector<Vector>& x) {
  Vector v(d.num_rotation());
  for (int K = 0; K < d.num_elements(); ++K) v.segment(K * d.n_low, d.n_low) = x[K].segment(d.stress_size(K), d.n_low);
  return v;
}

// Local saddle [[A_K, B_r,K^T], [B_r,K, 0]] from a local stress matrix.
inline Matrix local_saddle(const Discretization& disc, int K, const Matrix& A) {
  const int nloc = A.rows(), nl = disc.dofs().n_low;
  const Matrix B = pair_skew(disc, K);
  Matrix L = Matrix::Zero(nloc + nl, nloc + nl);
  L.topLeftCorner(nloc, nloc) = A;
  L.topRightCorner(nloc, nl) = B.transpose();
  L.bottomLeftCorner(nl, nloc) = B;
  return L;
}

// u''_h = rho^-1 (div_h j+ p_h + U_h F); coefficients in the displacement layout
template <class ForceFn>
Vector acceleration(const Discretization& disc, const Vector& p, ForceFn&& force) {
  const DofMap& d = disc.dofs();
  Vector a = Vector::Zero(d.num_displacement());
  for (int K = 0; K < disc.num_elements(); ++K) {
    const int j = disc.subdomain(K);
    Vector loc = pair_divergence(disc, K) * p.segment(d.stress_offset[K], d.stress_size(K));
    loc += l2_project_vector(disc, K, d.order - 1, [&](const Vec2& x) { return force(x, j); });
    a.segment(2 * K * d.n_low, 2 * d.n_low) = loc / disc.rho(K);
  }
  return a;
}

// ||B_r p|| / ||p||: zero when (s, j+ p) = 0 for all s in Q_h
inline double weak_symmetry_residual(const AssembledForms& f, const Vector& p) {
  const double np = p.norm();
  return np > 0.0 ? (f.skew * p).norm() / np : 0.0;
}

// Starting values shared by both schemes: p^0 = Xi p0,
// p^1 = Xi p0 + dt Xi p1 + dt^2/2 Xi p2, r^0 = 0, psi^0 = 0.  The first
// rotation and trace values come from the rates dr/dt(0), dpsi/dt(0) of
// the semi-discrete problem, r^1 = dt dr/dt(0), psi^1 = dt dpsi/dt(0).
struct StartValues {
  Vector p0, p1, rate;  // rate = Xi p1
};

inline StartValues start_values(DiscretizationPtr disc, const ProblemData& data, double dt, int threads) {
  const EllipticProjector xi(disc, threads);
  StartValues s;
  s.p0 = xi.project(data.p0 ? data.p0 : zero_pair_field()).p;
  s.rate = xi.project(data.p1 ? data.p1 : zero_pair_field()).p;
  const Vector a = xi.project(data.p2 ? data.p2 : zero_pair_field()).p;
  s.p1 = s.p0 + dt * s.rate + 0.5 * dt * dt * a;
  return s;
}

}  // namespace zener
