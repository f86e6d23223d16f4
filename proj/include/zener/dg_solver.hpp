#pragma once

#include <cmath>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "zener/projector.hpp"
#include "zener/scheme.hpp"

namespace zener {

struct PenaltyConfig {
  enum class Mode { Auto, Fixed };
  Mode mode = Mode::Auto;
  double a = 0.0;  // fixed value, or a lower bound in auto mode
  double safety = 1.5;
};

struct PenaltyChoice {
  double a = 0.0;
  double a0 = 0.0;               // 4 C_tr^2 / |rho^-1|_inf^2 + 9/4
  double trace_constant_sq = 0.0;
};

struct PowerIterationOptions {
  int max_iter = 20000;
  double tol = 1e-9;
  unsigned seed = 12345;
};

// Largest eigenvalue of the symmetric positive semi-definite pencil
// apply(v) = lambda mass(v), with mass_inv mapping back into the search
// space.  Rayleigh quotients of power iterates.
template <class Apply, class MassInv, class Mass>
double power_iteration(int size, Apply&& apply, MassInv&& mass_inv, Mass&& mass, const PowerIterationOptions& opt) {
  std::mt19937 rng(opt.seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Vector v(size);
  for (int i = 0; i < size; ++i) v[i] = U(rng);
  v = mass_inv(mass(v));
  double lambda = 0.0, change = 1.0;
  for (int it = 0; it < opt.max_iter; ++it) {
    const Vector Av = apply(v);
    const double num = v.dot(Av), den = v.dot(mass(v));
    if (!(den > 0.0)) throw SolverError("power iteration: search vector collapsed");
    const double next = num / den;
    change = std::abs(next - lambda) / std::max(std::abs(next), 1e-300);
    lambda = next;
    if (it > 5 && change < opt.tol) return lambda;
    v = mass_inv(Av);
    v /= v.norm();
  }
  if (change > 1e-5) throw SolverError("power iteration did not converge (relative change " + std::to_string(change) + ")");
  return lambda;
}

// C_tr^2 = max over piecewise P_k of sum_F h_F |{v}|_F^2 / |v|^2.  With the
// orthonormal basis the mass matrix is the identity.
inline double trace_constant_sq(const Discretization& disc, const PowerIterationOptions& opt = {}) {
  const int n = disc.dofs().n;
  const LineRule rule = line_rule(2 * disc.order() + 1);
  std::vector<Triplet> trip;
  double v0[64], v1[64];
  for (const InteriorFacet& f : disc.facets().interior) {
    for (int q = 0; q < rule.size(); ++q) {
      const Vec2 x = disc.facet_point(f.v0, f.v1, rule.points[q]);
      disc.eval(f.element[0], x, v0);
      disc.eval(f.element[1], x, v1);
      const double w = rule.weights[q] * f.length * f.length * 0.25;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          const double* va = a ? v1 : v0;
          const double* vb = b ? v1 : v0;
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) trip.emplace_back(f.element[a] * n + i, f.element[b] * n + j, w * va[i] * vb[j]);
        }
    }
  }
  SparseMatrix A(disc.num_elements() * n, disc.num_elements() * n);
  A.setFromTriplets(trip.begin(), trip.end());
  auto id = [](const Vector& v) { return v; };
  return power_iteration(A.rows(), [&](const Vector& v) { return Vector(A * v); }, id, id, opt);
}

inline PenaltyChoice choose_penalty(const Discretization& disc, const PenaltyConfig& cfg) {
  PenaltyChoice c;
  if (cfg.mode == PenaltyConfig::Mode::Fixed) {
    if (!(cfg.a > 0.0)) throw ConfigError("penalty must be positive");
    c.a = cfg.a;
    return c;
  }
  c.trace_constant_sq = trace_constant_sq(disc);
  const double ri = disc.materials().rho_inv_max();
  c.a0 = 4.0 * c.trace_constant_sq / (ri * ri) + 9.0 / 4.0;
  c.a = std::max(cfg.a, cfg.safety * c.a0);
  return c;
}

// Symmetric interior penalty scheme with explicit centred stepping:
//   M dd_t p^k + G d0_t p^k + B_r^T d0_t r^k + S p^k = b_DG(t_k),  B_r p^{k+1} = 0,
// S = Kdiv - J_c - J_c^T + a J_jump.  The left-hand side is element-local.
class DgSolver {
 public:
  DgSolver(DiscretizationPtr disc, TimeGrid grid, double penalty, int threads = 1)
      : disc_(std::move(disc)), grid_(grid), threads_(threads), penalty_(penalty), forms_(assemble_forms(*disc_)) {
    if (!(penalty > 0.0)) throw ConfigError("penalty must be positive");
    facet_ = assemble_dg_facet_terms(*disc_);
    spatial_ = forms_.divdiv - facet_.consistency - SparseMatrix(facet_.consistency.transpose()) +
               penalty_ * facet_.jump;
    blocks_ = build_blocks(grid_.dt());
  }

  const Discretization& disc() const { return *disc_; }
  DiscretizationPtr disc_ptr() const { return disc_; }
  const TimeGrid& grid() const { return grid_; }
  const AssembledForms& forms() const { return forms_; }
  const DgFacetForms& facet_forms() const { return facet_; }
  const SparseMatrix& spatial_operator() const { return spatial_; }
  const CondensedSaddle& blocks() const { return blocks_; }
  double penalty() const { return penalty_; }

  // element-local factorizations of [[M + dt/2 G, B_r^T], [B_r, 0]] (scaled by dt^2)
  CondensedSaddle build_blocks(double dt) const {
    std::vector<CondensedSaddle::Block> b(disc_->num_elements());
    parallel_for(disc_->num_elements(), threads_, [&](int K) {
      b[K].matrix = local_saddle(*disc_, K, local_mass_A(*disc_, K) + (0.5 * dt) * local_damping(*disc_, K));
    });
    return CondensedSaddle(std::move(b), 0, threads_);
  }

  // dt_max = 0.9 * 2 / sqrt(lambda_max) for the mass-preconditioned S on ker B_r
  double estimate_cfl(const PowerIterationOptions& opt = {}) const {
    const DofMap& d = disc_->dofs();
    const CondensedSaddle mass_blocks = build_blocks(0.0);
    auto minv = [&](const Vector& v) { return join_stress(d, mass_blocks.solve(split_stress(d, v, d.n_low))); };
    const double lmax = power_iteration(
        d.num_stress(), [&](const Vector& v) { return Vector(spatial_ * v); }, minv,
        [&](const Vector& v) { return Vector(forms_.mass * v); }, opt);
    return 0.9 * 2.0 / std::sqrt(lmax);
  }

  DgState initialize(const ProblemData& data) {
    const DofMap& d = disc_->dofs();
    const double dt = grid_.dt();
    loads_ = LoadVectors(*disc_, data.loads, Scheme::DG);
    const StartValues sv = start_values(disc_, data, dt, threads_);
    DgState s;
    s.dt = dt;
    s.step = 1;
    s.p_back = s.p_prev = sv.p0;
    s.p_curr = sv.p1;
    s.r_prev = Vector::Zero(d.num_rotation());
    const CondensedSaddle mass_blocks = build_blocks(0.0);
    const Vector rhs = loads_(0.0) - forms_.damping * sv.rate - spatial_ * sv.p0;
    s.r_curr = dt * join_rotation(d, mass_blocks.solve(split_stress(d, rhs, d.n_low)));
    return s;
  }

  Vector rhs(double t) const { return loads_(t); }

  void step(DgState& s) const {
    const DofMap& d = disc_->dofs();
    const double dt = grid_.dt();
    const double tk = grid_.t(s.step);
    const Vector& P = s.p_curr;
    const Vector& Pm = s.p_prev;
    const Vector rhs =
        (dt * dt) * (loads_(tk) - spatial_ * P) + forms_.mass * (2.0 * P - Pm) + (0.5 * dt) * (forms_.damping * Pm);
    const auto x = blocks_.solve(split_stress(d, rhs, d.n_low));
    Vector Pn = join_stress(d, x);
    Vector Rn = s.r_prev + (2.0 / dt) * join_rotation(d, x);
    s.p_back = std::move(s.p_prev);
    s.p_prev = std::move(s.p_curr);
    s.p_curr = std::move(Pn);
    s.r_prev = std::move(s.r_curr);
    s.r_curr = std::move(Rn);
    ++s.step;
  }

  // E^{k-1/2} = 1/2 |d_t p|_M^2 + 1/2 p^{k-1} S p^k
  double energy(const DgState& s) const {
    const Vector v = (s.p_curr - s.p_prev) / grid_.dt();
    return 0.5 * v.dot(forms_.mass * v) + 0.5 * s.p_prev.dot(spatial_ * s.p_curr);
  }

  // |h^-1/2 [[j+ p]]|_{interior facets}
  double jump_seminorm(const Vector& p) const { return std::sqrt(std::max(0.0, p.dot(facet_.jump * p))); }

  Vector acceleration(const DgState& s, const ProblemData& data) const {
    const double t = grid_.t(s.step);
    return zener::acceleration(*disc_, s.p_curr, [&](const Vec2& x, int j) { return data.force(x, t, j); });
  }

 private:
  DiscretizationPtr disc_;
  TimeGrid grid_;
  int threads_;
  double penalty_;
  AssembledForms forms_;
  DgFacetForms facet_;
  SparseMatrix spatial_;
  CondensedSaddle blocks_;
  LoadVectors loads_;
};

}  // namespace zener
