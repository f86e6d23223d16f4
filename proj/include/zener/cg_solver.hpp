#pragma once

#include <string>
#include <vector>

#include "zener/projector.hpp"
#include "zener/scheme.hpp"

namespace zener {

// Element blocks of the trapezoidal step, multiplied through by dt^2 so
// that the mass term is O(1):
//   [ M + dt/2 G + dt^2/4 Kdiv   B_r^T ]   coupled to the traces by -B_psi.
//   [ B_r                         0    ]
inline CondensedSaddle build_condensed(const Discretization& disc, const TimeGrid& grid, int threads = 1) {
  const double dt = grid.dt();
  const auto traces = split_trace_coupling(disc, assemble_trace_coupling(disc));
  std::vector<CondensedSaddle::Block> blocks(disc.num_elements());
  parallel_for(disc.num_elements(), threads, [&](int K) {
    const Matrix A = local_mass_A(disc, K) + (0.5 * dt) * local_damping(disc, K) +
                     (0.25 * dt * dt) * local_div_div(disc, K);
    blocks[K].matrix = local_saddle(disc, K, A);
    blocks[K].coupling = pad_columns(-traces[K].coupling, blocks[K].matrix.cols());
    blocks[K].trace_dofs = traces[K].trace_dofs;
  });
  return CondensedSaddle(std::move(blocks), disc.num_trace(), threads);
}

// Hybridized mixed scheme with trapezoidal (average acceleration) stepping:
//   M dd_t p^k + G d0_t p^k + Kdiv (p^{k+1} + 2p^k + p^{k-1})/4
//     + B_r^T d0_t r^k - B_psi^T d0_t psi^k = b(t_k),
//   B_r p^{k+1} = 0,  B_psi p^{k+1} = 0.
// Only the rates d0_t r, d0_t psi enter, so they are the unknowns of the
// condensed solve and r, psi are updated from them.
class CgHybridSolver {
 public:
  CgHybridSolver(DiscretizationPtr disc, TimeGrid grid, int threads = 1)
      : disc_(std::move(disc)), grid_(grid), threads_(threads), forms_(assemble_forms(*disc_)) {
    system_ = build_condensed(*disc_, grid_, threads_);
  }

  const Discretization& disc() const { return *disc_; }
  DiscretizationPtr disc_ptr() const { return disc_; }
  const TimeGrid& grid() const { return grid_; }
  const AssembledForms& forms() const { return forms_; }
  const CondensedSaddle& system() const { return system_; }

  CgState initialize(const ProblemData& data) {
    const DofMap& d = disc_->dofs();
    const double dt = grid_.dt();
    loads_ = LoadVectors(*disc_, data.loads, Scheme::CG);
    const StartValues sv = start_values(disc_, data, dt, threads_);
    CgState s;
    s.dt = dt;
    s.step = 1;
    s.p_back = s.p_prev = sv.p0;
    s.p_curr = sv.p1;
    s.r_prev = Vector::Zero(d.num_rotation());
    s.psi_prev = Vector::Zero(disc_->num_trace());

    // rates of r and psi at t = 0 from the semi-discrete problem
    const auto traces = split_trace_coupling(*disc_, forms_.trace);
    std::vector<CondensedSaddle::Block> blocks(disc_->num_elements());
    for (int K = 0; K < disc_->num_elements(); ++K) {
      blocks[K].matrix = local_saddle(*disc_, K, local_mass_A(*disc_, K));
      blocks[K].coupling = pad_columns(-traces[K].coupling, blocks[K].matrix.cols());
      blocks[K].trace_dofs = traces[K].trace_dofs;
    }
    const CondensedSaddle accel(std::move(blocks), disc_->num_trace(), threads_);
    const Vector rhs = loads_(0.0) - forms_.damping * sv.rate - forms_.divdiv * sv.p0;
    Vector psi_rate;
    const auto x = accel.solve(split_stress(d, rhs, d.n_low), &psi_rate);
    s.r_curr = dt * join_rotation(d, x);
    s.psi_curr = psi_rate.size() ? Vector(dt * psi_rate) : Vector::Zero(0);
    return s;
  }

  Vector rhs(double t) const { return loads_(t); }

  // advances (p, r, psi) from levels (k-1, k) to (k, k+1)
  void step(CgState& s) const {
    const DofMap& d = disc_->dofs();
    const double dt = grid_.dt();
    const double tk = grid_.t(s.step);
    const Vector& P = s.p_curr;
    const Vector& Pm = s.p_prev;
    const Vector rhs = (dt * dt) * loads_(tk) + forms_.mass * (2.0 * P - Pm) + (0.5 * dt) * (forms_.damping * Pm) -
                       (0.25 * dt * dt) * (forms_.divdiv * (2.0 * P + Pm));
    Vector lambda;
    const auto x = system_.solve(split_stress(d, rhs, d.n_low), &lambda);
    Vector Pn = join_stress(d, x);
    Vector Rn = s.r_prev + (2.0 / dt) * join_rotation(d, x);
    Vector Psin = lambda.size() ? Vector(s.psi_prev + (2.0 / dt) * lambda) : s.psi_prev;
    check_constraints(Pn);
    s.p_back = std::move(s.p_prev);
    s.p_prev = std::move(s.p_curr);
    s.p_curr = std::move(Pn);
    s.r_prev = std::move(s.r_curr);
    s.r_curr = std::move(Rn);
    s.psi_prev = std::move(s.psi_curr);
    s.psi_curr = std::move(Psin);
    ++s.step;
  }

  // E^{k-1/2} = 1/2 |d_t p|_M^2 + 1/2 |p^{k-1/2}|_Kdiv^2 for levels (k-1, k) of s
  double energy(const CgState& s) const {
    const Vector v = (s.p_curr - s.p_prev) / grid_.dt();
    const Vector m = 0.5 * (s.p_curr + s.p_prev);
    return 0.5 * v.dot(forms_.mass * v) + 0.5 * m.dot(forms_.divdiv * m);
  }

  // u''_h at t_k of level p_curr
  Vector acceleration(const CgState& s, const ProblemData& data) const {
    const double t = grid_.t(s.step);
    return zener::acceleration(*disc_, s.p_curr, [&](const Vec2& x, int j) { return data.force(x, t, j); });
  }

 private:
  void check_constraints(const Vector& p) const {
    const double scale = std::max(p.norm(), 1e-300);
    const double rs = (forms_.skew * p).norm() / scale;
    const double rt = forms_.trace.rows() ? (forms_.trace * p).norm() / scale : 0.0;
    if (rs > 1e-8 || rt > 1e-8)
      throw SolverError("constraint residual too large after step (weak symmetry " + std::to_string(rs) +
                        ", trace " + std::to_string(rt) + ")");
  }

  DiscretizationPtr disc_;
  TimeGrid grid_;
  int threads_;
  AssembledForms forms_;
  CondensedSaddle system_;
  LoadVectors loads_;
};

}  // namespace zener
