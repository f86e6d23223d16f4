#pragma once

#include <memory>
#include <string>
#include <vector>

#include "zener/common.hpp"
#include "zener/parallel.hpp"

namespace zener {

// Solver for saddle systems with element-local blocks tied together by
// facet multipliers:
//
//   [ L   C^T ] [ x      ]   [ f ]
//   [ C   0   ] [ lambda ] = [ g ]
//
// L is block diagonal (one dense, symmetric, invertible block per element)
// and each block of C couples one element to the multipliers of its facets.
// Elements are eliminated and lambda solves the sparse Schur system
// (C L^-1 C^T) lambda = C L^-1 f - g.
class CondensedSaddle {
 public:
  struct Block {
    Matrix matrix;             // m_K x m_K
    Matrix coupling;           // (#trace_dofs) x m_K
    std::vector<int> trace_dofs;
  };

  CondensedSaddle() = default;

  CondensedSaddle(std::vector<Block> blocks, int num_trace, int threads = 1)
      : blocks_(std::move(blocks)), num_trace_(num_trace), threads_(threads) {
    const int ne = static_cast<int>(blocks_.size());
    lu_.resize(ne);
    w_.resize(ne);
    parallel_for(ne, threads_, [&](int K) {
      lu_[K].compute(blocks_[K].matrix);
      const double rc = lu_[K].rcond();
      if (!(rc > 1e-14))
        throw SolverError("local block of element " + std::to_string(K) + " is singular (rcond " +
                          std::to_string(rc) + ")");
      if (blocks_[K].coupling.rows() > 0) w_[K] = lu_[K].solve(blocks_[K].coupling.transpose());
    });
    std::vector<Triplet> trip;
    for (int K = 0; K < ne; ++K) {
      const auto& b = blocks_[K];
      if (b.coupling.rows() == 0) continue;
      const Matrix s = b.coupling * w_[K];
      for (int i = 0; i < s.rows(); ++i)
        for (int j = 0; j < s.cols(); ++j) trip.emplace_back(b.trace_dofs[i], b.trace_dofs[j], s(i, j));
    }
    schur_.resize(num_trace_, num_trace_);
    schur_.setFromTriplets(trip.begin(), trip.end());
    if (num_trace_ > 0) {
      ldlt_ = std::make_shared<Eigen::SimplicialLDLT<SparseMatrix>>(schur_);
      if (ldlt_->info() != Eigen::Success) throw SolverError("factorization of the facet Schur complement failed");
      const Vector dg = ldlt_->vectorD();
      const double big = dg.cwiseAbs().maxCoeff();
      if (dg.cwiseAbs().minCoeff() <= 1e-14 * big || (dg.minCoeff() < 0.0 && dg.maxCoeff() > 0.0))
        throw SolverError("facet Schur complement is singular or indefinite");
    }
  }

  int num_elements() const { return static_cast<int>(blocks_.size()); }
  int num_trace() const { return num_trace_; }
  const SparseMatrix& schur() const { return schur_; }
  const Block& block(int K) const { return blocks_[K]; }

  // C L^-1 f - g
  Vector condense(const std::vector<Vector>& f, const Vector* g = nullptr) const {
    Vector r = Vector::Zero(num_trace_);
    std::vector<Vector> y(f.size());
    parallel_for(num_elements(), threads_, [&](int K) {
      if (blocks_[K].coupling.rows() > 0) y[K] = blocks_[K].coupling * lu_[K].solve(f[K]);
    });
    for (int K = 0; K < num_elements(); ++K)
      for (int i = 0; i < y[K].size(); ++i) r[blocks_[K].trace_dofs[i]] += y[K][i];
    if (g) r -= *g;
    return r;
  }

  Vector solve_trace(const Vector& r) const {
    if (num_trace_ == 0) return Vector();
    return ldlt_->solve(r);
  }

  // x_K = L_K^-1 (f_K - C_K^T lambda)
  std::vector<Vector> recover(const std::vector<Vector>& f, const Vector& lambda) const {
    std::vector<Vector> x(f.size());
    parallel_for(num_elements(), threads_, [&](int K) {
      x[K] = lu_[K].solve(f[K]);
      const auto& b = blocks_[K];
      if (b.coupling.rows() > 0) {
        Vector lk(b.trace_dofs.size());
        for (int i = 0; i < lk.size(); ++i) lk[i] = lambda[b.trace_dofs[i]];
        x[K].noalias() -= w_[K] * lk;
      }
    });
    return x;
  }

  std::vector<Vector> solve(const std::vector<Vector>& f, Vector* lambda_out = nullptr,
                            const Vector* g = nullptr) const {
    const Vector lambda = solve_trace(condense(f, g));
    if (lambda_out) *lambda_out = lambda;
    return recover(f, lambda);
  }

 private:
  std::vector<Block> blocks_;
  std::vector<Eigen::PartialPivLU<Matrix>> lu_;
  std::vector<Matrix> w_;  // L_K^-1 C_K^T
  SparseMatrix schur_;
  std::shared_ptr<Eigen::SimplicialLDLT<SparseMatrix>> ldlt_;  // shared: immutable once built
  int num_trace_ = 0;
  int threads_ = 1;
};

}  // namespace zener
