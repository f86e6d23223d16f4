#pragma once

#include <vector>

#include "zener/assembly.hpp"
#include "zener/condensation.hpp"
#include "zener/discretization.hpp"
#include "zener/fields.hpp"

namespace zener {

struct LocalTraceCoupling {
  Matrix coupling;  // rows: trace dofs of the interior facets of K; cols: local stress dofs
  std::vector<int> trace_dofs;
};

// Rows of (phi, [[j+ q]]) that touch element K, restricted to its stress block.
inline std::vector<LocalTraceCoupling> split_trace_coupling(const Discretization& disc, const SparseMatrix& Bpsi) {
  const DofMap& d = disc.dofs();
  Eigen::SparseMatrix<double, Eigen::RowMajor> B = Bpsi;
  std::vector<LocalTraceCoupling> out(disc.num_elements());
  for (int K = 0; K < disc.num_elements(); ++K) {
    auto& lc = out[K];
    for (int le = 0; le < 3; ++le) {
      const int F = disc.facets().element_facets[K][le];
      if (F < 0) continue;
      for (int dd = 0; dd < 2; ++dd)
        for (int m = 0; m < d.n_edge; ++m) lc.trace_dofs.push_back(d.trace(F, dd, m));
    }
    const int off = d.stress_offset[K], nloc = d.stress_size(K);
    lc.coupling = Matrix::Zero(lc.trace_dofs.size(), nloc);
    for (int r = 0; r < static_cast<int>(lc.trace_dofs.size()); ++r)
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(B, lc.trace_dofs[r]); it; ++it)
        if (it.col() >= off && it.col() < off + nloc) lc.coupling(r, it.col() - off) = it.value();
  }
  return out;
}

// Pads a local stress-block coupling with zero columns for the extra local unknowns.
inline Matrix pad_columns(const Matrix& c, int total_cols) {
  Matrix out = Matrix::Zero(c.rows(), total_cols);
  out.leftCols(c.cols()) = c;
  return out;
}

struct ProjectedPair {
  Vector p;  // stress pair in S_h
  Vector r;  // rotation multiplier
  Vector u;  // displacement multiplier
};

// Discrete elliptic projection Xi_h: p_h in S_h with
//   (p_h, q) + (r, j+ q) + (u, div j+ q)_rho = (p, q)
//   (s, j+ p_h)                            = (s, j+ p)
//   (v, div j+ p_h)_rho                    = (v, div j+ p)_rho
// for all q in S_h, s in Q_h, v in U_h.  Solved by static condensation.
class EllipticProjector {
 public:
  explicit EllipticProjector(DiscretizationPtr disc, int threads = 1) : disc_(std::move(disc)) {
    const Discretization& D = *disc_;
    const DofMap& d = D.dofs();
    const auto traces = split_trace_coupling(D, assemble_trace_coupling(D));
    std::vector<CondensedSaddle::Block> blocks(D.num_elements());
    for (int K = 0; K < D.num_elements(); ++K) {
      const int nloc = d.stress_size(K), nl = d.n_low, m = nloc + 3 * nl;
      Matrix B(3 * nl, nloc);
      B << pair_skew(D, K), pair_divergence(D, K) / D.rho(K);
      Matrix L = Matrix::Zero(m, m);
      L.topLeftCorner(nloc, nloc).setIdentity();
      L.topRightCorner(nloc, 3 * nl) = B.transpose();
      L.bottomLeftCorner(3 * nl, nloc) = B;
      blocks[K].matrix = L;
      blocks[K].coupling = pad_columns(-traces[K].coupling, m);
      blocks[K].trace_dofs = traces[K].trace_dofs;
    }
    sys_ = CondensedSaddle(std::move(blocks), D.num_trace(), threads);
  }

  ProjectedPair project(const PairField& field) const {
    const Discretization& D = *disc_;
    const DofMap& d = D.dofs();
    const int n = d.n, nl = d.n_low;
    const QuadratureRule rule = make_quadrature(std::min(10, 2 * d.order + 4));
    std::vector<Vector> f(D.num_elements());
    double val[64];
    for (int K = 0; K < D.num_elements(); ++K) {
      const int nloc = d.stress_size(K);
      const ElementGeometry& g = D.geometry(K);
      const double w = D.omega(K), rho = D.rho(K);
      Vector fk = Vector::Zero(nloc + 3 * nl);
      for (int q = 0; q < rule.size(); ++q) {
        const Vec2 x = g.to_physical(rule.reference_point(q));
        const double wq = rule.weights[q] * g.det;
        D.eval(K, x, val);
        const PairValue pv = field(x, D.subdomain(K));
        const Mat2 sigma = pv.gamma + w * pv.zeta;
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j)
            for (int mm = 0; mm < n; ++mm) {
              fk[comp(i, j) * n + mm] += wq * pv.gamma(i, j) * val[mm];
              if (D.viscous(K)) fk[4 * n + comp(i, j) * n + mm] += wq * pv.zeta(i, j) * val[mm];
            }
        for (int l = 0; l < nl; ++l) {
          fk[nloc + l] += wq * (sigma(0, 1) - sigma(1, 0)) * val[l];
          for (int i = 0; i < 2; ++i) fk[nloc + nl + i * nl + l] += wq * pv.div_sigma[i] * val[l] / rho;
        }
      }
      f[K] = std::move(fk);
    }
    const std::vector<Vector> x = sys_.solve(f);
    ProjectedPair out;
    out.p = Vector::Zero(d.num_stress());
    out.r = Vector::Zero(d.num_rotation());
    out.u = Vector::Zero(d.num_displacement());
    for (int K = 0; K < D.num_elements(); ++K) {
      const int nloc = d.stress_size(K);
      out.p.segment(d.stress_offset[K], nloc) = x[K].head(nloc);
      out.r.segment(K * nl, nl) = x[K].segment(nloc, nl);
      out.u.segment(2 * K * nl, 2 * nl) = x[K].segment(nloc + nl, 2 * nl);
    }
    return out;
  }

  const CondensedSaddle& system() const { return sys_; }

 private:
  DiscretizationPtr disc_;
  CondensedSaddle sys_;
};

inline ProjectedPair elliptic_project(DiscretizationPtr disc, const PairField& field) {
  return EllipticProjector(std::move(disc)).project(field);
}

// Discrete inf-sup constant of (q, (s, v)) -> (s, j+ q) + (v, div j+ q)
// over S_h x (Q_h x U_h) in the S-norm.  Dense eigenvalue problem on
// Q_h x U_h, so the size is capped.
inline double inf_sup_estimate(const Discretization& D, int max_dim = 4000) {
  const DofMap& d = D.dofs();
  const int nl = d.n_low, ny = 3 * nl;
  const int dim = D.num_elements() * ny;
  if (dim > max_dim) throw std::invalid_argument("inf_sup_estimate: problem too large for a dense eigen solve");
  const auto traces = split_trace_coupling(D, assemble_trace_coupling(D));
  std::vector<CondensedSaddle::Block> blocks(D.num_elements());
  std::vector<Matrix> B(D.num_elements());
  for (int K = 0; K < D.num_elements(); ++K) {
    const int nloc = d.stress_size(K);
    const Matrix Pd = pair_divergence(D, K);
    B[K].resize(ny, nloc);
    B[K] << pair_skew(D, K), Pd;
    Matrix X = Pd.transpose() * Pd;
    X.topLeftCorner(4 * d.n, 4 * d.n).diagonal().array() += 1.0;
    if (D.viscous(K)) X.bottomRightCorner(4 * d.n, 4 * d.n).diagonal().array() += D.omega(K) * D.omega(K);
    blocks[K].matrix = X;
    blocks[K].coupling = -traces[K].coupling;
    blocks[K].trace_dofs = traces[K].trace_dofs;
  }
  const CondensedSaddle sys(std::move(blocks), D.num_trace());
  Matrix T = Matrix::Zero(dim, dim);
  std::vector<Vector> f(D.num_elements());
  for (int K = 0; K < D.num_elements(); ++K) f[K] = Vector::Zero(d.stress_size(K));
  for (int col = 0; col < dim; ++col) {
    const int K = col / ny, a = col % ny;
    f[K] = B[K].row(a).transpose();
    const auto q = sys.solve(f);
    f[K].setZero();
    for (int K2 = 0; K2 < D.num_elements(); ++K2) T.block(K2 * ny, col, ny, 1) = B[K2] * q[K2];
  }
  const Matrix Ts = 0.5 * (T + T.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(Ts, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues()[0]));
}

}  // namespace zener
