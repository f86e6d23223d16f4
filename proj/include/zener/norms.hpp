#pragma once

#include <cmath>
#include <vector>

#include "zener/assembly.hpp"
#include "zener/discretization.hpp"
#include "zener/manufactured.hpp"

namespace zener {

// Squared errors split by material type.  Interface facets count half to
// each side.
struct RegionSums {
  double all = 0.0;
  double elastic = 0.0;
  double viscous = 0.0;

  void add(bool visc, double v) {
    all += v;
    (visc ? viscous : elastic) += v;
  }
  RegionSums& operator+=(const RegionSums& o) {
    all += o.all;
    elastic += o.elastic;
    viscous += o.viscous;
    return *this;
  }
};

// Error functionals against an exact separable solution, evaluated with
// overkill quadrature of degree 2k+4.  Exact values are tabulated once.
class ErrorEvaluator {
 public:
  ErrorEvaluator(DiscretizationPtr disc, ExactSolution exact) : disc_(std::move(disc)), exact_(std::move(exact)) {
    const Discretization& D = *disc_;
    const int n = D.dofs().n;
    const QuadratureRule rule = make_quadrature(std::min(10, 2 * D.order() + 4));
    nq_ = rule.size();
    const int ne = D.num_elements(), nm = exact_.num_modes();
    weights_.resize(ne * nq_);
    values_.resize(static_cast<std::size_t>(ne) * nq_ * n);
    grads_.resize(static_cast<std::size_t>(ne) * nq_ * n);
    modes_.resize(static_cast<std::size_t>(ne) * nq_ * nm);
    for (int K = 0; K < ne; ++K) {
      const ElementGeometry& g = D.geometry(K);
      for (int q = 0; q < nq_; ++q) {
        const Vec2 x = g.to_physical(rule.reference_point(q));
        const int idx = K * nq_ + q;
        weights_[idx] = rule.weights[q] * g.det;
        D.eval(K, x, &values_[static_cast<std::size_t>(idx) * n], &grads_[static_cast<std::size_t>(idx) * n]);
        for (int m = 0; m < nm; ++m) modes_[static_cast<std::size_t>(idx) * nm + m] = exact_.spatial(m, x, D.subdomain(K));
      }
    }
    // facet tabulation for jump seminorms
    const LineRule lr = line_rule(2 * D.order() + 1);
    for (const InteriorFacet& f : D.facets().interior) {
      FacetTab ft;
      ft.f = f;
      for (int q = 0; q < lr.size(); ++q) {
        const Vec2 x = D.facet_point(f.v0, f.v1, lr.points[q]);
        ft.w.push_back(lr.weights[q]);  // |F| w / h_F
        for (int side = 0; side < 2; ++side) {
          std::vector<double> v(n);
          D.eval(f.element[side], x, v.data());
          ft.vals[side].insert(ft.vals[side].end(), v.begin(), v.end());
        }
      }
      facets_.push_back(std::move(ft));
    }
  }

  const Discretization& disc() const { return *disc_; }

  // |gamma - gamma_h|^2 + |omega (zeta - zeta_h)|^2 + |div (sigma - sigma_h)|^2
  RegionSums stress_sq(const Vector& p, double t) const {
    return volume_sum(p, t, false, true);
  }

  // |j_omega (p' - v)|^2
  RegionSums rate_sq(const Vector& v, double t) const { return volume_sum(v, t, true, false); }

  // |r - r_h|^2 with |c J|^2 = 2 c^2
  RegionSums rotation_sq(const Vector& r, double t) const {
    const Discretization& D = *disc_;
    const int n = D.dofs().n, nl = D.dofs().n_low, nm = exact_.num_modes();
    std::vector<double> th(nm);
    for (int m = 0; m < nm; ++m) th[m] = exact_.factors[m].value(t);
    RegionSums out;
    for (int K = 0; K < D.num_elements(); ++K) {
      double acc = 0.0;
      for (int q = 0; q < nq_; ++q) {
        const std::size_t idx = static_cast<std::size_t>(K) * nq_ + q;
        double ex = 0.0;
        for (int m = 0; m < nm; ++m) ex += th[m] * modes_[idx * nm + m].rotation;
        double rh = 0.0;
        for (int l = 0; l < nl; ++l) rh += r[K * nl + l] * values_[idx * n + l];
        acc += weights_[idx] * 2.0 * (ex - rh) * (ex - rh);
      }
      out.add(D.viscous(K), acc);
    }
    return out;
  }

  // |h^-1/2 [[j+ p]]|^2 over interior facets
  RegionSums jump_sq(const Vector& p) const {
    const Discretization& D = *disc_;
    const DofMap& d = D.dofs();
    const int n = d.n;
    RegionSums out;
    for (const FacetTab& ft : facets_) {
      double acc = 0.0;
      for (std::size_t q = 0; q < ft.w.size(); ++q) {
        Vec2 jump = Vec2::Zero();
        for (int side = 0; side < 2; ++side) {
          const int K = ft.f.element[side];
          const Vec2 nrm = side == 0 ? ft.f.normal : Vec2(-ft.f.normal);
          const double* v = &ft.vals[side][q * n];
          const int off = d.stress_offset[K];
          const int blocks = D.viscous(K) ? 2 : 1;
          for (int b = 0; b < blocks; ++b) {
            const double sc = b == 0 ? 1.0 : D.omega(K);
            for (int i = 0; i < 2; ++i)
              for (int j = 0; j < 2; ++j) {
                double c = 0.0;
                for (int m = 0; m < n; ++m) c += p[off + b * 4 * n + comp(i, j) * n + m] * v[m];
                jump[i] += sc * c * nrm[j];
              }
          }
        }
        acc += ft.w[q] * jump.squaredNorm();
      }
      out.add(D.viscous(ft.f.element[0]), 0.5 * acc);
      out.add(D.viscous(ft.f.element[1]), 0.5 * acc);
    }
    return out;
  }

 private:
  struct FacetTab {
    InteriorFacet f;
    std::vector<double> w;
    std::vector<double> vals[2];
  };

  RegionSums volume_sum(const Vector& p, double t, bool rate, bool with_div) const {
    const Discretization& D = *disc_;
    const DofMap& d = D.dofs();
    const int n = d.n, nm = exact_.num_modes();
    std::vector<double> th(nm);
    for (int m = 0; m < nm; ++m) th[m] = rate ? exact_.factors[m].rate(t) : exact_.factors[m].value(t);
    RegionSums out;
    for (int K = 0; K < D.num_elements(); ++K) {
      const int off = d.stress_offset[K];
      const double w = D.omega(K);
      const bool visc = D.viscous(K);
      double acc = 0.0;
      for (int q = 0; q < nq_; ++q) {
        const std::size_t idx = static_cast<std::size_t>(K) * nq_ + q;
        Mat2 g = Mat2::Zero(), z = Mat2::Zero();
        Vec2 dv = Vec2::Zero();
        for (int m = 0; m < nm; ++m) {
          const ExactMode& e = modes_[idx * nm + m];
          g += th[m] * e.gamma;
          z += th[m] * e.zeta;
          dv += th[m] * e.div_sigma;
        }
        const double* val = &values_[idx * n];
        const Vec2* grd = &grads_[idx * n];
        for (int b = 0; b < (visc ? 2 : 1); ++b) {
          Mat2& tgt = b == 0 ? g : z;
          const double sc = b == 0 ? 1.0 : w;
          for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
              for (int m = 0; m < n; ++m) {
                const double c = p[off + b * 4 * n + comp(i, j) * n + m];
                tgt(i, j) -= c * val[m];
                dv[i] -= sc * c * grd[m][j];
              }
        }
        double e2 = g.squaredNorm() + w * w * z.squaredNorm();
        if (with_div) e2 += dv.squaredNorm();
        acc += weights_[idx] * e2;
      }
      out.add(visc, acc);
    }
    return out;
  }

  DiscretizationPtr disc_;
  ExactSolution exact_;
  int nq_ = 0;
  std::vector<double> weights_;
  std::vector<double> values_;
  std::vector<Vec2> grads_;
  std::vector<ExactMode> modes_;
  std::vector<FacetTab> facets_;
};

}  // namespace zener
