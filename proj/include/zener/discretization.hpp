#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include "zener/basis.hpp"
#include "zener/common.hpp"
#include "zener/materials.hpp"
#include "zener/mesh.hpp"
#include "zener/quadrature.hpp"

namespace zener {

// Affine map x = origin + jac * ref from the reference triangle.
struct ElementGeometry {
  Vec2 origin;
  Mat2 jac;
  Mat2 jac_inv;
  double det = 0.0;
  double diameter = 0.0;

  Vec2 to_reference(const Vec2& x) const { return jac_inv * (x - origin); }
  Vec2 to_physical(const Vec2& ref) const { return origin + jac * ref; }
  double area() const { return 0.5 * det; }
};

// Index layout.  Stress pairs are element-major: on element K the gamma
// block holds component c (row-major) times basis m at c*n + m, and on
// viscoelastic elements the zeta block follows with the same layout.
// Rotations (skew P_{k-1}), displacements ([P_{k-1}]^2) and facet traces
// ([P_k(F)]^2 on interior facets) have their own index spaces.
struct DofMap {
  int order = 1;
  int n = 0;       // dim P_k
  int n_low = 0;   // dim P_{k-1}
  int n_edge = 0;  // dim P_k(F)
  std::vector<int> stress_offset;  // size num_elements + 1
  std::vector<char> viscous;

  int num_elements() const { return static_cast<int>(viscous.size()); }
  int num_stress() const { return stress_offset.back(); }
  int num_rotation() const { return num_elements() * n_low; }
  int num_displacement() const { return 2 * num_elements() * n_low; }
  int num_trace(int num_interior) const { return 2 * n_edge * num_interior; }

  int stress_size(int K) const { return stress_offset[K + 1] - stress_offset[K]; }
  int gamma(int K, int c, int m) const { return stress_offset[K] + c * n + m; }
  int zeta(int K, int c, int m) const { return stress_offset[K] + 4 * n + c * n + m; }
  int rotation(int K, int l) const { return K * n_low + l; }
  int displacement(int K, int i, int l) const { return (2 * K + i) * n_low + l; }
  int trace(int F, int d, int m) const { return (2 * F + d) * n_edge + m; }
};

inline DofMap make_dofmap(const Mesh& mesh, const MaterialTable& mats, int order) {
  DofMap d;
  d.order = order;
  d.n = scalar_dim(order);
  d.n_low = scalar_dim(order - 1);
  d.n_edge = order + 1;
  d.stress_offset.assign(mesh.num_elements() + 1, 0);
  d.viscous.resize(mesh.num_elements());
  for (int K = 0; K < mesh.num_elements(); ++K) {
    d.viscous[K] = mats.at(mesh.subdomain[K]).viscoelastic();
    d.stress_offset[K + 1] = d.stress_offset[K] + (d.viscous[K] ? 8 : 4) * d.n;
  }
  return d;
}

// Everything a scheme needs to know about mesh, materials and spaces.
class Discretization {
 public:
  Discretization(Mesh mesh, MaterialTable materials, int order)
      : mesh_(std::move(mesh)), materials_(std::move(materials)), basis_(order) {
    if (order < 1 || order > 3) throw std::invalid_argument("polynomial order must be 1, 2 or 3");
    validate_mesh(mesh_);
    materials_.validate();
    materials_.check_subdomains(mesh_.subdomain_ids());
    facets_ = build_facets(mesh_);
    dofs_ = make_dofmap(mesh_, materials_, order);
    geo_.resize(mesh_.num_elements());
    for (int K = 0; K < mesh_.num_elements(); ++K) {
      const auto& t = mesh_.elements[K];
      ElementGeometry& g = geo_[K];
      g.origin = mesh_.vertices[t[0]];
      g.jac.col(0) = mesh_.vertices[t[1]] - g.origin;
      g.jac.col(1) = mesh_.vertices[t[2]] - g.origin;
      g.det = g.jac.determinant();
      g.jac_inv = g.jac.inverse();
      g.diameter = mesh_.diameter(K);
    }
  }

  const Mesh& mesh() const { return mesh_; }
  const MaterialTable& materials() const { return materials_; }
  const FacetTopology& facets() const { return facets_; }
  const DofMap& dofs() const { return dofs_; }
  const ScalarBasis& basis() const { return basis_; }
  const ElementGeometry& geometry(int K) const { return geo_[K]; }
  int order() const { return dofs_.order; }
  int num_elements() const { return mesh_.num_elements(); }
  int num_trace() const { return dofs_.num_trace(facets_.num_interior()); }

  const Material& material(int K) const { return materials_.at(mesh_.subdomain[K]); }
  int subdomain(int K) const { return mesh_.subdomain[K]; }
  bool viscous(int K) const { return dofs_.viscous[K]; }
  double omega(int K) const { return material(K).omega; }
  double rho(int K) const { return material(K).rho; }
  double mesh_size() const { return mesh_.mesh_size(); }

  // Values (and physical gradients) of the L2(K)-orthonormal basis at x.
  void eval(int K, const Vec2& x, double* val, Vec2* grad = nullptr) const {
    const ElementGeometry& g = geo_[K];
    const Vec2 ref = g.to_reference(x);
    const double s = 1.0 / std::sqrt(g.det);
    if (!grad) {
      basis_.eval(ref, val);
      for (int i = 0; i < dofs_.n; ++i) val[i] *= s;
      return;
    }
    double dx[64], dy[64];
    basis_.eval_grad(ref, val, dx, dy);
    for (int i = 0; i < dofs_.n; ++i) {
      val[i] *= s;
      grad[i] = s * (g.jac_inv.transpose() * Vec2(dx[i], dy[i]));
    }
  }

  // point at facet coordinate s in [0, 1] running from vertex v0 to v1
  Vec2 facet_point(int v0, int v1, double s) const {
    return (1.0 - s) * mesh_.vertices[v0] + s * mesh_.vertices[v1];
  }

 private:
  Mesh mesh_;
  MaterialTable materials_;
  ScalarBasis basis_;
  FacetTopology facets_;
  DofMap dofs_;
  std::vector<ElementGeometry> geo_;
};

using DiscretizationPtr = std::shared_ptr<const Discretization>;

inline DiscretizationPtr make_discretization(Mesh mesh, MaterialTable materials, int order) {
  return std::make_shared<const Discretization>(std::move(mesh), std::move(materials), order);
}

// Pointwise operators on the local stress-pair basis of element K.
// Tn (2 x nloc): (j+ phi) n ; Dv (2 x nloc): div j+ phi.
inline void pair_point_operators(const Discretization& disc, int K, const Vec2& x, const Vec2& normal, Matrix& Tn,
                                 Matrix& Dv) {
  const DofMap& d = disc.dofs();
  const int n = d.n, nloc = d.stress_size(K);
  double val[64];
  Vec2 grad[64];
  disc.eval(K, x, val, grad);
  Tn.setZero(2, nloc);
  Dv.setZero(2, nloc);
  const double w = disc.omega(K);
  const int blocks = disc.viscous(K) ? 2 : 1;
  for (int b = 0; b < blocks; ++b) {
    const double scale = b == 0 ? 1.0 : w;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int m = 0; m < n; ++m) {
          const int col = b * 4 * n + comp(i, j) * n + m;
          Tn(i, col) = scale * val[m] * normal[j];
          Dv(i, col) = scale * grad[m][j];
        }
  }
}

// (div tau)_i in the P_{k-1} basis for one tensor block: (2 n_low) x (4 n)
inline Matrix local_divergence(const Discretization& disc, int K) {
  const DofMap& d = disc.dofs();
  const int n = d.n, nl = d.n_low;
  const ElementGeometry& g = disc.geometry(K);
  const QuadratureRule rule = make_quadrature(std::max(1, 2 * d.order));
  Matrix D = Matrix::Zero(2 * nl, 4 * n);
  double val[64];
  Vec2 grad[64];
  for (int q = 0; q < rule.size(); ++q) {
    const Vec2 x = g.to_physical(rule.reference_point(q));
    const double w = rule.weights[q] * g.det;
    disc.eval(K, x, val, grad);
    for (int i = 0; i < 2; ++i)
      for (int l = 0; l < nl; ++l)
        for (int j = 0; j < 2; ++j)
          for (int m = 0; m < n; ++m) D(i * nl + l, comp(i, j) * n + m) += w * grad[m][j] * val[l];
  }
  return D;
}

// div j+ on the whole local pair block: [D, omega D] or D
inline Matrix pair_divergence(const Discretization& disc, int K) {
  const Matrix D = local_divergence(disc, K);
  if (!disc.viscous(K)) return D;
  Matrix P(D.rows(), 2 * D.cols());
  P << D, disc.omega(K) * D;
  return P;
}

// (s, j+ q) for s = c J, c in P_{k-1}: n_low x nloc
inline Matrix pair_skew(const Discretization& disc, int K) {
  const DofMap& d = disc.dofs();
  const int n = d.n, nl = d.n_low;
  Matrix B = Matrix::Zero(nl, d.stress_size(K));
  const int blocks = disc.viscous(K) ? 2 : 1;
  for (int b = 0; b < blocks; ++b) {
    const double scale = b == 0 ? 1.0 : disc.omega(K);
    for (int l = 0; l < nl; ++l) {
      B(l, b * 4 * n + comp(0, 1) * n + l) = scale;
      B(l, b * 4 * n + comp(1, 0) * n + l) = -scale;
    }
  }
  return B;
}

inline Matrix kron_identity(const Eigen::Matrix4d& a, int n) {
  Matrix m = Matrix::Zero(4 * n, 4 * n);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      if (a(r, c) != 0.0)
        for (int i = 0; i < n; ++i) m(r * n + i, c * n + i) = a(r, c);
  return m;
}

// (A gamma, eta) + omega^2 (V zeta, tau)
inline Matrix local_mass_A(const Discretization& disc, int K) {
  const int n = disc.dofs().n;
  const Material& mat = disc.material(K);
  Matrix M = Matrix::Zero(disc.dofs().stress_size(K), disc.dofs().stress_size(K));
  M.topLeftCorner(4 * n, 4 * n) = kron_identity(mat.C.inverse_matrix(), n);
  if (disc.viscous(K))
    M.bottomRightCorner(4 * n, 4 * n) = mat.omega * mat.omega * kron_identity(mat.V().inverse_matrix(), n);
  return M;
}

// (A pi2 p, j q) = omega (V zeta, tau)
inline Matrix local_damping(const Discretization& disc, int K) {
  const int n = disc.dofs().n;
  const Material& mat = disc.material(K);
  Matrix G = Matrix::Zero(disc.dofs().stress_size(K), disc.dofs().stress_size(K));
  if (disc.viscous(K)) G.bottomRightCorner(4 * n, 4 * n) = mat.omega * kron_identity(mat.V().inverse_matrix(), n);
  return G;
}

// (div j+ p, div j+ q)_rho
inline Matrix local_div_div(const Discretization& disc, int K) {
  const Matrix P = pair_divergence(disc, K);
  return (P.transpose() * P) / disc.rho(K);
}

}  // namespace zener
