#include <gtest/gtest.h>

#include "helpers.hpp"

using namespace zt;

namespace {

// sum over elements of the integral of f(K, x) with a degree-10 rule
template <class Fn>
double integrate_all(const Discretization& D, Fn&& f) {
  double s = 0.0;
  for (int K = 0; K < D.num_elements(); ++K) s += integrate(D, K, 10, [&](const Vec2& x) { return f(K, x); });
  return s;
}

double frob(const Mat2& a, const Mat2& b) { return (a.array() * b.array()).sum(); }

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

Vec2 facet_normal_jump(const Discretization& D, const Vector& p, const InteriorFacet& f, const Vec2& x) {
  return evaluate_sigma(D, p, f.element[0], x) * f.normal - evaluate_sigma(D, p, f.element[1], x) * f.normal;
}

}  // namespace

TEST(DofMap, TwoViscousElementsOrderOne) {
  const auto D = make_discretization(two_triangles(), viscous_everywhere(), 1);
  const DofMap& d = D->dofs();
  EXPECT_EQ(d.stress_size(0), 24);  // 12 gamma + 12 zeta
  EXPECT_EQ(d.stress_size(1), 24);
  EXPECT_EQ(d.n_low, 1);
  EXPECT_EQ(d.num_rotation(), 2);
  EXPECT_EQ(d.num_displacement(), 4);
  EXPECT_EQ(D->num_trace(), 4);
}

TEST(DofMap, ElasticHasNoZeta) {
  const auto D = make_discretization(two_triangles(), one_material(), 1);
  EXPECT_EQ(D->dofs().num_stress(), 24);
}

TEST(DofMap, OrderTwoCounts) {
  const auto D = make_discretization(two_triangles(), one_material(), 2);
  EXPECT_EQ(D->dofs().n, 6);
  EXPECT_EQ(D->dofs().n_low, 3);
  EXPECT_EQ(D->num_trace(), 6);
}

TEST(DofMap, RangesAreContiguous) {
  const auto D = make_discretization(unit_square(2), composite_materials(), 2);
  const DofMap& d = D->dofs();
  EXPECT_EQ(d.stress_offset.front(), 0);
  for (int K = 0; K < d.num_elements(); ++K) {
    EXPECT_EQ(d.stress_offset[K + 1] - d.stress_offset[K], (D->viscous(K) ? 8 : 4) * d.n);
    EXPECT_EQ(d.gamma(K, 0, 0), d.stress_offset[K]);
    if (D->viscous(K)) EXPECT_EQ(d.zeta(K, 3, d.n - 1), d.stress_offset[K + 1] - 1);
  }
}

class FormsVsQuadrature : public testing::TestWithParam<int> {};

TEST_P(FormsVsQuadrature, RandomPairs) {
  const int k = GetParam();
  const auto Dp = make_discretization(jittered_square(2), composite_materials(), k);
  const Discretization& D = *Dp;
  const DofMap& d = D.dofs();
  const AssembledForms F = assemble_forms(D);
  const SparseMatrix Bu = assemble_displacement_coupling(D);
  const MaterialTable& mats = D.materials();
  std::mt19937 rng(100 + k);
  for (int t = 0; t < 20; ++t) {
    const Vector p = random_vector(d.num_stress(), rng), q = random_vector(d.num_stress(), rng);
    const double m = integrate_all(D, [&](int K, const Vec2& x) {
      const PairValue a = evaluate_pair(D, p, K, x), b = evaluate_pair(D, q, K, x);
      double v = frob(mats.apply_A(D.subdomain(K), a.gamma), b.gamma);
      if (D.viscous(K)) v += D.omega(K) * D.omega(K) * frob(mats.apply_V(D.subdomain(K), a.zeta), b.zeta);
      return v;
    });
    EXPECT_LT(rel(q.dot(F.mass * p), m), 1e-11);
    const double g = integrate_all(D, [&](int K, const Vec2& x) {
      if (!D.viscous(K)) return 0.0;
      const PairValue a = evaluate_pair(D, p, K, x), b = evaluate_pair(D, q, K, x);
      return D.omega(K) * frob(mats.apply_V(D.subdomain(K), a.zeta), b.zeta);
    });
    EXPECT_LT(rel(q.dot(F.damping * p), g), 1e-11);
    const double kd = integrate_all(D, [&](int K, const Vec2& x) {
      return evaluate_pair(D, p, K, x).div_sigma.dot(evaluate_pair(D, q, K, x).div_sigma) / D.rho(K);
    });
    EXPECT_LT(rel(q.dot(F.divdiv * p), kd), 1e-11);

    // rotations s = c J and displacements v
    const Vector c = random_vector(d.num_rotation(), rng), v = random_vector(d.num_displacement(), rng);
    const double br = integrate_all(D, [&](int K, const Vec2& x) {
      const double ck = evaluate_low(D, c.data() + K * d.n_low, K, x);
      return frob(skew_tensor(ck), evaluate_sigma(D, p, K, x));
    });
    EXPECT_LT(rel(c.dot(F.skew * p), br), 1e-11);
    const double bu = integrate_all(D, [&](int K, const Vec2& x) {
      const Vec2 vk(evaluate_low(D, v.data() + 2 * K * d.n_low, K, x),
                    evaluate_low(D, v.data() + (2 * K + 1) * d.n_low, K, x));
      return vk.dot(evaluate_pair(D, p, K, x).div_sigma) / D.rho(K);
    });
    EXPECT_LT(rel(v.dot(Bu * p), bu), 1e-11);

    // facet traces
    const Vector phi = random_vector(D.num_trace(), rng);
    const LineRule lr = gauss_legendre(8);
    double bp = 0.0;
    for (int f = 0; f < D.facets().num_interior(); ++f) {
      const InteriorFacet& fc = D.facets().interior[f];
      for (int iq = 0; iq < lr.size(); ++iq) {
        const double s = lr.points[iq];
        const Vec2 x = D.facet_point(fc.v0, fc.v1, s);
        Vec2 ph = Vec2::Zero();
        for (int dd = 0; dd < 2; ++dd)
          for (int m2 = 0; m2 <= k; ++m2) ph[dd] += phi[d.trace(f, dd, m2)] * legendre01(m2, s) / std::sqrt(fc.length);
        bp += lr.weights[iq] * fc.length * ph.dot(facet_normal_jump(D, p, fc, x));
      }
    }
    EXPECT_LT(rel(phi.dot(F.trace * p), bp), 1e-11);
  }
}

INSTANTIATE_TEST_SUITE_P(Orders, FormsVsQuadrature, testing::Values(1, 2, 3));

TEST(MassA, IdentityComplianceGivesScalarMass) {
  Mesh m;
  m.vertices = {{0, 0}, {1, 0}, {0, 1}};
  m.elements = {{0, 1, 2}};
  m.subdomain = {1};
  MaterialTable t;
  Material mat;
  mat.C = {0.0, 0.5};
  t.set(1, mat);
  const auto D = make_discretization(m, t, 1);
  const Matrix M = Matrix(assemble_mass_A(*D));
  // scalar P1 mass matrix of the modal basis, by quadrature
  const int n = D->dofs().n;
  Matrix S(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      S(i, j) = integrate(*D, 0, 4, [&](const Vec2& x) {
        double v[8];
        D->eval(0, x, v);
        return v[i] * v[j];
      });
  for (int c = 0; c < 4; ++c) EXPECT_LT((M.block(c * n, c * n, n, n) - S).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((M - Matrix::Identity(4 * n, 4 * n)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(MassA, PositiveDefinite) {
  const auto D = make_discretization(jittered_square(2), composite_materials(), 2);
  Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(assemble_mass_A(*D)));
  EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
}

TEST(Damping, ZeroWithoutViscousParts) {
  const auto D = make_discretization(unit_square(2), elastic_materials(), 1);
  EXPECT_EQ(assemble_damping(*D).nonZeros(), 0);
}

TEST(Damping, ScalesWithOmegaAndIsSemiDefinite) {
  MaterialTable t = composite_materials();
  const auto D1 = make_discretization(unit_square(2), t, 1);
  Material v = t.at(2);
  v.omega *= 2.0;
  t.set(2, v);
  const auto D2 = make_discretization(unit_square(2), t, 1);
  const Matrix G1 = Matrix(assemble_damping(*D1)), G2 = Matrix(assemble_damping(*D2));
  EXPECT_LT((G2 - 2.0 * G1).cwiseAbs().maxCoeff(), 1e-13);
  Eigen::SelfAdjointEigenSolver<Matrix> es(G1);
  EXPECT_GT(es.eigenvalues().minCoeff(), -1e-13);
}

TEST(DivDiv, ConstantsInKernel) {
  const auto D = make_discretization(jittered_square(2), composite_materials(), 2);
  const Vector p = project_pair(*D, [](const Vec2&, int) {
    Mat2 a, b;
    a << 1.0, -2.0, 0.5, 3.0;
    b << 0.2, 0.1, -0.7, 1.1;
    return std::make_pair(a, b);
  });
  EXPECT_LT((assemble_div_div(*D) * p).norm(), 1e-12 * p.norm());
}

TEST(DivDiv, LinearEntryEqualsArea) {
  Mesh m;
  m.vertices = {{0, 0}, {1, 0}, {0, 1}};
  m.elements = {{0, 1, 2}};
  m.subdomain = {1};
  const auto D = make_discretization(m, one_material(1.0), 1);
  const Vector p = project_pair(*D, [](const Vec2& x, int) {
    Mat2 a = Mat2::Zero();
    a(0, 0) = x[0];
    return std::make_pair(a, Mat2::Zero().eval());
  });
  EXPECT_NEAR(p.dot(assemble_div_div(*D) * p), 0.5, 1e-14);
}

TEST(DivDiv, DoublingDensityHalves) {
  const auto D1 = make_discretization(two_triangles(), one_material(1.0), 2);
  const auto D2 = make_discretization(two_triangles(), one_material(2.0), 2);
  EXPECT_LT((Matrix(assemble_div_div(*D2)) - 0.5 * Matrix(assemble_div_div(*D1))).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(SkewCoupling, SymmetricFieldsGiveZero) {
  const auto D = make_discretization(jittered_square(2), composite_materials(), 2);
  std::mt19937 rng(4);
  const PolyTensor g(2, rng), z(2, rng);
  const Vector p = project_pair(*D, [&](const Vec2& x, int) {
    const Mat2 a = g(x), b = z(x);
    return std::make_pair(Mat2(a + a.transpose()), Mat2(b + b.transpose()));
  });
  EXPECT_LT((assemble_skew_coupling(*D) * p).norm(), 1e-12);
}

TEST(SkewCoupling, UnitSkewOnUnitAreaElement) {
  Mesh m;
  m.vertices = {{0, 0}, {2, 0}, {0, 1}};
  m.elements = {{0, 1, 2}};
  m.subdomain = {1};
  const auto D = make_discretization(m, one_material(), 1);
  const Vector p = project_pair(*D, [](const Vec2&, int) { return std::make_pair(skew_tensor(1.0), Mat2::Zero().eval()); });
  // s = J: coefficient of the constant 1 in the orthonormal basis is sqrt(area)
  Vector c(1);
  c[0] = 1.0;
  const double area = 1.0;
  EXPECT_NEAR(std::sqrt(area) * c.dot(assemble_skew_coupling(*D) * p), 2.0 * area, 1e-14);
}

TEST(TraceCoupling, ConformingFieldsGiveZero) {
  for (int k = 1; k <= 3; ++k) {
    const auto D = make_discretization(jittered_square(2), composite_materials(), k);
    std::mt19937 rng(k);
    const PolyTensor g(k, rng);
    // sigma = g on both parts: gamma = g on the elastic part, split on the viscous part
    const Vector p = project_pair(*D, [&](const Vec2& x, int j) {
      if (j == 1) return std::make_pair(g(x), Mat2::Zero().eval());
      const double w = 0.5;
      return std::make_pair(Mat2(0.25 * g(x)), Mat2(0.75 * g(x) / w));
    });
    EXPECT_LT((assemble_trace_coupling(*D) * p).norm(), 1e-12 * p.norm());
    EXPECT_EQ(assemble_trace_coupling(*D).rows(), 2 * (k + 1) * D->facets().num_interior());
  }
}

TEST(TraceCoupling, NullityMatchesPointwiseConformity) {
  for (int k = 1; k <= 2; ++k)
    for (bool visc : {false, true}) {
      const auto D = make_discretization(two_triangles(), visc ? viscous_everywhere() : one_material(), k);
      const DofMap& d = D->dofs();
      const Matrix Bpsi = Matrix(assemble_trace_coupling(*D));
      // independent characterization: normal jump vanishes at k+1 distinct edge points
      const InteriorFacet& f = D->facets().interior[0];
      Matrix P = Matrix::Zero(2 * (k + 1), d.num_stress());
      for (int a = 0; a <= k; ++a) {
        const double s = (a + 0.5) / (k + 1);
        const Vec2 x = D->facet_point(f.v0, f.v1, s);
        for (int col = 0; col < d.num_stress(); ++col) {
          Vector e = Vector::Zero(d.num_stress());
          e[col] = 1.0;
          const Vec2 j = facet_normal_jump(*D, e, f, x);
          P(2 * a, col) = j[0];
          P(2 * a + 1, col) = j[1];
        }
      }
      const long dim_b = null_space(Bpsi).cols(), dim_p = null_space(P).cols();
      EXPECT_EQ(dim_b, dim_p) << "k=" << k;
      // closed-form count: all pair dofs minus 2(k+1) normal-continuity conditions
      EXPECT_EQ(dim_b, d.num_stress() - 2 * (k + 1));
    }
}

TEST(DgFacet, ConformingFieldsHaveNoJump) {
  const auto D = make_discretization(jittered_square(2), composite_materials(), 2);
  std::mt19937 rng(8);
  const PolyTensor g(2, rng);
  const Vector p = project_pair(*D, [&](const Vec2& x, int) { return std::make_pair(g(x), Mat2::Zero().eval()); });
  const DgFacetForms f = assemble_dg_facet_terms(*D);
  EXPECT_LT((f.jump * p).norm(), 1e-12 * p.norm());
  EXPECT_LT(std::abs(p.dot(f.consistency * p)), 1e-12 * p.squaredNorm());
}

TEST(DgFacet, ConstantJumpOnSingleFacet) {
  const auto D = make_discretization(two_triangles(), one_material(), 1);
  Mat2 T;
  T << 1.0, 2.0, -0.5, 0.3;
  Vector p = project_pair(*D, [&](const Vec2&, int) { return std::make_pair(T, Mat2::Zero().eval()); });
  p.segment(D->dofs().stress_offset[1], D->dofs().stress_size(1)).setZero();
  const Vec2 jump = T * D->facets().interior[0].normal;
  EXPECT_NEAR(p.dot(assemble_dg_facet_terms(*D).jump * p), jump.squaredNorm(), 1e-13);
}

TEST(DgFacet, SpatialOperatorIsSymmetric) {
  const auto D = make_discretization(jittered_square(2), composite_materials(), 2);
  const AssembledForms F = assemble_forms(*D);
  const DgFacetForms f = assemble_dg_facet_terms(*D);
  const Matrix S = Matrix(F.divdiv - f.consistency - SparseMatrix(f.consistency.transpose()) + 7.0 * f.jump);
  EXPECT_LT((S - S.transpose()).cwiseAbs().maxCoeff(), 1e-10 * S.cwiseAbs().maxCoeff());
  EXPECT_LT((Matrix(0.0 * f.jump)).norm(), 1e-300);
}

TEST(Rhs, ZeroData) {
  const auto D = make_discretization(unit_square(2), composite_materials(), 1);
  EXPECT_EQ(assemble_rhs(*D, {}, {}, 0.0, Scheme::CG).norm(), 0.0);
  const ForceField zf = [](const Vec2&, double, int) { return Vec2::Zero().eval(); };
  const BoundaryField zg = [](const Vec2&, double) { return Vec2::Zero().eval(); };
  EXPECT_EQ(assemble_rhs(*D, zf, zg, 0.3, Scheme::DG).norm(), 0.0);
}

TEST(Rhs, ConstantBoundaryAcceleration) {
  const auto D = make_discretization(two_triangles(), one_material(), 1);
  const Vec2 c(0.7, -1.3);
  const BoundaryField g = [&](const Vec2&, double) { return c; };
  const Vector b = assemble_rhs(*D, {}, g, 0.0, Scheme::CG);
  Vector q = project_pair(*D, [](const Vec2&, int) { return std::make_pair(Mat2::Identity().eval(), Mat2::Zero().eval()); });
  q.segment(D->dofs().stress_offset[1], D->dofs().stress_size(1)).setZero();
  // element 0 = (0,0),(1,0),(1,1): boundary edges y = 0 (n = -e_y) and x = 1 (n = e_x), both of length 1
  EXPECT_NEAR(q.dot(b), c[0] - c[1], 1e-14);
}

TEST(Rhs, ForceTermMatchesQuadratureAndIsLinear) {
  const auto D = make_discretization(jittered_square(2), composite_materials(), 2);
  const ForceField F1 = [](const Vec2& x, double t, int) { return Vec2(std::sin(x[0] + t), x[1] * x[1]); };
  const ForceField F2 = [](const Vec2& x, double, int j) { return Vec2(j, x[0] * x[1]); };
  const ForceField F12 = [&](const Vec2& x, double t, int j) { return Vec2(2.0 * F1(x, t, j) - 3.0 * F2(x, t, j)); };
  for (Scheme s : {Scheme::CG, Scheme::DG}) {
    const Vector b1 = assemble_rhs(*D, F1, {}, 0.2, s), b2 = assemble_rhs(*D, F2, {}, 0.2, s);
    EXPECT_LT((assemble_rhs(*D, F12, {}, 0.2, s) - (2.0 * b1 - 3.0 * b2)).norm(), 1e-12 * b1.norm());
  }
  std::mt19937 rng(2);
  const Vector q = random_vector(D->dofs().num_stress(), rng);
  // CG: -(F, div j+ q)_rho; the default rule is exact for polynomial F of degree <= k+2
  const Vector b2 = assemble_rhs(*D, F2, {}, 0.0, Scheme::CG);
  double ref = 0.0;
  for (int K = 0; K < D->num_elements(); ++K)
    ref -= integrate(*D, K, 10, [&](const Vec2& x) {
      return F2(x, 0.0, D->subdomain(K)).dot(evaluate_pair(*D, q, K, x).div_sigma) / D->rho(K);
    });
  EXPECT_LT(rel(q.dot(b2), ref), 1e-11);
  // DG adds the averaged force against the normal jump
  const Vector d2 = assemble_rhs(*D, F2, {}, 0.0, Scheme::DG);
  const LineRule lr = gauss_legendre(6);
  double extra = 0.0;
  for (const InteriorFacet& f : D->facets().interior)
    for (int iq = 0; iq < lr.size(); ++iq) {
      const Vec2 x = D->facet_point(f.v0, f.v1, lr.points[iq]);
      const Vec2 avg = 0.5 * (F2(x, 0.0, D->subdomain(f.element[0])) / D->rho(f.element[0]) +
                              F2(x, 0.0, D->subdomain(f.element[1])) / D->rho(f.element[1]));
      extra += lr.weights[iq] * f.length * avg.dot(facet_normal_jump(*D, q, f, x));
    }
  EXPECT_LT(rel(q.dot(d2 - b2), extra), 1e-11);
}
