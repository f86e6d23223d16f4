#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "zener/common.hpp"

namespace zener {

// Plane-strain isotropic tensor  X e = lambda tr(e) I + 2 mu e.
struct IsotropicTensor {
  double lambda = 0.0;
  double mu = 0.0;

  template <class T>
  std::array<T, 4> apply(const std::array<T, 4>& e) const {
    const T tr = e[0] + e[3];
    std::array<T, 4> r = {2.0 * mu * e[0], 2.0 * mu * e[1], 2.0 * mu * e[2], 2.0 * mu * e[3]};
    r[0] += lambda * tr;
    r[3] += lambda * tr;
    return r;
  }

  // valid on non-symmetric arguments as well
  template <class T>
  std::array<T, 4> apply_inverse(const std::array<T, 4>& s) const {
    const T tr = s[0] + s[3];
    const double a = 1.0 / (2.0 * mu);
    const double b = lambda / (2.0 * mu * (2.0 * lambda + 2.0 * mu));
    std::array<T, 4> r = {a * s[0], a * s[1], a * s[2], a * s[3]};
    r[0] -= b * tr;
    r[3] -= b * tr;
    return r;
  }

  Mat2 apply(const Mat2& e) const { return from_components(apply(to_components(e))); }
  Mat2 apply_inverse(const Mat2& s) const { return from_components(apply_inverse(to_components(s))); }

  // 4x4 matrix acting on row-major components
  Eigen::Matrix4d matrix() const {
    Eigen::Matrix4d m = 2.0 * mu * Eigen::Matrix4d::Identity();
    for (int i : {0, 3})
      for (int j : {0, 3}) m(i, j) += lambda;
    return m;
  }

  Eigen::Matrix4d inverse_matrix() const {
    const double a = 1.0 / (2.0 * mu);
    const double b = lambda / (2.0 * mu * (2.0 * lambda + 2.0 * mu));
    Eigen::Matrix4d m = a * Eigen::Matrix4d::Identity();
    for (int i : {0, 3})
      for (int j : {0, 3}) m(i, j) -= b;
    return m;
  }

  // eigenvalues on 2x2 tensors: 2 mu (three times) and 2 lambda + 2 mu
  double min_eigenvalue() const { return std::min(2.0 * mu, 2.0 * lambda + 2.0 * mu); }
  double max_eigenvalue() const { return std::max(2.0 * mu, 2.0 * lambda + 2.0 * mu); }
  bool positive_definite() const { return mu > 0.0 && lambda + mu > 0.0; }
};

inline IsotropicTensor operator-(const IsotropicTensor& a, const IsotropicTensor& b) {
  return {a.lambda - b.lambda, a.mu - b.mu};
}

struct Material {
  double rho = 1.0;
  double omega = 0.0;  // 0 marks an elastic subdomain
  IsotropicTensor C;
  IsotropicTensor D;   // only meaningful when omega > 0

  bool viscoelastic() const { return omega > 0.0; }
  IsotropicTensor V() const { return D - C; }  // (D - C), inverse of the V compliance
  // omega-tilde^{-1}: 1/omega on viscoelastic parts, 0 on elastic parts
  double omega_tilde_inv() const { return viscoelastic() ? 1.0 / omega : 0.0; }
};

struct CoercivityBounds {
  double alpha = 0.0;  // smallest eigenvalue of the compliances A, V
  double M = 0.0;      // largest
};

class MaterialTable {
 public:
  MaterialTable() = default;

  void set(int id, const Material& m) { by_id_[id] = m; }
  bool contains(int id) const { return by_id_.count(id) > 0; }
  const Material& at(int id) const {
    auto it = by_id_.find(id);
    if (it == by_id_.end()) throw MaterialError("no material for subdomain " + std::to_string(id));
    return it->second;
  }
  const std::map<int, Material>& entries() const { return by_id_; }

  Mat2 apply_C(int id, const Mat2& e) const { return at(id).C.apply(e); }
  Mat2 apply_D(int id, const Mat2& e) const { return at(id).D.apply(e); }
  Mat2 apply_A(int id, const Mat2& s) const { return at(id).C.apply_inverse(s); }
  Mat2 apply_V(int id, const Mat2& s) const {
    const Material& m = at(id);
    if (!m.viscoelastic()) throw MaterialError("V requested on elastic subdomain " + std::to_string(id));
    return m.V().apply_inverse(s);
  }

  // Collects every violation and throws one MaterialError listing them.
  void validate() const {
    std::vector<std::string> problems;
    for (const auto& [id, m] : by_id_) {
      const std::string tag = "subdomain " + std::to_string(id) + ": ";
      if (!(m.rho > 0.0)) problems.push_back(tag + "rho must be positive");
      if (m.omega < 0.0) problems.push_back(tag + "omega must be >= 0");
      if (!m.C.positive_definite()) problems.push_back(tag + "C is not positive definite");
      if (m.viscoelastic()) {
        if (!m.D.positive_definite()) problems.push_back(tag + "D is not positive definite");
        if (!m.V().positive_definite()) problems.push_back(tag + "D - C is not positive definite");
      }
    }
    if (by_id_.empty()) problems.push_back("material table is empty");
    if (!problems.empty()) {
      std::ostringstream os;
      os << "invalid materials:";
      for (const auto& p : problems) os << "\n  " << p;
      throw MaterialError(os.str());
    }
  }

  // every subdomain id of the mesh needs an entry
  void check_subdomains(const std::set<int>& ids) const {
    std::vector<int> missing;
    for (int id : ids)
      if (!contains(id)) missing.push_back(id);
    if (!missing.empty()) {
      std::ostringstream os;
      os << "no material for subdomain id(s):";
      for (int id : missing) os << ' ' << id;
      throw MaterialError(os.str());
    }
  }

  CoercivityBounds coercivity() const {
    CoercivityBounds b{1e300, 0.0};
    for (const auto& [id, m] : by_id_) {
      b.alpha = std::min(b.alpha, 1.0 / m.C.max_eigenvalue());
      b.M = std::max(b.M, 1.0 / m.C.min_eigenvalue());
      if (m.viscoelastic()) {
        b.alpha = std::min(b.alpha, 1.0 / m.V().max_eigenvalue());
        b.M = std::max(b.M, 1.0 / m.V().min_eigenvalue());
      }
    }
    return b;
  }

  double rho_inv_max() const {
    double r = 0.0;
    for (const auto& [id, m] : by_id_) r = std::max(r, 1.0 / m.rho);
    return r;
  }

 private:
  std::map<int, Material> by_id_;
};

}  // namespace zener
