#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <array>
#include <stdexcept>
#include <string>

namespace zener {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class TopologyError : public Error {
 public:
  using Error::Error;
};

class MaterialError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

// dim P_k in two variables; zero for k < 0
constexpr int scalar_dim(int k) { return k < 0 ? 0 : (k + 1) * (k + 2) / 2; }

// 2x2 tensors are stored row-major as 4 components: c = 2*i + j.
constexpr int comp(int i, int j) { return 2 * i + j; }

inline std::array<double, 4> to_components(const Mat2& t) {
  return {t(0, 0), t(0, 1), t(1, 0), t(1, 1)};
}

inline Mat2 from_components(const std::array<double, 4>& c) {
  Mat2 t;
  t << c[0], c[1], c[2], c[3];
  return t;
}

// coefficient of the skew tensor [[0, c], [-c, 0]] closest to t
inline double skew_coefficient(const Mat2& t) { return 0.5 * (t(0, 1) - t(1, 0)); }

inline Mat2 skew_tensor(double c) {
  Mat2 s;
  s << 0.0, c, -c, 0.0;
  return s;
}

}  // namespace zener
