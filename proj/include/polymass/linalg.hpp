#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <numeric>
#include <vector>

#include "polymass/common.hpp"

namespace polymass {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Rank-3 array t(k,i,j); the first index is the derivative slot for d_k g_ij.
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(int n) : n_(n), data_(static_cast<std::size_t>(n) * n * n, 0.0) {}

  int dim() const { return n_; }
  double& operator()(int k, int i, int j) { return data_[(static_cast<std::size_t>(k) * n_ + i) * n_ + j]; }
  double operator()(int k, int i, int j) const { return data_[(static_cast<std::size_t>(k) * n_ + i) * n_ + j]; }

  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  int n_ = 0;
  std::vector<double> data_;
};

/// Rank-4 array t(l,k,i,j) for d_l d_k g_ij.
class Tensor4 {
 public:
  Tensor4() = default;
  explicit Tensor4(int n) : n_(n), data_(static_cast<std::size_t>(n) * n * n * n, 0.0) {}

  int dim() const { return n_; }
  double& operator()(int l, int k, int i, int j) {
    return data_[((static_cast<std::size_t>(l) * n_ + k) * n_ + i) * n_ + j];
  }
  double operator()(int l, int k, int i, int j) const {
    return data_[((static_cast<std::size_t>(l) * n_ + k) * n_ + i) * n_ + j];
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  int n_ = 0;
  std::vector<double> data_;
};

/// Inverse of a symmetric positive definite matrix via Cholesky.
inline Matrix spd_inverse(const Matrix& g, const char* what) {
  Eigen::LLT<Matrix> llt(g);
  if (llt.info() != Eigen::Success)
    throw numerical_error(std::string(what) + ": matrix is not positive definite");
  return llt.solve(Matrix::Identity(g.rows(), g.cols()));
}

/// Euclidean-orthonormal basis of the hyperplane orthogonal to the unit
/// vector nu, returned as columns. Built by Gram-Schmidt seeded from the
/// coordinate axes least aligned with nu (ties broken by lowest axis index),
/// so the frame is reproducible across platforms.
inline Matrix hyperplane_basis(const Vector& nu) {
  const int n = static_cast<int>(nu.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double aa = std::abs(nu[a]), ab = std::abs(nu[b]);
    if (aa != ab) return aa < ab;
    return a < b;
  });

  Matrix basis(n, n - 1);
  int col = 0;
  for (int axis : order) {
    if (col == n - 1) break;
    Vector v = Vector::Zero(n);
    v[axis] = 1.0;
    v -= v.dot(nu) * nu;
    for (int c = 0; c < col; ++c) v -= v.dot(basis.col(c)) * basis.col(c);
    const double len = v.norm();
    if (len < 1e-10) continue;  // axis (numerically) parallel to nu
    basis.col(col++) = v / len;
  }
  if (col != n - 1) throw numerical_error("hyperplane_basis: Gram-Schmidt failed");
  return basis;
}

}  // namespace polymass
