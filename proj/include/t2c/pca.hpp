#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "t2c/augment.hpp"
#include "t2c/core.hpp"

namespace t2c {

struct Projection2D {
  std::vector<std::array<double, 2>> coords;   // row scores on PC1/PC2
  std::array<double, 2> explained_variance{};  // score variance per component
};

namespace detail {

// Top principal component of mean-centered rows by power iteration on the
// Gram operator v -> X^T (X v); X is modified in place by deflation later.
inline std::vector<double> top_component(const std::vector<double>& x,
                                         std::size_t rows, std::size_t cols,
                                         double tol, std::size_t max_iters) {
  Rng rng(0x5ca1ab1eULL);
  std::vector<double> v(cols);
  double norm = 0.0;
  for (auto& e : v) {
    e = rng.normal();
    norm += e * e;
  }
  norm = std::sqrt(norm);
  for (auto& e : v) e /= norm;

  std::vector<double> xv(rows), u(cols);
  double residual = 0.0;
  for (std::size_t iter = 0; iter < max_iters; ++iter) {
    for (std::size_t i = 0; i < rows; ++i) {
      xv[i] = dot(x.data() + i * cols, v.data(), cols);
    }
    std::fill(u.begin(), u.end(), 0.0);
    for (std::size_t i = 0; i < rows; ++i) {
      const double* row = x.data() + i * cols;
      const double s = xv[i];
      for (std::size_t j = 0; j < cols; ++j) u[j] += s * row[j];
    }
    double un = 0.0;
    for (double e : u) un += e * e;
    un = std::sqrt(un);
    if (un == 0.0) return v;  // x is all zeros; any direction will do
    residual = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      const double next = u[j] / un;
      const double d = next - v[j];
      residual += d * d;
      v[j] = next;
    }
    residual = std::sqrt(residual);
    // sign flips between iterations mean we straddle the eigenvector
    if (residual < tol || std::abs(residual - 2.0) < tol) return v;
  }
  throw std::runtime_error("project_2d: power iteration did not converge; residual " +
                           std::to_string(residual) + " after " +
                           std::to_string(max_iters) + " iterations");
}

inline void fix_component_sign(std::vector<double>& v, std::vector<double>& scores) {
  std::size_t arg = 0;
  for (std::size_t j = 1; j < v.size(); ++j) {
    if (std::abs(v[j]) > std::abs(v[arg])) arg = j;
  }
  if (v[arg] < 0.0) {
    for (auto& e : v) e = -e;
    for (auto& s : scores) s = -s;
  }
}

inline Projection2D project_rows_2d(std::vector<double> x, std::size_t rows,
                                    std::size_t cols, double tol,
                                    std::size_t max_iters) {
  if (rows < 3) throw std::invalid_argument("project_2d: need at least 3 rows");
  // center columns
  for (std::size_t j = 0; j < cols; ++j) {
    long double s = 0.0L;
    for (std::size_t i = 0; i < rows; ++i) s += x[i * cols + j];
    const double mu = static_cast<double>(s / static_cast<long double>(rows));
    for (std::size_t i = 0; i < rows; ++i) x[i * cols + j] -= mu;
  }
  Projection2D out;
  out.coords.assign(rows, {0.0, 0.0});
  for (int comp = 0; comp < 2; ++comp) {
    auto v = top_component(x, rows, cols, tol, max_iters);
    std::vector<double> scores(rows);
    for (std::size_t i = 0; i < rows; ++i) {
      scores[i] = dot(x.data() + i * cols, v.data(), cols);
    }
    fix_component_sign(v, scores);
    long double var = 0.0L;
    for (double sc : scores) var += static_cast<long double>(sc) * sc;
    out.explained_variance[static_cast<std::size_t>(comp)] =
        static_cast<double>(var / static_cast<long double>(rows));
    for (std::size_t i = 0; i < rows; ++i) {
      out.coords[i][static_cast<std::size_t>(comp)] = scores[i];
    }
    // deflate: remove the found component before the next pass
    for (std::size_t i = 0; i < rows; ++i) {
      double* row = x.data() + i * cols;
      const double s = scores[i];
      for (std::size_t j = 0; j < cols; ++j) row[j] -= s * v[j];
    }
  }
  return out;
}

}  // namespace detail

// 2-D PCA embedding of the augmented matrix rows, for plot export.
inline Projection2D project_2d(const AugmentedCorrelationMatrix& A,
                               double tol = 1e-8, std::size_t max_iters = 1000) {
  return detail::project_rows_2d(A.entries, A.size(), A.size(), tol, max_iters);
}

}  // namespace t2c
