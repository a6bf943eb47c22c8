#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "t2c/parallel.hpp"
#include "t2c/profile.hpp"

namespace t2c {

struct BagSpec {
  std::size_t start = 0;
  std::size_t window = 0;
  std::size_t kernel = 1;

  // BAGs are anchored forward from `start` and truncated at the end of the
  // subsequence index range, never padded.
  std::size_t effective_kernel(std::size_t n) const {
    return std::min(kernel, n - start);
  }
};

struct AugmentedCorrelationMatrix {
  std::size_t window = 0;
  std::size_t kernel = 1;
  std::size_t n = 0;
  std::vector<double> entries;  // row-major N*N

  std::size_t size() const { return n; }
  double at(std::size_t i, std::size_t j) const { return entries[i * n + j]; }
  const double* row(std::size_t i) const { return entries.data() + i * n; }
};

// Correlation between BAG_i and BAG_j: the maximum of M over the
// effective_ks_i x effective_ks_j block anchored at (i, j).
inline double bag_correlation(const CorrelationMatrix& M, std::size_t i,
                              std::size_t j, std::size_t ks) {
  const std::size_t N = M.size();
  if (i >= N || j >= N) {
    throw std::invalid_argument("bag_correlation: index out of range");
  }
  if (ks < 1) throw std::invalid_argument("bag_correlation: kernel must be >= 1");
  const std::size_t ei = std::min(ks, N - i);
  const std::size_t ej = std::min(ks, N - j);
  double best = M.at(i, j);
  for (std::size_t a = 0; a < ei; ++a) {
    const double* row = M.row(i + a);
    for (std::size_t b = 0; b < ej; ++b) best = std::max(best, row[j + b]);
  }
  return best;
}

namespace detail {

// dst[s] = max(src[s .. min(s+ks, n)-1]); monotonic queue, O(n).
inline void sliding_max_forward(const double* src, std::size_t n, std::size_t ks,
                                double* dst, std::vector<std::size_t>& q) {
  q.clear();
  std::size_t head = 0;
  for (std::size_t e = 0; e < n; ++e) {
    while (q.size() > head && src[q.back()] <= src[e]) q.pop_back();
    q.push_back(e);
    if (e + 1 >= ks) {
      const std::size_t s = e + 1 - ks;
      while (q[head] < s) ++head;
      dst[s] = src[q[head]];
    }
  }
  const std::size_t s0 = n >= ks ? n - ks + 1 : 0;
  for (std::size_t s = s0; s < n; ++s) {
    while (q[head] < s) ++head;
    dst[s] = src[q[head]];
  }
}

inline void transpose_square(std::vector<double>& a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      std::swap(a[i * n + j], a[j * n + i]);
    }
  }
}

}  // namespace detail

// ks x ks max pooling of M with stride 1: entry (i, j) is bag_correlation(M,
// i, j, ks). Separable two-pass sliding maximum, O(N^2) total.
inline AugmentedCorrelationMatrix augment_matrix(const CorrelationMatrix& M,
                                                 std::size_t ks, int threads = 1) {
  if (ks < 1) throw std::invalid_argument("augment_matrix: kernel must be >= 1");
  const std::size_t N = M.size();
  AugmentedCorrelationMatrix A;
  A.window = M.window;
  A.kernel = ks;
  A.n = N;
  if (ks == 1) {
    A.entries = M.entries;
    return A;
  }

  // Pass 1: forward max along each row (over columns j..j+ks-1).
  std::vector<double> tmp(N * N);
  parallel_for(N, threads, [&](std::size_t begin, std::size_t end) {
    std::vector<std::size_t> q;
    for (std::size_t r = begin; r < end; ++r) {
      detail::sliding_max_forward(M.entries.data() + r * N, N, ks,
                                  tmp.data() + r * N, q);
    }
  });

  // Pass 2: forward max along each column, done on the transpose so both
  // passes stream rows.
  detail::transpose_square(tmp, N);
  A.entries.assign(N * N, 0.0);
  parallel_for(N, threads, [&](std::size_t begin, std::size_t end) {
    std::vector<std::size_t> q;
    for (std::size_t r = begin; r < end; ++r) {
      detail::sliding_max_forward(tmp.data() + r * N, N, ks,
                                  A.entries.data() + r * N, q);
    }
  });
  detail::transpose_square(A.entries, N);
  return A;
}

}  // namespace t2c
