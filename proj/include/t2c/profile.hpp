#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "t2c/core.hpp"
#include "t2c/fft.hpp"
#include "t2c/parallel.hpp"

namespace t2c {

enum class ProfileMethod { naive, fast };

struct ProfileOptions {
  ProfileMethod method = ProfileMethod::fast;
  std::uint64_t mem_cap_bytes = 2ULL * 1024 * 1024 * 1024;
  int threads = 1;
};

// z-normalized Euclidean distance from Pearson correlation: D = sqrt(2m(1-rho))
inline double corr_to_dist(double rho, std::size_t m) {
  if (m < 1) throw std::invalid_argument("corr_to_dist: m must be positive");
  if (rho < -1.0 - 1e-9 || rho > 1.0 + 1e-9) {
    throw std::invalid_argument("corr_to_dist: correlation outside [-1, 1]");
  }
  rho = std::clamp(rho, -1.0, 1.0);
  return std::sqrt(2.0 * static_cast<double>(m) * (1.0 - rho));
}

inline double dist_to_corr(double d, std::size_t m) {
  if (m < 1) throw std::invalid_argument("dist_to_corr: m must be positive");
  const double dmax = std::sqrt(4.0 * static_cast<double>(m));
  if (d < 0.0 || d > dmax * (1.0 + 1e-9)) {
    throw std::invalid_argument("dist_to_corr: distance outside [0, sqrt(4m)]");
  }
  const double rho = 1.0 - d * d / (2.0 * static_cast<double>(m));
  return std::clamp(rho, -1.0, 1.0);
}

struct DistanceProfile {
  std::size_t query_start = 0;
  std::size_t window = 0;
  std::vector<double> correlations;  // one per subsequence, each in [-1, 1]
};

struct CorrelationMatrix {
  std::size_t window = 0;
  std::size_t n = 0;               // N = series length - window + 1
  std::vector<double> entries;     // row-major N*N, symmetric, unit diagonal

  std::size_t size() const { return n; }
  double at(std::size_t i, std::size_t j) const { return entries[i * n + j]; }
  const double* row(std::size_t i) const { return entries.data() + i * n; }
};

namespace detail {

struct RollingStats {
  std::vector<double> mean;
  std::vector<double> std;  // population
};

inline RollingStats rolling_mean_std(std::span<const double> x, std::size_t m) {
  const std::size_t count = x.size() - m + 1;
  std::vector<long double> c1(x.size() + 1, 0.0L), c2(x.size() + 1, 0.0L);
  for (std::size_t t = 0; t < x.size(); ++t) {
    c1[t + 1] = c1[t] + x[t];
    c2[t + 1] = c2[t] + static_cast<long double>(x[t]) * x[t];
  }
  RollingStats rs;
  rs.mean.resize(count);
  rs.std.resize(count);
  const long double inv_m = 1.0L / static_cast<long double>(m);
  for (std::size_t j = 0; j < count; ++j) {
    const long double mu = (c1[j + m] - c1[j]) * inv_m;
    long double var = (c2[j + m] - c2[j]) * inv_m - mu * mu;
    if (var < 0.0L) var = 0.0L;
    rs.mean[j] = static_cast<double>(mu);
    rs.std[j] = static_cast<double>(std::sqrt(static_cast<double>(var)));
  }
  return rs;
}

// Per-pair two-pass Pearson; the reference the fast path is checked against.
inline double pearson_pair(std::span<const double> x, std::size_t i, std::size_t j,
                           std::size_t m) {
  if (i == j) return 1.0;
  long double sx = 0.0L, sy = 0.0L;
  for (std::size_t t = 0; t < m; ++t) {
    sx += x[i + t];
    sy += x[j + t];
  }
  const double mx = static_cast<double>(sx / static_cast<long double>(m));
  const double my = static_cast<double>(sy / static_cast<long double>(m));
  long double cov = 0.0L, vx = 0.0L, vy = 0.0L;
  for (std::size_t t = 0; t < m; ++t) {
    const long double dx = x[i + t] - mx;
    const long double dy = x[j + t] - my;
    cov += dx * dy;
    vx += dx * dx;
    vy += dy * dy;
  }
  const double sdx = std::sqrt(static_cast<double>(vx) / static_cast<double>(m));
  const double sdy = std::sqrt(static_cast<double>(vy) / static_cast<double>(m));
  if (sdx < kFlatEpsilon || sdy < kFlatEpsilon) return 0.0;
  const double rho = static_cast<double>(cov) /
                     (static_cast<double>(m) * sdx * sdy);
  return std::clamp(rho, -1.0, 1.0);
}

// One correlation row against every window, using a prebuilt FFT plan and
// rolling stats. Centering the query makes the sliding dot product equal the
// covariance directly, so no large-mean cancellation occurs.
inline void fast_row(std::span<const double> x, std::size_t q, std::size_t m,
                     const SlidingDotPlan& plan, const RollingStats& rs,
                     std::vector<double>& query_buf, std::vector<double>& dot_buf,
                     double* out) {
  const std::size_t count = plan.count();
  if (rs.std[q] < kFlatEpsilon) {
    std::fill(out, out + count, 0.0);
    out[q] = 1.0;
    return;
  }
  query_buf.resize(m);
  for (std::size_t t = 0; t < m; ++t) query_buf[t] = x[q + t] - rs.mean[q];
  plan.dots(query_buf, dot_buf);
  const double inv = 1.0 / (static_cast<double>(m) * rs.std[q]);
  for (std::size_t j = 0; j < count; ++j) {
    if (rs.std[j] < kFlatEpsilon) {
      out[j] = 0.0;
      continue;
    }
    out[j] = std::clamp(dot_buf[j] * inv / rs.std[j], -1.0, 1.0);
  }
  out[q] = 1.0;
}

}  // namespace detail

inline DistanceProfile distance_profile(const TimeSeries& ts, std::size_t query_start,
                                        std::size_t m,
                                        ProfileMethod method = ProfileMethod::fast) {
  const std::size_t n = ts.size();
  if (m < 2 || m > n) {
    throw std::invalid_argument("distance_profile: window length must be in [2, n]");
  }
  if (query_start + m > n) {
    throw std::invalid_argument("distance_profile: query start out of range");
  }
  const std::size_t count = n - m + 1;
  DistanceProfile dp;
  dp.query_start = query_start;
  dp.window = m;
  dp.correlations.resize(count);
  std::span<const double> x(ts.values);
  if (method == ProfileMethod::naive) {
    for (std::size_t j = 0; j < count; ++j) {
      dp.correlations[j] = detail::pearson_pair(x, query_start, j, m);
    }
  } else {
    const detail::SlidingDotPlan plan(x, m);
    const auto rs = detail::rolling_mean_std(x, m);
    std::vector<double> qbuf, dbuf;
    detail::fast_row(x, query_start, m, plan, rs, qbuf, dbuf, dp.correlations.data());
  }
  return dp;
}

// Full Pearson correlation matrix between all subsequences of length m.
inline CorrelationMatrix correlation_matrix(const TimeSeries& ts, std::size_t m,
                                            const ProfileOptions& opts = {}) {
  const std::size_t n = ts.size();
  if (m < 2 || m > n) {
    throw std::invalid_argument("correlation_matrix: window length must be in [2, n]");
  }
  const std::size_t count = n - m + 1;
  if (count < 2) {
    throw std::invalid_argument("correlation_matrix: needs at least 2 subsequences");
  }
  const std::uint64_t bytes =
      static_cast<std::uint64_t>(count) * count * sizeof(double);
  if (bytes > opts.mem_cap_bytes) {
    throw resource_error(
        "correlation_matrix: " + std::to_string(count) + "x" + std::to_string(count) +
        " matrix needs " + std::to_string(bytes) + " bytes, above the cap of " +
        std::to_string(opts.mem_cap_bytes) +
        "; raise the cap or reduce the series (stride/downsample)");
  }

  CorrelationMatrix M;
  M.window = m;
  M.n = count;
  M.entries.assign(count * count, 0.0);
  std::span<const double> x(ts.values);

  if (opts.method == ProfileMethod::naive) {
    for (std::size_t i = 0; i < count; ++i) {
      M.entries[i * count + i] = 1.0;
      for (std::size_t j = i + 1; j < count; ++j) {
        const double r = detail::pearson_pair(x, i, j, m);
        M.entries[i * count + j] = r;
        M.entries[j * count + i] = r;
      }
    }
    return M;
  }

  const detail::SlidingDotPlan plan(x, m);
  const auto rs = detail::rolling_mean_std(x, m);
  parallel_for(count, opts.threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> qbuf, dbuf;
    for (std::size_t i = begin; i < end; ++i) {
      detail::fast_row(x, i, m, plan, rs, qbuf, dbuf, M.entries.data() + i * count);
    }
  });
  // Rows are computed independently; average the two triangles so the result
  // is exactly symmetric.
  for (std::size_t i = 0; i < count; ++i) {
    M.entries[i * count + i] = 1.0;
    for (std::size_t j = i + 1; j < count; ++j) {
      const double v = 0.5 * (M.entries[i * count + j] + M.entries[j * count + i]);
      M.entries[i * count + j] = v;
      M.entries[j * count + i] = v;
    }
  }
  return M;
}

}  // namespace t2c
