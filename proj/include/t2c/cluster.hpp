#pragma once

#include <algorithm>
#include <atomic>
#include <cassert>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "t2c/augment.hpp"
#include "t2c/core.hpp"
#include "t2c/parallel.hpp"
#include "t2c/profile.hpp"

namespace t2c {

struct KMeansConfig {
  std::size_t k = 2;
  std::size_t max_iters = 300;
  double tol = 1e-6;  // relative inertia change
  std::size_t n_restarts = 10;
  RngSeed seed = 0;
  int threads = 1;
  bool record_history = false;  // keep per-iteration inertia of every restart
};

struct ClusterResult {
  std::vector<int> labels;
  std::vector<std::vector<double>> centers;
  double inertia = 0.0;
  std::vector<double> confidence;  // empty until confidence_score runs
  std::size_t iterations_run = 0;
  std::size_t empty_cluster_reseeds = 0;
  std::size_t final_empty_clusters = 0;  // ids with no member in `labels`
  std::vector<std::vector<double>> inertia_history;  // per restart, if recorded
};

struct StageTimings {
  double matrix_s = 0.0;
  double augment_s = 0.0;
  double kmeans_s = 0.0;
  double confidence_s = 0.0;
};

namespace detail {

struct KMeansRun {
  std::vector<int> labels;
  std::vector<double> centers;  // k * dim
  double inertia = 0.0;
  std::size_t iterations = 0;
  std::size_t reseeds = 0;
  std::vector<double> history;
};

// D^2-weighted seeding.
inline void kmeanspp_init(const double* data, std::size_t count, std::size_t dim,
                          std::size_t k, Rng& rng, std::vector<double>& centers,
                          std::vector<double>& d2, std::vector<char>& chosen) {
  centers.assign(k * dim, 0.0);
  d2.assign(count, 0.0);
  chosen.assign(count, 0);
  std::size_t first = static_cast<std::size_t>(rng.below(count));
  chosen[first] = 1;
  std::copy(data + first * dim, data + (first + 1) * dim, centers.begin());
  for (std::size_t i = 0; i < count; ++i) {
    d2[i] = sq_dist(data + i * dim, centers.data(), dim);
  }
  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < count; ++i) total += d2[i];
    std::size_t pick = count;
    if (total > 0.0) {
      const double r = rng.uniform() * total;
      double cum = 0.0;
      for (std::size_t i = 0; i < count; ++i) {
        cum += d2[i];
        if (r < cum) {
          pick = i;
          break;
        }
      }
    }
    if (pick >= count || chosen[pick]) {
      // all remaining mass on duplicates; take the lowest unchosen index
      pick = count;
      for (std::size_t i = 0; i < count; ++i) {
        if (!chosen[i]) {
          pick = i;
          break;
        }
      }
      if (pick >= count) pick = 0;
    }
    chosen[pick] = 1;
    std::copy(data + pick * dim, data + (pick + 1) * dim,
              centers.begin() + c * dim);
    for (std::size_t i = 0; i < count; ++i) {
      d2[i] = std::min(d2[i], sq_dist(data + i * dim, centers.data() + c * dim, dim));
    }
  }
}

inline KMeansRun kmeans_single(const double* data, std::size_t count,
                               std::size_t dim, const KMeansConfig& cfg,
                               RngSeed seed, const std::vector<double>& point_norms) {
  Rng rng(seed);
  KMeansRun run;
  std::vector<double> d2;
  std::vector<char> chosen;
  kmeanspp_init(data, count, dim, cfg.k, rng, run.centers, d2, chosen);

  run.labels.assign(count, -1);  // unassigned, so the first pass counts as a change
  std::vector<double> best_d2(count, 0.0);
  std::vector<double> center_norms(cfg.k, 0.0);
  std::vector<std::size_t> counts(cfg.k, 0);
  double prev_inertia = std::numeric_limits<double>::infinity();

  for (std::size_t iter = 0; iter < cfg.max_iters; ++iter) {
    // assignment: dist^2 = |x|^2 - 2 x.c + |c|^2; ties go to the lowest id
    for (std::size_t c = 0; c < cfg.k; ++c) {
      center_norms[c] = dot(run.centers.data() + c * dim,
                            run.centers.data() + c * dim, dim);
    }
    std::atomic<bool> changed{false};
    parallel_for(count, cfg.threads, [&](std::size_t begin, std::size_t end) {
      bool local_changed = false;
      for (std::size_t i = begin; i < end; ++i) {
        const double* x = data + i * dim;
        int best = 0;
        double best_v = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < cfg.k; ++c) {
          const double v =
              center_norms[c] - 2.0 * dot(x, run.centers.data() + c * dim, dim);
          if (v < best_v) {
            best_v = v;
            best = static_cast<int>(c);
          }
        }
        if (run.labels[i] != best) {
          run.labels[i] = best;
          local_changed = true;
        }
        best_d2[i] = std::max(0.0, point_norms[i] + best_v);
      }
      if (local_changed) changed.store(true, std::memory_order_relaxed);
    });
    double inertia = 0.0;
    for (std::size_t i = 0; i < count; ++i) inertia += best_d2[i];
    run.iterations = iter + 1;
    if (cfg.record_history) run.history.push_back(inertia);
    assert(inertia <= prev_inertia * (1.0 + 1e-9) + 1e-9);

    const bool converged =
        !changed.load(std::memory_order_relaxed) ||
        (std::isfinite(prev_inertia) &&
         std::abs(prev_inertia - inertia) <= cfg.tol * std::max(prev_inertia, 1e-300));
    run.inertia = inertia;
    if (converged) break;
    prev_inertia = inertia;

    // update step
    std::fill(run.centers.begin(), run.centers.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < count; ++i) {
      const int c = run.labels[i];
      ++counts[c];
      double* ctr = run.centers.data() + static_cast<std::size_t>(c) * dim;
      const double* x = data + i * dim;
      for (std::size_t t = 0; t < dim; ++t) ctr[t] += x[t];
    }
    for (std::size_t c = 0; c < cfg.k; ++c) {
      if (counts[c] == 0) continue;
      double* ctr = run.centers.data() + c * dim;
      const double inv = 1.0 / static_cast<double>(counts[c]);
      for (std::size_t t = 0; t < dim; ++t) ctr[t] *= inv;
    }
    // empty-cluster repair: reseed at the point farthest from its own center
    for (std::size_t c = 0; c < cfg.k; ++c) {
      if (counts[c] != 0) continue;
      std::size_t far = 0;
      double far_v = -1.0;
      for (std::size_t i = 0; i < count; ++i) {
        if (best_d2[i] > far_v) {
          far_v = best_d2[i];
          far = i;
        }
      }
      std::copy(data + far * dim, data + (far + 1) * dim,
                run.centers.begin() + c * dim);
      best_d2[far] = 0.0;  // keep a second empty center from picking the same point
      ++run.reseeds;
    }
  }
  return run;
}

}  // namespace detail

// kmeans++ seeding plus Lloyd iterations, best of n_restarts by inertia.
// `data` is row-major count x dim. Deterministic given cfg.seed, for any
// thread count.
inline ClusterResult kmeans_pp(const double* data, std::size_t count,
                               std::size_t dim, const KMeansConfig& cfg) {
  if (count == 0) throw std::invalid_argument("kmeans_pp: empty input");
  if (cfg.k < 1 || cfg.k > count) {
    throw std::invalid_argument("kmeans_pp: k must be in [1, point count]");
  }
  std::vector<double> point_norms(count);
  for (std::size_t i = 0; i < count; ++i) {
    point_norms[i] = detail::dot(data + i * dim, data + i * dim, dim);
  }
  detail::KMeansRun best;
  std::size_t best_r = 0;
  ClusterResult out;
  for (std::size_t r = 0; r < std::max<std::size_t>(1, cfg.n_restarts); ++r) {
    auto run = detail::kmeans_single(data, count, dim, cfg,
                                     derive_seed(cfg.seed, r), point_norms);
    if (cfg.record_history) out.inertia_history.push_back(run.history);
    if (r == 0 || run.inertia < best.inertia) {
      best = std::move(run);
      best_r = r;
    }
  }
  (void)best_r;
  out.labels = std::move(best.labels);
  out.inertia = best.inertia;
  out.iterations_run = best.iterations;
  out.empty_cluster_reseeds = best.reseeds;
  std::vector<char> seen(cfg.k, 0);
  for (int l : out.labels) seen[static_cast<std::size_t>(l)] = 1;
  for (char s : seen) out.final_empty_clusters += s == 0;
  out.centers.resize(cfg.k);
  for (std::size_t c = 0; c < cfg.k; ++c) {
    out.centers[c].assign(best.centers.begin() + c * dim,
                          best.centers.begin() + (c + 1) * dim);
  }
  return out;
}

inline ClusterResult kmeans_pp(const std::vector<std::vector<double>>& points,
                               const KMeansConfig& cfg) {
  if (points.empty()) throw std::invalid_argument("kmeans_pp: empty input");
  const std::size_t dim = points[0].size();
  for (const auto& p : points) {
    if (p.size() != dim) {
      throw std::invalid_argument("kmeans_pp: points must share one dimension");
    }
  }
  std::vector<double> flat;
  flat.reserve(points.size() * dim);
  for (const auto& p : points) flat.insert(flat.end(), p.begin(), p.end());
  return kmeans_pp(flat.data(), points.size(), dim, cfg);
}

// conf[i]: mean over the +-radius neighborhood of i (excluding i, clipped to
// range) of max(0, A[i][j]) for neighbors sharing i's label.
inline std::vector<double> confidence_score(const AugmentedCorrelationMatrix& A,
                                            const std::vector<int>& labels,
                                            std::size_t radius) {
  const std::size_t N = A.size();
  if (labels.size() != N) {
    throw std::invalid_argument("confidence_score: labels length must equal matrix size");
  }
  if (radius < 1) throw std::invalid_argument("confidence_score: radius must be >= 1");
  std::vector<double> conf(N, 0.0);
  for (std::size_t i = 0; i < N; ++i) {
    const std::size_t lo = i >= radius ? i - radius : 0;
    const std::size_t hi = std::min(N - 1, i + radius);
    const std::size_t nbrs = hi - lo;  // excludes i itself
    if (nbrs == 0) {
      conf[i] = 1.0;  // single-subsequence series
      continue;
    }
    double s = 0.0;
    const double* row = A.row(i);
    for (std::size_t j = lo; j <= hi; ++j) {
      if (j == i || labels[j] != labels[i]) continue;
      s += std::max(0.0, row[j]);
    }
    conf[i] = std::min(1.0, s / static_cast<double>(nbrs));
  }
  return conf;
}

struct ExpandedLabels {
  std::vector<int> labels;
  std::vector<double> confidence;
};

// Per-subsequence labels to per-timepoint labels: each timepoint takes the
// label with the largest summed confidence among covering subsequences (ties
// to the lower label id). An empty confidence vector counts every
// subsequence at weight one.
inline ExpandedLabels expand_labels(const std::vector<int>& labels,
                                    const std::vector<double>& confidence,
                                    std::size_t n, std::size_t m) {
  const std::size_t N = labels.size();
  if (m < 1 || N != n - m + 1) {
    throw std::invalid_argument("expand_labels: labels length must equal n - m + 1");
  }
  if (!confidence.empty() && confidence.size() != N) {
    throw std::invalid_argument("expand_labels: confidence length mismatch");
  }
  int max_label = 0;
  for (int l : labels) max_label = std::max(max_label, l);
  ExpandedLabels out;
  out.labels.assign(n, 0);
  out.confidence.assign(n, 0.0);
  std::vector<double> weight(static_cast<std::size_t>(max_label) + 1);
  std::vector<std::size_t> hits(static_cast<std::size_t>(max_label) + 1);
  for (std::size_t t = 0; t < n; ++t) {
    std::fill(weight.begin(), weight.end(), 0.0);
    std::fill(hits.begin(), hits.end(), 0);
    const std::size_t j_lo = t + 1 >= m ? t + 1 - m : 0;
    const std::size_t j_hi = std::min(t, N - 1);
    for (std::size_t j = j_lo; j <= j_hi; ++j) {
      const auto l = static_cast<std::size_t>(labels[j]);
      weight[l] += confidence.empty() ? 1.0 : confidence[j];
      ++hits[l];
    }
    std::size_t win = 0;
    for (std::size_t l = 1; l < weight.size(); ++l) {
      if (weight[l] > weight[win]) win = l;
    }
    out.labels[t] = static_cast<int>(win);
    // mean confidence of covering subsequences carrying the winning label
    if (hits[win] > 0) {
      double s = 0.0;
      for (std::size_t j = j_lo; j <= j_hi; ++j) {
        if (static_cast<std::size_t>(labels[j]) == win) {
          s += confidence.empty() ? 1.0 : confidence[j];
        }
      }
      out.confidence[t] = s / static_cast<double>(hits[win]);
    }
  }
  return out;
}

struct PipelineOptions {
  ProfileOptions profile;
  // 0 -> 3*ks. Stride-1 pooling makes A[i][j] exactly 1 whenever |i-j| < ks
  // (the pooled block touches the diagonal), so the neighborhood must reach
  // past that band to carry any signal.
  std::size_t confidence_radius = 0;
};

struct PipelineResult {
  ClusterResult clusters;
  AugmentedCorrelationMatrix augmented;
  StageTimings timings;
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline PipelineResult cluster_augmented(AugmentedCorrelationMatrix A,
                                        const KMeansConfig& cfg,
                                        std::size_t confidence_radius,
                                        StageTimings timings) {
  PipelineResult out;
  auto t0 = std::chrono::steady_clock::now();
  out.clusters = kmeans_pp(A.entries.data(), A.size(), A.size(), cfg);
  timings.kmeans_s = seconds_since(t0);
  t0 = std::chrono::steady_clock::now();
  out.clusters.confidence = confidence_score(A, out.clusters.labels,
                                             confidence_radius ? confidence_radius
                                                               : 3 * A.kernel);
  timings.confidence_s = seconds_since(t0);
  out.timings = timings;
  out.augmented = std::move(A);
  return out;
}

}  // namespace detail

// The full pipeline: correlation matrix -> ks x ks max pooling -> kmeans++
// over the pooled rows -> per-index confidence.
inline PipelineResult time2cluster_full(const TimeSeries& ts, std::size_t m,
                                        std::size_t ks, const KMeansConfig& cfg,
                                        const PipelineOptions& opts = {}) {
  StageTimings timings;
  auto t0 = std::chrono::steady_clock::now();
  CorrelationMatrix M = correlation_matrix(ts, m, opts.profile);
  timings.matrix_s = detail::seconds_since(t0);
  t0 = std::chrono::steady_clock::now();
  AugmentedCorrelationMatrix A = augment_matrix(M, ks, opts.profile.threads);
  timings.augment_s = detail::seconds_since(t0);
  M.entries.clear();
  M.entries.shrink_to_fit();
  return detail::cluster_augmented(std::move(A), cfg, opts.confidence_radius,
                                   timings);
}

inline ClusterResult time2cluster(const TimeSeries& ts, std::size_t m,
                                  std::size_t ks, const KMeansConfig& cfg,
                                  const PipelineOptions& opts = {}) {
  return time2cluster_full(ts, m, ks, cfg, opts).clusters;
}

struct ElbowCurve {
  std::vector<std::size_t> ks_tested;
  std::vector<double> inertias;
  std::vector<std::string> diagnostics;  // non-monotonic steps, if any
};

// One kmeans run per K over a single shared augmented matrix.
inline ElbowCurve elbow_sweep(const TimeSeries& ts, std::size_t m, std::size_t ks,
                              const std::vector<std::size_t>& k_range,
                              const KMeansConfig& cfg,
                              const PipelineOptions& opts = {}) {
  const CorrelationMatrix M = correlation_matrix(ts, m, opts.profile);
  const AugmentedCorrelationMatrix A = augment_matrix(M, ks, opts.profile.threads);
  ElbowCurve curve;
  for (std::size_t k : k_range) {
    if (k < 1 || k > A.size()) {
      throw std::invalid_argument("elbow_sweep: K must be in [1, N]");
    }
    KMeansConfig kc = cfg;
    kc.k = k;
    const auto r = kmeans_pp(A.entries.data(), A.size(), A.size(), kc);
    if (!curve.inertias.empty() && r.inertia > curve.inertias.back() * (1.0 + 1e-9)) {
      curve.diagnostics.push_back("inertia increased from K=" +
                                  std::to_string(curve.ks_tested.back()) + " to K=" +
                                  std::to_string(k) + " (restart noise)");
    }
    curve.ks_tested.push_back(k);
    curve.inertias.push_back(r.inertia);
  }
  return curve;
}

}  // namespace t2c
