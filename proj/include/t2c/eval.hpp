#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "t2c/cluster.hpp"
#include "t2c/core.hpp"

namespace t2c {

struct LabelVector {
  std::vector<int> labels;      // each in [0, num_classes)
  int num_classes = 0;

  static LabelVector from_raw(const std::vector<int>& raw) {
    std::map<int, int> remap;
    for (int v : raw) remap.emplace(v, 0);
    int next = 0;
    for (auto& [k, v] : remap) v = next++;
    LabelVector lv;
    lv.labels.reserve(raw.size());
    for (int v : raw) lv.labels.push_back(remap[v]);
    lv.num_classes = next;
    return lv;
  }
};

struct MetricsReport {
  double macro_f1 = 0.0;
  double ari = 0.0;
  double purity = 0.0;
  std::vector<double> per_class_f1;               // one per true class
  std::vector<std::pair<int, int>> matching;      // (true class, cluster)
};

namespace detail {

inline std::vector<std::vector<std::size_t>> contingency(const LabelVector& truth,
                                                         const LabelVector& pred) {
  if (truth.labels.size() != pred.labels.size()) {
    throw std::invalid_argument("metrics: label vectors must have equal length");
  }
  if (truth.labels.empty()) {
    throw std::invalid_argument("metrics: label vectors must be nonempty");
  }
  std::vector<std::vector<std::size_t>> table(
      static_cast<std::size_t>(truth.num_classes),
      std::vector<std::size_t>(static_cast<std::size_t>(pred.num_classes), 0));
  for (std::size_t i = 0; i < truth.labels.size(); ++i) {
    ++table[static_cast<std::size_t>(truth.labels[i])]
           [static_cast<std::size_t>(pred.labels[i])];
  }
  return table;
}

// Best one-to-one class<->cluster matching by total F1; bitmask DP over the
// smaller side, exact for up to 25 clusters.
inline std::pair<double, std::vector<int>> best_assignment(
    const std::vector<std::vector<double>>& score) {
  const std::size_t rows = score.size();
  const std::size_t cols = score[0].size();
  if (cols > 25) {
    throw std::invalid_argument("macro_f1: more than 25 clusters is unsupported");
  }
  const std::size_t masks = std::size_t{1} << cols;
  std::vector<double> dp(masks, -1.0);
  std::vector<std::vector<int>> pick(rows, std::vector<int>(masks, -2));
  dp[0] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<double> nxt(masks, -1.0);
    for (std::size_t mask = 0; mask < masks; ++mask) {
      if (dp[mask] < 0.0) continue;
      if (nxt[mask] < dp[mask]) {  // leave class r unmatched
        nxt[mask] = dp[mask];
        pick[r][mask] = -1;
      }
      for (std::size_t c = 0; c < cols; ++c) {
        if (mask & (std::size_t{1} << c)) continue;
        const std::size_t m2 = mask | (std::size_t{1} << c);
        const double v = dp[mask] + score[r][c];
        if (nxt[m2] < v) {
          nxt[m2] = v;
          pick[r][m2] = static_cast<int>(c);
        }
      }
    }
    dp.swap(nxt);
  }
  std::size_t best_mask = 0;
  for (std::size_t mask = 1; mask < masks; ++mask) {
    if (dp[mask] > dp[best_mask]) best_mask = mask;
  }
  std::vector<int> assign(rows, -1);
  std::size_t mask = best_mask;
  for (std::size_t r = rows; r-- > 0;) {
    const int c = pick[r][mask];
    assign[r] = c >= 0 ? c : -1;
    if (c >= 0) mask &= ~(std::size_t{1} << static_cast<std::size_t>(c));
  }
  return {dp[best_mask], assign};
}

inline double comb2(double x) { return x * (x - 1.0) / 2.0; }

}  // namespace detail

// Macro-F1 under the optimal one-to-one class<->cluster matching; unmatched
// true classes score zero, macro is the mean over true classes.
inline MetricsReport macro_f1(const LabelVector& truth, const LabelVector& pred) {
  const auto table = detail::contingency(truth, pred);
  const std::size_t kt = table.size();
  const std::size_t kp = table[0].size();
  std::vector<std::size_t> row_sum(kt, 0), col_sum(kp, 0);
  for (std::size_t i = 0; i < kt; ++i) {
    for (std::size_t j = 0; j < kp; ++j) {
      row_sum[i] += table[i][j];
      col_sum[j] += table[i][j];
    }
  }
  std::vector<std::vector<double>> f1(kt, std::vector<double>(kp, 0.0));
  for (std::size_t i = 0; i < kt; ++i) {
    for (std::size_t j = 0; j < kp; ++j) {
      if (table[i][j] == 0) continue;
      const double p = static_cast<double>(table[i][j]) / static_cast<double>(col_sum[j]);
      const double r = static_cast<double>(table[i][j]) / static_cast<double>(row_sum[i]);
      f1[i][j] = 2.0 * p * r / (p + r);
    }
  }
  const auto [total, assign] = detail::best_assignment(f1);
  (void)total;
  MetricsReport rep;
  rep.per_class_f1.resize(kt, 0.0);
  for (std::size_t i = 0; i < kt; ++i) {
    if (assign[i] >= 0) {
      rep.per_class_f1[i] = f1[i][static_cast<std::size_t>(assign[i])];
      rep.matching.emplace_back(static_cast<int>(i), assign[i]);
    }
  }
  double s = 0.0;
  for (double v : rep.per_class_f1) s += v;
  rep.macro_f1 = s / static_cast<double>(kt);
  return rep;
}

// Standard adjusted Rand index from the contingency table.
inline double adjusted_rand_index(const LabelVector& truth, const LabelVector& pred) {
  const auto table = detail::contingency(truth, pred);
  if (truth.labels.size() < 2) {
    throw std::invalid_argument("adjusted_rand_index: need at least 2 points");
  }
  double sum_ij = 0.0, sum_a = 0.0, sum_b = 0.0;
  std::vector<double> col(table[0].size(), 0.0);
  for (const auto& row : table) {
    double a = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) {
      sum_ij += detail::comb2(static_cast<double>(row[j]));
      a += static_cast<double>(row[j]);
      col[j] += static_cast<double>(row[j]);
    }
    sum_a += detail::comb2(a);
  }
  for (double b : col) sum_b += detail::comb2(b);
  const double n2 = detail::comb2(static_cast<double>(truth.labels.size()));
  const double expected = sum_a * sum_b / n2;
  const double max_index = 0.5 * (sum_a + sum_b);
  const double denom = max_index - expected;
  if (std::abs(denom) < 1e-12) {
    return std::abs(sum_ij - expected) < 1e-12 ? 1.0 : 0.0;
  }
  return (sum_ij - expected) / denom;
}

inline double purity(const LabelVector& truth, const LabelVector& pred) {
  const auto table = detail::contingency(truth, pred);
  std::size_t hit = 0;
  for (std::size_t j = 0; j < table[0].size(); ++j) {
    std::size_t best = 0;
    for (std::size_t i = 0; i < table.size(); ++i) best = std::max(best, table[i][j]);
    hit += best;
  }
  return static_cast<double>(hit) / static_cast<double>(truth.labels.size());
}

inline MetricsReport evaluate_labels(const LabelVector& truth, const LabelVector& pred) {
  MetricsReport rep = macro_f1(truth, pred);
  rep.ari = adjusted_rand_index(truth, pred);
  rep.purity = purity(truth, pred);
  return rep;
}

// Replaces floor(fraction*n) uniformly chosen points with mean +- magnitude
// standard deviations, random sign.
inline TimeSeries inject_spikes(const TimeSeries& ts, double fraction,
                                double magnitude, RngSeed seed) {
  if (fraction < 0.0 || fraction > 0.2) {
    throw std::invalid_argument("inject_spikes: fraction must be in [0, 0.2]");
  }
  const std::size_t n = ts.size();
  const auto count = static_cast<std::size_t>(fraction * static_cast<double>(n));
  TimeSeries out = ts;
  if (count == 0) return out;
  const auto ms = detail::mean_std(std::span<const double>(ts.values));
  Rng rng(seed);
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = 0; i < count; ++i) {  // partial Fisher-Yates
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(idx[i], idx[j]);
  }
  for (std::size_t i = 0; i < count; ++i) {
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    out.values[idx[i]] = ms.mean + sign * magnitude * ms.std;
  }
  return out;
}

// kmeans++ over z-normalized raw subsequences, stride 1; the strawman that
// phase shift defeats.
inline ClusterResult baseline_euclidean_kmeans(const TimeSeries& ts, std::size_t m,
                                               std::size_t k, KMeansConfig cfg) {
  const std::size_t n = ts.size();
  if (m < 2 || m > n) {
    throw std::invalid_argument("baseline_euclidean_kmeans: window length must be in [2, n]");
  }
  const std::size_t count = n - m + 1;
  std::vector<double> flat(count * m);
  for (std::size_t i = 0; i < count; ++i) {
    const auto z = znorm(std::span<const double>(ts.values.data() + i, m));
    std::copy(z.begin(), z.end(), flat.begin() + i * m);
  }
  cfg.k = k;
  return kmeans_pp(flat.data(), count, m, cfg);
}

namespace detail {

inline double timepoint_macro_f1(const LabelVector& truth, const ClusterResult& res,
                                 std::size_t n, std::size_t m) {
  const auto expanded = expand_labels(res.labels, res.confidence, n, m);
  return macro_f1(truth, LabelVector::from_raw(expanded.labels)).macro_f1;
}

}  // namespace detail

struct RobustnessRow {
  double fraction = 0.0;
  double mean_f1 = 0.0;
  double std_f1 = 0.0;
};

// Spike-injection protocol: `repeats` independent injections per fraction,
// each followed by a full clustering run; reports mean and std of Macro-F1.
inline std::vector<RobustnessRow> robustness_sweep(
    const TimeSeries& ts, const LabelVector& truth, std::size_t m, std::size_t ks,
    std::size_t k, const std::vector<double>& fractions, std::size_t repeats,
    RngSeed seed, const KMeansConfig& base_cfg = {}, const PipelineOptions& opts = {},
    double magnitude = 5.0) {
  if (truth.labels.size() != ts.size()) {
    throw std::invalid_argument("robustness_sweep: truth must have one label per point");
  }
  std::vector<RobustnessRow> rows;
  for (std::size_t fi = 0; fi < fractions.size(); ++fi) {
    std::vector<double> f1s;
    f1s.reserve(repeats);
    for (std::size_t rep = 0; rep < repeats; ++rep) {
      const RngSeed child = derive_seed(seed, fi * repeats + rep);
      const TimeSeries spiked = inject_spikes(ts, fractions[fi], magnitude, child);
      KMeansConfig cfg = base_cfg;
      cfg.k = k;
      cfg.seed = derive_seed(child, 1);
      const auto res = time2cluster(spiked, m, ks, cfg, opts);
      f1s.push_back(detail::timepoint_macro_f1(truth, res, ts.size(), m));
    }
    const auto ms = detail::mean_std(std::span<const double>(f1s));
    rows.push_back({fractions[fi], ms.mean, ms.std});
  }
  return rows;
}

struct SensitivityRow {
  std::size_t m = 0;
  double macro_f1 = 0.0;
};

// Re-runs the pipeline across window lengths; ks per window comes from
// ks_rule (defaults to ks = m).
inline std::vector<SensitivityRow> sensitivity_sweep(
    const TimeSeries& ts, const LabelVector& truth,
    const std::vector<std::size_t>& m_values,
    const std::function<std::size_t(std::size_t)>& ks_rule, std::size_t k,
    RngSeed seed, const KMeansConfig& base_cfg = {}, const PipelineOptions& opts = {}) {
  if (truth.labels.size() != ts.size()) {
    throw std::invalid_argument("sensitivity_sweep: truth must have one label per point");
  }
  std::vector<SensitivityRow> rows;
  for (std::size_t m : m_values) {
    const std::size_t ks = ks_rule ? ks_rule(m) : m;
    KMeansConfig cfg = base_cfg;
    cfg.k = k;
    cfg.seed = seed;
    const auto res = time2cluster(ts, m, ks, cfg, opts);
    rows.push_back({m, detail::timepoint_macro_f1(truth, res, ts.size(), m)});
  }
  return rows;
}

}  // namespace t2c
