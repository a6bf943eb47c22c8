#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "t2c/core.hpp"

namespace t2c {

// Floor added inside the log of moving_dist; log(0) would otherwise occur
// whenever a moving average touches its own mean.
constexpr double kLogEpsilon = 1e-12;

// Minimum valley prominence, as a fraction of the moving-dist curve's span.
// The raw sign-change rule fires on hundreds of sampling micro-dips even for
// a pure sinusoid; true period valleys are orders of magnitude deeper.
constexpr double kMinimaProminence = 0.10;

struct MovingDistCurve {
  std::vector<std::size_t> w_values;
  std::vector<double> scores;
  std::vector<std::size_t> local_minima;  // indices into w_values, increasing
};

struct WindowEstimate {
  double window = 0.0;
  double confidence = 0.0;  // 1 - std(res)/mean(res), at most 1
  std::vector<double> residuals;
  MovingDistCurve curve;
};

class no_periodicity_error : public std::runtime_error {
public:
  no_periodicity_error(const std::string& what, MovingDistCurve partial)
      : std::runtime_error(what), curve(std::move(partial)) {}
  MovingDistCurve curve;
};

// Moving average via cumulative sum; length n - w + 1.
inline std::vector<double> moving_average(std::span<const double> values,
                                          std::size_t w) {
  const std::size_t n = values.size();
  if (w < 1 || w > n) {
    throw std::invalid_argument("moving_average: window must be in [1, n]");
  }
  std::vector<long double> cum(n + 1, 0.0L);
  for (std::size_t t = 0; t < n; ++t) cum[t + 1] = cum[t] + values[t];
  std::vector<double> out(n - w + 1);
  const long double inv = 1.0L / static_cast<long double>(w);
  for (std::size_t t = 0; t + w <= n; ++t) {
    out[t] = static_cast<double>((cum[t + w] - cum[t]) * inv);
  }
  return out;
}

inline std::vector<double> moving_average(const TimeSeries& ts, std::size_t w) {
  return moving_average(std::span<const double>(ts.values), w);
}

// Sum over t of log(|MA[t] - mean(MA)| + eps): small when w matches the
// series' natural period, because the moving average flattens out.
inline double moving_dist(std::span<const double> values, std::size_t w) {
  const std::size_t n = values.size();
  if (w < 1 || 2 * w > n) {
    throw std::invalid_argument("moving_dist: window must be in [1, n/2]");
  }
  const auto ma = moving_average(values, w);
  long double s = 0.0L;
  for (double v : ma) s += v;
  const double mean = static_cast<double>(s / static_cast<long double>(ma.size()));
  long double acc = 0.0L;
  for (double v : ma) acc += std::log(std::abs(v - mean) + kLogEpsilon);
  return static_cast<double>(acc);
}

inline double moving_dist(const TimeSeries& ts, std::size_t w) {
  return moving_dist(std::span<const double>(ts.values), w);
}

namespace detail {

// Interior local minima by sign change of first differences, matching
// diff(sign(diff(scores))) > 0, offset by one.
inline std::vector<std::size_t> local_minima(const std::vector<double>& scores) {
  std::vector<std::size_t> out;
  if (scores.size() < 3) return out;
  auto sgn = [](double d) { return d > 0.0 ? 1 : (d < 0.0 ? -1 : 0); };
  for (std::size_t k = 0; k + 2 < scores.size(); ++k) {
    const int s0 = sgn(scores[k + 1] - scores[k]);
    const int s1 = sgn(scores[k + 2] - scores[k + 1]);
    if (s1 - s0 > 0) out.push_back(k + 1);
  }
  return out;
}

// Sign-change minima that also clear the prominence bar: on each side the
// curve must rise at least alpha*span above the valley before dipping below
// it again.
inline std::vector<std::size_t> prominent_minima(const std::vector<double>& scores,
                                                 double alpha) {
  const auto cand = local_minima(scores);
  if (cand.empty()) return cand;
  double lo = scores[0], hi = scores[0];
  for (double v : scores) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double span = hi - lo;
  std::vector<std::size_t> out;
  for (std::size_t i : cand) {
    const double v = scores[i];
    double left = -std::numeric_limits<double>::infinity();
    for (std::size_t j = i; j-- > 0;) {
      if (scores[j] < v) break;
      left = std::max(left, scores[j]);
    }
    double right = -std::numeric_limits<double>::infinity();
    for (std::size_t j = i + 1; j < scores.size(); ++j) {
      if (scores[j] < v) break;
      right = std::max(right, scores[j]);
    }
    if (std::min(left, right) - v >= alpha * span) out.push_back(i);
  }
  return out;
}

struct ResSummary {
  double window = 0.0;
  double confidence = 0.0;
  std::vector<double> residuals;
};

// res_i = w of the i-th minimum divided by (i + 1); the minima of a periodic
// series sit near 1x, 2x, 3x... the base period.
inline ResSummary estimate_from_minima(const std::vector<std::size_t>& w_values,
                                       const std::vector<std::size_t>& minima) {
  ResSummary r;
  r.residuals.reserve(minima.size());
  for (std::size_t i = 0; i < minima.size(); ++i) {
    r.residuals.push_back(static_cast<double>(w_values[minima[i]]) /
                          static_cast<double>(i + 1));
  }
  long double s = 0.0L;
  for (double v : r.residuals) s += v;
  const double mean = static_cast<double>(s / static_cast<long double>(r.residuals.size()));
  long double v2 = 0.0L;
  for (double v : r.residuals) {
    const long double d = v - mean;
    v2 += d * d;
  }
  const double sd =
      std::sqrt(static_cast<double>(v2) / static_cast<double>(r.residuals.size()));
  r.window = mean;
  r.confidence = 1.0 - sd / mean;
  return r;
}

}  // namespace detail

// Sweeps w in [s, e], extends e (doubling, capped at n/2) until at least
// three interior local minima of the moving-dist curve exist, then averages
// the harmonic-corrected minima positions.
inline WindowEstimate multi_window_finder(const TimeSeries& ts, std::size_t s = 10,
                                          std::size_t e_init = 0) {
  const std::size_t n = ts.size();
  if (s < 2) throw std::invalid_argument("multi_window_finder: s must be >= 2");
  if (n < 3 * s) {
    throw std::invalid_argument("multi_window_finder: series shorter than 3*s");
  }
  const std::size_t e_cap = n / 2;
  std::size_t e = e_init == 0 ? std::min<std::size_t>(1000, e_cap) : std::min(e_init, e_cap);
  if (e < s) e = s;

  MovingDistCurve curve;
  std::span<const double> x(ts.values);
  for (;;) {
    for (std::size_t w = curve.w_values.empty() ? s : curve.w_values.back() + 1;
         w <= e; ++w) {
      curve.w_values.push_back(w);
      curve.scores.push_back(moving_dist(x, w));
    }
    curve.local_minima = detail::prominent_minima(curve.scores, kMinimaProminence);
    if (curve.local_minima.size() >= 3) break;
    if (e >= e_cap) {
      throw no_periodicity_error(
          "multi_window_finder: fewer than 3 local minima up to w = n/2 = " +
              std::to_string(e_cap) + "; series shows no usable periodicity",
          std::move(curve));
    }
    e = std::min(e * 2, e_cap);
  }

  const auto summary = detail::estimate_from_minima(curve.w_values, curve.local_minima);
  WindowEstimate est;
  est.window = summary.window;
  est.confidence = summary.confidence;
  est.residuals = summary.residuals;
  est.curve = std::move(curve);
  return est;
}

struct BatchEstimate {
  std::size_t begin = 0;
  std::size_t end = 0;  // exclusive
  std::optional<WindowEstimate> estimate;
  std::string note;  // why the estimate is missing, when it is
};

struct WindowMetaSeries {
  std::size_t batch_length = 0;
  std::vector<BatchEstimate> batches;
  std::vector<double> per_point_window;  // step function; 0 where no estimate
};

// Runs the finder on non-overlapping batches. A trailing remainder shorter
// than half a batch is merged into the previous batch.
inline WindowMetaSeries variable_window(const TimeSeries& ts,
                                        std::size_t batch_length = 5000,
                                        std::size_t s = 10) {
  const std::size_t n = ts.size();
  if (batch_length < 30 * s) {
    throw std::invalid_argument("variable_window: batch length must be >= 30*s");
  }
  WindowMetaSeries meta;
  meta.batch_length = batch_length;
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  if (n <= batch_length) {
    spans.emplace_back(0, n);
  } else {
    std::size_t begin = 0;
    while (begin + batch_length <= n) {
      spans.emplace_back(begin, begin + batch_length);
      begin += batch_length;
    }
    const std::size_t rem = n - begin;
    if (rem > 0) {
      if (rem >= batch_length / 2) {
        spans.emplace_back(begin, n);
      } else {
        spans.back().second = n;
      }
    }
  }
  meta.per_point_window.assign(n, 0.0);
  for (const auto& [b, e] : spans) {
    BatchEstimate be;
    be.begin = b;
    be.end = e;
    try {
      TimeSeries chunk(std::vector<double>(ts.values.begin() + static_cast<std::ptrdiff_t>(b),
                                           ts.values.begin() + static_cast<std::ptrdiff_t>(e)));
      be.estimate = multi_window_finder(chunk, s);
      std::fill(meta.per_point_window.begin() + static_cast<std::ptrdiff_t>(b),
                meta.per_point_window.begin() + static_cast<std::ptrdiff_t>(e),
                be.estimate->window);
    } catch (const no_periodicity_error& ex) {
      be.note = ex.what();
    } catch (const std::invalid_argument& ex) {
      be.note = ex.what();
    }
    meta.batches.push_back(std::move(be));
  }
  return meta;
}

// Fraction of estimates within 50% relative error of their ground truth.
inline double window_success_rate(
    const std::vector<std::pair<double, double>>& gt_est) {
  if (gt_est.empty()) {
    throw std::invalid_argument("window_success_rate: empty input");
  }
  std::size_t ok = 0;
  for (const auto& [gt, est] : gt_est) {
    if (gt <= 0.0) {
      throw std::invalid_argument("window_success_rate: ground truth must be positive");
    }
    if (std::abs(gt - est) / gt <= 0.5) ++ok;
  }
  return static_cast<double>(ok) / static_cast<double>(gt_est.size());
}

}  // namespace t2c
