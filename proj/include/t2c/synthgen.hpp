#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "t2c/core.hpp"
#include "t2c/eval.hpp"

namespace t2c {

enum class SegmentKind { sinusoid, random_walk, white_noise, constant };

// One homogeneous stretch of a generated series. `amplitude` is the sine
// amplitude, the noise std for white_noise, or the per-step std for
// random_walk. `phase_jitter` is the std of the per-cycle phase drift in
// radians; the drift accumulates, mimicking gait-style variability.
struct SegmentSpec {
  SegmentKind kind = SegmentKind::sinusoid;
  std::size_t length = 0;
  double period = 0.0;
  double amplitude = 1.0;
  double mean = 0.0;
  double phase_jitter = 0.0;
  double noise_std = 0.0;
  int label = 0;
};

inline std::pair<TimeSeries, LabelVector> generate(
    const std::vector<SegmentSpec>& segments, RngSeed seed) {
  if (segments.empty()) {
    throw std::invalid_argument("generate: need at least one segment");
  }
  std::size_t total = 0;
  int max_label = 0;
  for (const auto& seg : segments) {
    if (seg.length < 1) throw std::invalid_argument("generate: segment length must be >= 1");
    if (seg.kind == SegmentKind::sinusoid && seg.period <= 0.0) {
      throw std::invalid_argument("generate: sinusoid segments need a positive period");
    }
    if (seg.label < 0) throw std::invalid_argument("generate: labels must be >= 0");
    max_label = std::max(max_label, seg.label);
    total += seg.length;
  }
  if (total < 2) throw std::invalid_argument("generate: total length must be >= 2");

  Rng rng(seed);
  std::vector<double> values;
  values.reserve(total);
  std::vector<int> labels;
  labels.reserve(total);
  for (const auto& seg : segments) {
    double phase = 0.0;
    double walk = seg.mean;
    const double step = seg.period > 0.0 ? 2.0 * 3.14159265358979323846 / seg.period : 0.0;
    const double drift_std =
        seg.period > 0.0 ? seg.phase_jitter / std::sqrt(seg.period) : 0.0;
    if (seg.kind == SegmentKind::sinusoid) phase = rng.uniform() * 2.0 * 3.14159265358979323846;
    for (std::size_t t = 0; t < seg.length; ++t) {
      double v = 0.0;
      switch (seg.kind) {
        case SegmentKind::sinusoid:
          v = seg.mean + seg.amplitude * std::sin(phase);
          phase += step;
          if (drift_std > 0.0) phase += drift_std * rng.normal();
          break;
        case SegmentKind::random_walk:
          walk += seg.amplitude * rng.normal();
          v = walk;
          break;
        case SegmentKind::white_noise:
          v = seg.mean + seg.amplitude * rng.normal();
          break;
        case SegmentKind::constant:
          v = seg.mean;
          break;
      }
      if (seg.noise_std > 0.0) v += seg.noise_std * rng.normal();
      values.push_back(v);
      labels.push_back(seg.label);
    }
  }
  LabelVector lv;
  lv.labels = std::move(labels);
  lv.num_classes = max_label + 1;
  return {TimeSeries(std::move(values), "synthetic"), std::move(lv)};
}

struct Scenario {
  std::string name;
  TimeSeries series;
  LabelVector truth;
  std::size_t m = 0;
  std::size_t ks = 0;
  std::size_t k = 0;
};

// Canned parameterizations used throughout the test suites:
//   walkrun      two sinusoid gaits, periods 200 and 90 (nominal 100 Hz)
//   walkrunplay  walkrun plus an unstructured "play" tail
//   stairs       two alternating behaviors, twice each
//   tilt         two mean/amplitude regimes with a flat calibration gap
//   noisetail    one structured segment followed by pure noise
inline Scenario scenario(const std::string& name, RngSeed seed) {
  Scenario sc;
  sc.name = name;
  std::vector<SegmentSpec> segs;
  if (name == "walkrun") {
    segs = {
        {SegmentKind::sinusoid, 2500, 200.0, 1.0, 0.0, 0.35, 0.05, 0},
        {SegmentKind::sinusoid, 2500, 90.0, 1.0, 0.0, 0.25, 0.05, 1},
    };
    sc.m = 200;
    sc.ks = 200;
    sc.k = 2;
  } else if (name == "walkrunplay") {
    // "play" is a third quasi-periodic behavior with heavy phase drift
    segs = {
        {SegmentKind::sinusoid, 1400, 200.0, 1.0, 0.0, 0.35, 0.05, 0},
        {SegmentKind::sinusoid, 1400, 90.0, 1.0, 0.0, 0.25, 0.05, 1},
        {SegmentKind::sinusoid, 1400, 55.0, 1.0, 0.0, 0.6, 0.2, 2},
    };
    sc.m = 200;
    sc.ks = 200;
    sc.k = 3;
  } else if (name == "stairs") {
    segs = {
        {SegmentKind::sinusoid, 800, 150.0, 1.0, 0.0, 0.4, 0.05, 0},
        {SegmentKind::sinusoid, 800, 70.0, 1.0, 0.0, 0.3, 0.05, 1},
        {SegmentKind::sinusoid, 800, 150.0, 1.0, 0.0, 0.4, 0.05, 0},
        {SegmentKind::sinusoid, 800, 70.0, 1.0, 0.0, 0.3, 0.05, 1},
    };
    sc.m = 150;
    sc.ks = 150;
    sc.k = 2;
  } else if (name == "tilt") {
    segs = {
        {SegmentKind::sinusoid, 1200, 120.0, 1.0, 0.0, 0.2, 0.03, 0},
        {SegmentKind::constant, 120, 0.0, 0.0, 3.0, 0.0, 0.0, 0},
        {SegmentKind::sinusoid, 1200, 80.0, 1.8, 2.0, 0.2, 0.03, 1},
    };
    sc.m = 120;
    sc.ks = 120;
    sc.k = 2;
  } else if (name == "noisetail") {
    segs = {
        {SegmentKind::sinusoid, 1600, 100.0, 1.0, 0.0, 0.3, 0.05, 0},
        {SegmentKind::white_noise, 800, 0.0, 1.0, 0.0, 0.0, 0.0, 1},
    };
    sc.m = 100;
    sc.ks = 100;
    sc.k = 2;
  } else {
    throw std::invalid_argument("scenario: unknown name '" + name +
                                "' (walkrun|walkrunplay|stairs|tilt|noisetail)");
  }
  auto [series, truth] = generate(segs, seed);
  sc.series = std::move(series);
  sc.truth = std::move(truth);
  return sc;
}

}  // namespace t2c
