#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace t2c {

using RngSeed = std::uint64_t;

// Subsequences whose population std falls below this are treated as flat:
// they z-normalize to all zeros and correlate 0 with everything.
constexpr double kFlatEpsilon = 1e-12;

class resource_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct TimeSeries {
  std::vector<double> values;
  std::string name;
  std::optional<double> sample_rate_hz;

  TimeSeries() = default;
  explicit TimeSeries(std::vector<double> v, std::string n = "",
                      std::optional<double> rate_hz = std::nullopt)
      : values(std::move(v)), name(std::move(n)), sample_rate_hz(rate_hz) {
    if (values.empty()) {
      throw std::invalid_argument("TimeSeries: needs at least one value");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!std::isfinite(values[i])) {
        throw std::invalid_argument("TimeSeries: non-finite value at index " +
                                    std::to_string(i));
      }
    }
    if (sample_rate_hz && *sample_rate_hz <= 0.0) {
      throw std::invalid_argument("TimeSeries: sample rate must be positive");
    }
  }

  std::size_t size() const { return values.size(); }
};

struct SubsequenceSpec {
  std::size_t start = 0;
  std::size_t length = 0;
  std::size_t stride = 1;
};

inline std::vector<SubsequenceSpec> extract_subsequences(const TimeSeries& ts,
                                                         std::size_t m,
                                                         std::size_t stride = 1) {
  const std::size_t n = ts.size();
  if (m < 1 || m > n) {
    throw std::invalid_argument("extract_subsequences: window length " +
                                std::to_string(m) + " not in [1, " +
                                std::to_string(n) + "]");
  }
  if (stride < 1) {
    throw std::invalid_argument("extract_subsequences: stride must be >= 1");
  }
  std::vector<SubsequenceSpec> out;
  out.reserve((n - m) / stride + 1);
  for (std::size_t start = 0; start + m <= n; start += stride) {
    out.push_back({start, m, stride});
  }
  return out;
}

namespace detail {

inline double dot(const double* a, const double* b, std::size_t dim) {
  double s = 0.0;
  for (std::size_t t = 0; t < dim; ++t) s += a[t] * b[t];
  return s;
}

inline double sq_dist(const double* a, const double* b, std::size_t dim) {
  double s = 0.0;
  for (std::size_t t = 0; t < dim; ++t) {
    const double d = a[t] - b[t];
    s += d * d;
  }
  return s;
}

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population
};

inline MeanStd mean_std(std::span<const double> x) {
  long double s = 0.0L;
  for (double v : x) s += v;
  const double mean = static_cast<double>(s / static_cast<long double>(x.size()));
  long double s2 = 0.0L;
  for (double v : x) {
    const long double d = v - mean;
    s2 += d * d;
  }
  const double var = static_cast<double>(s2 / static_cast<long double>(x.size()));
  return {mean, std::sqrt(var < 0.0 ? 0.0 : var)};
}

}  // namespace detail

// Z-normalization with population standard deviation. Flat inputs
// (std < kFlatEpsilon) map to all zeros.
inline std::vector<double> znorm(std::span<const double> x) {
  if (x.size() < 2) {
    throw std::invalid_argument("znorm: need at least 2 values");
  }
  const auto ms = detail::mean_std(x);
  std::vector<double> out(x.size(), 0.0);
  if (ms.std < kFlatEpsilon) return out;
  const double inv = 1.0 / ms.std;
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - ms.mean) * inv;
  return out;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Child seed for sub-task `index`; stable no matter how work is scheduled.
inline RngSeed derive_seed(RngSeed seed, std::uint64_t index) {
  return splitmix64(seed ^ (index * 0xd1342543de82ef95ULL + 0x632be59bd9b4e019ULL));
}

// Deterministic RNG used by every stochastic code path. The raw engine is
// std::mt19937_64 (bit-stable across platforms); the distribution transforms
// are hand-rolled because the standard library ones are not.
class Rng {
public:
  explicit Rng(RngSeed seed) : gen_(seed) {}

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // standard normal via Box-Muller
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // uniform integer in [0, n)
  std::uint64_t below(std::uint64_t n) { return gen_() % n; }

private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace t2c
