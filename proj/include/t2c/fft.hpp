#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace t2c {

namespace detail {

// Iterative radix-2 Cooley-Tukey with a precomputed root table. Sized once,
// reused for every row of a correlation matrix.
class Fft {
public:
  explicit Fft(std::size_t n) : n_(n) {
    if (n == 0 || (n & (n - 1)) != 0) {
      throw std::invalid_argument("Fft: size must be a power of two");
    }
    bitrev_.resize(n);
    for (std::size_t i = 1, j = 0; i < n; ++i) {
      std::size_t bit = n >> 1;
      for (; j & bit; bit >>= 1) j ^= bit;
      j ^= bit;
      bitrev_[i] = j;
    }
    roots_.resize(n / 2);
    const double step = -2.0 * 3.14159265358979323846 / static_cast<double>(n);
    for (std::size_t k = 0; k < n / 2; ++k) {
      roots_[k] = std::polar(1.0, step * static_cast<double>(k));
    }
  }

  void forward(std::vector<std::complex<double>>& a) const { run(a, false); }
  void inverse(std::vector<std::complex<double>>& a) const { run(a, true); }

  std::size_t size() const { return n_; }

  static std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
  }

private:
  void run(std::vector<std::complex<double>>& a, bool inv) const {
    for (std::size_t i = 0; i < n_; ++i) {
      if (i < bitrev_[i]) std::swap(a[i], a[bitrev_[i]]);
    }
    for (std::size_t len = 2; len <= n_; len <<= 1) {
      const std::size_t stride = n_ / len;
      for (std::size_t i = 0; i < n_; i += len) {
        for (std::size_t j = 0; j < len / 2; ++j) {
          std::complex<double> w = roots_[j * stride];
          if (inv) w = std::conj(w);
          const auto u = a[i + j];
          const auto v = a[i + j + len / 2] * w;
          a[i + j] = u + v;
          a[i + j + len / 2] = u - v;
        }
      }
    }
    if (inv) {
      const double s = 1.0 / static_cast<double>(n_);
      for (auto& x : a) x *= s;
    }
  }

  std::size_t n_;
  std::vector<std::size_t> bitrev_;
  std::vector<std::complex<double>> roots_;
};

// Sliding dot products of an m-point query against every m-point window of a
// fixed series, via one cached FFT of the series and one FFT round trip per
// query (the MASS trick).
class SlidingDotPlan {
public:
  SlidingDotPlan(std::span<const double> series, std::size_t m)
      : n_(series.size()), m_(m), fft_(Fft::next_pow2(series.size() + m)) {
    if (m < 1 || m > n_) {
      throw std::invalid_argument("SlidingDotPlan: bad window length");
    }
    series_fft_.assign(fft_.size(), {0.0, 0.0});
    for (std::size_t i = 0; i < n_; ++i) series_fft_[i] = {series[i], 0.0};
    fft_.forward(series_fft_);
  }

  std::size_t count() const { return n_ - m_ + 1; }

  // dots[j] = sum_t query[t] * series[j + t]
  void dots(std::span<const double> query, std::vector<double>& out) const {
    if (query.size() != m_) {
      throw std::invalid_argument("SlidingDotPlan: query length mismatch");
    }
    std::vector<std::complex<double>> buf(fft_.size(), {0.0, 0.0});
    for (std::size_t t = 0; t < m_; ++t) buf[t] = {query[m_ - 1 - t], 0.0};
    fft_.forward(buf);
    for (std::size_t k = 0; k < buf.size(); ++k) buf[k] *= series_fft_[k];
    fft_.inverse(buf);
    out.resize(count());
    for (std::size_t j = 0; j < count(); ++j) out[j] = buf[j + m_ - 1].real();
  }

private:
  std::size_t n_;
  std::size_t m_;
  Fft fft_;
  std::vector<std::complex<double>> series_fft_;
};

}  // namespace detail

}  // namespace t2c
