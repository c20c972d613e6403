#pragma once

#include <bit>
#include <span>
#include <unordered_map>

#include "shearfed/core.hpp"

// In-place complex FFT. Forward is unnormalized, inverse carries the 1/n
// factor, so ifft(fft(x)) == x. Power-of-two lengths run the iterative
// radix-2 kernel; anything else goes through Bluestein's chirp-z resampling
// on a padded power-of-two grid, so transforms exist for every length
// (28x28 IDX images included).

namespace shearfed {
namespace fftdetail {

struct Radix2Plan {
  std::vector<size_t> bitrev;
  std::vector<cplx> twiddle;  // exp(-i*2*pi*k/n), k < n/2
};

inline const Radix2Plan& radix2_plan(size_t n) {
  thread_local std::unordered_map<size_t, Radix2Plan> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  Radix2Plan p;
  p.bitrev.resize(n);
  const int bits = std::countr_zero(n);
  for (size_t i = 0; i < n; ++i) {
    size_t r = 0;
    for (int b = 0; b < bits; ++b) r |= ((i >> b) & 1u) << (bits - 1 - b);
    p.bitrev[i] = r;
  }
  p.twiddle.resize(n / 2);
  for (size_t k = 0; k < n / 2; ++k) {
    const double ang = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    p.twiddle[k] = {std::cos(ang), std::sin(ang)};
  }
  cache.emplace(n, p);
  return cache.at(n);
}

inline void fft_pow2(std::span<cplx> a, bool inverse) {
  const size_t n = a.size();
  const Radix2Plan& plan = radix2_plan(n);
  for (size_t i = 0; i < n; ++i) {
    const size_t j = plan.bitrev[i];
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    const size_t stride = n / len;
    for (size_t base = 0; base < n; base += len) {
      for (size_t k = 0; k < len / 2; ++k) {
        cplx w = plan.twiddle[k * stride];
        if (inverse) w = std::conj(w);
        const cplx u = a[base + k];
        const cplx t = w * a[base + k + len / 2];
        a[base + k] = u + t;
        a[base + k + len / 2] = u - t;
      }
    }
  }
}

struct BluesteinPlan {
  size_t m = 0;                 // padded power-of-two length, >= 2n-1
  std::vector<cplx> chirp;      // exp(-i*pi*k^2/n)
  std::vector<cplx> kernel_ft;  // FFT of the zero-padded conjugate chirp
};

inline const BluesteinPlan& bluestein_plan(size_t n) {
  thread_local std::unordered_map<size_t, BluesteinPlan> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  BluesteinPlan p;
  p.m = std::bit_ceil(2 * n - 1);
  p.chirp.resize(n);
  for (size_t k = 0; k < n; ++k) {
    // k^2 mod 2n keeps the phase argument small and exact.
    const uint64_t q = (static_cast<uint64_t>(k) * k) % (2 * n);
    const double ang = -std::numbers::pi * static_cast<double>(q) / static_cast<double>(n);
    p.chirp[k] = {std::cos(ang), std::sin(ang)};
  }
  std::vector<cplx> kern(p.m, cplx{0.0, 0.0});
  kern[0] = std::conj(p.chirp[0]);
  for (size_t k = 1; k < n; ++k) {
    kern[k] = std::conj(p.chirp[k]);
    kern[p.m - k] = std::conj(p.chirp[k]);
  }
  fft_pow2(kern, false);
  p.kernel_ft = std::move(kern);
  cache.emplace(n, std::move(p));
  return cache.at(n);
}

inline void fft_bluestein(std::span<cplx> a, bool inverse) {
  const size_t n = a.size();
  const BluesteinPlan& plan = bluestein_plan(n);
  std::vector<cplx> buf(plan.m, cplx{0.0, 0.0});
  for (size_t k = 0; k < n; ++k) {
    const cplx c = inverse ? std::conj(plan.chirp[k]) : plan.chirp[k];
    buf[k] = a[k] * c;
  }
  fft_pow2(buf, false);
  if (inverse) {
    for (size_t k = 0; k < plan.m; ++k) buf[k] *= std::conj(plan.kernel_ft[k]);
  } else {
    for (size_t k = 0; k < plan.m; ++k) buf[k] *= plan.kernel_ft[k];
  }
  fft_pow2(buf, true);
  const double inv_m = 1.0 / static_cast<double>(plan.m);
  for (size_t k = 0; k < n; ++k) {
    const cplx c = inverse ? std::conj(plan.chirp[k]) : plan.chirp[k];
    a[k] = buf[k] * inv_m * c;
  }
}

}  // namespace fftdetail

inline void fft_1d(std::span<cplx> a, bool inverse) {
  const size_t n = a.size();
  if (n == 0) throw InvalidParameter("fft_1d: empty input");
  if (n == 1) return;
  if (std::has_single_bit(n)) {
    fftdetail::fft_pow2(a, inverse);
  } else {
    fftdetail::fft_bluestein(a, inverse);
  }
  if (inverse) {
    const double s = 1.0 / static_cast<double>(n);
    for (cplx& z : a) z *= s;
  }
}

inline void fft_2d(ComplexGrid& g, bool inverse) {
  if (g.height <= 0 || g.width <= 0) throw InvalidParameter("fft_2d: empty grid");
  const size_t h = static_cast<size_t>(g.height);
  const size_t w = static_cast<size_t>(g.width);
  for (size_t y = 0; y < h; ++y) {
    fft_1d(std::span<cplx>(g.v.data() + y * w, w), inverse);
  }
  std::vector<cplx> col(h);
  for (size_t x = 0; x < w; ++x) {
    for (size_t y = 0; y < h; ++y) col[y] = g.v[y * w + x];
    fft_1d(col, inverse);
    for (size_t y = 0; y < h; ++y) g.v[y * w + x] = col[y];
  }
}

inline ComplexGrid fft_of_image(const Image& img) {
  ComplexGrid g(img.height, img.width);
  for (size_t i = 0; i < img.pixels.size(); ++i) g.v[i] = {img.pixels[i], 0.0};
  fft_2d(g, false);
  return g;
}

}  // namespace shearfed
