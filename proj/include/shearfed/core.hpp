#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace shearfed {

using cplx = std::complex<double>;

// ---------------------------------------------------------------------------
// Error taxonomy. The CLI maps KeyMismatch/IntegrityError to exit code 2,
// everything else recoverable to exit code 1.
// ---------------------------------------------------------------------------

class InvalidParameter : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class KeyMismatch : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class IntegrityError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class FormatError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class LengthError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Grids. Row-major, index (y, x).
// ---------------------------------------------------------------------------

/// Real-valued sampled image. Dataset images keep pixels in [0, 1];
/// intermediate sampled functions (dilated/translated test functions,
/// unclamped reconstructions) may carry any finite values.
struct Image {
  int height = 0;
  int width = 0;
  std::vector<double> pixels;

  Image() = default;
  Image(int h, int w, double fill = 0.0)
      : height(h), width(w), pixels(static_cast<size_t>(h) * w, fill) {}

  double& at(int y, int x) { return pixels[static_cast<size_t>(y) * width + x]; }
  double at(int y, int x) const { return pixels[static_cast<size_t>(y) * width + x]; }
  size_t size() const { return pixels.size(); }
};

struct RealGrid {
  int height = 0;
  int width = 0;
  std::vector<double> v;

  RealGrid() = default;
  RealGrid(int h, int w, double fill = 0.0)
      : height(h), width(w), v(static_cast<size_t>(h) * w, fill) {}

  double& at(int y, int x) { return v[static_cast<size_t>(y) * width + x]; }
  double at(int y, int x) const { return v[static_cast<size_t>(y) * width + x]; }
  size_t size() const { return v.size(); }
};

struct ComplexGrid {
  int height = 0;
  int width = 0;
  std::vector<cplx> v;

  ComplexGrid() = default;
  ComplexGrid(int h, int w, cplx fill = {0.0, 0.0})
      : height(h), width(w), v(static_cast<size_t>(h) * w, fill) {}

  cplx& at(int y, int x) { return v[static_cast<size_t>(y) * width + x]; }
  cplx at(int y, int x) const { return v[static_cast<size_t>(y) * width + x]; }
  size_t size() const { return v.size(); }
};

inline double l2_norm(const Image& a) {
  double s = 0.0;
  for (double p : a.pixels) s += p * p;
  return std::sqrt(s);
}

inline double l2_norm(const ComplexGrid& a) {
  double s = 0.0;
  for (const cplx& z : a.v) s += std::norm(z);
  return std::sqrt(s);
}

/// ||a - b|| / ||b||. Returns ||a|| when b is identically zero.
inline double relative_l2_error(const Image& a, const Image& b) {
  if (a.height != b.height || a.width != b.width)
    throw InvalidParameter("relative_l2_error: dimension mismatch");
  double diff = 0.0, ref = 0.0;
  for (size_t i = 0; i < a.pixels.size(); ++i) {
    const double d = a.pixels[i] - b.pixels[i];
    diff += d * d;
    ref += b.pixels[i] * b.pixels[i];
  }
  if (ref == 0.0) return std::sqrt(diff);
  return std::sqrt(diff / ref);
}

// ---------------------------------------------------------------------------
// 2x2 matrices for the dilation/shearing operators.
// ---------------------------------------------------------------------------

struct Vec2 {
  double x = 0.0;  // first coordinate (horizontal)
  double y = 0.0;  // second coordinate (vertical)
};

struct Matrix2 {
  double a11 = 1.0, a12 = 0.0;
  double a21 = 0.0, a22 = 1.0;

  double det() const { return a11 * a22 - a12 * a21; }

  Matrix2 inverse() const {
    const double d = det();
    if (d == 0.0) throw InvalidParameter("Matrix2::inverse: singular matrix");
    return {a22 / d, -a12 / d, -a21 / d, a11 / d};
  }

  Vec2 apply(Vec2 p) const {
    return {a11 * p.x + a12 * p.y, a21 * p.x + a22 * p.y};
  }

  Matrix2 mul(const Matrix2& o) const {
    return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
            a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
  }
};

// ---------------------------------------------------------------------------
// Deterministic randomness. mt19937_64 has a fully specified sequence, and we
// convert raw draws ourselves so results do not depend on libstdc++'s
// distribution implementations.
// ---------------------------------------------------------------------------

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Rng {
public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t next_u64() { return gen_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  /// Uniform integer in [0, n). Modulo bias is negligible for desk-scale n.
  size_t below(size_t n) { return static_cast<size_t>(next_u64() % n); }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

private:
  std::mt19937_64 gen_;
};

// ---------------------------------------------------------------------------
// FNV-1a 64-bit, used for key fingerprints.
// ---------------------------------------------------------------------------

inline uint64_t fnv1a64(std::string_view bytes) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string to_hex16(uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<size_t>(i)] = digits[v & 0xF];
    v >>= 4;
  }
  return s;
}

inline uint64_t parse_hex16(std::string_view s) {
  if (s.size() != 16) throw FormatError("expected 16 hex digits");
  uint64_t v = 0;
  for (char c : s) {
    v <<= 4;
    if (c >= '0' && c <= '9') v |= static_cast<uint64_t>(c - '0');
    else if (c >= 'a' && c <= 'f') v |= static_cast<uint64_t>(c - 'a' + 10);
    else if (c >= 'A' && c <= 'F') v |= static_cast<uint64_t>(c - 'A' + 10);
    else throw FormatError("invalid hex digit in fingerprint");
  }
  return v;
}

}  // namespace shearfed
