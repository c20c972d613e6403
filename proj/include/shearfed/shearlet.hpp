#pragma once

#include <fstream>
#include <sstream>
#include <utility>

#include "shearfed/core.hpp"
#include "shearfed/fft.hpp"

// Keyed digital shearlet systems: band-limited Meyer-type wedge filters on a
// cone-adapted frequency tiling, normalized to a tight frame, with a
// seed-derived unit-modulus phase mask acting as the shared secret.
//
// The frequency plane is parameterized by a radial coordinate (Littlewood-
// Paley levels, scale ratio 4 to match the parabolic a_j = 4^-j lattice) and
// a pseudo-polar direction coordinate u that walks the boundary of the unit
// square (u is the shear variable on each cone). Squared window partitions
// are exact by construction:
//
//   lowpass^2 + sum_j W_j^2 = 1        (telescoping radial levels)
//   sum_k V_{j,k}^2 = 1                (crossfading angular wedges)
//
// so the weight grid is identically 1 up to roundoff before the final
// pointwise normalization.
//
// Symmetric mode doubles each wedge through the origin (real coefficients);
// Truncated mode keeps single-cone wedges spread over the full direction
// circle, which breaks Hermitian symmetry and yields complex coefficients.

namespace shearfed {

enum class BoundaryMode { Symmetric, Truncated };

inline std::string to_string(BoundaryMode m) {
  return m == BoundaryMode::Symmetric ? "symmetric" : "truncated";
}

// ---------------------------------------------------------------------------
// GeneratorSpec: the secret key.
// ---------------------------------------------------------------------------

struct GeneratorSpec {
  uint64_t seed = 0;
  int num_scales = 1;
  std::vector<int> shears_per_scale;
  BoundaryMode boundary_mode = BoundaryMode::Truncated;
  double window_sharpness = 2.0;  // Meyer transition steepness, in [1, 4]
  bool mask_enabled = true;

  void validate() const {
    if (num_scales < 1) throw InvalidParameter("GeneratorSpec: num_scales must be >= 1");
    if (static_cast<int>(shears_per_scale.size()) != num_scales)
      throw InvalidParameter("GeneratorSpec: shears_per_scale length must equal num_scales");
    int max_shears = 0;
    for (int n : shears_per_scale) {
      if (n < 1 || n % 2 == 0)
        throw InvalidParameter("GeneratorSpec: shear counts must be positive odd integers");
      if (n > 255) throw InvalidParameter("GeneratorSpec: shear count exceeds 255");
      max_shears = std::max(max_shears, n);
    }
    // A single full-circle wedge is inherently symmetric; Truncated mode
    // needs at least one scale with real single-cone wedges.
    if (boundary_mode == BoundaryMode::Truncated && max_shears < 3)
      throw InvalidParameter("GeneratorSpec: truncated mode needs a scale with >= 3 shears");
    if (!(window_sharpness > 0.0))
      throw InvalidParameter("GeneratorSpec: window_sharpness must be positive");
  }

  /// Canonical serialization; the fingerprint is FNV-1a 64 over this string.
  std::string canonical_string() const {
    std::ostringstream os;
    os << "SHKEY1|seed=" << seed << "|J=" << num_scales << "|shears=";
    for (size_t i = 0; i < shears_per_scale.size(); ++i) {
      if (i) os << ',';
      os << shears_per_scale[i];
    }
    uint64_t sharp_bits = 0;
    static_assert(sizeof(double) == sizeof(uint64_t));
    std::memcpy(&sharp_bits, &window_sharpness, sizeof(double));
    os << "|mode=" << to_string(boundary_mode)
       << "|mask=" << (mask_enabled ? 1 : 0)
       << "|sharp=" << to_hex16(sharp_bits);
    return os.str();
  }

  uint64_t fingerprint() const { return fnv1a64(canonical_string()); }
};

/// Deterministic key derivation: window_sharpness is drawn from the seed in
/// [1, 4]; the phase mask is derived later, per grid size, from the same seed.
inline GeneratorSpec derive_key(uint64_t seed, int num_scales, std::vector<int> shears_per_scale,
                                BoundaryMode mode, bool mask_enabled) {
  GeneratorSpec spec;
  spec.seed = seed;
  spec.num_scales = num_scales;
  spec.shears_per_scale = std::move(shears_per_scale);
  spec.boundary_mode = mode;
  spec.mask_enabled = mask_enabled;
  const uint64_t draw = splitmix64(seed ^ 0x7368617270ULL);
  spec.window_sharpness = 1.0 + 3.0 * (static_cast<double>(draw >> 11) * 0x1.0p-53);
  spec.validate();
  return spec;
}

// ---------------------------------------------------------------------------
// Window machinery.
// ---------------------------------------------------------------------------

namespace shearletdetail {

/// Meyer auxiliary polynomial: smooth, nu(0)=0, nu(1)=1, nu(1-t) = 1-nu(t).
inline double meyer_aux(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * t * (35.0 - 84.0 * t + 70.0 * t * t - 20.0 * t * t * t);
}

/// Rising radial level: 0 below r/lambda, 1 above r*lambda, Meyer sine
/// crossfade in between (log-radial, so the shape is scale-invariant).
inline double radial_level(double rho, double r, double lambda) {
  if (rho <= r / lambda) return 0.0;
  if (rho >= r * lambda) return 1.0;
  const double t = std::log(rho * lambda / r) / (2.0 * std::log(lambda));
  return std::sin(0.5 * std::numbers::pi * meyer_aux(t));
}

/// Pseudo-polar direction coordinate with period 8: u is the shear (slope)
/// variable on each of the four frequency cones, glued continuously around
/// the direction circle. Point reflection maps u -> u + 4.
inline double direction_coordinate(double nx, double ny) {
  const double ax = std::abs(nx), ay = std::abs(ny);
  if (ax == 0.0 && ay == 0.0) return 0.0;
  if (nx >= ay) return ny / nx;              // right cone, u in [-1, 1]
  if (ny >= ax) return 2.0 - nx / ny;        // top cone, u in [1, 3]
  if (-nx >= ay) return 4.0 + ny / nx;       // left cone, u in [3, 5]
  return 6.0 - nx / ny;                      // bottom cone, u in [5, 7]
}

/// Crossfading angular wedge. Centers sit at period*k/count; each window is 1
/// on its plateau and Meyer-crossfades to the two neighbours, so that
/// sum_k V_k^2 = 1 exactly. half_trans <= spacing/2 keeps overlaps pairwise.
inline double angular_wedge(double u, double center, double period, double spacing,
                            double half_trans) {
  double d = std::fmod(u - center, period);
  if (d < 0.0) d += period;
  d = std::min(d, period - d);  // wrapped distance in [0, period/2]
  const double plateau = 0.5 * spacing - half_trans;
  if (d <= plateau) return 1.0;
  if (d >= 0.5 * spacing + half_trans) return 0.0;
  const double t = (d - plateau) / (2.0 * half_trans);
  return std::cos(0.5 * std::numbers::pi * meyer_aux(t));
}

}  // namespace shearletdetail

// ---------------------------------------------------------------------------
// ShearletSystem: realized filter bank for one grid size.
// ---------------------------------------------------------------------------

struct ShearletSystem {
  int height = 0;
  int width = 0;
  GeneratorSpec spec;
  std::vector<RealGrid> band_filters;            // scale-major, shear ascending
  std::vector<std::pair<int, int>> band_ids;     // (scale j, shear index k)
  RealGrid lowpass;
  RealGrid weight_grid;
  ComplexGrid phase_mask;
  uint64_t fingerprint = 0;

  /// Band count including the lowpass.
  int num_bands() const { return static_cast<int>(band_filters.size()) + 1; }

  /// Flat index of band (scale j, shear k), k in [-(n_j-1)/2, (n_j-1)/2].
  int band_index(int scale, int shear) const {
    if (scale < 0 || scale >= spec.num_scales)
      throw InvalidParameter("band_index: scale out of range");
    const int n = spec.shears_per_scale[static_cast<size_t>(scale)];
    const int half = (n - 1) / 2;
    if (shear < -half || shear > half)
      throw InvalidParameter("band_index: shear out of range");
    int base = 0;
    for (int j = 0; j < scale; ++j) base += spec.shears_per_scale[static_cast<size_t>(j)];
    return base + shear + half;
  }
};

namespace shearletdetail {

inline ComplexGrid make_phase_mask(uint64_t seed, int h, int w, bool enabled) {
  ComplexGrid mask(h, w, cplx{1.0, 0.0});
  if (!enabled) return mask;
  // Hermitian-symmetric unit-modulus field: conj at mirrored bins, 1 at
  // self-conjugate bins. Keeps symmetric-mode coefficients real while still
  // scrambling every non-trivial phase.
  std::mt19937_64 rng(splitmix64(seed ^ 0x6d61736bULL));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int my = (h - y) % h;
      const int mx = (w - x) % w;
      if (my == y && mx == x) continue;           // self-conjugate: stays 1
      if (std::make_pair(y, x) > std::make_pair(my, mx)) continue;  // mirror half
      const double theta =
          2.0 * std::numbers::pi * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
      mask.at(y, x) = {std::cos(theta), std::sin(theta)};
      mask.at(my, mx) = std::conj(mask.at(y, x));
    }
  }
  return mask;
}

}  // namespace shearletdetail

/// Construct the digital shearlet system for an H x W grid. The result is a
/// normalized tight frame: weight_grid == 1 up to roundoff.
inline ShearletSystem build_system(const GeneratorSpec& spec, int height, int width) {
  spec.validate();
  if (height < 8 || width < 8 || height % 2 != 0 || width % 2 != 0)
    throw InvalidParameter("build_system: dimensions must be even and >= 8");

  using namespace shearletdetail;

  ShearletSystem sys;
  sys.height = height;
  sys.width = width;
  sys.spec = spec;
  sys.fingerprint = spec.fingerprint();
  sys.phase_mask = make_phase_mask(spec.seed, height, width, spec.mask_enabled);

  const int J = spec.num_scales;
  const double sharp = spec.window_sharpness;
  const double lambda = std::pow(2.0, 1.0 / (2.0 * sharp));  // radial transition width

  // Radial crossover radii, outermost at half the normalized Nyquist radius,
  // ratio 4 between scales (parabolic scale lattice).
  std::vector<double> crossover(static_cast<size_t>(J));
  for (int j = 0; j < J; ++j)
    crossover[static_cast<size_t>(j)] = 0.5 * std::pow(4.0, j - (J - 1));

  const bool truncated = spec.boundary_mode == BoundaryMode::Truncated;
  const double period = truncated ? 8.0 : 4.0;

  for (int j = 0; j < J; ++j) {
    const int n = spec.shears_per_scale[static_cast<size_t>(j)];
    for (int k = -(n - 1) / 2; k <= (n - 1) / 2; ++k)
      sys.band_ids.emplace_back(j, k);
  }
  sys.band_filters.assign(sys.band_ids.size(), RealGrid(height, width));
  sys.lowpass = RealGrid(height, width);

  std::vector<double> levels(static_cast<size_t>(J) + 1);  // radial levels at one bin
  for (int y = 0; y < height; ++y) {
    const int fy = (y <= height / 2) ? y : y - height;
    const double ny = static_cast<double>(fy) / (height / 2.0);
    for (int x = 0; x < width; ++x) {
      const int fx = (x <= width / 2) ? x : x - width;
      const double nx = static_cast<double>(fx) / (width / 2.0);
      const double rho = std::sqrt(nx * nx + ny * ny);
      const double u = direction_coordinate(nx, ny);

      for (int j = 0; j < J; ++j)
        levels[static_cast<size_t>(j)] = radial_level(rho, crossover[static_cast<size_t>(j)], lambda);
      levels[static_cast<size_t>(J)] = 0.0;

      sys.lowpass.at(y, x) =
          std::sqrt(std::max(0.0, 1.0 - levels[0] * levels[0]));

      int band = 0;
      for (int j = 0; j < J; ++j) {
        const double s0 = levels[static_cast<size_t>(j)];
        const double s1 = levels[static_cast<size_t>(j) + 1];
        const double radial = std::sqrt(std::max(0.0, s0 * s0 - s1 * s1));
        const int n = spec.shears_per_scale[static_cast<size_t>(j)];
        const double spacing = period / n;
        // Truncated wedges must stay inside a half-plane; cap the crossfade.
        double half_trans = 0.5 * spacing / sharp;
        if (truncated && n >= 3)
          half_trans = std::min(half_trans, 0.999 * (0.25 * period - 0.5 * spacing));
        for (int k = -(n - 1) / 2; k <= (n - 1) / 2; ++k, ++band) {
          double v = 1.0;
          if (n > 1) {
            const double center = period * static_cast<double>(k) / n;
            v = angular_wedge(u, center, period, spacing, half_trans);
          }
          sys.band_filters[static_cast<size_t>(band)].at(y, x) = radial * v;
        }
      }
    }
  }

  if (!truncated) {
    // Exact Hermitian symmetry, including the unpaired Nyquist row/column.
    for (RealGrid& f : sys.band_filters) {
      for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
          const int my = (height - y) % height;
          const int mx = (width - x) % width;
          if (std::make_pair(y, x) > std::make_pair(my, mx)) continue;
          const double avg = 0.5 * (f.at(y, x) + f.at(my, mx));
          f.at(y, x) = avg;
          f.at(my, mx) = avg;
        }
      }
    }
  }

  // Pointwise normalization to a tight frame. The partition is exact by
  // construction in truncated mode and within O(eps) after symmetrization,
  // and the raw weight is bounded away from zero, so this never divides by
  // anything small.
  RealGrid weight(height, width);
  for (size_t i = 0; i < weight.v.size(); ++i) {
    double s = sys.lowpass.v[i] * sys.lowpass.v[i];
    for (const RealGrid& f : sys.band_filters) s += f.v[i] * f.v[i];
    weight.v[i] = s;
  }
  for (size_t i = 0; i < weight.v.size(); ++i) {
    const double inv = 1.0 / std::sqrt(weight.v[i]);
    sys.lowpass.v[i] *= inv;
    for (RealGrid& f : sys.band_filters) f.v[i] *= inv;
  }
  for (size_t i = 0; i < weight.v.size(); ++i) {
    double s = sys.lowpass.v[i] * sys.lowpass.v[i];
    for (const RealGrid& f : sys.band_filters) s += f.v[i] * f.v[i];
    sys.weight_grid.v.empty() ? void() : void();
    weight.v[i] = s;
  }
  sys.weight_grid = std::move(weight);
  return sys;
}

/// Numerical frame bounds: (min, max) of the weight grid.
inline std::pair<double, double> frame_bounds(const ShearletSystem& sys) {
  double lo = sys.weight_grid.v.front(), hi = lo;
  for (double w : sys.weight_grid.v) {
    lo = std::min(lo, w);
    hi = std::max(hi, w);
  }
  return {lo, hi};
}

/// Spatial-domain atom for band (scale, shear) translated to (ty, tx):
/// inverse FFT of the band filter times conj(mask) and the translation
/// phase. <x, atom> (conjugate-linear in the atom) equals the shdec
/// coefficient of x at that band and position.
inline ComplexGrid atom(const ShearletSystem& sys, int scale, int shear, int ty, int tx) {
  const int b = sys.band_index(scale, shear);
  const RealGrid& filt = sys.band_filters[static_cast<size_t>(b)];
  ComplexGrid g(sys.height, sys.width);
  for (int y = 0; y < sys.height; ++y) {
    const int fy = (y <= sys.height / 2) ? y : y - sys.height;
    for (int x = 0; x < sys.width; ++x) {
      const int fx = (x <= sys.width / 2) ? x : x - sys.width;
      const double ang = -2.0 * std::numbers::pi *
                         (static_cast<double>(fy) * ty / sys.height +
                          static_cast<double>(fx) * tx / sys.width);
      const cplx phase{std::cos(ang), std::sin(ang)};
      g.at(y, x) = filt.at(y, x) * std::conj(sys.phase_mask.at(y, x)) * phase;
    }
  }
  fft_2d(g, true);
  return g;
}

// ---------------------------------------------------------------------------
// Key file: line-oriented "field=value" UTF-8 text.
// ---------------------------------------------------------------------------

inline std::string key_to_text(const GeneratorSpec& spec) {
  std::ostringstream os;
  os << "seed=" << spec.seed << "\n";
  os << "scales=" << spec.num_scales << "\n";
  os << "shears_per_scale=";
  for (size_t i = 0; i < spec.shears_per_scale.size(); ++i) {
    if (i) os << ',';
    os << spec.shears_per_scale[i];
  }
  os << "\n";
  os << "boundary_mode=" << to_string(spec.boundary_mode) << "\n";
  os << "mask_enabled=" << (spec.mask_enabled ? "true" : "false") << "\n";
  os << "fingerprint=" << to_hex16(spec.fingerprint()) << "\n";
  return os.str();
}

inline GeneratorSpec key_from_text(const std::string& text) {
  uint64_t seed = 0, stated_fp = 0;
  int scales = -1;
  std::vector<int> shears;
  BoundaryMode mode = BoundaryMode::Truncated;
  bool mask_enabled = true;
  bool have_seed = false, have_scales = false, have_shears = false, have_mode = false,
       have_mask = false, have_fp = false;

  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) throw FormatError("key file: expected field=value");
    const std::string field = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (field == "seed") {
      seed = std::stoull(value);
      have_seed = true;
    } else if (field == "scales") {
      scales = std::stoi(value);
      have_scales = true;
    } else if (field == "shears_per_scale") {
      std::istringstream vs(value);
      std::string tok;
      while (std::getline(vs, tok, ',')) shears.push_back(std::stoi(tok));
      have_shears = true;
    } else if (field == "boundary_mode") {
      if (value == "symmetric") mode = BoundaryMode::Symmetric;
      else if (value == "truncated") mode = BoundaryMode::Truncated;
      else throw FormatError("key file: boundary_mode must be symmetric|truncated");
      have_mode = true;
    } else if (field == "mask_enabled") {
      if (value == "true") mask_enabled = true;
      else if (value == "false") mask_enabled = false;
      else throw FormatError("key file: mask_enabled must be true|false");
      have_mask = true;
    } else if (field == "fingerprint") {
      stated_fp = parse_hex16(value);
      have_fp = true;
    } else {
      throw FormatError("key file: unknown field '" + field + "'");
    }
  }
  if (!(have_seed && have_scales && have_shears && have_mode && have_mask && have_fp))
    throw FormatError("key file: missing required field");

  GeneratorSpec spec = derive_key(seed, scales, std::move(shears), mode, mask_enabled);
  if (spec.fingerprint() != stated_fp)
    throw IntegrityError("key file: fingerprint does not match derived key");
  return spec;
}

inline void save_key(const GeneratorSpec& spec, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open key file for writing: " + path);
  out << key_to_text(spec);
}

inline GeneratorSpec load_key(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open key file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return key_from_text(buf.str());
}

}  // namespace shearfed
