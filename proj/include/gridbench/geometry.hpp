#pragma once

#include <cmath>
#include <cstdint>
#include <string>

namespace gridbench {

// One grid cell is 5 cm x 5 cm. A MoveAhead travels 0.25 m, i.e. exactly
// five cells, so an agent that starts at a cell center stays on cell centers.
inline constexpr double kCellSize = 0.05;
inline constexpr double kMoveStep = 0.25;
inline constexpr int kCellsPerMove = 5;
inline constexpr int kRotateStepDeg = 90;
inline constexpr int kPitchStepDeg = 15;
inline constexpr int kPitchMinDeg = -60;
inline constexpr int kPitchMaxDeg = 60;
inline constexpr int kStepLimit = 1000;
inline constexpr int kFailureLimit = 10;

// Slack for "distance <= radius" comparisons so that integer cell distances
// (multiples of 5 cm) compare the same way on every platform.
inline constexpr double kDistanceEps = 1e-9;

struct Cell {
  int x = 0;
  int y = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
};

// Row-major order: smaller y first, then smaller x. Used for every
// deterministic tie-break in the project.
inline bool row_major_less(const Cell& a, const Cell& b) {
  return a.y != b.y ? a.y < b.y : a.x < b.x;
}

inline double cell_center(int c) { return (c + 0.5) * kCellSize; }

inline Cell cell_of(double x_m, double y_m) {
  return Cell{static_cast<int>(std::floor(x_m / kCellSize)),
              static_cast<int>(std::floor(y_m / kCellSize))};
}

inline double cell_distance_m(const Cell& a, const Cell& b) {
  const double dx = (a.x - b.x) * kCellSize;
  const double dy = (a.y - b.y) * kCellSize;
  return std::sqrt(dx * dx + dy * dy);
}

// Inclusive disk test on cell-center distances, shared by the world collision
// check and the navigation inflation so the two can never disagree.
inline bool within_radius(int dx_cells, int dy_cells, double radius_m) {
  const double d2 =
      (dx_cells * dx_cells + dy_cells * dy_cells) * kCellSize * kCellSize;
  return d2 <= radius_m * radius_m + kDistanceEps;
}

// Headings are the four cardinals; 0 = +x, 90 = +y (counter-clockwise).
inline int normalize_heading(int deg) {
  int h = deg % 360;
  if (h < 0) h += 360;
  return h;
}

inline int heading_right(int deg) { return normalize_heading(deg - 90); }
inline int heading_left(int deg) { return normalize_heading(deg + 90); }

inline Cell heading_delta(int heading_deg) {
  switch (normalize_heading(heading_deg)) {
    case 0: return Cell{1, 0};
    case 90: return Cell{0, 1};
    case 180: return Cell{-1, 0};
    default: return Cell{0, -1};
  }
}

inline double deg_to_rad(double deg) { return deg * M_PI / 180.0; }

// Bearing of (dx,dy) relative to a heading, normalized to (-180, 180].
inline double relative_bearing_deg(double dx, double dy, int heading_deg) {
  double a = std::atan2(dy, dx) * 180.0 / M_PI - heading_deg;
  while (a > 180.0) a -= 360.0;
  while (a <= -180.0) a += 360.0;
  return a;
}

// 64-bit FNV-1a, used for trace and report hashes.
inline uint64_t fnv1a(const void* data, size_t n, uint64_t h = 1469598103934665603ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

inline uint64_t fnv1a(const std::string& s, uint64_t h = 1469598103934665603ULL) {
  return fnv1a(s.data(), s.size(), h);
}

inline std::string hash_hex(uint64_t h) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

// Deterministic RNG. std::mt19937_64 has a standard-defined output sequence;
// the bounded/unit helpers below avoid std::uniform_*_distribution, whose
// mapping differs across standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

  uint64_t next() {
    // splitmix64
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n); n > 0. Rejection sampling keeps it unbiased.
  uint64_t below(uint64_t n) {
    const uint64_t threshold = (0 - n) % n;
    for (;;) {
      const uint64_t r = next();
      if (r >= threshold) return r % n;
    }
  }

  int range(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(below(static_cast<uint64_t>(hi - lo + 1)));
  }

  double unit() { return (next() >> 11) * 0x1.0p-53; }

  bool chance(double p) { return unit() < p; }

 private:
  uint64_t state_;
};

// Stable derivation of sub-seeds so that independent random streams
// (generation, agent fallback, prompt shuffles) never alias.
inline uint64_t derive_seed(uint64_t base, uint64_t stream) {
  uint64_t h = fnv1a(&base, sizeof base);
  h = fnv1a(&stream, sizeof stream, h);
  return h ? h : 1;
}

}  // namespace gridbench
