#include "synth.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "error.hpp"

namespace mrenc {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

std::uint8_t clip8(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

// Bilinear value noise on a lattice with the given spacing; values in [-1, 1].
class ValueNoise {
public:
  ValueNoise(Xoshiro256& rng, int width, int height, int spacing)
      : spacing_(spacing), cols_(width / spacing + 3), rows_(height / spacing + 3) {
    lattice_.resize(static_cast<std::size_t>(cols_) * rows_);
    for (double& v : lattice_) v = 2.0 * rng.uniform() - 1.0;
  }

  double at(double x, double y) const {
    const double gx = x / spacing_;
    const double gy = y / spacing_;
    const int ix = static_cast<int>(std::floor(gx));
    const int iy = static_cast<int>(std::floor(gy));
    const double fx = gx - ix;
    const double fy = gy - iy;
    auto v = [&](int cx, int cy) {
      cx = ((cx % cols_) + cols_) % cols_;
      cy = ((cy % rows_) + rows_) % rows_;
      return lattice_[static_cast<std::size_t>(cy) * cols_ + cx];
    };
    const double top = v(ix, iy) * (1 - fx) + v(ix + 1, iy) * fx;
    const double bot = v(ix, iy + 1) * (1 - fx) + v(ix + 1, iy + 1) * fx;
    return top * (1 - fy) + bot * fy;
  }

private:
  int spacing_;
  int cols_;
  int rows_;
  std::vector<double> lattice_;
};

struct Shape {
  int kind;  // 0 rectangle, 1 disc
  double cx, cy, rx, ry, level, vx, vy;
};

}  // namespace

Xoshiro256::Xoshiro256(std::uint64_t seed) {
  for (auto& v : s_) v = splitmix64(seed);
}

std::uint64_t Xoshiro256::next() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Xoshiro256::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

int Xoshiro256::range(int lo, int hi) {
  return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
}

std::string_view synth_kind_name(SynthKind k) {
  switch (k) {
    case SynthKind::flat: return "flat";
    case SynthKind::gradient: return "gradient";
    case SynthKind::checker: return "checker";
    case SynthKind::noise: return "noise";
    case SynthKind::mixed: return "mixed";
  }
  return "?";
}

std::optional<SynthKind> parse_synth_kind(std::string_view name) {
  for (const SynthKind k : kAllSynthKinds) {
    if (synth_kind_name(k) == name) return k;
  }
  return std::nullopt;
}

Sequence generate_sequence(SynthKind kind, int width, int height, int frames, std::uint64_t seed) {
  if (frames < 1) fail(Errc::invalid_argument, "frame count must be positive");
  if (width < kMinPlaneDim || height < kMinPlaneDim) {
    fail(Errc::invalid_argument, "synthetic frames must be at least 16x16");
  }
  Xoshiro256 rng(seed ^ (static_cast<std::uint64_t>(kind) << 56));
  Sequence seq;
  seq.frame_rate = 30.0;

  const double base = 64 + rng.range(0, 128);
  const double slope_x = (rng.uniform() - 0.5) * 160.0 / width;
  const double slope_y = (rng.uniform() - 0.5) * 160.0 / height;
  const int cell = 4 << rng.range(0, 2);
  const double contrast = 30 + rng.range(0, 40);
  const ValueNoise fine(rng, width + 64, height + 64, 4);
  const ValueNoise mid(rng, width + 64, height + 64, 12);
  const ValueNoise coarse(rng, width + 64, height + 64, 40);

  std::vector<Shape> shapes;
  for (int i = 0; i < 7; ++i) {
    shapes.push_back({rng.range(0, 1), rng.uniform() * width, rng.uniform() * height, 6 + rng.uniform() * width / 5,
                      6 + rng.uniform() * height / 5, 20.0 + rng.range(0, 215), rng.uniform() * 2 - 1,
                      rng.uniform() * 2 - 1});
  }

  for (int f = 0; f < frames; ++f) {
    Plane p(width, height);
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        double v = 0.0;
        const double gradient = base + slope_x * (x - width / 2.0) + slope_y * (y - height / 2.0);
        switch (kind) {
          case SynthKind::flat: v = base + f; break;
          case SynthKind::gradient: v = gradient + 0.5 * f; break;
          case SynthKind::checker: {
            const int cx = (x + f) / cell;
            const int cy = y / cell;
            v = 128 + (((cx + cy) & 1) ? contrast : -contrast) + 3.0 * fine.at(x, y + 2 * f);
            break;
          }
          case SynthKind::noise:
            v = 128 + 70 * coarse.at(x + f, y) + 45 * mid.at(x + f, y) + 25 * fine.at(x + 2 * f, y);
            break;
          case SynthKind::mixed: {
            v = gradient + 20 * coarse.at(x + f, y);
            for (const auto& s : shapes) {
              const double dx = x - (s.cx + s.vx * f * 2);
              const double dy = y - (s.cy + s.vy * f * 2);
              const bool inside = s.kind == 0 ? (std::abs(dx) < s.rx && std::abs(dy) < s.ry)
                                              : (dx * dx / (s.rx * s.rx) + dy * dy / (s.ry * s.ry) < 1.0);
              if (inside) v = s.level;
            }
            if (x < width / 3 && y > height / 2) v += 40 * mid.at(x + f, y) + 20 * fine.at(x, y + f);
            if (x > 2 * width / 3 && y < height / 2) v += ((((x + f) / 4 + y / 4) & 1) ? 25 : -25);
            break;
          }
        }
        p.at(x, y) = clip8(v);
      }
    }
    seq.frames.push_back(std::move(p));
  }
  return seq;
}

}  // namespace mrenc
