#include "codec_core.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "error.hpp"

namespace mrenc {

QpParams QpParams::from_qp(int qp) {
  if (qp < 0 || qp > 51) fail(Errc::invalid_argument, "qp " + std::to_string(qp) + " outside [0, 51]");
  return {qp, std::pow(2.0, (qp - 4) / 6.0), 0.57 * std::pow(2.0, (qp - 12) / 3.0)};
}

std::vector<std::uint8_t> predict(const CuRegion& r, IntraMode mode, const Plane& recon) {
  const bool has_top = r.y > 0;
  const bool has_left = r.x > 0;
  std::vector<std::uint8_t> pred(static_cast<std::size_t>(r.w) * r.h);

  switch (mode) {
    case IntraMode::DC: {
      int sum = 0;
      int n = 0;
      if (has_top) {
        const std::uint8_t* top = recon.row(r.y - 1) + r.x;
        for (int i = 0; i < r.w; ++i) sum += top[i];
        n += r.w;
      }
      if (has_left) {
        for (int i = 0; i < r.h; ++i) sum += recon.at(r.x - 1, r.y + i);
        n += r.h;
      }
      const auto dc = static_cast<std::uint8_t>(n == 0 ? 128 : (sum + n / 2) / n);
      std::fill(pred.begin(), pred.end(), dc);
      break;
    }
    case IntraMode::Horizontal:
      for (int y = 0; y < r.h; ++y) {
        const std::uint8_t v = has_left ? recon.at(r.x - 1, r.y + y) : 128;
        std::fill_n(pred.begin() + static_cast<std::ptrdiff_t>(y) * r.w, r.w, v);
      }
      break;
    case IntraMode::Vertical:
      for (int y = 0; y < r.h; ++y) {
        auto row = pred.begin() + static_cast<std::ptrdiff_t>(y) * r.w;
        if (has_top) {
          const std::uint8_t* top = recon.row(r.y - 1) + r.x;
          std::copy(top, top + r.w, row);
        } else {
          std::fill_n(row, r.w, 128);
        }
      }
      break;
  }
  return pred;
}

// ---- transform ----

namespace {

constexpr int kMaxDctSize = 128;

struct DctTables {
  std::array<std::vector<double>, kMaxDctSize / 4 + 1> by_size;
  std::array<std::vector<double>, kMaxDctSize / 4 + 1> transposed;

  DctTables() {
    for (int n = 4; n <= kMaxDctSize; n += 4) {
      auto& m = by_size[n / 4];
      auto& t = transposed[n / 4];
      m.resize(static_cast<std::size_t>(n) * n);
      t.resize(m.size());
      for (int k = 0; k < n; ++k) {
        const double a = k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
        for (int i = 0; i < n; ++i) {
          m[k * n + i] = a * std::cos(std::numbers::pi * (2 * i + 1) * k / (2.0 * n));
          t[i * n + k] = m[k * n + i];
        }
      }
    }
  }
};

const DctTables& dct_tables() {
  static const DctTables tables;
  return tables;
}

}  // namespace

std::span<const double> dct_basis(int n) {
  if (n < 4 || n > kMaxDctSize || n % 4 != 0) fail(Errc::invalid_argument, "unsupported transform size " + std::to_string(n));
  return dct_tables().by_size[n / 4];
}

void forward_dct(std::span<const double> res, int w, int h, std::span<double> out) {
  dct_basis(w);
  const auto& cwt = dct_tables().transposed[w / 4];
  const auto ch = dct_basis(h);
  thread_local std::vector<double> tmp;
  tmp.assign(static_cast<std::size_t>(w) * h, 0.0);
  // Loop orders keep the accumulation order fixed (ascending spatial index)
  // while letting the inner loops vectorize.
  for (int y = 0; y < h; ++y) {
    const double* src = res.data() + static_cast<std::size_t>(y) * w;
    double* t = tmp.data() + static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w; ++x) {
      const double s = src[x];
      const double* basis = cwt.data() + static_cast<std::size_t>(x) * w;
      for (int u = 0; u < w; ++u) t[u] += s * basis[u];
    }
  }
  std::fill(out.begin(), out.end(), 0.0);
  for (int v = 0; v < h; ++v) {
    double* dst = out.data() + static_cast<std::size_t>(v) * w;
    const double* basis = ch.data() + static_cast<std::size_t>(v) * h;
    for (int y = 0; y < h; ++y) {
      const double c = basis[y];
      const double* t = tmp.data() + static_cast<std::size_t>(y) * w;
      for (int u = 0; u < w; ++u) dst[u] += c * t[u];
    }
  }
}

void inverse_dct(std::span<const double> coeffs, int w, int h, std::span<double> out) {
  const auto cw = dct_basis(w);
  const auto ch = dct_basis(h);
  thread_local std::vector<double> tmp;
  tmp.assign(static_cast<std::size_t>(w) * h, 0.0);
  for (int v = 0; v < h; ++v) {
    const double* src = coeffs.data() + static_cast<std::size_t>(v) * w;
    if (std::all_of(src, src + w, [](double c) { return c == 0.0; })) continue;
    const double* basis = ch.data() + static_cast<std::size_t>(v) * h;
    for (int y = 0; y < h; ++y) {
      const double c = basis[y];
      double* t = tmp.data() + static_cast<std::size_t>(y) * w;
      for (int u = 0; u < w; ++u) t[u] += c * src[u];
    }
  }
  for (int y = 0; y < h; ++y) {
    const double* t = tmp.data() + static_cast<std::size_t>(y) * w;
    double* dst = out.data() + static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w; ++x) dst[x] = 0.0;
    for (int u = 0; u < w; ++u) {
      const double c = t[u];
      if (c == 0.0) continue;
      const double* basis = cw.data() + static_cast<std::size_t>(u) * w;
      for (int x = 0; x < w; ++x) dst[x] += c * basis[x];
    }
  }
}

namespace {

std::int32_t quantize(double c, double qstep) {
  const double mag = std::floor(std::abs(c) / qstep + 0.5 - kDeadzone);
  const auto q = static_cast<std::int32_t>(mag);
  return c < 0 ? -q : q;
}

// Shared by transform_quantize and code_leaf; returns true if any level is non-zero.
bool quantize_block(std::span<const double> residual, int w, int h, const QpParams& qp,
                    std::span<std::int32_t> levels, std::span<double> dequant_residual) {
  const std::size_t n = static_cast<std::size_t>(w) * h;
  thread_local std::vector<double> coeffs;
  coeffs.resize(n);
  forward_dct(residual, w, h, coeffs);
  bool any = false;
  for (std::size_t i = 0; i < n; ++i) {
    levels[i] = quantize(coeffs[i], qp.qstep);
    coeffs[i] = levels[i] * qp.qstep;
    any |= levels[i] != 0;
  }
  if (any) {
    inverse_dct(coeffs, w, h, dequant_residual);
  } else {
    std::fill(dequant_residual.begin(), dequant_residual.end(), 0.0);
  }
  return any;
}

}  // namespace

Quantized transform_quantize(std::span<const int> residual, int w, int h, const QpParams& qp) {
  const std::size_t n = static_cast<std::size_t>(w) * h;
  if (residual.size() != n) fail(Errc::dimension_mismatch, "residual size does not match block dimensions");
  std::vector<double> res(residual.begin(), residual.end());
  Quantized out{std::vector<std::int32_t>(n), std::vector<double>(n)};
  quantize_block(res, w, h, qp, out.levels, out.dequant_residual);
  return out;
}

std::int64_t coeff_bits(std::span<const std::int32_t> levels) {
  std::int64_t bits = static_cast<std::int64_t>(levels.size());
  for (const std::int32_t c : levels) {
    if (c == 0) continue;
    const auto mag = static_cast<std::uint32_t>(std::abs(c));
    bits += 1 + 2 * (std::bit_width(mag) - 1) + 1;
  }
  return bits;
}

LeafCode code_leaf(const Plane& source, const CuRegion& r, const QpParams& qp, Plane& recon) {
  const std::size_t n = static_cast<std::size_t>(r.w) * r.h;
  thread_local std::vector<double> residual;
  thread_local std::vector<double> dequant;
  thread_local std::vector<std::int32_t> levels;
  residual.resize(n);
  dequant.resize(n);
  levels.resize(n);

  LeafCode best;
  double best_j = 0.0;
  bool have_best = false;
  std::vector<std::uint8_t> candidate(n);

  for (const IntraMode mode : kIntraModes) {
    const auto pred = predict(r, mode, recon);
    for (int y = 0; y < r.h; ++y) {
      const std::uint8_t* src = source.row(r.y + y) + r.x;
      for (int x = 0; x < r.w; ++x) {
        const std::size_t i = static_cast<std::size_t>(y) * r.w + x;
        residual[i] = static_cast<double>(src[x]) - pred[i];
      }
    }
    const bool nonzero = quantize_block(residual, r.w, r.h, qp, levels, dequant);
    const std::int64_t bits = coeff_bits(levels);

    std::int64_t sse = 0;
    for (int y = 0; y < r.h; ++y) {
      const std::uint8_t* src = source.row(r.y + y) + r.x;
      for (int x = 0; x < r.w; ++x) {
        const std::size_t i = static_cast<std::size_t>(y) * r.w + x;
        const long add = nonzero ? std::lround(dequant[i]) : 0L;
        const auto rec = static_cast<std::uint8_t>(std::clamp<long>(pred[i] + add, 0, 255));
        candidate[i] = rec;
        const std::int64_t e = static_cast<std::int64_t>(src[x]) - rec;
        sse += e * e;
      }
    }

    const double j = RdCost::of(sse, bits + kModeBits, qp.lambda).j;
    if (!have_best || j < best_j) {
      have_best = true;
      best_j = j;
      best.intra_mode = mode;
      best.coeff_bits = bits;
      best.mode_bits = kModeBits;
      best.distortion = sse;
      best.reconstruction = candidate;
    }
  }

  for (int y = 0; y < r.h; ++y) {
    std::copy_n(best.reconstruction.begin() + static_cast<std::ptrdiff_t>(y) * r.w, r.w, recon.row(r.y + y) + r.x);
  }
  return best;
}

}  // namespace mrenc
