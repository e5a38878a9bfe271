#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "frame_io.hpp"
#include "partition.hpp"

namespace mrenc {

struct QpParams {
  int qp = 32;
  double qstep = 0.0;
  double lambda = 0.0;

  /// qstep = 2^((qp-4)/6), lambda = 0.57 * 2^((qp-12)/3). qp must lie in [0, 51].
  static QpParams from_qp(int qp);
};

enum class IntraMode : std::uint8_t { DC = 0, Horizontal = 1, Vertical = 2 };

inline constexpr IntraMode kIntraModes[] = {IntraMode::DC, IntraMode::Horizontal, IntraMode::Vertical};
inline constexpr int kModeBits = 2;
inline constexpr double kDeadzone = 1.0 / 6.0;

struct RdCost {
  double j = 0.0;
  std::int64_t d = 0;  // SSE
  std::int64_t r = 0;  // bits

  static RdCost of(std::int64_t d, std::int64_t r, double lambda) {
    return {static_cast<double>(d) + lambda * static_cast<double>(r), d, r};
  }
};

struct LeafCode {
  IntraMode intra_mode = IntraMode::DC;
  std::int64_t coeff_bits = 0;
  std::int64_t mode_bits = kModeBits;
  std::int64_t distortion = 0;
  std::vector<std::uint8_t> reconstruction;  // w*h, row-major

  std::int64_t bits() const { return coeff_bits + mode_bits; }
  RdCost cost(double lambda) const { return RdCost::of(distortion, bits(), lambda); }
};

/// Intra prediction from the reconstructed neighbours of `region`. Neighbours
/// outside the frame are unavailable and read as 128.
std::vector<std::uint8_t> predict(const CuRegion& region, IntraMode mode, const Plane& recon);

/// Orthonormal DCT-II basis row-major [k][n] for an N-point transform.
std::span<const double> dct_basis(int n);

void forward_dct(std::span<const double> residual, int w, int h, std::span<double> coeffs);
void inverse_dct(std::span<const double> coeffs, int w, int h, std::span<double> residual);

struct Quantized {
  std::vector<std::int32_t> levels;       // w*h quantized coefficients
  std::vector<double> dequant_residual;   // inverse transform of levels * qstep
};

Quantized transform_quantize(std::span<const int> residual, int w, int h, const QpParams& qp);

/// Significance flag per coefficient plus sign and exp-Golomb-0 magnitude bits for non-zeros.
std::int64_t coeff_bits(std::span<const std::int32_t> levels);

/// Tries DC, Horizontal and Vertical; keeps the lowest d + lambda*r (ties to the
/// lower mode code) and writes its reconstruction into `recon`.
LeafCode code_leaf(const Plane& source, const CuRegion& region, const QpParams& qp, Plane& recon);

}  // namespace mrenc
