#pragma once

#include <span>
#include <string>
#include <vector>

#include "frame_io.hpp"
#include "partition.hpp"

namespace mrenc {

// Quality values are +infinity for lossless pairs.

double psnr(const Plane& ref, const Plane& test);
double psnr(std::span<const Plane> ref, std::span<const Plane> test);

/// Activity-weighted PSNR surrogate ("xpsnr_s"): 16x16 blocks weighted by
/// clamp(sqrt(mean_activity / max(block_activity, 1)), 0.25, 4).
double xpsnr_simplified(const Plane& ref, const Plane& test);
double xpsnr_simplified(std::span<const Plane> ref, std::span<const Plane> test);

/// Mean |4-neighbour Laplacian| over the interior of each 16x16 block, raster order.
std::vector<double> block_activities(const Plane& ref);

struct RdPoint {
  double bitrate = 0.0;  // kbit/s
  double quality = 0.0;  // dB
  int qp = 0;
};

/// Average bitrate difference of `test` against `anchor` at equal quality, in
/// percent (positive: test needs more bits). PCHIP interpolation of
/// log10(rate) over quality, integrated on the overlapping quality range.
double bd_rate(std::span<const RdPoint> anchor, std::span<const RdPoint> test);

/// Average quality difference in dB at equal log-rate (negative: test is worse).
double bd_quality(std::span<const RdPoint> anchor, std::span<const RdPoint> test);

/// Monotone piecewise-cubic Hermite interpolant (Fritsch-Carlson slopes).
class Pchip {
public:
  /// `x` strictly increasing, at least two points.
  Pchip(std::vector<double> x, std::vector<double> y);
  double operator()(double x) const;
  /// Exact integral of the interpolant over [a, b] within the knot range.
  double integrate(double a, double b) const;

private:
  std::vector<double> x_, y_, m_;
};

struct DepthAgreement {
  double equal = 0.0;
  double deeper = 0.0;     // test deeper than reference
  double shallower = 0.0;  // test shallower than reference
};

DepthAgreement depth_agreement(const DepthMap& ref, const DepthMap& test);
DepthAgreement depth_agreement(std::span<const DepthMap> ref, std::span<const DepthMap> test);

struct ParetoPoint {
  double bd_rate = 0.0;  // percent, lower is better
  double delta_t = 0.0;  // percent, lower is better
  std::string label;
};

bool dominates(const ParetoPoint& p, const ParetoPoint& q);

struct ParetoResult {
  std::vector<ParetoPoint> front;  // sorted by delta_t ascending
  std::vector<ParetoPoint> dominated;
};

ParetoResult pareto_front(std::span<const ParetoPoint> points);

}  // namespace mrenc
