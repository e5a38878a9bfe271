#include "metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "error.hpp"

namespace mrenc {

namespace {

constexpr double kPeak2 = 255.0 * 255.0;

void require_same(const Plane& a, const Plane& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    fail(Errc::dimension_mismatch, "planes differ in size");
  }
}

void require_same(std::span<const Plane> a, std::span<const Plane> b) {
  if (a.size() != b.size() || a.empty()) fail(Errc::dimension_mismatch, "sequences differ in frame count");
  for (std::size_t i = 0; i < a.size(); ++i) require_same(a[i], b[i]);
}

double to_db(double mse) {
  return mse <= 0.0 ? std::numeric_limits<double>::infinity() : 10.0 * std::log10(kPeak2 / mse);
}

double sse(const Plane& a, const Plane& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.samples().size(); ++i) {
    const double e = static_cast<double>(a.samples()[i]) - b.samples()[i];
    acc += e * e;
  }
  return acc;
}

constexpr int kXBlock = 16;

double weighted_mse(const Plane& ref, const Plane& test) {
  const auto act = block_activities(ref);
  double mean_act = 0.0;
  for (double a : act) mean_act += a;
  mean_act /= static_cast<double>(act.size());

  double num = 0.0;
  double den = 0.0;
  std::size_t k = 0;
  for (int by = 0; by < ref.height(); by += kXBlock) {
    for (int bx = 0; bx < ref.width(); bx += kXBlock, ++k) {
      const int bw = std::min(kXBlock, ref.width() - bx);
      const int bh = std::min(kXBlock, ref.height() - by);
      double block_sse = 0.0;
      for (int y = by; y < by + bh; ++y)
        for (int x = bx; x < bx + bw; ++x) {
          const double e = static_cast<double>(ref.at(x, y)) - test.at(x, y);
          block_sse += e * e;
        }
      const double w = std::clamp(std::sqrt(mean_act / std::max(act[k], 1.0)), 0.25, 4.0);
      num += w * block_sse;
      den += w * bw * bh;
    }
  }
  return num / den;
}

}  // namespace

double psnr(const Plane& ref, const Plane& test) {
  require_same(ref, test);
  return to_db(sse(ref, test) / static_cast<double>(ref.samples().size()));
}

double psnr(std::span<const Plane> ref, std::span<const Plane> test) {
  require_same(ref, test);
  double total = 0.0;
  double count = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    total += sse(ref[i], test[i]);
    count += static_cast<double>(ref[i].samples().size());
  }
  return to_db(total / count);
}

std::vector<double> block_activities(const Plane& ref) {
  std::vector<double> out;
  for (int by = 0; by < ref.height(); by += kXBlock) {
    for (int bx = 0; bx < ref.width(); bx += kXBlock) {
      const int bw = std::min(kXBlock, ref.width() - bx);
      const int bh = std::min(kXBlock, ref.height() - by);
      double sum = 0.0;
      int n = 0;
      for (int y = by + 1; y < by + bh - 1; ++y) {
        for (int x = bx + 1; x < bx + bw - 1; ++x) {
          const int lap = 4 * ref.at(x, y) - ref.at(x - 1, y) - ref.at(x + 1, y) - ref.at(x, y - 1) - ref.at(x, y + 1);
          sum += std::abs(lap);
          ++n;
        }
      }
      out.push_back(n > 0 ? sum / n : 0.0);
    }
  }
  return out;
}

double xpsnr_simplified(const Plane& ref, const Plane& test) {
  require_same(ref, test);
  return to_db(weighted_mse(ref, test));
}

double xpsnr_simplified(std::span<const Plane> ref, std::span<const Plane> test) {
  require_same(ref, test);
  double acc = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) acc += weighted_mse(ref[i], test[i]);
  return to_db(acc / static_cast<double>(ref.size()));
}

// ---- PCHIP ----

Pchip::Pchip(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n) fail(Errc::too_few_points, "interpolation needs at least two points");
  std::vector<double> h(n - 1), delta(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x_[i + 1] - x_[i];
    if (!(h[i] > 0.0)) fail(Errc::non_monotone, "interpolation knots must be strictly increasing");
    delta[i] = (y_[i + 1] - y_[i]) / h[i];
  }
  m_.assign(n, 0.0);
  if (n == 2) {
    m_[0] = m_[1] = delta[0];
    return;
  }
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (delta[k - 1] == 0.0 || delta[k] == 0.0 || (delta[k - 1] > 0.0) != (delta[k] > 0.0)) continue;
    const double w1 = 2.0 * h[k] + h[k - 1];
    const double w2 = h[k] + 2.0 * h[k - 1];
    m_[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
  }
  auto edge = [](double h0, double h1, double d0, double d1) {
    double d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if ((d > 0.0) != (d0 > 0.0) || d == 0.0) return 0.0;
    if ((d0 > 0.0) != (d1 > 0.0) && std::abs(d) > 3.0 * std::abs(d0)) return 3.0 * d0;
    return d;
  };
  m_[0] = edge(h[0], h[1], delta[0], delta[1]);
  m_[n - 1] = edge(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
}

double Pchip::operator()(double x) const {
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
  i = std::min(i, x_.size() - 2);
  const double h = x_[i + 1] - x_[i];
  const double t = (x - x_[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y_[i] + (t3 - 2 * t2 + t) * h * m_[i] + (-2 * t3 + 3 * t2) * y_[i + 1] +
         (t3 - t2) * h * m_[i + 1];
}

double Pchip::integrate(double a, double b) const {
  // Antiderivatives of the Hermite basis on t in [0, 1].
  auto prim = [](double t, double y0, double y1, double m0, double m1, double h) {
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
    return y0 * (t4 / 2 - t3 + t) + h * m0 * (t4 / 4 - 2 * t3 / 3 + t2 / 2) + y1 * (-t4 / 2 + t3) +
           h * m1 * (t4 / 4 - t3 / 3);
  };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < x_.size(); ++i) {
    const double lo = std::max(a, x_[i]);
    const double hi = std::min(b, x_[i + 1]);
    if (hi <= lo) continue;
    const double h = x_[i + 1] - x_[i];
    const double t0 = (lo - x_[i]) / h;
    const double t1 = (hi - x_[i]) / h;
    total += h * (prim(t1, y_[i], y_[i + 1], m_[i], m_[i + 1], h) - prim(t0, y_[i], y_[i + 1], m_[i], m_[i + 1], h));
  }
  return total;
}

// ---- Bjontegaard ----

namespace {

struct Curve {
  std::vector<double> log_rate;
  std::vector<double> quality;
};

// Points sorted by rate; both coordinates must rise together.
Curve make_curve(std::span<const RdPoint> pts, const char* which) {
  if (pts.size() < 4) {
    fail(Errc::too_few_points, std::string(which) + " curve has " + std::to_string(pts.size()) + " points (need 4)");
  }
  std::vector<RdPoint> sorted(pts.begin(), pts.end());
  for (const auto& p : sorted) {
    if (!(p.bitrate > 0.0) || !std::isfinite(p.quality)) {
      fail(Errc::invalid_argument, std::string(which) + " curve has a non-positive rate or non-finite quality");
    }
  }
  std::sort(sorted.begin(), sorted.end(), [](const RdPoint& a, const RdPoint& b) { return a.bitrate < b.bitrate; });
  Curve c;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i > 0 && !(sorted[i].bitrate > sorted[i - 1].bitrate && sorted[i].quality > sorted[i - 1].quality)) {
      fail(Errc::non_monotone, std::string(which) + " curve is not strictly monotone (qp " +
                                   std::to_string(sorted[i - 1].qp) + " vs qp " + std::to_string(sorted[i].qp) + ")");
    }
    c.log_rate.push_back(std::log10(sorted[i].bitrate));
    c.quality.push_back(sorted[i].quality);
  }
  return c;
}

// Mean of (test - anchor) over the overlap of the x ranges.
double mean_gap(const std::vector<double>& xa, const std::vector<double>& ya, const std::vector<double>& xt,
                const std::vector<double>& yt) {
  const double lo = std::max(xa.front(), xt.front());
  const double hi = std::min(xa.back(), xt.back());
  if (!(hi > lo)) fail(Errc::no_overlap, "curves do not overlap");
  const Pchip pa(xa, ya);
  const Pchip pt(xt, yt);
  return (pt.integrate(lo, hi) - pa.integrate(lo, hi)) / (hi - lo);
}

}  // namespace

double bd_rate(std::span<const RdPoint> anchor, std::span<const RdPoint> test) {
  const Curve a = make_curve(anchor, "anchor");
  const Curve t = make_curve(test, "test");
  const double gap = mean_gap(a.quality, a.log_rate, t.quality, t.log_rate);
  return (std::pow(10.0, gap) - 1.0) * 100.0;
}

double bd_quality(std::span<const RdPoint> anchor, std::span<const RdPoint> test) {
  const Curve a = make_curve(anchor, "anchor");
  const Curve t = make_curve(test, "test");
  return mean_gap(a.log_rate, a.quality, t.log_rate, t.quality);
}

// ---- depth agreement ----

DepthAgreement depth_agreement(const DepthMap& ref, const DepthMap& test) {
  return depth_agreement(std::span<const DepthMap>(&ref, 1), std::span<const DepthMap>(&test, 1));
}

DepthAgreement depth_agreement(std::span<const DepthMap> ref, std::span<const DepthMap> test) {
  if (ref.size() != test.size() || ref.empty()) fail(Errc::dimension_mismatch, "depth map lists differ in length");
  std::size_t eq = 0, deeper = 0, shallower = 0;
  for (std::size_t f = 0; f < ref.size(); ++f) {
    if (!ref[f].same_grid(test[f])) fail(Errc::dimension_mismatch, "depth map grids differ");
    const auto r = ref[f].depths();
    const auto t = test[f].depths();
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (t[i] == r[i]) {
        ++eq;
      } else if (t[i] > r[i]) {
        ++deeper;
      } else {
        ++shallower;
      }
    }
  }
  const double n = static_cast<double>(eq + deeper + shallower);
  return {eq / n, deeper / n, shallower / n};
}

// ---- Pareto ----

bool dominates(const ParetoPoint& p, const ParetoPoint& q) {
  return p.bd_rate <= q.bd_rate && p.delta_t <= q.delta_t && (p.bd_rate < q.bd_rate || p.delta_t < q.delta_t);
}

ParetoResult pareto_front(std::span<const ParetoPoint> points) {
  if (points.empty()) fail(Errc::invalid_argument, "pareto front of an empty point set");
  ParetoResult out;
  for (const auto& q : points) {
    const bool beaten = std::any_of(points.begin(), points.end(), [&](const ParetoPoint& p) { return dominates(p, q); });
    (beaten ? out.dominated : out.front).push_back(q);
  }
  std::stable_sort(out.front.begin(), out.front.end(),
                   [](const ParetoPoint& a, const ParetoPoint& b) { return a.delta_t < b.delta_t; });
  return out;
}

}  // namespace mrenc
