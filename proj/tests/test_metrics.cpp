#include <doctest.h>

#include <cmath>

#include "error.hpp"
#include "metrics.hpp"
#include "support.hpp"

using namespace mrenc;

namespace {

Errc error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::invalid_argument;
}

std::vector<RdPoint> curve(std::initializer_list<std::pair<double, double>> pts) {
  std::vector<RdPoint> out;
  int qp = 42;
  for (const auto& [r, q] : pts) out.push_back({r, q, qp -= 5});
  return out;
}

std::vector<RdPoint> random_curve(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.2, 1.0);
  std::vector<RdPoint> out;
  double r = 100.0 * (1.0 + u(rng));
  double q = 28.0 + 4.0 * u(rng);
  for (int i = 0; i < 5; ++i) {
    out.push_back({r, q, 42 - 5 * i});
    r *= 1.3 + u(rng);
    q += 1.5 + 2.0 * u(rng);
  }
  return out;
}

// 1e5-point trapezoid rule on closed-form log-rate curves.
double trapezoid_bd_rate(double lo, double hi, auto&& log_anchor, auto&& log_test) {
  const int n = 100000;
  const double h = (hi - lo) / n;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double q = lo + i * h;
    const double g = log_test(q) - log_anchor(q);
    acc += (i == 0 || i == n) ? g / 2 : g;
  }
  return (std::pow(10.0, acc * h / (hi - lo)) - 1.0) * 100.0;
}

}  // namespace

TEST_CASE("psnr unit values") {
  Plane a(16, 16), b(16, 16);
  CHECK(std::isinf(psnr(a, b)));
  for (int i = 0; i < 256; i += 2) b.samples()[i] = 1;  // half the samples off by one
  for (int i = 1; i < 256; i += 2) a.samples()[i] = 1;  // the other half off the other way
  CHECK(std::abs(psnr(a, b) - 48.1308) < 1e-4);

  Plane black(16, 16), white(16, 16);
  for (auto& s : white.samples()) s = 255;
  CHECK(psnr(black, white) == doctest::Approx(0.0));
  CHECK_THROWS_AS(psnr(Plane(16, 16), Plane(32, 16)), Error);
}

TEST_CASE("sequence psnr averages MSE over all frames") {
  std::vector<Plane> ref{Plane(16, 16), Plane(16, 16)};
  std::vector<Plane> test{Plane(16, 16), Plane(16, 16)};
  for (auto& s : test[1].samples()) s = 2;  // MSE 4 in frame 1, 0 in frame 0
  CHECK(std::abs(psnr(ref, test) - 10.0 * std::log10(255.0 * 255.0 / 2.0)) < 1e-9);
  test.pop_back();
  CHECK(error_of([&] { psnr(ref, test); }) == Errc::dimension_mismatch);
}

TEST_CASE("xpsnr_s equals psnr for uniform activity") {
  std::mt19937 rng(3);
  // Flat reference: every block has activity 0.
  Plane flat(64, 48);
  for (auto& s : flat.samples()) s = 90;
  // Period-2 checkerboard: identical activity in every 16x16 block.
  Plane checker(64, 48);
  for (int y = 0; y < 48; ++y)
    for (int x = 0; x < 64; ++x) checker.at(x, y) = (x + y) % 2 ? 200 : 40;
  for (const Plane* ref : {&flat, &checker}) {
    for (int i = 0; i < 5; ++i) {
      Plane test = *ref;
      for (auto& s : test.samples()) s = static_cast<std::uint8_t>(std::clamp<int>(s + static_cast<int>(rng() % 9) - 4, 0, 255));
      CHECK(std::abs(xpsnr_simplified(*ref, test) - psnr(*ref, test)) < 1e-9);
    }
  }
  CHECK(std::isinf(xpsnr_simplified(flat, flat)));
}

TEST_CASE("xpsnr_s weighs errors in flat blocks at least as much as in textured ones") {
  Plane ref(32, 16);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 32; ++x) ref.at(x, y) = x < 16 ? 128 : ((x + y) % 2 ? 220 : 30);
  Plane err_flat = ref, err_tex = ref;
  for (int y = 4; y < 12; ++y) {
    err_flat.at(4, y) = static_cast<std::uint8_t>(err_flat.at(4, y) + 5);
    err_tex.at(20, y) = static_cast<std::uint8_t>(err_tex.at(20, y) + 5);
  }
  CHECK(psnr(ref, err_flat) == doctest::Approx(psnr(ref, err_tex)));
  CHECK(xpsnr_simplified(ref, err_flat) <= xpsnr_simplified(ref, err_tex));
  const auto act = block_activities(ref);
  REQUIRE(act.size() == 2);
  CHECK(act[0] == 0.0);
  CHECK(act[1] > 100.0);
}

TEST_CASE("bd_rate examples") {
  const auto a = curve({{100, 30}, {180, 33}, {320, 36}, {600, 39}, {1100, 42}});
  CHECK(std::abs(bd_rate(a, a)) < 1e-9);
  auto b = a;
  for (auto& p : b) p.bitrate *= 1.10;
  CHECK(std::abs(bd_rate(a, b) - 10.0) < 1e-3);
  CHECK(std::abs(bd_quality(a, a)) < 1e-9);
  auto c = a;
  for (auto& p : c) p.quality -= 0.5;
  CHECK(std::abs(bd_quality(a, c) + 0.5) < 1e-9);
}

TEST_CASE("bd_rate on analytic curves matches numeric integration") {
  auto la = [](double q) { return (q / 6.0) * std::log10(2.0); };
  auto lt = [](double q) { return std::log10(1.05) + (q / 6.2) * std::log10(2.0); };
  std::vector<RdPoint> a, t;
  for (const double q : {30.0, 34.0, 38.0, 42.0}) {
    a.push_back({std::pow(10.0, la(q)), q, 0});
    t.push_back({std::pow(10.0, lt(q)), q, 0});
  }
  const double oracle = trapezoid_bd_rate(30.0, 42.0, la, lt);
  CHECK(std::abs(bd_rate(a, t) - oracle) <= 0.05);
}

TEST_CASE("property: bd_rate identity, antisymmetry and order invariance") {
  std::mt19937 rng(11);
  for (int i = 0; i < 200; ++i) {
    const auto a = random_curve(rng);
    auto b = random_curve(rng);
    // Keep the quality ranges overlapping.
    const double shift = a[2].quality - b[2].quality;
    for (auto& p : b) p.quality += shift;
    CHECK(std::abs(bd_rate(a, a)) < 1e-9);
    const double ab = bd_rate(a, b);
    const double ba = bd_rate(b, a);
    CHECK(std::abs(ab + ba / (1.0 + ba / 100.0)) < 0.01);
    auto shuffled = b;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(bd_rate(a, shuffled) == doctest::Approx(ab).epsilon(1e-12));

    auto scaled = a;
    const double k = 1.01 + (rng() % 50) / 100.0;
    for (auto& p : scaled) p.bitrate *= k;
    CHECK(bd_rate(a, scaled) > 0.0);
    CHECK(bd_quality(a, scaled) < 0.0);
  }
}

TEST_CASE("bd errors") {
  const auto a = curve({{100, 30}, {180, 33}, {320, 36}, {600, 39}});
  const auto three = curve({{100, 30}, {180, 33}, {320, 36}});
  CHECK(error_of([&] { bd_rate(a, three); }) == Errc::too_few_points);
  const auto far = curve({{100, 50}, {180, 53}, {320, 56}, {600, 59}});
  CHECK(error_of([&] { bd_rate(a, far); }) == Errc::no_overlap);
  const auto bumpy = curve({{100, 30}, {180, 34}, {320, 33}, {600, 39}});
  CHECK(error_of([&] { bd_rate(a, bumpy); }) == Errc::non_monotone);
  CHECK(error_of([&] { bd_quality(bumpy, a); }) == Errc::non_monotone);
}

TEST_CASE("pchip reproduces linear data and never overshoots monotone data") {
  const Pchip lin({0, 1, 3, 4}, {1, 3, 7, 9});
  for (double x = 0; x <= 4; x += 0.25) CHECK(lin(x) == doctest::Approx(1 + 2 * x));
  CHECK(lin.integrate(0, 4) == doctest::Approx(20.0));
  CHECK(lin.integrate(1, 3) == doctest::Approx(10.0));

  std::mt19937 rng(12);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> x{0}, y{0};
    for (int k = 0; k < 5; ++k) {
      x.push_back(x.back() + 0.1 + (rng() % 100) / 50.0);
      y.push_back(y.back() + (rng() % 4 == 0 ? 0.0 : (rng() % 100) / 10.0));
    }
    const Pchip p(x, y);
    double prev = -1e300;
    for (double t = x.front(); t <= x.back(); t += 0.01) {
      const double v = p(t);
      CHECK(v >= prev - 1e-12);
      CHECK(v >= y.front() - 1e-12);
      CHECK(v <= y.back() + 1e-12);
      prev = v;
    }
    // Midpoint-rule check of the closed-form integral.
    double num = 0.0;
    const int n = 20000;
    const double h = (x.back() - x.front()) / n;
    for (int k = 0; k < n; ++k) num += p(x.front() + (k + 0.5) * h) * h;
    CHECK(p.integrate(x.front(), x.back()) == doctest::Approx(num).epsilon(1e-6));
  }
}

TEST_CASE("depth agreement examples") {
  DepthMap ref(4, 4, 2);
  auto a = depth_agreement(ref, ref);
  CHECK(a.equal == 1.0);
  a = depth_agreement(ref, DepthMap(4, 4, 3));
  CHECK(a.deeper == 1.0);
  DepthMap half = ref;
  for (int x = 0; x < 4; ++x)
    for (int y = 0; y < 2; ++y) half.at(x, y) = 1;
  a = depth_agreement(ref, half);
  CHECK(a.equal == 0.5);
  CHECK(a.deeper == 0.0);
  CHECK(a.shallower == 0.5);
  CHECK(error_of([&] { depth_agreement(ref, DepthMap(4, 2)); }) == Errc::dimension_mismatch);

  std::mt19937 rng(13);
  for (int i = 0; i < 50; ++i) {
    DepthMap r(8, 8), t(8, 8);
    for (int y = 0; y < 8; ++y)
      for (int x = 0; x < 8; ++x) {
        r.at(x, y) = static_cast<std::uint8_t>(rng() % 7);
        t.at(x, y) = static_cast<std::uint8_t>(rng() % 7);
      }
    const auto s = depth_agreement(r, t);
    CHECK(std::abs(s.equal + s.deeper + s.shallower - 1.0) < 1e-9);
  }
}

TEST_CASE("pareto examples") {
  const std::vector<ParetoPoint> pts{{0.5, -11.69, "ahp"}, {0.59, -9.87, "bcp"}, {8.65, -13.89, "ftdr"}};
  const auto r = pareto_front(pts);
  REQUIRE(r.front.size() == 2);
  CHECK(r.front[0].label == "ftdr");
  CHECK(r.front[1].label == "ahp");
  REQUIRE(r.dominated.size() == 1);
  CHECK(r.dominated[0].label == "bcp");

  const std::vector<ParetoPoint> one{{1, 1, "x"}};
  CHECK(pareto_front(one).front.size() == 1);
  const std::vector<ParetoPoint> dup{{1, 1, "x"}, {1, 1, "y"}};
  CHECK(pareto_front(dup).front.size() == 2);
  CHECK(error_of([] { pareto_front(std::vector<ParetoPoint>{}); }) == Errc::invalid_argument);
}

TEST_CASE("property: pareto front against pairwise dominance") {
  std::mt19937 rng(14);
  for (int i = 0; i < 300; ++i) {
    std::vector<ParetoPoint> pts;
    const int n = 1 + static_cast<int>(rng() % 12);
    for (int k = 0; k < n; ++k) {
      pts.push_back({static_cast<double>(rng() % 10), -static_cast<double>(rng() % 10), std::to_string(k)});
    }
    const auto r = pareto_front(pts);
    CHECK(r.front.size() + r.dominated.size() == pts.size());
    for (const auto& p : r.front) {
      for (const auto& q : pts) {
        const bool beats = q.bd_rate <= p.bd_rate && q.delta_t <= p.delta_t &&
                           (q.bd_rate < p.bd_rate || q.delta_t < p.delta_t);
        CHECK_FALSE(beats);
      }
    }
    for (const auto& q : r.dominated) {
      bool beaten = false;
      for (const auto& p : pts) beaten |= p.bd_rate <= q.bd_rate && p.delta_t <= q.delta_t &&
                                          (p.bd_rate < q.bd_rate || p.delta_t < q.delta_t);
      CHECK(beaten);
    }
    for (std::size_t k = 1; k < r.front.size(); ++k) CHECK(r.front[k - 1].delta_t <= r.front[k].delta_t);
  }
}
