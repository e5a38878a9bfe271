#include "multirate.hpp"

#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <deque>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <time.h>

#include "error.hpp"
#include "metrics.hpp"

namespace mrenc {

namespace {

// CPU time of the calling thread: a rung's cost stays the same whether or not
// other rungs share the core with it.
double thread_seconds() {
  timespec ts{};
  clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
  return static_cast<double>(ts.tv_sec) + static_cast<double>(ts.tv_nsec) * 1e-9;
}

}  // namespace

std::string_view strategy_name(Strategy s) {
  switch (s) {
    case Strategy::Default: return "default";
    case Strategy::TDP: return "tdp";
    case Strategy::BUP: return "bup";
    case Strategy::BCP: return "bcp";
    case Strategy::AHP: return "ahp";
    case Strategy::FTDR: return "ftdr";
    case Strategy::FBUR: return "fbur";
  }
  return "?";
}

std::optional<Strategy> parse_strategy(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  for (const Strategy s : kAllStrategies) {
    if (strategy_name(s) == lower) return s;
  }
  return std::nullopt;
}

std::string_view bound_kind_name(BoundKind k) {
  switch (k) {
    case BoundKind::unconstrained: return "unconstrained";
    case BoundKind::upper: return "upper_bound";
    case BoundKind::lower: return "lower_bound";
    case BoundKind::double_bound: return "double_bound";
    case BoundKind::force: return "force_replay";
  }
  return "?";
}

std::vector<std::size_t> RungPlan::deps() const {
  std::vector<std::size_t> d;
  for (const auto& r : {upper_ref, lower_ref, force_ref}) {
    if (r && std::find(d.begin(), d.end(), *r) == d.end()) d.push_back(*r);
  }
  return d;
}

std::size_t LadderPlan::edge_count() const {
  std::size_t n = 0;
  for (const auto& r : rungs) n += r.deps().size();
  return n;
}

std::vector<std::size_t> LadderPlan::topological_order() const {
  std::vector<std::size_t> order;
  std::vector<bool> placed(rungs.size(), false);
  while (order.size() < rungs.size()) {
    bool progressed = false;
    for (std::size_t i = 0; i < rungs.size(); ++i) {
      if (placed[i]) continue;
      const auto d = rungs[i].deps();
      if (std::all_of(d.begin(), d.end(), [&](std::size_t j) { return placed[j]; })) {
        placed[i] = true;
        order.push_back(i);
        progressed = true;
      }
    }
    if (!progressed) throw std::logic_error("ladder plan has a dependency cycle");
  }
  return order;
}

LadderPlan plan(Strategy strategy, std::span<const int> qps_in) {
  std::vector<int> qps(qps_in.begin(), qps_in.end());
  if (qps.size() < 2) fail(Errc::invalid_argument, "a ladder needs at least 2 rungs");
  std::sort(qps.begin(), qps.end());
  if (std::adjacent_find(qps.begin(), qps.end()) != qps.end()) fail(Errc::invalid_argument, "ladder QPs must be distinct");

  LadderPlan p;
  p.strategy = strategy;
  for (const int qp : qps) {
    RungPlan r;
    r.qp = qp;
    p.rungs.push_back(r);
  }
  const std::size_t hq = 0;
  const std::size_t lq = qps.size() - 1;

  for (std::size_t i = 0; i < p.rungs.size(); ++i) {
    RungPlan& r = p.rungs[i];
    const bool inner = i != hq && i != lq;
    switch (strategy) {
      case Strategy::Default: break;
      case Strategy::TDP:
        if (i != hq) {
          r.kind = BoundKind::upper;
          r.upper_ref = hq;
        }
        break;
      case Strategy::BUP:
        if (i != lq) {
          r.kind = BoundKind::lower;
          r.lower_ref = lq;
        }
        break;
      case Strategy::BCP:
        if (i == lq) {
          r.kind = BoundKind::upper;
          r.upper_ref = hq;
        }
        break;
      case Strategy::AHP:
        if (i == hq) {
          r.kind = BoundKind::lower;
          r.lower_ref = lq;
        }
        break;
      case Strategy::FTDR:
        if (i != hq) {
          r.kind = BoundKind::force;
          r.force_ref = hq;
        }
        break;
      case Strategy::FBUR:
        if (i != lq) {
          r.kind = BoundKind::force;
          r.force_ref = lq;
        }
        break;
    }
    if (inner && (strategy == Strategy::BCP || strategy == Strategy::AHP)) {
      r.kind = BoundKind::double_bound;
      r.lower_ref = lq;
      r.upper_ref = hq;
    }
  }
  return p;
}

double RungResult::mean_depth() const {
  if (depth_maps.empty()) return 0.0;
  double acc = 0.0;
  for (const auto& m : depth_maps) acc += m.mean();
  return acc / static_cast<double>(depth_maps.size());
}

RungResult encode_sequence(const Sequence& seq, int qp, const EncodeParams& params, const FrameConstraintFn& constraint) {
  seq.validate();
  const QpParams q = QpParams::from_qp(qp);
  const double start = thread_seconds();

  RungResult out;
  out.qp = qp;
  out.recon.frame_rate = seq.frame_rate;
  std::vector<PartitionTree> trees;
  for (std::size_t f = 0; f < seq.frames.size(); ++f) {
    const ConstraintSpec spec = constraint ? constraint(f) : ConstraintSpec::unconstrained();
    FrameResult fr = encode_frame(seq.frames[f], q, spec, params);
    out.constraint_violations += check_constraint(fr.depth_map, spec).size();
    out.bits += fr.bits;
    out.split_bits += fr.split_bits;
    out.distortion += fr.distortion;
    out.work_units += fr.work_units;
    out.depth_maps.push_back(std::move(fr.depth_map));
    out.recon.frames.push_back(std::move(fr.recon));
    std::move(fr.trees.begin(), fr.trees.end(), std::back_inserter(trees));
  }
  const double stop = thread_seconds();

  out.tau = std::max(stop - start, 1e-9);
  out.bitrate = static_cast<double>(out.bits) * seq.frame_rate / static_cast<double>(seq.frames.size());
  out.psnr = psnr(seq.frames, out.recon.frames);
  out.xpsnr = xpsnr_simplified(seq.frames, out.recon.frames);
  out.metadata = MetadataFile::make(seq.width(), seq.height(), params.ctu, qp, params.search.effort, std::move(trees));
  return out;
}

ConstraintSpec constraint_for(const RungPlan& rung, std::span<const RungResult> done, std::size_t frame, int ctu) {
  auto map_of = [&](std::size_t ref) { return done[ref].depth_maps.at(frame); };
  switch (rung.kind) {
    case BoundKind::unconstrained: return ConstraintSpec::unconstrained();
    case BoundKind::upper: return ConstraintSpec::upper_bound(map_of(*rung.upper_ref));
    case BoundKind::lower: return ConstraintSpec::lower_bound(map_of(*rung.lower_ref));
    case BoundKind::double_bound: return ConstraintSpec::double_bound(map_of(*rung.lower_ref), map_of(*rung.upper_ref));
    case BoundKind::force: {
      const auto trees = done[*rung.force_ref].metadata.frame_trees(static_cast<int>(frame));
      return ConstraintSpec::force_replay({trees.begin(), trees.end()}, ctu);
    }
  }
  return ConstraintSpec::unconstrained();
}

LadderReport run_ladder(const Sequence& seq, std::span<const int> qps, Strategy strategy, const LadderOptions& opt) {
  seq.validate();
  FrameGeometry{seq.width(), seq.height(), opt.encode.ctu}.validate();

  LadderReport report;
  report.strategy = strategy;
  report.plan = plan(strategy, qps);
  const std::size_t n = report.plan.rungs.size();
  report.rungs.resize(n);

  // Workers pull ready rungs; a rung becomes ready once all of its references are done.
  std::mutex mu;
  std::condition_variable cv;
  std::deque<std::size_t> ready;
  std::vector<std::size_t> pending(n);
  std::size_t finished = 0;
  std::exception_ptr error;
  for (std::size_t i = 0; i < n; ++i) {
    pending[i] = report.plan.rungs[i].deps().size();
    if (pending[i] == 0) ready.push_back(i);
  }

  auto worker = [&] {
    for (;;) {
      std::size_t i;
      {
        std::unique_lock lock(mu);
        cv.wait(lock, [&] { return !ready.empty() || finished == n || error; });
        if (error || ready.empty()) return;
        i = ready.front();
        ready.pop_front();
      }
      try {
        const RungPlan& rp = report.plan.rungs[i];
        const std::span<const RungResult> done(report.rungs);
        RungResult res = encode_sequence(seq, rp.qp, opt.encode, [&](std::size_t f) {
          return constraint_for(rp, done, f, opt.encode.ctu);
        });
        res.kind = rp.kind;
        for (const std::size_t d : rp.deps()) res.reference_qps.push_back(report.plan.rungs[d].qp);
        if (res.constraint_violations != 0) {
          throw std::logic_error("rung qp " + std::to_string(rp.qp) + " violates its " +
                                 std::string(bound_kind_name(rp.kind)) + " constraint at " +
                                 std::to_string(res.constraint_violations) + " positions");
        }
        std::lock_guard lock(mu);
        report.rungs[i] = std::move(res);
        ++finished;
        for (std::size_t j = 0; j < n; ++j) {
          const auto d = report.plan.rungs[j].deps();
          if (std::find(d.begin(), d.end(), i) != d.end() && --pending[j] == 0) ready.push_back(j);
        }
      } catch (...) {
        std::lock_guard lock(mu);
        if (!error) error = std::current_exception();
      }
      cv.notify_all();
    }
  };

  const std::size_t jobs = opt.jobs > 0 ? std::min<std::size_t>(static_cast<std::size_t>(opt.jobs), n) : n;
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);

  std::vector<double> taus;
  for (const auto& r : report.rungs) taus.push_back(r.tau);
  report.t_serial = serial_time(taus);
  report.t_parallel = parallel_time(taus);
  std::vector<double> finish(n, 0.0);
  for (const std::size_t i : report.plan.topological_order()) {
    double start = 0.0;
    for (const std::size_t d : report.plan.rungs[i].deps()) start = std::max(start, finish[d]);
    finish[i] = start + taus[i];
    report.t_critical_path = std::max(report.t_critical_path, finish[i]);
  }
  return report;
}

std::int64_t LadderReport::total_work() const {
  std::int64_t s = 0;
  for (const auto& r : rungs) s += r.work_units;
  return s;
}

std::int64_t LadderReport::max_rung_work() const {
  std::int64_t m = 0;
  for (const auto& r : rungs) m = std::max(m, r.work_units);
  return m;
}

double serial_time(std::span<const double> taus) {
  double s = 0.0;
  for (const double t : taus) s += t;
  return s;
}

double parallel_time(std::span<const double> taus) {
  double m = 0.0;
  for (const double t : taus) m = std::max(m, t);
  return m;
}

namespace {

double rel(double method, double anchor) { return 100.0 * (method - anchor) / anchor; }

void require_same_ladder(const LadderReport& a, const LadderReport& b) {
  if (a.rungs.size() != b.rungs.size()) fail(Errc::invalid_argument, "ladders differ in rung count");
  for (std::size_t i = 0; i < a.rungs.size(); ++i) {
    if (a.rungs[i].qp != b.rungs[i].qp) fail(Errc::invalid_argument, "ladders differ in QPs");
  }
}

}  // namespace

DeltaTimes delta_times(const LadderReport& method, const LadderReport& anchor) {
  require_same_ladder(method, anchor);
  return {rel(method.t_serial, anchor.t_serial), rel(method.t_parallel, anchor.t_parallel),
          rel(static_cast<double>(method.total_work()), static_cast<double>(anchor.total_work())),
          rel(static_cast<double>(method.max_rung_work()), static_cast<double>(anchor.max_rung_work()))};
}

LadderComparison compare_ladders(const LadderReport& method, const LadderReport& anchor) {
  LadderComparison c;
  c.deltas = delta_times(method, anchor);

  auto points = [&c](const LadderReport& l, bool use_x, const char* who) {
    std::vector<RdPoint> pts;
    for (const auto& r : l.rungs) {
      const double q = use_x ? r.xpsnr : r.psnr;
      if (!std::isfinite(q)) {
        c.warnings.push_back(std::string(who) + " qp " + std::to_string(r.qp) + " is lossless; left out of BD");
        continue;
      }
      pts.push_back({r.bitrate / 1000.0, q, r.qp});
    }
    return pts;
  };
  auto guarded = [&c](auto&& fn) -> std::optional<double> {
    try {
      return fn();
    } catch (const Error& e) {
      c.warnings.push_back(e.what());
      return std::nullopt;
    }
  };
  const auto ap = points(anchor, false, "anchor");
  const auto mp = points(method, false, "method");
  c.bdr_psnr = guarded([&] { return bd_rate(ap, mp); });
  c.bd_psnr = guarded([&] { return bd_quality(ap, mp); });
  const auto ax = points(anchor, true, "anchor");
  const auto mx = points(method, true, "method");
  c.bdr_xpsnr = guarded([&] { return bd_rate(ax, mx); });
  c.bd_xpsnr = guarded([&] { return bd_quality(ax, mx); });
  return c;
}

}  // namespace mrenc
