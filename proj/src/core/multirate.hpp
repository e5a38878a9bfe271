#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "frame_io.hpp"
#include "metadata.hpp"
#include "partition.hpp"
#include "rdo.hpp"

namespace mrenc {

enum class Strategy { Default, TDP, BUP, BCP, AHP, FTDR, FBUR };

inline constexpr Strategy kAllStrategies[] = {Strategy::Default, Strategy::TDP, Strategy::BUP, Strategy::BCP,
                                              Strategy::AHP,     Strategy::FTDR, Strategy::FBUR};

std::string_view strategy_name(Strategy s);  // "default", "tdp", ...
std::optional<Strategy> parse_strategy(std::string_view name);

enum class BoundKind { unconstrained, upper, lower, double_bound, force };

std::string_view bound_kind_name(BoundKind k);

struct RungPlan {
  int qp = 0;
  BoundKind kind = BoundKind::unconstrained;
  std::optional<std::size_t> upper_ref;  // rung indices
  std::optional<std::size_t> lower_ref;
  std::optional<std::size_t> force_ref;

  std::vector<std::size_t> deps() const;
};

/// Rungs are ordered by qp ascending; rung 0 is the highest-bitrate (HQ)
/// encode and the last rung the lowest-bitrate (LQ) one.
struct LadderPlan {
  Strategy strategy = Strategy::Default;
  std::vector<RungPlan> rungs;

  std::size_t edge_count() const;
  /// Rung indices in an order that respects every dependency.
  std::vector<std::size_t> topological_order() const;
};

LadderPlan plan(Strategy strategy, std::span<const int> qps);

struct RungResult {
  int qp = 0;
  std::int64_t bits = 0;
  double bitrate = 0.0;  // bit/s at the sequence frame rate
  double psnr = 0.0;     // +inf when lossless
  double xpsnr = 0.0;
  double tau = 0.0;      // seconds of thread CPU time spent encoding this rung
  std::int64_t work_units = 0;
  std::int64_t split_bits = 0;
  std::int64_t distortion = 0;
  BoundKind kind = BoundKind::unconstrained;
  std::vector<int> reference_qps;
  std::size_t constraint_violations = 0;
  MetadataFile metadata;
  std::vector<DepthMap> depth_maps;  // per frame
  Sequence recon;

  double mean_depth() const;
};

using FrameConstraintFn = std::function<ConstraintSpec(std::size_t frame)>;

/// Encodes every frame of `seq` at `qp`; `constraint` (optional) supplies the
/// spec for each frame.
RungResult encode_sequence(const Sequence& seq, int qp, const EncodeParams& params,
                           const FrameConstraintFn& constraint = {});

struct LadderOptions {
  EncodeParams encode;
  int jobs = 0;  // <= 0: one worker per rung
};

struct LadderReport {
  Strategy strategy = Strategy::Default;
  LadderPlan plan;
  std::vector<RungResult> rungs;  // qp ascending
  double t_serial = 0.0;
  double t_parallel = 0.0;
  double t_critical_path = 0.0;

  std::size_t n() const { return rungs.size(); }
  std::int64_t total_work() const;
  std::int64_t max_rung_work() const;
};

/// Runs the plan's DAG on a bounded worker pool. Every dependent rung is
/// checked against its constraint; a violation throws std::logic_error.
LadderReport run_ladder(const Sequence& seq, std::span<const int> qps, Strategy strategy, const LadderOptions& opt);

/// Rebuilds the constraint of one frame from its reference rungs.
ConstraintSpec constraint_for(const RungPlan& rung, std::span<const RungResult> done, std::size_t frame, int ctu);

struct DeltaTimes {
  double delta_ts = 0.0;      // percent
  double delta_tp = 0.0;      // percent
  double delta_work = 0.0;    // percent, total work units
  double delta_work_p = 0.0;  // percent, max-rung work units
};

DeltaTimes delta_times(const LadderReport& method, const LadderReport& anchor);

/// T_S / T_P style reductions over per-rung times.
double serial_time(std::span<const double> taus);
double parallel_time(std::span<const double> taus);

struct LadderComparison {
  DeltaTimes deltas;
  std::optional<double> bdr_psnr;
  std::optional<double> bdr_xpsnr;
  std::optional<double> bd_psnr;
  std::optional<double> bd_xpsnr;
  std::vector<std::string> warnings;
};

/// Delta times plus Bjontegaard deltas of `method` against `anchor`.
/// Lossless rungs are left out of the BD computation with a warning.
LadderComparison compare_ladders(const LadderReport& method, const LadderReport& anchor);

}  // namespace mrenc
