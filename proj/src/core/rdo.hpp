#pragma once

#include <cstdint>
#include <vector>

#include "codec_core.hpp"
#include "frame_io.hpp"
#include "partition.hpp"

namespace mrenc {

struct SearchResult {
  PartitionTree tree;
  RdCost cost;
  std::int64_t work_units = 0;  // (region, intra mode) pairs evaluated
  std::int64_t split_bits = 0;
};

struct SearchOptions {
  Effort effort = Effort::thorough;
  int max_total_depth = kDefaultMaxDepth;
};

/// Candidate modes at `region` under the bounds of `spec`, in tie-break order.
///
/// NS needs the lower bound to be <= depth over the whole region; a split needs
/// to be legal and the upper bound to be >= depth + 1 over the whole region.
std::vector<SplitMode> admissible_modes(const CuRegion& region, const ConstraintSpec& spec, const SearchOptions& opt);

/// ceil(log2(k)); zero for a single candidate.
int split_signal_bits(std::size_t candidates);

/// Exhaustive RD search of one CTU under the bounds of `spec` (ForceReplay is
/// not searchable; use replay_ctu). Commits the winning reconstruction into
/// `recon`. Throws Errc::infeasible_constraint if no tree satisfies the bounds.
SearchResult search_ctu(const Plane& source, const CuRegion& ctu_region, const QpParams& qp,
                        const ConstraintSpec& spec, const SearchOptions& opt, Plane& recon);

/// Codes the leaves of `tree` in coding order with no partition decisions.
SearchResult replay_ctu(const Plane& source, const CuRegion& ctu_region, const QpParams& qp,
                        const PartitionTree& tree, Plane& recon);

struct FrameResult {
  std::vector<PartitionTree> trees;  // raster CTU order
  Plane recon;
  std::int64_t bits = 0;
  std::int64_t distortion = 0;
  std::int64_t split_bits = 0;
  std::int64_t work_units = 0;
  DepthMap depth_map;
};

struct EncodeParams {
  int ctu = kDefaultCtu;
  SearchOptions search;
};

/// Encodes one frame CTU by CTU, searching or replaying as `spec` dictates.
FrameResult encode_frame(const Plane& source, const QpParams& qp, const ConstraintSpec& spec, const EncodeParams& params);

}  // namespace mrenc
