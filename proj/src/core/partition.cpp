#include "partition.hpp"

#include <algorithm>
#include <numeric>

#include "error.hpp"

namespace mrenc {

std::string_view split_mode_name(SplitMode m) {
  switch (m) {
    case SplitMode::NS: return "NS";
    case SplitMode::QT: return "QT";
    case SplitMode::HBT: return "HBT";
    case SplitMode::VBT: return "VBT";
    case SplitMode::HTT: return "HTT";
    case SplitMode::VTT: return "VTT";
  }
  return "?";
}

int child_count(SplitMode m) {
  switch (m) {
    case SplitMode::NS: return 0;
    case SplitMode::QT: return 4;
    case SplitMode::HBT:
    case SplitMode::VBT: return 2;
    case SplitMode::HTT:
    case SplitMode::VTT: return 3;
  }
  return 0;
}

std::string_view effort_name(Effort e) { return e == Effort::fast ? "fast" : "thorough"; }

std::string to_string(const CuRegion& r) {
  return std::to_string(r.w) + "x" + std::to_string(r.h) + "@(" + std::to_string(r.x) + "," + std::to_string(r.y) +
         ") depth " + std::to_string(r.depth);
}

// ---- PartitionTree ----

PartitionTree::PartitionTree(SplitMode mode, std::vector<PartitionTree> children)
    : mode_(mode), children_(std::move(children)) {
  if (static_cast<int>(children_.size()) != child_count(mode_)) {
    fail(Errc::child_count_mismatch, std::string(split_mode_name(mode_)) + " node needs " +
                                         std::to_string(child_count(mode_)) + " children, got " +
                                         std::to_string(children_.size()));
  }
}

std::size_t PartitionTree::node_count() const {
  std::size_t n = 1;
  for (const auto& c : children_) n += c.node_count();
  return n;
}

std::size_t PartitionTree::leaf_count() const {
  if (is_leaf()) return 1;
  std::size_t n = 0;
  for (const auto& c : children_) n += c.leaf_count();
  return n;
}

int PartitionTree::max_depth() const {
  int d = 0;
  for (const auto& c : children_) d = std::max(d, 1 + c.max_depth());
  return d;
}

std::vector<SplitMode> PartitionTree::preorder() const {
  std::vector<SplitMode> out;
  auto walk = [&out](const PartitionTree& t, auto&& self) -> void {
    out.push_back(t.mode());
    for (const auto& c : t.children()) self(c, self);
  };
  walk(*this, walk);
  return out;
}

// ---- geometry ----

namespace {

[[noreturn]] void illegal_split(const CuRegion& r, SplitMode mode) {
  fail(Errc::geometry, std::string(split_mode_name(mode)) + " is illegal for region " + to_string(r));
}

}  // namespace

std::vector<CuRegion> child_regions(const CuRegion& r, SplitMode mode) {
  const int d = r.depth + 1;
  switch (mode) {
    case SplitMode::NS: illegal_split(r, mode);
    case SplitMode::QT: {
      if (r.w != r.h || r.w < 8 || r.w % 8 != 0) illegal_split(r, mode);
      const int s = r.w / 2;
      return {{r.x, r.y, s, s, d}, {r.x + s, r.y, s, s, d}, {r.x, r.y + s, s, s, d}, {r.x + s, r.y + s, s, s, d}};
    }
    case SplitMode::HBT: {
      if (r.h < 8 || r.h % 8 != 0) illegal_split(r, mode);
      const int s = r.h / 2;
      return {{r.x, r.y, r.w, s, d}, {r.x, r.y + s, r.w, s, d}};
    }
    case SplitMode::VBT: {
      if (r.w < 8 || r.w % 8 != 0) illegal_split(r, mode);
      const int s = r.w / 2;
      return {{r.x, r.y, s, r.h, d}, {r.x + s, r.y, s, r.h, d}};
    }
    case SplitMode::HTT: {
      if (r.h < 16 || r.h % 16 != 0) illegal_split(r, mode);
      const int q = r.h / 4;
      return {{r.x, r.y, r.w, q, d}, {r.x, r.y + q, r.w, 2 * q, d}, {r.x, r.y + 3 * q, r.w, q, d}};
    }
    case SplitMode::VTT: {
      if (r.w < 16 || r.w % 16 != 0) illegal_split(r, mode);
      const int q = r.w / 4;
      return {{r.x, r.y, q, r.h, d}, {r.x + q, r.y, 2 * q, r.h, d}, {r.x + 3 * q, r.y, q, r.h, d}};
    }
  }
  illegal_split(r, mode);
}

std::vector<SplitMode> legal_splits(const CuRegion& r, Effort effort, int max_total_depth) {
  std::vector<SplitMode> out{SplitMode::NS};
  if (r.depth + 1 > max_total_depth) return out;
  if (r.w == r.h && r.w >= 8) out.push_back(SplitMode::QT);
  if (r.h >= 8) out.push_back(SplitMode::HBT);
  if (r.w >= 8) out.push_back(SplitMode::VBT);
  if (effort == Effort::thorough) {
    if (r.h >= 16) out.push_back(SplitMode::HTT);
    if (r.w >= 16) out.push_back(SplitMode::VTT);
  }
  return out;
}

// ---- DepthMap ----

DepthMap::DepthMap(int grid_w, int grid_h, std::uint8_t fill)
    : grid_w_(grid_w), grid_h_(grid_h), depths_(static_cast<std::size_t>(grid_w) * grid_h, fill) {
  if (grid_w <= 0 || grid_h <= 0) fail(Errc::geometry, "depth map grid must be non-empty");
}

DepthMap DepthMap::for_frame(int frame_w, int frame_h, std::uint8_t fill) {
  return DepthMap((frame_w + 3) / 4, (frame_h + 3) / 4, fill);
}

double DepthMap::mean() const {
  if (depths_.empty()) return 0.0;
  const double sum = std::accumulate(depths_.begin(), depths_.end(), 0.0);
  return sum / static_cast<double>(depths_.size());
}

int DepthMap::max() const { return depths_.empty() ? 0 : *std::max_element(depths_.begin(), depths_.end()); }

int DepthMap::min_over(const CuRegion& r) const {
  int m = 255;
  for (int gy = r.y / 4; gy < (r.y + r.h) / 4; ++gy)
    for (int gx = r.x / 4; gx < (r.x + r.w) / 4; ++gx) m = std::min<int>(m, at(gx, gy));
  return m;
}

int DepthMap::max_over(const CuRegion& r) const {
  int m = 0;
  for (int gy = r.y / 4; gy < (r.y + r.h) / 4; ++gy)
    for (int gx = r.x / 4; gx < (r.x + r.w) / 4; ++gx) m = std::max<int>(m, at(gx, gy));
  return m;
}

// ---- FrameGeometry ----

CuRegion FrameGeometry::ctu_region(int index) const {
  return {(index % ctus_x()) * ctu, (index / ctus_x()) * ctu, ctu, ctu, 0};
}

void FrameGeometry::validate() const {
  if (ctu != 32 && ctu != 64 && ctu != 128) {
    fail(Errc::invalid_argument, "CTU size must be 32, 64 or 128 (got " + std::to_string(ctu) + ")");
  }
  if (frame_w <= 0 || frame_h <= 0 || frame_w % ctu != 0 || frame_h % ctu != 0) {
    fail(Errc::geometry, "frame " + std::to_string(frame_w) + "x" + std::to_string(frame_h) +
                             " is not a multiple of the " + std::to_string(ctu) + "-sample CTU");
  }
}

void paint_depths(const PartitionTree& tree, const CuRegion& ctu_region, DepthMap& map) {
  for_each_leaf(tree, ctu_region, [&map](const CuRegion& leaf) {
    if (leaf.w < kMinCuSize || leaf.h < kMinCuSize || leaf.w % 4 != 0 || leaf.h % 4 != 0 ||
        (leaf.x + leaf.w) / 4 > map.grid_w() || (leaf.y + leaf.h) / 4 > map.grid_h()) {
      fail(Errc::geometry, "leaf " + to_string(leaf) + " is off the 4x4 grid or outside the frame");
    }
    for (int gy = leaf.y / 4; gy < (leaf.y + leaf.h) / 4; ++gy)
      for (int gx = leaf.x / 4; gx < (leaf.x + leaf.w) / 4; ++gx) map.at(gx, gy) = static_cast<std::uint8_t>(leaf.depth);
  });
}

DepthMap depth_map_of(std::span<const PartitionTree> trees, int frame_w, int frame_h, int ctu) {
  const FrameGeometry geo{frame_w, frame_h, ctu};
  geo.validate();
  if (static_cast<int>(trees.size()) != geo.ctu_count()) {
    fail(Errc::geometry, std::to_string(trees.size()) + " trees for a frame of " + std::to_string(geo.ctu_count()) +
                             " CTUs");
  }
  DepthMap map = DepthMap::for_frame(frame_w, frame_h);
  for (int i = 0; i < geo.ctu_count(); ++i) paint_depths(trees[i], geo.ctu_region(i), map);
  return map;
}

// ---- ConstraintSpec ----

ConstraintSpec ConstraintSpec::upper_bound(DepthMap upper) { return ConstraintSpec(UpperBound{std::move(upper)}); }

ConstraintSpec ConstraintSpec::lower_bound(DepthMap lower) { return ConstraintSpec(LowerBound{std::move(lower)}); }

ConstraintSpec ConstraintSpec::double_bound(DepthMap lower, DepthMap upper) {
  if (!lower.same_grid(upper)) fail(Errc::dimension_mismatch, "double bound maps differ in grid size");
  for (std::size_t i = 0; i < lower.depths().size(); ++i) {
    if (lower.depths()[i] > upper.depths()[i]) {
      fail(Errc::invalid_argument, "double bound has lower > upper at grid index " + std::to_string(i));
    }
  }
  return ConstraintSpec(DoubleBound{std::move(lower), std::move(upper)});
}

ConstraintSpec ConstraintSpec::force_replay(std::vector<PartitionTree> trees, int ctu) {
  if (trees.empty()) fail(Errc::invalid_argument, "force replay needs at least one tree");
  return ConstraintSpec(ForceReplay{std::move(trees), ctu});
}

const DepthMap* ConstraintSpec::upper() const {
  if (auto* u = std::get_if<UpperBound>(&kind_)) return &u->upper;
  if (auto* d = std::get_if<DoubleBound>(&kind_)) return &d->upper;
  return nullptr;
}

const DepthMap* ConstraintSpec::lower() const {
  if (auto* l = std::get_if<LowerBound>(&kind_)) return &l->lower;
  if (auto* d = std::get_if<DoubleBound>(&kind_)) return &d->lower;
  return nullptr;
}

std::string_view ConstraintSpec::name() const {
  switch (kind_.index()) {
    case 0: return "unconstrained";
    case 1: return "upper_bound";
    case 2: return "lower_bound";
    case 3: return "double_bound";
    default: return "force_replay";
  }
}

std::vector<Violation> check_constraint(const DepthMap& d, const ConstraintSpec& spec) {
  std::vector<Violation> out;
  if (spec.is_unconstrained()) return out;

  if (const auto* force = std::get_if<ForceReplay>(&spec.kind())) {
    const DepthMap replay = depth_map_of(force->trees, d.grid_w() * 4, d.grid_h() * 4, force->ctu);
    for (int gy = 0; gy < d.grid_h(); ++gy)
      for (int gx = 0; gx < d.grid_w(); ++gx)
        if (d.at(gx, gy) != replay.at(gx, gy)) out.push_back({gx, gy, replay.at(gx, gy), d.at(gx, gy)});
    return out;
  }

  const DepthMap* up = spec.upper();
  const DepthMap* lo = spec.lower();
  if ((up && !up->same_grid(d)) || (lo && !lo->same_grid(d))) {
    fail(Errc::dimension_mismatch, "constraint map grid differs from the depth map");
  }
  for (int gy = 0; gy < d.grid_h(); ++gy) {
    for (int gx = 0; gx < d.grid_w(); ++gx) {
      const int v = d.at(gx, gy);
      if (up && v > up->at(gx, gy)) out.push_back({gx, gy, up->at(gx, gy), v});
      if (lo && v < lo->at(gx, gy)) out.push_back({gx, gy, lo->at(gx, gy), v});
    }
  }
  return out;
}

}  // namespace mrenc
