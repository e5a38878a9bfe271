#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace mrenc {

// Codes are serialized in .cud metadata; never renumber.
enum class SplitMode : std::uint8_t { NS = 0, QT = 1, HBT = 2, VBT = 3, HTT = 4, VTT = 5 };

inline constexpr int kNumSplitModes = 6;
inline constexpr SplitMode kAllSplitModes[kNumSplitModes] = {SplitMode::NS,  SplitMode::QT,  SplitMode::HBT,
                                                             SplitMode::VBT, SplitMode::HTT, SplitMode::VTT};

std::string_view split_mode_name(SplitMode m);
int child_count(SplitMode m);

enum class Effort : std::uint8_t { thorough = 0, fast = 1 };

std::string_view effort_name(Effort e);

inline constexpr int kDefaultCtu = 64;
inline constexpr int kDefaultMaxDepth = 6;
inline constexpr int kMinCuSize = 4;

struct CuRegion {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;
  int depth = 0;

  bool operator==(const CuRegion&) const = default;
};

std::string to_string(const CuRegion& r);

class PartitionTree {
public:
  PartitionTree() = default;  // NS leaf
  /// Throws Errc::child_count_mismatch if the number of children does not fit `mode`.
  PartitionTree(SplitMode mode, std::vector<PartitionTree> children);

  static PartitionTree leaf() { return {}; }

  SplitMode mode() const noexcept { return mode_; }
  const std::vector<PartitionTree>& children() const noexcept { return children_; }
  bool is_leaf() const noexcept { return mode_ == SplitMode::NS; }

  std::size_t node_count() const;
  std::size_t leaf_count() const;
  int max_depth() const;

  /// Preorder list of split modes.
  std::vector<SplitMode> preorder() const;

  bool operator==(const PartitionTree&) const = default;

private:
  SplitMode mode_ = SplitMode::NS;
  std::vector<PartitionTree> children_;
};

/// Children of `region` under `mode` in coding order. Throws Errc::geometry if
/// the split would produce children below 4 samples or off the 4-sample grid.
std::vector<CuRegion> child_regions(const CuRegion& region, SplitMode mode);

/// Split modes permitted at `region`; NS is always first.
std::vector<SplitMode> legal_splits(const CuRegion& region, Effort effort, int max_total_depth);

/// Walks the leaves of `tree` laid over `root` in coding order.
template <typename Fn>
void for_each_leaf(const PartitionTree& tree, const CuRegion& root, Fn&& fn) {
  if (tree.is_leaf()) {
    fn(root);
    return;
  }
  const auto kids = child_regions(root, tree.mode());
  for (std::size_t i = 0; i < kids.size(); ++i) for_each_leaf(tree.children()[i], kids[i], fn);
}

/// Leaf depth per 4x4 position.
class DepthMap {
public:
  DepthMap() = default;
  DepthMap(int grid_w, int grid_h, std::uint8_t fill = 0);
  static DepthMap for_frame(int frame_w, int frame_h, std::uint8_t fill = 0);

  int grid_w() const noexcept { return grid_w_; }
  int grid_h() const noexcept { return grid_h_; }
  std::uint8_t at(int gx, int gy) const { return depths_[static_cast<std::size_t>(gy) * grid_w_ + gx]; }
  std::uint8_t& at(int gx, int gy) { return depths_[static_cast<std::size_t>(gy) * grid_w_ + gx]; }
  std::span<const std::uint8_t> depths() const noexcept { return depths_; }

  bool same_grid(const DepthMap& o) const { return grid_w_ == o.grid_w_ && grid_h_ == o.grid_h_; }
  double mean() const;
  int max() const;

  /// Smallest / largest depth over the 4x4 positions covered by a pixel region.
  int min_over(const CuRegion& r) const;
  int max_over(const CuRegion& r) const;

  bool operator==(const DepthMap&) const = default;

private:
  int grid_w_ = 0;
  int grid_h_ = 0;
  std::vector<std::uint8_t> depths_;
};

/// Frame geometry shared by trees, depth maps and metadata.
struct FrameGeometry {
  int frame_w = 0;
  int frame_h = 0;
  int ctu = kDefaultCtu;

  int ctus_x() const { return frame_w / ctu; }
  int ctus_y() const { return frame_h / ctu; }
  int ctu_count() const { return ctus_x() * ctus_y(); }
  CuRegion ctu_region(int index) const;

  /// Throws Errc::geometry unless ctu is 32/64/128 and the frame is CTU-aligned.
  void validate() const;
};

/// Paints the leaf depths of one CTU tree into `map`.
void paint_depths(const PartitionTree& tree, const CuRegion& ctu_region, DepthMap& map);

DepthMap depth_map_of(std::span<const PartitionTree> trees, int frame_w, int frame_h, int ctu);

struct Unconstrained {};
struct UpperBound {
  DepthMap upper;
};
struct LowerBound {
  DepthMap lower;
};
struct DoubleBound {
  DepthMap lower;
  DepthMap upper;
};
struct ForceReplay {
  std::vector<PartitionTree> trees;
  int ctu = kDefaultCtu;
};

/// Bound regime applied to a dependent encode.
class ConstraintSpec {
public:
  using Kind = std::variant<Unconstrained, UpperBound, LowerBound, DoubleBound, ForceReplay>;

  ConstraintSpec() = default;

  static ConstraintSpec unconstrained() { return {}; }
  static ConstraintSpec upper_bound(DepthMap upper);
  static ConstraintSpec lower_bound(DepthMap lower);
  /// Throws Errc::invalid_argument unless lower <= upper everywhere.
  static ConstraintSpec double_bound(DepthMap lower, DepthMap upper);
  static ConstraintSpec force_replay(std::vector<PartitionTree> trees, int ctu);

  const Kind& kind() const noexcept { return kind_; }
  bool is_unconstrained() const { return std::holds_alternative<Unconstrained>(kind_); }
  bool is_force() const { return std::holds_alternative<ForceReplay>(kind_); }

  const DepthMap* upper() const;
  const DepthMap* lower() const;

  std::string_view name() const;

private:
  explicit ConstraintSpec(Kind k) : kind_(std::move(k)) {}
  Kind kind_;
};

struct Violation {
  int gx = 0;
  int gy = 0;
  int expected = 0;  // the bound that was crossed
  int actual = 0;

  bool operator==(const Violation&) const = default;
};

/// Every 4x4 position where `depths` breaks `spec`; empty when satisfied.
std::vector<Violation> check_constraint(const DepthMap& depths, const ConstraintSpec& spec);

}  // namespace mrenc
