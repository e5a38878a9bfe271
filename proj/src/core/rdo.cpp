#include "rdo.hpp"

#include <algorithm>
#include <optional>

#include "error.hpp"

namespace mrenc {

std::vector<SplitMode> admissible_modes(const CuRegion& region, const ConstraintSpec& spec, const SearchOptions& opt) {
  const DepthMap* upper = spec.upper();
  const DepthMap* lower = spec.lower();
  std::vector<SplitMode> out;
  for (const SplitMode m : legal_splits(region, opt.effort, opt.max_total_depth)) {
    if (m == SplitMode::NS) {
      if (lower && lower->max_over(region) > region.depth) continue;
    } else if (upper && upper->min_over(region) < region.depth + 1) {
      continue;
    }
    out.push_back(m);
  }
  return out;
}

int split_signal_bits(std::size_t candidates) {
  int bits = 0;
  while ((std::size_t{1} << bits) < candidates) ++bits;
  return bits;
}

namespace {

// Saves / restores the reconstruction samples under one region.
class RegionSnapshot {
public:
  RegionSnapshot(const Plane& p, const CuRegion& r) : r_(r), data_(static_cast<std::size_t>(r.w) * r.h) { save(p); }

  void save(const Plane& p) {
    for (int y = 0; y < r_.h; ++y) std::copy_n(p.row(r_.y + y) + r_.x, r_.w, data_.begin() + static_cast<std::ptrdiff_t>(y) * r_.w);
  }
  void restore(Plane& p) const {
    for (int y = 0; y < r_.h; ++y) std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(y) * r_.w, r_.w, p.row(r_.y + y) + r_.x);
  }

private:
  CuRegion r_;
  std::vector<std::uint8_t> data_;
};

struct Node {
  PartitionTree tree;
  std::int64_t d = 0;
  std::int64_t r = 0;
  std::int64_t split_bits = 0;
};

class Searcher {
public:
  Searcher(const Plane& src, const QpParams& qp, const ConstraintSpec& spec, const SearchOptions& opt, Plane& recon)
      : src_(src), qp_(qp), spec_(spec), opt_(opt), recon_(recon) {}

  std::int64_t work() const { return work_; }
  const CuRegion& infeasible_region() const { return infeasible_; }

  std::optional<Node> search(const CuRegion& region) {
    const auto modes = admissible_modes(region, spec_, opt_);
    if (modes.empty()) {
      infeasible_ = region;
      return std::nullopt;
    }
    const std::int64_t sig = split_signal_bits(modes.size());

    const RegionSnapshot entry(recon_, region);
    std::optional<RegionSnapshot> best_recon;
    std::optional<Node> best;
    double best_j = 0.0;

    for (std::size_t c = 0; c < modes.size(); ++c) {
      if (c > 0) entry.restore(recon_);
      std::optional<Node> cand = evaluate(region, modes[c]);
      if (!cand) continue;
      cand->r += sig;
      cand->split_bits += sig;
      const double j = RdCost::of(cand->d, cand->r, qp_.lambda).j;
      if (!best || j < best_j) {
        best_j = j;
        best = std::move(cand);
        if (best_recon) {
          best_recon->save(recon_);
        } else {
          best_recon.emplace(recon_, region);
        }
      }
    }
    if (best) best_recon->restore(recon_);
    return best;
  }

private:
  std::optional<Node> evaluate(const CuRegion& region, SplitMode mode) {
    if (mode == SplitMode::NS) {
      const LeafCode leaf = code_leaf(src_, region, qp_, recon_);
      work_ += 3;
      return Node{PartitionTree::leaf(), leaf.distortion, leaf.bits(), 0};
    }
    Node node;
    std::vector<PartitionTree> kids;
    for (const CuRegion& child : child_regions(region, mode)) {
      auto sub = search(child);
      if (!sub) return std::nullopt;
      node.d += sub->d;
      node.r += sub->r;
      node.split_bits += sub->split_bits;
      kids.push_back(std::move(sub->tree));
    }
    node.tree = PartitionTree(mode, std::move(kids));
    return node;
  }

  const Plane& src_;
  const QpParams& qp_;
  const ConstraintSpec& spec_;
  const SearchOptions& opt_;
  Plane& recon_;
  std::int64_t work_ = 0;
  CuRegion infeasible_{};
};

}  // namespace

SearchResult search_ctu(const Plane& source, const CuRegion& ctu_region, const QpParams& qp,
                        const ConstraintSpec& spec, const SearchOptions& opt, Plane& recon) {
  if (spec.is_force()) fail(Errc::invalid_argument, "force-replay constraints are applied with replay_ctu");
  for (const DepthMap* m : {spec.upper(), spec.lower()}) {
    if (m && ((ctu_region.x + ctu_region.w) / 4 > m->grid_w() || (ctu_region.y + ctu_region.h) / 4 > m->grid_h())) {
      fail(Errc::dimension_mismatch, "constraint map does not cover CTU " + to_string(ctu_region));
    }
  }
  Searcher s(source, qp, spec, opt, recon);
  auto node = s.search(ctu_region);
  if (!node) {
    fail(Errc::infeasible_constraint,
         "no admissible partition for region " + to_string(s.infeasible_region()) + " under " + std::string(spec.name()));
  }
  return {std::move(node->tree), RdCost::of(node->d, node->r, qp.lambda), s.work(), node->split_bits};
}

SearchResult replay_ctu(const Plane& source, const CuRegion& ctu_region, const QpParams& qp,
                        const PartitionTree& tree, Plane& recon) {
  std::int64_t d = 0;
  std::int64_t r = 0;
  std::int64_t work = 0;
  for_each_leaf(tree, ctu_region, [&](const CuRegion& leaf) {
    const LeafCode code = code_leaf(source, leaf, qp, recon);
    d += code.distortion;
    r += code.bits();
    work += 3;
  });
  return {tree, RdCost::of(d, r, qp.lambda), work, 0};
}

FrameResult encode_frame(const Plane& source, const QpParams& qp, const ConstraintSpec& spec, const EncodeParams& params) {
  const FrameGeometry geo{source.width(), source.height(), params.ctu};
  geo.validate();
  const auto* force = std::get_if<ForceReplay>(&spec.kind());
  if (force && (static_cast<int>(force->trees.size()) != geo.ctu_count() || force->ctu != params.ctu)) {
    fail(Errc::dimension_mismatch, "force-replay tree list does not match the frame's CTU grid");
  }

  FrameResult out;
  out.recon = Plane(source.width(), source.height());
  out.depth_map = DepthMap::for_frame(source.width(), source.height());
  for (int i = 0; i < geo.ctu_count(); ++i) {
    const CuRegion ctu = geo.ctu_region(i);
    SearchResult res = force ? replay_ctu(source, ctu, qp, force->trees[i], out.recon)
                             : search_ctu(source, ctu, qp, spec, params.search, out.recon);
    out.bits += res.cost.r;
    out.distortion += res.cost.d;
    out.split_bits += res.split_bits;
    out.work_units += res.work_units;
    paint_depths(res.tree, ctu, out.depth_map);
    out.trees.push_back(std::move(res.tree));
  }
  return out;
}

}  // namespace mrenc
