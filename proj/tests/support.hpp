#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "frame_io.hpp"
#include "partition.hpp"

namespace testutil {

inline mrenc::Plane random_plane(std::mt19937& rng, int w, int h, int lo = 0, int hi = 255) {
  std::uniform_int_distribution<int> d(lo, hi);
  mrenc::Plane p(w, h);
  for (auto& s : p.samples()) s = static_cast<std::uint8_t>(d(rng));
  return p;
}

/// Smooth content with a few edges; gives the search something to split on.
inline mrenc::Plane structured_plane(std::mt19937& rng, int w, int h) {
  std::uniform_int_distribution<int> d(0, 255);
  std::uniform_int_distribution<int> small(-6, 6);
  const int a = d(rng), b = d(rng), c = d(rng);
  const int ex = std::uniform_int_distribution<int>(0, w - 1)(rng);
  const int ey = std::uniform_int_distribution<int>(0, h - 1)(rng);
  mrenc::Plane p(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      int v = x < ex ? a : b;
      if (y > ey) v = (v + c) / 2;
      v += (x * 3 + y * 5) % 17 - 8 + small(rng);
      p.at(x, y) = static_cast<std::uint8_t>(std::clamp(v, 0, 255));
    }
  }
  return p;
}

inline mrenc::PartitionTree random_tree(std::mt19937& rng, const mrenc::CuRegion& r, mrenc::Effort effort,
                                        int max_depth, double split_p) {
  const auto modes = mrenc::legal_splits(r, effort, max_depth);
  if (modes.size() == 1 || std::uniform_real_distribution<double>(0, 1)(rng) >= split_p) return {};
  const auto m = modes[std::uniform_int_distribution<std::size_t>(1, modes.size() - 1)(rng)];
  std::vector<mrenc::PartitionTree> kids;
  for (const auto& c : mrenc::child_regions(r, m)) kids.push_back(random_tree(rng, c, effort, max_depth, split_p * 0.8));
  return mrenc::PartitionTree(m, std::move(kids));
}

/// Every legal tree over `r` (NS first), for exhaustive oracles.
inline std::vector<mrenc::PartitionTree> all_trees(const mrenc::CuRegion& r, mrenc::Effort effort, int max_depth) {
  std::vector<mrenc::PartitionTree> out;
  for (const auto m : mrenc::legal_splits(r, effort, max_depth)) {
    if (m == mrenc::SplitMode::NS) {
      out.emplace_back();
      continue;
    }
    const auto kids = mrenc::child_regions(r, m);
    std::vector<std::vector<mrenc::PartitionTree>> options;
    for (const auto& k : kids) options.push_back(all_trees(k, effort, max_depth));
    std::vector<std::size_t> idx(kids.size(), 0);
    for (;;) {
      std::vector<mrenc::PartitionTree> chosen;
      for (std::size_t i = 0; i < kids.size(); ++i) chosen.push_back(options[i][idx[i]]);
      out.emplace_back(m, std::move(chosen));
      std::size_t i = 0;
      while (i < idx.size() && ++idx[i] == options[i].size()) idx[i++] = 0;
      if (i == idx.size()) break;
    }
  }
  return out;
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path = std::filesystem::temp_directory_path() / ("mrenc_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::filesystem::path operator/(const std::string& name) const { return path / name; }
};

}  // namespace testutil

#include "codec_core.hpp"

namespace testutil {

struct TreeCost {
  std::int64_t d = 0;
  std::int64_t r = 0;
  double j(double lambda) const { return static_cast<double>(d) + lambda * static_cast<double>(r); }
};

/// Codes `tree` leaf by leaf on a copy of `recon`, charging ceil(log2(k))
/// signalling bits per node where k is the number of legal modes there.
inline TreeCost unconstrained_tree_cost(const mrenc::Plane& src, const mrenc::CuRegion& ctu, int qp,
                                        const mrenc::PartitionTree& tree, mrenc::Plane recon, mrenc::Effort effort,
                                        int max_depth) {
  const auto q = mrenc::QpParams::from_qp(qp);
  TreeCost c;
  auto walk = [&](auto&& self, const mrenc::PartitionTree& t, const mrenc::CuRegion& r) -> void {
    const std::size_t k = mrenc::legal_splits(r, effort, max_depth).size();
    std::int64_t sig = 0;
    while ((std::size_t{1} << sig) < k) ++sig;
    c.r += sig;
    if (t.is_leaf()) {
      const auto leaf = mrenc::code_leaf(src, r, q, recon);
      c.d += leaf.distortion;
      c.r += leaf.bits();
      return;
    }
    const auto kids = mrenc::child_regions(r, t.mode());
    for (std::size_t i = 0; i < kids.size(); ++i) self(self, t.children()[i], kids[i]);
  };
  walk(walk, tree, ctu);
  return c;
}

}  // namespace testutil
