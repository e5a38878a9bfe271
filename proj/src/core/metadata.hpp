#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "partition.hpp"

namespace mrenc {

// .cud layout (all integers little-endian):
//
//   "CUMD"            4 bytes
//   version           u8  (= 1)
//   ctu_size_log2     u8
//   effort            u8  (0 thorough, 1 fast)
//   qp                u8
//   frame_w           u32
//   frame_h           u32
//   ctu_count         u32
//   offsets           ctu_count x u32, relative to payload start
//   payload           per CTU: preorder 3-bit split codes, MSB first,
//                     zero-padded to a byte boundary
//
// A file holds the CTUs of one or more frames; CTU k belongs to frame
// k / ctus_per_frame.
inline constexpr std::uint8_t kMetadataVersion = 1;
inline constexpr std::size_t kMetadataHeaderSize = 20;

struct MetadataFile {
  std::uint8_t version = kMetadataVersion;
  int frame_w = 0;
  int frame_h = 0;
  int ctu = kDefaultCtu;
  int qp = 0;
  Effort effort = Effort::thorough;
  std::vector<std::uint32_t> ctu_offsets;
  std::vector<PartitionTree> trees;

  /// Builds a file and computes its offset table.
  static MetadataFile make(int frame_w, int frame_h, int ctu, int qp, Effort effort, std::vector<PartitionTree> trees);

  FrameGeometry geometry() const { return {frame_w, frame_h, ctu}; }
  int frame_count() const;
  std::span<const PartitionTree> frame_trees(int frame) const;
  DepthMap depth_map(int frame) const;

  bool operator==(const MetadataFile&) const = default;
};

/// Payload bytes one tree occupies: ceil(3 * nodes / 8).
std::size_t tree_payload_bytes(const PartitionTree& tree);

std::vector<std::uint8_t> serialize(const MetadataFile& meta);
MetadataFile deserialize(std::span<const std::uint8_t> bytes);

/// Decodes only CTU `index` through the offset table.
PartitionTree tree_at(std::span<const std::uint8_t> bytes, std::size_t index);

void write_metadata(const MetadataFile& meta, const std::filesystem::path& path);
MetadataFile read_metadata(const std::filesystem::path& path);

}  // namespace mrenc
