#include "metadata.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <iterator>
#include <optional>

#include "error.hpp"

namespace mrenc {

namespace {

constexpr std::uint8_t kMagic[4] = {'C', 'U', 'M', 'D'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t pos) {
  return static_cast<std::uint32_t>(b[pos]) | static_cast<std::uint32_t>(b[pos + 1]) << 8 |
         static_cast<std::uint32_t>(b[pos + 2]) << 16 | static_cast<std::uint32_t>(b[pos + 3]) << 24;
}

class BitWriter {
public:
  explicit BitWriter(std::vector<std::uint8_t>& out) : out_(out) {}
  void put3(unsigned code) {
    for (int b = 2; b >= 0; --b) {
      if (nbits_ % 8 == 0) out_.push_back(0);
      if ((code >> b) & 1u) out_.back() |= static_cast<std::uint8_t>(0x80u >> (nbits_ % 8));
      ++nbits_;
    }
  }

private:
  std::vector<std::uint8_t>& out_;
  std::size_t nbits_ = 0;
};

class BitReader {
public:
  explicit BitReader(std::span<const std::uint8_t> seg) : seg_(seg) {}
  std::optional<unsigned> get3() {
    if (pos_ + 3 > seg_.size() * 8) return std::nullopt;
    unsigned v = 0;
    for (int i = 0; i < 3; ++i, ++pos_) v = (v << 1) | ((seg_[pos_ / 8] >> (7 - pos_ % 8)) & 1u);
    return v;
  }
  std::size_t bits_read() const { return pos_; }

private:
  std::span<const std::uint8_t> seg_;
  std::size_t pos_ = 0;
};

void write_tree(const PartitionTree& t, BitWriter& w) {
  w.put3(static_cast<unsigned>(t.mode()));
  for (const auto& c : t.children()) write_tree(c, w);
}

PartitionTree read_tree(BitReader& r, std::size_t ctu_index) {
  const auto code = r.get3();
  if (!code) {
    fail(Errc::child_count_mismatch, "CTU " + std::to_string(ctu_index) + ": segment ended inside the tree");
  }
  if (*code >= kNumSplitModes) {
    fail(Errc::invalid_split_code, "CTU " + std::to_string(ctu_index) + ": invalid split code " + std::to_string(*code));
  }
  const auto mode = static_cast<SplitMode>(*code);
  std::vector<PartitionTree> kids;
  for (int i = 0; i < child_count(mode); ++i) kids.push_back(read_tree(r, ctu_index));
  return PartitionTree(mode, std::move(kids));
}

struct Header {
  std::uint8_t version = 0;
  int ctu = 0;
  Effort effort = Effort::thorough;
  int qp = 0;
  int frame_w = 0;
  int frame_h = 0;
  std::size_t ctu_count = 0;
  std::size_t payload_start = 0;
};

Header parse_header(std::span<const std::uint8_t> b) {
  if (b.size() < 4 || !std::equal(kMagic, kMagic + 4, b.begin())) fail(Errc::bad_magic, "not a CUMD metadata stream");
  if (b.size() < kMetadataHeaderSize) {
    fail(Errc::truncated, "header truncated at byte " + std::to_string(b.size()));
  }
  Header h;
  h.version = b[4];
  if (h.version != kMetadataVersion) fail(Errc::bad_version, "unsupported metadata version " + std::to_string(h.version));
  if (b[5] < 5 || b[5] > 7) fail(Errc::geometry, "CTU size log2 " + std::to_string(b[5]) + " outside [5, 7]");
  h.ctu = 1 << b[5];
  if (b[6] > 1) fail(Errc::malformed_input, "unknown effort flag " + std::to_string(b[6]));
  h.effort = static_cast<Effort>(b[6]);
  h.qp = b[7];
  h.frame_w = static_cast<int>(get_u32(b, 8));
  h.frame_h = static_cast<int>(get_u32(b, 12));
  h.ctu_count = get_u32(b, 16);
  const FrameGeometry geo{h.frame_w, h.frame_h, h.ctu};
  geo.validate();
  if (h.ctu_count == 0 || h.ctu_count % static_cast<std::size_t>(geo.ctu_count()) != 0) {
    fail(Errc::geometry, "CTU count " + std::to_string(h.ctu_count) + " is not a whole number of " +
                             std::to_string(h.frame_w) + "x" + std::to_string(h.frame_h) + " frames");
  }
  h.payload_start = kMetadataHeaderSize + 4 * h.ctu_count;
  if (b.size() < h.payload_start) fail(Errc::truncated, "offset table truncated at byte " + std::to_string(b.size()));
  return h;
}

// Payload segment of CTU `index`, validated against its neighbours in the offset table.
std::span<const std::uint8_t> segment(std::span<const std::uint8_t> b, const Header& h, std::size_t index) {
  const std::size_t payload_size = b.size() - h.payload_start;
  const std::uint32_t begin = get_u32(b, kMetadataHeaderSize + 4 * index);
  const std::size_t end =
      index + 1 < h.ctu_count ? get_u32(b, kMetadataHeaderSize + 4 * (index + 1)) : payload_size;
  if (begin >= payload_size || end > payload_size) {
    fail(Errc::truncated, "offset of CTU " + std::to_string(index) + " points past the end of the payload");
  }
  if (end <= begin) fail(Errc::malformed_input, "offset table is not strictly increasing at CTU " + std::to_string(index));
  return b.subspan(h.payload_start + begin, end - begin);
}

PartitionTree decode_segment(std::span<const std::uint8_t> seg, const Header& h, std::size_t index) {
  BitReader r(seg);
  PartitionTree tree = read_tree(r, index);
  if ((r.bits_read() + 7) / 8 != seg.size()) {
    fail(Errc::child_count_mismatch, "CTU " + std::to_string(index) + ": tree ends before its segment does");
  }
  const FrameGeometry geo{h.frame_w, h.frame_h, h.ctu};
  const CuRegion root = geo.ctu_region(static_cast<int>(index % geo.ctu_count()));
  for_each_leaf(tree, root, [](const CuRegion&) {});  // throws on illegal geometry
  return tree;
}

}  // namespace

MetadataFile MetadataFile::make(int frame_w, int frame_h, int ctu, int qp, Effort effort,
                                std::vector<PartitionTree> trees) {
  MetadataFile m;
  m.frame_w = frame_w;
  m.frame_h = frame_h;
  m.ctu = ctu;
  m.qp = qp;
  m.effort = effort;
  std::uint32_t off = 0;
  for (const auto& t : trees) {
    m.ctu_offsets.push_back(off);
    off += static_cast<std::uint32_t>(tree_payload_bytes(t));
  }
  m.trees = std::move(trees);
  return m;
}

int MetadataFile::frame_count() const { return static_cast<int>(trees.size()) / geometry().ctu_count(); }

std::span<const PartitionTree> MetadataFile::frame_trees(int frame) const {
  const auto per = static_cast<std::size_t>(geometry().ctu_count());
  if (frame < 0 || static_cast<std::size_t>(frame + 1) * per > trees.size()) {
    fail(Errc::out_of_range, "frame " + std::to_string(frame) + " not in metadata");
  }
  return std::span<const PartitionTree>(trees).subspan(static_cast<std::size_t>(frame) * per, per);
}

DepthMap MetadataFile::depth_map(int frame) const { return depth_map_of(frame_trees(frame), frame_w, frame_h, ctu); }

std::size_t tree_payload_bytes(const PartitionTree& tree) { return (3 * tree.node_count() + 7) / 8; }

std::vector<std::uint8_t> serialize(const MetadataFile& m) {
  if (m.trees.empty()) fail(Errc::invalid_argument, "metadata needs at least one CTU tree");
  if (m.version != kMetadataVersion) fail(Errc::bad_version, "cannot write metadata version " + std::to_string(m.version));
  const FrameGeometry geo = m.geometry();
  geo.validate();
  if (m.trees.size() % static_cast<std::size_t>(geo.ctu_count()) != 0) {
    fail(Errc::geometry, std::to_string(m.trees.size()) + " trees is not a whole number of frames");
  }
  if (m.qp < 0 || m.qp > 255) fail(Errc::invalid_argument, "qp does not fit in a byte");
  for (std::size_t i = 0; i < m.trees.size(); ++i) {
    for_each_leaf(m.trees[i], geo.ctu_region(static_cast<int>(i % geo.ctu_count())), [](const CuRegion&) {});
  }

  std::vector<std::uint8_t> out(kMagic, kMagic + 4);
  out.push_back(m.version);
  out.push_back(static_cast<std::uint8_t>(std::countr_zero(static_cast<unsigned>(m.ctu))));
  out.push_back(static_cast<std::uint8_t>(m.effort));
  out.push_back(static_cast<std::uint8_t>(m.qp));
  put_u32(out, static_cast<std::uint32_t>(m.frame_w));
  put_u32(out, static_cast<std::uint32_t>(m.frame_h));
  put_u32(out, static_cast<std::uint32_t>(m.trees.size()));
  const std::size_t table = out.size();
  out.resize(table + 4 * m.trees.size());
  const std::size_t payload_start = out.size();
  for (std::size_t i = 0; i < m.trees.size(); ++i) {
    const auto off = static_cast<std::uint32_t>(out.size() - payload_start);
    for (int k = 0; k < 4; ++k) out[table + 4 * i + k] = static_cast<std::uint8_t>(off >> (8 * k));
    BitWriter w(out);
    write_tree(m.trees[i], w);
  }
  return out;
}

MetadataFile deserialize(std::span<const std::uint8_t> bytes) {
  const Header h = parse_header(bytes);
  MetadataFile m;
  m.version = h.version;
  m.frame_w = h.frame_w;
  m.frame_h = h.frame_h;
  m.ctu = h.ctu;
  m.qp = h.qp;
  m.effort = h.effort;
  for (std::size_t i = 0; i < h.ctu_count; ++i) {
    m.ctu_offsets.push_back(get_u32(bytes, kMetadataHeaderSize + 4 * i));
    m.trees.push_back(decode_segment(segment(bytes, h, i), h, i));
  }
  return m;
}

PartitionTree tree_at(std::span<const std::uint8_t> bytes, std::size_t index) {
  const Header h = parse_header(bytes);
  if (index >= h.ctu_count) {
    fail(Errc::out_of_range, "CTU index " + std::to_string(index) + " >= CTU count " + std::to_string(h.ctu_count));
  }
  return decode_segment(segment(bytes, h, index), h, index);
}

void write_metadata(const MetadataFile& meta, const std::filesystem::path& path) {
  const auto bytes = serialize(meta);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::io, "cannot create '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(Errc::io, "write error on '" + path.string() + "'");
}

MetadataFile read_metadata(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io, "cannot open '" + path.string() + "'");
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

}  // namespace mrenc
