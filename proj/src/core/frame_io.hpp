#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mrenc {

inline constexpr int kMinPlaneDim = 16;

/// 8-bit luma raster, row-major.
class Plane {
public:
  Plane() = default;
  /// Zero-filled plane. Throws Errc::geometry if either side is below 16.
  Plane(int width, int height);
  Plane(int width, int height, std::vector<std::uint8_t> samples);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return samples_.empty(); }

  std::uint8_t at(int x, int y) const { return samples_[static_cast<std::size_t>(y) * width_ + x]; }
  std::uint8_t& at(int x, int y) { return samples_[static_cast<std::size_t>(y) * width_ + x]; }
  const std::uint8_t* row(int y) const { return samples_.data() + static_cast<std::size_t>(y) * width_; }
  std::uint8_t* row(int y) { return samples_.data() + static_cast<std::size_t>(y) * width_; }

  std::span<const std::uint8_t> samples() const noexcept { return samples_; }
  std::span<std::uint8_t> samples() noexcept { return samples_; }

  bool operator==(const Plane&) const = default;

private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> samples_;
};

struct Sequence {
  std::vector<Plane> frames;
  double frame_rate = 30.0;  // metadata only

  int width() const { return frames.empty() ? 0 : frames.front().width(); }
  int height() const { return frames.empty() ? 0 : frames.front().height(); }

  /// Throws unless there is at least one frame and all frames agree in size.
  void validate() const;
};

struct Dims {
  int width = 0;
  int height = 0;
};

enum class InputFormat { y4m, raw_yuv, pgm_glob };

// Layout of a raw .yuv payload.
enum class RawLayout { yuv420, luma };

enum class PlaneFormat { pgm, raw };

enum class SequenceFormat { y4m, raw_yuv420, raw_luma };

/// Loads the luma planes of a sequence. Chroma is parsed and discarded.
///
/// `pgm_glob` accepts either a single file or a pattern whose final path
/// component may contain `*` / `?`; matching files are read in lexicographic
/// order, one frame each. Raw input needs `dims`.
Sequence load_sequence(const std::filesystem::path& path, InputFormat format,
                       std::optional<Dims> dims = std::nullopt,
                       RawLayout layout = RawLayout::yuv420);

void write_plane(const Plane& plane, const std::filesystem::path& path, PlaneFormat format);

/// Writes every frame. 4:2:0 outputs carry neutral (128) chroma.
void write_sequence(const Sequence& seq, const std::filesystem::path& path, SequenceFormat format);

/// Guesses the input format from the file extension (.y4m, .yuv, .pgm / glob).
std::optional<InputFormat> format_from_extension(const std::filesystem::path& path);

}  // namespace mrenc
