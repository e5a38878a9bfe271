#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

#include "frame_io.hpp"

namespace mrenc {

/// xoshiro256** seeded through splitmix64.
class Xoshiro256 {
public:
  explicit Xoshiro256(std::uint64_t seed);
  std::uint64_t next();
  /// Uniform in [0, 1).
  double uniform();
  /// Uniform integer in [lo, hi].
  int range(int lo, int hi);

private:
  std::array<std::uint64_t, 4> s_{};
};

enum class SynthKind { flat, gradient, checker, noise, mixed };

inline constexpr SynthKind kAllSynthKinds[] = {SynthKind::flat, SynthKind::gradient, SynthKind::checker,
                                               SynthKind::noise, SynthKind::mixed};

std::string_view synth_kind_name(SynthKind k);
std::optional<SynthKind> parse_synth_kind(std::string_view name);

/// Deterministic synthetic test content; frames drift slowly so consecutive
/// frames differ.
Sequence generate_sequence(SynthKind kind, int width, int height, int frames, std::uint64_t seed);

}  // namespace mrenc
