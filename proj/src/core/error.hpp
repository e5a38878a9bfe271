#pragma once

#include <stdexcept>
#include <string>

namespace mrenc {

// Error categories raised by the core. The C API and CLI map them onto
// stable status / exit codes (see status_of).
enum class Errc {
  invalid_argument,
  io,
  malformed_input,
  truncated,
  unsupported,
  geometry,
  dimension_mismatch,
  out_of_range,
  bad_magic,
  bad_version,
  invalid_split_code,
  child_count_mismatch,
  infeasible_constraint,
  too_few_points,
  no_overlap,
  non_monotone,
};

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::io: return "io";
    case Errc::malformed_input: return "malformed_input";
    case Errc::truncated: return "truncated";
    case Errc::unsupported: return "unsupported";
    case Errc::geometry: return "geometry";
    case Errc::dimension_mismatch: return "dimension_mismatch";
    case Errc::out_of_range: return "out_of_range";
    case Errc::bad_magic: return "bad_magic";
    case Errc::bad_version: return "bad_version";
    case Errc::invalid_split_code: return "invalid_split_code";
    case Errc::child_count_mismatch: return "child_count_mismatch";
    case Errc::infeasible_constraint: return "infeasible_constraint";
    case Errc::too_few_points: return "too_few_points";
    case Errc::no_overlap: return "no_overlap";
    case Errc::non_monotone: return "non_monotone";
  }
  return "unknown";
}

}  // namespace mrenc
