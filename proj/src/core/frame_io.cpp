#include "frame_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>
#include <sstream>

#include "error.hpp"

namespace mrenc {

namespace fs = std::filesystem;

Plane::Plane(int width, int height)
    : Plane(width, height, std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(width, 0)) *
                                                         static_cast<std::size_t>(std::max(height, 0)),
                                                     0)) {}

Plane::Plane(int width, int height, std::vector<std::uint8_t> samples)
    : width_(width), height_(height), samples_(std::move(samples)) {
  if (width < kMinPlaneDim || height < kMinPlaneDim) {
    fail(Errc::geometry, "plane " + std::to_string(width) + "x" + std::to_string(height) +
                             " is smaller than the 16x16 minimum");
  }
  if (samples_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    fail(Errc::geometry, "plane sample count " + std::to_string(samples_.size()) + " does not match " +
                             std::to_string(width) + "x" + std::to_string(height));
  }
}

void Sequence::validate() const {
  if (frames.empty()) fail(Errc::malformed_input, "sequence has no frames");
  for (const auto& f : frames) {
    if (f.width() != frames.front().width() || f.height() != frames.front().height()) {
      fail(Errc::dimension_mismatch, "sequence frames differ in size");
    }
  }
}

namespace {

std::vector<std::uint8_t> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io, "cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) fail(Errc::io, "read error on '" + path.string() + "'");
  return bytes;
}

void write_file(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::io, "cannot create '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(Errc::io, "write error on '" + path.string() + "'");
}

std::size_t chroma_bytes_420(int w, int h) {
  return 2 * static_cast<std::size_t>((w + 1) / 2) * static_cast<std::size_t>((h + 1) / 2);
}

int parse_int(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::logic_error&) {
    fail(Errc::malformed_input, std::string("bad ") + what + " '" + s + "'");
  }
}

// ---- Y4M ----

struct Y4mHeader {
  int width = 0;
  int height = 0;
  double fps = 30.0;
  std::size_t chroma = 0;
};

Y4mHeader parse_y4m_header(const std::string& line) {
  std::istringstream ss(line);
  std::string tok;
  ss >> tok;
  if (tok != "YUV4MPEG2") fail(Errc::malformed_input, "missing YUV4MPEG2 signature");
  Y4mHeader h;
  std::string colorspace = "420jpeg";
  while (ss >> tok) {
    const char tag = tok[0];
    const std::string val = tok.substr(1);
    switch (tag) {
      case 'W': h.width = parse_int(val, "width"); break;
      case 'H': h.height = parse_int(val, "height"); break;
      case 'F': {
        auto colon = val.find(':');
        if (colon == std::string::npos) fail(Errc::malformed_input, "bad frame rate '" + val + "'");
        int num = parse_int(val.substr(0, colon), "frame rate");
        int den = parse_int(val.substr(colon + 1), "frame rate");
        if (num > 0 && den > 0) h.fps = static_cast<double>(num) / den;
        break;
      }
      case 'C': colorspace = val; break;
      case 'X':
        if (val.rfind("YSCSS=", 0) == 0 && val.find("P1") != std::string::npos) {
          fail(Errc::unsupported, "unsupported sample format '" + val + "' (8-bit only)");
        }
        break;
      default: break;  // interlace, aspect: ignored
    }
  }
  if (h.width <= 0 || h.height <= 0) fail(Errc::malformed_input, "y4m header lacks W/H");
  const auto bitdepth = colorspace.find('p');
  if (bitdepth != std::string::npos && bitdepth + 1 < colorspace.size() && std::isdigit(colorspace[bitdepth + 1])) {
    fail(Errc::unsupported, "unsupported colorspace '" + colorspace + "' (8-bit only)");
  }
  if (colorspace.rfind("420", 0) == 0) {
    h.chroma = chroma_bytes_420(h.width, h.height);
  } else if (colorspace == "422") {
    h.chroma = 2 * static_cast<std::size_t>((h.width + 1) / 2) * h.height;
  } else if (colorspace == "444") {
    h.chroma = 2 * static_cast<std::size_t>(h.width) * h.height;
  } else if (colorspace == "mono") {
    h.chroma = 0;
  } else {
    fail(Errc::unsupported, "unsupported colorspace '" + colorspace + "'");
  }
  return h;
}

Sequence load_y4m(const fs::path& path) {
  const auto bytes = read_file(path);
  auto nl = std::find(bytes.begin(), bytes.end(), '\n');
  if (nl == bytes.end()) fail(Errc::malformed_input, "y4m header is not terminated");
  const Y4mHeader hdr = parse_y4m_header(std::string(bytes.begin(), nl));
  const std::size_t luma = static_cast<std::size_t>(hdr.width) * hdr.height;

  Sequence seq;
  seq.frame_rate = hdr.fps;
  std::size_t pos = static_cast<std::size_t>(nl - bytes.begin()) + 1;
  while (pos < bytes.size()) {
    const std::size_t frame_start = pos;
    if (bytes.size() - pos < 5 || std::string(bytes.begin() + pos, bytes.begin() + pos + 5) != "FRAME") {
      fail(Errc::malformed_input, "expected FRAME marker at byte offset " + std::to_string(pos));
    }
    auto fnl = std::find(bytes.begin() + pos, bytes.end(), '\n');
    if (fnl == bytes.end()) {
      fail(Errc::truncated, "truncated frame header at byte offset " + std::to_string(frame_start));
    }
    pos = static_cast<std::size_t>(fnl - bytes.begin()) + 1;
    if (bytes.size() - pos < luma + hdr.chroma) {
      fail(Errc::truncated, "truncated payload: partial frame at byte offset " + std::to_string(frame_start));
    }
    std::vector<std::uint8_t> y(bytes.begin() + pos, bytes.begin() + pos + luma);
    seq.frames.emplace_back(hdr.width, hdr.height, std::move(y));
    pos += luma + hdr.chroma;
  }
  if (seq.frames.empty()) fail(Errc::malformed_input, "y4m file has no frames");
  return seq;
}

// ---- raw ----

Sequence load_raw(const fs::path& path, std::optional<Dims> dims, RawLayout layout) {
  if (!dims) fail(Errc::invalid_argument, "raw input requires explicit dimensions");
  const int w = dims->width;
  const int h = dims->height;
  if (w <= 0 || h <= 0) fail(Errc::invalid_argument, "raw dimensions must be positive");
  const auto bytes = read_file(path);
  const std::size_t luma = static_cast<std::size_t>(w) * h;
  const std::size_t frame_bytes = luma + (layout == RawLayout::yuv420 ? chroma_bytes_420(w, h) : 0);
  const std::size_t whole = bytes.size() / frame_bytes;
  if (bytes.size() % frame_bytes != 0 || whole == 0) {
    fail(Errc::truncated, "truncated payload: partial frame at byte offset " +
                              std::to_string(whole * frame_bytes) + " (frame size " +
                              std::to_string(frame_bytes) + ", file size " + std::to_string(bytes.size()) + ")");
  }
  Sequence seq;
  for (std::size_t k = 0; k < whole; ++k) {
    auto first = bytes.begin() + static_cast<std::ptrdiff_t>(k * frame_bytes);
    seq.frames.emplace_back(w, h, std::vector<std::uint8_t>(first, first + static_cast<std::ptrdiff_t>(luma)));
  }
  return seq;
}

// ---- PGM ----

Plane parse_pgm(const std::vector<std::uint8_t>& bytes, const std::string& name) {
  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_token = [&] {
    skip_space();
    std::string tok;
    while (pos < bytes.size() && !std::isspace(bytes[pos]) && bytes[pos] != '#') tok.push_back(static_cast<char>(bytes[pos++]));
    if (tok.empty()) fail(Errc::malformed_input, "pgm header truncated in '" + name + "'");
    return tok;
  };
  if (read_token() != "P5") fail(Errc::malformed_input, "'" + name + "' is not a binary PGM (P5)");
  const int w = parse_int(read_token(), "pgm width");
  const int h = parse_int(read_token(), "pgm height");
  const int maxval = parse_int(read_token(), "pgm maxval");
  if (maxval <= 0 || maxval > 255) fail(Errc::unsupported, "pgm maxval " + std::to_string(maxval) + " (8-bit only)");
  if (pos >= bytes.size()) fail(Errc::truncated, "pgm '" + name + "' has no payload");
  ++pos;  // single whitespace after maxval
  const std::size_t need = static_cast<std::size_t>(w) * h;
  if (bytes.size() - pos < need) {
    fail(Errc::truncated, "truncated payload in '" + name + "' at byte offset " + std::to_string(pos));
  }
  return Plane(w, h, std::vector<std::uint8_t>(bytes.begin() + pos, bytes.begin() + pos + need));
}

bool wildcard_match(const std::string& pat, const std::string& s) {
  std::size_t p = 0, i = 0, star = std::string::npos, mark = 0;
  while (i < s.size()) {
    if (p < pat.size() && (pat[p] == '?' || pat[p] == s[i])) {
      ++p;
      ++i;
    } else if (p < pat.size() && pat[p] == '*') {
      star = p++;
      mark = i;
    } else if (star != std::string::npos) {
      p = star + 1;
      i = ++mark;
    } else {
      return false;
    }
  }
  while (p < pat.size() && pat[p] == '*') ++p;
  return p == pat.size();
}

Sequence load_pgm_glob(const fs::path& path) {
  const std::string leaf = path.filename().string();
  std::vector<fs::path> files;
  if (leaf.find_first_of("*?") == std::string::npos) {
    files.push_back(path);
  } else {
    const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
      if (entry.is_regular_file() && wildcard_match(leaf, entry.path().filename().string())) {
        files.push_back(entry.path());
      }
    }
    if (ec) fail(Errc::io, "cannot list '" + dir.string() + "'");
    std::sort(files.begin(), files.end());
    if (files.empty()) fail(Errc::io, "no files match '" + path.string() + "'");
  }
  Sequence seq;
  for (const auto& f : files) seq.frames.push_back(parse_pgm(read_file(f), f.string()));
  return seq;
}

}  // namespace

Sequence load_sequence(const fs::path& path, InputFormat format, std::optional<Dims> dims, RawLayout layout) {
  Sequence seq;
  switch (format) {
    case InputFormat::y4m: seq = load_y4m(path); break;
    case InputFormat::raw_yuv: seq = load_raw(path, dims, layout); break;
    case InputFormat::pgm_glob: seq = load_pgm_glob(path); break;
  }
  seq.validate();
  return seq;
}

void write_plane(const Plane& plane, const fs::path& path, PlaneFormat format) {
  std::vector<std::uint8_t> out;
  if (format == PlaneFormat::pgm) {
    const std::string header = "P5\n" + std::to_string(plane.width()) + " " + std::to_string(plane.height()) + "\n255\n";
    out.assign(header.begin(), header.end());
  }
  out.insert(out.end(), plane.samples().begin(), plane.samples().end());
  write_file(path, out);
}

void write_sequence(const Sequence& seq, const fs::path& path, SequenceFormat format) {
  seq.validate();
  const int w = seq.width();
  const int h = seq.height();
  const std::size_t chroma = format == SequenceFormat::raw_luma ? 0 : chroma_bytes_420(w, h);
  std::vector<std::uint8_t> out;
  if (format == SequenceFormat::y4m) {
    long num = std::lround(seq.frame_rate * 1000.0);
    long den = 1000;
    const long g = std::gcd(num, den);
    if (g > 0) {
      num /= g;
      den /= g;
    }
    const std::string header = "YUV4MPEG2 W" + std::to_string(w) + " H" + std::to_string(h) + " F" +
                               std::to_string(num) + ":" + std::to_string(den) + " Ip A1:1 C420jpeg\n";
    out.assign(header.begin(), header.end());
  }
  for (const auto& f : seq.frames) {
    if (format == SequenceFormat::y4m) {
      static constexpr char kFrame[] = "FRAME\n";
      out.insert(out.end(), kFrame, kFrame + 6);
    }
    out.insert(out.end(), f.samples().begin(), f.samples().end());
    out.insert(out.end(), chroma, 128);
  }
  write_file(path, out);
}

std::optional<InputFormat> format_from_extension(const fs::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".y4m") return InputFormat::y4m;
  if (ext == ".yuv" || ext == ".raw") return InputFormat::raw_yuv;
  if (ext == ".pgm" || path.filename().string().find_first_of("*?") != std::string::npos) return InputFormat::pgm_glob;
  return std::nullopt;
}

}  // namespace mrenc
