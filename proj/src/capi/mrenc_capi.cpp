#include "mrenc/mrenc.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <filesystem>
#include <fstream>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"
#include "frame_io.hpp"
#include "metadata.hpp"
#include "metrics.hpp"
#include "multirate.hpp"
#include "report.hpp"
#include "synth.hpp"

struct mrenc_sequence {
  mrenc::Sequence seq;
};

struct mrenc_encode {
  mrenc::RungResult result;
  mrenc::EncodeParams params;
};

struct mrenc_ladder {
  mrenc::LadderReport report;
  mrenc::EncodeParams params;
};

struct mrenc_meta {
  mrenc::MetadataFile file;
};

namespace {

using namespace mrenc;

thread_local std::string g_last_error;

mrenc_status status_of(Errc c) {
  switch (c) {
    case Errc::invalid_argument: return MRENC_E_USAGE;
    case Errc::io: return MRENC_E_IO;
    case Errc::infeasible_constraint: return MRENC_E_INFEASIBLE;
    default: return MRENC_E_INPUT;
  }
}

template <class Fn>
mrenc_status guard(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return MRENC_OK;
  } catch (const Error& e) {
    g_last_error = std::string(errc_name(e.code())) + ": " + e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return MRENC_E_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = std::string("internal: ") + e.what();
    return MRENC_E_INTERNAL;
  } catch (...) {
    g_last_error = "internal: unknown exception";
    return MRENC_E_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) fail(Errc::invalid_argument, std::string(what) + " is null");
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

EncodeParams params_of(const mrenc_encode_opts* opts) {
  mrenc_encode_opts o;
  mrenc_encode_opts_default(&o);
  if (opts) o = *opts;
  if (o.ctu != 32 && o.ctu != 64 && o.ctu != 128) fail(Errc::invalid_argument, "ctu must be 32, 64 or 128");
  if (o.effort != MRENC_EFFORT_THOROUGH && o.effort != MRENC_EFFORT_FAST) fail(Errc::invalid_argument, "unknown effort");
  if (o.max_depth < 0) fail(Errc::invalid_argument, "max depth must be non-negative");
  EncodeParams p;
  p.ctu = o.ctu;
  p.search.effort = static_cast<Effort>(o.effort);
  p.search.max_total_depth = o.max_depth;
  return p;
}

RunManifest manifest_of(const EncodeParams& p, std::vector<int> qps, std::vector<std::string> strategies,
                        const char* input, const char* output) {
  RunManifest m;
  m.input = input ? input : "";
  m.output = output ? output : "";
  m.qps = std::move(qps);
  m.strategies = std::move(strategies);
  m.ctu = p.ctu;
  m.effort = p.search.effort;
  m.max_total_depth = p.search.max_total_depth;
  return m;
}

void fill_stats(const RungResult& r, mrenc_encode_stats* out) {
  out->qp = r.qp;
  out->frames = static_cast<int>(r.depth_maps.size());
  out->lossless = std::isfinite(r.psnr) ? 0 : 1;
  out->bits = r.bits;
  out->work_units = r.work_units;
  out->split_bits = r.split_bits;
  out->bitrate = r.bitrate;
  out->psnr = r.psnr;
  out->xpsnr_s = r.xpsnr;
  out->tau_seconds = r.tau;
  out->mean_depth = r.mean_depth();
}

SequenceFormat output_format(const std::filesystem::path& path, const char* format) {
  const std::string f = format ? format : "";
  if (f == "y4m") return SequenceFormat::y4m;
  if (f == "yuv") return SequenceFormat::raw_yuv420;
  if (f == "luma") return SequenceFormat::raw_luma;
  if (!f.empty()) fail(Errc::invalid_argument, "unknown output format '" + f + "'");
  const auto ext = path.extension().string();
  if (ext == ".y4m") return SequenceFormat::y4m;
  if (ext == ".yuv") return SequenceFormat::raw_yuv420;
  if (ext == ".luma" || ext == ".raw") return SequenceFormat::raw_luma;
  fail(Errc::invalid_argument, "cannot infer output format of '" + path.string() + "'");
}

const RungResult& rung_at(const mrenc_ladder* l, std::size_t i) {
  if (i >= l->report.rungs.size()) fail(Errc::out_of_range, "rung " + std::to_string(i) + " out of range");
  return l->report.rungs[i];
}

std::vector<int> ladder_qps(const LadderReport& r) {
  std::vector<int> q;
  for (const auto& rung : r.rungs) q.push_back(rung.qp);
  return q;
}

}  // namespace

extern "C" {

const char* mrenc_version(void) { return "0.1.0"; }

const char* mrenc_last_error(void) { return g_last_error.c_str(); }

void mrenc_string_free(char* s) { std::free(s); }

void mrenc_encode_opts_default(mrenc_encode_opts* opts) {
  if (!opts) return;
  opts->ctu = kDefaultCtu;
  opts->effort = MRENC_EFFORT_THOROUGH;
  opts->max_depth = kDefaultMaxDepth;
}

mrenc_status mrenc_sequence_load(const char* path, const char* format, int width, int height, mrenc_sequence** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    const std::filesystem::path p(path);
    const std::string f = format ? format : "";
    std::optional<Dims> dims;
    if (width > 0 && height > 0) dims = Dims{width, height};
    Sequence seq;
    if (f == "y4m") {
      seq = load_sequence(p, InputFormat::y4m);
    } else if (f == "yuv") {
      seq = load_sequence(p, InputFormat::raw_yuv, dims, RawLayout::yuv420);
    } else if (f == "luma") {
      seq = load_sequence(p, InputFormat::raw_yuv, dims, RawLayout::luma);
    } else if (f == "pgm") {
      seq = load_sequence(p, InputFormat::pgm_glob);
    } else if (f.empty()) {
      const auto guessed = format_from_extension(p);
      if (!guessed) fail(Errc::invalid_argument, "cannot infer input format of '" + p.string() + "'");
      seq = load_sequence(p, *guessed, dims);
    } else {
      fail(Errc::invalid_argument, "unknown input format '" + f + "'");
    }
    *out = new mrenc_sequence{std::move(seq)};
  });
}

mrenc_status mrenc_sequence_generate(const char* kind, int width, int height, int frames, uint64_t seed,
                                     mrenc_sequence** out) {
  return guard([&] {
    need(kind, "kind");
    need(out, "out");
    const auto k = parse_synth_kind(kind);
    if (!k) fail(Errc::invalid_argument, std::string("unknown synthetic kind '") + kind + "'");
    *out = new mrenc_sequence{generate_sequence(*k, width, height, frames, seed)};
  });
}

mrenc_status mrenc_sequence_write(const mrenc_sequence* seq, const char* path, const char* format) {
  return guard([&] {
    need(seq, "sequence");
    need(path, "path");
    write_sequence(seq->seq, path, output_format(path, format));
  });
}

mrenc_status mrenc_sequence_info(const mrenc_sequence* seq, int* width, int* height, int* frames) {
  return guard([&] {
    need(seq, "sequence");
    if (width) *width = seq->seq.width();
    if (height) *height = seq->seq.height();
    if (frames) *frames = static_cast<int>(seq->seq.frames.size());
  });
}

void mrenc_sequence_free(mrenc_sequence* seq) { delete seq; }

mrenc_status mrenc_encode_run(const mrenc_sequence* seq, int qp, const mrenc_encode_opts* opts, mrenc_encode** out) {
  return guard([&] {
    need(seq, "sequence");
    need(out, "out");
    const EncodeParams p = params_of(opts);
    FrameGeometry{seq->seq.width(), seq->seq.height(), p.ctu}.validate();
    *out = new mrenc_encode{encode_sequence(seq->seq, qp, p), p};
  });
}

mrenc_status mrenc_encode_stats_get(const mrenc_encode* enc, mrenc_encode_stats* out) {
  return guard([&] {
    need(enc, "encode");
    need(out, "out");
    fill_stats(enc->result, out);
  });
}

mrenc_status mrenc_encode_write_meta(const mrenc_encode* enc, const char* path) {
  return guard([&] {
    need(enc, "encode");
    need(path, "path");
    write_metadata(enc->result.metadata, path);
  });
}

mrenc_status mrenc_encode_write_recon(const mrenc_encode* enc, const char* path) {
  return guard([&] {
    need(enc, "encode");
    need(path, "path");
    write_sequence(enc->result.recon, path, output_format(path, nullptr));
  });
}

mrenc_status mrenc_encode_report_json(const mrenc_encode* enc, const char* input, const char* output, char** out) {
  return guard([&] {
    need(enc, "encode");
    need(out, "out");
    const RunManifest m = manifest_of(enc->params, {enc->result.qp}, {"default"}, input, output);
    *out = dup(rung_json(enc->result, &m).dump(2) + "\n");
  });
}

void mrenc_encode_free(mrenc_encode* enc) { delete enc; }

mrenc_status mrenc_ladder_run(const mrenc_sequence* seq, const int* qps, size_t qp_count, const char* strategy,
                              const mrenc_encode_opts* opts, int jobs, mrenc_ladder** out) {
  return guard([&] {
    need(seq, "sequence");
    need(strategy, "strategy");
    need(out, "out");
    if (qp_count > 0) need(qps, "qps");
    const auto s = parse_strategy(strategy);
    if (!s) fail(Errc::invalid_argument, std::string("unknown strategy '") + strategy + "'");
    LadderOptions lo;
    lo.encode = params_of(opts);
    lo.jobs = jobs;
    const std::vector<int> q(qps, qps + qp_count);
    *out = new mrenc_ladder{run_ladder(seq->seq, q, *s, lo), lo.encode};
  });
}

mrenc_status mrenc_ladder_stats_get(const mrenc_ladder* l, mrenc_ladder_stats* out) {
  return guard([&] {
    need(l, "ladder");
    need(out, "out");
    out->rungs = l->report.n();
    out->t_serial = l->report.t_serial;
    out->t_parallel = l->report.t_parallel;
    out->t_critical_path = l->report.t_critical_path;
    out->total_work = l->report.total_work();
    out->max_rung_work = l->report.max_rung_work();
  });
}

mrenc_status mrenc_ladder_rung_stats(const mrenc_ladder* l, size_t rung, mrenc_encode_stats* out) {
  return guard([&] {
    need(l, "ladder");
    need(out, "out");
    fill_stats(rung_at(l, rung), out);
  });
}

mrenc_status mrenc_ladder_write_rung_meta(const mrenc_ladder* l, size_t rung, const char* path) {
  return guard([&] {
    need(l, "ladder");
    need(path, "path");
    write_metadata(rung_at(l, rung).metadata, path);
  });
}

mrenc_status mrenc_ladder_rung_json(const mrenc_ladder* l, size_t rung, const char* input, const char* output,
                                    char** out) {
  return guard([&] {
    need(l, "ladder");
    need(out, "out");
    const RunManifest m =
        manifest_of(l->params, ladder_qps(l->report), {std::string(strategy_name(l->report.strategy))}, input, output);
    *out = dup(rung_json(rung_at(l, rung), &m).dump(2) + "\n");
  });
}

mrenc_status mrenc_ladder_summary_json(const mrenc_ladder* l, const mrenc_ladder* anchor, const char* input,
                                       const char* output, char** out) {
  return guard([&] {
    need(l, "ladder");
    need(out, "out");
    std::vector<std::string> strategies{std::string(strategy_name(l->report.strategy))};
    std::optional<LadderComparison> cmp;
    if (anchor) {
      cmp = compare_ladders(l->report, anchor->report);
      strategies.emplace_back(strategy_name(anchor->report.strategy));
    }
    const RunManifest m = manifest_of(l->params, ladder_qps(l->report), strategies, input, output);
    *out = dup(ladder_json(l->report, cmp, m).dump(2) + "\n");
  });
}

const char* mrenc_results_csv_header(void) {
  static const std::string h = results_csv_header();
  return h.c_str();
}

mrenc_status mrenc_ladder_csv_row(const mrenc_ladder* l, const mrenc_ladder* anchor, char** out) {
  return guard([&] {
    need(l, "ladder");
    need(anchor, "anchor");
    need(out, "out");
    *out = dup(results_csv_row(l->report.strategy, compare_ladders(l->report, anchor->report)));
  });
}

void mrenc_ladder_free(mrenc_ladder* l) { delete l; }

mrenc_status mrenc_meta_read(const char* path, mrenc_meta** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new mrenc_meta{read_metadata(path)};
  });
}

mrenc_status mrenc_meta_info_get(const mrenc_meta* meta, mrenc_meta_info* out) {
  return guard([&] {
    need(meta, "meta");
    need(out, "out");
    const auto& m = meta->file;
    out->frame_w = m.frame_w;
    out->frame_h = m.frame_h;
    out->ctu = m.ctu;
    out->qp = m.qp;
    out->effort = static_cast<int>(m.effort);
    out->frames = m.frame_count();
    out->ctu_count = m.trees.size();
  });
}

mrenc_status mrenc_meta_dump(const mrenc_meta* meta, long long ctu_index, char** out) {
  return guard([&] {
    need(meta, "meta");
    need(out, "out");
    std::optional<std::size_t> idx;
    if (ctu_index >= 0) idx = static_cast<std::size_t>(ctu_index);
    *out = dup(meta_dump(meta->file, idx));
  });
}

mrenc_status mrenc_meta_diff(const mrenc_meta* a, const mrenc_meta* b, int* all_equal, char** out) {
  return guard([&] {
    need(a, "meta a");
    need(b, "meta b");
    need(out, "out");
    auto [text, same] = meta_diff(a->file, b->file);
    if (all_equal) *all_equal = same ? 1 : 0;
    *out = dup(text);
  });
}

void mrenc_meta_free(mrenc_meta* meta) { delete meta; }

const char* mrenc_depth_stats_header(void) {
  static const std::string h = depth_stats_header();
  return h.c_str();
}

mrenc_status mrenc_depth_stats_row(const mrenc_meta* ref, const mrenc_meta* test, const char* name, char** out) {
  return guard([&] {
    need(ref, "ref");
    need(test, "test");
    need(out, "out");
    const auto& r = ref->file;
    const auto& t = test->file;
    if (r.frame_count() != t.frame_count()) fail(Errc::dimension_mismatch, "metadata files differ in frame count");
    std::vector<DepthMap> rm;
    std::vector<DepthMap> tm;
    double mean = 0.0;
    for (int f = 0; f < t.frame_count(); ++f) {
      rm.push_back(r.depth_map(f));
      tm.push_back(t.depth_map(f));
      mean += tm.back().mean();
    }
    mean /= t.frame_count();
    *out = dup(depth_stats_row(name ? name : "", depth_agreement(rm, tm), mean));
  });
}

mrenc_status mrenc_pareto(const char* csv_text, const char* x, const char* y, char** json_out, char** table_out) {
  return guard([&] {
    need(csv_text, "csv");
    const auto xa = parse_pareto_x(x ? x : "deltaTS");
    const auto ya = parse_pareto_y(y ? y : "bdrx");
    if (!xa) fail(Errc::invalid_argument, "x axis must be deltaTS, deltaTP or deltaWork");
    if (!ya) fail(Errc::invalid_argument, "y axis must be bdrx or bdrp");
    const ParetoInput in = read_pareto_csv(csv_text, *xa, *ya);
    const ParetoResult r = pareto_front(in.points);
    if (json_out) *json_out = dup(pareto_json(r, in).dump(2) + "\n");
    if (table_out) *table_out = dup(pareto_table(r));
  });
}

}  // extern "C"
