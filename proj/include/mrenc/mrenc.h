/* mrenc: multi-rate encoding laboratory, C interface.
 *
 * All functions return an mrenc_status. On failure the message of the most
 * recent error on the calling thread is available from mrenc_last_error().
 * Strings returned through char** out-parameters are owned by the caller and
 * must be released with mrenc_string_free().
 */
#ifndef MRENC_H
#define MRENC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(MRENC_BUILDING_LIBRARY)
#    define MRENC_API __declspec(dllexport)
#  else
#    define MRENC_API __declspec(dllimport)
#  endif
#else
#  define MRENC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values double as CLI exit codes. */
typedef enum mrenc_status {
  MRENC_OK = 0,
  MRENC_E_USAGE = 1,      /* bad parameter value */
  MRENC_E_INPUT = 2,      /* input failed validation (geometry, corrupt stream, ...) */
  MRENC_E_IO = 3,
  MRENC_E_INFEASIBLE = 4, /* constraint admits no partition */
  MRENC_E_INTERNAL = 5
} mrenc_status;

typedef enum mrenc_effort { MRENC_EFFORT_THOROUGH = 0, MRENC_EFFORT_FAST = 1 } mrenc_effort;

typedef struct mrenc_sequence mrenc_sequence;
typedef struct mrenc_encode mrenc_encode;
typedef struct mrenc_ladder mrenc_ladder;
typedef struct mrenc_meta mrenc_meta;

typedef struct mrenc_encode_opts {
  int ctu;       /* 32, 64 or 128 */
  int effort;    /* mrenc_effort */
  int max_depth; /* combined split depth limit */
} mrenc_encode_opts;

typedef struct mrenc_encode_stats {
  int qp;
  int frames;
  int lossless;
  int64_t bits;
  int64_t work_units;
  int64_t split_bits;
  double bitrate; /* bit/s */
  double psnr;    /* +inf when lossless */
  double xpsnr_s;
  double tau_seconds;
  double mean_depth;
} mrenc_encode_stats;

typedef struct mrenc_ladder_stats {
  size_t rungs;
  double t_serial;
  double t_parallel;
  double t_critical_path;
  int64_t total_work;
  int64_t max_rung_work;
} mrenc_ladder_stats;

typedef struct mrenc_meta_info {
  int frame_w;
  int frame_h;
  int ctu;
  int qp;
  int effort;
  int frames;
  size_t ctu_count;
} mrenc_meta_info;

MRENC_API const char* mrenc_version(void);
MRENC_API const char* mrenc_last_error(void);
MRENC_API void mrenc_string_free(char* s);
MRENC_API void mrenc_encode_opts_default(mrenc_encode_opts* opts);

/* Sequences.
 * format: "y4m", "yuv" (raw 4:2:0), "luma" (raw 8-bit luma), "pgm" (file or
 * glob), or NULL to pick by extension. width/height are required for raw
 * input and ignored otherwise. */
MRENC_API mrenc_status mrenc_sequence_load(const char* path, const char* format, int width, int height,
                                           mrenc_sequence** out);
/* kind: flat, gradient, checker, noise, mixed. */
MRENC_API mrenc_status mrenc_sequence_generate(const char* kind, int width, int height, int frames, uint64_t seed,
                                               mrenc_sequence** out);
/* format: "y4m", "yuv", "luma", or NULL to pick by extension (.yuv is 4:2:0). */
MRENC_API mrenc_status mrenc_sequence_write(const mrenc_sequence* seq, const char* path, const char* format);
MRENC_API mrenc_status mrenc_sequence_info(const mrenc_sequence* seq, int* width, int* height, int* frames);
MRENC_API void mrenc_sequence_free(mrenc_sequence* seq);

/* Single unconstrained encode. opts may be NULL for defaults. */
MRENC_API mrenc_status mrenc_encode_run(const mrenc_sequence* seq, int qp, const mrenc_encode_opts* opts,
                                        mrenc_encode** out);
MRENC_API mrenc_status mrenc_encode_stats_get(const mrenc_encode* enc, mrenc_encode_stats* out);
MRENC_API mrenc_status mrenc_encode_write_meta(const mrenc_encode* enc, const char* path);
/* Reconstruction as y4m / yuv / luma, chosen by extension. */
MRENC_API mrenc_status mrenc_encode_write_recon(const mrenc_encode* enc, const char* path);
/* input/output label the run manifest embedded in the report. */
MRENC_API mrenc_status mrenc_encode_report_json(const mrenc_encode* enc, const char* input, const char* output,
                                                char** out);
MRENC_API void mrenc_encode_free(mrenc_encode* enc);

/* Ladders. strategy: default, tdp, bup, bcp, ahp, ftdr, fbur (case-insensitive).
 * jobs <= 0 runs one worker per rung. */
MRENC_API mrenc_status mrenc_ladder_run(const mrenc_sequence* seq, const int* qps, size_t qp_count,
                                        const char* strategy, const mrenc_encode_opts* opts, int jobs,
                                        mrenc_ladder** out);
MRENC_API mrenc_status mrenc_ladder_stats_get(const mrenc_ladder* ladder, mrenc_ladder_stats* out);
MRENC_API mrenc_status mrenc_ladder_rung_stats(const mrenc_ladder* ladder, size_t rung, mrenc_encode_stats* out);
MRENC_API mrenc_status mrenc_ladder_write_rung_meta(const mrenc_ladder* ladder, size_t rung, const char* path);
MRENC_API mrenc_status mrenc_ladder_rung_json(const mrenc_ladder* ladder, size_t rung, const char* input,
                                              const char* output, char** out);
/* anchor may be NULL; when given, the summary carries delta times and
 * Bjontegaard deltas against it. */
MRENC_API mrenc_status mrenc_ladder_summary_json(const mrenc_ladder* ladder, const mrenc_ladder* anchor,
                                                 const char* input, const char* output, char** out);
MRENC_API const char* mrenc_results_csv_header(void);
MRENC_API mrenc_status mrenc_ladder_csv_row(const mrenc_ladder* ladder, const mrenc_ladder* anchor, char** out);
MRENC_API void mrenc_ladder_free(mrenc_ladder* ladder);

/* Partition metadata (.cud). */
MRENC_API mrenc_status mrenc_meta_read(const char* path, mrenc_meta** out);
MRENC_API mrenc_status mrenc_meta_info_get(const mrenc_meta* meta, mrenc_meta_info* out);
/* ctu_index < 0 dumps every CTU. */
MRENC_API mrenc_status mrenc_meta_dump(const mrenc_meta* meta, long long ctu_index, char** out);
MRENC_API mrenc_status mrenc_meta_diff(const mrenc_meta* a, const mrenc_meta* b, int* all_equal, char** out);
MRENC_API void mrenc_meta_free(mrenc_meta* meta);

MRENC_API const char* mrenc_depth_stats_header(void);
/* One CSV row: name, equal/deeper/shallower fractions of test vs ref, mean depth of test. */
MRENC_API mrenc_status mrenc_depth_stats_row(const mrenc_meta* ref, const mrenc_meta* test, const char* name,
                                             char** out);

/* x: deltaTS, deltaTP, deltaWork. y: bdrx, bdrp. */
MRENC_API mrenc_status mrenc_pareto(const char* csv_text, const char* x, const char* y, char** json_out,
                                    char** table_out);

#ifdef __cplusplus
}
#endif

#endif /* MRENC_H */
