// Exercises the shared library through its C header only.
#include <doctest.h>

#include <mrenc/mrenc.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>

namespace {

struct Tmp {
  std::filesystem::path path;
  Tmp() {
    path = std::filesystem::temp_directory_path() / ("mrenc_capi_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path);
  }
  ~Tmp() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string operator/(const char* n) const { return (path / n).string(); }
};

std::string take(char* s) {
  std::string out = s ? s : "";
  mrenc_string_free(s);
  return out;
}

mrenc_sequence* gen(const char* kind, int w, int h, int frames) {
  mrenc_sequence* s = nullptr;
  REQUIRE(mrenc_sequence_generate(kind, w, h, frames, 3, &s) == MRENC_OK);
  return s;
}

}  // namespace

TEST_CASE("version and defaults") {
  CHECK(std::string(mrenc_version()).size() > 0);
  mrenc_encode_opts o;
  mrenc_encode_opts_default(&o);
  CHECK(o.ctu == 64);
  CHECK(o.effort == MRENC_EFFORT_THOROUGH);
  CHECK(o.max_depth == 6);
}

TEST_CASE("status codes and last error") {
  mrenc_sequence* s = nullptr;
  CHECK(mrenc_sequence_generate("nope", 64, 64, 1, 1, &s) == MRENC_E_USAGE);
  CHECK(s == nullptr);
  CHECK(std::string(mrenc_last_error()).find("nope") != std::string::npos);
  CHECK(mrenc_sequence_load("/nonexistent/x.y4m", nullptr, 0, 0, &s) == MRENC_E_IO);
  CHECK(mrenc_sequence_generate("flat", 64, 64, 1, 1, nullptr) == MRENC_E_USAGE);

  s = gen("mixed", 48, 48, 1);  // not CTU aligned for 32
  mrenc_encode_opts o;
  mrenc_encode_opts_default(&o);
  o.ctu = 32;
  mrenc_encode* e = nullptr;
  CHECK(mrenc_encode_run(s, 30, &o, &e) == MRENC_E_INPUT);
  o.ctu = 48;
  CHECK(mrenc_encode_run(s, 30, &o, &e) == MRENC_E_USAGE);
  mrenc_sequence_free(s);
}

TEST_CASE("encode, write and read back metadata") {
  Tmp t;
  mrenc_sequence* s = gen("flat", 64, 64, 1);
  mrenc_encode* e = nullptr;
  REQUIRE(mrenc_encode_run(s, 42, nullptr, &e) == MRENC_OK);
  mrenc_encode_stats st;
  REQUIRE(mrenc_encode_stats_get(e, &st) == MRENC_OK);
  CHECK(st.qp == 42);
  CHECK(st.frames == 1);
  CHECK(st.bits > 0);
  CHECK(st.work_units > 3);
  CHECK(st.mean_depth == 0.0);
  REQUIRE(mrenc_encode_write_meta(e, (t / "a.cud").c_str()) == MRENC_OK);
  REQUIRE(mrenc_encode_write_recon(e, (t / "r.y4m").c_str()) == MRENC_OK);

  char* report = nullptr;
  REQUIRE(mrenc_encode_report_json(e, "in", "out", &report) == MRENC_OK);
  const std::string js = take(report);
  CHECK(js.find("\"tau_seconds\"") != std::string::npos);
  CHECK(js.find("\"xpsnr_s\"") != std::string::npos);

  mrenc_meta* m = nullptr;
  REQUIRE(mrenc_meta_read((t / "a.cud").c_str(), &m) == MRENC_OK);
  mrenc_meta_info info;
  REQUIRE(mrenc_meta_info_get(m, &info) == MRENC_OK);
  CHECK(info.frame_w == 64);
  CHECK(info.qp == 42);
  CHECK(info.ctu_count == 1);
  char* dump = nullptr;
  REQUIRE(mrenc_meta_dump(m, 0, &dump) == MRENC_OK);
  CHECK(take(dump).find("CTU 0: NS") != std::string::npos);
  CHECK(mrenc_meta_dump(m, 5, &dump) == MRENC_E_INPUT);
  int all = 0;
  char* diff = nullptr;
  REQUIRE(mrenc_meta_diff(m, m, &all, &diff) == MRENC_OK);
  CHECK(all == 1);
  mrenc_string_free(diff);
  char* row = nullptr;
  REQUIRE(mrenc_depth_stats_row(m, m, "self", &row) == MRENC_OK);
  CHECK(take(row) == "self,1.000000,0.000000,0.000000,0.000000");

  mrenc_sequence* back = nullptr;
  REQUIRE(mrenc_sequence_load((t / "r.y4m").c_str(), nullptr, 0, 0, &back) == MRENC_OK);
  int w = 0, h = 0, n = 0;
  REQUIRE(mrenc_sequence_info(back, &w, &h, &n) == MRENC_OK);
  CHECK(w == 64);
  CHECK(n == 1);

  mrenc_sequence_free(back);
  mrenc_meta_free(m);
  mrenc_encode_free(e);
  mrenc_sequence_free(s);
}

TEST_CASE("ladder through the C interface") {
  mrenc_sequence* s = gen("mixed", 64, 64, 1);
  mrenc_encode_opts o;
  mrenc_encode_opts_default(&o);
  o.ctu = 32;
  o.effort = MRENC_EFFORT_FAST;
  o.max_depth = 3;
  const int qps[] = {22, 27, 32, 37, 42};
  mrenc_ladder* d = nullptr;
  mrenc_ladder* f = nullptr;
  REQUIRE(mrenc_ladder_run(s, qps, 5, "default", &o, 0, &d) == MRENC_OK);
  REQUIRE(mrenc_ladder_run(s, qps, 5, "FTDR", &o, 2, &f) == MRENC_OK);
  mrenc_ladder_stats ds, fs;
  REQUIRE(mrenc_ladder_stats_get(d, &ds) == MRENC_OK);
  REQUIRE(mrenc_ladder_stats_get(f, &fs) == MRENC_OK);
  CHECK(ds.rungs == 5);
  CHECK(fs.total_work < ds.total_work);
  CHECK(fs.max_rung_work == ds.max_rung_work);
  CHECK(fs.t_critical_path >= fs.t_parallel);

  mrenc_encode_stats r0, r4;
  REQUIRE(mrenc_ladder_rung_stats(f, 0, &r0) == MRENC_OK);
  REQUIRE(mrenc_ladder_rung_stats(f, 4, &r4) == MRENC_OK);
  CHECK(r0.qp == 22);
  CHECK(r4.qp == 42);
  CHECK(r4.split_bits == 0);
  CHECK(mrenc_ladder_rung_stats(f, 5, &r0) == MRENC_E_INPUT);

  char* sum = nullptr;
  REQUIRE(mrenc_ladder_summary_json(f, d, "in", "out", &sum) == MRENC_OK);
  CHECK(take(sum).find("\"delta_work\"") != std::string::npos);
  char* row = nullptr;
  REQUIRE(mrenc_ladder_csv_row(f, d, &row) == MRENC_OK);
  CHECK(take(row).rfind("1,ftdr,", 0) == 0);
  CHECK(std::string(mrenc_results_csv_header()).rfind("schema_version,strategy", 0) == 0);

  CHECK(mrenc_ladder_run(s, qps, 1, "tdp", &o, 0, &d) == MRENC_E_USAGE);
  CHECK(mrenc_ladder_run(s, qps, 5, "xyz", &o, 0, &d) == MRENC_E_USAGE);

  mrenc_ladder_free(f);
  mrenc_ladder_free(d);
  mrenc_sequence_free(s);
}

TEST_CASE("pareto through the C interface") {
  const char* csv =
      "strategy,bdr_xpsnr_s,delta_ts\n"
      "ahp,0.5,-11.69\n"
      "bcp,0.59,-9.87\n"
      "ftdr,8.65,-13.89\n"
      "bup,,-3.0\n";
  char* js = nullptr;
  char* table = nullptr;
  REQUIRE(mrenc_pareto(csv, "deltaTS", "bdrx", &js, &table) == MRENC_OK);
  const std::string j = take(js);
  CHECK(j.find("\"skipped\": [\n    \"bup\"") != std::string::npos);
  const std::string tb = take(table);
  CHECK(tb.find("ahp 1") != std::string::npos);
  CHECK(tb.find("bcp 0") != std::string::npos);
  CHECK(mrenc_pareto("", "deltaTS", "bdrx", &js, &table) == MRENC_E_INPUT);
  CHECK(mrenc_pareto(csv, "sideways", "bdrx", &js, &table) == MRENC_E_USAGE);
}
