// mrenc command-line driver. Talks to the library only through mrenc.h.
#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mrenc/mrenc.h"

namespace fs = std::filesystem;

namespace {

struct Failure {
  int code;
  std::string message;
};

void check(mrenc_status s) {
  if (s != MRENC_OK) throw Failure{s, mrenc_last_error()};
}

struct StrDeleter {
  void operator()(char* s) const { mrenc_string_free(s); }
};
using OwnedStr = std::unique_ptr<char, StrDeleter>;

struct SeqDeleter {
  void operator()(mrenc_sequence* p) const { mrenc_sequence_free(p); }
};
struct EncDeleter {
  void operator()(mrenc_encode* p) const { mrenc_encode_free(p); }
};
struct LadderDeleter {
  void operator()(mrenc_ladder* p) const { mrenc_ladder_free(p); }
};
struct MetaDeleter {
  void operator()(mrenc_meta* p) const { mrenc_meta_free(p); }
};
using Seq = std::unique_ptr<mrenc_sequence, SeqDeleter>;
using Enc = std::unique_ptr<mrenc_encode, EncDeleter>;
using Ladder = std::unique_ptr<mrenc_ladder, LadderDeleter>;
using Meta = std::unique_ptr<mrenc_meta, MetaDeleter>;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Failure{MRENC_E_IO, "cannot write '" + path.string() + "'"};
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{MRENC_E_IO, "cannot open '" + path.string() + "'"};
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Failure{MRENC_E_IO, "cannot create '" + dir.string() + "': " + ec.message()};
}

Meta read_meta(const std::string& path) {
  mrenc_meta* m = nullptr;
  check(mrenc_meta_read(path.c_str(), &m));
  return Meta(m);
}

struct InputArgs {
  std::string path;
  std::string format;
  int width = 0;
  int height = 0;

  void add(CLI::App* app) {
    app->add_option("--input,-i", path, "Input sequence (.y4m, .yuv, .pgm or a PGM glob)")->required();
    app->add_option("--format", format, "Input format override")->check(CLI::IsMember({"y4m", "yuv", "luma", "pgm"}));
    app->add_option("--width", width, "Width of raw input");
    app->add_option("--height", height, "Height of raw input");
  }

  Seq load() const {
    mrenc_sequence* s = nullptr;
    check(mrenc_sequence_load(path.c_str(), format.empty() ? nullptr : format.c_str(), width, height, &s));
    return Seq(s);
  }
};

struct CodingArgs {
  int ctu = 64;
  std::string effort = "thorough";
  int max_depth = 6;

  void add(CLI::App* app) {
    app->add_option("--ctu", ctu, "CTU size")->check(CLI::IsMember({32, 64, 128}));
    app->add_option("--effort", effort, "Search effort")->check(CLI::IsMember({"thorough", "fast"}));
    app->add_option("--max-depth", max_depth, "Maximum combined split depth")->check(CLI::NonNegativeNumber);
  }

  mrenc_encode_opts opts() const {
    mrenc_encode_opts o;
    mrenc_encode_opts_default(&o);
    o.ctu = ctu;
    o.effort = effort == "fast" ? MRENC_EFFORT_FAST : MRENC_EFFORT_THOROUGH;
    o.max_depth = max_depth;
    return o;
  }
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int jobs_from_env() {
  const char* v = std::getenv("MRENC_JOBS");
  if (!v || !*v) return 0;
  try {
    return std::stoi(v);
  } catch (const std::exception&) {
    throw Failure{MRENC_E_USAGE, std::string("MRENC_JOBS is not an integer: ") + v};
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-rate encoding laboratory"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(mrenc_version()));

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a synthetic test sequence");
  std::string gen_kind;
  std::string gen_size = "192x128";
  int gen_frames = 8;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  gen->add_option("--kind", gen_kind, "flat|gradient|checker|noise|mixed")->required();
  gen->add_option("--size", gen_size, "WxH");
  gen->add_option("--frames", gen_frames, "Frame count");
  gen->add_option("--seed", gen_seed, "PRNG seed");
  gen->add_option("--out,-o", gen_out, "Output file (.y4m, .yuv, .luma)")->required();

  // encode
  auto* enc = app.add_subcommand("encode", "Encode a sequence at one QP");
  InputArgs enc_in;
  CodingArgs enc_coding;
  std::optional<int> enc_qp;
  std::string enc_recon, enc_meta, enc_report;
  enc_in.add(enc);
  enc_coding.add(enc);
  enc->add_option("--qp", enc_qp, "Quantization parameter")->required();
  enc->add_option("--recon", enc_recon, "Write the reconstruction (.y4m, .yuv, .luma)");
  enc->add_option("--meta", enc_meta, "Partition metadata output (.cud)")->required();
  enc->add_option("--report", enc_report, "JSON report output")->required();

  // ladder
  auto* lad = app.add_subcommand("ladder", "Encode a QP ladder under one or more strategies");
  InputArgs lad_in;
  CodingArgs lad_coding;
  std::string lad_qps = "22,27,32,37,42";
  std::string lad_strategy;
  std::string lad_out;
  bool lad_compare = false;
  std::optional<int> lad_jobs;
  lad_in.add(lad);
  lad_coding.add(lad);
  lad->add_option("--qps", lad_qps, "Comma-separated QPs");
  lad->add_option("--strategy", lad_strategy, "Comma-separated: default,tdp,bup,bcp,ahp,ftdr,fbur")->required();
  lad->add_flag("--compare-default", lad_compare, "Compare every strategy against a Default run");
  lad->add_option("--out,-o", lad_out, "Output directory")->required();
  lad->add_option("--jobs,-j", lad_jobs, "Concurrent rungs (default: MRENC_JOBS, else one per rung)");

  // depth-stats
  auto* ds = app.add_subcommand("depth-stats", "Depth agreement of metadata files against a reference");
  std::string ds_ref;
  std::vector<std::string> ds_tests;
  std::string ds_out;
  ds->add_option("--ref", ds_ref, "Reference .cud")->required();
  ds->add_option("--test", ds_tests, "Test .cud files")->required();
  ds->add_option("--out,-o", ds_out, "CSV output (default: stdout)");

  // pareto
  auto* par = app.add_subcommand("pareto", "Pareto front of strategy results");
  std::string par_points, par_x = "deltaTS", par_y = "bdrx", par_json, par_table;
  par->add_option("--points", par_points, "results.csv from a ladder run")->required();
  par->add_option("--x", par_x, "deltaTS|deltaTP|deltaWork");
  par->add_option("--y", par_y, "bdrx|bdrp");
  par->add_option("--json", par_json, "JSON output (default: stdout)");
  par->add_option("--table", par_table, "Plot table output (x y label on_front)");

  // meta
  auto* meta = app.add_subcommand("meta", "Inspect partition metadata");
  meta->require_subcommand(1);
  auto* dump = meta->add_subcommand("dump", "Print header and per-CTU split modes");
  std::string dump_file;
  std::optional<long long> dump_index;
  dump->add_option("file", dump_file, ".cud file")->required();
  dump->add_option("--ctu-index", dump_index, "Decode a single CTU")->check(CLI::NonNegativeNumber);
  auto* diff = meta->add_subcommand("diff", "Compare two metadata files CTU by CTU");
  std::string diff_a, diff_b;
  diff->add_option("a", diff_a, "First .cud")->required();
  diff->add_option("b", diff_b, "Second .cud")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : MRENC_E_USAGE;
  }

  try {
    if (*gen) {
      int w = 0;
      int h = 0;
      char x = 0;
      std::istringstream in(gen_size);
      if (!(in >> w >> x >> h) || (x != 'x' && x != 'X') || !in.eof()) {
        throw Failure{MRENC_E_USAGE, "--size must look like WxH"};
      }
      mrenc_sequence* s = nullptr;
      check(mrenc_sequence_generate(gen_kind.c_str(), w, h, gen_frames, gen_seed, &s));
      Seq seq(s);
      check(mrenc_sequence_write(seq.get(), gen_out.c_str(), nullptr));
    } else if (*enc) {
      Seq seq = enc_in.load();
      const mrenc_encode_opts o = enc_coding.opts();
      mrenc_encode* e = nullptr;
      check(mrenc_encode_run(seq.get(), *enc_qp, &o, &e));
      Enc result(e);
      check(mrenc_encode_write_meta(result.get(), enc_meta.c_str()));
      if (!enc_recon.empty()) check(mrenc_encode_write_recon(result.get(), enc_recon.c_str()));
      char* json = nullptr;
      check(mrenc_encode_report_json(result.get(), enc_in.path.c_str(), enc_report.c_str(), &json));
      OwnedStr owned(json);
      write_text(enc_report, json);
    } else if (*lad) {
      std::vector<int> qps;
      for (const auto& q : split_list(lad_qps)) {
        try {
          std::size_t n = 0;
          qps.push_back(std::stoi(q, &n));
          if (n != q.size()) throw std::invalid_argument(q);
        } catch (const std::exception&) {
          throw Failure{MRENC_E_USAGE, "--qps: '" + q + "' is not an integer"};
        }
      }
      const auto strategies = split_list(lad_strategy);
      if (strategies.empty()) throw Failure{MRENC_E_USAGE, "--strategy is empty"};
      const int jobs = lad_jobs ? *lad_jobs : jobs_from_env();
      const mrenc_encode_opts o = lad_coding.opts();
      Seq seq = lad_in.load();
      const fs::path out_dir(lad_out);
      make_dir(out_dir);

      auto run = [&](const std::string& strategy) {
        mrenc_ladder* l = nullptr;
        check(mrenc_ladder_run(seq.get(), qps.data(), qps.size(), strategy.c_str(), &o, jobs, &l));
        return Ladder(l);
      };
      Ladder anchor;
      if (lad_compare) anchor = run("default");

      std::string csv = std::string(mrenc_results_csv_header()) + "\n";
      for (const auto& strategy : strategies) {
        Ladder owned_ladder;
        const mrenc_ladder* ladder = nullptr;
        if (anchor && strategy == "default") {
          ladder = anchor.get();
        } else {
          owned_ladder = run(strategy);
          ladder = owned_ladder.get();
        }
        const fs::path dir = out_dir / strategy;
        make_dir(dir);
        mrenc_ladder_stats st{};
        check(mrenc_ladder_stats_get(ladder, &st));
        for (std::size_t i = 0; i < st.rungs; ++i) {
          mrenc_encode_stats rs{};
          check(mrenc_ladder_rung_stats(ladder, i, &rs));
          const std::string stem = "qp" + std::to_string(rs.qp);
          check(mrenc_ladder_write_rung_meta(ladder, i, (dir / (stem + ".cud")).string().c_str()));
          char* json = nullptr;
          check(mrenc_ladder_rung_json(ladder, i, lad_in.path.c_str(), dir.string().c_str(), &json));
          OwnedStr owned(json);
          write_text(dir / (stem + ".json"), json);
        }
        char* summary = nullptr;
        check(mrenc_ladder_summary_json(ladder, anchor.get(), lad_in.path.c_str(), dir.string().c_str(), &summary));
        OwnedStr owned_summary(summary);
        write_text(dir / "summary.json", summary);
        if (anchor) {
          char* row = nullptr;
          check(mrenc_ladder_csv_row(ladder, anchor.get(), &row));
          OwnedStr owned_row(row);
          csv += std::string(row) + "\n";
        }
        std::printf("%s: t_serial %.3fs t_parallel %.3fs work %lld\n", strategy.c_str(), st.t_serial, st.t_parallel,
                    static_cast<long long>(st.total_work));
      }
      if (anchor) write_text(out_dir / "results.csv", csv);
    } else if (*ds) {
      Meta ref = read_meta(ds_ref);
      std::string csv = std::string(mrenc_depth_stats_header()) + "\n";
      for (const auto& t : ds_tests) {
        Meta test = read_meta(t);
        char* row = nullptr;
        check(mrenc_depth_stats_row(ref.get(), test.get(), t.c_str(), &row));
        OwnedStr owned(row);
        csv += std::string(row) + "\n";
      }
      if (ds_out.empty()) {
        std::cout << csv;
      } else {
        write_text(ds_out, csv);
      }
    } else if (*par) {
      const std::string text = read_text(par_points);
      char* json = nullptr;
      char* table = nullptr;
      check(mrenc_pareto(text.c_str(), par_x.c_str(), par_y.c_str(), &json, &table));
      OwnedStr oj(json);
      OwnedStr ot(table);
      if (par_json.empty()) {
        std::cout << json;
      } else {
        write_text(par_json, json);
      }
      if (!par_table.empty()) write_text(par_table, table);
    } else if (*dump) {
      Meta m = read_meta(dump_file);
      char* text = nullptr;
      check(mrenc_meta_dump(m.get(), dump_index ? *dump_index : -1, &text));
      OwnedStr owned(text);
      std::cout << text;
    } else if (*diff) {
      Meta a = read_meta(diff_a);
      Meta b = read_meta(diff_b);
      char* text = nullptr;
      int same = 0;
      check(mrenc_meta_diff(a.get(), b.get(), &same, &text));
      OwnedStr owned(text);
      std::cout << text;
    }
  } catch (const Failure& f) {
    std::cerr << "mrenc: " << f.message << "\n";
    return f.code;
  }
  return 0;
}
