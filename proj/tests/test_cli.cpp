// Drives the mrenc binary end to end.
#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(MRENC_CLI_PATH) + " " + args + " 2>&1";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p);
  char buf[4096];
  while (const std::size_t n = fread(buf, 1, sizeof buf, p)) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Tmp {
  fs::path path;
  Tmp() {
    path = fs::temp_directory_path() / ("mrenc_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~Tmp() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string operator/(const std::string& n) const { return (path / n).string(); }
};

// Drops every field that depends on timing or on the output location.
void strip_volatile(nlohmann::json& j) {
  if (j.is_object()) {
    for (const char* k : {"tau_seconds", "t_serial", "t_parallel", "t_critical_path", "delta_ts", "delta_tp", "output"}) {
      j.erase(k);
    }
    for (auto& [k, v] : j.items()) strip_volatile(v);
  } else if (j.is_array()) {
    for (auto& v : j) strip_volatile(v);
  }
}

}  // namespace

TEST_CASE("gen and encode of a flat frame gives a single NS CTU") {
  Tmp t;
  REQUIRE(run("gen --kind flat --size 64x64 --frames 1 --seed 1 --out " + t / "flat.y4m").code == 0);
  const auto e = run("encode -i " + t / "flat.y4m" + " --qp 42 --meta " + t / "a.cud" + " --report " + t / "a.json" +
                     " --recon " + t / "r.yuv");
  REQUIRE(e.code == 0);
  CHECK(fs::file_size(t / "r.yuv") == 64 * 64 * 3 / 2);
  const auto dump = run("meta dump " + t / "a.cud");
  CHECK(dump.code == 0);
  CHECK(dump.out.find("CTU 0: NS\n") != std::string::npos);
  const auto report = nlohmann::json::parse(slurp(t / "a.json"));
  for (const char* k : {"bits", "bitrate", "psnr", "xpsnr_s", "tau_seconds", "work_units"}) CHECK(report.contains(k));
  CHECK(report["manifest"]["qps"] == nlohmann::json::array({42}));

  const auto one = run("meta dump " + t / "a.cud" + " --ctu-index 0");
  CHECK(one.out.find("CTU 0: NS") != std::string::npos);
  CHECK(run("meta dump " + t / "a.cud" + " --ctu-index 3").code == 2);
  const auto diff = run("meta diff " + t / "a.cud" + " " + t / "a.cud");
  CHECK(diff.code == 0);
  CHECK(diff.out.find("all equal") != std::string::npos);
}

TEST_CASE("exit codes") {
  Tmp t;
  CHECK(run("encode -i x.y4m --meta a --report b").code == 1);  // --qp missing
  CHECK(run("frobnicate").code == 1);
  CHECK(run("encode -i " + t / "missing.y4m" + " --qp 30 --meta " + t / "a.cud" + " --report " + t / "a.json").code == 3);
  {
    std::ofstream(t / "bad.y4m") << "not a y4m stream";
  }
  CHECK(run("encode -i " + t / "bad.y4m" + " --qp 30 --meta " + t / "a.cud" + " --report " + t / "a.json").code == 2);
  REQUIRE(run("gen --kind noise --size 64x64 --frames 1 --out " + t / "n.y4m").code == 0);
  const auto short_ladder = run("ladder -i " + t / "n.y4m" + " --qps 22 --strategy tdp --out " + t / "o");
  CHECK(short_ladder.code == 1);
  CHECK(short_ladder.out.find("at least 2 rungs") != std::string::npos);
  CHECK(run("encode -i " + t / "n.y4m" + " --qp 30 --ctu 48 --meta " + t / "a.cud" + " --report " + t / "a.json").code == 1);
}

TEST_CASE("ladder output is deterministic apart from timing") {
  Tmp t;
  REQUIRE(run("gen --kind mixed --size 64x64 --frames 1 --seed 4 --out " + t / "m.y4m").code == 0);
  const std::string common = "ladder -i " + t / "m.y4m" + " --strategy ftdr --compare-default --ctu 32 --effort fast --max-depth 3";
  const auto a = run(common + " --out " + t / "a");
  REQUIRE(a.code == 0);
  REQUIRE(run(common + " --out " + t / "b" + " --jobs 1").code == 0);
  CHECK(a.out.find("ftdr") != std::string::npos);

  for (const char* f : {"ftdr/qp22.cud", "ftdr/qp42.cud", "default/qp32.cud"}) {
    CHECK(slurp(t.path / "a" / f) == slurp(t.path / "b" / f));
  }
  auto ja = nlohmann::json::parse(slurp(t.path / "a" / "ftdr" / "summary.json"));
  auto jb = nlohmann::json::parse(slurp(t.path / "b" / "ftdr" / "summary.json"));
  CHECK(ja["comparison"]["delta_work"].get<double>() < 0.0);
  CHECK(ja["comparison"]["delta_work_p"].get<double>() == 0.0);
  CHECK(ja["n"] == 5);
  strip_volatile(ja);
  strip_volatile(jb);
  CHECK(ja == jb);

  const std::string csv = slurp(t.path / "a" / "results.csv");
  CHECK(csv.rfind("schema_version,strategy,", 0) == 0);
  CHECK(csv.find("\n1,ftdr,") != std::string::npos);

  const auto ds = run("depth-stats --ref " + t / "a/ftdr/qp22.cud" + " --test " + t / "a/ftdr/qp22.cud");
  CHECK(ds.code == 0);
  CHECK(ds.out.find(",1.000000,0.000000,0.000000,") != std::string::npos);

  const auto par = run("pareto --points " + t / "a/results.csv" + " --x deltaWork --y bdrp --table " + t / "p.txt");
  CHECK(par.code == 0);
  CHECK(nlohmann::json::parse(par.out).contains("front"));
  CHECK(slurp(t.path / "p.txt").rfind("# x y label on_front", 0) == 0);
}

TEST_CASE("pareto rejects an empty CSV") {
  Tmp t;
  {
    std::ofstream(t / "e.csv") << "";
  }
  CHECK(run("pareto --points " + t / "e.csv").code == 2);
  CHECK(run("pareto --points " + t / "e.csv" + " --x sideways").code == 1);
}
