#include "report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "error.hpp"

namespace mrenc {

using nlohmann::json;

namespace {

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json optional_or_null(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::string_view column_of(ParetoAxis a) {
  switch (a) {
    case ParetoAxis::delta_ts: return "delta_ts";
    case ParetoAxis::delta_tp: return "delta_tp";
    case ParetoAxis::delta_work: return "delta_work";
    case ParetoAxis::bdr_xpsnr: return "bdr_xpsnr_s";
    case ParetoAxis::bdr_psnr: return "bdr_psnr";
  }
  return "";
}

std::string preorder_modes(const PartitionTree& t) {
  std::string s;
  for (const SplitMode m : t.preorder()) {
    if (!s.empty()) s += ' ';
    s += split_mode_name(m);
  }
  return s;
}

}  // namespace

json manifest_json(const RunManifest& m) {
  return {{"input", m.input},
          {"qps", m.qps},
          {"strategies", m.strategies},
          {"ctu", m.ctu},
          {"effort", effort_name(m.effort)},
          {"max_total_depth", m.max_total_depth},
          {"output", m.output}};
}

json rung_json(const RungResult& r, const RunManifest* manifest) {
  json j{{"schema_version", kSchemaVersion},
         {"qp", r.qp},
         {"bits", r.bits},
         {"bitrate", r.bitrate},
         {"psnr", finite_or_null(r.psnr)},
         {"xpsnr_s", finite_or_null(r.xpsnr)},
         {"lossless", !std::isfinite(r.psnr)},
         {"tau_seconds", r.tau},
         {"work_units", r.work_units},
         {"split_bits", r.split_bits},
         {"distortion", r.distortion},
         {"frames", r.depth_maps.size()},
         {"constraint", bound_kind_name(r.kind)},
         {"references", r.reference_qps},
         {"constraint_violations", r.constraint_violations},
         {"mean_depth", r.mean_depth()}};
  if (manifest) j["manifest"] = manifest_json(*manifest);
  return j;
}

json ladder_json(const LadderReport& report, const std::optional<LadderComparison>& cmp, const RunManifest& manifest) {
  json rungs = json::array();
  for (const auto& r : report.rungs) rungs.push_back(rung_json(r, nullptr));
  json j{{"schema_version", kSchemaVersion},
         {"strategy", strategy_name(report.strategy)},
         {"n", report.n()},
         {"t_serial", report.t_serial},
         {"t_parallel", report.t_parallel},
         {"t_critical_path", report.t_critical_path},
         {"total_work", report.total_work()},
         {"max_rung_work", report.max_rung_work()},
         {"dependency_edges", report.plan.edge_count()},
         {"rungs", rungs},
         {"manifest", manifest_json(manifest)}};
  if (cmp) {
    j["comparison"] = {{"anchor", "default"},
                       {"delta_ts", cmp->deltas.delta_ts},
                       {"delta_tp", cmp->deltas.delta_tp},
                       {"delta_work", cmp->deltas.delta_work},
                       {"delta_work_p", cmp->deltas.delta_work_p},
                       {"bdr_psnr", optional_or_null(cmp->bdr_psnr)},
                       {"bdr_xpsnr_s", optional_or_null(cmp->bdr_xpsnr)},
                       {"bd_psnr", optional_or_null(cmp->bd_psnr)},
                       {"bd_xpsnr_s", optional_or_null(cmp->bd_xpsnr)},
                       {"warnings", cmp->warnings}};
  }
  return j;
}

std::string results_csv_header() {
  return "schema_version,strategy,bdr_psnr,bdr_xpsnr_s,bd_psnr,bd_xpsnr_s,delta_ts,delta_tp,delta_work,delta_work_p";
}

std::string results_csv_row(Strategy s, const LadderComparison& c) {
  return std::to_string(kSchemaVersion) + "," + std::string(strategy_name(s)) + "," + fmt(c.bdr_psnr) + "," +
         fmt(c.bdr_xpsnr) + "," + fmt(c.bd_psnr) + "," + fmt(c.bd_xpsnr) + "," + fmt(c.deltas.delta_ts) + "," +
         fmt(c.deltas.delta_tp) + "," + fmt(c.deltas.delta_work) + "," + fmt(c.deltas.delta_work_p);
}

std::optional<ParetoAxis> parse_pareto_x(std::string_view s) {
  if (s == "deltaTS") return ParetoAxis::delta_ts;
  if (s == "deltaTP") return ParetoAxis::delta_tp;
  if (s == "deltaWork") return ParetoAxis::delta_work;
  return std::nullopt;
}

std::optional<ParetoAxis> parse_pareto_y(std::string_view s) {
  if (s == "bdrx") return ParetoAxis::bdr_xpsnr;
  if (s == "bdrp") return ParetoAxis::bdr_psnr;
  return std::nullopt;
}

ParetoInput read_pareto_csv(const std::string& text, ParetoAxis x, ParetoAxis y) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    if (!trim(line).empty()) header = split(trim(line), ',');
  }
  if (header.empty()) fail(Errc::malformed_input, "CSV is empty");

  auto find = [&header](std::string_view name) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (trim(header[i]) == name) return i;
    }
    fail(Errc::malformed_input, "CSV has no '" + std::string(name) + "' column");
  };
  const std::size_t xi = find(column_of(x));
  const std::size_t yi = find(column_of(y));
  const std::size_t li = find("strategy");

  ParetoInput out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split(trim(line), ',');
    if (cells.size() != header.size()) {
      fail(Errc::malformed_input, "CSV line " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
                                      " cells, header has " + std::to_string(header.size()));
    }
    const std::string label = trim(cells[li]);
    const std::string xs = trim(cells[xi]);
    const std::string ys = trim(cells[yi]);
    if (xs.empty() || ys.empty()) {
      out.skipped.push_back(label);
      continue;
    }
    ParetoPoint p;
    p.label = label;
    try {
      std::size_t nx = 0;
      std::size_t ny = 0;
      p.delta_t = std::stod(xs, &nx);
      p.bd_rate = std::stod(ys, &ny);
      if (nx != xs.size() || ny != ys.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      fail(Errc::malformed_input, "CSV line " + std::to_string(lineno) + ": non-numeric value");
    }
    out.points.push_back(std::move(p));
  }
  if (out.points.empty()) fail(Errc::malformed_input, "CSV has no usable rows");
  return out;
}

json pareto_json(const ParetoResult& r, const ParetoInput& in) {
  auto pts = [](const std::vector<ParetoPoint>& v) {
    json a = json::array();
    for (const auto& p : v) a.push_back({{"label", p.label}, {"x", p.delta_t}, {"y", p.bd_rate}});
    return a;
  };
  return {{"schema_version", kSchemaVersion},
          {"front", pts(r.front)},
          {"dominated", pts(r.dominated)},
          {"skipped", in.skipped}};
}

std::string pareto_table(const ParetoResult& r) {
  std::string s = "# x y label on_front\n";
  for (const auto& p : r.front) s += fmt(p.delta_t) + " " + fmt(p.bd_rate) + " " + p.label + " 1\n";
  for (const auto& p : r.dominated) s += fmt(p.delta_t) + " " + fmt(p.bd_rate) + " " + p.label + " 0\n";
  return s;
}

std::string meta_dump(const MetadataFile& m, std::optional<std::size_t> ctu_index) {
  std::ostringstream out;
  const FrameGeometry geo = m.geometry();
  out << "version " << static_cast<int>(m.version) << "\n"
      << "frame " << m.frame_w << "x" << m.frame_h << "\n"
      << "ctu " << m.ctu << "\n"
      << "qp " << m.qp << "\n"
      << "effort " << effort_name(m.effort) << "\n"
      << "ctu_count " << m.trees.size() << " (" << m.frame_count() << " frames of " << geo.ctu_count() << ")\n";
  if (ctu_index) {
    if (*ctu_index >= m.trees.size()) {
      fail(Errc::out_of_range, "CTU index " + std::to_string(*ctu_index) + " >= CTU count " +
                                   std::to_string(m.trees.size()));
    }
    out << "CTU " << *ctu_index << ": " << preorder_modes(m.trees[*ctu_index]) << "\n";
    return out.str();
  }
  for (std::size_t i = 0; i < m.trees.size(); ++i) out << "CTU " << i << ": " << preorder_modes(m.trees[i]) << "\n";
  return out.str();
}

std::pair<std::string, bool> meta_diff(const MetadataFile& a, const MetadataFile& b) {
  if (a.frame_w != b.frame_w || a.frame_h != b.frame_h || a.ctu != b.ctu || a.trees.size() != b.trees.size()) {
    fail(Errc::dimension_mismatch, "metadata files describe different CTU grids");
  }
  std::ostringstream out;
  std::size_t equal = 0;
  for (std::size_t i = 0; i < a.trees.size(); ++i) {
    const bool same = a.trees[i] == b.trees[i];
    equal += same;
    out << "CTU " << i << ": " << (same ? "equal" : "differs") << "\n";
  }
  const bool all = equal == a.trees.size();
  out << equal << "/" << a.trees.size() << " CTUs equal" << (all ? " (all equal)" : "") << "\n";
  return {out.str(), all};
}

std::string depth_stats_header() { return "file,equal,deeper,shallower,mean_depth"; }

std::string depth_stats_row(const std::string& name, const DepthAgreement& a, double mean_depth) {
  return name + "," + fmt(a.equal) + "," + fmt(a.deeper) + "," + fmt(a.shallower) + "," + fmt(mean_depth);
}

}  // namespace mrenc
