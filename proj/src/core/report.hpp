#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "metrics.hpp"
#include "multirate.hpp"

namespace mrenc {

inline constexpr int kSchemaVersion = 1;

struct RunManifest {
  std::string input;
  std::vector<int> qps;
  std::vector<std::string> strategies;
  int ctu = kDefaultCtu;
  Effort effort = Effort::thorough;
  int max_total_depth = kDefaultMaxDepth;
  std::string output;
};

nlohmann::json manifest_json(const RunManifest& m);

/// Per-rung report. psnr/xpsnr_s are null when the rung is lossless.
nlohmann::json rung_json(const RungResult& r, const RunManifest* manifest);

nlohmann::json ladder_json(const LadderReport& report, const std::optional<LadderComparison>& cmp,
                           const RunManifest& manifest);

/// results.csv: one row per strategy, deltas against Default.
std::string results_csv_header();
std::string results_csv_row(Strategy s, const LadderComparison& cmp);

struct ParetoInput {
  std::vector<ParetoPoint> points;
  std::vector<std::string> skipped;  // rows with an empty x or y cell
};

enum class ParetoAxis { delta_ts, delta_tp, delta_work, bdr_xpsnr, bdr_psnr };

std::optional<ParetoAxis> parse_pareto_x(std::string_view s);  // deltaTS|deltaTP|deltaWork
std::optional<ParetoAxis> parse_pareto_y(std::string_view s);  // bdrx|bdrp

/// Reads x/y columns out of a results CSV. Throws malformed_input.
ParetoInput read_pareto_csv(const std::string& text, ParetoAxis x, ParetoAxis y);

nlohmann::json pareto_json(const ParetoResult& r, const ParetoInput& in);
/// Whitespace-separated table (x y label on_front) for gnuplot.
std::string pareto_table(const ParetoResult& r);

std::string meta_dump(const MetadataFile& m, std::optional<std::size_t> ctu_index);
/// Returns the text and whether every CTU matched.
std::pair<std::string, bool> meta_diff(const MetadataFile& a, const MetadataFile& b);

std::string depth_stats_header();
std::string depth_stats_row(const std::string& name, const DepthAgreement& a, double mean_depth);

}  // namespace mrenc
