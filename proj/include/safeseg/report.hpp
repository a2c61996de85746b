#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "safeseg/hierarchy.hpp"
#include "safeseg/label_map.hpp"
#include "safeseg/metrics.hpp"
#include "safeseg/png_io.hpp"

#include <json.hpp>

namespace safeseg {

struct LeaderboardEntry {
  int rank = 0;
  std::string name;
  double miou = 0.0;
  double smiou = 0.0;
  double subset_tp = 0.0;  // NaN when the submission has no "tp" subset score
};

// Ranks by descending smiou, ties by descending subset_tp, then by name.
// Throws ValidationError on an empty list or duplicate names.
std::vector<LeaderboardEntry> build_leaderboard(
    const std::vector<std::pair<std::string, MetricSummary>>& results);

void write_leaderboard(std::ostream& out,
                       const std::vector<LeaderboardEntry>& entries);

struct ClasswiseRow {
  std::string name;
  double iou = 0.0;       // NaN when undefined
  double safe_iou = 0.0;  // NaN when undefined
};

struct ClasswiseTable {
  std::vector<ClasswiseRow> rows;
};

// One row per selected class, in the given order. Unknown names throw
// ConfigError; undefined scores stay NaN and render as "—".
ClasswiseTable build_classwise(const MetricSummary& summary,
                               const LabelHierarchy& h,
                               const std::vector<std::string>& selection);

void write_classwise(std::ostream& out, const ClasswiseTable& table);
void write_classwise_csv(std::ostream& out, const ClasswiseTable& table);

// Per-image score distribution over [-100, 100] percent. Bins are
// left-closed right-open except the last, which also includes 100.
struct HistogramSpec {
  int bin_width = 5;  // percent; must divide 200: one of 1, 2, 4, 5, 10
  std::vector<std::uint64_t> miou_counts;
  std::vector<std::uint64_t> smiou_counts;

  std::size_t num_bins() const { return miou_counts.size(); }
  double bin_left(std::size_t i) const { return -100.0 + double(bin_width) * i; }
};

struct ImageScore {
  std::string key;
  std::string condition;
  double miou = 0.0;   // fractions, not percent
  double smiou = 0.0;
};

HistogramSpec build_histogram(const std::vector<ImageScore>& per_image,
                              int bin_width);

// One CSV per series: header then "bin_left,bin_right,count" rows.
void write_histogram_csv(std::ostream& out, const HistogramSpec& hist,
                         bool smiou_series);

struct ColormapDiff {
  png_io::RgbImage gt_color;
  png_io::RgbImage pred_color;
  png_io::RgbImage overlay;           // dimmed prediction + highlight
  std::uint64_t highlighted = 0;      // disagreeing non-ignore pixels
};

// Requires a palette entry for every leaf (ConfigError otherwise) and
// matching shapes (ValidationError). Ignored gt pixels render black in the
// gt image and are never highlighted.
ColormapDiff render_colormap_diff(const LabelMap& gt, const LabelMap& pred,
                                  const LabelHierarchy& h);

// Everything cmd_evaluate knows at the end of a run, bundled for emission.
struct RunReport {
  std::string dataset_name;
  std::string hierarchy_name;
  std::uint64_t hierarchy_hash = 0;  // content hash of the config file
  std::string important_set;
  std::size_t image_count = 0;
  MetricSummary overall;
  std::vector<std::string> class_names;
  std::vector<ImageScore> per_image;  // sorted by key
  int histogram_bin_width = 5;
};

// Machine form: full-precision doubles, stable key order, newline-terminated.
// Byte-identical for identical inputs regardless of thread count.
nlohmann::ordered_json report_to_json(const RunReport& report);
RunReport report_from_json(const nlohmann::json& doc);

// Writes report.json, report.csv, leaderboard-free human outputs and the
// histogram CSV pair under out_dir.
void emit_report(const RunReport& report, const std::filesystem::path& out_dir);

}  // namespace safeseg
