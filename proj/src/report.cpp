#include "safeseg/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>

#include "safeseg/errors.hpp"
#include "safeseg/version.hpp"

namespace safeseg {

namespace {

// Number of terminal columns a UTF-8 string occupies; counts code points,
// which is enough for the dash and letters used here.
std::size_t display_width(const std::string& s) {
  std::size_t width = 0;
  for (unsigned char c : s)
    if ((c & 0xC0) != 0x80) ++width;
  return width;
}

std::string percent_cell(double fraction) {
  return std::isnan(fraction) ? "—" : format_percent(fraction);
}

// %.17g round-trips any double exactly.
std::string full_precision(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

// Aligned text table. left_columns columns are left-aligned, the rest
// (scores) right-aligned.
void write_table(std::ostream& out, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows,
                 std::size_t left_columns) {
  std::vector<std::size_t> widths;
  for (const std::string& cell : header) widths.push_back(display_width(cell));
  for (const auto& row : rows)
    for (std::size_t i = 0; i < row.size(); ++i)
      widths[i] = std::max(widths[i], display_width(row[i]));

  auto emit_row = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::string pad(widths[i] - display_width(row[i]), ' ');
      if (i) out << "  ";
      if (i < left_columns) {
        out << row[i];
        if (i + 1 < row.size()) out << pad;
      } else {
        out << pad << row[i];
      }
    }
    out << '\n';
  };
  emit_row(header);
  for (const auto& row : rows) emit_row(row);
}

}  // namespace

std::vector<LeaderboardEntry> build_leaderboard(
    const std::vector<std::pair<std::string, MetricSummary>>& results) {
  if (results.empty()) throw ValidationError("leaderboard needs at least one entry");

  std::vector<LeaderboardEntry> entries;
  std::set<std::string> names;
  for (const auto& [name, summary] : results) {
    if (!names.insert(name).second)
      throw ValidationError("duplicate leaderboard name \"" + name + "\"");
    LeaderboardEntry entry;
    entry.name = name;
    entry.miou = summary.miou;
    entry.smiou = summary.smiou;
    auto tp = summary.subset_smiou.find("tp");
    entry.subset_tp = tp == summary.subset_smiou.end()
                          ? std::numeric_limits<double>::quiet_NaN()
                          : tp->second;
    entries.push_back(std::move(entry));
  }

  // Descending SmIoU, ties by descending tp score (absent ranks last), then
  // name for a total order.
  auto tp_key = [](const LeaderboardEntry& e) {
    return std::isnan(e.subset_tp) ? -std::numeric_limits<double>::infinity()
                                   : e.subset_tp;
  };
  std::sort(entries.begin(), entries.end(),
            [&](const LeaderboardEntry& a, const LeaderboardEntry& b) {
              if (a.smiou != b.smiou) return a.smiou > b.smiou;
              if (tp_key(a) != tp_key(b)) return tp_key(a) > tp_key(b);
              return a.name < b.name;
            });
  for (std::size_t i = 0; i < entries.size(); ++i) entries[i].rank = int(i + 1);
  return entries;
}

void write_leaderboard(std::ostream& out,
                       const std::vector<LeaderboardEntry>& entries) {
  std::vector<std::vector<std::string>> rows;
  for (const LeaderboardEntry& entry : entries)
    rows.push_back({std::to_string(entry.rank), entry.name,
                    percent_cell(entry.miou), percent_cell(entry.smiou),
                    percent_cell(entry.subset_tp)});
  write_table(out, {"rank", "submission", "mIoU", "SmIoU", "SmIoU(tp)"}, rows,
              2);
}

ClasswiseTable build_classwise(const MetricSummary& summary,
                               const LabelHierarchy& h,
                               const std::vector<std::string>& selection) {
  ClasswiseTable table;
  for (const std::string& name : selection) {
    ClassId id = h.leaf_id(name);
    const ClassMetrics& cm = summary.per_class.at(id);
    table.rows.push_back(ClasswiseRow{name, cm.iou, cm.safe_iou});
  }
  return table;
}

void write_classwise(std::ostream& out, const ClasswiseTable& table) {
  std::vector<std::vector<std::string>> rows;
  for (const ClasswiseRow& row : table.rows)
    rows.push_back({row.name, percent_cell(row.iou), percent_cell(row.safe_iou)});
  write_table(out, {"class", "IoU", "Safe IoU"}, rows, 1);
}

void write_classwise_csv(std::ostream& out, const ClasswiseTable& table) {
  out << "class,iou,safe_iou\n";
  for (const ClasswiseRow& row : table.rows) {
    out << row.name << ',';
    if (!std::isnan(row.iou)) out << full_precision(row.iou);
    out << ',';
    if (!std::isnan(row.safe_iou)) out << full_precision(row.safe_iou);
    out << '\n';
  }
}

HistogramSpec build_histogram(const std::vector<ImageScore>& per_image,
                              int bin_width) {
  static constexpr int kWidths[] = {1, 2, 4, 5, 10};
  if (std::find(std::begin(kWidths), std::end(kWidths), bin_width) ==
      std::end(kWidths))
    throw ConfigError("histogram bin width must be one of 1, 2, 4, 5, 10");

  HistogramSpec hist;
  hist.bin_width = bin_width;
  std::size_t bins = std::size_t(200 / bin_width);
  hist.miou_counts.assign(bins, 0);
  hist.smiou_counts.assign(bins, 0);

  auto bin_of = [&](double fraction, const char* series) {
    if (std::isnan(fraction))
      throw ValidationError(std::string("histogram input has an undefined ") +
                            series + " score");
    double percent = fraction * 100.0;
    if (percent < -100.0 || percent > 100.0)
      throw ValidationError("score outside [-100, 100] percent");
    // Left-closed bins; the top edge folds into the last bin.
    std::size_t index = std::size_t(std::floor((percent + 100.0) / bin_width));
    return std::min(index, bins - 1);
  };
  for (const ImageScore& score : per_image) {
    ++hist.miou_counts[bin_of(score.miou, "miou")];
    ++hist.smiou_counts[bin_of(score.smiou, "smiou")];
  }
  return hist;
}

void write_histogram_csv(std::ostream& out, const HistogramSpec& hist,
                         bool smiou_series) {
  const auto& counts = smiou_series ? hist.smiou_counts : hist.miou_counts;
  out << "bin_left,bin_right,count\n";
  for (std::size_t i = 0; i < counts.size(); ++i) {
    int left = -100 + hist.bin_width * int(i);
    out << left << ',' << left + hist.bin_width << ',' << counts[i] << '\n';
  }
}

ColormapDiff render_colormap_diff(const LabelMap& gt, const LabelMap& pred,
                                  const LabelHierarchy& h) {
  if (!gt.same_shape(pred))
    throw ValidationError("diff rendering: gt/pred shapes differ");
  if (!h.has_full_palette())
    throw ConfigError("diff rendering needs a palette entry for every class");

  std::vector<std::array<std::uint8_t, 3>> palette(h.num_leaves());
  for (std::size_t c = 0; c < h.num_leaves(); ++c)
    palette[c] = *h.palette_color(ClassId(c));
  constexpr std::array<std::uint8_t, 3> kBlack{0, 0, 0};
  constexpr std::array<std::uint8_t, 3> kHighlight{255, 0, 0};

  ColormapDiff diff;
  auto init = [&](png_io::RgbImage& image) {
    image.width = gt.width;
    image.height = gt.height;
    image.pixels.resize(std::size_t(gt.width) * gt.height * 3);
  };
  init(diff.gt_color);
  init(diff.pred_color);
  init(diff.overlay);

  for (std::size_t i = 0; i < gt.pixels.size(); ++i) {
    ClassId g = gt.pixels[i];
    ClassId p = pred.pixels[i];
    const auto& g_color = g == kIgnoreClass ? kBlack : palette.at(g);
    const auto& p_color = p == kIgnoreClass ? kBlack : palette.at(p);
    bool highlight = g != kIgnoreClass && g != p;
    if (highlight) ++diff.highlighted;
    for (int ch = 0; ch < 3; ++ch) {
      diff.gt_color.pixels[3 * i + ch] = g_color[ch];
      diff.pred_color.pixels[3 * i + ch] = p_color[ch];
      diff.overlay.pixels[3 * i + ch] =
          highlight ? kHighlight[ch] : std::uint8_t(p_color[ch] / 2);
    }
  }
  return diff;
}

nlohmann::ordered_json report_to_json(const RunReport& report) {
  nlohmann::ordered_json doc;
  doc["tool"] = {{"name", kToolName}, {"version", kVersion}};
  doc["dataset"] = report.dataset_name;
  char hash[20];
  std::snprintf(hash, sizeof(hash), "%016llx",
                (unsigned long long)report.hierarchy_hash);
  doc["hierarchy"] = {{"name", report.hierarchy_name}, {"hash", hash}};
  doc["important_set"] = report.important_set;
  doc["images"] = report.image_count;
  doc["classes"] = report.class_names;

  auto number_or_null = [](double v) {
    return std::isnan(v) ? nlohmann::ordered_json(nullptr)
                         : nlohmann::ordered_json(v);
  };
  nlohmann::ordered_json overall;
  overall["miou"] = report.overall.miou;
  overall["smiou"] = report.overall.smiou;
  nlohmann::ordered_json subsets(nlohmann::json::value_t::object);
  for (const auto& [name, value] : report.overall.subset_smiou)
    subsets[name] = number_or_null(value);
  overall["subset_smiou"] = std::move(subsets);
  nlohmann::ordered_json per_class = nlohmann::ordered_json::array();
  for (const ClassMetrics& cm : report.overall.per_class) {
    nlohmann::ordered_json row;
    row["name"] = report.class_names.at(cm.id);
    row["present"] = cm.present;
    row["iou"] = number_or_null(cm.iou);
    row["safe_iou"] = number_or_null(cm.safe_iou);
    per_class.push_back(std::move(row));
  }
  overall["per_class"] = std::move(per_class);
  doc["overall"] = std::move(overall);

  nlohmann::ordered_json images = nlohmann::ordered_json::array();
  for (const ImageScore& score : report.per_image) {
    nlohmann::ordered_json row;
    row["key"] = score.key;
    row["condition"] = score.condition;
    row["miou"] = number_or_null(score.miou);
    row["smiou"] = number_or_null(score.smiou);
    images.push_back(std::move(row));
  }
  doc["per_image"] = std::move(images);
  doc["histogram_bin_width"] = report.histogram_bin_width;
  return doc;
}

RunReport report_from_json(const nlohmann::json& doc) {
  try {
    RunReport report;
    report.dataset_name = doc.at("dataset").get<std::string>();
    report.hierarchy_name = doc.at("hierarchy").at("name").get<std::string>();
    report.hierarchy_hash =
        std::stoull(doc.at("hierarchy").at("hash").get<std::string>(), nullptr, 16);
    report.important_set = doc.at("important_set").get<std::string>();
    report.image_count = doc.at("images").get<std::size_t>();
    report.class_names = doc.at("classes").get<std::vector<std::string>>();
    report.histogram_bin_width = doc.at("histogram_bin_width").get<int>();

    auto number = [](const nlohmann::json& v) {
      return v.is_null() ? std::numeric_limits<double>::quiet_NaN()
                         : v.get<double>();
    };
    const nlohmann::json& overall = doc.at("overall");
    report.overall.miou = overall.at("miou").get<double>();
    report.overall.smiou = overall.at("smiou").get<double>();
    report.overall.important_set = report.important_set;
    for (const auto& [name, value] : overall.at("subset_smiou").items())
      report.overall.subset_smiou[name] = number(value);
    ClassId next_id = 0;
    for (const nlohmann::json& row : overall.at("per_class")) {
      ClassMetrics cm;
      cm.id = next_id++;
      cm.present = row.at("present").get<bool>();
      cm.iou = number(row.at("iou"));
      cm.safe_iou = number(row.at("safe_iou"));
      report.overall.per_class.push_back(cm);
    }
    if (report.overall.per_class.size() != report.class_names.size())
      throw ValidationError("report: class list and per_class rows disagree");

    for (const nlohmann::json& row : doc.at("per_image")) {
      ImageScore score;
      score.key = row.at("key").get<std::string>();
      score.condition = row.at("condition").get<std::string>();
      score.miou = number(row.at("miou"));
      score.smiou = number(row.at("smiou"));
      report.per_image.push_back(std::move(score));
    }
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed report: ") + e.what());
  }
}

void emit_report(const RunReport& report, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + out_dir.string());

  auto open = [&](const char* name) {
    std::ofstream out(out_dir / name, std::ios::binary);
    if (!out) throw IoError(std::string("cannot write ") + name);
    return out;
  };

  {
    auto out = open("report.json");
    out << report_to_json(report).dump(2) << '\n';
  }
  {
    // All classes in config order; assembled from the report itself so emit
    // never needs the config file.
    ClasswiseTable table;
    for (const ClassMetrics& cm : report.overall.per_class)
      table.rows.push_back(ClasswiseRow{report.class_names.at(cm.id), cm.iou,
                                        cm.safe_iou});
    auto out = open("report.csv");
    write_classwise_csv(out, table);
  }
  {
    auto leaderboard = build_leaderboard({{report.dataset_name, report.overall}});
    auto out = open("leaderboard.txt");
    write_leaderboard(out, leaderboard);
  }
  {
    std::vector<ImageScore> scored;
    for (const ImageScore& score : report.per_image)
      if (!std::isnan(score.miou) && !std::isnan(score.smiou))
        scored.push_back(score);
    HistogramSpec hist = build_histogram(scored, report.histogram_bin_width);
    auto miou_out = open("hist_miou.csv");
    write_histogram_csv(miou_out, hist, false);
    auto smiou_out = open("hist_smiou.csv");
    write_histogram_csv(smiou_out, hist, true);
  }
}

}  // namespace safeseg
