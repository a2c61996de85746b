#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "safeseg/errors.hpp"
#include "safeseg/eval.hpp"
#include "safeseg/hierarchy.hpp"
#include "safeseg/label_map.hpp"
#include "safeseg/oracle.hpp"
#include "safeseg/pairing.hpp"
#include "safeseg/png_io.hpp"
#include "safeseg/report.hpp"
#include "safeseg/submission.hpp"
#include "safeseg/version.hpp"

namespace {

using namespace safeseg;

constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;
constexpr int kExitConfig = 4;

unsigned default_threads() {
  if (const char* env = std::getenv("SAFESEG_THREADS")) {
    char* end = nullptr;
    long value = std::strtol(env, &end, 10);
    if (end && *end == '\0' && value > 0) return unsigned(value);
    throw ConfigError("SAFESEG_THREADS must be a positive integer");
  }
  return 0;  // resolve_threads falls back to hardware concurrency
}

struct EvaluateArgs {
  std::string hierarchy;
  std::string gt_root;
  std::string pred_root;
  std::string important = "default";
  std::vector<std::string> subsets;
  bool no_default_subsets = false;
  bool lenient = false;
  std::string lenient_fallback;
  bool subset_self_penalty = false;
  unsigned threads = 0;
  std::string out_dir = "safeseg-out";
  int bin_width = 5;
  bool diffs = false;
  std::string name = "submission";
};

int cmd_evaluate(const EvaluateArgs& args) {
  LabelHierarchy h = LabelHierarchy::load(args.hierarchy);

  EvalOptions options;
  options.important_set = args.important;
  options.subset_penalty = args.subset_self_penalty
                               ? SubsetPenalty::kSubsetAsImportant
                               : SubsetPenalty::kRunImportant;
  options.accumulate.strict = !args.lenient;
  if (!args.lenient_fallback.empty())
    options.accumulate.lenient_fallback = h.leaf_id(args.lenient_fallback);
  options.threads = args.threads ? args.threads : default_threads();

  options.subsets = args.subsets;
  if (options.subsets.empty() && !args.no_default_subsets) {
    // Score the conventional traffic-participant subset when the config
    // defines it.
    for (const std::string& name : h.important_set_names())
      if (name == "tp") options.subsets.push_back(name);
  }

  std::vector<PairedImage> pairs = pair_images(args.gt_root, args.pred_root);
  EvalResult result = evaluate_pairs(pairs, h, options);

  RunReport report;
  report.dataset_name = args.name;
  report.hierarchy_name = h.name();
  report.hierarchy_hash = hash_file(args.hierarchy);
  report.important_set = args.important;
  report.image_count = pairs.size();
  report.overall = result.overall;
  report.class_names = h.leaf_names();
  report.per_image = result.per_image;
  report.histogram_bin_width = args.bin_width;
  emit_report(report, args.out_dir);

  {
    std::ofstream out(std::filesystem::path(args.out_dir) / "confusion.txt",
                      std::ios::binary);
    if (!out) throw IoError("cannot write confusion.txt");
    result.confusion.dump(out, h.leaf_names());
  }

  if (args.diffs) {
    std::filesystem::path diff_dir = std::filesystem::path(args.out_dir) / "diff";
    for (const PairedImage& pair : pairs) {
      LabelMap gt = load_label_map(pair.gt_path, h);
      LabelMap pred = load_label_map(pair.pred_path, h);
      ColormapDiff diff = render_colormap_diff(gt, pred, h);
      std::filesystem::path target = diff_dir / (pair.key + ".png");
      std::error_code ec;
      std::filesystem::create_directories(target.parent_path(), ec);
      if (ec) throw IoError("cannot create " + target.parent_path().string());
      png_io::write_rgb8(target, diff.overlay);
    }
  }

  std::string line = "mIoU " + format_percent(result.overall.miou) + " SmIoU " +
                     format_percent(result.overall.smiou);
  auto tp = result.overall.subset_smiou.find("tp");
  if (tp != result.overall.subset_smiou.end())
    line += " SmIoU(tp) " + format_percent(tp->second);
  std::cout << line << "\n";
  return 0;
}

int cmd_validate(const std::string& hierarchy_path, const std::string& manifest_path,
                 const std::string& pred_root, bool allow_ignore,
                 const std::string& report_path) {
  LabelHierarchy h = LabelHierarchy::load(hierarchy_path);
  std::vector<ManifestEntry> manifest = load_manifest(manifest_path);
  SubmissionReport report =
      validate_submission(pred_root, manifest, h, allow_ignore);

  for (const SubmissionIssue& issue : report.issues)
    std::cerr << (issue.key.empty() ? std::string("(submission)") : issue.key)
              << ": " << issue.message << "\n";
  std::cerr << (report.ok() ? "PASS" : "FAIL") << ": " << report.files_checked
            << " file(s) checked, " << report.issues.size() << " issue(s)\n";

  if (!report_path.empty()) {
    nlohmann::ordered_json doc;
    doc["ok"] = report.ok();
    doc["files_checked"] = report.files_checked;
    nlohmann::ordered_json issues = nlohmann::ordered_json::array();
    for (const SubmissionIssue& issue : report.issues)
      issues.push_back({{"key", issue.key}, {"message", issue.message}});
    doc["issues"] = std::move(issues);
    std::ofstream out(report_path, std::ios::binary);
    if (!out) throw IoError("cannot write " + report_path);
    out << doc.dump(2) << "\n";
  }
  return report.ok() ? 0 : kExitValidation;
}

int cmd_distances(const std::string& hierarchy_path,
                  const std::vector<std::string>& pair) {
  LabelHierarchy h = LabelHierarchy::load(hierarchy_path);
  auto show = [](double td) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", td);
    return std::string(buf);
  };
  if (!pair.empty()) {
    double td = h.tree_distance(h.leaf_id(pair[0]), h.leaf_id(pair[1]));
    std::cout << show(td) << "\n";
    return 0;
  }
  std::cout << "class";
  for (const std::string& name : h.leaf_names()) std::cout << '\t' << name;
  std::cout << "\n";
  for (ClassId a = 0; a < h.num_leaves(); ++a) {
    std::cout << h.leaf_name(a);
    for (ClassId b = 0; b < h.num_leaves(); ++b)
      std::cout << '\t' << show(h.tree_distance(a, b));
    std::cout << "\n";
  }
  return 0;
}

RunReport load_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open report: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("invalid report JSON in " + path + ": " + e.what());
  }
  return report_from_json(doc);
}

int cmd_report(const std::vector<std::string>& inputs, const std::string& out_dir,
               int bin_width) {
  std::vector<RunReport> reports;
  for (const std::string& path : inputs) reports.push_back(load_report(path));

  if (reports.size() == 1) {
    RunReport report = std::move(reports.front());
    if (bin_width > 0) report.histogram_bin_width = bin_width;
    emit_report(report, out_dir);
    return 0;
  }

  // Several stored runs: rank them against each other.
  std::vector<std::pair<std::string, MetricSummary>> results;
  for (const RunReport& report : reports)
    results.emplace_back(report.dataset_name, report.overall);
  auto leaderboard = build_leaderboard(results);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + out_dir);
  std::ofstream out(std::filesystem::path(out_dir) / "leaderboard.txt",
                    std::ios::binary);
  if (!out) throw IoError("cannot write leaderboard.txt");
  write_leaderboard(out, leaderboard);
  write_leaderboard(std::cout, leaderboard);
  return 0;
}

int cmd_histogram(const std::string& input, const std::string& out_dir,
                  int bin_width) {
  RunReport report = load_report(input);
  if (bin_width > 0) report.histogram_bin_width = bin_width;
  std::vector<ImageScore> scored;
  for (const ImageScore& score : report.per_image)
    if (!std::isnan(score.miou) && !std::isnan(score.smiou))
      scored.push_back(score);
  HistogramSpec hist = build_histogram(scored, report.histogram_bin_width);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + out_dir);
  auto open = [&](const char* name) {
    std::ofstream out(std::filesystem::path(out_dir) / name, std::ios::binary);
    if (!out) throw IoError(std::string("cannot write ") + name);
    return out;
  };
  auto miou_out = open("hist_miou.csv");
  write_histogram_csv(miou_out, hist, false);
  auto smiou_out = open("hist_smiou.csv");
  write_histogram_csv(smiou_out, hist, true);
  return 0;
}

int cmd_diff(const std::string& hierarchy_path, const std::string& gt_path,
             const std::string& pred_path, const std::string& out_dir) {
  LabelHierarchy h = LabelHierarchy::load(hierarchy_path);
  LabelMap gt = load_label_map(gt_path, h);
  LabelMap pred = load_label_map(pred_path, h);
  ColormapDiff diff = render_colormap_diff(gt, pred, h);

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + out_dir);
  std::filesystem::path dir(out_dir);
  png_io::write_rgb8(dir / "gt.png", diff.gt_color);
  png_io::write_rgb8(dir / "pred.png", diff.pred_color);
  png_io::write_rgb8(dir / "overlay.png", diff.overlay);
  std::cout << "highlighted " << diff.highlighted << "\n";
  return 0;
}

struct GenArgs {
  std::uint64_t seed = 1;
  std::string out_dir;
  int images = 1;
  oracle::InstanceParams params;
};

int cmd_gen(const GenArgs& args) {
  std::error_code ec;
  std::filesystem::path out(args.out_dir);
  std::filesystem::create_directories(out / "gt", ec);
  std::filesystem::create_directories(out / "pred", ec);
  if (ec) throw IoError("cannot create output directory: " + args.out_dir);

  // One hierarchy for the whole batch, taken from the first instance. Later
  // instances pin the leaf count to the first one's so their label maps stay
  // valid under the shared config.
  oracle::RandomInstance first = oracle::generate(args.seed, args.params);
  {
    std::ofstream config(out / "config.json", std::ios::binary);
    if (!config) throw IoError("cannot write config.json");
    config << first.hierarchy.to_json().dump(2) << "\n";
  }
  oracle::InstanceParams rest = args.params;
  rest.min_leaves = rest.max_leaves = int(first.hierarchy.num_leaves());

  std::vector<ManifestEntry> manifest;
  for (int i = 0; i < args.images; ++i) {
    oracle::RandomInstance instance =
        i == 0 ? std::move(first)
               : oracle::generate(args.seed + std::uint64_t(i), rest);
    char name[32];
    std::snprintf(name, sizeof(name), "img_%04d", i);

    auto to_raster = [&](const LabelMap& map) {
      LabelMap raw(map.width, map.height);
      for (std::size_t p = 0; p < map.pixels.size(); ++p)
        raw.pixels[p] = map.pixels[p] == kIgnoreClass ? 255 : map.pixels[p];
      return raw;
    };
    save_label_map(out / "gt" / (std::string(name) + ".png"),
                   to_raster(instance.gt));
    save_label_map(out / "pred" / (std::string(name) + ".png"),
                   to_raster(instance.pred));
    manifest.push_back(
        ManifestEntry{name, instance.gt.width, instance.gt.height});
  }

  std::ofstream manifest_out(out / "manifest.tsv", std::ios::binary);
  if (!manifest_out) throw IoError("cannot write manifest.tsv");
  save_manifest(manifest_out, manifest);
  std::cout << "wrote " << args.images << " image pair(s) under " << args.out_dir
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(kToolName) +
               " - hierarchy-aware segmentation scoring"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  EvaluateArgs eval_args;
  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "Score a prediction folder against ground truth");
  evaluate->add_option("--hierarchy", eval_args.hierarchy, "Hierarchy config JSON")
      ->required();
  evaluate->add_option("--gt", eval_args.gt_root, "Ground-truth root")->required();
  evaluate->add_option("--pred", eval_args.pred_root, "Prediction root")
      ->required();
  evaluate->add_option("--important", eval_args.important,
                       "Important-set name from the config");
  evaluate->add_option("--subset", eval_args.subsets,
                       "Subset name(s) to score separately");
  evaluate->add_flag("--no-default-subsets", eval_args.no_default_subsets,
                     "Do not score the tp subset automatically");
  bool strict_flag = false;
  evaluate->add_flag("--strict", strict_flag,
                     "Reject predictions containing the ignore id (default)");
  evaluate->add_flag("--lenient", eval_args.lenient,
                     "Remap predicted ignore pixels to the fallback class");
  evaluate->add_option("--lenient-fallback", eval_args.lenient_fallback,
                       "Fallback class name for --lenient");
  evaluate->add_option("--threads", eval_args.threads,
                       "Worker threads (default: available parallelism)");
  evaluate->add_option("--out", eval_args.out_dir, "Output directory");
  evaluate->add_option("--bin-width", eval_args.bin_width,
                       "Histogram bin width in percent");
  evaluate->add_flag("--diffs", eval_args.diffs,
                     "Also render per-image disagreement overlays");
  evaluate->add_option("--name", eval_args.name, "Submission name for reports");

  std::string val_hierarchy, val_manifest, val_pred, val_report;
  bool val_allow_ignore = false;
  CLI::App* validate =
      app.add_subcommand("validate", "Check a submission against a manifest");
  validate->add_option("--hierarchy", val_hierarchy, "Hierarchy config JSON")
      ->required();
  validate->add_option("--manifest", val_manifest, "Manifest TSV")->required();
  validate->add_option("--pred", val_pred, "Prediction root")->required();
  validate->add_flag("--allow-ignore", val_allow_ignore,
                     "Permit the ignore id in predictions");
  validate->add_option("--report", val_report, "Write diagnostics JSON here");

  std::string dist_hierarchy;
  std::vector<std::string> dist_pair;
  CLI::App* distances =
      app.add_subcommand("distances", "Print tree distances between classes");
  distances->add_option("--hierarchy", dist_hierarchy, "Hierarchy config JSON")
      ->required();
  distances->add_option("classes", dist_pair, "Class pair (omit for full matrix)")
      ->expected(0, 2);

  std::vector<std::string> report_inputs;
  std::string report_out = "safeseg-out";
  int report_bin_width = 0;
  CLI::App* report_cmd = app.add_subcommand(
      "report", "Regenerate artifacts from stored machine reports");
  report_cmd->add_option("--in", report_inputs, "report.json file(s)")
      ->required();
  report_cmd->add_option("--out", report_out, "Output directory");
  report_cmd->add_option("--bin-width", report_bin_width,
                         "Override histogram bin width");

  std::string hist_input, hist_out = "safeseg-out";
  int hist_bin_width = 0;
  CLI::App* histogram =
      app.add_subcommand("histogram", "Rebuild histogram CSVs from a report");
  histogram->add_option("--in", hist_input, "report.json")->required();
  histogram->add_option("--out", hist_out, "Output directory");
  histogram->add_option("--bin-width", hist_bin_width, "Histogram bin width");

  std::string diff_hierarchy, diff_gt, diff_pred, diff_out = "safeseg-out";
  CLI::App* diff =
      app.add_subcommand("diff", "Render colormaps and a disagreement overlay");
  diff->add_option("--hierarchy", diff_hierarchy, "Hierarchy config JSON")
      ->required();
  diff->add_option("--gt", diff_gt, "Ground-truth label PNG")->required();
  diff->add_option("--pred", diff_pred, "Prediction label PNG")->required();
  diff->add_option("--out", diff_out, "Output directory");

  GenArgs gen_args;
  CLI::App* gen =
      app.add_subcommand("gen", "Write a random synthetic dataset for testing");
  gen->add_option("--seed", gen_args.seed, "Instance seed");
  gen->add_option("--out", gen_args.out_dir, "Output directory")->required();
  gen->add_option("--images", gen_args.images, "Number of image pairs")
      ->check(CLI::PositiveNumber);
  gen->add_option("--min-depth", gen_args.params.min_depth, "Minimum tree depth");
  gen->add_option("--max-depth", gen_args.params.max_depth, "Maximum tree depth");
  gen->add_option("--min-leaves", gen_args.params.min_leaves, "Minimum leaf count");
  gen->add_option("--max-leaves", gen_args.params.max_leaves, "Maximum leaf count");
  gen->add_option("--min-side", gen_args.params.min_side, "Minimum image side");
  gen->add_option("--max-side", gen_args.params.max_side, "Maximum image side");
  gen->add_option("--ignore-prob", gen_args.params.ignore_probability,
                  "Per-pixel ignore probability");
  gen->add_option("--agreement", gen_args.params.agreement,
                  "Chance a predicted pixel copies ground truth");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (evaluate->parsed()) {
      if (strict_flag && eval_args.lenient)
        throw ConfigError("--strict and --lenient are mutually exclusive");
      return cmd_evaluate(eval_args);
    }
    if (validate->parsed())
      return cmd_validate(val_hierarchy, val_manifest, val_pred,
                          val_allow_ignore, val_report);
    if (distances->parsed()) {
      if (dist_pair.size() == 1)
        throw ConfigError("distances needs zero or two class names");
      return cmd_distances(dist_hierarchy, dist_pair);
    }
    if (report_cmd->parsed())
      return cmd_report(report_inputs, report_out, report_bin_width);
    if (histogram->parsed())
      return cmd_histogram(hist_input, hist_out, hist_bin_width);
    if (diff->parsed()) return cmd_diff(diff_hierarchy, diff_gt, diff_pred, diff_out);
    if (gen->parsed()) return cmd_gen(gen_args);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
