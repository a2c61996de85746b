#include "safeseg/submission.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "safeseg/errors.hpp"
#include "safeseg/label_map.hpp"
#include "safeseg/png_io.hpp"

namespace safeseg {

namespace fs = std::filesystem;

std::vector<ManifestEntry> load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest: " + path.string());

  std::vector<ManifestEntry> entries;
  std::set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    ManifestEntry entry;
    std::string width, height;
    if (!std::getline(fields, entry.key, '\t') ||
        !std::getline(fields, width, '\t') || !std::getline(fields, height, '\t'))
      throw ValidationError("manifest line " + std::to_string(line_no) +
                            ": expected key<TAB>width<TAB>height");
    try {
      entry.width = std::stoul(width);
      entry.height = std::stoul(height);
    } catch (const std::exception&) {
      throw ValidationError("manifest line " + std::to_string(line_no) +
                            ": non-numeric dimensions");
    }
    if (entry.key.empty() || entry.width == 0 || entry.height == 0)
      throw ValidationError("manifest line " + std::to_string(line_no) +
                            ": empty key or zero dimension");
    if (!seen.insert(entry.key).second)
      throw ValidationError("manifest repeats key \"" + entry.key + "\"");
    entries.push_back(std::move(entry));
  }
  return entries;
}

void save_manifest(std::ostream& out, const std::vector<ManifestEntry>& entries) {
  for (const ManifestEntry& entry : entries)
    out << entry.key << '\t' << entry.width << '\t' << entry.height << '\n';
}

SubmissionReport validate_submission(const fs::path& pred_root,
                                     const std::vector<ManifestEntry>& manifest,
                                     const LabelHierarchy& hierarchy,
                                     bool allow_ignore_in_pred) {
  if (!fs::is_directory(pred_root))
    throw IoError("prediction root is not a directory: " + pred_root.string());

  SubmissionReport report;
  auto flag = [&](const std::string& key, std::string message) {
    report.issues.push_back(SubmissionIssue{key, std::move(message)});
  };

  // Index predictions by stem; a duplicate stem is ambiguous and reported
  // against both files.
  std::map<std::string, fs::path> by_stem;
  std::string lowered;
  for (const auto& entry : fs::recursive_directory_iterator(pred_root)) {
    if (!entry.is_regular_file()) continue;
    lowered = entry.path().extension().string();
    std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (lowered != ".png") continue;
    std::string stem = entry.path().stem().string();
    auto [it, inserted] = by_stem.emplace(stem, entry.path());
    if (!inserted)
      flag("", "duplicate stem \"" + stem + "\": " + it->second.string() +
               " and " + entry.path().string());
  }

  std::set<std::string> claimed;
  for (const ManifestEntry& expected : manifest) {
    std::string stem = fs::path(expected.key).stem().string();
    auto it = by_stem.find(stem);
    if (it == by_stem.end()) {
      flag(expected.key, "missing prediction file");
      continue;
    }
    claimed.insert(stem);
    ++report.files_checked;
    try {
      LabelMap map = load_label_map(it->second, hierarchy);
      if (map.width != expected.width || map.height != expected.height) {
        std::ostringstream msg;
        msg << "wrong dimensions: expected " << expected.width << "x"
            << expected.height << ", got " << map.width << "x" << map.height;
        flag(expected.key, msg.str());
      }
      if (!allow_ignore_in_pred) {
        std::uint64_t ignored = std::count(map.pixels.begin(), map.pixels.end(),
                                           kIgnoreClass);
        if (ignored)
          flag(expected.key, "contains the ignore label (" +
                                 std::to_string(ignored) + " pixels)");
      }
    } catch (const Error& e) {
      flag(expected.key, e.what());
    }
  }

  for (const auto& [stem, path] : by_stem)
    if (!claimed.count(stem))
      flag("", "unexpected file: " + fs::relative(path, pred_root).generic_string());

  return report;
}

}  // namespace safeseg
