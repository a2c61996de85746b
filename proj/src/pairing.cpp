#include "safeseg/pairing.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "safeseg/errors.hpp"

namespace safeseg {

namespace {

namespace fs = std::filesystem;

bool is_png(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext == ".png";
}

// stem -> relative path, with duplicate stems rejected: the flat prediction
// layout cannot address two files with the same name.
std::map<std::string, fs::path> collect_pngs(const fs::path& root,
                                             const char* side) {
  if (!fs::is_directory(root))
    throw IoError(std::string(side) + " root is not a directory: " + root.string());
  std::map<std::string, fs::path> by_stem;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file() || !is_png(entry.path())) continue;
    fs::path rel = fs::relative(entry.path(), root);
    std::string stem = entry.path().stem().string();
    auto [it, inserted] = by_stem.emplace(stem, rel);
    if (!inserted)
      throw ValidationError(std::string(side) + " has duplicate stem \"" + stem +
                            "\": " + it->second.string() + " and " + rel.string());
  }
  return by_stem;
}

}  // namespace

std::vector<PairedImage> pair_images(const fs::path& gt_root,
                                     const fs::path& pred_root) {
  auto gt_files = collect_pngs(gt_root, "ground-truth");
  auto pred_files = collect_pngs(pred_root, "prediction");

  std::vector<std::string> missing;
  std::vector<PairedImage> pairs;
  for (const auto& [stem, gt_rel] : gt_files) {
    std::string key = (gt_rel.parent_path() / gt_rel.stem()).generic_string();
    auto pred_it = pred_files.find(stem);
    if (pred_it == pred_files.end()) {
      missing.push_back(key);
      continue;
    }
    PairedImage pair;
    pair.key = key;
    auto first_sep = key.find('/');
    pair.condition = first_sep == std::string::npos ? "" : key.substr(0, first_sep);
    pair.gt_path = gt_root / gt_rel;
    pair.pred_path = pred_root / pred_it->second;
    pairs.push_back(std::move(pair));
    pred_files.erase(pred_it);
  }

  auto join = [](const std::vector<std::string>& keys) {
    std::ostringstream out;
    for (std::size_t i = 0; i < keys.size(); ++i) out << (i ? ", " : "") << keys[i];
    return out.str();
  };
  if (!missing.empty())
    throw ValidationError("missing predictions for: " + join(missing));
  if (!pred_files.empty()) {
    std::vector<std::string> extra;
    for (const auto& [stem, rel] : pred_files) extra.push_back(rel.generic_string());
    throw ValidationError("predictions match no ground truth: " + join(extra));
  }

  std::sort(pairs.begin(), pairs.end(),
            [](const PairedImage& a, const PairedImage& b) { return a.key < b.key; });
  return pairs;
}

}  // namespace safeseg
