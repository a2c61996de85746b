#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace safeseg {

// One matched ground-truth / prediction file pair. The key is the
// ground-truth path relative to its root, without extension; the condition
// tag is the key's first directory component ("" for flat layouts).
struct PairedImage {
  std::string key;
  std::string condition;
  std::filesystem::path gt_path;
  std::filesystem::path pred_path;
};

// Walks both roots for .png files and matches them by filename stem.
// Throws ValidationError when a stem is duplicated within one side, when a
// ground-truth image has no prediction, or when a prediction matches no
// ground truth. The result is sorted by key.
std::vector<PairedImage> pair_images(const std::filesystem::path& gt_root,
                                     const std::filesystem::path& pred_root);

}  // namespace safeseg
