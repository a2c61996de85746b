#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "safeseg/hierarchy.hpp"

namespace safeseg {

// One expected submission entry: key plus the required image shape.
// Serialized one per line as "key<TAB>width<TAB>height".
struct ManifestEntry {
  std::string key;
  std::uint32_t width = 0;
  std::uint32_t height = 0;
};

std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path);
void save_manifest(std::ostream& out, const std::vector<ManifestEntry>& entries);

struct SubmissionIssue {
  std::string key;      // "" for directory-level problems
  std::string message;
};

struct SubmissionReport {
  std::size_t files_checked = 0;
  std::vector<SubmissionIssue> issues;
  bool ok() const { return issues.empty(); }
};

// Checks a prediction directory against the manifest: every key must have
// exactly one matching .png (by stem), with the manifest shape, containing
// only known label values. Extra prediction files are reported too. Collects
// issues instead of throwing so a submitter sees all problems at once.
SubmissionReport validate_submission(const std::filesystem::path& pred_root,
                                     const std::vector<ManifestEntry>& manifest,
                                     const LabelHierarchy& hierarchy,
                                     bool allow_ignore_in_pred = false);

}  // namespace safeseg
