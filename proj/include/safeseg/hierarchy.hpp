#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace safeseg {

// Dense index of an evaluation (leaf) class. Order is fixed by the config's
// "leaves" array.
using ClassId = std::uint16_t;

// Sentinel for ignored pixels in a remapped label map.
inline constexpr ClassId kIgnoreClass = 0xFFFF;

struct HierarchyNode {
  std::string name;
  int parent = -1;  // -1 for the root
  int depth = 0;    // root at depth 0
  std::vector<int> children;
};

// Named non-empty subset of the leaf classes.
struct ImportantSet {
  std::string name;
  std::vector<ClassId> members;  // sorted ascending, unique

  bool contains(ClassId c) const;
};

// Immutable rooted class tree with uniformly deep evaluation leaves.
//
// Distances between leaves are half the edge count of the connecting path.
// Edge counts are kept exact (integers); callers divide by two at use sites
// or go through tree_distance(). All queries are const and safe to share
// across threads.
class LabelHierarchy {
 public:
  // An empty hierarchy; only useful as a placeholder before assignment.
  LabelHierarchy() = default;

  // Builds a hierarchy from a parsed config document. Throws ConfigError on
  // malformed documents or structural violations (multiple roots, duplicate
  // names, non-uniform leaf depth).
  static LabelHierarchy from_json(const nlohmann::json& doc);

  // Parses a config file. Propagates from_json errors; throws IoError if the
  // file cannot be read.
  static LabelHierarchy load(const std::filesystem::path& path);

  // Emits a document that from_json() parses back to an equal hierarchy.
  nlohmann::ordered_json to_json() const;

  const std::string& name() const { return name_; }
  int levels() const { return levels_; }  // leaf depth n, root at 0
  std::size_t num_leaves() const { return leaf_names_.size(); }
  const std::vector<std::string>& leaf_names() const { return leaf_names_; }
  const std::string& leaf_name(ClassId c) const { return leaf_names_.at(c); }

  // Name lookup covers canonical leaf names and configured aliases.
  std::optional<ClassId> find_leaf(std::string_view name) const;
  ClassId leaf_id(std::string_view name) const;  // throws ConfigError

  // Exact edge count of the shortest path between two leaves.
  unsigned path_edges(ClassId a, ClassId b) const;
  // path_edges / 2.
  double tree_distance(ClassId a, ClassId b) const;
  // Row-major |C| x |C| matrix of path edge counts, precomputed at parse.
  const std::vector<unsigned>& edge_matrix() const { return edge_matrix_; }

  // Resolves a set name declared in the config ("default", "tp", ...).
  ImportantSet important_set(std::string_view name) const;
  // Builds a set from explicit leaf names. Throws ConfigError on unknown
  // names or an empty list.
  ImportantSet important_set_from(std::string_view set_name,
                                  const std::vector<std::string>& members) const;
  std::vector<std::string> important_set_names() const;

  std::uint32_t pixel_id(ClassId c) const { return pixel_ids_.at(c); }
  std::uint32_t ignore_raster_id() const { return ignore_id_; }
  // Raster value -> dense ClassId (the ignore value is not in this map).
  const std::unordered_map<std::uint32_t, ClassId>& raster_map() const {
    return raster_to_class_;
  }

  bool has_full_palette() const;
  std::optional<std::array<std::uint8_t, 3>> palette_color(ClassId c) const;

  const std::vector<HierarchyNode>& nodes() const { return nodes_; }

  bool operator==(const LabelHierarchy& other) const;

 private:
  std::string name_;
  int levels_ = 0;
  std::vector<HierarchyNode> nodes_;  // nodes_[0] is the root
  std::vector<int> leaf_nodes_;       // ClassId -> node index
  std::vector<std::string> leaf_names_;
  std::unordered_map<std::string, ClassId> leaf_lookup_;  // names + aliases
  std::map<std::string, std::string> aliases_;            // alias -> leaf name
  std::vector<std::uint32_t> pixel_ids_;
  std::unordered_map<std::uint32_t, ClassId> raster_to_class_;
  std::uint32_t ignore_id_ = 255;
  std::map<std::string, std::vector<ClassId>> important_sets_;
  std::vector<std::optional<std::array<std::uint8_t, 3>>> palette_;
  std::vector<unsigned> edge_matrix_;
};

// FNV-1a hash of a file's bytes, for report provenance.
std::uint64_t hash_file(const std::filesystem::path& path);

}  // namespace safeseg
