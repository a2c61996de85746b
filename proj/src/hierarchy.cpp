#include "safeseg/hierarchy.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "safeseg/errors.hpp"

namespace safeseg {

namespace {

using nlohmann::json;

[[noreturn]] void fail_config(const std::string& msg) {
  throw ConfigError("hierarchy config: " + msg);
}

const json& require_key(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) fail_config(std::string("missing key \"") + key + "\"");
  return *it;
}

// Recursively adds the "tree" object to the node list. Sibling names must be
// unique; leaf nodes are nodes without children.
int add_node(const json& node, int parent, int depth,
             std::vector<HierarchyNode>& nodes) {
  if (!node.is_object()) fail_config("tree nodes must be objects");
  const json& name = require_key(node, "name");
  if (!name.is_string() || name.get<std::string>().empty())
    fail_config("node names must be non-empty strings");

  int index = int(nodes.size());
  nodes.push_back(HierarchyNode{name.get<std::string>(), parent, depth, {}});

  auto children = node.find("children");
  if (children != node.end() && !children->is_null()) {
    if (!children->is_array()) fail_config("\"children\" must be an array");
    std::set<std::string> sibling_names;
    for (const json& child : *children) {
      int child_index = add_node(child, index, depth + 1, nodes);
      if (!sibling_names.insert(nodes[child_index].name).second)
        fail_config("duplicate sibling name \"" + nodes[child_index].name +
                    "\" under \"" + nodes[index].name + "\"");
      nodes[index].children.push_back(child_index);
    }
  }
  return index;
}

nlohmann::ordered_json node_to_json(const std::vector<HierarchyNode>& nodes,
                                    int index) {
  nlohmann::ordered_json out;
  out["name"] = nodes[index].name;
  if (!nodes[index].children.empty()) {
    nlohmann::ordered_json children = nlohmann::ordered_json::array();
    for (int child : nodes[index].children)
      children.push_back(node_to_json(nodes, child));
    out["children"] = std::move(children);
  }
  return out;
}

}  // namespace

bool ImportantSet::contains(ClassId c) const {
  return std::binary_search(members.begin(), members.end(), c);
}

LabelHierarchy LabelHierarchy::from_json(const json& doc) {
  if (!doc.is_object()) fail_config("document must be a JSON object");

  LabelHierarchy h;
  h.name_ = require_key(doc, "name").get<std::string>();

  const json& levels = require_key(doc, "levels");
  if (!levels.is_number_integer() || levels.get<int>() < 1)
    fail_config("\"levels\" must be a positive integer");
  h.levels_ = levels.get<int>();

  const json& tree = require_key(doc, "tree");
  if (tree.is_array())
    fail_config("\"tree\" must be a single root object, not an array");
  add_node(tree, -1, 0, h.nodes_);

  // Collect tree leaves and enforce uniform depth.
  std::unordered_map<std::string, int> leaf_node_by_name;
  for (int i = 0; i < int(h.nodes_.size()); ++i) {
    const HierarchyNode& node = h.nodes_[i];
    if (!node.children.empty()) continue;
    if (node.depth != h.levels_) {
      std::ostringstream msg;
      msg << "leaf \"" << node.name << "\" at depth " << node.depth
          << ", expected uniform depth " << h.levels_;
      fail_config(msg.str());
    }
    if (!leaf_node_by_name.emplace(node.name, i).second)
      fail_config("duplicate leaf name \"" + node.name + "\"");
  }
  if (leaf_node_by_name.empty()) fail_config("tree has no leaves");

  // The "leaves" array fixes ClassId order and must match the tree exactly.
  const json& leaves = require_key(doc, "leaves");
  if (!leaves.is_array()) fail_config("\"leaves\" must be an array of names");
  for (const json& entry : leaves) {
    std::string name = entry.get<std::string>();
    auto it = leaf_node_by_name.find(name);
    if (it == leaf_node_by_name.end())
      fail_config("\"leaves\" entry \"" + name + "\" is not a tree leaf");
    ClassId id = ClassId(h.leaf_names_.size());
    if (!h.leaf_lookup_.emplace(name, id).second)
      fail_config("\"leaves\" lists \"" + name + "\" twice");
    h.leaf_names_.push_back(name);
    h.leaf_nodes_.push_back(it->second);
  }
  if (h.leaf_names_.size() != leaf_node_by_name.size())
    fail_config("\"leaves\" does not cover every tree leaf");

  // Optional alias table (alternate names for leaves).
  if (auto aliases = doc.find("aliases"); aliases != doc.end()) {
    for (const auto& [alias, target] : aliases->items()) {
      auto it = h.leaf_lookup_.find(target.get<std::string>());
      if (it == h.leaf_lookup_.end())
        fail_config("alias \"" + alias + "\" points to unknown leaf");
      if (!h.leaf_lookup_.emplace(alias, it->second).second)
        fail_config("alias \"" + alias + "\" collides with an existing name");
      h.aliases_[alias] = target.get<std::string>();
    }
  }

  // Raster pixel values.
  auto raster_value = [](const json& value, const std::string& what) {
    if (!value.is_number_integer() || value.get<std::int64_t>() < 0 ||
        value.get<std::int64_t>() > 0xFFFF)
      fail_config(what + " must be an integer in [0, 65535]");
    return std::uint32_t(value.get<std::int64_t>());
  };
  h.ignore_id_ = raster_value(require_key(doc, "ignore_id"), "\"ignore_id\"");

  const json& pixel_ids = require_key(doc, "pixel_ids");
  h.pixel_ids_.assign(h.leaf_names_.size(), 0);
  std::vector<bool> seen(h.leaf_names_.size(), false);
  for (const auto& [leaf, value] : pixel_ids.items()) {
    auto it = h.leaf_lookup_.find(leaf);
    if (it == h.leaf_lookup_.end())
      fail_config("pixel_ids entry \"" + leaf + "\" is not a leaf");
    std::uint32_t raster = raster_value(value, "pixel id for \"" + leaf + "\"");
    if (raster == h.ignore_id_)
      fail_config("pixel id for \"" + leaf + "\" equals the ignore id");
    if (seen[it->second]) fail_config("pixel_ids lists \"" + leaf + "\" twice");
    seen[it->second] = true;
    h.pixel_ids_[it->second] = raster;
    if (!h.raster_to_class_.emplace(raster, it->second).second)
      fail_config("pixel id " + std::to_string(raster) + " assigned twice");
  }
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (!seen[i]) fail_config("leaf \"" + h.leaf_names_[i] + "\" has no pixel id");

  // Named important sets.
  if (auto sets = doc.find("important_sets"); sets != doc.end()) {
    for (const auto& [set_name, members] : sets->items()) {
      if (!members.is_array() || members.empty())
        fail_config("important set \"" + set_name + "\" must be a non-empty array");
      std::vector<ClassId> ids;
      for (const json& member : members) {
        auto it = h.leaf_lookup_.find(member.get<std::string>());
        if (it == h.leaf_lookup_.end())
          fail_config("important set \"" + set_name + "\" names unknown class \"" +
                      member.get<std::string>() + "\"");
        ids.push_back(it->second);
      }
      std::sort(ids.begin(), ids.end());
      ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
      h.important_sets_[set_name] = std::move(ids);
    }
  }

  // Optional palette.
  h.palette_.assign(h.leaf_names_.size(), std::nullopt);
  if (auto palette = doc.find("palette"); palette != doc.end()) {
    for (const auto& [leaf, rgb] : palette->items()) {
      auto it = h.leaf_lookup_.find(leaf);
      if (it == h.leaf_lookup_.end())
        fail_config("palette entry \"" + leaf + "\" is not a leaf");
      if (!rgb.is_array() || rgb.size() != 3)
        fail_config("palette entry \"" + leaf + "\" must be [r,g,b]");
      std::array<std::uint8_t, 3> color{};
      for (int i = 0; i < 3; ++i) {
        int channel = rgb[i].get<int>();
        if (channel < 0 || channel > 255)
          fail_config("palette channel out of range for \"" + leaf + "\"");
        color[i] = std::uint8_t(channel);
      }
      h.palette_[it->second] = color;
    }
  }

  // Precompute pairwise path edge counts via LCA walks.
  std::size_t n = h.leaf_names_.size();
  h.edge_matrix_.assign(n * n, 0);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      int na = h.leaf_nodes_[a];
      int nb = h.leaf_nodes_[b];
      unsigned edges = 0;
      while (h.nodes_[na].depth > h.nodes_[nb].depth) {
        na = h.nodes_[na].parent;
        ++edges;
      }
      while (h.nodes_[nb].depth > h.nodes_[na].depth) {
        nb = h.nodes_[nb].parent;
        ++edges;
      }
      while (na != nb) {
        na = h.nodes_[na].parent;
        nb = h.nodes_[nb].parent;
        edges += 2;
      }
      h.edge_matrix_[a * n + b] = edges;
      h.edge_matrix_[b * n + a] = edges;
    }
  }
  return h;
}

LabelHierarchy LabelHierarchy::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open hierarchy config: " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("hierarchy config: invalid JSON in " + path.string() +
                      ": " + e.what());
  }
  return from_json(doc);
}

nlohmann::ordered_json LabelHierarchy::to_json() const {
  nlohmann::ordered_json doc;
  doc["name"] = name_;
  doc["levels"] = levels_;
  doc["tree"] = node_to_json(nodes_, 0);
  doc["leaves"] = leaf_names_;
  if (!aliases_.empty()) doc["aliases"] = aliases_;
  nlohmann::ordered_json pixel_ids;
  for (std::size_t i = 0; i < leaf_names_.size(); ++i)
    pixel_ids[leaf_names_[i]] = pixel_ids_[i];
  doc["pixel_ids"] = std::move(pixel_ids);
  doc["ignore_id"] = ignore_id_;
  if (!important_sets_.empty()) {
    nlohmann::ordered_json sets;
    for (const auto& [set_name, members] : important_sets_) {
      std::vector<std::string> names;
      for (ClassId id : members) names.push_back(leaf_names_[id]);
      sets[set_name] = names;
    }
    doc["important_sets"] = std::move(sets);
  }
  bool any_color = std::any_of(palette_.begin(), palette_.end(),
                               [](const auto& c) { return c.has_value(); });
  if (any_color) {
    nlohmann::ordered_json palette;
    for (std::size_t i = 0; i < leaf_names_.size(); ++i)
      if (palette_[i])
        palette[leaf_names_[i]] = std::vector<int>{(*palette_[i])[0],
                                                   (*palette_[i])[1],
                                                   (*palette_[i])[2]};
    doc["palette"] = std::move(palette);
  }
  return doc;
}

std::optional<ClassId> LabelHierarchy::find_leaf(std::string_view name) const {
  auto it = leaf_lookup_.find(std::string(name));
  if (it == leaf_lookup_.end()) return std::nullopt;
  return it->second;
}

ClassId LabelHierarchy::leaf_id(std::string_view name) const {
  auto id = find_leaf(name);
  if (!id) throw ConfigError("unknown class \"" + std::string(name) + "\"");
  return *id;
}

unsigned LabelHierarchy::path_edges(ClassId a, ClassId b) const {
  std::size_t n = leaf_names_.size();
  if (a >= n || b >= n) throw ConfigError("class id out of range");
  return edge_matrix_[std::size_t(a) * n + b];
}

double LabelHierarchy::tree_distance(ClassId a, ClassId b) const {
  return path_edges(a, b) / 2.0;
}

ImportantSet LabelHierarchy::important_set(std::string_view name) const {
  auto it = important_sets_.find(std::string(name));
  if (it == important_sets_.end())
    throw ConfigError("unknown important set \"" + std::string(name) + "\"");
  return ImportantSet{it->first, it->second};
}

ImportantSet LabelHierarchy::important_set_from(
    std::string_view set_name, const std::vector<std::string>& members) const {
  if (members.empty()) throw ConfigError("important set must be non-empty");
  std::vector<ClassId> ids;
  for (const std::string& member : members) ids.push_back(leaf_id(member));
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ImportantSet{std::string(set_name), std::move(ids)};
}

std::vector<std::string> LabelHierarchy::important_set_names() const {
  std::vector<std::string> names;
  for (const auto& [set_name, members] : important_sets_) names.push_back(set_name);
  return names;
}

bool LabelHierarchy::has_full_palette() const {
  return std::all_of(palette_.begin(), palette_.end(),
                     [](const auto& c) { return c.has_value(); });
}

std::optional<std::array<std::uint8_t, 3>> LabelHierarchy::palette_color(
    ClassId c) const {
  return palette_.at(c);
}

bool LabelHierarchy::operator==(const LabelHierarchy& other) const {
  auto node_eq = [](const HierarchyNode& a, const HierarchyNode& b) {
    return a.name == b.name && a.parent == b.parent && a.depth == b.depth &&
           a.children == b.children;
  };
  return name_ == other.name_ && levels_ == other.levels_ &&
         nodes_.size() == other.nodes_.size() &&
         std::equal(nodes_.begin(), nodes_.end(), other.nodes_.begin(), node_eq) &&
         leaf_names_ == other.leaf_names_ && aliases_ == other.aliases_ &&
         pixel_ids_ == other.pixel_ids_ && ignore_id_ == other.ignore_id_ &&
         important_sets_ == other.important_sets_ && palette_ == other.palette_;
}

std::uint64_t hash_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file for hashing: " + path.string());
  std::uint64_t hash = 1469598103934665603ull;  // FNV-1a offset basis
  char buffer[4096];
  while (in.read(buffer, sizeof(buffer)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      hash ^= std::uint8_t(buffer[i]);
      hash *= 1099511628211ull;
    }
    if (!in) break;
  }
  return hash;
}

}  // namespace safeseg
