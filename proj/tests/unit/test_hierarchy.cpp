#include <doctest.h>

#include <fstream>

#include "safeseg/errors.hpp"
#include "safeseg/hierarchy.hpp"
#include "safeseg/oracle.hpp"

#include "test_util.hpp"
#include "tree_oracle.hpp"

#include <json.hpp>

using namespace safeseg;
using nlohmann::json;

namespace {

// Minimal valid config used as a base for the error-path cases.
json small_config() {
  return json::parse(R"({
    "name": "small",
    "levels": 2,
    "tree": {
      "name": "root",
      "children": [
        {"name": "drivable", "children": [{"name": "road"}, {"name": "parking"}]},
        {"name": "human", "children": [{"name": "person"}, {"name": "rider"}]}
      ]
    },
    "leaves": ["road", "parking", "person", "rider"],
    "pixel_ids": {"road": 0, "parking": 1, "person": 2, "rider": 3},
    "ignore_id": 255,
    "important_sets": {"default": ["person", "rider"]}
  })");
}

}  // namespace

TEST_CASE("bundled config structure and distances") {
  LabelHierarchy h = LabelHierarchy::load(testutil::bundled_config());

  CHECK(h.levels() == 4);
  CHECK(h.num_leaves() == 30);

  CHECK(h.tree_distance(h.leaf_id("truck"), h.leaf_id("bus")) == 1.0);
  CHECK(h.tree_distance(h.leaf_id("sidewalk"), h.leaf_id("motorcycle")) == 3.0);
  CHECK(h.tree_distance(h.leaf_id("person"), h.leaf_id("rider")) == 1.0);
  CHECK(h.tree_distance(h.leaf_id("person"), h.leaf_id("sky")) == 4.0);
  CHECK(h.tree_distance(h.leaf_id("road"), h.leaf_id("parking")) == 1.0);

  // Symmetric, zero diagonal, and never farther than the leaf depth.
  const auto& edges = h.edge_matrix();
  std::size_t n = h.num_leaves();
  unsigned max_edges = 0;
  for (std::size_t a = 0; a < n; ++a) {
    CHECK(edges[a * n + a] == 0);
    for (std::size_t b = 0; b < n; ++b) {
      CHECK(edges[a * n + b] == edges[b * n + a]);
      max_edges = std::max(max_edges, edges[a * n + b]);
    }
  }
  CHECK(max_edges == unsigned(2 * h.levels()));
}

TEST_CASE("bundled important sets") {
  LabelHierarchy h = LabelHierarchy::load(testutil::bundled_config());

  ImportantSet imp = h.important_set("default");
  CHECK(imp.members.size() == 16);
  CHECK(imp.contains(h.leaf_id("person")));
  CHECK(imp.contains(h.leaf_id("road")));
  CHECK_FALSE(imp.contains(h.leaf_id("sky")));

  ImportantSet tp = h.important_set("tp");
  CHECK(tp.members.size() == 9);
  CHECK(tp.contains(h.leaf_id("rider")));
  CHECK(tp.contains(h.leaf_id("bus")));
  CHECK_FALSE(tp.contains(h.leaf_id("train")));

  CHECK_THROWS_AS(h.important_set("no-such-set"), ConfigError);

  ImportantSet custom = h.important_set_from("mine", {"car", "truck"});
  CHECK(custom.members.size() == 2);
  CHECK_THROWS_AS(h.important_set_from("mine", {"car", "spaceship"}), ConfigError);
  CHECK_THROWS_AS(h.important_set_from("mine", {}), ConfigError);
}

TEST_CASE("aliases resolve to canonical leaves") {
  LabelHierarchy h = LabelHierarchy::load(testutil::bundled_config());

  REQUIRE(h.find_leaf("motorcycle").has_value());
  CHECK(*h.find_leaf("motorcycle") == h.leaf_id("bike"));
  CHECK(*h.find_leaf("autorickshaw") == h.leaf_id("rickshaw"));
  CHECK_FALSE(h.find_leaf("hovercraft").has_value());
  CHECK_THROWS_AS(h.leaf_id("hovercraft"), ConfigError);
}

TEST_CASE("serialization round trip preserves the hierarchy") {
  LabelHierarchy h = LabelHierarchy::load(testutil::bundled_config());
  LabelHierarchy back = LabelHierarchy::from_json(h.to_json());

  CHECK(h == back);
  CHECK(h.edge_matrix() == back.edge_matrix());
  CHECK(h.important_set_names() == back.important_set_names());
  CHECK(back.palette_color(h.leaf_id("road")).has_value());

  // A second hop must be stable too.
  LabelHierarchy again = LabelHierarchy::from_json(back.to_json());
  CHECK(back == again);
}

TEST_CASE("distances agree with a breadth-first search") {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    oracle::RandomInstance inst = oracle::generate(seed);
    testutil::BfsDistanceOracle bfs(inst.hierarchy);
    std::size_t n = inst.hierarchy.num_leaves();
    for (ClassId a = 0; a < n; ++a)
      for (ClassId b = 0; b < n; ++b)
        CHECK(inst.hierarchy.path_edges(a, b) == bfs.path_edges(a, b));
  }
}

TEST_CASE("config rejection paths") {
  SUBCASE("missing keys") {
    for (const char* key :
         {"name", "levels", "tree", "leaves", "pixel_ids", "ignore_id"}) {
      json doc = small_config();
      doc.erase(key);
      CHECK_THROWS_AS(LabelHierarchy::from_json(doc), ConfigError);
    }
  }

  SUBCASE("duplicate sibling names") {
    json doc = small_config();
    doc["tree"]["children"][0]["children"][1]["name"] = "road";
    CHECK_THROWS_AS(LabelHierarchy::from_json(doc), ConfigError);
  }

  SUBCASE("non-uniform leaf depth") {
    json doc = small_config();
    doc["tree"]["children"].push_back({{"name", "stray"}});
    CHECK_THROWS_AS(LabelHierarchy::from_json(doc), ConfigError);
  }

  SUBCASE("leaves array must cover the tree") {
    json doc = small_config();
    doc["leaves"] = {"road", "parking", "person"};
    CHECK_THROWS_AS(LabelHierarchy::from_json(doc), ConfigError);

    doc = small_config();
    doc["leaves"] = {"road", "parking", "person", "person"};
    CHECK_THROWS_AS(LabelHierarchy::from_json(doc), ConfigError);
  }

  SUBCASE("unknown important member") {
    json doc = small_config();
    doc["important_sets"]["default"] = {"person", "unicorn"};
    CHECK_THROWS_AS(LabelHierarchy::from_json(doc), ConfigError);
  }

  SUBCASE("pixel id clashes with the ignore value") {
    json doc = small_config();
    doc["pixel_ids"]["road"] = 255;
    CHECK_THROWS_AS(LabelHierarchy::from_json(doc), ConfigError);
  }

  SUBCASE("alias colliding with a leaf name") {
    json doc = small_config();
    doc["aliases"] = {{"person", "road"}};
    CHECK_THROWS_AS(LabelHierarchy::from_json(doc), ConfigError);
  }
}

TEST_CASE("load maps file problems to the right errors") {
  testutil::TempDir dir;
  CHECK_THROWS_AS(LabelHierarchy::load(dir / "missing.json"), IoError);

  auto bad = dir / "bad.json";
  testutil::write_file(bad, "{ not json");
  CHECK_THROWS_AS(LabelHierarchy::load(bad), ConfigError);
}

TEST_CASE("file hashing tracks content") {
  testutil::TempDir dir;
  auto p1 = dir / "one.bin";
  auto p2 = dir / "two.bin";
  testutil::write_file(p1, "label config v1");
  testutil::write_file(p2, "label config v2");
  CHECK(hash_file(p1) != hash_file(p2));

  testutil::write_file(p2, "label config v1");
  CHECK(hash_file(p1) == hash_file(p2));
  CHECK_THROWS_AS(hash_file(dir / "absent.bin"), IoError);
}
