#pragma once

#include <string>

#include "safeseg/hierarchy.hpp"
#include "safeseg/label_map.hpp"

namespace testutil {

// Four-pixel, four-leaf instance with hand-checked scores: person iou 1/2,
// safe 0; road iou = safe = 2/3; mIoU 7/12; SmIoU 1/3.
inline std::string worked_config_text() {
  return R"({
  "name": "worked",
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
  "important_sets": {"default": ["person", "rider"]},
  "palette": {
    "road": [128, 64, 128],
    "parking": [250, 170, 160],
    "person": [220, 20, 60],
    "rider": [255, 0, 0]
  }
})";
}

inline safeseg::LabelHierarchy worked_hierarchy() {
  return safeseg::LabelHierarchy::from_json(
      nlohmann::json::parse(worked_config_text()));
}

// Dense-ClassId maps (road=0, parking=1, person=2, rider=3), 4x1.
inline safeseg::LabelMap worked_gt() {
  safeseg::LabelMap m(4, 1);
  m.pixels = {2, 2, 0, 0};
  return m;
}

inline safeseg::LabelMap worked_pred() {
  safeseg::LabelMap m(4, 1);
  m.pixels = {2, 0, 0, 0};
  return m;
}

}  // namespace testutil
