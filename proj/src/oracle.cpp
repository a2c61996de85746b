#include "safeseg/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <json.hpp>

#include "safeseg/errors.hpp"

namespace safeseg::oracle {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Pixel index sets per class, built once from the effective (non-ignored)
// pixel stream. Sorted vectors stand in for mathematical sets.
struct PixelSets {
  std::vector<std::vector<std::size_t>> gt;
  std::vector<std::vector<std::size_t>> pred;
};

std::size_t intersection_size(const std::vector<std::size_t>& a,
                              const std::vector<std::size_t>& b) {
  std::vector<std::size_t> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out.size();
}

std::size_t union_size(const std::vector<std::size_t>& a,
                       const std::vector<std::size_t>& b) {
  std::vector<std::size_t> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::back_inserter(out));
  return out.size();
}

// Safe IoU per its definition: start from IoU of c, subtract the
// distance-weighted misprediction ratios. The ratio shares c's union as
// denominator; which confusions count depends on whether c is important.
double literal_safe_iou(const PixelSets& sets, const LabelHierarchy& h,
                        const ImportantSet& important, ClassId c) {
  double uni = double(union_size(sets.gt[c], sets.pred[c]));
  if (uni == 0.0) return kNaN;
  double value = double(intersection_size(sets.gt[c], sets.pred[c])) / uni;
  double depth = double(h.levels());
  auto penalty = [&](ClassId s) {
    double ratio = double(intersection_size(sets.gt[c], sets.pred[s])) / uni;
    return (h.tree_distance(c, s) / depth) * ratio;
  };
  if (important.contains(c)) {
    for (std::size_t s = 0; s < sets.gt.size(); ++s)
      if (ClassId(s) != c) value -= penalty(ClassId(s));
  } else {
    for (ClassId s : important.members)
      if (s != c) value -= penalty(s);
  }
  return value;
}

double naive_mean(const std::vector<double>& values) {
  if (values.empty()) return kNaN;
  double total = 0.0;
  for (double v : values) total += v;
  return total / double(values.size());
}

}  // namespace

MetricSummary brute_force_metrics(const LabelMap& gt, const LabelMap& pred,
                                  const LabelHierarchy& h,
                                  const ImportantSet& important,
                                  std::span<const ImportantSet> subsets,
                                  SubsetPenalty subset_penalty,
                                  const AccumulateOptions& options) {
  if (!gt.same_shape(pred))
    throw ValidationError("oracle: gt/pred shapes differ");

  std::size_t n = h.num_leaves();
  PixelSets sets;
  sets.gt.resize(n);
  sets.pred.resize(n);
  for (std::size_t i = 0; i < gt.pixels.size(); ++i) {
    ClassId g = gt.pixels[i];
    if (g == kIgnoreClass) continue;
    ClassId p = pred.pixels[i];
    if (p == kIgnoreClass) {
      if (options.strict)
        throw ValidationError("oracle: prediction contains the ignore label");
      p = options.lenient_fallback;
    }
    if (g >= n || p >= n) throw ValidationError("oracle: class id out of range");
    sets.gt[g].push_back(i);
    sets.pred[p].push_back(i);
  }

  MetricSummary summary;
  summary.important_set = important.name;
  summary.per_class.resize(n);
  std::vector<double> ious, safe_ious;
  for (std::size_t c = 0; c < n; ++c) {
    ClassMetrics& cm = summary.per_class[c];
    cm.id = ClassId(c);
    double uni = double(union_size(sets.gt[c], sets.pred[c]));
    cm.present = uni != 0.0;
    if (!cm.present) {
      cm.iou = cm.safe_iou = kNaN;
      continue;
    }
    cm.iou = double(intersection_size(sets.gt[c], sets.pred[c])) / uni;
    cm.safe_iou = literal_safe_iou(sets, h, important, cm.id);
    ious.push_back(cm.iou);
    safe_ious.push_back(cm.safe_iou);
  }
  if (ious.empty())
    throw ValidationError("oracle: no class is present in ground truth or prediction");

  summary.miou = naive_mean(ious);
  summary.smiou = naive_mean(safe_ious);

  for (const ImportantSet& subset : subsets) {
    std::vector<double> values;
    for (ClassId member : subset.members) {
      if (!summary.per_class[member].present) continue;
      values.push_back(subset_penalty == SubsetPenalty::kRunImportant
                           ? summary.per_class[member].safe_iou
                           : literal_safe_iou(sets, h, subset, member));
    }
    summary.subset_smiou[subset.name] = naive_mean(values);
  }
  return summary;
}

namespace {

void check_params(const InstanceParams& p) {
  auto bad = [](const std::string& why) {
    throw ConfigError("instance params: " + why);
  };
  if (p.min_depth < 1 || p.max_depth < p.min_depth) bad("invalid depth range");
  if (p.min_leaves < 2 || p.max_leaves < p.min_leaves)
    bad("need at least 2 leaves for distances");
  if (p.min_side < 1 || p.max_side < p.min_side) bad("invalid side range");
  if (p.ignore_probability < 0.0 || p.ignore_probability > 1.0)
    bad("ignore probability outside [0, 1]");
  if (p.agreement < 0.0 || p.agreement > 1.0) bad("agreement outside [0, 1]");
}

// Builds a random subtree holding `budget` leaves with `remaining` more
// levels below it. Short branches become single-child chains, which keeps
// every leaf at the same depth.
nlohmann::ordered_json build_subtree(std::mt19937_64& rng, int budget,
                                     int remaining, int& leaf_counter,
                                     int& group_counter) {
  nlohmann::ordered_json node;
  if (remaining == 0) {
    node["name"] = "class_" + std::to_string(leaf_counter++);
    return node;
  }
  node["name"] = "group_" + std::to_string(group_counter++);
  int max_children = std::min(budget, 4);
  int k = remaining == 1
              ? budget
              : int(std::uniform_int_distribution<int>(1, max_children)(rng));
  std::vector<int> parts(k, 1);
  for (int extra = budget - k; extra > 0; --extra)
    ++parts[std::uniform_int_distribution<int>(0, k - 1)(rng)];
  nlohmann::ordered_json children = nlohmann::ordered_json::array();
  for (int part : parts)
    children.push_back(
        build_subtree(rng, part, remaining - 1, leaf_counter, group_counter));
  node["children"] = std::move(children);
  return node;
}

}  // namespace

RandomInstance generate(std::uint64_t seed, const InstanceParams& params) {
  check_params(params);
  std::mt19937_64 rng(seed);

  int depth = std::uniform_int_distribution<int>(params.min_depth,
                                                 params.max_depth)(rng);
  int leaves = std::uniform_int_distribution<int>(params.min_leaves,
                                                  params.max_leaves)(rng);

  int leaf_counter = 0, group_counter = 0;
  nlohmann::ordered_json tree =
      build_subtree(rng, leaves, depth, leaf_counter, group_counter);
  tree["name"] = "root";

  nlohmann::ordered_json doc;
  doc["name"] = "random_" + std::to_string(seed);
  doc["levels"] = depth;
  doc["tree"] = std::move(tree);
  std::vector<std::string> leaf_names;
  for (int i = 0; i < leaves; ++i) leaf_names.push_back("class_" + std::to_string(i));
  doc["leaves"] = leaf_names;
  nlohmann::ordered_json pixel_ids;
  for (int i = 0; i < leaves; ++i) pixel_ids[leaf_names[i]] = i;
  doc["pixel_ids"] = std::move(pixel_ids);
  doc["ignore_id"] = 255;

  std::vector<std::string> important_names;
  std::bernoulli_distribution coin(0.5);
  for (int i = 0; i < leaves; ++i)
    if (coin(rng)) important_names.push_back(leaf_names[i]);
  if (important_names.empty())
    important_names.push_back(
        leaf_names[std::uniform_int_distribution<int>(0, leaves - 1)(rng)]);
  doc["important_sets"]["default"] = important_names;

  nlohmann::ordered_json palette;
  std::uniform_int_distribution<int> channel(0, 255);
  for (const std::string& name : leaf_names)
    palette[name] = std::vector<int>{channel(rng), channel(rng), channel(rng)};
  doc["palette"] = std::move(palette);

  RandomInstance instance;
  instance.seed = seed;
  instance.hierarchy = LabelHierarchy::from_json(doc);
  instance.important = instance.hierarchy.important_set("default");

  std::uniform_int_distribution<std::uint32_t> side(params.min_side,
                                                    params.max_side);
  instance.gt.width = side(rng);
  instance.gt.height = side(rng);
  instance.pred.width = instance.gt.width;
  instance.pred.height = instance.gt.height;

  std::size_t count = std::size_t(instance.gt.width) * instance.gt.height;
  instance.gt.pixels.resize(count);
  instance.pred.pixels.resize(count);
  std::bernoulli_distribution ignore(params.ignore_probability);
  std::bernoulli_distribution copy_gt(params.agreement);
  std::uniform_int_distribution<int> label(0, leaves - 1);
  for (std::size_t i = 0; i < count; ++i)
    instance.gt.pixels[i] = ignore(rng) ? kIgnoreClass : ClassId(label(rng));
  for (std::size_t i = 0; i < count; ++i) {
    if (params.agreement > 0.0 && copy_gt(rng))
      instance.pred.pixels[i] = instance.gt.pixels[i];
    else
      instance.pred.pixels[i] = ignore(rng) ? kIgnoreClass : ClassId(label(rng));
  }
  return instance;
}

}  // namespace safeseg::oracle
