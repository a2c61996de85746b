#pragma once

#include <cstdint>
#include <span>

#include "safeseg/confusion.hpp"
#include "safeseg/hierarchy.hpp"
#include "safeseg/label_map.hpp"
#include "safeseg/metrics.hpp"

// Slow, literal re-implementation of the metrics used to cross-check the
// fast path. Everything here scans pixel sets directly in plain loops; it
// shares only the hierarchy parser and result records with the rest of the
// library, never ConfusionMatrix or the metric functions.
namespace safeseg::oracle {

// Recomputes per-class IoU and safe IoU by walking the label buffers for
// every class pair independently, then averages over present classes.
// Ignore handling mirrors accumulate(): gt ignore pixels are skipped,
// prediction ignore pixels error in strict mode and remap in lenient mode.
MetricSummary brute_force_metrics(
    const LabelMap& gt, const LabelMap& pred, const LabelHierarchy& h,
    const ImportantSet& important, std::span<const ImportantSet> subsets = {},
    SubsetPenalty subset_penalty = SubsetPenalty::kRunImportant,
    const AccumulateOptions& options = {});

struct InstanceParams {
  int min_depth = 2;
  int max_depth = 4;
  int min_leaves = 4;
  int max_leaves = 12;
  std::uint32_t min_side = 4;
  std::uint32_t max_side = 64;
  double ignore_probability = 0.05;
  double agreement = 0.0;  // chance a prediction pixel copies the gt pixel
};

// A self-contained random evaluation problem: its own uniform-depth
// hierarchy (recursive uniform splitting, single-child chains pad short
// branches), a non-empty important set, and a gt/pred pair. Label maps hold
// dense class ids plus kIgnoreClass, ready for accumulate().
struct RandomInstance {
  std::uint64_t seed = 0;
  LabelHierarchy hierarchy;
  ImportantSet important;
  LabelMap gt;
  LabelMap pred;
};

// Deterministic: the same seed and params always produce the same instance.
// Throws ConfigError on out-of-range params (depth < 1, leaves < 2, ...).
RandomInstance generate(std::uint64_t seed, const InstanceParams& params = {});

}  // namespace safeseg::oracle
