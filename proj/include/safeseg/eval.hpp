#pragma once

#include <vector>

#include "safeseg/confusion.hpp"
#include "safeseg/hierarchy.hpp"
#include "safeseg/metrics.hpp"
#include "safeseg/pairing.hpp"
#include "safeseg/report.hpp"

namespace safeseg {

struct EvalOptions {
  std::string important_set = "default";
  std::vector<std::string> subsets;  // named sets scored as subset SmIoU
  SubsetPenalty subset_penalty = SubsetPenalty::kRunImportant;
  AccumulateOptions accumulate;
  unsigned threads = 0;  // 0 = hardware concurrency
};

struct EvalResult {
  ConfusionMatrix confusion{0};
  MetricSummary overall;
  std::vector<ImageScore> per_image;  // same order as the input pairs
};

// Evaluates all pairs with a worker pool. Each worker accumulates into a
// thread-local matrix and scores images independently; the merged matrix and
// every per-image score are identical for any thread count because counts
// are integers and each image's slot is fixed up front. The first worker
// exception is rethrown after all threads join.
EvalResult evaluate_pairs(const std::vector<PairedImage>& pairs,
                          const LabelHierarchy& h, const EvalOptions& options);

unsigned resolve_threads(unsigned requested);

}  // namespace safeseg
