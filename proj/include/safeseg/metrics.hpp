#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "safeseg/confusion.hpp"
#include "safeseg/hierarchy.hpp"

namespace safeseg {

struct ClassMetrics {
  ClassId id = 0;
  bool present = false;  // gt ∪ pred non-empty
  double iou = 0.0;      // NaN when absent
  double safe_iou = 0.0; // NaN when absent; can be negative down to -1
};

// How subset scores treat the penalty set: reuse the run's important set, or
// recompute penalties with the subset itself as the important set.
enum class SubsetPenalty { kRunImportant, kSubsetAsImportant };

struct MetricSummary {
  std::vector<ClassMetrics> per_class;
  double miou = 0.0;   // mean IoU over present classes
  double smiou = 0.0;  // mean safe IoU over present classes
  std::map<std::string, double> subset_smiou;  // NaN when subset has no present class
  std::string important_set;
};

// Plain IoU from the diagonal and the gt/pred union. NaN when the class is
// absent from both.
double iou_per_class(const ConfusionMatrix& m, ClassId c);

// Misprediction ratio of Eq-style safe intersections: counts[c][s] over the
// gt/pred union of c (not of s). NaN when c is absent.
double safe_intersection(const ConfusionMatrix& m, ClassId c, ClassId s);

// Hierarchy-penalized IoU: important classes pay for every confusion,
// weighted by tree distance over depth; other classes pay only for
// confusions into important classes. NaN when the class is absent.
double safe_iou_per_class(const ConfusionMatrix& m, const LabelHierarchy& h,
                          const ImportantSet& important, ClassId c);

// Full summary from an accumulated matrix: per-class metrics, means over
// present classes, and per-subset safe means. Throws ValidationError when no
// class is present at all.
MetricSummary summarize(const ConfusionMatrix& m, const LabelHierarchy& h,
                        const ImportantSet& important,
                        std::span<const ImportantSet> subsets = {},
                        SubsetPenalty subset_penalty = SubsetPenalty::kRunImportant);

// Single-image convenience: accumulate one pair, then summarize. Presence is
// judged within this image only.
MetricSummary per_image_metrics(const LabelMap& gt, const LabelMap& pred,
                                const LabelHierarchy& h,
                                const ImportantSet& important,
                                std::span<const ImportantSet> subsets = {},
                                SubsetPenalty subset_penalty = SubsetPenalty::kRunImportant,
                                const AccumulateOptions& options = {});

// Reference loss formulas.
//
// probs is N x num_classes row major; targets one-hot rows of the same
// shape. Probabilities are clamped to [kLossEpsilon, 1].
inline constexpr double kLossEpsilon = 1e-7;

double cross_entropy_loss(std::span<const double> probs,
                          std::span<const double> targets,
                          std::size_t num_classes);

// Binary soft dice with kLossEpsilon smoothing in the denominator.
double dice_loss(std::span<const double> probs, std::span<const double> targets);

double combined_loss(double cross_entropy, double dice);

// Mean that is invariant under input permutation: values are sorted before
// summation, so relabeling classes cannot change the floating-point result.
// Returns NaN for an empty range.
double permutation_stable_mean(std::vector<double> values);

// Round-half-to-even percent formatting with two decimals ("63.52", "-6.00").
std::string format_percent(double fraction);

}  // namespace safeseg
