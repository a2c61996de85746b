#include "safeseg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "safeseg/errors.hpp"
#include "safeseg/label_map.hpp"

namespace safeseg {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Safe IoU numerator over the shared denominator 2*levels*union. Exact in
// 64-bit integers: with pixel counts below 2^40 and path lengths at most
// 2*levels, both terms stay far from overflow.
std::int64_t safe_numerator(const ConfusionMatrix& m, const LabelHierarchy& h,
                            const ImportantSet& important, ClassId c) {
  std::int64_t two_n = 2 * std::int64_t(h.levels());
  std::int64_t num = two_n * std::int64_t(m.count(c, c));
  bool c_important = important.contains(c);
  if (c_important) {
    for (std::size_t s = 0; s < m.num_classes(); ++s) {
      if (s == c) continue;
      std::uint64_t confused = m.count(c, ClassId(s));
      if (confused)
        num -= std::int64_t(h.path_edges(c, ClassId(s))) * std::int64_t(confused);
    }
  } else {
    for (ClassId s : important.members) {
      std::uint64_t confused = m.count(c, s);
      if (confused)
        num -= std::int64_t(h.path_edges(c, s)) * std::int64_t(confused);
    }
  }
  return num;
}

}  // namespace

double iou_per_class(const ConfusionMatrix& m, ClassId c) {
  SetSizes sizes = m.set_sizes(c);
  if (sizes.union_with == 0) return kNaN;
  return double(m.count(c, c)) / double(sizes.union_with);
}

double safe_intersection(const ConfusionMatrix& m, ClassId c, ClassId s) {
  SetSizes sizes = m.set_sizes(c);
  if (sizes.union_with == 0) return kNaN;
  return double(m.count(c, s)) / double(sizes.union_with);
}

double safe_iou_per_class(const ConfusionMatrix& m, const LabelHierarchy& h,
                          const ImportantSet& important, ClassId c) {
  SetSizes sizes = m.set_sizes(c);
  if (sizes.union_with == 0) return kNaN;
  std::int64_t num = safe_numerator(m, h, important, c);
  double den = 2.0 * h.levels() * double(sizes.union_with);
  return double(num) / den;
}

MetricSummary summarize(const ConfusionMatrix& m, const LabelHierarchy& h,
                        const ImportantSet& important,
                        std::span<const ImportantSet> subsets,
                        SubsetPenalty subset_penalty) {
  if (m.num_classes() != h.num_leaves())
    throw ValidationError("confusion matrix size does not match hierarchy");

  MetricSummary summary;
  summary.important_set = important.name;
  summary.per_class.resize(m.num_classes());

  std::vector<double> ious;
  std::vector<double> safe_ious;
  for (std::size_t i = 0; i < m.num_classes(); ++i) {
    ClassMetrics& cm = summary.per_class[i];
    cm.id = ClassId(i);
    cm.present = m.set_sizes(cm.id).union_with != 0;
    cm.iou = cm.present ? iou_per_class(m, cm.id) : kNaN;
    cm.safe_iou = cm.present ? safe_iou_per_class(m, h, important, cm.id) : kNaN;
    if (cm.present) {
      ious.push_back(cm.iou);
      safe_ious.push_back(cm.safe_iou);
    }
  }
  if (ious.empty())
    throw ValidationError("no class is present in ground truth or prediction");

  summary.miou = permutation_stable_mean(std::move(ious));
  summary.smiou = permutation_stable_mean(std::move(safe_ious));

  for (const ImportantSet& subset : subsets) {
    std::vector<double> values;
    for (ClassId member : subset.members) {
      if (!summary.per_class[member].present) continue;
      values.push_back(subset_penalty == SubsetPenalty::kRunImportant
                           ? summary.per_class[member].safe_iou
                           : safe_iou_per_class(m, h, subset, member));
    }
    summary.subset_smiou[subset.name] =
        values.empty() ? kNaN : permutation_stable_mean(std::move(values));
  }
  return summary;
}

MetricSummary per_image_metrics(const LabelMap& gt, const LabelMap& pred,
                                const LabelHierarchy& h,
                                const ImportantSet& important,
                                std::span<const ImportantSet> subsets,
                                SubsetPenalty subset_penalty,
                                const AccumulateOptions& options) {
  ConfusionMatrix m(h.num_leaves());
  accumulate(m, gt, pred, options);
  return summarize(m, h, important, subsets, subset_penalty);
}

double cross_entropy_loss(std::span<const double> probs,
                          std::span<const double> targets,
                          std::size_t num_classes) {
  if (num_classes == 0 || probs.size() != targets.size() ||
      probs.size() % num_classes != 0)
    throw ValidationError("loss inputs must be N x num_classes");
  std::size_t rows = probs.size() / num_classes;
  double total = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < num_classes; ++c) {
      double t = targets[r * num_classes + c];
      if (t == 0.0) continue;
      double p = std::clamp(probs[r * num_classes + c], kLossEpsilon, 1.0);
      total -= t * std::log(p);
    }
  }
  return total / double(rows);
}

double dice_loss(std::span<const double> probs, std::span<const double> targets) {
  if (probs.empty() || probs.size() != targets.size())
    throw ValidationError("dice inputs must be equal-length and non-empty");
  double overlap = 0.0, p_sum = 0.0, t_sum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    overlap += probs[i] * targets[i];
    p_sum += probs[i];
    t_sum += targets[i];
  }
  return 1.0 - 2.0 * overlap / (p_sum + t_sum + kLossEpsilon);
}

double combined_loss(double cross_entropy, double dice) {
  return 0.5 * cross_entropy + 0.5 * dice;
}

double permutation_stable_mean(std::vector<double> values) {
  if (values.empty()) return kNaN;
  std::sort(values.begin(), values.end());
  double total = 0.0;
  for (double v : values) total += v;
  return total / double(values.size());
}

std::string format_percent(double fraction) {
  if (std::isnan(fraction)) return "n/a";
  // Work in hundredths of a percent; ties round to even.
  double cents = std::nearbyint(fraction * 10000.0);
  long long c = (long long)(cents);
  bool negative = c < 0;
  if (negative) c = -c;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%lld.%02lld", negative ? "-" : "", c / 100,
                c % 100);
  return buf;
}

}  // namespace safeseg
