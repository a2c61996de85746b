#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "safeseg/label_map.hpp"

namespace safeseg {

struct SetSizes {
  std::uint64_t gt = 0;         // row sum: pixels labeled c in ground truth
  std::uint64_t pred = 0;       // column sum: pixels predicted c
  std::uint64_t union_with = 0; // |gt_c ∪ pred_c| = gt + pred - diagonal
};

struct AccumulateOptions {
  bool strict = true;            // reject ignore values in predictions
  ClassId lenient_fallback = 0;  // substitute class in lenient mode
};

// Pixel-pair counts between ground-truth class (row) and predicted class
// (column), plus the ignored-pixel and image tallies. Counts are 64-bit;
// matrices over the same class set merge by elementwise addition, so any
// partitioning of the input images yields identical totals.
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::size_t num_classes);

  std::size_t num_classes() const { return classes_; }

  std::uint64_t count(ClassId gt, ClassId pred) const {
    return counts_[std::size_t(gt) * classes_ + pred];
  }
  std::uint64_t& count(ClassId gt, ClassId pred) {
    return counts_[std::size_t(gt) * classes_ + pred];
  }

  std::uint64_t ignored_pixels() const { return ignored_; }
  std::uint64_t image_count() const { return images_; }
  std::uint64_t total_count() const;  // sum over all cells

  SetSizes set_sizes(ClassId c) const;

  // Elementwise addition. Throws ValidationError on dimension mismatch.
  void merge(const ConfusionMatrix& other);

  // Plain-text dump: class-name header, count rows, ignored/image tallies.
  void dump(std::ostream& out, const std::vector<std::string>& class_names) const;
  static ConfusionMatrix from_dump(std::istream& in,
                                   std::vector<std::string>* class_names = nullptr);

  bool operator==(const ConfusionMatrix& other) const;

  friend void accumulate(ConfusionMatrix&, const LabelMap&, const LabelMap&,
                         const AccumulateOptions&);

 private:
  std::size_t classes_ = 0;
  std::vector<std::uint64_t> counts_;
  std::uint64_t ignored_ = 0;
  std::uint64_t images_ = 0;
};

// Tallies one gt/pred pair of remapped label maps into the matrix. Pixels
// whose ground truth is kIgnoreClass only increment the ignored count.
// Throws ValidationError on shape mismatch, out-of-range class values, or
// (strict mode) an ignore value in the prediction.
void accumulate(ConfusionMatrix& m, const LabelMap& gt, const LabelMap& pred,
                const AccumulateOptions& options = {});

}  // namespace safeseg
