#include "safeseg/eval.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include "safeseg/errors.hpp"
#include "safeseg/label_map.hpp"

namespace safeseg {

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

EvalResult evaluate_pairs(const std::vector<PairedImage>& pairs,
                          const LabelHierarchy& h, const EvalOptions& options) {
  if (pairs.empty()) throw ValidationError("no image pairs to evaluate");

  ImportantSet important = h.important_set(options.important_set);
  std::vector<ImportantSet> subsets;
  for (const std::string& name : options.subsets)
    subsets.push_back(h.important_set(name));

  std::size_t n = h.num_leaves();
  unsigned threads =
      std::min<std::size_t>(resolve_threads(options.threads), pairs.size());

  std::vector<ConfusionMatrix> locals(threads, ConfusionMatrix(n));
  EvalResult result;
  result.per_image.resize(pairs.size());

  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&](unsigned t) {
    constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
    try {
      for (std::size_t i = next.fetch_add(1); i < pairs.size();
           i = next.fetch_add(1)) {
        if (abort.load(std::memory_order_relaxed)) return;
        const PairedImage& pair = pairs[i];
        LabelMap gt = load_label_map(pair.gt_path, h);
        LabelMap pred = load_label_map(pair.pred_path, h);
        ConfusionMatrix image_matrix(n);
        try {
          accumulate(image_matrix, gt, pred, options.accumulate);
        } catch (const ValidationError& e) {
          throw ValidationError(pair.key + ": " + e.what());
        }
        locals[t].merge(image_matrix);

        ImageScore& score = result.per_image[i];
        score.key = pair.key;
        score.condition = pair.condition;
        try {
          MetricSummary s = summarize(image_matrix, h, important, {},
                                      options.subset_penalty);
          score.miou = s.miou;
          score.smiou = s.smiou;
        } catch (const ValidationError&) {
          // Fully ignored image: no defined per-image score.
          score.miou = score.smiou = kNaN;
        }
      }
    } catch (...) {
      std::scoped_lock lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
      abort.store(true, std::memory_order_relaxed);
    }
  };

  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t);
    for (std::thread& thread : pool) thread.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  result.confusion = ConfusionMatrix(n);
  for (const ConfusionMatrix& local : locals) result.confusion.merge(local);
  result.overall = summarize(result.confusion, h, important, subsets,
                             options.subset_penalty);
  return result;
}

}  // namespace safeseg
