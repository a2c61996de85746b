#include "safeseg/confusion.hpp"

#include <sstream>

#include "safeseg/errors.hpp"

namespace safeseg {

ConfusionMatrix::ConfusionMatrix(std::size_t num_classes)
    : classes_(num_classes), counts_(num_classes * num_classes, 0) {}

SetSizes ConfusionMatrix::set_sizes(ClassId c) const {
  SetSizes sizes;
  for (std::size_t s = 0; s < classes_; ++s) {
    sizes.gt += count(c, ClassId(s));
    sizes.pred += count(ClassId(s), c);
  }
  // Union counts the diagonal once.
  sizes.union_with = sizes.gt + sizes.pred - count(c, c);
  return sizes;
}

std::uint64_t ConfusionMatrix::total_count() const {
  std::uint64_t total = 0;
  for (std::uint64_t v : counts_) total += v;
  return total;
}

void ConfusionMatrix::merge(const ConfusionMatrix& other) {
  if (other.classes_ != classes_)
    throw ValidationError("cannot merge confusion matrices of different sizes");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  ignored_ += other.ignored_;
  images_ += other.images_;
}

void ConfusionMatrix::dump(std::ostream& out,
                           const std::vector<std::string>& class_names) const {
  if (class_names.size() != classes_)
    throw ValidationError("class name count does not match matrix size");
  out << "classes";
  for (const std::string& name : class_names) out << '\t' << name;
  out << '\n';
  for (std::size_t g = 0; g < classes_; ++g) {
    out << class_names[g];
    for (std::size_t p = 0; p < classes_; ++p)
      out << '\t' << count(ClassId(g), ClassId(p));
    out << '\n';
  }
  out << "ignored\t" << ignored_ << '\n';
  out << "images\t" << images_ << '\n';
}

ConfusionMatrix ConfusionMatrix::from_dump(std::istream& in,
                                           std::vector<std::string>* names_out) {
  auto bad = [](const std::string& why) {
    return ValidationError("confusion dump: " + why);
  };

  std::string line;
  if (!std::getline(in, line)) throw bad("empty input");
  std::istringstream header(line);
  std::string token;
  if (!std::getline(header, token, '\t') || token != "classes")
    throw bad("first line must start with \"classes\"");
  std::vector<std::string> names;
  while (std::getline(header, token, '\t')) {
    if (token.empty()) throw bad("empty class name in header");
    names.push_back(token);
  }
  if (names.empty()) throw bad("header lists no classes");

  ConfusionMatrix m(names.size());
  for (std::size_t g = 0; g < names.size(); ++g) {
    if (!std::getline(in, line)) throw bad("missing row for " + names[g]);
    std::istringstream row(line);
    if (!std::getline(row, token, '\t') || token != names[g])
      throw bad("row " + std::to_string(g) + " does not match header order");
    for (std::size_t p = 0; p < names.size(); ++p) {
      if (!std::getline(row, token, '\t'))
        throw bad("row " + names[g] + " is too short");
      try {
        m.counts_[g * names.size() + p] = std::stoull(token);
      } catch (const std::exception&) {
        throw bad("non-numeric count \"" + token + "\" in row " + names[g]);
      }
    }
    if (std::getline(row, token, '\t')) throw bad("row " + names[g] + " is too long");
  }

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream tail(line);
    std::string key, value;
    if (!std::getline(tail, key, '\t') || !std::getline(tail, value, '\t'))
      throw bad("malformed trailer line \"" + line + "\"");
    try {
      if (key == "ignored")
        m.ignored_ = std::stoull(value);
      else if (key == "images")
        m.images_ = std::stoull(value);
      else
        throw bad("unknown trailer key \"" + key + "\"");
    } catch (const ValidationError&) {
      throw;
    } catch (const std::exception&) {
      throw bad("non-numeric trailer value \"" + value + "\"");
    }
  }

  if (names_out) *names_out = std::move(names);
  return m;
}

bool ConfusionMatrix::operator==(const ConfusionMatrix& other) const {
  return classes_ == other.classes_ && counts_ == other.counts_ &&
         ignored_ == other.ignored_ && images_ == other.images_;
}

void accumulate(ConfusionMatrix& m, const LabelMap& gt, const LabelMap& pred,
                const AccumulateOptions& options) {
  if (!gt.same_shape(pred)) {
    std::ostringstream msg;
    msg << "shape mismatch: ground truth " << gt.width << "x" << gt.height
        << " vs prediction " << pred.width << "x" << pred.height;
    throw ValidationError(msg.str());
  }

  std::size_t n = m.num_classes();
  for (std::size_t i = 0; i < gt.pixels.size(); ++i) {
    ClassId g = gt.pixels[i];
    ClassId p = pred.pixels[i];
    if (g == kIgnoreClass) {
      ++m.ignored_;
      continue;
    }
    if (g >= n)
      throw ValidationError("ground-truth class id " + std::to_string(g) +
                            " out of range");
    if (p == kIgnoreClass) {
      if (options.strict)
        throw ValidationError(
            "prediction contains the ignore label; re-run with --lenient to "
            "remap it");
      p = options.lenient_fallback;
    }
    if (p >= n)
      throw ValidationError("prediction class id " + std::to_string(p) +
                            " out of range");
    ++m.count(g, p);
  }
  ++m.images_;
}

}  // namespace safeseg
