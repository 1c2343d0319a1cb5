#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace aafv {

/// Row-major numeric matrix of N samples by C features.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;  // rows * cols, row-major

  FeatureMatrix() = default;
  FeatureMatrix(std::size_t r, std::size_t c)
      : rows(r), cols(c), values(r * c, 0.0) {}

  double& at(std::size_t i, std::size_t j) { return values[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }

  std::span<const double> row(std::size_t i) const {
    return {values.data() + i * cols, cols};
  }
  std::span<double> row(std::size_t i) {
    return {values.data() + i * cols, cols};
  }

  /// Throws if any value is non-finite or the shape is degenerate.
  void validate() const;
};

struct LabeledDataset {
  FeatureMatrix features;
  std::vector<int> labels;  // values in {0, 1}, one per row

  std::size_t size() const { return features.rows; }
  void validate() const;
};

/// Ground-truth labels for the unlabeled pool, kept for diagnostics only.
/// The protocol path must never call reveal(); tests enforce this by
/// poisoning the channel.
class SealedLabels {
 public:
  SealedLabels() = default;
  explicit SealedLabels(std::vector<int> labels) : labels_(std::move(labels)) {}

  static SealedLabels poisoned() {
    SealedLabels s;
    s.poisoned_ = true;
    return s;
  }

  bool empty() const { return labels_.empty() && !poisoned_; }

  const std::vector<int>& reveal() const {
    if (poisoned_)
      throw std::logic_error(
          "sealed ground-truth labels were read by a forbidden code path");
    return labels_;
  }

 private:
  std::vector<int> labels_;
  bool poisoned_ = false;
};

struct UnlabeledDataset {
  FeatureMatrix features;
  SealedLabels hidden_truth;

  std::size_t size() const { return features.rows; }
};

}  // namespace aafv
