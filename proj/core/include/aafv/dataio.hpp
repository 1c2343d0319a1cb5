#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "aafv/data.hpp"

namespace aafv::dataio {

/// Label column chosen by header name (requires a header row) or by
/// zero-based index.
using LabelColumn = std::variant<std::string, std::size_t>;

/// Loads a comma-separated file with an optional single header row.
/// The label column must contain only 0/1; malformed rows are reported
/// with their 1-based line number.
LabeledDataset load_csv(const std::filesystem::path& path,
                        const LabelColumn& label_column);

void write_csv(const LabeledDataset& data, const std::filesystem::path& path,
               const std::vector<std::string>& feature_names = {},
               const std::string& label_name = "label");
void write_csv(const UnlabeledDataset& data, const std::filesystem::path& path);

/// Per-column normalization statistics (population formula).
struct NormStats {
  std::vector<double> mean;
  std::vector<double> stddev;  // zero-variance columns carry stddev 1

  std::size_t cols() const { return mean.size(); }
};

NormStats zscore_fit(const FeatureMatrix& data);
FeatureMatrix zscore_apply(const FeatureMatrix& data, const NormStats& stats);

struct SplitPlan {
  std::size_t test_count = 0;
  std::size_t unlabeled_count = 0;
  std::vector<std::size_t> client_counts;
  std::uint64_t shuffle_seed = 0;
};

struct SplitResult {
  LabeledDataset test;
  UnlabeledDataset unlabeled;
  std::vector<LabeledDataset> clients;
};

/// Fisher-Yates shuffle of row indices followed by contiguous slicing.
/// The unlabeled slice keeps its true labels only in the sealed channel.
SplitResult split(const LabeledDataset& data, const SplitPlan& plan);

struct SynthSpec {
  std::size_t n_samples = 3000;
  std::size_t n_features = 50;
  std::size_t n_clients = 3;
  double bias_strength = 0.5;
  std::uint64_t seed = 0;
  // Fractions of n_samples held out; the remainder splits evenly over clients.
  double test_fraction = 0.2;
  double unlabeled_fraction = 0.15;
  double label_noise = 0.08;
};

/// Linearly-separable-with-noise binary task. Client shards are drawn from
/// feature-shifted copies of the global distribution so each local model is
/// individually biased; test and unlabeled pools come from the unshifted
/// distribution.
SplitResult synth_biased_shards(const SynthSpec& spec);

}  // namespace aafv::dataio
