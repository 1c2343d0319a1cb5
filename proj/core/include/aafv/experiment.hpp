#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "aafv/config.hpp"
#include "aafv/metrics.hpp"
#include "aafv/protocol.hpp"

namespace aafv::experiment {

struct RunOutput {
  std::vector<metrics::SeedResult> results;
  std::vector<metrics::Summary> summaries;
  nlohmann::ordered_json report;
  std::string table;
};

/// Runs every requested scenario for every derived seed and aggregates.
/// The whole run is a pure function of (config, master_seed).
RunOutput run_experiment(const config::ExperimentConfig& cfg,
                         std::size_t parallelism = 1);

/// run_experiment plus the on-disk reproducibility bundle: config echo,
/// summary JSON, per-seed CSV, and round-trace CSVs under out_dir.
RunOutput run_and_write(const config::ExperimentConfig& cfg,
                        const std::filesystem::path& out_dir,
                        std::size_t parallelism = 1);

/// Per-seed scenario execution, exposed for tests.
std::vector<metrics::SeedResult> run_one_seed(
    const config::ExperimentConfig& cfg, std::size_t seed_index,
    std::vector<protocol::RoundTrace>* aafv_traces = nullptr);

}  // namespace aafv::experiment
