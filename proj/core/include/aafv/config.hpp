#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "aafv/dataio.hpp"
#include "aafv/learners.hpp"

#include "json.hpp"

namespace aafv::config {

struct CsvSource {
  std::filesystem::path path;
  dataio::LabelColumn label_column;
  dataio::SplitPlan split;  // shuffle_seed is derived per run seed
};

struct RosterEntry {
  learners::ModelKind kind;
  learners::Hyperparams hyperparams;
  std::size_t mlp_hidden_dim = 0;  // 0 = default floor((C+1)/2)
};

struct ExperimentConfig {
  std::optional<CsvSource> csv;          // exactly one source is set
  std::optional<dataio::SynthSpec> synth;
  std::vector<RosterEntry> roster;
  std::vector<std::string> scenarios;    // subset of {aafv, fedavg, local}
  double epsilon = 1.0;
  double tau = 0.3;
  std::size_t e_com = 30;
  std::size_t local_epochs_per_round = 10;
  std::size_t pre_train_epochs = 300;
  std::size_t seed_count = 1;
  std::uint64_t master_seed = 0;
  double fedavg_clip = 1.0;
  std::filesystem::path output_dir = "out";
};

/// All validation errors are collected; unknown keys anywhere are errors.
struct ConfigError : std::runtime_error {
  explicit ConfigError(std::vector<std::string> errs);
  std::vector<std::string> errors;
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig parse_config_file(const std::filesystem::path& path);

/// Fully-resolved echo, suitable for embedding in reports; deterministic
/// key order and content.
nlohmann::ordered_json echo_config(const ExperimentConfig& cfg);

}  // namespace aafv::config
