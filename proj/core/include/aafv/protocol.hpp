#pragma once

#include <memory>
#include <vector>

#include "aafv/data.hpp"
#include "aafv/learners.hpp"
#include "aafv/rng.hpp"
#include "aafv/voting.hpp"

namespace aafv::protocol {

struct ClientSlot {
  std::unique_ptr<learners::Learner> learner;
  LabeledDataset data;
};

struct FederationSetup {
  std::vector<ClientSlot> clients;
  UnlabeledDataset unlabeled;
  LabeledDataset test;
  double epsilon = 1.0;
  double tau = 0.3;
  std::size_t e_com = 30;
  std::size_t local_epochs_per_round = 10;
  std::size_t pre_train_epochs = 300;
  double fedavg_clip = 1.0;  // per-coordinate clip bound for the baseline
};

struct RoundTrace {
  std::size_t round = 0;
  std::vector<std::size_t> client_abstains;
  std::size_t global_abstains = 0;
  std::size_t pseudo_size = 0;
  bool revisit_skipped = false;
  std::vector<double> client_test_accuracy;
};

struct AafvResult {
  std::vector<std::unique_ptr<learners::Learner>> learners;
  std::vector<RoundTrace> traces;
};

struct FedAvgResult {
  std::unique_ptr<learners::Learner> global_model;
  std::vector<RoundTrace> traces;  // client_test_accuracy holds the global model's
};

/// Pre-train, then e_com rounds of vote -> consolidate -> revisit. The
/// server side sees only Vote values; sealed unlabeled labels are never read.
AafvResult run_aafv(const FederationSetup& setup, const SeedStream& seeds);

/// Parameter-averaging baseline with per-coordinate clipping and Laplace
/// perturbation before upload. Rejects heterogeneous rosters.
FedAvgResult run_fedavg(const FederationSetup& setup, const SeedStream& seeds);

/// Isolated training, no communication and no perturbation.
std::vector<std::unique_ptr<learners::Learner>> run_local(
    const FederationSetup& setup, std::size_t epochs, const SeedStream& seeds);

double evaluate(const learners::Learner& learner, const LabeledDataset& test);

}  // namespace aafv::protocol
