#include "aafv/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "aafv/ldp.hpp"

namespace aafv::protocol {

namespace {

void check_setup(const FederationSetup& setup, bool federated) {
  if (federated && setup.clients.size() < 2)
    throw std::invalid_argument("federated scenarios need at least 2 clients");
  if (setup.clients.empty())
    throw std::invalid_argument("setup has no clients");
  std::size_t dim = setup.clients.front().learner->input_dim();
  for (const auto& c : setup.clients) {
    if (c.learner->input_dim() != dim || c.data.features.cols != dim)
      throw std::invalid_argument("feature dimensions disagree across clients");
  }
  if (setup.unlabeled.size() > 0 && setup.unlabeled.features.cols != dim)
    throw std::invalid_argument("unlabeled feature dimension mismatch");
  if (!(setup.tau > 0.0 && setup.tau < 0.5))
    throw std::invalid_argument("tau must lie in (0, 0.5)");
}

LabeledDataset concat(const LabeledDataset& a, const LabeledDataset& b) {
  LabeledDataset out;
  out.features.rows = a.features.rows + b.features.rows;
  out.features.cols = a.features.cols;
  out.features.values = a.features.values;
  out.features.values.insert(out.features.values.end(), b.features.values.begin(),
                             b.features.values.end());
  out.labels = a.labels;
  out.labels.insert(out.labels.end(), b.labels.begin(), b.labels.end());
  return out;
}

}  // namespace

double evaluate(const learners::Learner& learner, const LabeledDataset& test) {
  if (test.size() == 0) throw std::invalid_argument("empty test set");
  auto labels = learners::predict_label(learner, test.features);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == test.labels[i]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(labels.size());
}

AafvResult run_aafv(const FederationSetup& setup, const SeedStream& seeds) {
  check_setup(setup, /*federated=*/true);
  std::size_t k_clients = setup.clients.size();
  if (setup.unlabeled.size() == 0)
    throw std::invalid_argument("aafv needs a non-empty unlabeled pool");
  auto params = ldp::piecewise_params(setup.epsilon);

  AafvResult result;
  for (std::size_t k = 0; k < k_clients; ++k) {
    auto model = setup.clients[k].learner->clone();
    Rng rng = seeds.child("pretrain").child(k).rng();
    if (setup.pre_train_epochs > 0)
      learners::fit(*model, setup.clients[k].data, setup.pre_train_epochs, rng);
    result.learners.push_back(std::move(model));
  }

  for (std::size_t round = 0; round < setup.e_com; ++round) {
    voting::VoteMatrix votes;
    RoundTrace trace;
    trace.round = round;
    for (std::size_t k = 0; k < k_clients; ++k) {
      auto p = learners::predict_proba(*result.learners[k], setup.unlabeled.features);
      Rng rng = seeds.child("perturb").child(k).child(round).rng();
      auto p_tilde = ldp::perturb_predictions(p, params, rng);
      auto v = voting::local_vote(p_tilde, setup.tau);
      trace.client_abstains.push_back(static_cast<std::size_t>(
          std::count(v.begin(), v.end(), voting::Vote::Abstain)));
      votes.by_client.push_back(std::move(v));
    }

    // Server side: only the vote matrix crosses this boundary.
    auto global = voting::consolidate(votes);
    trace.global_abstains = static_cast<std::size_t>(
        std::count(global.begin(), global.end(), voting::Vote::Abstain));

    auto pseudo = voting::build_pseudo_dataset(setup.unlabeled, global);
    trace.pseudo_size = pseudo.size();
    if (pseudo.size() == 0) {
      trace.revisit_skipped = true;
    } else {
      for (std::size_t k = 0; k < k_clients; ++k) {
        auto pool = concat(pseudo, setup.clients[k].data);
        Rng rng = seeds.child("revisit").child(k).child(round).rng();
        learners::fit(*result.learners[k], pool, setup.local_epochs_per_round, rng);
      }
    }
    for (std::size_t k = 0; k < k_clients; ++k)
      trace.client_test_accuracy.push_back(evaluate(*result.learners[k], setup.test));
    result.traces.push_back(std::move(trace));
  }
  return result;
}

FedAvgResult run_fedavg(const FederationSetup& setup, const SeedStream& seeds) {
  check_setup(setup, /*federated=*/true);
  std::size_t k_clients = setup.clients.size();
  const std::string descriptor = setup.clients.front().learner->descriptor();
  for (const auto& c : setup.clients)
    if (c.learner->descriptor() != descriptor)
      throw std::invalid_argument(
          "fedavg requires a homogeneous roster; found " + descriptor + " vs " +
          c.learner->descriptor());

  FedAvgResult result;
  result.global_model = setup.clients.front().learner->clone();
  std::vector<double> global = result.global_model->params();
  double clip = setup.fedavg_clip;

  for (std::size_t round = 0; round < setup.e_com; ++round) {
    std::vector<double> sum(global.size(), 0.0);
    for (std::size_t k = 0; k < k_clients; ++k) {
      auto model = setup.clients[k].learner->clone();
      model->set_params(global);
      Rng train_rng = seeds.child("fedavg-train").child(k).child(round).rng();
      learners::fit(*model, setup.clients[k].data, setup.local_epochs_per_round,
                    train_rng);
      auto p = model->params();
      Rng noise_rng = seeds.child("fedavg-noise").child(k).child(round).rng();
      for (auto& v : p) {
        v = std::clamp(v, -clip, clip);
        v = ldp::laplace_perturb(v, 2.0 * clip, setup.epsilon, noise_rng);
      }
      for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += p[i];
    }
    for (std::size_t i = 0; i < sum.size(); ++i)
      global[i] = sum[i] / static_cast<double>(k_clients);
    result.global_model->set_params(global);

    RoundTrace trace;
    trace.round = round;
    trace.client_test_accuracy.push_back(
        evaluate(*result.global_model, setup.test));
    result.traces.push_back(std::move(trace));
  }
  return result;
}

std::vector<std::unique_ptr<learners::Learner>> run_local(
    const FederationSetup& setup, std::size_t epochs, const SeedStream& seeds) {
  check_setup(setup, /*federated=*/false);
  std::vector<std::unique_ptr<learners::Learner>> out;
  for (std::size_t k = 0; k < setup.clients.size(); ++k) {
    auto model = setup.clients[k].learner->clone();
    Rng rng = seeds.child("local").child(k).rng();
    if (epochs > 0) learners::fit(*model, setup.clients[k].data, epochs, rng);
    out.push_back(std::move(model));
  }
  return out;
}

}  // namespace aafv::protocol
