#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "aafv/data.hpp"
#include "aafv/rng.hpp"

#include "json.hpp"

namespace aafv::learners {

enum class ModelKind { Logistic, Perceptron, Svm, Mlp };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

struct Hyperparams {
  double learning_rate = 0.01;
  std::size_t batch_size = 32;
  double l2 = 1e-3;  // used by the SVM objective only
};

struct TrainLog {
  std::vector<double> epoch_loss;
};

/// Common interface over the heterogeneous model zoo. Every model maps its
/// raw decision score through a sigmoid, so predict_proba is always in [0,1].
class Learner {
 public:
  virtual ~Learner() = default;

  virtual ModelKind kind() const = 0;
  virtual std::size_t input_dim() const = 0;
  virtual std::size_t param_count() const = 0;
  virtual std::vector<double> params() const = 0;
  virtual void set_params(std::span<const double> p) = 0;
  virtual std::unique_ptr<Learner> clone() const = 0;

  /// Raw (pre-sigmoid) decision score for one sample.
  virtual double decision_score(std::span<const double> x) const = 0;

  /// Mean batch loss and its gradient with respect to the parameter vector.
  virtual double loss_and_grad(const LabeledDataset& batch,
                               std::span<double> grad) const = 0;

  /// Optimizer settings this model was created with.
  virtual const Hyperparams& hyperparams() const = 0;

  /// Architecture signature used by the FedAvg homogeneity check and by
  /// checkpoints.
  virtual std::string descriptor() const;
};

std::unique_ptr<Learner> make_learner(ModelKind kind, std::size_t input_dim,
                                      const Hyperparams& hp, Rng& init_rng,
                                      std::size_t mlp_hidden_dim = 0);

/// Default MLP hidden width: floor((input_dim + 1) / 2).
std::size_t default_mlp_hidden(std::size_t input_dim);

/// Mini-batch SGD over shuffled batches. Same seed, data, and
/// hyperparameters give bit-identical parameters.
TrainLog fit(Learner& learner, const LabeledDataset& data, std::size_t epochs,
             Rng& rng);

std::vector<double> predict_proba(const Learner& learner,
                                  const FeatureMatrix& features);
std::vector<int> predict_label(const Learner& learner,
                               const FeatureMatrix& features, double cut = 0.5);

double sigmoid(double s);

nlohmann::json save_checkpoint(const Learner& learner);
std::unique_ptr<Learner> load_checkpoint(const nlohmann::json& j);

}  // namespace aafv::learners
