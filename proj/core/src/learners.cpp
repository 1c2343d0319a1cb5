#include "aafv/learners.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace aafv::learners {

double sigmoid(double s) {
  if (s >= 0.0) {
    return 1.0 / (1.0 + std::exp(-s));
  }
  double e = std::exp(s);
  return e / (1.0 + e);
}

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Logistic: return "logistic";
    case ModelKind::Perceptron: return "perceptron";
    case ModelKind::Svm: return "svm";
    case ModelKind::Mlp: return "mlp";
  }
  throw std::logic_error("unknown model kind");
}

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "logistic") return ModelKind::Logistic;
  if (name == "perceptron") return ModelKind::Perceptron;
  if (name == "svm") return ModelKind::Svm;
  if (name == "mlp") return ModelKind::Mlp;
  throw std::invalid_argument("unknown model kind: " + name);
}

std::string Learner::descriptor() const {
  return to_string(kind()) + "/" + std::to_string(input_dim()) + "->" +
         std::to_string(param_count());
}

std::size_t default_mlp_hidden(std::size_t input_dim) {
  return (input_dim + 1) / 2;
}

namespace {

// Numerically stable binary cross-entropy in terms of the raw score:
// -y*log(sigmoid(s)) - (1-y)*log(1-sigmoid(s)) = log(1+e^{-s}) + (1-y)*s.
double bce_from_score(double s, int y) {
  double base = s > 0.0 ? std::log1p(std::exp(-s)) : -s + std::log1p(std::exp(s));
  return base + (1 - y) * s;
}

void check_dim(const Learner& l, std::size_t cols) {
  if (cols != l.input_dim())
    throw std::invalid_argument("feature dimension " + std::to_string(cols) +
                                " does not match model input dimension " +
                                std::to_string(l.input_dim()));
}

/// Linear models share the parameter layout [w_0..w_{C-1}, b].
class LinearModel : public Learner {
 public:
  LinearModel(ModelKind kind, std::size_t input_dim, const Hyperparams& hp,
              Rng& init_rng)
      : kind_(kind), hp_(hp), weights_(input_dim, 0.0), bias_(0.0) {
    for (auto& w : weights_) w = init_rng.uniform(-0.05, 0.05);
  }

  ModelKind kind() const override { return kind_; }
  std::size_t input_dim() const override { return weights_.size(); }
  std::size_t param_count() const override { return weights_.size() + 1; }

  std::vector<double> params() const override {
    std::vector<double> p(weights_);
    p.push_back(bias_);
    return p;
  }

  void set_params(std::span<const double> p) override {
    if (p.size() != param_count())
      throw std::invalid_argument("parameter vector length mismatch");
    std::copy(p.begin(), p.end() - 1, weights_.begin());
    bias_ = p.back();
  }

  std::unique_ptr<Learner> clone() const override {
    return std::make_unique<LinearModel>(*this);
  }

  double decision_score(std::span<const double> x) const override {
    if (x.size() != weights_.size())
      throw std::invalid_argument("feature dimension mismatch");
    double s = bias_;
    for (std::size_t j = 0; j < weights_.size(); ++j) s += weights_[j] * x[j];
    return s;
  }

  double loss_and_grad(const LabeledDataset& batch,
                       std::span<double> grad) const override {
    if (batch.size() == 0) throw std::invalid_argument("empty batch");
    check_dim(*this, batch.features.cols);
    if (grad.size() != param_count())
      throw std::invalid_argument("gradient buffer length mismatch");
    std::fill(grad.begin(), grad.end(), 0.0);

    double loss = 0.0;
    double n = static_cast<double>(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
      auto x = batch.features.row(i);
      int y = batch.labels[i];
      double s = decision_score(x);
      double dl_ds = 0.0;  // d(per-sample loss)/d(score)
      switch (kind_) {
        case ModelKind::Logistic:
          loss += bce_from_score(s, y);
          dl_ds = sigmoid(s) - y;
          break;
        case ModelKind::Perceptron: {
          double sign = y == 1 ? 1.0 : -1.0;
          double margin = sign * s;
          if (margin < 0.0) {
            loss += -margin;
            dl_ds = -sign;
          }
          break;
        }
        case ModelKind::Svm: {
          double sign = y == 1 ? 1.0 : -1.0;
          double margin = sign * s;
          if (margin < 1.0) {
            loss += 1.0 - margin;
            dl_ds = -sign;
          }
          break;
        }
        case ModelKind::Mlp:
          throw std::logic_error("unreachable");
      }
      if (dl_ds != 0.0) {
        for (std::size_t j = 0; j < weights_.size(); ++j)
          grad[j] += dl_ds * x[j] / n;
        grad[weights_.size()] += dl_ds / n;
      }
    }
    loss /= n;

    if (kind_ == ModelKind::Svm && hp_.l2 > 0.0) {
      double reg = 0.0;
      for (std::size_t j = 0; j < weights_.size(); ++j) {
        reg += weights_[j] * weights_[j];
        grad[j] += hp_.l2 * weights_[j];
      }
      loss += 0.5 * hp_.l2 * reg;
    }
    if (!std::isfinite(loss))
      throw std::runtime_error("non-finite loss in " + to_string(kind_));
    return loss;
  }

  const Hyperparams& hyperparams() const override { return hp_; }

 private:
  ModelKind kind_;
  Hyperparams hp_;
  std::vector<double> weights_;
  double bias_;
};

/// One-hidden-layer network: input -> hidden (ReLU) -> scalar score.
/// Parameter layout: [W1 (H*C, row-major), b1 (H), w2 (H), b2].
class MlpModel : public Learner {
 public:
  MlpModel(std::size_t input_dim, std::size_t hidden_dim, const Hyperparams& hp,
           Rng& init_rng)
      : hp_(hp), input_dim_(input_dim), hidden_dim_(hidden_dim),
        params_(hidden_dim * input_dim + hidden_dim + hidden_dim + 1, 0.0) {
    if (hidden_dim < 1) throw std::invalid_argument("mlp hidden_dim must be >= 1");
    // Weights uniform(-0.05, 0.05); biases stay 0.
    for (std::size_t i = 0; i < hidden_dim_ * input_dim_; ++i)
      params_[i] = init_rng.uniform(-0.05, 0.05);
    for (std::size_t i = 0; i < hidden_dim_; ++i)
      params_[w2_off() + i] = init_rng.uniform(-0.05, 0.05);
  }

  ModelKind kind() const override { return ModelKind::Mlp; }
  std::size_t input_dim() const override { return input_dim_; }
  std::size_t hidden_dim() const { return hidden_dim_; }
  std::size_t param_count() const override { return params_.size(); }
  std::vector<double> params() const override { return params_; }

  void set_params(std::span<const double> p) override {
    if (p.size() != params_.size())
      throw std::invalid_argument("parameter vector length mismatch");
    std::copy(p.begin(), p.end(), params_.begin());
  }

  std::unique_ptr<Learner> clone() const override {
    return std::make_unique<MlpModel>(*this);
  }

  std::string descriptor() const override {
    return "mlp/" + std::to_string(input_dim_) + "-" +
           std::to_string(hidden_dim_) + "-1";
  }

  double decision_score(std::span<const double> x) const override {
    if (x.size() != input_dim_)
      throw std::invalid_argument("feature dimension mismatch");
    double s = params_[b2_off()];
    for (std::size_t h = 0; h < hidden_dim_; ++h) {
      double a = params_[b1_off() + h];
      const double* w1 = params_.data() + h * input_dim_;
      for (std::size_t j = 0; j < input_dim_; ++j) a += w1[j] * x[j];
      if (a > 0.0) s += params_[w2_off() + h] * a;
    }
    return s;
  }

  double loss_and_grad(const LabeledDataset& batch,
                       std::span<double> grad) const override {
    if (batch.size() == 0) throw std::invalid_argument("empty batch");
    check_dim(*this, batch.features.cols);
    if (grad.size() != params_.size())
      throw std::invalid_argument("gradient buffer length mismatch");
    std::fill(grad.begin(), grad.end(), 0.0);

    double loss = 0.0;
    double n = static_cast<double>(batch.size());
    std::vector<double> act(hidden_dim_);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      auto x = batch.features.row(i);
      int y = batch.labels[i];
      double s = params_[b2_off()];
      for (std::size_t h = 0; h < hidden_dim_; ++h) {
        double a = params_[b1_off() + h];
        const double* w1 = params_.data() + h * input_dim_;
        for (std::size_t j = 0; j < input_dim_; ++j) a += w1[j] * x[j];
        act[h] = a > 0.0 ? a : 0.0;
        s += params_[w2_off() + h] * act[h];
      }
      loss += bce_from_score(s, y);
      double dl_ds = (sigmoid(s) - y) / n;
      grad[b2_off()] += dl_ds;
      for (std::size_t h = 0; h < hidden_dim_; ++h) {
        grad[w2_off() + h] += dl_ds * act[h];
        if (act[h] > 0.0) {
          double dh = dl_ds * params_[w2_off() + h];
          grad[b1_off() + h] += dh;
          double* g1 = grad.data() + h * input_dim_;
          for (std::size_t j = 0; j < input_dim_; ++j) g1[j] += dh * x[j];
        }
      }
    }
    loss /= n;
    if (!std::isfinite(loss)) throw std::runtime_error("non-finite loss in mlp");
    return loss;
  }

  const Hyperparams& hyperparams() const override { return hp_; }

 private:
  std::size_t b1_off() const { return hidden_dim_ * input_dim_; }
  std::size_t w2_off() const { return b1_off() + hidden_dim_; }
  std::size_t b2_off() const { return w2_off() + hidden_dim_; }

  Hyperparams hp_;
  std::size_t input_dim_;
  std::size_t hidden_dim_;
  std::vector<double> params_;
};

}  // namespace

std::unique_ptr<Learner> make_learner(ModelKind kind, std::size_t input_dim,
                                      const Hyperparams& hp, Rng& init_rng,
                                      std::size_t mlp_hidden_dim) {
  if (input_dim < 1) throw std::invalid_argument("input_dim must be >= 1");
  if (kind == ModelKind::Mlp) {
    std::size_t hidden =
        mlp_hidden_dim > 0 ? mlp_hidden_dim : default_mlp_hidden(input_dim);
    return std::make_unique<MlpModel>(input_dim, hidden, hp, init_rng);
  }
  return std::make_unique<LinearModel>(kind, input_dim, hp, init_rng);
}

TrainLog fit(Learner& learner, const LabeledDataset& data, std::size_t epochs,
             Rng& rng) {
  if (data.size() == 0) throw std::invalid_argument("cannot fit on empty data");
  check_dim(learner, data.features.cols);
  const Hyperparams& hp = learner.hyperparams();

  TrainLog log;
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> params = learner.params();
  std::vector<double> grad(params.size());

  for (std::size_t e = 0; e < epochs; ++e) {
    for (std::size_t i = order.size() - 1; i > 0; --i) {
      std::size_t j = static_cast<std::size_t>(rng.uniform_below(i + 1));
      std::swap(order[i], order[j]);
    }
    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += hp.batch_size) {
      std::size_t count = std::min(hp.batch_size, order.size() - start);
      LabeledDataset batch;
      batch.features = FeatureMatrix(count, data.features.cols);
      batch.labels.resize(count);
      for (std::size_t i = 0; i < count; ++i) {
        std::size_t src = order[start + i];
        std::copy(data.features.row(src).begin(), data.features.row(src).end(),
                  batch.features.row(i).begin());
        batch.labels[i] = data.labels[src];
      }
      learner.set_params(params);
      epoch_loss += learner.loss_and_grad(batch, grad);
      ++batches;
      for (std::size_t p = 0; p < params.size(); ++p)
        params[p] -= hp.learning_rate * grad[p];
    }
    learner.set_params(params);
    log.epoch_loss.push_back(epoch_loss / static_cast<double>(batches));
  }
  return log;
}

std::vector<double> predict_proba(const Learner& learner,
                                  const FeatureMatrix& features) {
  check_dim(learner, features.cols);
  std::vector<double> out(features.rows);
  for (std::size_t i = 0; i < features.rows; ++i)
    out[i] = sigmoid(learner.decision_score(features.row(i)));
  return out;
}

std::vector<int> predict_label(const Learner& learner,
                               const FeatureMatrix& features, double cut) {
  auto p = predict_proba(learner, features);
  std::vector<int> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i] >= cut ? 1 : 0;
  return out;
}

nlohmann::json save_checkpoint(const Learner& learner) {
  nlohmann::json j;
  j["version"] = 1;
  j["kind"] = to_string(learner.kind());
  j["descriptor"] = learner.descriptor();
  j["input_dim"] = learner.input_dim();
  if (auto* mlp = dynamic_cast<const MlpModel*>(&learner))
    j["hidden_dim"] = mlp->hidden_dim();
  const Hyperparams& hp = learner.hyperparams();
  j["hyperparams"] = {{"learning_rate", hp.learning_rate},
                      {"batch_size", hp.batch_size},
                      {"l2", hp.l2}};
  j["params"] = learner.params();
  return j;
}

std::unique_ptr<Learner> load_checkpoint(const nlohmann::json& j) {
  if (j.at("version").get<int>() != 1)
    throw std::runtime_error("unsupported checkpoint version");
  Hyperparams hp;
  hp.learning_rate = j.at("hyperparams").at("learning_rate").get<double>();
  hp.batch_size = j.at("hyperparams").at("batch_size").get<std::size_t>();
  hp.l2 = j.at("hyperparams").at("l2").get<double>();
  ModelKind kind = model_kind_from_string(j.at("kind").get<std::string>());
  std::size_t input_dim = j.at("input_dim").get<std::size_t>();
  std::size_t hidden = kind == ModelKind::Mlp
                           ? j.at("hidden_dim").get<std::size_t>()
                           : 0;
  Rng dummy(0);
  auto learner = make_learner(kind, input_dim, hp, dummy, hidden);
  auto params = j.at("params").get<std::vector<double>>();
  learner->set_params(params);
  return learner;
}

}  // namespace aafv::learners
