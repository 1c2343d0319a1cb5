#include <cmath>
#include <vector>

#include "doctest.h"

#include "aafv/learners.hpp"

using namespace aafv;
using learners::ModelKind;

namespace {

learners::Hyperparams default_hp() { return {}; }

std::unique_ptr<learners::Learner> fresh(ModelKind kind, std::size_t dim,
                                         std::uint64_t seed) {
  Rng rng(seed);
  return learners::make_learner(kind, dim, default_hp(), rng);
}

LabeledDataset random_batch(std::size_t n, std::size_t dim, Rng& rng) {
  LabeledDataset data;
  data.features = FeatureMatrix(n, dim);
  for (auto& v : data.features.values) v = rng.uniform(-2.0, 2.0);
  data.labels.resize(n);
  for (auto& y : data.labels) y = static_cast<int>(rng.uniform_below(2));
  return data;
}

double fd_gradient_error(learners::Learner& model, const LabeledDataset& batch) {
  auto params = model.params();
  std::vector<double> grad(params.size());
  model.loss_and_grad(batch, grad);

  double max_rel = 0.0;
  const double h = 1e-6;
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto plus = params, minus = params;
    plus[i] += h;
    minus[i] -= h;
    std::vector<double> scratch(params.size());
    model.set_params(plus);
    double lp = model.loss_and_grad(batch, scratch);
    model.set_params(minus);
    double lm = model.loss_and_grad(batch, scratch);
    model.set_params(params);
    double fd = (lp - lm) / (2.0 * h);
    // Central differences carry ~1e-10 cancellation noise; below that the
    // relative metric is meaningless, so treat tiny disagreements as exact.
    if (std::abs(fd - grad[i]) < 1e-7) continue;
    double denom = std::max({std::abs(fd), std::abs(grad[i]), 1e-8});
    max_rel = std::max(max_rel, std::abs(fd - grad[i]) / denom);
  }
  return max_rel;
}

// Hinge and perceptron losses have kinks; keep fixtures away from them so
// central differences are valid.
bool near_kink(const learners::Learner& model, const LabeledDataset& batch) {
  if (model.kind() == ModelKind::Logistic) return false;
  if (model.kind() == ModelKind::Mlp) {
    // ReLU kinks: any hidden pre-activation near zero.
    auto params = model.params();
    std::size_t dim = model.input_dim();
    std::size_t hidden = learners::default_mlp_hidden(dim);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      auto x = batch.features.row(i);
      for (std::size_t h = 0; h < hidden; ++h) {
        double a = params[hidden * dim + h];
        for (std::size_t j = 0; j < dim; ++j) a += params[h * dim + j] * x[j];
        if (std::abs(a) < 1e-3) return true;
      }
    }
    return false;
  }
  for (std::size_t i = 0; i < batch.size(); ++i) {
    double s = model.decision_score(batch.features.row(i));
    double sign = batch.labels[i] == 1 ? 1.0 : -1.0;
    double margin = sign * s;
    double kink = model.kind() == ModelKind::Svm ? 1.0 : 0.0;
    if (std::abs(margin - kink) < 1e-3) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("gradients match central finite differences for every model kind") {
  for (ModelKind kind : {ModelKind::Logistic, ModelKind::Perceptron,
                         ModelKind::Svm, ModelKind::Mlp}) {
    Rng rng(100 + static_cast<int>(kind));
    int checked = 0;
    std::uint64_t seed = 0;
    while (checked < 20) {
      auto model = fresh(kind, 5, ++seed);
      // Spread parameters out so fixtures are not all near the origin.
      auto params = model->params();
      for (auto& p : params) p += rng.uniform(-0.5, 0.5);
      model->set_params(params);
      auto batch = random_batch(8, 5, rng);
      if (near_kink(*model, batch)) continue;
      CHECK(fd_gradient_error(*model, batch) < 1e-4);
      ++checked;
    }
  }
}

TEST_CASE("logistic loss at the origin on a balanced batch is ln 2") {
  auto model = fresh(ModelKind::Logistic, 3, 1);
  std::vector<double> zeros(model->param_count(), 0.0);
  model->set_params(zeros);
  Rng rng(2);
  auto batch = random_batch(10, 3, rng);
  for (std::size_t i = 0; i < 10; ++i) batch.labels[i] = i % 2;
  std::vector<double> grad(model->param_count());
  CHECK(model->loss_and_grad(batch, grad) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("hinge-satisfied samples contribute no gradient beyond the regularizer") {
  learners::Hyperparams hp;
  hp.l2 = 0.0;
  Rng init(3);
  auto model = learners::make_learner(ModelKind::Svm, 2, hp, init);
  model->set_params(std::vector<double>{3.0, 0.0, 0.0});  // w=(3,0), b=0
  LabeledDataset batch;
  batch.features = FeatureMatrix(1, 2);
  batch.features.values = {1.0, 0.0};  // margin = 3 >= 1
  batch.labels = {1};
  std::vector<double> grad(3);
  CHECK(model->loss_and_grad(batch, grad) == 0.0);
  CHECK(grad == std::vector<double>{0.0, 0.0, 0.0});
}

TEST_CASE("predict_proba stays in [0,1] for extreme inputs") {
  for (ModelKind kind : {ModelKind::Logistic, ModelKind::Perceptron,
                         ModelKind::Svm, ModelKind::Mlp}) {
    auto model = fresh(kind, 4, 9);
    FeatureMatrix extreme(4, 4);
    extreme.values = {1e6, -1e6, 1e6, -1e6, 1e6, 1e6, 1e6, 1e6,
                      -1e6, -1e6, -1e6, -1e6, 0, 0, 0, 0};
    auto p = learners::predict_proba(*model, extreme);
    for (double v : p) {
      CHECK(std::isfinite(v));
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("zero parameters give 0.5 scores and all-1 labels") {
  for (ModelKind kind : {ModelKind::Logistic, ModelKind::Mlp}) {
    auto model = fresh(kind, 3, 5);
    model->set_params(std::vector<double>(model->param_count(), 0.0));
    FeatureMatrix x(2, 3);
    x.values = {1, -2, 3, 0.5, 0.5, 0.5};
    auto p = learners::predict_proba(*model, x);
    CHECK(p[0] == doctest::Approx(0.5));
    CHECK(p[1] == doctest::Approx(0.5));
    // Tie at the 0.5 cut classifies as 1.
    auto labels = learners::predict_label(*model, x);
    CHECK(labels == std::vector<int>{1, 1});
  }
}

TEST_CASE("flipping all logistic parameters complements labels off the boundary") {
  Rng rng(13);
  auto model = fresh(ModelKind::Logistic, 4, 21);
  auto params = model->params();
  for (auto& p : params) p += rng.uniform(-1.0, 1.0);
  model->set_params(params);

  FeatureMatrix x(50, 4);
  for (auto& v : x.values) v = rng.uniform(-3.0, 3.0);
  auto before = learners::predict_label(*model, x);
  auto probas = learners::predict_proba(*model, x);
  for (auto& p : params) p = -p;
  model->set_params(params);
  auto after = learners::predict_label(*model, x);
  for (std::size_t i = 0; i < before.size(); ++i) {
    if (std::abs(probas[i] - 0.5) < 1e-9) continue;
    CHECK(after[i] == 1 - before[i]);
  }
}

TEST_CASE("fit on a separable pair reaches training accuracy 1") {
  LabeledDataset data;
  data.features = FeatureMatrix(2, 1);
  data.features.values = {-1.0, 1.0};
  data.labels = {0, 1};
  auto model = fresh(ModelKind::Logistic, 1, 17);
  Rng rng(18);
  auto log = learners::fit(*model, data, 200, rng);
  CHECK(log.epoch_loss.size() == 200);
  CHECK(log.epoch_loss.back() <= log.epoch_loss.front());
  CHECK(learners::predict_label(*model, data.features) ==
        std::vector<int>{0, 1});
}

TEST_CASE("zero epochs leave parameters untouched") {
  Rng rng(1);
  auto model = fresh(ModelKind::Svm, 3, 4);
  auto before = model->params();
  auto batch = random_batch(6, 3, rng);
  auto log = learners::fit(*model, batch, 0, rng);
  CHECK(log.epoch_loss.empty());
  CHECK(model->params() == before);
}

TEST_CASE("training is bit-deterministic under a fixed seed") {
  Rng data_rng(55);
  auto batch = random_batch(40, 6, data_rng);
  for (ModelKind kind : {ModelKind::Perceptron, ModelKind::Mlp}) {
    auto a = fresh(kind, 6, 7);
    auto b = fresh(kind, 6, 7);
    Rng ra(9), rb(9);
    learners::fit(*a, batch, 15, ra);
    learners::fit(*b, batch, 15, rb);
    CHECK(a->params() == b->params());
  }
}

TEST_CASE("parameter round trip is exact and length-checked") {
  auto model = fresh(ModelKind::Mlp, 5, 33);
  auto params = model->params();
  model->set_params(params);
  CHECK(model->params() == params);
  CHECK_THROWS_AS(model->set_params(std::vector<double>(3, 0.0)),
                  std::invalid_argument);

  // Averaging two identical vectors is the identity.
  std::vector<double> avg(params.size());
  for (std::size_t i = 0; i < params.size(); ++i)
    avg[i] = (params[i] + params[i]) / 2.0;
  CHECK(avg == params);
}

TEST_CASE("checkpoints round-trip through JSON") {
  for (ModelKind kind : {ModelKind::Logistic, ModelKind::Mlp}) {
    auto model = fresh(kind, 4, 42);
    auto j = learners::save_checkpoint(*model);
    auto restored = learners::load_checkpoint(j);
    CHECK(restored->descriptor() == model->descriptor());
    CHECK(restored->params() == model->params());
    FeatureMatrix x(1, 4);
    x.values = {0.3, -0.7, 1.1, 0.0};
    CHECK(restored->decision_score(x.row(0)) == model->decision_score(x.row(0)));
  }
}

TEST_CASE("mlp hidden width default and dimension checks") {
  CHECK(learners::default_mlp_hidden(8) == 4);
  CHECK(learners::default_mlp_hidden(7) == 4);
  CHECK(learners::default_mlp_hidden(1) == 1);

  auto model = fresh(ModelKind::Mlp, 4, 3);
  FeatureMatrix wrong(1, 3);
  wrong.values = {1, 2, 3};
  CHECK_THROWS_AS(learners::predict_proba(*model, wrong),
                  std::invalid_argument);
}
