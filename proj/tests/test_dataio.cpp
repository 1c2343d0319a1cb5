#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "doctest.h"

#include "aafv/dataio.hpp"
#include "aafv/learners.hpp"
#include "aafv/protocol.hpp"

using namespace aafv;

namespace {

std::filesystem::path write_temp(const std::string& name,
                                 const std::string& content) {
  auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("load_csv parses a small file without header") {
  auto path = write_temp("aafv_small.csv", "1.0,2.0,0\n3.5,4.5,1\n5.0,6.0,0\n");
  auto data = dataio::load_csv(path, std::size_t{2});
  CHECK(data.features.rows == 3);
  CHECK(data.features.cols == 2);
  CHECK(data.features.at(1, 1) == doctest::Approx(4.5));
  CHECK(data.labels == std::vector<int>{0, 1, 0});
}

TEST_CASE("load_csv header detection and label by name") {
  auto path = write_temp("aafv_header.csv", "a,b,outcome\n1,2,1\n3,4,0\n");
  auto data = dataio::load_csv(path, std::string("outcome"));
  CHECK(data.features.rows == 2);
  CHECK(data.labels == std::vector<int>{1, 0});
}

TEST_CASE("load_csv rejects malformed input with the row number") {
  auto path = write_temp("aafv_bad.csv", "1,2,0\nfoo,4,1\n");
  CHECK_THROWS_WITH_AS(dataio::load_csv(path, std::size_t{2}),
                       doctest::Contains("row 2"), std::runtime_error);

  auto arity = write_temp("aafv_arity.csv", "1,2,0\n1,2,3,0\n");
  CHECK_THROWS_WITH_AS(dataio::load_csv(arity, std::size_t{2}),
                       doctest::Contains("row 2"), std::runtime_error);

  auto label = write_temp("aafv_label.csv", "1,2,0\n3,4,2\n");
  CHECK_THROWS_AS(dataio::load_csv(label, std::size_t{2}), std::runtime_error);

  auto empty = write_temp("aafv_empty.csv", "");
  CHECK_THROWS_AS(dataio::load_csv(empty, std::size_t{0}), std::runtime_error);
}

TEST_CASE("zscore_fit uses the population formula per column") {
  FeatureMatrix m(3, 2);
  m.at(0, 0) = 1; m.at(1, 0) = 2; m.at(2, 0) = 3;
  m.at(0, 1) = 10; m.at(1, 1) = 10; m.at(2, 1) = 10;
  auto stats = dataio::zscore_fit(m);
  CHECK(stats.mean[0] == doctest::Approx(2.0));
  CHECK(stats.stddev[0] == doctest::Approx(std::sqrt(2.0 / 3.0)));
  // Constant column: stddev replaced by 1.
  CHECK(stats.mean[1] == doctest::Approx(10.0));
  CHECK(stats.stddev[1] == doctest::Approx(1.0));
}

TEST_CASE("zscore_apply centers the fitting data and is invertible") {
  Rng rng(11);
  FeatureMatrix m(40, 3);
  for (auto& v : m.values) v = rng.uniform(-5.0, 9.0);
  auto stats = dataio::zscore_fit(m);
  auto z = dataio::zscore_apply(m, stats);
  for (std::size_t j = 0; j < 3; ++j) {
    double mean = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < 40; ++i) mean += z.at(i, j);
    mean /= 40.0;
    for (std::size_t i = 0; i < 40; ++i)
      sq += (z.at(i, j) - mean) * (z.at(i, j) - mean);
    CHECK(std::abs(mean) < 1e-9);
    CHECK(std::abs(std::sqrt(sq / 40.0) - 1.0) < 1e-9);
  }
  // De-normalizing recovers the input.
  for (std::size_t i = 0; i < 40; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(std::abs(z.at(i, j) * stats.stddev[j] + stats.mean[j] - m.at(i, j)) <
            1e-9);
}

TEST_CASE("zscore identity stats leave the data unchanged") {
  dataio::NormStats id;
  id.mean = {0.0, 0.0};
  id.stddev = {1.0, 1.0};
  FeatureMatrix m(2, 2);
  m.values = {1, 2, 3, 4};
  auto z = dataio::zscore_apply(m, id);
  CHECK(z.values == m.values);
}

TEST_CASE("train statistics applied to test do not re-center it") {
  FeatureMatrix train(4, 1), test(3, 1);
  train.values = {0, 1, 2, 3};
  test.values = {10, 11, 12};
  auto stats = dataio::zscore_fit(train);
  auto z = dataio::zscore_apply(test, stats);
  double mean = (z.at(0, 0) + z.at(1, 0) + z.at(2, 0)) / 3.0;
  CHECK(std::abs(mean) > 1.0);  // far from zero: no second fit happened
}

TEST_CASE("split is a disjoint deterministic partition") {
  LabeledDataset data;
  data.features = FeatureMatrix(20, 2);
  for (std::size_t i = 0; i < 20; ++i) {
    data.features.at(i, 0) = static_cast<double>(i);
    data.features.at(i, 1) = 0.0;
    data.labels.push_back(i % 2);
  }
  dataio::SplitPlan plan{4, 5, {6, 5}, 99};
  auto a = dataio::split(data, plan);
  auto b = dataio::split(data, plan);

  CHECK(a.test.size() == 4);
  CHECK(a.unlabeled.size() == 5);
  CHECK(a.clients[0].size() == 6);
  CHECK(a.clients[1].size() == 5);

  // Row ids (first feature) are pairwise disjoint and cover all 20 rows.
  std::multiset<double> ids;
  for (std::size_t i = 0; i < 4; ++i) ids.insert(a.test.features.at(i, 0));
  for (std::size_t i = 0; i < 5; ++i) ids.insert(a.unlabeled.features.at(i, 0));
  for (const auto& c : a.clients)
    for (std::size_t i = 0; i < c.size(); ++i) ids.insert(c.features.at(i, 0));
  CHECK(ids.size() == 20);
  CHECK(std::set<double>(ids.begin(), ids.end()).size() == 20);

  // Same seed, same assignment.
  CHECK(a.test.features.values == b.test.features.values);
  CHECK(a.clients[1].features.values == b.clients[1].features.values);

  // Labels travel with their rows; the unlabeled part keeps them sealed.
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(a.test.labels[i] ==
          static_cast<int>(a.test.features.at(i, 0)) % 2);
  const auto& hidden = a.unlabeled.hidden_truth.reveal();
  for (std::size_t i = 0; i < 5; ++i)
    CHECK(hidden[i] == static_cast<int>(a.unlabeled.features.at(i, 0)) % 2);
}

TEST_CASE("split of 3 rows into singletons") {
  LabeledDataset data;
  data.features = FeatureMatrix(3, 1);
  data.features.values = {0, 1, 2};
  data.labels = {0, 1, 0};
  auto r = dataio::split(data, {1, 1, {1}, 5});
  CHECK(r.test.size() == 1);
  CHECK(r.unlabeled.size() == 1);
  CHECK(r.clients[0].size() == 1);
}

TEST_CASE("split rejects plans that exceed the dataset") {
  LabeledDataset data;
  data.features = FeatureMatrix(3, 1);
  data.features.values = {0, 1, 2};
  data.labels = {0, 1, 0};
  CHECK_THROWS_AS(dataio::split(data, {2, 1, {1}, 5}), std::invalid_argument);
}

TEST_CASE("synthetic generator is deterministic and balance-bounded") {
  dataio::SynthSpec spec;
  spec.n_samples = 600;
  spec.n_features = 10;
  spec.n_clients = 3;
  spec.bias_strength = 0.5;
  spec.seed = 7;
  auto a = dataio::synth_biased_shards(spec);
  auto b = dataio::synth_biased_shards(spec);
  CHECK(a.test.features.values == b.test.features.values);
  CHECK(a.clients[2].features.values == b.clients[2].features.values);
  CHECK(a.clients[0].labels == b.clients[0].labels);

  for (const auto& part : {a.test, a.clients[0], a.clients[1], a.clients[2]}) {
    double pos = 0.0;
    for (int y : part.labels) pos += y;
    double frac = pos / static_cast<double>(part.size());
    CHECK(frac > 0.3);
    CHECK(frac < 0.7);
  }
}

TEST_CASE("synthetic export round-trips byte-identically") {
  dataio::SynthSpec spec;
  spec.n_samples = 120;
  spec.n_features = 4;
  spec.n_clients = 2;
  spec.seed = 3;
  auto r = dataio::synth_biased_shards(spec);
  auto p1 = std::filesystem::temp_directory_path() / "aafv_synth_a.csv";
  auto p2 = std::filesystem::temp_directory_path() / "aafv_synth_b.csv";
  dataio::write_csv(r.clients[0], p1);
  dataio::write_csv(dataio::synth_biased_shards(spec).clients[0], p2);
  std::ifstream f1(p1), f2(p2);
  std::string s1((std::istreambuf_iterator<char>(f1)), {});
  std::string s2((std::istreambuf_iterator<char>(f2)), {});
  CHECK(s1 == s2);
  CHECK(!s1.empty());

  // And the exported file loads back with the same shape.
  auto loaded = dataio::load_csv(p1, std::size_t{4});
  CHECK(loaded.features.rows == r.clients[0].size());
  CHECK(loaded.features.cols == 4);
}

TEST_CASE("zero bias draws every shard from the same distribution") {
  dataio::SynthSpec spec;
  spec.n_samples = 3000;
  spec.n_features = 6;
  spec.n_clients = 3;
  spec.bias_strength = 0.0;
  spec.seed = 21;
  auto r = dataio::synth_biased_shards(spec);
  // Per-shard feature means all hover near zero.
  for (const auto& c : r.clients) {
    for (std::size_t j = 0; j < spec.n_features; ++j) {
      double mean = 0.0;
      for (std::size_t i = 0; i < c.size(); ++i) mean += c.features.at(i, j);
      mean /= static_cast<double>(c.size());
      CHECK(std::abs(mean) < 0.2);
    }
  }
}

TEST_CASE("reference learner separates the default synthetic task") {
  dataio::SynthSpec spec;  // defaults: 3000 x 50, 3 clients
  spec.seed = 7;
  auto r = dataio::synth_biased_shards(spec);

  // Pool all client shards and train a logistic model on the pooled data.
  LabeledDataset pooled;
  pooled.features.cols = spec.n_features;
  for (const auto& c : r.clients) {
    pooled.features.rows += c.features.rows;
    pooled.features.values.insert(pooled.features.values.end(),
                                  c.features.values.begin(),
                                  c.features.values.end());
    pooled.labels.insert(pooled.labels.end(), c.labels.begin(), c.labels.end());
  }
  learners::Hyperparams hp;
  Rng init(1);
  auto model = learners::make_learner(learners::ModelKind::Logistic,
                                      spec.n_features, hp, init);
  Rng fit_rng(2);
  learners::fit(*model, pooled, 60, fit_rng);
  CHECK(protocol::evaluate(*model, r.test) >= 0.85);
}
