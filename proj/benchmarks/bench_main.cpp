#include <benchmark/benchmark.h>

#include "aafv/dataio.hpp"
#include "aafv/ldp.hpp"
#include "aafv/learners.hpp"
#include "aafv/voting.hpp"

namespace {

void BM_PiecewisePerturb(benchmark::State& state) {
  auto params = aafv::ldp::piecewise_params(1.0);
  aafv::Rng rng(1);
  double t = 0.25;
  for (auto _ : state)
    benchmark::DoNotOptimize(aafv::ldp::piecewise_perturb(t, params, rng));
}
BENCHMARK(BM_PiecewisePerturb);

void BM_LaplacePerturb(benchmark::State& state) {
  aafv::Rng rng(1);
  for (auto _ : state)
    benchmark::DoNotOptimize(aafv::ldp::laplace_perturb(0.5, 2.0, 1.0, rng));
}
BENCHMARK(BM_LaplacePerturb);

void BM_Consolidate(benchmark::State& state) {
  std::size_t k = static_cast<std::size_t>(state.range(0));
  std::size_t n = 1000;
  aafv::Rng rng(7);
  aafv::voting::VoteMatrix votes;
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<aafv::voting::Vote> row(n);
    for (auto& v : row)
      v = static_cast<aafv::voting::Vote>(rng.uniform_below(3));
    votes.by_client.push_back(std::move(row));
  }
  for (auto _ : state)
    benchmark::DoNotOptimize(aafv::voting::consolidate(votes));
}
BENCHMARK(BM_Consolidate)->Arg(3)->Arg(10);

void BM_LogisticEpoch(benchmark::State& state) {
  aafv::dataio::SynthSpec spec;
  spec.n_samples = 700;
  spec.n_features = 8;
  spec.seed = 3;
  auto data = aafv::dataio::synth_biased_shards(spec);
  aafv::learners::Hyperparams hp;
  aafv::Rng init(1);
  auto model = aafv::learners::make_learner(aafv::learners::ModelKind::Logistic,
                                            8, hp, init);
  aafv::Rng rng(2);
  for (auto _ : state)
    aafv::learners::fit(*model, data.clients[0], 1, rng);
}
BENCHMARK(BM_LogisticEpoch);

}  // namespace

BENCHMARK_MAIN();
