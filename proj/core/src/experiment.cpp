#include "aafv/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

#include "aafv/dataio.hpp"

namespace aafv::experiment {

namespace {

struct SeedData {
  dataio::SplitResult split;
};

SeedData prepare_data(const config::ExperimentConfig& cfg,
                      const SeedStream& seed_stream) {
  SeedData out;
  if (cfg.csv) {
    auto raw = dataio::load_csv(cfg.csv->path, cfg.csv->label_column);
    dataio::SplitPlan plan = cfg.csv->split;
    plan.shuffle_seed = seed_stream.child("split").value();
    out.split = dataio::split(raw, plan);
  } else {
    dataio::SynthSpec spec = *cfg.synth;
    spec.seed = seed_stream.child("synth").value();
    out.split = dataio::synth_biased_shards(spec);
  }

  // Normalization statistics come from the pooled client shards only; the
  // same statistics are applied to test and unlabeled features.
  FeatureMatrix pooled;
  pooled.cols = out.split.clients.front().features.cols;
  for (const auto& c : out.split.clients) {
    pooled.rows += c.features.rows;
    pooled.values.insert(pooled.values.end(), c.features.values.begin(),
                         c.features.values.end());
  }
  auto stats = dataio::zscore_fit(pooled);
  for (auto& c : out.split.clients)
    c.features = dataio::zscore_apply(c.features, stats);
  out.split.test.features = dataio::zscore_apply(out.split.test.features, stats);
  out.split.unlabeled.features =
      dataio::zscore_apply(out.split.unlabeled.features, stats);
  return out;
}

protocol::FederationSetup make_setup(const config::ExperimentConfig& cfg,
                                     const SeedData& data,
                                     const SeedStream& seed_stream,
                                     const std::string& scenario) {
  protocol::FederationSetup setup;
  std::size_t dim = data.split.clients.front().features.cols;
  for (std::size_t k = 0; k < cfg.roster.size(); ++k) {
    const auto& entry = cfg.roster[k];
    Rng init = seed_stream.child("init-" + scenario).child(k).rng();
    protocol::ClientSlot slot;
    slot.learner = learners::make_learner(entry.kind, dim, entry.hyperparams,
                                          init, entry.mlp_hidden_dim);
    slot.data = data.split.clients[k];
    setup.clients.push_back(std::move(slot));
  }
  setup.unlabeled.features = data.split.unlabeled.features;
  setup.unlabeled.hidden_truth = data.split.unlabeled.hidden_truth;
  setup.test = data.split.test;
  setup.epsilon = cfg.epsilon;
  setup.tau = cfg.tau;
  setup.e_com = cfg.e_com;
  setup.local_epochs_per_round = cfg.local_epochs_per_round;
  setup.pre_train_epochs = cfg.pre_train_epochs;
  setup.fedavg_clip = cfg.fedavg_clip;
  return setup;
}

bool wants(const config::ExperimentConfig& cfg, const std::string& scenario) {
  return std::find(cfg.scenarios.begin(), cfg.scenarios.end(), scenario) !=
         cfg.scenarios.end();
}

}  // namespace

std::vector<metrics::SeedResult> run_one_seed(
    const config::ExperimentConfig& cfg, std::size_t seed_index,
    std::vector<protocol::RoundTrace>* aafv_traces) {
  SeedStream master(cfg.master_seed);
  SeedStream seed_stream = master.child("seed").child(seed_index);
  SeedData data = prepare_data(cfg, seed_stream);

  std::vector<metrics::SeedResult> results;
  auto push = [&](const std::string& scenario, learners::ModelKind kind,
                  double acc, std::vector<double> curve) {
    metrics::SeedResult r;
    r.seed_index = seed_index;
    r.scenario = scenario;
    r.model_kind = learners::to_string(kind);
    r.final_accuracy = acc;
    r.round_curve = std::move(curve);
    results.push_back(std::move(r));
  };

  if (wants(cfg, "aafv")) {
    auto setup = make_setup(cfg, data, seed_stream, "aafv");
    auto res = protocol::run_aafv(setup, seed_stream.child("aafv"));
    for (std::size_t k = 0; k < res.learners.size(); ++k) {
      std::vector<double> curve;
      for (const auto& t : res.traces) curve.push_back(t.client_test_accuracy[k]);
      double acc = protocol::evaluate(*res.learners[k], setup.test);
      push("aafv", cfg.roster[k].kind, acc, std::move(curve));
    }
    if (aafv_traces) *aafv_traces = std::move(res.traces);
  }
  if (wants(cfg, "fedavg")) {
    auto setup = make_setup(cfg, data, seed_stream, "fedavg");
    auto res = protocol::run_fedavg(setup, seed_stream.child("fedavg"));
    std::vector<double> curve;
    for (const auto& t : res.traces) curve.push_back(t.client_test_accuracy[0]);
    double acc = protocol::evaluate(*res.global_model, setup.test);
    push("fedavg", cfg.roster.front().kind, acc, std::move(curve));
  }
  if (wants(cfg, "local")) {
    auto setup = make_setup(cfg, data, seed_stream, "local");
    auto models =
        protocol::run_local(setup, cfg.pre_train_epochs, seed_stream.child("local"));
    for (std::size_t k = 0; k < models.size(); ++k)
      push("local", cfg.roster[k].kind,
           protocol::evaluate(*models[k], setup.test), {});
  }
  return results;
}

RunOutput run_experiment(const config::ExperimentConfig& cfg,
                         std::size_t parallelism) {
  std::vector<std::vector<metrics::SeedResult>> per_seed(cfg.seed_count);

  if (parallelism <= 1 || cfg.seed_count == 1) {
    for (std::size_t i = 0; i < cfg.seed_count; ++i)
      per_seed[i] = run_one_seed(cfg, i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    std::size_t n_workers = std::min<std::size_t>(parallelism, cfg.seed_count);
    for (std::size_t w = 0; w < n_workers; ++w) {
      workers.emplace_back([&] {
        for (;;) {
          std::size_t i = next.fetch_add(1);
          if (i >= cfg.seed_count) return;
          per_seed[i] = run_one_seed(cfg, i);
        }
      });
    }
    for (auto& t : workers) t.join();
  }

  RunOutput out;
  for (auto& v : per_seed)
    out.results.insert(out.results.end(), v.begin(), v.end());
  out.summaries = metrics::summarize(out.results);

  // Welch tests per model kind for every pair of scenarios present.
  std::map<std::pair<std::string, std::string>, std::vector<double>> groups;
  for (const auto& r : out.results)
    groups[{r.scenario, r.model_kind}].push_back(r.final_accuracy);
  nlohmann::ordered_json tests = nlohmann::ordered_json::array();
  const std::vector<std::pair<std::string, std::string>> pairs = {
      {"aafv", "fedavg"}, {"aafv", "local"}, {"fedavg", "local"}};
  for (const auto& [sa, sb] : pairs) {
    std::vector<double> ps;
    nlohmann::ordered_json per_model = nlohmann::ordered_json::array();
    for (const auto& [key, accs] : groups) {
      if (key.first != sa) continue;
      auto it = groups.find({sb, key.second});
      if (it == groups.end()) continue;
      if (accs.size() < 2 || it->second.size() < 2) continue;
      auto w = metrics::welch_t_test(accs, it->second);
      per_model.push_back({{"model", key.second},
                           {"t", w.t},
                           {"df", w.df},
                           {"p", w.p}});
      ps.push_back(w.p);
    }
    if (per_model.empty()) continue;
    double mean_p = 0.0;
    for (double p : ps) mean_p += p;
    mean_p /= static_cast<double>(ps.size());
    tests.push_back({{"comparison", sa + " vs " + sb},
                     {"per_model", per_model},
                     {"mean_p", mean_p}});
  }

  out.report =
      metrics::report_json(out.summaries, out.results, tests,
                           config::echo_config(cfg));
  out.table = metrics::report_table(out.summaries);
  return out;
}

RunOutput run_and_write(const config::ExperimentConfig& cfg,
                        const std::filesystem::path& out_dir,
                        std::size_t parallelism) {
  auto out = run_experiment(cfg, parallelism);
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream f(out_dir / "config_echo.json");
    if (!f) throw std::runtime_error("cannot write config_echo.json");
    f << config::echo_config(cfg).dump(2) << '\n';
  }
  metrics::emit_report(out.report, out.results, out_dir);

  // Round traces for the first seed of the aafv scenario, for debugging.
  if (wants(cfg, "aafv")) {
    std::vector<protocol::RoundTrace> traces;
    run_one_seed(cfg, 0, &traces);
    std::filesystem::create_directories(out_dir / "traces");
    std::ofstream f(out_dir / "traces" / "aafv_seed0.csv");
    f << "round,pseudo_size,global_abstains,revisit_skipped";
    for (std::size_t k = 0; k < cfg.roster.size(); ++k)
      f << ",client" << k << "_abstains,client" << k << "_accuracy";
    f << '\n';
    char buf[32];
    for (const auto& t : traces) {
      f << t.round << ',' << t.pseudo_size << ',' << t.global_abstains << ','
        << (t.revisit_skipped ? 1 : 0);
      for (std::size_t k = 0; k < t.client_abstains.size(); ++k) {
        std::snprintf(buf, sizeof(buf), "%.17g", t.client_test_accuracy[k]);
        f << ',' << t.client_abstains[k] << ',' << buf;
      }
      f << '\n';
    }
  }
  return out;
}

}  // namespace aafv::experiment
