#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "aafv/config.hpp"
#include "aafv/dataio.hpp"
#include "aafv/experiment.hpp"
#include "aafv/ldp.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitAuditViolation = 3;

int cmd_run(const std::string& config_path, const std::string& out_dir_override,
            std::size_t parallel) {
  aafv::config::ExperimentConfig cfg;
  try {
    cfg = aafv::config::parse_config_file(config_path);
  } catch (const aafv::config::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kExitValidation;
  }
  if (!out_dir_override.empty()) cfg.output_dir = out_dir_override;
  try {
    auto out = aafv::experiment::run_and_write(cfg, cfg.output_dir, parallel);
    std::cout << out.table;
    std::cout << "report written to " << cfg.output_dir.string() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "run failed: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

int cmd_audit_ldp(double epsilon, const std::string& mechanism_name,
                  std::size_t samples, std::size_t bins, std::uint64_t seed,
                  const std::string& out_path) {
  if (!(epsilon > 0.0)) {
    std::cerr << "epsilon must be > 0\n";
    return kExitValidation;
  }
  if (mechanism_name != "piecewise" && mechanism_name != "laplace" &&
      mechanism_name != "passthrough") {
    std::cerr << "mechanism must be piecewise, laplace, or passthrough\n";
    return kExitValidation;
  }
  try {
    auto params = aafv::ldp::piecewise_params(epsilon);
    aafv::ldp::Mechanism mech;
    if (mechanism_name == "piecewise") {
      mech = [&params](double t, aafv::Rng& rng) {
        return aafv::ldp::piecewise_perturb(t, params, rng);
      };
    } else if (mechanism_name == "laplace") {
      // Inputs live in [-1, 1]; worst-case change is 2.
      mech = [epsilon](double t, aafv::Rng& rng) {
        return aafv::ldp::laplace_perturb(t, 2.0, epsilon, rng);
      };
    } else {
      mech = [](double t, aafv::Rng&) { return t; };
    }

    aafv::Rng rng(seed);
    const std::vector<std::pair<double, double>> grid = {
        {-1.0, 1.0}, {-1.0, 0.0}, {0.0, 1.0}, {-0.5, 0.5}};
    bool all_pass = true;
    nlohmann::ordered_json report;
    report["mechanism"] = mechanism_name;
    report["epsilon"] = epsilon;
    report["n_samples"] = samples;
    report["n_bins"] = bins;
    report["pairs"] = nlohmann::ordered_json::array();
    for (auto [ta, tb] : grid) {
      auto res = aafv::ldp::audit_epsilon(mech, ta, tb, params, samples, bins, rng);
      all_pass = all_pass && res.pass;
      report["pairs"].push_back(
          {{"t_a", ta},
           {"t_b", tb},
           {"max_log_ratio", std::isfinite(res.max_log_ratio)
                                 ? nlohmann::ordered_json(res.max_log_ratio)
                                 : nlohmann::ordered_json("inf")},
           {"pass", res.pass},
           {"density_a", res.density_a},
           {"density_b", res.density_b}});
    }
    report["pass"] = all_pass;
    if (!out_path.empty()) {
      std::ofstream f(out_path);
      if (!f) {
        std::cerr << "cannot write " << out_path << '\n';
        return kExitRuntime;
      }
      f << report.dump(2) << '\n';
    } else {
      std::cout << report.dump(2) << '\n';
    }
    if (!all_pass) {
      std::cerr << "audit bound violated for " << mechanism_name << '\n';
      return kExitAuditViolation;
    }
  } catch (const std::exception& e) {
    std::cerr << "audit failed: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

int cmd_synth(const aafv::dataio::SynthSpec& spec, const std::string& out_dir) {
  try {
    auto result = aafv::dataio::synth_biased_shards(spec);
    std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    aafv::dataio::write_csv(result.test, dir / "test.csv");
    aafv::dataio::write_csv(result.unlabeled, dir / "unlabeled.csv");
    for (std::size_t k = 0; k < result.clients.size(); ++k)
      aafv::dataio::write_csv(result.clients[k],
                              dir / ("client" + std::to_string(k) + ".csv"));
    std::cout << "wrote " << (2 + result.clients.size()) << " files to "
              << out_dir << '\n';
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid synth spec: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "synth failed: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Abstention-aware federated voting experiment toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::size_t parallel = 1;
  auto* run = app.add_subcommand("run", "Run a configured experiment");
  run->add_option("--config", config_path, "Experiment config (JSON)")
      ->required();
  run->add_option("--out-dir", out_dir, "Override the config's output_dir");
  run->add_option("--parallel", parallel, "Seed-level worker threads");

  double epsilon = 1.0;
  std::string mechanism = "piecewise";
  std::size_t samples = 1000000, bins = 40;
  std::uint64_t audit_seed = 0;
  std::string audit_out;
  auto* audit = app.add_subcommand("audit-ldp", "Empirical epsilon-LDP audit");
  audit->add_option("--epsilon", epsilon, "Privacy budget")->required();
  audit->add_option("--mechanism", mechanism,
                    "piecewise | laplace | passthrough");
  audit->add_option("--samples", samples, "Samples per input");
  audit->add_option("--bins", bins, "Histogram bins");
  audit->add_option("--seed", audit_seed, "Audit RNG seed");
  audit->add_option("--out", audit_out, "JSON report path (default stdout)");

  aafv::dataio::SynthSpec spec;
  std::string synth_out = "synth_out";
  auto* synth = app.add_subcommand("synth", "Generate a synthetic task");
  synth->add_option("--samples", spec.n_samples, "Total sample count");
  synth->add_option("--features", spec.n_features, "Feature count");
  synth->add_option("--clients", spec.n_clients, "Client shard count");
  synth->add_option("--bias", spec.bias_strength, "Client shard bias strength");
  synth->add_option("--label-noise", spec.label_noise, "Label flip probability");
  synth->add_option("--seed", spec.seed, "Generator seed");
  synth->add_option("--out-dir", synth_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitValidation;
  }

  if (run->parsed()) return cmd_run(config_path, out_dir, parallel);
  if (audit->parsed())
    return cmd_audit_ldp(epsilon, mechanism, samples, bins, audit_seed, audit_out);
  if (synth->parsed()) return cmd_synth(spec, synth_out);
  return kExitValidation;
}
