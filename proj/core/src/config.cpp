#include "aafv/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace aafv::config {

namespace {

std::string join(const std::vector<std::string>& errs) {
  std::ostringstream out;
  out << "invalid configuration:";
  for (const auto& e : errs) out << "\n  - " << e;
  return out.str();
}

/// Tracks which keys of an object were consumed; leftovers are errors.
class KeyChecker {
 public:
  KeyChecker(const nlohmann::json& obj, std::string context,
             std::vector<std::string>& errs)
      : obj_(obj), context_(std::move(context)), errs_(errs) {}

  const nlohmann::json* get(const std::string& key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  ~KeyChecker() {
    for (auto it = obj_.begin(); it != obj_.end(); ++it)
      if (!seen_.contains(it.key()))
        errs_.push_back(context_ + ": unknown key '" + it.key() + "'");
  }

 private:
  const nlohmann::json& obj_;
  std::string context_;
  std::vector<std::string>& errs_;
  std::set<std::string> seen_;
};

template <typename T>
bool read(const nlohmann::json* j, T& out, const std::string& what,
          std::vector<std::string>& errs) {
  if (!j) return false;
  try {
    out = j->get<T>();
    return true;
  } catch (const nlohmann::json::exception&) {
    errs.push_back(what + ": wrong type");
    return false;
  }
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errs)
    : std::runtime_error(join(errs)), errors(std::move(errs)) {}

ExperimentConfig parse_config(const nlohmann::json& j) {
  std::vector<std::string> errs;
  ExperimentConfig cfg;

  if (!j.is_object()) throw ConfigError({"top level must be an object"});
  {
    KeyChecker top(j, "top level", errs);

    if (const auto* dataset = top.get("dataset")) {
      if (!dataset->is_object()) {
        errs.push_back("dataset: must be an object");
      } else {
        KeyChecker ds(*dataset, "dataset", errs);
        std::string kind;
        read(ds.get("kind"), kind, "dataset.kind", errs);
        if (kind == "csv") {
          CsvSource src;
          std::string path;
          if (read(ds.get("path"), path, "dataset.path", errs))
            src.path = path;
          else
            errs.push_back("dataset.path: required for csv source");
          if (const auto* lc = ds.get("label_column")) {
            if (lc->is_string())
              src.label_column = lc->get<std::string>();
            else if (lc->is_number_integer() && lc->get<long long>() >= 0)
              src.label_column = static_cast<std::size_t>(lc->get<long long>());
            else
              errs.push_back("dataset.label_column: must be a name or index");
          } else {
            errs.push_back("dataset.label_column: required for csv source");
          }
          if (const auto* split = ds.get("split")) {
            if (!split->is_object()) {
              errs.push_back("dataset.split: must be an object");
            } else {
              KeyChecker sp(*split, "dataset.split", errs);
              read(sp.get("test"), src.split.test_count, "dataset.split.test", errs);
              read(sp.get("unlabeled"), src.split.unlabeled_count,
                   "dataset.split.unlabeled", errs);
              read(sp.get("clients"), src.split.client_counts,
                   "dataset.split.clients", errs);
            }
          } else {
            errs.push_back("dataset.split: required for csv source");
          }
          if (src.split.test_count < 1 || src.split.unlabeled_count < 1 ||
              src.split.client_counts.empty())
            errs.push_back("dataset.split: all counts must be >= 1");
          cfg.csv = std::move(src);
        } else if (kind == "synth") {
          dataio::SynthSpec spec;
          read(ds.get("n_samples"), spec.n_samples, "dataset.n_samples", errs);
          read(ds.get("n_features"), spec.n_features, "dataset.n_features", errs);
          read(ds.get("n_clients"), spec.n_clients, "dataset.n_clients", errs);
          read(ds.get("bias_strength"), spec.bias_strength,
               "dataset.bias_strength", errs);
          read(ds.get("test_fraction"), spec.test_fraction,
               "dataset.test_fraction", errs);
          read(ds.get("unlabeled_fraction"), spec.unlabeled_fraction,
               "dataset.unlabeled_fraction", errs);
          read(ds.get("label_noise"), spec.label_noise, "dataset.label_noise",
               errs);
          if (spec.n_features < 2) errs.push_back("dataset.n_features: must be >= 2");
          if (spec.n_clients < 2) errs.push_back("dataset.n_clients: must be >= 2");
          cfg.synth = spec;
        } else {
          errs.push_back("dataset.kind: must be 'csv' or 'synth'");
        }
      }
    } else {
      errs.push_back("dataset: required");
    }

    if (const auto* roster = top.get("roster")) {
      if (!roster->is_array() || roster->empty()) {
        errs.push_back("roster: must be a non-empty array");
      } else {
        for (std::size_t i = 0; i < roster->size(); ++i) {
          const auto& entry = (*roster)[i];
          std::string ctx = "roster[" + std::to_string(i) + "]";
          if (!entry.is_object()) {
            errs.push_back(ctx + ": must be an object");
            continue;
          }
          KeyChecker re(entry, ctx, errs);
          RosterEntry r;
          std::string kind;
          if (read(re.get("kind"), kind, ctx + ".kind", errs)) {
            try {
              r.kind = learners::model_kind_from_string(kind);
            } catch (const std::invalid_argument& e) {
              errs.push_back(ctx + ".kind: " + e.what());
            }
          } else {
            errs.push_back(ctx + ".kind: required");
          }
          read(re.get("learning_rate"), r.hyperparams.learning_rate,
               ctx + ".learning_rate", errs);
          read(re.get("batch_size"), r.hyperparams.batch_size,
               ctx + ".batch_size", errs);
          read(re.get("l2"), r.hyperparams.l2, ctx + ".l2", errs);
          read(re.get("hidden_dim"), r.mlp_hidden_dim, ctx + ".hidden_dim", errs);
          if (r.hyperparams.learning_rate <= 0.0)
            errs.push_back(ctx + ".learning_rate: must be > 0");
          if (r.hyperparams.batch_size < 1)
            errs.push_back(ctx + ".batch_size: must be >= 1");
          cfg.roster.push_back(std::move(r));
        }
      }
    } else {
      errs.push_back("roster: required");
    }

    if (const auto* scenarios = top.get("scenarios")) {
      if (!read(scenarios, cfg.scenarios, "scenarios", errs) ||
          cfg.scenarios.empty()) {
        errs.push_back("scenarios: must be a non-empty string array");
      } else {
        for (const auto& s : cfg.scenarios)
          if (s != "aafv" && s != "fedavg" && s != "local")
            errs.push_back("scenarios: unknown scenario '" + s + "'");
      }
    } else {
      errs.push_back("scenarios: required");
    }

    read(top.get("epsilon"), cfg.epsilon, "epsilon", errs);
    read(top.get("tau"), cfg.tau, "tau", errs);
    read(top.get("e_com"), cfg.e_com, "e_com", errs);
    read(top.get("local_epochs_per_round"), cfg.local_epochs_per_round,
         "local_epochs_per_round", errs);
    read(top.get("pre_train_epochs"), cfg.pre_train_epochs, "pre_train_epochs",
         errs);
    read(top.get("seed_count"), cfg.seed_count, "seed_count", errs);
    read(top.get("master_seed"), cfg.master_seed, "master_seed", errs);
    read(top.get("fedavg_clip"), cfg.fedavg_clip, "fedavg_clip", errs);
    std::string out_dir;
    if (read(top.get("output_dir"), out_dir, "output_dir", errs))
      cfg.output_dir = out_dir;
  }

  if (!(cfg.epsilon > 0.0) || !std::isfinite(cfg.epsilon))
    errs.push_back("epsilon: must be positive and finite");
  if (!(cfg.tau > 0.0 && cfg.tau < 0.5))
    errs.push_back("tau: must lie in (0, 0.5)");
  if (cfg.seed_count < 1) errs.push_back("seed_count: must be >= 1");
  if (!(cfg.fedavg_clip > 0.0)) errs.push_back("fedavg_clip: must be > 0");

  bool wants_fedavg =
      std::find(cfg.scenarios.begin(), cfg.scenarios.end(), "fedavg") !=
      cfg.scenarios.end();
  if (wants_fedavg && !cfg.roster.empty()) {
    for (const auto& r : cfg.roster)
      if (r.kind != cfg.roster.front().kind ||
          r.mlp_hidden_dim != cfg.roster.front().mlp_hidden_dim)
        errs.push_back("scenarios: fedavg requires a homogeneous roster");
  }
  std::size_t n_clients = cfg.csv       ? cfg.csv->split.client_counts.size()
                          : cfg.synth   ? cfg.synth->n_clients
                                        : 0;
  if (n_clients > 0 && !cfg.roster.empty() && cfg.roster.size() != n_clients)
    errs.push_back("roster: size must match the number of client shards (" +
                   std::to_string(n_clients) + ")");

  if (!errs.empty()) throw ConfigError(std::move(errs));
  return cfg;
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError({std::string("config is not valid JSON: ") + e.what()});
  }
  return parse_config(j);
}

nlohmann::ordered_json echo_config(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  if (cfg.csv) {
    nlohmann::ordered_json ds;
    ds["kind"] = "csv";
    ds["path"] = cfg.csv->path.string();
    if (std::holds_alternative<std::string>(cfg.csv->label_column))
      ds["label_column"] = std::get<std::string>(cfg.csv->label_column);
    else
      ds["label_column"] = std::get<std::size_t>(cfg.csv->label_column);
    ds["split"] = {{"test", cfg.csv->split.test_count},
                   {"unlabeled", cfg.csv->split.unlabeled_count},
                   {"clients", cfg.csv->split.client_counts}};
    j["dataset"] = ds;
  } else if (cfg.synth) {
    j["dataset"] = {{"kind", "synth"},
                    {"n_samples", cfg.synth->n_samples},
                    {"n_features", cfg.synth->n_features},
                    {"n_clients", cfg.synth->n_clients},
                    {"bias_strength", cfg.synth->bias_strength},
                    {"test_fraction", cfg.synth->test_fraction},
                    {"unlabeled_fraction", cfg.synth->unlabeled_fraction},
                    {"label_noise", cfg.synth->label_noise}};
  }
  j["roster"] = nlohmann::ordered_json::array();
  for (const auto& r : cfg.roster) {
    nlohmann::ordered_json e;
    e["kind"] = learners::to_string(r.kind);
    e["learning_rate"] = r.hyperparams.learning_rate;
    e["batch_size"] = r.hyperparams.batch_size;
    e["l2"] = r.hyperparams.l2;
    if (r.kind == learners::ModelKind::Mlp) e["hidden_dim"] = r.mlp_hidden_dim;
    j["roster"].push_back(e);
  }
  j["scenarios"] = cfg.scenarios;
  j["epsilon"] = cfg.epsilon;
  j["tau"] = cfg.tau;
  j["e_com"] = cfg.e_com;
  j["local_epochs_per_round"] = cfg.local_epochs_per_round;
  j["pre_train_epochs"] = cfg.pre_train_epochs;
  j["seed_count"] = cfg.seed_count;
  j["master_seed"] = cfg.master_seed;
  j["fedavg_clip"] = cfg.fedavg_clip;
  j["output_dir"] = cfg.output_dir.string();
  return j;
}

}  // namespace aafv::config
