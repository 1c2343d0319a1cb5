#include "aafv/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "aafv/rng.hpp"

namespace aafv {

void FeatureMatrix::validate() const {
  if (rows < 1 || cols < 1)
    throw std::invalid_argument("feature matrix must have rows >= 1 and cols >= 1");
  if (values.size() != rows * cols)
    throw std::invalid_argument("feature matrix storage does not match shape");
  for (double v : values)
    if (!std::isfinite(v))
      throw std::invalid_argument("feature matrix contains a non-finite value");
}

void LabeledDataset::validate() const {
  features.validate();
  if (labels.size() != features.rows)
    throw std::invalid_argument("label count does not match row count");
  for (int y : labels)
    if (y != 0 && y != 1)
      throw std::invalid_argument("labels must be 0 or 1");
}

namespace dataio {
namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

bool parse_double(const std::string& s, double& out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  while (begin != end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end != begin && (*(end - 1) == ' ' || *(end - 1) == '\t')) --end;
  if (begin == end) return false;
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

LabeledDataset load_csv(const std::filesystem::path& path,
                        const LabelColumn& label_column) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path.string());

  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    if (!line.empty()) lines.push_back(line);
  }
  if (lines.empty()) throw std::runtime_error("empty file: " + path.string());

  auto first = split_fields(lines[0]);
  double tmp;
  bool has_header = false;
  for (const auto& f : first)
    if (!parse_double(f, tmp)) has_header = true;

  std::size_t label_idx;
  if (std::holds_alternative<std::string>(label_column)) {
    if (!has_header)
      throw std::runtime_error("label column selected by name requires a header row");
    const auto& name = std::get<std::string>(label_column);
    auto it = std::find(first.begin(), first.end(), name);
    if (it == first.end())
      throw std::runtime_error("label column not found in header: " + name);
    label_idx = static_cast<std::size_t>(it - first.begin());
  } else {
    label_idx = std::get<std::size_t>(label_column);
  }

  std::size_t arity = first.size();
  if (label_idx >= arity)
    throw std::runtime_error("label column index out of range");
  if (arity < 2)
    throw std::runtime_error("need at least one feature column and one label column");

  std::size_t start = has_header ? 1 : 0;
  if (lines.size() == start)
    throw std::runtime_error("file has a header but no data rows: " + path.string());

  LabeledDataset out;
  out.features.cols = arity - 1;
  for (std::size_t r = start; r < lines.size(); ++r) {
    auto fields = split_fields(lines[r]);
    std::size_t line_no = r + 1;
    if (fields.size() != arity)
      throw std::runtime_error("row " + std::to_string(line_no) + " has " +
                               std::to_string(fields.size()) + " fields, expected " +
                               std::to_string(arity));
    for (std::size_t j = 0; j < arity; ++j) {
      double v;
      if (!parse_double(fields[j], v))
        throw std::runtime_error("row " + std::to_string(line_no) +
                                 ": cannot parse field '" + fields[j] + "'");
      if (j == label_idx) {
        if (v != 0.0 && v != 1.0)
          throw std::runtime_error("row " + std::to_string(line_no) +
                                   ": label must be 0 or 1, got '" + fields[j] + "'");
        out.labels.push_back(static_cast<int>(v));
      } else {
        out.features.values.push_back(v);
      }
    }
  }
  out.features.rows = out.labels.size();
  out.validate();
  return out;
}

void write_csv(const LabeledDataset& data, const std::filesystem::path& path,
               const std::vector<std::string>& feature_names,
               const std::string& label_name) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  if (!feature_names.empty()) {
    if (feature_names.size() != data.features.cols)
      throw std::invalid_argument("feature name count mismatch");
    for (const auto& n : feature_names) out << n << ',';
    out << label_name << '\n';
  }
  for (std::size_t i = 0; i < data.features.rows; ++i) {
    for (std::size_t j = 0; j < data.features.cols; ++j)
      out << format_value(data.features.at(i, j)) << ',';
    out << data.labels[i] << '\n';
  }
}

void write_csv(const UnlabeledDataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  for (std::size_t i = 0; i < data.features.rows; ++i) {
    for (std::size_t j = 0; j < data.features.cols; ++j) {
      if (j) out << ',';
      out << format_value(data.features.at(i, j));
    }
    out << '\n';
  }
}

NormStats zscore_fit(const FeatureMatrix& data) {
  data.validate();
  if (data.rows < 2)
    throw std::invalid_argument("zscore_fit needs at least 2 rows");
  NormStats stats;
  stats.mean.resize(data.cols);
  stats.stddev.resize(data.cols);
  for (std::size_t j = 0; j < data.cols; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < data.rows; ++i) sum += data.at(i, j);
    double mean = sum / static_cast<double>(data.rows);
    double sq = 0.0;
    for (std::size_t i = 0; i < data.rows; ++i) {
      double d = data.at(i, j) - mean;
      sq += d * d;
    }
    double sd = std::sqrt(sq / static_cast<double>(data.rows));
    stats.mean[j] = mean;
    // Constant columns become all-zero after centering.
    stats.stddev[j] = sd > 0.0 ? sd : 1.0;
  }
  return stats;
}

FeatureMatrix zscore_apply(const FeatureMatrix& data, const NormStats& stats) {
  if (stats.cols() != data.cols)
    throw std::invalid_argument("normalization stats dimension mismatch");
  FeatureMatrix out(data.rows, data.cols);
  for (std::size_t i = 0; i < data.rows; ++i)
    for (std::size_t j = 0; j < data.cols; ++j)
      out.at(i, j) = (data.at(i, j) - stats.mean[j]) / stats.stddev[j];
  return out;
}

SplitResult split(const LabeledDataset& data, const SplitPlan& plan) {
  data.validate();
  std::size_t need = plan.test_count + plan.unlabeled_count;
  for (std::size_t c : plan.client_counts) need += c;
  if (need > data.size())
    throw std::invalid_argument("split plan requires " + std::to_string(need) +
                                " rows but dataset has " + std::to_string(data.size()));
  if (plan.test_count < 1 || plan.unlabeled_count < 1 || plan.client_counts.empty())
    throw std::invalid_argument("split plan counts must all be >= 1");
  for (std::size_t c : plan.client_counts)
    if (c < 1) throw std::invalid_argument("split plan counts must all be >= 1");

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(plan.shuffle_seed);
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    std::size_t j = static_cast<std::size_t>(rng.uniform_below(i + 1));
    std::swap(order[i], order[j]);
  }

  auto take_labeled = [&](std::size_t offset, std::size_t count) {
    LabeledDataset part;
    part.features = FeatureMatrix(count, data.features.cols);
    part.labels.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      std::size_t src = order[offset + i];
      std::copy(data.features.row(src).begin(), data.features.row(src).end(),
                part.features.row(i).begin());
      part.labels[i] = data.labels[src];
    }
    return part;
  };

  SplitResult result;
  std::size_t offset = 0;
  result.test = take_labeled(offset, plan.test_count);
  offset += plan.test_count;

  LabeledDataset unl = take_labeled(offset, plan.unlabeled_count);
  result.unlabeled.features = std::move(unl.features);
  result.unlabeled.hidden_truth = SealedLabels(std::move(unl.labels));
  offset += plan.unlabeled_count;

  for (std::size_t c : plan.client_counts) {
    result.clients.push_back(take_labeled(offset, c));
    offset += c;
  }
  return result;
}

SplitResult synth_biased_shards(const SynthSpec& spec) {
  if (spec.n_features < 2) throw std::invalid_argument("synth: n_features must be >= 2");
  if (spec.n_clients < 2) throw std::invalid_argument("synth: n_clients must be >= 2");
  if (spec.bias_strength < 0.0 || !std::isfinite(spec.bias_strength))
    throw std::invalid_argument("synth: bias_strength must be finite and >= 0");
  if (spec.label_noise < 0.0 || spec.label_noise >= 0.5)
    throw std::invalid_argument("synth: label_noise must be in [0, 0.5)");
  auto test_count = static_cast<std::size_t>(
      static_cast<double>(spec.n_samples) * spec.test_fraction);
  auto unlabeled_count = static_cast<std::size_t>(
      static_cast<double>(spec.n_samples) * spec.unlabeled_fraction);
  if (test_count + unlabeled_count + spec.n_clients > spec.n_samples)
    throw std::invalid_argument("synth: n_samples too small for the requested fractions");
  std::size_t remaining = spec.n_samples - test_count - unlabeled_count;
  std::size_t per_client = remaining / spec.n_clients;
  if (per_client < 1) throw std::invalid_argument("synth: client shards would be empty");

  SeedStream root(spec.seed);
  Rng setup = root.child("setup").rng();

  std::size_t c = spec.n_features;
  // True separating direction, unit norm.
  std::vector<double> w(c);
  double norm = 0.0;
  for (auto& v : w) {
    v = setup.gaussian();
    norm += v * v;
  }
  norm = std::sqrt(norm);
  for (auto& v : w) v /= norm;

  // Per-client mean shifts orthogonal-ish to nothing in particular; random
  // unit directions scaled by bias_strength.
  std::vector<std::vector<double>> shifts(spec.n_clients, std::vector<double>(c, 0.0));
  for (std::size_t k = 0; k < spec.n_clients; ++k) {
    double n2 = 0.0;
    for (auto& v : shifts[k]) {
      v = setup.gaussian();
      n2 += v * v;
    }
    n2 = std::sqrt(n2);
    for (auto& v : shifts[k]) v = spec.bias_strength * v / n2;
  }

  auto draw = [&](Rng& rng, const std::vector<double>* shift, std::size_t n,
                  LabeledDataset& out) {
    out.features = FeatureMatrix(n, c);
    out.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      double score = 0.0;
      for (std::size_t j = 0; j < c; ++j) {
        double x = rng.gaussian() + (shift ? (*shift)[j] : 0.0);
        out.features.at(i, j) = x;
        score += w[j] * x;
      }
      int y = score > (shift ? std::inner_product(shift->begin(), shift->end(),
                                                  w.begin(), 0.0)
                             : 0.0)
                  ? 1
                  : 0;
      // Label threshold follows the shard's own mean so shards stay balanced.
      if (rng.uniform() < spec.label_noise) y = 1 - y;
      out.labels[i] = y;
    }
  };

  SplitResult result;
  {
    Rng r = root.child("test").rng();
    draw(r, nullptr, test_count, result.test);
  }
  {
    Rng r = root.child("unlabeled").rng();
    LabeledDataset unl;
    draw(r, nullptr, unlabeled_count, unl);
    result.unlabeled.features = std::move(unl.features);
    result.unlabeled.hidden_truth = SealedLabels(std::move(unl.labels));
  }
  for (std::size_t k = 0; k < spec.n_clients; ++k) {
    Rng r = root.child("client").child(k).rng();
    LabeledDataset shard;
    const std::vector<double>* shift =
        spec.bias_strength > 0.0 ? &shifts[k] : nullptr;
    draw(r, shift, per_client, shard);
    result.clients.push_back(std::move(shard));
  }
  return result;
}

}  // namespace dataio
}  // namespace aafv
