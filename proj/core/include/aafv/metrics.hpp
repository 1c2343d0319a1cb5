#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace aafv::metrics {

struct SeedResult {
  std::uint64_t seed_index = 0;
  std::string scenario;    // "aafv" | "fedavg" | "local"
  std::string model_kind;  // "logistic" | "perceptron" | "svm" | "mlp"
  double final_accuracy = 0.0;
  std::vector<double> round_curve;
};

struct Summary {
  std::string scenario;
  std::string model_kind;
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;       // sample stddev; 0 for a single observation
  double ci95_halfwidth = 0.0;  // normal approximation
};

/// Groups by (scenario, model kind) in lexicographic order.
std::vector<Summary> summarize(const std::vector<SeedResult>& results);

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;
};

/// Unequal-variance t-test with Welch-Satterthwaite degrees of freedom.
/// Both samples constant: p = 1 when means agree, 0 otherwise.
WelchResult welch_t_test(const std::vector<double>& a,
                         const std::vector<double>& b);

/// Two-sided p-value of the Student-t distribution, via the regularized
/// incomplete beta function.
double student_t_two_sided_p(double t, double df);
double regularized_incomplete_beta(double a, double b, double x);

nlohmann::ordered_json report_json(const std::vector<Summary>& summaries,
                                   const std::vector<SeedResult>& results,
                                   const nlohmann::ordered_json& tests,
                                   const nlohmann::ordered_json& config_echo);

std::string report_table(const std::vector<Summary>& summaries);

void emit_report(const nlohmann::ordered_json& report,
                 const std::vector<SeedResult>& results,
                 const std::filesystem::path& out_dir);

}  // namespace aafv::metrics
