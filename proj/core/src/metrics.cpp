#include "aafv/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace aafv::metrics {

std::vector<Summary> summarize(const std::vector<SeedResult>& results) {
  if (results.empty()) throw std::invalid_argument("no results to summarize");
  std::map<std::pair<std::string, std::string>, std::vector<double>> groups;
  for (const auto& r : results) {
    if (!(r.final_accuracy >= 0.0 && r.final_accuracy <= 1.0))
      throw std::invalid_argument("accuracy outside [0, 1]");
    groups[{r.scenario, r.model_kind}].push_back(r.final_accuracy);
  }
  std::vector<Summary> out;
  for (const auto& [key, accs] : groups) {
    Summary s;
    s.scenario = key.first;
    s.model_kind = key.second;
    s.count = accs.size();
    double sum = 0.0;
    for (double a : accs) sum += a;
    s.mean = sum / static_cast<double>(accs.size());
    if (accs.size() > 1) {
      double sq = 0.0;
      for (double a : accs) sq += (a - s.mean) * (a - s.mean);
      s.stddev = std::sqrt(sq / static_cast<double>(accs.size() - 1));
    }
    s.ci95_halfwidth =
        1.959963984540054 * s.stddev / std::sqrt(static_cast<double>(s.count));
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

// Continued fraction for the incomplete beta function (Lentz's method).
double betacf(double a, double b, double x) {
  const double eps = 1e-15;
  const double fpmin = 1e-300;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < fpmin) d = fpmin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 500; ++m) {
    double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) return h;
  }
  throw std::runtime_error("incomplete beta continued fraction did not converge");
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("beta: a, b must be > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                    a * std::log(x) + b * std::log1p(-x);
  double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * betacf(a, b, x) / a;
  }
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
  if (!(df > 0.0)) throw std::invalid_argument("df must be > 0");
  if (t == 0.0) return 1.0;
  double x = df / (df + t * t);
  return regularized_incomplete_beta(df / 2.0, 0.5, x);
}

WelchResult welch_t_test(const std::vector<double>& a,
                         const std::vector<double>& b) {
  if (a.size() < 2 || b.size() < 2)
    throw std::invalid_argument("welch_t_test needs at least 2 samples per side");
  auto mean_var = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::pair<double, double>{m, s / static_cast<double>(v.size() - 1)};
  };
  auto [ma, va] = mean_var(a);
  auto [mb, vb] = mean_var(b);
  double na = static_cast<double>(a.size());
  double nb = static_cast<double>(b.size());
  double se2 = va / na + vb / nb;

  WelchResult res;
  if (se2 == 0.0) {
    // Both samples constant: limit convention.
    res.t = ma == mb ? 0.0 : (ma > mb ? std::numeric_limits<double>::infinity()
                                      : -std::numeric_limits<double>::infinity());
    res.df = na + nb - 2.0;
    res.p = ma == mb ? 1.0 : 0.0;
    return res;
  }
  res.t = (ma - mb) / std::sqrt(se2);
  res.df = se2 * se2 /
           ((va / na) * (va / na) / (na - 1.0) + (vb / nb) * (vb / nb) / (nb - 1.0));
  res.p = student_t_two_sided_p(res.t, res.df);
  return res;
}

nlohmann::ordered_json report_json(const std::vector<Summary>& summaries,
                                   const std::vector<SeedResult>& results,
                                   const nlohmann::ordered_json& tests,
                                   const nlohmann::ordered_json& config_echo) {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["software_version"] = "aafv 0.1.0";
  j["config"] = config_echo;
  j["groups"] = nlohmann::ordered_json::array();
  for (const auto& s : summaries) {
    j["groups"].push_back({{"scenario", s.scenario},
                           {"model", s.model_kind},
                           {"count", s.count},
                           {"mean_accuracy", s.mean},
                           {"stddev", s.stddev},
                           {"ci95_halfwidth", s.ci95_halfwidth}});
  }
  j["significance"] = tests;
  j["per_seed"] = nlohmann::ordered_json::array();
  for (const auto& r : results) {
    j["per_seed"].push_back({{"seed_index", r.seed_index},
                             {"scenario", r.scenario},
                             {"model", r.model_kind},
                             {"final_accuracy", r.final_accuracy},
                             {"round_curve", r.round_curve}});
  }
  return j;
}

std::string report_table(const std::vector<Summary>& summaries) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-10s %-12s %6s %10s %10s %10s\n",
                "scenario", "model", "n", "mean", "stddev", "ci95");
  out << line;
  for (const auto& s : summaries) {
    std::snprintf(line, sizeof(line), "%-10s %-12s %6zu %10.4f %10.4f %10.4f\n",
                  s.scenario.c_str(), s.model_kind.c_str(), s.count, s.mean,
                  s.stddev, s.ci95_halfwidth);
    out << line;
  }
  return out.str();
}

void emit_report(const nlohmann::ordered_json& report,
                 const std::vector<SeedResult>& results,
                 const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream out(out_dir / "summary.json");
    if (!out) throw std::runtime_error("cannot write summary.json");
    out << report.dump(2) << '\n';
  }
  {
    std::ofstream out(out_dir / "per_seed.csv");
    if (!out) throw std::runtime_error("cannot write per_seed.csv");
    out << "seed_index,scenario,model,final_accuracy\n";
    char buf[32];
    for (const auto& r : results) {
      std::snprintf(buf, sizeof(buf), "%.17g", r.final_accuracy);
      out << r.seed_index << ',' << r.scenario << ',' << r.model_kind << ','
          << buf << '\n';
    }
  }
}

}  // namespace aafv::metrics
