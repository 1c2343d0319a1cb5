#include "aafv/ldp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace aafv::ldp {

PiecewiseParams piecewise_params(double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw std::invalid_argument("epsilon must be positive and finite");
  double e_half = std::exp(epsilon / 2.0);
  PiecewiseParams p;
  p.epsilon = epsilon;
  p.T = (e_half + 1.0) / (e_half - 1.0);
  p.rho = (std::exp(epsilon) - e_half) / (2.0 * e_half + 2.0);
  return p;
}

std::pair<double, double> interval(double t, const PiecewiseParams& params) {
  if (std::abs(t) > 1.0)
    throw std::invalid_argument("piecewise input must lie in [-1, 1]");
  double l = (params.T + 1.0) / 2.0 * t - (params.T - 1.0) / 2.0;
  double r = l + params.T - 1.0;
  return {l, r};
}

double piecewise_perturb(double t, const PiecewiseParams& params, Rng& rng) {
  auto [l, r] = interval(t, params);
  double e_half = std::exp(params.epsilon / 2.0);
  double alpha = rng.uniform();
  if (alpha < e_half / (e_half + 1.0)) {
    return rng.uniform(l, r);
  }
  // Uniform over [-T, l) u (r, T]: pick a piece proportionally to its
  // length, then sample inside it.
  double left_len = l - (-params.T);
  double right_len = params.T - r;
  double total = left_len + right_len;
  if (total <= 0.0) return rng.uniform(l, r);  // eps -> 0 degenerate tails
  if (rng.uniform() * total < left_len) {
    return rng.uniform(-params.T, l);
  }
  return rng.uniform(r, params.T);
}

std::vector<double> perturb_predictions(const std::vector<double>& p,
                                        const PiecewiseParams& params,
                                        Rng& rng) {
  std::vector<double> out;
  out.reserve(p.size());
  for (double v : p) {
    if (!(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument("prediction outside [0, 1]");
    double t = 2.0 * v - 1.0;
    double t_tilde = piecewise_perturb(t, params, rng);
    out.push_back((t_tilde + 1.0) / 2.0);
  }
  return out;
}

double laplace_perturb(double value, double sensitivity, double epsilon,
                       Rng& rng) {
  if (!(sensitivity > 0.0)) throw std::invalid_argument("sensitivity must be > 0");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw std::invalid_argument("epsilon must be positive and finite");
  double scale = sensitivity / epsilon;
  double u = rng.uniform() - 0.5;  // (-0.5, 0.5)
  while (u == -0.5 || u == 0.5) u = rng.uniform() - 0.5;
  double noise = -scale * (u < 0.0 ? -1.0 : 1.0) * std::log1p(-2.0 * std::abs(u));
  return value + noise;
}

AuditResult audit_epsilon(const Mechanism& mechanism, double t_a, double t_b,
                          const PiecewiseParams& params, std::size_t n_samples,
                          std::size_t n_bins, Rng& rng, double slack) {
  if (std::abs(t_a) > 1.0 || std::abs(t_b) > 1.0)
    throw std::invalid_argument("audit inputs must lie in [-1, 1]");
  if (n_samples < 100000)
    throw std::invalid_argument("audit needs at least 1e5 samples");
  if (n_bins < 2) throw std::invalid_argument("audit needs at least 2 bins");

  AuditResult res;
  res.n_samples = n_samples;
  res.n_bins = n_bins;
  // Histogram range covers the mechanism output and leaves one outer bin on
  // each side for outputs beyond [-T, T] (a broken mechanism may produce them).
  res.lo = -params.T;
  res.hi = params.T;
  std::vector<std::size_t> count_a(n_bins, 0), count_b(n_bins, 0);

  auto bin_of = [&](double x) -> std::size_t {
    double f = (x - res.lo) / (res.hi - res.lo);
    if (f < 0.0) f = 0.0;
    if (f >= 1.0) f = std::nextafter(1.0, 0.0);
    return static_cast<std::size_t>(f * static_cast<double>(n_bins));
  };

  for (std::size_t i = 0; i < n_samples; ++i) count_a[bin_of(mechanism(t_a, rng))]++;
  for (std::size_t i = 0; i < n_samples; ++i) count_b[bin_of(mechanism(t_b, rng))]++;

  double bin_width = (res.hi - res.lo) / static_cast<double>(n_bins);
  double norm = static_cast<double>(n_samples) * bin_width;
  res.density_a.resize(n_bins);
  res.density_b.resize(n_bins);
  double max_ratio = 0.0;
  for (std::size_t b = 0; b < n_bins; ++b) {
    res.density_a[b] = static_cast<double>(count_a[b]) / norm;
    res.density_b[b] = static_cast<double>(count_b[b]) / norm;
    if (count_a[b] == 0 && count_b[b] == 0) continue;
    if (count_a[b] == 0 || count_b[b] == 0) {
      max_ratio = std::numeric_limits<double>::infinity();
      continue;
    }
    double ratio = std::abs(std::log(static_cast<double>(count_a[b]) /
                                     static_cast<double>(count_b[b])));
    if (ratio > max_ratio) max_ratio = ratio;
  }
  res.max_log_ratio = max_ratio;
  res.pass = max_ratio <= params.epsilon + slack;
  return res;
}

}  // namespace aafv::ldp
