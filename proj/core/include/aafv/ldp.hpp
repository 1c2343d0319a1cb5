#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "aafv/rng.hpp"

namespace aafv::ldp {

/// Constants of the piecewise mechanism for a given privacy budget.
/// T = (e^{eps/2}+1)/(e^{eps/2}-1), rho = (e^eps - e^{eps/2})/(2e^{eps/2}+2).
struct PiecewiseParams {
  double epsilon;
  double T;
  double rho;
};

PiecewiseParams piecewise_params(double epsilon);

/// High-density interval [l(t), r(t)] for an input t in [-1, 1];
/// r - l = T - 1 always.
std::pair<double, double> interval(double t, const PiecewiseParams& params);

/// One draw of the piecewise mechanism; output lies in [-T, T].
double piecewise_perturb(double t, const PiecewiseParams& params, Rng& rng);

/// Perturbs confidence scores in [0,1]: affine map to [-1,1], perturb,
/// map back. Outputs lie in [(1-T)/2, (1+T)/2].
std::vector<double> perturb_predictions(const std::vector<double>& p,
                                        const PiecewiseParams& params, Rng& rng);

/// value + Laplace(scale = sensitivity / epsilon), via inverse CDF.
double laplace_perturb(double value, double sensitivity, double epsilon,
                       Rng& rng);

using Mechanism = std::function<double(double t, Rng& rng)>;

struct AuditResult {
  double max_log_ratio;           // max over bins; +inf if support mismatch
  bool pass;                      // max_log_ratio <= epsilon + slack
  std::size_t n_samples;
  std::size_t n_bins;
  double lo, hi;                  // histogram range
  std::vector<double> density_a;  // per-bin empirical densities
  std::vector<double> density_b;
};

/// Empirical epsilon-LDP check: histogram the mechanism's output for two
/// inputs and bound the per-bin log-density ratio. slack absorbs binning
/// and sampling noise.
AuditResult audit_epsilon(const Mechanism& mechanism, double t_a, double t_b,
                          const PiecewiseParams& params, std::size_t n_samples,
                          std::size_t n_bins, Rng& rng, double slack = 0.15);

}  // namespace aafv::ldp
