#pragma once

#include <vector>

#include "rmt/types.hpp"

namespace rmt::massive {

// Asymptotic regime of a grant-free uplink: M antennas, L pilot symbols,
// N potential devices of which K are active, total pilot energy xi.
struct MassiveProfile {
  double xi = 10.0;       // total pilot energy per device
  double omega = 1.0;     // N / L
  double epsilon = 0.5;   // K / N
  double c = 0.1;         // K / M
  double sigma_u2 = 1.0;  // receiver noise power
  std::vector<double> beta_samples = {1.0};  // empirical path-loss law
};

struct StateEvolution {
  std::vector<double> tau2;  // tau_0^2, tau_1^2, ...
  double fixed_point = 0.0;
  int iterations = 0;
};

// Error-variance recursion of the pilot-phase estimator; iterates the
// interference-shrinkage map until successive values differ by < tol.
StateEvolution state_evolution(const MassiveProfile& profile,
                               int max_iter = 10000, double tol = 1e-12);

// Closed-form high-SNR limit sigma_u^2 / (xi (1 - omega epsilon)).
double tau_highsnr(const MassiveProfile& profile);

struct EstimateStats {
  double v = 0.0;   // variance of the channel estimate
  double dv = 0.0;  // variance of the estimation error; v + dv = beta
};
EstimateStats channel_estimate_stats(double beta_k, double tau2);

// Limit per-device output SINRs under imperfect CSI with error variance tau2.
double limit_sinr_massive_mrc(double beta_k, const MassiveProfile& profile,
                              double tau2);
double limit_sinr_massive_mmse(double beta_k, const MassiveProfile& profile,
                               double tau2);

// The shared MMSE fixed-point factor Gamma (exposed for reporting).
double mmse_gamma(const MassiveProfile& profile, double tau2);

}  // namespace rmt::massive
