#pragma once

#include <optional>
#include <vector>

#include "rmt/ensembles.hpp"
#include "rmt/types.hpp"

namespace rmt::sensing {

// Gaussian right-tail probability and its inverse.
double q_function(double t);
double q_inverse(double p);  // p in (0, 1)

struct SensingScenario {
  int N = 4;           // antennas
  int n = 100;         // samples
  int K = 0;           // active primary users; 0 means pure noise
  double snr_db = 0.0; // per-antenna average received SNR, sigma_s^2 K / sigma_u^2
  double noise_power = 1.0;  // sigma_u^2
  Field field = Field::Complex;
  ensembles::Seed seed{};
};

enum class Detector { ED, MED, CND, EME, AGM, MSEE };

bool requires_noise_power(Detector kind);

// Observation matrix X = H S + U (H1) or U (H0).
ensembles::AnyMatrix simulate_observation(const SensingScenario& sc);

// Test statistic of the detector on an observation.  sigma_u2 is consumed
// by ED and MED only.
double statistic(const ensembles::AnyMatrix& x, Detector kind,
                 double sigma_u2 = 1.0);

// Closed-form detection threshold at false-alarm probability pfa.  Defined
// for all detectors except AGM.  ED threshold is in energy units (times
// sigma_u2); the eigenvalue-ratio detectors are scale-free.
double threshold_analytic(Detector kind, int N, int n, double pfa,
                          Field field, double sigma_u2 = 1.0);

// Empirical (1 - pfa)-quantile of the statistic under H0.
double threshold_mc(Detector kind, int N, int n, double pfa, int trials,
                    ensembles::Seed seed, Field field = Field::Complex,
                    double sigma_u2 = 1.0);

struct RocPoint {
  double pfa = 0.0, pd = 0.0;
  double pfa_se = 0.0, pd_se = 0.0;
  int trials = 0;
};

// Empirical operating points at thresholds calibrated to the requested
// false-alarm grid (closed form when available, Monte Carlo for AGM).
std::vector<RocPoint> roc(const SensingScenario& sc, Detector kind,
                          const std::vector<double>& pfa_grid, int trials);

// Analytic detection probability of the eigenvalue-ratio detector for a
// single supercritical primary user: Gaussian largest-eigenvalue
// fluctuation against the deterministic smallest-eigenvalue limit.
double analytic_pd_single_pu(double snr, int N, int n, double gamma);

inline constexpr std::uint64_t kStreamSense = 0x53454E53ull;
inline constexpr std::uint64_t kStreamSenseMc = 0x53454D43ull;

}  // namespace rmt::sensing
