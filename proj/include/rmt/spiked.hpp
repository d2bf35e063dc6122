#pragma once

#include <vector>

#include "rmt/ensembles.hpp"
#include "rmt/types.hpp"

namespace rmt::spiked {

// Almost-sure limit of the sample eigenvalue pulled out by a population
// spike alpha: phi(alpha) = alpha + c*alpha/(alpha - 1).
double spike_map(double alpha, double c);

enum class Regime { SupercriticalHigh, Subcritical, SupercriticalLow };

struct SpikeRegime {
  double alpha = 1.0;
  int multiplicity = 1;
  Regime regime = Regime::Subcritical;
  double predicted_limit = 0.0;
  // Half-open range of 0-based indices into the descending-sorted sample
  // spectrum occupied by this spike's eigenvalues.
  int index_begin = 0;
  int index_end = 0;
};

// Regimes, limits and index layout for each spike.  Spikes above the
// critical band detach to phi(alpha); spikes inside [1-sqrt(c), 1+sqrt(c)]
// stick to the nearer bulk edge (ties treated as subcritical).  For c > 1
// only alpha >= 1 is supported; the below-bulk side is rejected.
std::vector<SpikeRegime> classify_spikes(const ensembles::SpikeSpec& spikes,
                                         double c, int N);

// Gaussian fluctuation constants for a simple supercritical spike:
// sqrt(n) (lambda_max - mu) / v => N(0,1).
struct FluctuationParams {
  double mu = 0.0;
  double v = 0.0;
};
FluctuationParams spike_fluctuation_params(double tau1, double c);

// Limit law of the largest sample eigenvalue with a multiplicity-k top
// spike (c < 1).  Below the transition the edge fluctuates as Tracy-Widom
// order 2 (scale is the N-free constant, order N^{-2/3}); above it the
// detached eigenvalue fluctuates as the largest eigenvalue of a k x k GUE
// (Gaussian when k = 1; scale is v, order n^{-1/2}).
struct LargestLaw {
  enum class Kind { TW2, Gaussian, GueLargest } kind = Kind::TW2;
  double center = 0.0;
  double scale = 1.0;
  int k = 1;
};
LargestLaw bbp_largest_law(double tau1, double c, int k);

// Second-derivative-type Stieltjes integral of the MP law,
// integral of x / (lambda - x)^2 dF_MP(x; c), for lambda off the support.
double m3(double lambda, double c);

}  // namespace rmt::spiked
