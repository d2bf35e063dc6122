#include "rmt/spiked.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "rmt/laws.hpp"

namespace rmt::spiked {

using std::numbers::pi;

double spike_map(double alpha, double c) {
  require(c > 0, "spike_map: c must be positive");
  require(alpha != 1.0, "spike_map: alpha = 1 is the pole");
  return alpha + c * alpha / (alpha - 1.0);
}

std::vector<SpikeRegime> classify_spikes(const ensembles::SpikeSpec& spikes,
                                         double c, int N) {
  require(c > 0 && N > 0, "classify_spikes: c and N must be positive");
  require(spikes.values.size() == spikes.multiplicities.size(),
          "classify_spikes: values/multiplicities size mismatch");
  const double sc = std::sqrt(c);
  const double top = (1.0 + sc) * (1.0 + sc);
  const double bottom = (1.0 - sc) * (1.0 - sc);

  struct Item {
    double alpha;
    int mult;
  };
  std::vector<Item> items;
  int total = 0;
  for (size_t i = 0; i < spikes.values.size(); ++i) {
    require(spikes.values[i] > 0, "classify_spikes: spikes must be positive");
    require(spikes.multiplicities[i] > 0,
            "classify_spikes: multiplicities must be positive");
    items.push_back({spikes.values[i], spikes.multiplicities[i]});
    total += spikes.multiplicities[i];
  }
  require(total <= N, "classify_spikes: more spike dimensions than N");
  std::sort(items.begin(), items.end(),
            [](const Item& a, const Item& b) { return a.alpha > b.alpha; });

  std::vector<SpikeRegime> out;
  int next_top = 0;   // next free index from the largest eigenvalue down
  int next_bot = N;   // one past the next free index from the smallest up
  for (const Item& it : items) {
    SpikeRegime r;
    r.alpha = it.alpha;
    r.multiplicity = it.mult;
    if (it.alpha > 1.0 + sc) {
      r.regime = Regime::SupercriticalHigh;
      r.predicted_limit = spike_map(it.alpha, c);
    } else if (it.alpha >= 1.0 - sc) {
      r.regime = Regime::Subcritical;
      if (it.alpha >= 1.0) {
        r.predicted_limit = top;
      } else {
        require(c <= 1.0,
                "classify_spikes: below-bulk spikes unsupported for c > 1");
        r.predicted_limit = bottom;
      }
    } else {
      require(c <= 1.0,
              "classify_spikes: below-bulk spikes unsupported for c > 1");
      r.regime = Regime::SupercriticalLow;
      r.predicted_limit = spike_map(it.alpha, c);
    }
    if (it.alpha >= 1.0) {
      r.index_begin = next_top;
      next_top += it.mult;
      r.index_end = next_top;
    } else {
      r.index_end = next_bot;
      next_bot -= it.mult;
      r.index_begin = next_bot;
    }
    out.push_back(r);
  }
  return out;
}

FluctuationParams spike_fluctuation_params(double tau1, double c) {
  require(c > 0, "spike_fluctuation_params: c must be positive");
  require(tau1 > 1.0 + std::sqrt(c),
          "spike_fluctuation_params: spike must be supercritical");
  const double d = tau1 - 1.0;
  return {spike_map(tau1, c), tau1 * std::sqrt(1.0 - c / (d * d))};
}

LargestLaw bbp_largest_law(double tau1, double c, int k) {
  require(c > 0 && c < 1, "bbp_largest_law: requires 0 < c < 1");
  require(k >= 1, "bbp_largest_law: multiplicity must be >= 1");
  require(tau1 > 0, "bbp_largest_law: spike must be positive");
  const double sc = std::sqrt(c);
  LargestLaw law;
  law.k = k;
  if (tau1 <= 1.0 + sc) {
    law.kind = LargestLaw::Kind::TW2;
    law.center = (1.0 + sc) * (1.0 + sc);
    law.scale = std::pow(1.0 + sc, 4.0 / 3.0) * sc;  // times N^{-2/3}
    return law;
  }
  const auto [mu, v] = spike_fluctuation_params(tau1, c);
  law.kind = k == 1 ? LargestLaw::Kind::Gaussian : LargestLaw::Kind::GueLargest;
  law.center = mu;
  law.scale = v;  // times n^{-1/2}
  return law;
}

double m3(double lambda, double c) {
  require(c > 0, "m3: c must be positive");
  const auto [a, b] = laws::mp_support(c);
  require(lambda < a || lambda > b,
          "m3: lambda inside the MP support (divergent integral)");
  require(c <= 1.0 || lambda > 0.0,
          "m3: lambda at the origin atom is divergent-adjacent");
  // x = a + (b-a) sin^2(theta) with the sin^2/x ratio cancelled, as in the
  // MP cdf quadrature; composite Simpson.
  const int m = 4096;
  const double h = (pi / 2) / m;
  auto g = [&](double theta) {
    const double s = std::sin(theta), co = std::cos(theta);
    const double x = a + (b - a) * s * s;
    const double ratio = (x > 0) ? s * s / x : 1.0 / (b - a);
    const double dens =
        std::pow(b - a, 1.5) * ratio * co * std::sqrt(std::max(b - x, 0.0)) /
        (pi * c);
    return dens * x / ((lambda - x) * (lambda - x));
  };
  double sum = g(0.0) + g(pi / 2);
  for (int i = 1; i < m; ++i) sum += (i % 2 ? 4.0 : 2.0) * g(i * h);
  return sum * h / 3.0;
  // The c > 1 atom at zero contributes x/(lambda-x)^2 = 0 and is omitted.
}

}  // namespace rmt::spiked
