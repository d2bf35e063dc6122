#include "rmt/laws.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

namespace rmt::laws {

using std::numbers::pi;

namespace {
constexpr std::uint64_t kStreamLawSample = 0x4C415753;
}

std::vector<double> Law::sample(int n, ensembles::Seed seed) const {
  require(n >= 1, "Law::sample: n must be positive");
  CounterRng rng(seed.value, kStreamLawSample);
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = quantile(rng.uniform(i));
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Semicircle

SemicircleLaw::SemicircleLaw(double sigma) : sigma_(sigma) {
  require(sigma > 0, "semicircle: sigma must be positive");
}

double semicircle_pdf(double x, double sigma) {
  require(sigma > 0, "semicircle: sigma must be positive");
  const double s2 = sigma * sigma;
  const double rad = 4 * s2 - x * x;
  if (rad <= 0) return 0.0;
  return std::sqrt(rad) / (2 * pi * s2);
}

double SemicircleLaw::pdf(double x) const { return semicircle_pdf(x, sigma_); }

double SemicircleLaw::cdf(double x) const {
  const double r = 2 * sigma_;
  if (x <= -r) return 0.0;
  if (x >= r) return 1.0;
  const double s2 = sigma_ * sigma_;
  return 0.5 + x * std::sqrt(4 * s2 - x * x) / (4 * pi * s2) +
         std::asin(x / r) / pi;
}

double SemicircleLaw::quantile(double p) const {
  require(p > 0 && p < 1, "quantile: p must lie in (0,1)");
  double lo = -2 * sigma_, hi = 2 * sigma_;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Marchenko-Pastur

double mp_mass_at_zero(double c) {
  require(c > 0, "mp: c must be positive");
  return std::max(0.0, 1.0 - 1.0 / c);
}

std::pair<double, double> mp_support(double c, double sigma) {
  require(c > 0 && sigma > 0, "mp: c and sigma must be positive");
  const double sc = std::sqrt(c), s2 = sigma * sigma;
  return {s2 * (1 - sc) * (1 - sc), s2 * (1 + sc) * (1 + sc)};
}

double mp_pdf(double x, double c, double sigma) {
  const auto [a, b] = mp_support(c, sigma);
  if (x <= a || x >= b) return 0.0;
  return std::sqrt((x - a) * (b - x)) / (2 * pi * x * c * sigma * sigma);
}

MPLaw::MPLaw(double c, double sigma) : c_(c), sigma_(sigma) {
  std::tie(a_, b_) = mp_support(c, sigma);
  atom_ = mp_mass_at_zero(c);
  // Continuous-part cumulative on x = a + (b-a) sin^2(theta): the integrand
  // f(x(theta)) x'(theta) is smooth, so composite Simpson converges fast.
  const int m = 8192;  // intervals (even)
  theta_.resize(m + 1);
  cum_.resize(m + 1);
  std::vector<double> g(m + 1);
  const double h = (pi / 2) / m;
  // Cancel the sin^2(theta)/x ratio analytically so the hard edge a = 0
  // (c = 1) keeps a finite integrand at theta = 0.
  const double s2 = sigma_ * sigma_;
  for (int i = 0; i <= m; ++i) {
    theta_[i] = i * h;
    const double s = std::sin(theta_[i]);
    const double co = std::cos(theta_[i]);
    const double x = a_ + (b_ - a_) * s * s;
    const double ratio = (x > 0) ? s * s / x : 1.0 / (b_ - a_);
    g[i] = std::pow(b_ - a_, 1.5) * ratio * co *
           std::sqrt(std::max(b_ - x, 0.0)) / (pi * c_ * s2);
  }
  cum_[0] = 0.0;
  for (int i = 2; i <= m; i += 2)
    cum_[i] = cum_[i - 2] + h / 3 * (g[i - 2] + 4 * g[i - 1] + g[i]);
  for (int i = 1; i <= m; i += 2)
    cum_[i] = cum_[i - 1] + h / 12 * (5 * g[i - 1] + 8 * g[i] - g[i + 1]);
}

double MPLaw::pdf(double x) const { return mp_pdf(x, c_, sigma_); }

double MPLaw::cdf(double x) const {
  if (x < 0) return 0.0;
  if (x < a_) return atom_;
  if (x >= b_) return 1.0;
  const double t = std::asin(std::sqrt((x - a_) / (b_ - a_)));
  const double h = theta_[1];
  const int i = std::min<int>(static_cast<int>(t / h), theta_.size() - 2);
  const double w = (t - theta_[i]) / h;
  return atom_ + cum_[i] * (1 - w) + cum_[i + 1] * w;
}

double MPLaw::quantile(double p) const {
  require(p > 0 && p < 1, "quantile: p must lie in (0,1)");
  if (p <= atom_) return 0.0;
  const double target = std::min(p - atom_, cum_.back());
  const auto it = std::lower_bound(cum_.begin(), cum_.end(), target);
  int i = std::max<int>(1, static_cast<int>(it - cum_.begin()));
  i = std::min<int>(i, cum_.size() - 1);
  const double lo = cum_[i - 1], hi = cum_[i];
  const double w = hi > lo ? (target - lo) / (hi - lo) : 0.0;
  const double t = theta_[i - 1] * (1 - w) + theta_[i] * w;
  const double s = std::sin(t);
  return a_ + (b_ - a_) * s * s;
}

// ---------------------------------------------------------------------------
// Goodness of fit

double ks_distance(const std::vector<double>& sorted_sample, const Law& law) {
  const size_t n = sorted_sample.size();
  require(n > 0, "ks_distance: empty sample");
  const double atom = law.atom_at_zero();
  double d = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double x = sorted_sample[i];
    const double fr = law.cdf(x);
    const double fl = x == 0.0 ? fr - atom : fr;
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - fr));
    d = std::max(d, std::abs(static_cast<double>(i) / n - fl));
  }
  return d;
}

double ks_distance(const SpectralSample& sample, const Law& law) {
  return ks_distance(sample.eigenvalues, law);
}

double ks_distance_cdf(std::vector<double> sample,
                       const std::function<double(double)>& cdf) {
  require(!sample.empty(), "ks_distance: empty sample");
  std::sort(sample.begin(), sample.end());
  const size_t n = sample.size();
  double d = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    d = std::max(d, std::abs(static_cast<double>(i) / n - f));
  }
  return d;
}

SpectralSample law_sample(const Law& law, int n, ensembles::Seed seed) {
  SpectralSample s;
  s.dim = n;
  s.eigenvalues = law.sample(n, seed);
  return s;
}

}  // namespace rmt::laws
