#include "rmt/massive.hpp"

#include <cmath>

namespace rmt::massive {

namespace {

void check_profile(const MassiveProfile& p) {
  require(p.xi > 0 && p.omega > 0 && p.epsilon > 0 && p.c > 0,
          "massive profile: ratios and pilot energy must be positive");
  require(p.sigma_u2 > 0, "massive profile: noise power must be positive");
  require(!p.beta_samples.empty(), "massive profile: empty path-loss sample");
  for (double b : p.beta_samples)
    require(b > 0, "massive profile: path losses must be positive");
}

template <typename F>
double mean_beta(const MassiveProfile& p, F f) {
  double acc = 0;
  for (double b : p.beta_samples) acc += f(b);
  return acc / double(p.beta_samples.size());
}

}  // namespace

StateEvolution state_evolution(const MassiveProfile& profile, int max_iter,
                               double tol) {
  check_profile(profile);
  require(tol > 0, "state_evolution: tol must be positive");
  const double base = profile.sigma_u2 / profile.xi;
  const double oe = profile.omega * profile.epsilon;
  StateEvolution out;
  double t2 = base + oe * mean_beta(profile, [](double b) { return b; });
  out.tau2.push_back(t2);
  for (int it = 0; it < max_iter; ++it) {
    const double next =
        base + oe * mean_beta(profile, [t2](double b) {
          return b * t2 / (b + t2);
        });
    out.tau2.push_back(next);
    out.iterations = it + 1;
    if (std::abs(next - t2) < tol) {
      out.fixed_point = next;
      return out;
    }
    t2 = next;
  }
  throw NumericError("state_evolution: did not converge");
}

double tau_highsnr(const MassiveProfile& profile) {
  check_profile(profile);
  const double oe = profile.omega * profile.epsilon;
  require(oe < 1.0, "tau_highsnr: requires omega * epsilon < 1");
  return profile.sigma_u2 / (profile.xi * (1.0 - oe));
}

EstimateStats channel_estimate_stats(double beta_k, double tau2) {
  require(beta_k > 0, "channel_estimate_stats: beta must be positive");
  require(tau2 >= 0, "channel_estimate_stats: tau2 must be nonnegative");
  return {beta_k * beta_k / (beta_k + tau2), beta_k * tau2 / (beta_k + tau2)};
}

double limit_sinr_massive_mrc(double beta_k, const MassiveProfile& profile,
                              double tau2) {
  check_profile(profile);
  require(beta_k > 0, "limit_sinr_massive_mrc: beta must be positive");
  require(tau2 >= 0, "limit_sinr_massive_mrc: tau2 must be nonnegative");
  const double eb = mean_beta(profile, [](double b) { return b; });
  return beta_k * beta_k / (profile.c * eb * (beta_k + tau2));
}

double mmse_gamma(const MassiveProfile& profile, double tau2) {
  check_profile(profile);
  require(tau2 >= 0, "mmse_gamma: tau2 must be nonnegative");
  const double c = profile.c;
  const double err = c * mean_beta(profile, [tau2](double b) {
                       return b * tau2 / (b + tau2);
                     });
  auto rhs = [&](double g) {
    const double sig = c * mean_beta(profile, [tau2, g](double b) {
                         return b * b / (b + tau2 + b * b * g);
                       });
    return 1.0 / (sig + err);
  };
  // Start at the interference-floor estimate so the damped iteration begins
  // in the basin of the (monotone, bounded) map.
  const double eb = mean_beta(profile, [](double b) { return b; });
  const double eb2 = mean_beta(profile, [](double b) { return b * b; });
  double g = 1.0 / (err + profile.c * eb2 / eb);
  double resid = 1.0;
  for (int it = 0; it < 200000; ++it) {
    const double next = rhs(g);
    resid = std::abs(next - g);
    g = 0.5 * (g + next);
    if (resid < 1e-11) break;
    require(std::isfinite(g) && g < 1e150, "mmse_gamma: iteration diverged");
  }
  if (!(std::abs(rhs(g) - g) < 1e-10))
    throw NumericError("mmse_gamma: fixed point did not converge");
  return g;
}

double limit_sinr_massive_mmse(double beta_k, const MassiveProfile& profile,
                               double tau2) {
  require(beta_k > 0, "limit_sinr_massive_mmse: beta must be positive");
  return beta_k * beta_k / (beta_k + tau2) * mmse_gamma(profile, tau2);
}

}  // namespace rmt::massive
