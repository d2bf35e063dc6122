#include "rmt/extremes.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_odeiv2.h>
#include <gsl/gsl_sf_airy.h>

#include <algorithm>
#include <cmath>
#include <mutex>

#include "rmt/rng.hpp"

namespace rmt::extremes {

double airy(double x) {
  require(x >= -15.0 && x <= 15.0, "airy: argument outside [-15, 15]");
  return gsl_sf_airy_Ai(x, GSL_PREC_DOUBLE);
}

double airy_deriv(double x) {
  require(x >= -15.0 && x <= 15.0, "airy_deriv: argument outside [-15, 15]");
  return gsl_sf_airy_Ai_deriv(x, GSL_PREC_DOUBLE);
}

namespace {

int painleve2_rhs(double t, const double y[], double dydt[], void*) {
  dydt[0] = y[1];
  dydt[1] = t * y[0] + 2.0 * y[0] * y[0] * y[0];
  return GSL_SUCCESS;
}

}  // namespace

Painleve2Solution solve_painleve2(double t_max, double t_min, double tol) {
  require(t_max >= 6.0, "solve_painleve2: t_max must be >= 6");
  require(t_min < t_max, "solve_painleve2: t_min must be below t_max");

  const double h = 1e-3;
  const int n = static_cast<int>(std::llround((t_max - t_min) / h));

  Painleve2Solution sol;
  sol.t.resize(n + 1);
  sol.q.resize(n + 1);
  sol.qp.resize(n + 1);

  gsl_odeiv2_system sys{painleve2_rhs, nullptr, 2, nullptr};
  gsl_odeiv2_driver* drv = gsl_odeiv2_driver_alloc_y_new(
      &sys, gsl_odeiv2_step_rk8pd, -1e-4, 1e-14, tol);

  double t = t_max;
  double y[2] = {airy(t_max), airy_deriv(t_max)};
  sol.t[0] = t;
  sol.q[0] = y[0];
  sol.qp[0] = y[1];
  for (int i = 1; i <= n; ++i) {
    const double ti = t_max - i * h;
    const int status = gsl_odeiv2_driver_apply(drv, &t, ti, y);
    if (status != GSL_SUCCESS || !std::isfinite(y[0])) {
      gsl_odeiv2_driver_free(drv);
      throw NumericError("solve_painleve2: integration failed near t = " +
                         std::to_string(ti));
    }
    sol.t[i] = ti;
    sol.q[i] = y[0];
    sol.qp[i] = y[1];
  }
  gsl_odeiv2_driver_free(drv);
  return sol;
}

TWLaw::TWLaw(int order) : order_(order) {
  require(order == 1 || order == 2, "TWLaw: order must be 1 or 2");
  const Painleve2Solution sol = solve_painleve2();
  const int n = static_cast<int>(sol.t.size());

  // Ascending copies and suffix trapezoid integrals of q, q^2, x q^2.
  std::vector<double> t(n), q(n);
  for (int i = 0; i < n; ++i) {
    t[i] = sol.t[n - 1 - i];
    q[i] = sol.q[n - 1 - i];
  }
  std::vector<double> iq(n, 0.0), iq2(n, 0.0), ixq2(n, 0.0);
  for (int i = n - 2; i >= 0; --i) {
    const double dt = t[i + 1] - t[i];
    iq[i] = iq[i + 1] + 0.5 * dt * (q[i] + q[i + 1]);
    iq2[i] = iq2[i + 1] + 0.5 * dt * (q[i] * q[i] + q[i + 1] * q[i + 1]);
    ixq2[i] = ixq2[i + 1] +
              0.5 * dt * (t[i] * q[i] * q[i] + t[i + 1] * q[i + 1] * q[i + 1]);
  }

  t_ = std::move(t);
  cdf_.resize(n);
  for (int i = 0; i < n; ++i) {
    const double f2 = std::exp(-(ixq2[i] - t_[i] * iq2[i]));
    cdf_[i] = order_ == 2 ? f2 : std::exp(-0.5 * iq[i]) * std::sqrt(f2);
  }
  // Guard against round-off non-monotonicity in the flat tails.
  for (int i = 1; i < n; ++i) cdf_[i] = std::max(cdf_[i], cdf_[i - 1]);
}

double TWLaw::cdf(double t) const {
  if (t <= t_.front()) return 0.0;
  if (t >= t_.back()) return 1.0;
  const double h = t_[1] - t_[0];
  const int i = std::min<int>(static_cast<int>((t - t_.front()) / h),
                              static_cast<int>(t_.size()) - 2);
  const double w = (t - t_[i]) / h;
  return cdf_[i] * (1.0 - w) + cdf_[i + 1] * w;
}

double TWLaw::quantile(double p) const {
  require(p > 1e-6 && p < 1.0 - 1e-6,
          "tw_quantile: p outside (1e-6, 1 - 1e-6)");
  const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), p);
  int i = std::max<int>(1, static_cast<int>(it - cdf_.begin()));
  i = std::min<int>(i, static_cast<int>(cdf_.size()) - 1);
  const double lo = cdf_[i - 1], hi = cdf_[i];
  const double w = hi > lo ? (p - lo) / (hi - lo) : 0.5;
  return t_[i - 1] * (1.0 - w) + t_[i] * w;
}

const TWLaw& TWLaw::order1() {
  static const TWLaw law(1);
  return law;
}

const TWLaw& TWLaw::order2() {
  static const TWLaw law(2);
  return law;
}

ExtremeScaling wishart_extreme_scaling(int N, int n, Which which, Field field,
                                       bool alternate) {
  require(N > 1 && n > 1, "wishart_extreme_scaling: need N, n > 1");
  require(which == Which::Max || N < n,
          "wishart_extreme_scaling: smallest eigenvalue needs N < n");
  const double c = static_cast<double>(N) / n;
  const double sc = std::sqrt(c);

  if (field == Field::Complex) {
    const double sgn = which == Which::Max ? 1.0 : -1.0;
    const double edge = which == Which::Max ? (1.0 + sc) * (1.0 + sc)
                                            : (1.0 - sc) * (1.0 - sc);
    double scale;
    if (!alternate) {
      const double e = which == Which::Max ? 1.0 + sc : 1.0 - sc;
      scale = std::pow(e, 4.0 / 3.0) * sc / std::pow(double(N), 2.0 / 3.0);
    } else {
      // Symmetric-in-(N, n) form on the raw X X^H scale, divided by n.
      const double sN = std::sqrt(double(N)), sn = std::sqrt(double(n));
      const double s = which == Which::Max ? 1.0 : -1.0;
      scale = (sn + s * sN) *
              std::cbrt(std::abs(1.0 / sN + s * 1.0 / sn)) / n;
    }
    return {edge, sgn * scale, 2};
  }

  // Real case: constants defined on the raw X X^T scale with the n - 1
  // degree-of-freedom shift, then divided by n for the SCM convention.
  const double sm = std::sqrt(double(n - 1));
  const double sN = std::sqrt(double(N));
  const double s = which == Which::Max ? 1.0 : -1.0;
  const double mu = (sm + s * sN) * (sm + s * sN);
  const double inner = alternate ? 1.0 / (n - 1) + s * 1.0 / sN
                                 : 1.0 / sm + s * 1.0 / sN;
  const double sigma = (sm + s * sN) * std::cbrt(inner);
  return {mu / n, sigma / n, 1};
}

std::pair<double, double> extreme_limits(double c) {
  require(c > 0, "extreme_limits: c must be positive");
  const double sc = std::sqrt(c);
  return {(1.0 - sc) * (1.0 - sc), (1.0 + sc) * (1.0 + sc)};
}

std::vector<double> condition_number_limit_sampler(ensembles::Seed seed,
                                                   int trials) {
  require(trials > 0, "condition_number_limit_sampler: trials must be > 0");
  const TWLaw& tw2 = TWLaw::order2();
  CounterRng rng(seed.value, kStreamCondition);
  std::vector<double> out(trials);
  for (int i = 0; i < trials; ++i) {
    const auto clamp = [](double u) {
      return std::clamp(u, 2e-6, 1.0 - 2e-6);
    };
    const double xp = tw2.quantile(clamp(rng.uniform(2 * i)));
    const double xm = -tw2.quantile(clamp(rng.uniform(2 * i + 1)));
    out[i] = -0.5 * (xp + xm);
  }
  return out;
}

}  // namespace rmt::extremes
