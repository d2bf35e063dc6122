#include "rmt/sensing.hpp"

#include <algorithm>
#include <cmath>

#include "rmt/extremes.hpp"
#include "rmt/linalg.hpp"
#include "rmt/rng.hpp"
#include "rmt/spiked.hpp"

namespace rmt::sensing {

double q_function(double t) { return 0.5 * std::erfc(t / std::sqrt(2.0)); }

double q_inverse(double p) {
  require(p > 0.0 && p < 1.0, "q_inverse: p must lie in (0, 1)");
  double lo = -12.0, hi = 12.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (q_function(mid) > p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

bool requires_noise_power(Detector kind) {
  return kind == Detector::ED || kind == Detector::MED;
}

ensembles::AnyMatrix simulate_observation(const SensingScenario& sc) {
  require(sc.N >= 1 && sc.n >= 1, "simulate_observation: need N, n >= 1");
  require(sc.K >= 0, "simulate_observation: K must be >= 0");
  require(sc.noise_power > 0, "simulate_observation: noise power must be > 0");
  const double su = std::sqrt(sc.noise_power);
  const ensembles::Seed sh{substream(sc.seed.value, 1)};
  const ensembles::Seed ss{substream(sc.seed.value, 2)};
  const ensembles::Seed sn{substream(sc.seed.value, 3)};

  ensembles::AnyMatrix out;
  out.field = sc.field;
  if (sc.K == 0) {
    if (sc.field == Field::Real)
      out.r = su * ensembles::gen_iid_real(sc.N, sc.n, sn);
    else
      out.c = su * ensembles::gen_iid_complex(sc.N, sc.n, sn);
    return out;
  }
  // Per-antenna average received SNR: sigma_s^2 K / sigma_u^2.
  const double snr = std::pow(10.0, sc.snr_db / 10.0);
  const double sigs = std::sqrt(snr * sc.noise_power / sc.K);
  if (sc.field == Field::Real) {
    const MatrixXd h = ensembles::gen_iid_real(sc.N, sc.K, sh);
    const MatrixXd s = ensembles::gen_iid_real(sc.K, sc.n, ss);
    out.r = sigs * h * s + su * ensembles::gen_iid_real(sc.N, sc.n, sn);
  } else {
    const MatrixXcd h = ensembles::gen_iid_complex(sc.N, sc.K, sh);
    const MatrixXcd s = ensembles::gen_iid_complex(sc.K, sc.n, ss);
    out.c = sigs * h * s + su * ensembles::gen_iid_complex(sc.N, sc.n, sn);
  }
  return out;
}

namespace {

VectorXd scm_eigenvalues(const ensembles::AnyMatrix& x) {
  if (x.field == Field::Real) {
    const int n = static_cast<int>(x.r.cols());
    return linalg::sym_eigenvalues(MatrixXd(x.r * x.r.transpose() / n));
  }
  const int n = static_cast<int>(x.c.cols());
  return linalg::herm_eigenvalues(MatrixXcd(x.c * x.c.adjoint() / n));
}

double energy_stat(const ensembles::AnyMatrix& x) {
  const double e = x.field == Field::Real ? x.r.squaredNorm()
                                          : x.c.squaredNorm();
  const auto rows = x.field == Field::Real ? x.r.rows() : x.c.rows();
  const auto cols = x.field == Field::Real ? x.r.cols() : x.c.cols();
  return e / static_cast<double>(rows * cols);
}

}  // namespace

double statistic(const ensembles::AnyMatrix& x, Detector kind,
                 double sigma_u2) {
  if (kind == Detector::ED) return energy_stat(x);
  require(sigma_u2 > 0, "statistic: sigma_u2 must be positive");
  const VectorXd ev = scm_eigenvalues(x);
  const int N = static_cast<int>(ev.size());
  const double lmax = ev(N - 1), lmin = ev(0);
  if (kind == Detector::MED) return lmax / sigma_u2;
  require(lmin > 1e-12 * std::max(lmax, 1.0),
          "statistic: smallest eigenvalue vanishes (N > n degenerate)");
  switch (kind) {
    case Detector::CND:
      return lmax / lmin;
    case Detector::EME:
      return ev.mean() / lmin;
    case Detector::MSEE:
      return 0.5 * (lmax + lmin) / std::sqrt(lmax * lmin);
    case Detector::AGM: {
      double lg = 0;
      for (int i = 0; i < N; ++i) lg += std::log(ev(i));
      return ev.mean() / std::exp(lg / N);
    }
    default:
      throw RangeError("statistic: unknown detector");
  }
}

double threshold_analytic(Detector kind, int N, int n, double pfa,
                          Field field, double sigma_u2) {
  require(N >= 1 && n >= 1, "threshold_analytic: need N, n >= 1");
  require(pfa > 0.0 && pfa < 1.0, "threshold_analytic: pfa outside (0, 1)");
  require(kind != Detector::AGM,
          "threshold_analytic: no closed form for the mean-ratio detector");
  const double v = field == Field::Real ? 2.0 : 1.0;  // energy CLT variance
  if (kind == Detector::ED)
    return sigma_u2 *
           (1.0 + std::sqrt(v / (double(n) * N)) * q_inverse(pfa));

  const double sn = std::sqrt(double(n)), sN = std::sqrt(double(N));
  const extremes::TWLaw& tw = field == Field::Real ? extremes::TWLaw::order1()
                                                   : extremes::TWLaw::order2();
  const double twq = tw.quantile(1.0 - pfa);
  const double bump =
      1.0 + std::pow(sn + sN, -2.0 / 3.0) /
                std::pow(double(n) * N, 1.0 / 6.0) * twq;
  switch (kind) {
    case Detector::MED:
      return (sn + sN) * (sn + sN) / n * bump;
    case Detector::CND:
      return (sn + sN) * (sn + sN) / ((sn - sN) * (sn - sN)) * bump;
    case Detector::EME:
      return (std::sqrt(v / (double(n) * N)) * q_inverse(pfa) + 1.0) * n /
             ((sn - sN) * (sn - sN));
    case Detector::MSEE: {
      const double y =
          (sn + sN) * (sn + sN) / ((sn - sN) * (sn - sN)) * bump;
      // G(x) = 2x^2 - 1 + 2x sqrt(x^2 - 1) has inverse (sqrt(y)+1/sqrt(y))/2.
      const double sy = std::sqrt(y);
      return 0.5 * (sy + 1.0 / sy);
    }
    default:
      throw RangeError("threshold_analytic: unknown detector");
  }
}

double threshold_mc(Detector kind, int N, int n, double pfa, int trials,
                    ensembles::Seed seed, Field field, double sigma_u2) {
  require(trials >= 1000, "threshold_mc: need trials >= 1000");
  require(pfa > 0.0 && pfa < 1.0, "threshold_mc: pfa outside (0, 1)");
  std::vector<double> stats(trials);
  SensingScenario sc;
  sc.N = N;
  sc.n = n;
  sc.K = 0;
  sc.noise_power = sigma_u2;
  sc.field = field;
  for (int t = 0; t < trials; ++t) {
    sc.seed = ensembles::Seed{substream(seed.value ^ kStreamSenseMc, t)};
    stats[t] = statistic(simulate_observation(sc), kind, sigma_u2);
  }
  std::sort(stats.begin(), stats.end());
  const int idx = std::min<int>(trials - 1,
                                static_cast<int>((1.0 - pfa) * trials));
  return stats[idx];
}

std::vector<RocPoint> roc(const SensingScenario& sc, Detector kind,
                          const std::vector<double>& pfa_grid, int trials) {
  require(sc.K >= 1, "roc: need at least one active user for pd");
  require(trials >= 1, "roc: trials must be >= 1");

  std::vector<double> h0(trials), h1(trials);
  SensingScenario null = sc;
  null.K = 0;
  for (int t = 0; t < trials; ++t) {
    SensingScenario a = null, b = sc;
    a.seed = ensembles::Seed{substream(sc.seed.value ^ kStreamSense, 2 * t)};
    b.seed =
        ensembles::Seed{substream(sc.seed.value ^ kStreamSense, 2 * t + 1)};
    h0[t] = statistic(simulate_observation(a), kind, sc.noise_power);
    h1[t] = statistic(simulate_observation(b), kind, sc.noise_power);
  }

  std::vector<RocPoint> out;
  std::vector<double> grid = pfa_grid;
  std::sort(grid.begin(), grid.end());
  for (double pfa : grid) {
    const double gamma =
        kind == Detector::AGM
            ? threshold_mc(kind, sc.N, sc.n, pfa, std::max(2000, trials),
                           ensembles::Seed{substream(sc.seed.value, 99)},
                           sc.field, sc.noise_power)
            : threshold_analytic(kind, sc.N, sc.n, pfa, sc.field,
                                 sc.noise_power);
    RocPoint p;
    p.trials = trials;
    for (int t = 0; t < trials; ++t) {
      p.pfa += h0[t] > gamma;
      p.pd += h1[t] > gamma;
    }
    p.pfa /= trials;
    p.pd /= trials;
    p.pfa_se = std::sqrt(std::max(p.pfa * (1 - p.pfa), 1e-12) / trials);
    p.pd_se = std::sqrt(std::max(p.pd * (1 - p.pd), 1e-12) / trials);
    out.push_back(p);
  }
  return out;
}

double analytic_pd_single_pu(double snr, int N, int n, double gamma) {
  require(snr > 0, "analytic_pd_single_pu: linear snr must be positive");
  require(N >= 2 && n > N, "analytic_pd_single_pu: need 2 <= N < n");
  const double c = static_cast<double>(N) / n;
  const double tau = 1.0 + N * snr;  // sigma-normalized spike
  require(tau > 1.0 + std::sqrt(c),
          "analytic_pd_single_pu: spike is subcritical; use Monte Carlo");
  const auto fl = spiked::spike_fluctuation_params(tau, c);
  const double lmin = (1.0 - std::sqrt(c)) * (1.0 - std::sqrt(c));
  return q_function((gamma * lmin - fl.mu) / (fl.v / std::sqrt(double(n))));
}

}  // namespace rmt::sensing
