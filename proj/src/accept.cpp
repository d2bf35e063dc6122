#include "rmt/accept.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <complex>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <vector>

#include "rmt/ensembles.hpp"
#include "rmt/extremes.hpp"
#include "rmt/laws.hpp"
#include "rmt/linalg.hpp"
#include "rmt/massive.hpp"
#include "rmt/multiuser.hpp"
#include "rmt/nn.hpp"
#include "rmt/sensing.hpp"
#include "rmt/spiked.hpp"
#include "rmt/transforms.hpp"
#include "rmt/types.hpp"

namespace rmt::accept {
namespace {

using ensembles::Seed;
using clock_type = std::chrono::steady_clock;

Criterion make(int id, const char* title) {
  Criterion c;
  c.id = id;
  c.title = title;
  return c;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

double var_of(const std::vector<double>& v) {
  double m = mean_of(v), s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return s / v.size();
}

double ks_vs_cdf(std::vector<double> z, const std::function<double(double)>& cdf) {
  std::sort(z.begin(), z.end());
  double n = z.size(), ks = 0;
  for (size_t i = 0; i < z.size(); ++i) {
    double f = cdf(z[i]);
    ks = std::max(ks, std::max(std::abs(f - i / n), std::abs(f - (i + 1) / n)));
  }
  return ks;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// KS between a sample (points >= cutoff) and a gridded density whose cdf is
// anchored at the right end; a point mass at the left is absorbed.
double ks_vs_density(std::vector<double> sample, const std::vector<double>& xs,
                     const std::vector<double>& dens, double cutoff) {
  std::vector<double> tail(xs.size(), 0.0);
  for (size_t i = xs.size() - 1; i-- > 0;)
    tail[i] = tail[i + 1] + 0.5 * (dens[i] + dens[i + 1]) * (xs[i + 1] - xs[i]);
  auto cdf = [&](double x) {
    if (x >= xs.back()) return 1.0;
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    size_t i = it - xs.begin();
    double f = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    return 1.0 - (tail[i - 1] + f * (tail[i] - tail[i - 1]));
  };
  std::sort(sample.begin(), sample.end());
  double n = sample.size(), ks = 0;
  for (size_t i = 0; i < sample.size(); ++i) {
    if (sample[i] < cutoff) continue;
    double f = cdf(sample[i]);
    ks = std::max(ks, std::max(std::abs(f - i / n), std::abs(f - (i + 1) / n)));
  }
  return ks;
}

// Hard-tanh configuration tuned to unit gradient growth rate at depth L.
nn::NetConfig critical_hard_tanh(int L, int N, double q) {
  double p = std::erf(1.0 / std::sqrt(2.0 * q));
  nn::NetConfig cfg;
  cfg.L = L;
  cfg.N = N;
  cfg.sigma_w2 = 1.0 / p;
  cfg.activation = nn::act_hard_tanh();
  cfg.q_star_override = q;
  double a = 1.0 / std::sqrt(2.0 * q);
  double ephi2 = q * std::erf(a) -
                 std::sqrt(2.0 * q / M_PI) * std::exp(-1.0 / (2.0 * q)) + 1.0 -
                 std::erf(a);
  cfg.sigma_b2 = q - cfg.sigma_w2 * ephi2;
  return cfg;
}

// ---------------------------------------------------------------------------

Criterion c1_semicircle() {
  Criterion c = make(1, "semicircle law of a Wigner matrix");
  auto t0 = clock_type::now();
  auto x = ensembles::gen_wigner_real(2000, 1.0, Seed{101});
  auto s = ensembles::esd(x);
  double ks = laws::ks_distance(s, laws::SemicircleLaw(1.0));
  double secs = std::chrono::duration<double>(clock_type::now() - t0).count();
  c.pass = ks < 0.03 && secs < 10.0;
  c.detail = fmt("N=2000 KS=%.4f (<0.03), %.1fs (<10s)", ks, secs);
  return c;
}

Criterion c2_mp() {
  Criterion c = make(2, "Marchenko-Pastur law across aspect ratios");
  std::ostringstream d;
  c.pass = true;
  for (double cc : {0.1, 0.5, 1.0}) {
    int N = 1000, n = int(std::lround(N / cc));
    MatrixXd x = ensembles::gen_iid_real(N, n, Seed{201});
    MatrixXd scm = x * x.transpose() / double(n);
    auto s = ensembles::esd(scm);
    double ks = laws::ks_distance(s, laws::MPLaw(cc));
    c.pass = c.pass && ks < 0.03;
    d << fmt("c=%.1f KS=%.4f ", cc, ks);
  }
  c.detail = d.str() + "(each <0.03)";
  return c;
}

Criterion c3_no_outlier() {
  Criterion c = make(3, "extreme eigenvalues confined to the bulk support");
  const int N = 1000, n = 2000, seeds = 200;
  auto [a, b] = extremes::extreme_limits(0.5);
  int inside = 0;
  for (int t = 0; t < seeds; ++t) {
    MatrixXd x = ensembles::gen_iid_real(N, n, Seed{300u + (unsigned)t});
    auto op = [&](const VectorXd& v) {
      return VectorXd(x * (x.transpose() * v) / double(n));
    };
    auto ex = linalg::lanczos_real(op, N, VectorXd::Ones(N), 110);
    if (ex.min >= a - 0.1 && ex.max <= b + 0.15) ++inside;
  }
  c.pass = inside >= int(0.99 * seeds);
  c.detail = fmt("inside [a-0.1, b+0.15] in %d/%d seeds (>=198)", inside, seeds);
  return c;
}

Criterion c4_tracy_widom() {
  Criterion c = make(4, "Tracy-Widom edge fluctuations");
  auto t0 = clock_type::now();
  // Defining equation residual of the tabulated Painleve II solution.
  auto sol = extremes::solve_painleve2();
  const double h = sol.t[0] - sol.t[1];
  const int npts = int(sol.t.size());
  double resid = 0.0;
  for (int k = 1; k <= 100; ++k) {
    int i = 2 + k * ((npts - 5) / 100);
    double qpp = (-sol.q[i + 2] + 16 * sol.q[i + 1] - 30 * sol.q[i] +
                  16 * sol.q[i - 1] - sol.q[i - 2]) /
                 (12 * h * h);
    resid = std::max(resid,
                     std::abs(qpp - sol.t[i] * sol.q[i] - 2 * std::pow(sol.q[i], 3)));
  }

  const int N = 200, n = 400, trials = 2000;
  auto sc = extremes::wishart_extreme_scaling(N, n, extremes::Which::Max,
                                              Field::Complex);
  std::vector<double> z;
  z.reserve(trials);
  for (int t = 0; t < trials; ++t) {
    MatrixXcd x = ensembles::gen_iid_complex(N, n, Seed{400u + (unsigned)t});
    auto op = [&](const VectorXcd& v) {
      return VectorXcd(x * (x.adjoint() * v) / double(n));
    };
    auto ex = linalg::lanczos_herm(op, N, VectorXcd::Ones(N), 55);
    z.push_back((ex.max - sc.center) / sc.scale);
  }
  const auto& f2 = extremes::TWLaw::order2();
  double ks = ks_vs_cdf(z, [&](double t) { return f2.cdf(t); });
  double secs = std::chrono::duration<double>(clock_type::now() - t0).count();
  c.pass = resid < 1e-8 && ks < 0.05 && secs < 120.0;
  c.detail = fmt("Painleve resid=%.2e (<1e-8), KS=%.4f (<0.05), %.0fs (<120s)",
                 resid, ks, secs);
  return c;
}

Criterion c5_spike_map() {
  Criterion c = make(5, "spiked-model eigenvalue map");
  const int N = 2000, n = 4000, seeds = 100;
  const double cc = 0.5;
  const std::vector<double> alphas = {2.0, 3.0, 5.0};
  std::vector<int> hits(alphas.size(), 0);
  for (int t = 0; t < seeds; ++t) {
    MatrixXd x = ensembles::gen_iid_real(N, n, Seed{500u + (unsigned)t});
    for (size_t ai = 0; ai < alphas.size(); ++ai) {
      MatrixXd xs = x;
      xs.row(0) *= std::sqrt(alphas[ai]);
      auto op = [&](const VectorXd& v) {
        return VectorXd(xs * (xs.transpose() * v) / double(n));
      };
      auto ex = linalg::lanczos_real(op, N, VectorXd::Ones(N), 50);
      double phi = spiked::spike_map(alphas[ai], cc);
      if (std::abs(ex.max - phi) / phi < 0.05) ++hits[ai];
    }
  }
  // A spike inside the critical band stays pinned at the bulk edge.
  double edge = (1 + std::sqrt(cc)) * (1 + std::sqrt(cc));
  int pinned = 0;
  const int sub_seeds = 20;
  for (int t = 0; t < sub_seeds; ++t) {
    MatrixXd x = ensembles::gen_iid_real(N, n, Seed{560u + (unsigned)t});
    x.row(0) *= std::sqrt(1.3);
    auto op = [&](const VectorXd& v) {
      return VectorXd(x * (x.transpose() * v) / double(n));
    };
    auto ex = linalg::lanczos_real(op, N, VectorXd::Ones(N), 90);
    if (std::abs(ex.max - edge) < 0.1) ++pinned;
  }
  c.pass = pinned == sub_seeds;
  std::ostringstream d;
  for (size_t ai = 0; ai < alphas.size(); ++ai) {
    c.pass = c.pass && hits[ai] >= int(0.95 * seeds);
    d << fmt("alpha=%.0f %d/%d ", alphas[ai], hits[ai], seeds);
  }
  c.detail = d.str() + fmt("(>=95, rel tol 5%%); subcritical pinned %d/%d",
                           pinned, sub_seeds);
  return c;
}

Criterion c6_spike_clt() {
  Criterion c = make(6, "Gaussian fluctuation of a detached spike");
  const int N = 400, n = 800, trials = 2000;
  auto fp = spiked::spike_fluctuation_params(3.0, 0.5);
  std::vector<double> z;
  z.reserve(trials);
  const double sq = std::sqrt(3.0);
  for (int t = 0; t < trials; ++t) {
    MatrixXcd x = ensembles::gen_iid_complex(N, n, Seed{600u + (unsigned)t});
    x.row(0) *= sq;
    auto op = [&](const VectorXcd& v) {
      return VectorXcd(x * (x.adjoint() * v) / double(n));
    };
    auto ex = linalg::lanczos_herm(op, N, VectorXcd::Ones(N), 30);
    z.push_back(std::sqrt(double(n)) * (ex.max - fp.mu) / fp.v);
  }
  double ks = ks_vs_cdf(z, normal_cdf);
  c.pass = ks < 0.05;
  c.detail = fmt("tau1=3 c=0.5 N=400: normality KS=%.4f (<0.05)", ks);
  return c;
}

Criterion c7_detectors() {
  Criterion c = make(7, "detector threshold calibration");
  using sensing::Detector;
  const int N = 20, n = 400, trials = 10000;
  const double pfa = 0.1;
  std::ostringstream d;
  c.pass = true;
  for (Detector det : {Detector::ED, Detector::MED, Detector::CND,
                       Detector::EME, Detector::MSEE}) {
    double thr = sensing::threshold_analytic(det, N, n, pfa, Field::Complex, 1.0);
    int exceed = 0;
    for (int t = 0; t < trials; ++t) {
      sensing::SensingScenario sc;
      sc.N = N;
      sc.n = n;
      sc.K = 0;
      sc.seed = Seed{700000u + (unsigned)t};
      auto x = sensing::simulate_observation(sc);
      if (sensing::statistic(x, det, 1.0) > thr) ++exceed;
    }
    double emp = exceed / double(trials);
    static const char* names[] = {"ED", "MED", "CND", "EME", "AGM", "MSEE"};
    bool ok = emp >= 0.075 && emp <= 0.125;
    c.pass = c.pass && ok;
    d << fmt("%s=%.4f%s ", names[int(det)], emp, ok ? "" : "!");
  }
  double thr = sensing::threshold_mc(Detector::AGM, N, n, pfa, 20000, Seed{77},
                                     Field::Complex);
  int exceed = 0;
  for (int t = 0; t < trials; ++t) {
    sensing::SensingScenario sc;
    sc.N = N;
    sc.n = n;
    sc.K = 0;
    sc.seed = Seed{750000u + (unsigned)t};
    auto x = sensing::simulate_observation(sc);
    if (sensing::statistic(x, Detector::AGM, 1.0) > thr) ++exceed;
  }
  double agm = exceed / double(trials);
  bool agm_ok = agm >= 0.09 && agm <= 0.11;
  c.pass = c.pass && agm_ok;
  c.detail = d.str() +
             fmt("(target band [0.075,0.125]); AGM-MC=%.4f (in [0.09,0.11])%s",
                 agm, agm_ok ? "" : "!");
  return c;
}

Criterion c8_limit_sinr() {
  Criterion c = make(8, "large-system limit SINRs of linear receivers");
  using namespace multiuser;
  const int N = 400, K = 200, draws = 16;
  const double p = 1.0, s2 = 0.1, cc = 0.5;
  SystemProfile prof;
  prof.c = cc;
  prof.noise_power = s2;
  const double lim_mrc = limit_sinr_mrc(p, prof);
  const double lim_zf = limit_sinr_zf(p, cc, s2);
  const double lim_mmse = limit_sinr_mmse(p, prof);
  const VectorXd powers = VectorXd::Ones(K);
  double mrc = 0, zf = 0, mmse = 0;
  for (int t = 0; t < draws; ++t) {
    MatrixXcd h = ensembles::gen_iid_complex(N, K, Seed{800u + (unsigned)t}) /
                  std::sqrt(double(N));
    mmse += mmse_sinr_all(h, powers, s2).mean() / draws;
    MatrixXcd wz = build_receiver(Receiver::ZF, h, powers, s2);
    MatrixXcd wm = build_receiver(Receiver::MRC, h, powers, s2);
    double az = 0, am = 0;
    for (int k = 0; k < K; ++k) {
      az += output_sinr(wz, h, powers, s2, k) / K;
      am += output_sinr(wm, h, powers, s2, k) / K;
    }
    zf += az / draws;
    mrc += am / draws;
  }
  // Fixed-point residual of the returned MMSE limit.
  double resid =
      std::abs(p / (s2 + cc * p / (1 + lim_mmse)) - lim_mmse);
  bool ok_mrc = std::abs(mrc - lim_mrc) / lim_mrc < 0.03;
  bool ok_zf = std::abs(zf - lim_zf) / lim_zf < 0.05;
  bool ok_mmse = std::abs(mmse - lim_mmse) / lim_mmse < 0.03;
  c.pass = ok_mrc && ok_zf && ok_mmse && resid < 1e-10;
  c.detail = fmt(
      "MRC %.4f/%.4f (3%%)%s ZF %.4f/%.4f (5%%)%s MMSE %.4f/%.4f (3%%)%s "
      "resid=%.1e (<1e-10)",
      mrc, lim_mrc, ok_mrc ? "" : "!", zf, lim_zf, ok_zf ? "" : "!", mmse,
      lim_mmse, ok_mmse ? "" : "!", resid);
  return c;
}

Criterion c9_sinr_clt() {
  Criterion c = make(9, "SINR fluctuation variances");
  using namespace multiuser;
  const int N = 400, K = 200;
  const double p = 1.0, s2 = 0.1, cc = 0.5;
  const VectorXd powers = VectorXd::Ones(K);

  // Real-field zero-forcing fluctuations.
  const int zf_trials = 2000;
  std::vector<double> zf;
  zf.reserve(zf_trials);
  for (int t = 0; t < zf_trials; ++t) {
    MatrixXd h = ensembles::gen_iid_real(N, K, Seed{900u + (unsigned)t}) /
                 std::sqrt(double(N));
    MatrixXd w = build_receiver(Receiver::ZF, h, powers, s2);
    zf.push_back(output_sinr(w, h, powers, s2, 0));
  }
  double zf_var = double(N) * var_of(zf);
  double zf_theory = (p / s2) * (p / s2) * 2 * (1 - cc);
  bool ok_zf = std::abs(zf_var - zf_theory) / zf_theory < 0.15;

  // MMSE fluctuation variance halves from the real to the complex field.
  auto mmse_draw = [&](Field f, unsigned seed) {
    if (f == Field::Real) {
      MatrixXd h = ensembles::gen_iid_real(N, K, Seed{seed}) /
                   std::sqrt(double(N));
      MatrixXd a = p * (h * h.transpose());
      a.diagonal().array() += s2;
      VectorXd sol = a.llt().solve(h.col(0));
      double t = p * h.col(0).dot(sol);
      return t / (1 - t);
    }
    MatrixXcd h = ensembles::gen_iid_complex(N, K, Seed{seed}) /
                  std::sqrt(double(N));
    MatrixXcd a = p * (h * h.adjoint());
    a.diagonal().array() += s2;
    VectorXcd sol = a.llt().solve(h.col(0));
    double t = p * std::real(h.col(0).dot(sol));
    return t / (1 - t);
  };
  const int mm_trials = 1000;
  std::vector<double> mr, mc2;
  for (int t = 0; t < mm_trials; ++t) {
    mr.push_back(mmse_draw(Field::Real, 950000u + (unsigned)t));
    mc2.push_back(mmse_draw(Field::Complex, 980000u + (unsigned)t));
  }
  double ratio = var_of(mc2) / var_of(mr);
  bool ok_ratio = std::abs(ratio - 0.5) / 0.5 < 0.2;
  c.pass = ok_zf && ok_ratio;
  c.detail = fmt(
      "ZF var %.1f/%.1f (15%%)%s; complex/real MMSE var ratio %.3f (0.5 "
      "+-20%%)%s",
      zf_var, zf_theory, ok_zf ? "" : "!", ratio, ok_ratio ? "" : "!");
  return c;
}

Criterion c10_bigdfe() {
  Criterion c = make(10, "decision-feedback iteration limits");
  using namespace multiuser;
  const double p = 1.0, s2 = 0.1;
  double cold = bigdfe_limit_sinr(p, s2, 0.5, {0.0})[0];
  double mmse = mmse_equal_power_limit(p, s2, 0.5);
  bool ok_cold = std::abs(cold - mmse) < 1e-12;
  double hot = bigdfe_limit_sinr(p, s2, 0.5, {0.999})[0];
  bool ok_hot = std::abs(hot - p / s2) / (p / s2) < 0.01;

  // Square QPSK system against the per-iteration limits, with the decision
  // correlation advanced self-consistently from the previous limit SINR.
  const int N = 256, K = 256, symbols = 600, seeds = 3;
  std::vector<double> ramp{0.0};
  for (int l = 0; l < 3; ++l) {
    double g = bigdfe_limit_sinr(p, s2, 1.0, {ramp.back()}).back();
    ramp.push_back(1.0 - std::erfc(std::sqrt(g / 2.0)));
  }
  auto lim = bigdfe_limit_sinr(p, s2, 1.0, ramp);
  std::vector<double> sim(ramp.size(), 0.0);
  for (int sd = 0; sd < seeds; ++sd) {
    MatrixXcd h = ensembles::gen_iid_complex(N, K, Seed{1000u + (unsigned)sd}) /
                  std::sqrt(double(N));
    auto one = bigdfe_simulate(h, p, s2, ramp, symbols, Seed{1000u + (unsigned)sd});
    for (size_t l = 0; l < sim.size(); ++l) sim[l] += one[l] / seeds;
  }
  bool ok_sim = true;
  std::ostringstream d;
  for (size_t l = 0; l < sim.size(); ++l) {
    double rel = std::abs(sim[l] - lim[l]) / lim[l];
    ok_sim = ok_sim && rel < 0.10;
    d << fmt("it%zu %+.1f%% ", l, 100 * (sim[l] - lim[l]) / lim[l]);
  }
  c.pass = ok_cold && ok_hot && ok_sim;
  c.detail = fmt("cold-start gap %.1e (<1e-12)%s; rho=0.999 gap %.2f%% "
                 "(<1%%)%s; N=K=256 QPSK: ",
                 std::abs(cold - mmse), ok_cold ? "" : "!",
                 100 * std::abs(hot - p / s2) / (p / s2), ok_hot ? "" : "!") +
             d.str() + "(each <10%)";
  return c;
}

Criterion c11_massive() {
  Criterion c = make(11, "grant-free access state evolution and SINR");
  massive::MassiveProfile prof;  // xi=10, omega=1, eps=0.5, c=0.1, unit noise
  auto se = massive::state_evolution(prof);
  double tau2_exact = (-0.4 + std::sqrt(0.56)) / 2.0;
  bool ok_tau = std::abs(se.fixed_point - tau2_exact) < 1e-6 &&
                std::abs(se.fixed_point - 0.17417) < 1e-5;
  double gamma = massive::mmse_gamma(prof, 0.2);
  bool ok_gamma = std::abs(gamma - 54.1) < 0.5;

  // Perfect-CSI reduction agrees with the overloaded multiuser MMSE limit.
  massive::MassiveProfile over = prof;
  over.c = 2.0;
  double red = massive::limit_sinr_massive_mmse(1.0, over, 0.0);
  multiuser::SystemProfile mp;
  mp.c = 2.0;
  mp.noise_power = 1e-9;
  double mu = multiuser::limit_sinr_mmse(1.0, mp);
  bool ok_red = std::abs(red - mu) < 1e-6;
  c.pass = ok_tau && ok_gamma && ok_red;
  c.detail = fmt(
      "tau2*=%.8f (0.17417 +-1e-6)%s; Gamma=%.3f (54.1 +-0.5)%s; perfect-CSI "
      "gap %.1e (<1e-6)%s",
      se.fixed_point, ok_tau ? "" : "!", gamma, ok_gamma ? "" : "!",
      std::abs(red - mu), ok_red ? "" : "!");
  return c;
}

Criterion c12_nn_jacobian() {
  Criterion c = make(12, "deep-network Jacobian spectra");
  // Orthogonal linear network: exact isometry.
  nn::NetConfig lo;
  lo.L = 8;
  lo.N = 300;
  lo.sigma_w2 = 1.0;
  lo.ensemble = nn::WeightEnsemble::Orthogonal;
  lo.activation = nn::act_linear();
  auto iso = nn::jacobian_empirical(lo, Seed{1200});
  double iso_err = 0;
  for (double v : iso.eigenvalues) iso_err = std::max(iso_err, std::abs(v - 1.0));

  // Gaussian linear single layer: largest squared singular value near 4.
  nn::NetConfig lg;
  lg.L = 1;
  lg.N = 1000;
  lg.sigma_w2 = 1.0;
  lg.activation = nn::act_linear();
  auto s = nn::jacobian_empirical(lg, Seed{1201});
  double lmax = s.eigenvalues.back();
  bool ok_lmax = std::abs(lmax - 4.0) / 4.0 < 0.05;

  // Depth sweeps: least-squares slopes of lambda_max and variance vs depth.
  auto sweep = [&](nn::NetConfig base, double* lr, double* vr) {
    std::vector<double> Ld, thL, thV, emL, emV;
    for (int L : {2, 4, 8, 16}) {
      nn::NetConfig cfg = base;
      cfg.L = L;
      auto th = nn::jacobian_theory(cfg);
      double lm = 0, vv = 0;
      const int reps = 3;
      for (int r = 0; r < reps; ++r) {
        auto emp = nn::jacobian_empirical(cfg, Seed{1210u + (unsigned)r});
        lm += *std::max_element(emp.eigenvalues.begin(), emp.eigenvalues.end()) /
              reps;
        vv += var_of(emp.eigenvalues) / reps;
      }
      Ld.push_back(L);
      thL.push_back(th.lambda_max);
      thV.push_back(th.variance);
      emL.push_back(lm);
      emV.push_back(vv);
    }
    auto slope = [&](const std::vector<double>& y) {
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      int n = int(y.size());
      for (int i = 0; i < n; ++i) {
        sx += Ld[i];
        sy += y[i];
        sxx += Ld[i] * Ld[i];
        sxy += Ld[i] * y[i];
      }
      return (n * sxy - sx * sy) / (n * sxx - sx * sx);
    };
    *lr = slope(emL) / slope(thL);
    *vr = slope(emV) / slope(thV);
  };
  nn::NetConfig gr;
  gr.N = 1000;
  gr.sigma_w2 = 2.0;
  gr.activation = nn::act_relu();
  double gr_l, gr_v;
  sweep(gr, &gr_l, &gr_v);
  nn::NetConfig oh = critical_hard_tanh(2, 1000, 1.0);
  oh.ensemble = nn::WeightEnsemble::Orthogonal;
  double oh_l, oh_v;
  sweep(oh, &oh_l, &oh_v);
  auto in20 = [](double r) { return std::abs(r - 1.0) < 0.20; };
  c.pass = iso_err < 1e-10 && ok_lmax && in20(gr_l) && in20(gr_v) &&
           in20(oh_l) && in20(oh_v);
  c.detail = fmt(
      "isometry err=%.1e (<1e-10); lmax=%.3f (4 +-5%%)%s; slope ratios "
      "gauss-relu %.2f/%.2f, orth-htanh %.2f/%.2f (each 1 +-0.2)",
      iso_err, lmax, ok_lmax ? "" : "!", gr_l, gr_v, oh_l, oh_v);
  return c;
}

Criterion c13_nn_hessian() {
  Criterion c = make(13, "loss-curvature model spectrum");
  std::ostringstream d;
  c.pass = true;
  struct Cfg {
    double eps, cc, lo, hi;
  };
  for (auto [eps, cc, lo, hi] : {Cfg{1.0, 2.0 / 3.0, -8.0, 10.0},
                                 Cfg{1e-3, 1.0 / 3.0, -0.5, 3.5}}) {
    nn::HessianModelParams p{eps, cc, 1.0};
    std::vector<double> xs;
    for (double x = lo; x <= hi + 1e-9; x += 0.004) xs.push_back(x);
    auto dens = nn::hessian_density(p, xs);
    auto sample = nn::hessian_sample(p, 1500, Seed{1300});
    double ks = ks_vs_density(sample.eigenvalues, xs, dens, lo);
    c.pass = c.pass && ks < 0.05;
    d << fmt("KS(eps=%g,c=%.3f)=%.4f ", eps, cc, ks);
  }
  nn::HessianModelParams onset{nn::epsilon_c(0.25), 0.25, 1.0};
  double idx = nn::normalized_index(onset);
  bool ok_idx = idx < 1e-3;
  // Zero error energy: the spectrum is the aspect-ratio-c sample covariance
  // law (compared off the square-root edges, where finite evaluation
  // broadening dominates).
  nn::HessianModelParams flat{0.0, 0.25, 1.0};
  std::vector<double> xs;
  for (double x = 0.05; x <= 0.19; x += 0.01) xs.push_back(x);
  for (double x = 0.31; x <= 2.19; x += 0.01) xs.push_back(x);
  auto dens = nn::hessian_density(flat, xs);
  double mp_err = 0;
  for (size_t i = 0; i < xs.size(); ++i)
    mp_err = std::max(mp_err, std::abs(dens[i] - laws::mp_pdf(xs[i], 0.25)));
  c.pass = c.pass && ok_idx && mp_err < 1e-3;
  c.detail = d.str() + fmt("(each <0.05); index at onset=%.1e (<1e-3)%s; "
                           "eps=0 vs MP err=%.1e (<1e-3)",
                           idx, ok_idx ? "" : "!", mp_err);
  return c;
}

Criterion c14_nn_datacov() {
  Criterion c = make(14, "post-activation data covariance");
  laws::MPLaw mp(0.5, 1.0);
  auto s1 = nn::datacov_empirical(nn::f_alpha(1.0), 1, 1000, 1000, 2000, 1.0,
                                  1.0, Seed{1400});
  double ks1 = laws::ks_distance(s1, mp);
  auto s10 = nn::datacov_empirical(nn::f_alpha(1.0), 10, 1000, 1000, 2000, 1.0,
                                   1.0, Seed{1401});
  double ks10 = laws::ks_distance(s10, mp);
  auto slin = nn::datacov_empirical(nn::act_linear(), 10, 1000, 1000, 2000,
                                    1.0, 1.0, Seed{1402});
  double kslin = laws::ks_distance(slin, mp);
  auto z0 = nn::eta_zeta(nn::f_alpha(0.0));
  auto z1 = nn::eta_zeta(nn::f_alpha(1.0));
  bool ok_z = std::abs(z0.zeta - 0.733) < 0.002 && std::abs(z1.zeta) < 1e-8;
  c.pass = ks1 < 0.05 && ks10 < 0.08 && kslin > 0.2 && ok_z;
  c.detail = fmt(
      "single-layer KS=%.4f (<0.05); 10-layer KS=%.4f (<0.08) vs linear "
      "KS=%.4f (>0.2); zeta(0)=%.5f (0.733 +-0.002)%s zeta(1)=%.1e (<1e-8)",
      ks1, ks10, kslin, z0.zeta, ok_z ? "" : "!", std::abs(z1.zeta));
  return c;
}

Criterion c15_transforms() {
  Criterion c = make(15, "transform calculus round trips");
  auto carrier = transforms::carrier_mp(0.5, 1.0);
  auto via_s = transforms::stieltjes_from_s(transforms::s_transform(carrier));
  auto via_r = transforms::stieltjes_from_r(transforms::r_transform(carrier));
  auto sc = transforms::carrier_semicircle(1.0);
  auto sc_r = transforms::stieltjes_from_r(transforms::r_transform(sc));
  double rt = 0;
  for (cplx z : {cplx(0.5, 0.4), cplx(-1.0, 0.2), cplx(2.0, 1.0), cplx(4.0, 0.05)}) {
    rt = std::max(rt, std::abs(via_s(z) - carrier->m(z)));
    rt = std::max(rt, std::abs(via_r(z) - carrier->m(z)));
    rt = std::max(rt, std::abs(sc_r(z) - sc->m(z)));
  }

  // Free multiplicative convolution of two sample-covariance laws against a
  // sampled product.
  auto prod = transforms::free_multiply(
      transforms::s_transform(transforms::carrier_mp(0.5, 1.0)),
      transforms::s_transform(transforms::carrier_mp(0.5, 1.0)));
  std::vector<double> xs;
  for (double x = 0.005; x <= 9.0; x += 0.005) xs.push_back(x);
  auto dens = transforms::density_from_s(prod, xs);
  const int N = 600, n = 1200;
  MatrixXd x1 = ensembles::gen_iid_real(N, n, Seed{1500});
  MatrixXd x2 = ensembles::gen_iid_real(N, n, Seed{1501});
  MatrixXd a = x1 * x1.transpose() / double(n);
  MatrixXd b = x2 * x2.transpose() / double(n);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(a);
  MatrixXd half = es.operatorSqrt();
  MatrixXd prod_mat = half * b * half;
  auto sample = ensembles::esd(MatrixXd(0.5 * (prod_mat + prod_mat.transpose())));
  double ks = ks_vs_density(sample.eigenvalues, xs, dens, 0.02);
  c.pass = rt < 1e-6 && ks < 0.05;
  c.detail = fmt("round-trip err=%.1e (<1e-6); product-law KS=%.4f (<0.05)",
                 rt, ks);
  return c;
}

}  // namespace

const std::vector<int>& known_limitations() {
  static const std::vector<int> ids = {7};
  return ids;
}

std::vector<Criterion> run_all(const Progress& progress) {
  using Fn = Criterion (*)();
  static const Fn fns[] = {c1_semicircle, c2_mp,          c3_no_outlier,
                           c4_tracy_widom, c5_spike_map,  c6_spike_clt,
                           c7_detectors,  c8_limit_sinr,  c9_sinr_clt,
                           c10_bigdfe,    c11_massive,    c12_nn_jacobian,
                           c13_nn_hessian, c14_nn_datacov, c15_transforms};
  std::vector<Criterion> out;
  for (Fn fn : fns) {
    auto t0 = clock_type::now();
    Criterion c;
    try {
      c = fn();
    } catch (const std::exception& e) {
      c.id = int(out.size()) + 1;
      c.pass = false;
      c.detail = std::string("exception: ") + e.what();
    }
    c.seconds = std::chrono::duration<double>(clock_type::now() - t0).count();
    if (progress) progress(c);
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace rmt::accept
