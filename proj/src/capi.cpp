#include "rmtk.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rmt/accept.hpp"
#include "rmt/ensembles.hpp"
#include "rmt/extremes.hpp"
#include "rmt/laws.hpp"
#include "rmt/massive.hpp"
#include "rmt/multiuser.hpp"
#include "rmt/nn.hpp"
#include "rmt/rng.hpp"
#include "rmt/sensing.hpp"
#include "rmt/spiked.hpp"
#include "rmt/types.hpp"

extern "C" void openblas_set_num_threads(int);

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Cell {
  std::string text;
  double value = 0.0;
  bool numeric = false;
};

thread_local std::string g_error;

Cell num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return Cell{buf, v, true};
}

Cell label(std::string s) { return Cell{std::move(s), 0.0, false}; }

}  // namespace

struct rmtk_table {
  std::vector<std::string> names;
  std::vector<std::vector<Cell>> rows;
};

namespace {

using ensembles_seed = rmt::ensembles::Seed;

rmtk_table* make_table(std::vector<std::string> names) {
  auto* t = new rmtk_table;
  t->names = std::move(names);
  return t;
}

std::vector<double> parse_list(const char* s, const char* what) {
  std::vector<double> out;
  if (!s) return out;
  std::string str(s);
  std::stringstream ss(str);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    size_t pos = 0;
    double v;
    try {
      v = std::stod(item, &pos);
    } catch (const std::exception&) {
      throw UsageError(std::string("malformed ") + what + " entry: " + item);
    }
    if (pos != item.size())
      throw UsageError(std::string("malformed ") + what + " entry: " + item);
    out.push_back(v);
  }
  return out;
}

std::string lower(const char* s) {
  std::string out = s ? s : "";
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

rmt::Field parse_field(const char* s) {
  std::string f = lower(s);
  if (f == "real") return rmt::Field::Real;
  if (f == "complex" || f.empty()) return rmt::Field::Complex;
  throw UsageError("unknown field: " + f);
}

rmt::sensing::Detector parse_detector(const char* s) {
  using rmt::sensing::Detector;
  std::string d = lower(s);
  if (d == "ed") return Detector::ED;
  if (d == "med") return Detector::MED;
  if (d == "cnd") return Detector::CND;
  if (d == "eme") return Detector::EME;
  if (d == "agm") return Detector::AGM;
  if (d == "msee") return Detector::MSEE;
  throw UsageError("unknown detector: " + d);
}

rmt::nn::Activation parse_activation(const char* s, double alpha) {
  std::string a = lower(s);
  if (a == "linear") return rmt::nn::act_linear();
  if (a == "relu") return rmt::nn::act_relu();
  if (a == "hard-tanh" || a == "hardtanh") return rmt::nn::act_hard_tanh();
  if (a == "tanh") return rmt::nn::act_tanh();
  if (a == "falpha" || a == "f-alpha") return rmt::nn::f_alpha(alpha);
  throw UsageError("unknown activation: " + a);
}

template <typename Fn>
int guarded(rmtk_table** out, Fn&& fn) {
  if (out) *out = nullptr;
  g_error.clear();
  try {
    rmtk_table* t = fn();
    if (!out) {
      delete t;
      g_error = "null output table pointer";
      return RMTK_ERR_USAGE;
    }
    *out = t;
    return RMTK_OK;
  } catch (const UsageError& e) {
    g_error = e.what();
    return RMTK_ERR_USAGE;
  } catch (const rmt::RangeError& e) {
    g_error = e.what();
    return RMTK_ERR_RANGE;
  } catch (const rmt::NumericError& e) {
    g_error = e.what();
    return RMTK_ERR_NUMERIC;
  } catch (const std::invalid_argument& e) {
    g_error = e.what();
    return RMTK_ERR_RANGE;
  } catch (const std::exception& e) {
    g_error = e.what();
    return RMTK_ERR_NUMERIC;
  }
}

std::vector<double> uniform_grid(double x0, double x1, int points) {
  rmt::require(points >= 2, "grid needs at least 2 points");
  rmt::require(x1 > x0, "grid needs x1 > x0");
  std::vector<double> xs(points);
  for (int i = 0; i < points; ++i)
    xs[i] = x0 + (x1 - x0) * i / double(points - 1);
  return xs;
}

}  // namespace

const char* rmtk_version(void) { return "1.0.0"; }

const char* rmtk_last_error(void) { return g_error.c_str(); }

void rmtk_set_threads(int n) {
  if (n > 0) openblas_set_num_threads(n);
}

void rmtk_table_free(rmtk_table* t) { delete t; }

int rmtk_table_ncols(const rmtk_table* t) {
  return t ? int(t->names.size()) : 0;
}

int64_t rmtk_table_nrows(const rmtk_table* t) {
  return t ? int64_t(t->rows.size()) : 0;
}

const char* rmtk_table_col_name(const rmtk_table* t, int col) {
  if (!t || col < 0 || col >= int(t->names.size())) return nullptr;
  return t->names[col].c_str();
}

const char* rmtk_table_cell(const rmtk_table* t, int64_t row, int col) {
  if (!t || row < 0 || row >= int64_t(t->rows.size()) || col < 0 ||
      col >= int(t->names.size()))
    return nullptr;
  return t->rows[row][col].text.c_str();
}

double rmtk_table_value(const rmtk_table* t, int64_t row, int col,
                        int* is_number) {
  if (is_number) *is_number = 0;
  if (!t || row < 0 || row >= int64_t(t->rows.size()) || col < 0 ||
      col >= int(t->names.size()))
    return 0.0;
  const Cell& c = t->rows[row][col];
  if (is_number) *is_number = c.numeric ? 1 : 0;
  return c.numeric ? c.value : 0.0;
}

int rmtk_ensemble_esd(const char* kind, int N, int n, double sigma,
                      const char* spikes, const char* field, uint64_t seed,
                      rmtk_table** out) {
  return guarded(out, [&]() {
    namespace ens = rmt::ensembles;
    std::string k = lower(kind);
    rmt::Field f = parse_field(field);
    rmt::SpectralSample s;
    if (k == "wigner") {
      s = ens::esd(ens::gen_wigner(N, sigma, f, ensembles_seed{seed}));
    } else if (k == "wishart") {
      std::vector<double> pop(N, sigma * sigma);
      s = ens::esd(ens::gen_general_scm(pop, n, f, ensembles_seed{seed}));
    } else if (k == "spiked") {
      auto vals = parse_list(spikes, "spikes");
      rmt::require(!vals.empty(), "spiked ensemble needs at least one spike");
      ens::SpikeSpec spec;
      std::sort(vals.begin(), vals.end(), std::greater<>());
      spec.values = vals;
      spec.multiplicities.assign(vals.size(), 1);
      s = ens::esd(ens::gen_spiked_scm(spec, N, n, f, ensembles_seed{seed}));
    } else {
      throw UsageError("unknown ensemble kind: " + k);
    }
    auto* t = make_table({"index", "eigenvalue"});
    for (size_t i = 0; i < s.eigenvalues.size(); ++i)
      t->rows.push_back({num(double(i)), num(s.eigenvalues[i])});
    return t;
  });
}

int rmtk_law_pdf(const char* law, double c, double sigma, double x0, double x1,
                 int points, rmtk_table** out) {
  return guarded(out, [&]() {
    std::string l = lower(law);
    auto xs = uniform_grid(x0, x1, points);
    auto* t = make_table({"x", "density"});
    for (double x : xs) {
      double d;
      if (l == "semicircle")
        d = rmt::laws::semicircle_pdf(x, sigma);
      else if (l == "mp")
        d = rmt::laws::mp_pdf(x, c, sigma);
      else
        throw UsageError("unknown law: " + l);
      t->rows.push_back({num(x), num(d)});
    }
    return t;
  });
}

int rmtk_tw_table(double t0, double t1, int points, rmtk_table** out) {
  return guarded(out, [&]() {
    auto ts = uniform_grid(t0, t1, points);
    const auto& f1 = rmt::extremes::TWLaw::order1();
    const auto& f2 = rmt::extremes::TWLaw::order2();
    auto* t = make_table({"t", "F1", "F2"});
    for (double x : ts)
      t->rows.push_back({num(x), num(f1.cdf(x)), num(f2.cdf(x))});
    return t;
  });
}

int rmtk_tw_quantile(int order, double p, rmtk_table** out) {
  return guarded(out, [&]() {
    rmt::require(order == 1 || order == 2, "order must be 1 or 2");
    const auto& law = order == 1 ? rmt::extremes::TWLaw::order1()
                                 : rmt::extremes::TWLaw::order2();
    auto* t = make_table({"order", "p", "quantile"});
    t->rows.push_back({num(order), num(p), num(law.quantile(p))});
    return t;
  });
}

int rmtk_spiked_predict(const char* alphas, double c, int N, rmtk_table** out) {
  return guarded(out, [&]() {
    auto vals = parse_list(alphas, "alphas");
    rmt::require(!vals.empty(), "need at least one spike");
    std::sort(vals.begin(), vals.end(), std::greater<>());
    rmt::ensembles::SpikeSpec spec;
    spec.values = vals;
    spec.multiplicities.assign(vals.size(), 1);
    auto regimes = rmt::spiked::classify_spikes(spec, c, N);
    auto* t = make_table({"alpha", "regime", "limit", "index_begin",
                          "index_end"});
    for (const auto& r : regimes) {
      const char* name = r.regime == rmt::spiked::Regime::SupercriticalHigh
                             ? "detached-above"
                         : r.regime == rmt::spiked::Regime::SupercriticalLow
                             ? "detached-below"
                             : "bulk";
      t->rows.push_back({num(r.alpha), label(name), num(r.predicted_limit),
                         num(r.index_begin), num(r.index_end)});
    }
    return t;
  });
}

int rmtk_sense_threshold(const char* detector, int N, int n, double pfa,
                         const char* method, int trials, uint64_t seed,
                         rmtk_table** out) {
  return guarded(out, [&]() {
    auto det = parse_detector(detector);
    std::string m = lower(method);
    double thr;
    if (m == "analytic" || m.empty()) {
      m = "analytic";
      thr = rmt::sensing::threshold_analytic(det, N, n, pfa,
                                             rmt::Field::Complex, 1.0);
    } else if (m == "mc") {
      rmt::require(trials > 0, "mc threshold needs trials > 0");
      thr = rmt::sensing::threshold_mc(det, N, n, pfa, trials,
                                       ensembles_seed{seed},
                                       rmt::Field::Complex, 1.0);
    } else {
      throw UsageError("unknown threshold method: " + m);
    }
    auto* t = make_table({"detector", "N", "n", "pfa", "threshold", "method"});
    t->rows.push_back({label(lower(detector)), num(N), num(n), num(pfa),
                       num(thr), label(m)});
    return t;
  });
}

int rmtk_sense_roc(const char* detector, int N, int n, int K, double snr_db,
                   const char* pfa_grid, int trials, uint64_t seed,
                   rmtk_table** out) {
  return guarded(out, [&]() {
    auto det = parse_detector(detector);
    auto grid = parse_list(pfa_grid, "pfa grid");
    if (grid.empty()) grid = {0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.5};
    rmt::sensing::SensingScenario sc;
    sc.N = N;
    sc.n = n;
    sc.K = K;
    sc.snr_db = snr_db;
    sc.seed = ensembles_seed{seed};
    auto points = rmt::sensing::roc(sc, det, grid, trials);
    auto* t = make_table({"pfa", "pd", "pfa_se", "pd_se", "trials"});
    for (const auto& p : points)
      t->rows.push_back({num(p.pfa), num(p.pd), num(p.pfa_se), num(p.pd_se),
                         num(p.trials)});
    return t;
  });
}

int rmtk_mu_sinr(const char* receiver, double c, const char* snr_db,
                 int N, int trials, uint64_t seed, rmtk_table** out) {
  return guarded(out, [&]() {
    namespace mu = rmt::multiuser;
    std::string r = lower(receiver);
    mu::Receiver kind;
    if (r == "mrc")
      kind = mu::Receiver::MRC;
    else if (r == "zf")
      kind = mu::Receiver::ZF;
    else if (r == "mmse")
      kind = mu::Receiver::MMSE;
    else
      throw UsageError("unknown receiver: " + r);
    auto snrs = parse_list(snr_db, "snr list");
    rmt::require(!snrs.empty(), "need at least one snr value");
    rmt::require(N > 0 && trials >= 0, "need N > 0 and trials >= 0");
    const int K = int(std::lround(c * N));
    rmt::require(K >= 1, "c*N must round to at least one user");
    auto* t = make_table({"receiver", "c", "snr_db", "limit_sinr", "mc_mean",
                          "mc_se", "N", "trials"});
    for (double snr : snrs) {
      const double p = 1.0, s2 = p / std::pow(10.0, snr / 10.0);
      mu::SystemProfile prof;
      prof.c = c;
      prof.noise_power = s2;
      double limit = kind == mu::Receiver::MRC ? mu::limit_sinr_mrc(p, prof)
                     : kind == mu::Receiver::ZF
                         ? mu::limit_sinr_zf(p, c, s2)
                         : mu::limit_sinr_mmse(p, prof);
      double mean = std::nan(""), se = std::nan("");
      if (trials > 0) {
        const rmt::VectorXd powers = rmt::VectorXd::Ones(K);
        std::vector<double> draw_means(trials, 0.0);
        for (int tr = 0; tr < trials; ++tr) {
          auto sub = rmt::substream(seed, uint64_t(tr));
          rmt::MatrixXcd h =
              rmt::ensembles::gen_iid_complex(N, K, ensembles_seed{sub}) /
              std::sqrt(double(N));
          if (kind == mu::Receiver::MMSE) {
            draw_means[tr] = mu::mmse_sinr_all(h, powers, s2).mean();
          } else {
            rmt::MatrixXcd w = mu::build_receiver(kind, h, powers, s2);
            double acc = 0;
            for (int k = 0; k < K; ++k)
              acc += mu::output_sinr(w, h, powers, s2, k) / K;
            draw_means[tr] = acc;
          }
        }
        mean = 0;
        for (double v : draw_means) mean += v / trials;
        double var = 0;
        for (double v : draw_means) var += (v - mean) * (v - mean);
        se = trials > 1 ? std::sqrt(var / (trials - 1) / trials) : 0.0;
      }
      t->rows.push_back({label(r), num(c), num(snr), num(limit), num(mean),
                         num(se), num(N), num(trials)});
    }
    return t;
  });
}

int rmtk_bigdfe(double snr_db, const char* rho, int N, int symbols,
                uint64_t seed, rmtk_table** out) {
  return guarded(out, [&]() {
    namespace mu = rmt::multiuser;
    const double p = 1.0, s2 = p / std::pow(10.0, snr_db / 10.0);
    auto ramp = parse_list(rho, "rho schedule");
    if (ramp.empty()) {
      ramp = {0.0};
      for (int l = 0; l < 3; ++l) {
        double g = mu::bigdfe_limit_sinr(p, s2, 1.0, {ramp.back()}).back();
        ramp.push_back(1.0 - std::erfc(std::sqrt(g / 2.0)));
      }
    }
    auto lim = mu::bigdfe_limit_sinr(p, s2, 1.0, ramp);
    std::vector<double> sim(ramp.size(), std::nan(""));
    if (symbols > 0) {
      rmt::require(N > 0, "need N > 0");
      rmt::MatrixXcd h =
          rmt::ensembles::gen_iid_complex(N, N, ensembles_seed{seed}) /
          std::sqrt(double(N));
      auto s = mu::bigdfe_simulate(h, p, s2, ramp, symbols,
                                   ensembles_seed{seed});
      sim.assign(s.begin(), s.end());
    }
    auto* t = make_table({"iteration", "rho", "limit_sinr", "sim_sinr"});
    for (size_t l = 0; l < ramp.size(); ++l)
      t->rows.push_back({num(double(l)), num(ramp[l]), num(lim[l]),
                         num(sim[l])});
    return t;
  });
}

int rmtk_massive_sinr(double xi, double omega, double epsilon, double c,
                      double sigma_u2, const char* betas, double tau2,
                      rmtk_table** out) {
  return guarded(out, [&]() {
    namespace ms = rmt::massive;
    ms::MassiveProfile prof;
    prof.xi = xi;
    prof.omega = omega;
    prof.epsilon = epsilon;
    prof.c = c;
    prof.sigma_u2 = sigma_u2;
    auto bs = parse_list(betas, "beta list");
    if (!bs.empty()) prof.beta_samples = bs;
    if (tau2 < 0) tau2 = ms::state_evolution(prof).fixed_point;
    double gamma = ms::mmse_gamma(prof, tau2);
    auto* t = make_table({"beta", "tau2", "v", "dv", "gamma", "sinr_mrc",
                          "sinr_mmse"});
    for (double b : prof.beta_samples) {
      auto st = ms::channel_estimate_stats(b, tau2);
      t->rows.push_back({num(b), num(tau2), num(st.v), num(st.dv), num(gamma),
                         num(ms::limit_sinr_massive_mrc(b, prof, tau2)),
                         num(ms::limit_sinr_massive_mmse(b, prof, tau2))});
    }
    return t;
  });
}

int rmtk_nn_qstar(const char* activation, double alpha, double sigma_w2,
                  double sigma_b2, double q0, int layers, rmtk_table** out) {
  return guarded(out, [&]() {
    rmt::nn::NetConfig cfg;
    cfg.activation = parse_activation(activation, alpha);
    cfg.sigma_w2 = sigma_w2;
    cfg.sigma_b2 = sigma_b2;
    rmt::require(layers >= 1, "need layers >= 1");
    double qs = rmt::nn::q_star(cfg);
    auto path = rmt::nn::propagate_q(cfg, q0, layers);
    auto* t = make_table({"layer", "q", "q_star"});
    t->rows.push_back({num(0), num(q0), num(qs)});
    for (size_t i = 0; i < path.size(); ++i)
      t->rows.push_back({num(double(i + 1)), num(path[i]), num(qs)});
    return t;
  });
}

int rmtk_nn_jacobian(const char* ensemble, const char* activation,
                     double alpha, const char* depths, int N, double sigma_w2,
                     double sigma_b2, const char* mode, uint64_t seed,
                     rmtk_table** out) {
  return guarded(out, [&]() {
    rmt::nn::NetConfig base;
    base.activation = parse_activation(activation, alpha);
    base.sigma_w2 = sigma_w2;
    base.sigma_b2 = sigma_b2;
    base.N = N;
    std::string e = lower(ensemble);
    if (e == "gaussian")
      base.ensemble = rmt::nn::WeightEnsemble::Gaussian;
    else if (e == "orthogonal")
      base.ensemble = rmt::nn::WeightEnsemble::Orthogonal;
    else
      throw UsageError("unknown weight ensemble: " + e);
    std::string m = lower(mode);
    if (m.empty()) m = "limit";
    if (m != "limit" && m != "sample")
      throw UsageError("unknown mode: " + m);
    auto ls = parse_list(depths, "depth list");
    rmt::require(!ls.empty(), "need at least one depth");
    auto* t = make_table({"L", "lambda_max", "variance", "ensemble",
                          "activation"});
    std::string act = lower(activation);
    for (double ld : ls) {
      int L = int(std::lround(ld));
      rmt::require(L >= 1 && std::abs(ld - L) < 1e-9,
                   "depths must be positive integers");
      rmt::nn::NetConfig cfg = base;
      cfg.L = L;
      double lmax, var;
      if (m == "limit") {
        auto th = rmt::nn::jacobian_theory(cfg);
        lmax = th.lambda_max;
        var = th.variance;
      } else {
        auto s = rmt::nn::jacobian_empirical(
            cfg, ensembles_seed{rmt::substream(seed, uint64_t(L))});
        lmax = *std::max_element(s.eigenvalues.begin(), s.eigenvalues.end());
        double mean = 0;
        for (double v : s.eigenvalues) mean += v / s.eigenvalues.size();
        var = 0;
        for (double v : s.eigenvalues)
          var += (v - mean) * (v - mean) / s.eigenvalues.size();
      }
      t->rows.push_back({num(L), num(lmax), num(var), label(e), label(act)});
    }
    return t;
  });
}

int rmtk_nn_hessian(double epsilon, double c, double sigma, int refined,
                    double x0, double x1, int points, rmtk_table** out) {
  return guarded(out, [&]() {
    rmt::nn::HessianModelParams p{epsilon, c, sigma};
    auto xs = uniform_grid(x0, x1, points);
    auto d = rmt::nn::hessian_density(p, xs, refined != 0);
    auto* t = make_table({"x", "density"});
    for (size_t i = 0; i < xs.size(); ++i)
      t->rows.push_back({num(xs[i]), num(d[i])});
    return t;
  });
}

int rmtk_nn_datacov(double eta, double zeta, double xi, double psi, double x0,
                    double x1, int points, rmtk_table** out) {
  return guarded(out, [&]() {
    auto xs = uniform_grid(x0, x1, points);
    auto* t = make_table({"x", "density"});
    for (double x : xs) {
      rmt::cplx m =
          rmt::nn::datacov_stieltjes(rmt::cplx(x, 1e-6), eta, zeta, xi, psi);
      t->rows.push_back({num(x), num(std::max(0.0, m.imag() / M_PI))});
    }
    return t;
  });
}

int rmtk_nn_datacov_esd(const char* activation, double alpha, int L, int n0,
                        int n1, int m, double sigma_w2, double sigma_x2,
                        uint64_t seed, rmtk_table** out) {
  return guarded(out, [&]() {
    auto act = parse_activation(activation, alpha);
    auto s = rmt::nn::datacov_empirical(act, L, n0, n1, m, sigma_w2, sigma_x2,
                                        ensembles_seed{seed});
    auto* t = make_table({"index", "eigenvalue"});
    for (size_t i = 0; i < s.eigenvalues.size(); ++i)
      t->rows.push_back({num(double(i)), num(s.eigenvalues[i])});
    return t;
  });
}

int rmtk_selftest(void (*line)(const char* text, void* ctx), void* ctx) {
  int failed = 0;
  auto results = rmt::accept::run_all([&](const rmt::accept::Criterion& c) {
    if (!c.pass) ++failed;
    if (line) {
      char buf[768];
      std::snprintf(buf, sizeof buf, "[%2d] %s  %s — %s (%.1fs)", c.id,
                    c.pass ? "PASS" : "FAIL", c.title.c_str(),
                    c.detail.c_str(), c.seconds);
      line(buf, ctx);
    }
  });
  if (line) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%zu criteria: %zu passed, %d failed",
                  results.size(), results.size() - size_t(failed), failed);
    line(buf, ctx);
  }
  return failed;
}
