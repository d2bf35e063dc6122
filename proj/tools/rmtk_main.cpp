// Command-line front end for the rmtk shared library.  Only the C API is
// used; all numerics live behind it.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rmtk.h"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNumeric = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRange = 3;
constexpr int kExitIo = 4;

struct TableDeleter {
  void operator()(rmtk_table* t) const { rmtk_table_free(t); }
};
using TablePtr = std::unique_ptr<rmtk_table, TableDeleter>;

// An owned row-major table built on the CLI side (histograms, figure
// presets); mirrors the C API table for writing purposes.
struct OwnedTable {
  std::vector<std::string> names;
  struct Cell {
    std::string text;
    double value = 0.0;
    bool numeric = false;
  };
  std::vector<std::vector<Cell>> rows;

  static Cell num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return Cell{buf, v, true};
  }
  static Cell label(std::string s) { return Cell{std::move(s), 0.0, false}; }
};

OwnedTable own(const rmtk_table* t) {
  OwnedTable o;
  for (int c = 0; c < rmtk_table_ncols(t); ++c)
    o.names.push_back(rmtk_table_col_name(t, c));
  for (int64_t r = 0; r < rmtk_table_nrows(t); ++r) {
    std::vector<OwnedTable::Cell> row;
    for (int c = 0; c < rmtk_table_ncols(t); ++c) {
      int is_num = 0;
      double v = rmtk_table_value(t, r, c, &is_num);
      row.push_back({rmtk_table_cell(t, r, c), v, is_num != 0});
    }
    o.rows.push_back(std::move(row));
  }
  return o;
}

void write_csv(std::ostream& os, const OwnedTable& t) {
  for (size_t c = 0; c < t.names.size(); ++c)
    os << (c ? "," : "") << t.names[c];
  os << "\n";
  for (const auto& row : t.rows) {
    for (size_t c = 0; c < row.size(); ++c)
      os << (c ? "," : "") << row[c].text;
    os << "\n";
  }
}

void write_json(std::ostream& os, const OwnedTable& t) {
  json arr = json::array();
  for (const auto& row : t.rows) {
    json rec = json::object();
    for (size_t c = 0; c < row.size(); ++c) {
      if (row[c].numeric)
        rec[t.names[c]] = row[c].value;
      else
        rec[t.names[c]] = row[c].text;
    }
    arr.push_back(std::move(rec));
  }
  os << arr.dump(2) << "\n";
}

struct Grid {
  double x0 = 0, x1 = 1;
  int points = 2;
};

Grid parse_grid(const std::string& s) {
  Grid g;
  char colon1 = 0, colon2 = 0;
  std::istringstream ss(s);
  if (!(ss >> g.x0 >> colon1 >> g.x1 >> colon2 >> g.points) || colon1 != ':' ||
      colon2 != ':' || !ss.eof())
    throw CLI::ValidationError("--grid", "expected x0:x1:points, got " + s);
  return g;
}

// Flags mirrored into / out of JSON configs and manifests.
struct Ctx {
  json cfg;                          // config values (lowest precedence)
  std::map<std::string, json> used;  // effective values, for the manifest
  CLI::App* sub = nullptr;

  template <typename T>
  void bind(CLI::Option* opt, const std::string& key, T& var) {
    if (cfg.contains(key)) {
      try {
        var = cfg.at(key).get<T>();
      } catch (const json::exception&) {
        throw CLI::ValidationError("--config",
                                   "bad value for key '" + key + "'");
      }
      (void)opt;
    }
  }
  template <typename T>
  void record(const std::string& key, const T& var) {
    used[key] = var;
  }
};

int fail(int rc) {
  std::cerr << "error: " << rmtk_last_error() << "\n";
  return rc;
}

// Density-normalized histogram of a numeric table column.
struct Histogram {
  std::vector<double> centers, widths, density;
};

Histogram histogram(const rmtk_table* t, int col, int bins) {
  std::vector<double> xs;
  for (int64_t r = 0; r < rmtk_table_nrows(t); ++r) {
    int ok = 0;
    double v = rmtk_table_value(t, r, col, &ok);
    if (ok) xs.push_back(v);
  }
  double lo = xs[0], hi = xs[0];
  for (double v : xs) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi <= lo) hi = lo + 1e-12;
  const double w = (hi - lo) / bins;
  Histogram h;
  std::vector<int> counts(bins, 0);
  for (double v : xs) {
    int b = std::min(bins - 1, int((v - lo) / w));
    counts[b]++;
  }
  for (int b = 0; b < bins; ++b) {
    h.centers.push_back(lo + (b + 0.5) * w);
    h.widths.push_back(w);
    h.density.push_back(counts[b] / (w * double(xs.size())));
  }
  return h;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* th = std::getenv("RMTK_THREADS")) {
    int n = std::atoi(th);
    if (n > 0) rmtk_set_threads(n);
  }

  // The config file must be read before option defaults are bound, so scan
  // for it up front; CLI11 still validates the flag itself during parse.
  Ctx ctx;
  std::string config_path;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "error: cannot read config " << config_path << "\n";
      return kExitIo;
    }
    try {
      in >> ctx.cfg;
    } catch (const json::exception& e) {
      std::cerr << "error: bad config JSON: " << e.what() << "\n";
      return kExitIo;
    }
    // A run manifest is accepted directly: its parameters live under
    // "params".
    if (ctx.cfg.is_object() && ctx.cfg.contains("params") &&
        ctx.cfg["params"].is_object())
      ctx.cfg = ctx.cfg["params"];
    if (!ctx.cfg.is_object()) {
      std::cerr << "error: config must be a JSON object\n";
      return kExitIo;
    }
  }

  CLI::App app{"Random-matrix spectral statistics toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(rmtk_version()));

  uint64_t seed = 42;
  std::string out_path;
  int trials = -1;  // -1: per-subcommand default
  double tol = 1e-6;
  std::string format = "csv";
  std::string config_opt;
  ctx.bind(nullptr, "seed", seed);
  ctx.bind(nullptr, "out", out_path);
  ctx.bind(nullptr, "trials", trials);
  ctx.bind(nullptr, "tol", tol);
  ctx.bind(nullptr, "format", format);
  app.add_option("--seed", seed, "RNG seed")->capture_default_str();
  app.add_option("--out", out_path, "output file (default: stdout)");
  app.add_option("--trials", trials, "Monte Carlo trials");
  app.add_option("--tol", tol, "numeric tolerance")->capture_default_str();
  app.add_option("--format", format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app.add_option("--config", config_opt, "JSON config or run manifest");
  app.fallthrough();

  // ---- subcommand state ----
  std::string kind = "wigner", field = "complex", spikes;
  int N = 1000, n = 2000;
  double sigma = 1.0;
  std::string law = "mp", grid_s = "0:3:600";
  double c = 0.5;
  int order = 2, K = 1, symbols = 500, layers = 10, L = 1;
  double p = 0.95, pfa = 0.1, snr_db = 10.0, snr0 = 10.0;
  std::string alphas, detector = "ed", method = "analytic", pfa_grid;
  std::string receiver = "mmse", snr_list = "10", rho_list;
  double xi = 10, omega = 1, epsilon = 0.5, sigma_u2 = 1, tau2 = -1;
  std::string betas = "1";
  double alpha = 1, sigma_w2 = 1, sigma_b2 = 0, q0 = 0.5;
  std::string activation = "linear", ensemble = "gaussian", mode = "limit";
  std::string depths = "1,2,4,8";
  double hess_eps = 1, hess_c = 0.5, hess_sigma = 1;
  bool refined = false, sample = false;
  double eta = 1, zeta = 0, dxi = 0.5, psi = 1, sigma_x2 = 1;
  int n0 = 1000, n1 = 1000, m = 2000, fig_no = 0;

  auto bindopt = [&ctx](CLI::App* sub, const std::string& flag, auto& var,
                        const std::string& help) {
    ctx.bind(nullptr, flag, var);
    return sub->add_option("--" + flag, var, help)->capture_default_str();
  };

  CLI::App* s_esd = app.add_subcommand("ensemble-esd",
                                       "Sampled eigenvalues of an ensemble");
  bindopt(s_esd, "kind", kind, "wigner | wishart | spiked");
  bindopt(s_esd, "N", N, "matrix dimension");
  bindopt(s_esd, "n", n, "sample count (Wishart-type)");
  bindopt(s_esd, "sigma", sigma, "entry scale");
  bindopt(s_esd, "spikes", spikes, "comma list of population spikes");
  bindopt(s_esd, "field", field, "real | complex");

  CLI::App* s_law = app.add_subcommand("law-pdf", "Limiting density on a grid");
  bindopt(s_law, "law", law, "semicircle | mp");
  bindopt(s_law, "c", c, "dimension-to-sample ratio");
  bindopt(s_law, "sigma", sigma, "scale");
  bindopt(s_law, "grid", grid_s, "x0:x1:points");

  CLI::App* s_twt = app.add_subcommand("tw-table", "Tracy-Widom cdf table");
  std::string tw_grid = "-5:2:351";
  bindopt(s_twt, "grid", tw_grid, "t0:t1:points");

  CLI::App* s_twq = app.add_subcommand("tw-quantile", "Tracy-Widom quantile");
  bindopt(s_twq, "order", order, "1 | 2");
  bindopt(s_twq, "p", p, "probability");

  CLI::App* s_spk = app.add_subcommand("spiked-predict",
                                       "Spiked-model phase classification");
  bindopt(s_spk, "alphas", alphas, "comma list of population spikes");
  bindopt(s_spk, "c", c, "dimension-to-sample ratio");
  bindopt(s_spk, "N", N, "dimension (index bookkeeping)");

  CLI::App* s_thr = app.add_subcommand("sense-threshold",
                                       "Detector decision threshold");
  bindopt(s_thr, "detector", detector, "ed|med|cnd|eme|agm|msee");
  bindopt(s_thr, "N", N, "antennas");
  bindopt(s_thr, "n", n, "samples");
  bindopt(s_thr, "pfa", pfa, "target false-alarm rate");
  bindopt(s_thr, "method", method, "analytic | mc");

  CLI::App* s_roc = app.add_subcommand("sense-roc",
                                       "Empirical detector operating curve");
  bindopt(s_roc, "detector", detector, "ed|med|cnd|eme|agm|msee");
  bindopt(s_roc, "N", N, "antennas");
  bindopt(s_roc, "n", n, "samples");
  bindopt(s_roc, "K", K, "active primary users");
  bindopt(s_roc, "snr", snr_db, "received SNR in dB");
  bindopt(s_roc, "pfa-grid", pfa_grid, "comma list of false-alarm targets");

  CLI::App* s_mu = app.add_subcommand("mu-sinr",
                                      "Multiuser receiver SINR vs limit");
  bindopt(s_mu, "receiver", receiver, "mrc | zf | mmse");
  bindopt(s_mu, "c", c, "users per dimension");
  bindopt(s_mu, "snr", snr_list, "comma list of SNRs in dB");
  bindopt(s_mu, "N", N, "processing gain");

  CLI::App* s_dfe = app.add_subcommand("bigdfe",
                                       "Iterative decision-feedback SINR");
  bindopt(s_dfe, "snr", snr0, "SNR in dB");
  bindopt(s_dfe, "rho", rho_list,
          "comma list of decision correlations (default: self-consistent)");
  bindopt(s_dfe, "N", N, "users = dimensions");
  bindopt(s_dfe, "symbols", symbols, "simulated symbols (0: theory only)");

  CLI::App* s_mass = app.add_subcommand("massive-sinr",
                                        "Grant-free uplink limits");
  bindopt(s_mass, "xi", xi, "antennas per device");
  bindopt(s_mass, "omega", omega, "pilot-length ratio");
  bindopt(s_mass, "epsilon", epsilon, "activity probability");
  bindopt(s_mass, "c", c, "devices per antenna");
  bindopt(s_mass, "sigma-u2", sigma_u2, "noise power");
  bindopt(s_mass, "betas", betas, "comma list of path losses");
  bindopt(s_mass, "tau2", tau2, "error variance (<0: from state evolution)");

  CLI::App* s_q = app.add_subcommand("nn-qstar",
                                     "Length-map fixed point and trajectory");
  bindopt(s_q, "activation", activation, "linear|relu|hard-tanh|tanh|falpha");
  bindopt(s_q, "alpha", alpha, "leaky slope for falpha");
  bindopt(s_q, "sigma-w2", sigma_w2, "weight variance");
  bindopt(s_q, "sigma-b2", sigma_b2, "bias variance");
  bindopt(s_q, "q0", q0, "input length");
  bindopt(s_q, "layers", layers, "depth");

  CLI::App* s_jac = app.add_subcommand("nn-jacobian",
                                       "Jacobian spectrum depth sweep");
  bindopt(s_jac, "ensemble", ensemble, "gaussian | orthogonal");
  bindopt(s_jac, "activation", activation, "linear|relu|hard-tanh|falpha");
  bindopt(s_jac, "alpha", alpha, "leaky slope for falpha");
  bindopt(s_jac, "depths", depths, "comma list of depths");
  bindopt(s_jac, "N", N, "width");
  bindopt(s_jac, "sigma-w2", sigma_w2, "weight variance");
  bindopt(s_jac, "sigma-b2", sigma_b2, "bias variance");
  bindopt(s_jac, "mode", mode, "limit | sample");

  CLI::App* s_hess = app.add_subcommand("nn-hessian",
                                        "Loss-curvature model density");
  bindopt(s_hess, "epsilon", hess_eps, "error energy");
  bindopt(s_hess, "c", hess_c, "parameters per sample");
  bindopt(s_hess, "sigma", hess_sigma, "refined-model scale");
  std::string hess_grid = "-3:5:800";
  bindopt(s_hess, "grid", hess_grid, "x0:x1:points");
  ctx.bind(nullptr, "refined", refined);
  s_hess->add_flag("--refined", refined, "one-point refinement of the model");

  CLI::App* s_dc = app.add_subcommand("nn-datacov",
                                      "Output-covariance density or sample");
  std::string dc_grid = "0:5:600";
  bindopt(s_dc, "eta", eta, "second activation moment");
  bindopt(s_dc, "zeta", zeta, "squared first Gaussian moment");
  bindopt(s_dc, "xi", dxi, "n0 / m");
  bindopt(s_dc, "psi", psi, "n0 / n1");
  bindopt(s_dc, "grid", dc_grid, "x0:x1:points");
  ctx.bind(nullptr, "sample", sample);
  s_dc->add_flag("--sample", sample, "draw a finite multi-layer sample");
  bindopt(s_dc, "activation", activation, "sample: activation");
  bindopt(s_dc, "alpha", alpha, "sample: leaky slope for falpha");
  bindopt(s_dc, "L", L, "sample: layers");
  bindopt(s_dc, "n0", n0, "sample: input dimension");
  bindopt(s_dc, "n1", n1, "sample: layer width");
  bindopt(s_dc, "m", m, "sample: data points");
  bindopt(s_dc, "sigma-w2", sigma_w2, "sample: weight variance");
  bindopt(s_dc, "sigma-x2", sigma_x2, "sample: input variance");

  CLI::App* s_fig = app.add_subcommand("fig", "Figure data presets");
  s_fig->add_option("number", fig_no, "1|2|3|5|6|7|8|9")->required();

  CLI::App* s_self = app.add_subcommand("selftest",
                                        "Run the full acceptance suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (s_self->parsed()) {
    int failed = rmtk_selftest(
        [](const char* text, void*) { std::puts(text); }, nullptr);
    return failed == 0 ? kExitOk : kExitNumeric;
  }

  const auto t_start = std::chrono::steady_clock::now();
  OwnedTable result;
  rmtk_table* raw = nullptr;
  int rc = RMTK_OK;
  std::string subname;

  auto rec_globals = [&]() {
    ctx.record("seed", seed);
    if (!out_path.empty()) ctx.record("out", out_path);
    if (trials >= 0) ctx.record("trials", trials);
    ctx.record("tol", tol);
    ctx.record("format", format);
  };

  try {
    if (s_esd->parsed()) {
      subname = "ensemble-esd";
      ctx.record("kind", kind);
      ctx.record("N", N);
      ctx.record("n", n);
      ctx.record("sigma", sigma);
      ctx.record("spikes", spikes);
      ctx.record("field", field);
      rc = rmtk_ensemble_esd(kind.c_str(), N, n, sigma, spikes.c_str(),
                             field.c_str(), seed, &raw);
    } else if (s_law->parsed()) {
      subname = "law-pdf";
      Grid g = parse_grid(grid_s);
      ctx.record("law", law);
      ctx.record("c", c);
      ctx.record("sigma", sigma);
      ctx.record("grid", grid_s);
      rc = rmtk_law_pdf(law.c_str(), c, sigma, g.x0, g.x1, g.points, &raw);
    } else if (s_twt->parsed()) {
      subname = "tw-table";
      Grid g = parse_grid(tw_grid);
      ctx.record("grid", tw_grid);
      rc = rmtk_tw_table(g.x0, g.x1, g.points, &raw);
    } else if (s_twq->parsed()) {
      subname = "tw-quantile";
      ctx.record("order", order);
      ctx.record("p", p);
      rc = rmtk_tw_quantile(order, p, &raw);
    } else if (s_spk->parsed()) {
      subname = "spiked-predict";
      ctx.record("alphas", alphas);
      ctx.record("c", c);
      ctx.record("N", N);
      rc = rmtk_spiked_predict(alphas.c_str(), c, N, &raw);
    } else if (s_thr->parsed()) {
      subname = "sense-threshold";
      int tr = trials >= 0 ? trials : 10000;
      ctx.record("detector", detector);
      ctx.record("N", N);
      ctx.record("n", n);
      ctx.record("pfa", pfa);
      ctx.record("method", method);
      ctx.record("trials", tr);
      rc = rmtk_sense_threshold(detector.c_str(), N, n, pfa, method.c_str(),
                                tr, seed, &raw);
    } else if (s_roc->parsed()) {
      subname = "sense-roc";
      int tr = trials >= 0 ? trials : 1000;
      ctx.record("detector", detector);
      ctx.record("N", N);
      ctx.record("n", n);
      ctx.record("K", K);
      ctx.record("snr", snr_db);
      ctx.record("pfa-grid", pfa_grid);
      ctx.record("trials", tr);
      rc = rmtk_sense_roc(detector.c_str(), N, n, K, snr_db, pfa_grid.c_str(),
                          tr, seed, &raw);
    } else if (s_mu->parsed()) {
      subname = "mu-sinr";
      int tr = trials >= 0 ? trials : 100;
      ctx.record("receiver", receiver);
      ctx.record("c", c);
      ctx.record("snr", snr_list);
      ctx.record("N", N);
      ctx.record("trials", tr);
      rc = rmtk_mu_sinr(receiver.c_str(), c, snr_list.c_str(), N, tr, seed,
                        &raw);
    } else if (s_dfe->parsed()) {
      subname = "bigdfe";
      ctx.record("snr", snr0);
      ctx.record("rho", rho_list);
      ctx.record("N", N);
      ctx.record("symbols", symbols);
      rc = rmtk_bigdfe(snr0, rho_list.c_str(), N, symbols, seed, &raw);
    } else if (s_mass->parsed()) {
      subname = "massive-sinr";
      ctx.record("xi", xi);
      ctx.record("omega", omega);
      ctx.record("epsilon", epsilon);
      ctx.record("c", c);
      ctx.record("sigma-u2", sigma_u2);
      ctx.record("betas", betas);
      ctx.record("tau2", tau2);
      rc = rmtk_massive_sinr(xi, omega, epsilon, c, sigma_u2, betas.c_str(),
                             tau2, &raw);
    } else if (s_q->parsed()) {
      subname = "nn-qstar";
      ctx.record("activation", activation);
      ctx.record("alpha", alpha);
      ctx.record("sigma-w2", sigma_w2);
      ctx.record("sigma-b2", sigma_b2);
      ctx.record("q0", q0);
      ctx.record("layers", layers);
      rc = rmtk_nn_qstar(activation.c_str(), alpha, sigma_w2, sigma_b2, q0,
                         layers, &raw);
    } else if (s_jac->parsed()) {
      subname = "nn-jacobian";
      ctx.record("ensemble", ensemble);
      ctx.record("activation", activation);
      ctx.record("alpha", alpha);
      ctx.record("depths", depths);
      ctx.record("N", N);
      ctx.record("sigma-w2", sigma_w2);
      ctx.record("sigma-b2", sigma_b2);
      ctx.record("mode", mode);
      rc = rmtk_nn_jacobian(ensemble.c_str(), activation.c_str(), alpha,
                            depths.c_str(), N, sigma_w2, sigma_b2,
                            mode.c_str(), seed, &raw);
    } else if (s_hess->parsed()) {
      subname = "nn-hessian";
      Grid g = parse_grid(hess_grid);
      ctx.record("epsilon", hess_eps);
      ctx.record("c", hess_c);
      ctx.record("sigma", hess_sigma);
      ctx.record("grid", hess_grid);
      ctx.record("refined", refined);
      rc = rmtk_nn_hessian(hess_eps, hess_c, hess_sigma, refined ? 1 : 0,
                           g.x0, g.x1, g.points, &raw);
    } else if (s_dc->parsed()) {
      subname = "nn-datacov";
      ctx.record("sample", sample);
      if (sample) {
        ctx.record("activation", activation);
        ctx.record("alpha", alpha);
        ctx.record("L", L);
        ctx.record("n0", n0);
        ctx.record("n1", n1);
        ctx.record("m", m);
        ctx.record("sigma-w2", sigma_w2);
        ctx.record("sigma-x2", sigma_x2);
        rc = rmtk_nn_datacov_esd(activation.c_str(), alpha, L, n0, n1, m,
                                 sigma_w2, sigma_x2, seed, &raw);
      } else {
        Grid g = parse_grid(dc_grid);
        ctx.record("eta", eta);
        ctx.record("zeta", zeta);
        ctx.record("xi", dxi);
        ctx.record("psi", psi);
        ctx.record("grid", dc_grid);
        rc = rmtk_nn_datacov(eta, zeta, dxi, psi, g.x0, g.x1, g.points, &raw);
      }
    } else if (s_fig->parsed()) {
      subname = "fig";
      ctx.record("figure", fig_no);
      auto hist_overlay = [&](rmtk_table* esd, const char* law_name,
                              double law_c, int bins,
                              OwnedTable& t, double lead = std::nan(""),
                              const char* lead_name = nullptr) {
        Histogram h = histogram(esd, 1, bins);
        rmtk_table* pdf = nullptr;
        int r = rmtk_law_pdf(law_name, law_c, 1.0, h.centers.front(),
                             h.centers.back(), bins, &pdf);
        if (r != RMTK_OK) throw r;
        if (t.names.empty()) {
          if (lead_name) t.names.push_back(lead_name);
          t.names.insert(t.names.end(), {"bin_center", "bin_width",
                                         "empirical_density",
                                         "limit_density"});
        }
        for (int b = 0; b < bins; ++b) {
          std::vector<OwnedTable::Cell> row;
          if (lead_name) row.push_back(OwnedTable::num(lead));
          row.push_back(OwnedTable::num(h.centers[b]));
          row.push_back(OwnedTable::num(h.widths[b]));
          row.push_back(OwnedTable::num(h.density[b]));
          row.push_back(OwnedTable::num(rmtk_table_value(pdf, b, 1, nullptr)));
          t.rows.push_back(std::move(row));
        }
        rmtk_table_free(pdf);
      };
      switch (fig_no) {
        case 1: {  // semicircle at large dimension
          rc = rmtk_ensemble_esd("wigner", 10000, 0, 1.0, "", "real", seed,
                                 &raw);
          if (rc != RMTK_OK) break;
          hist_overlay(raw, "semicircle", 0, 80, result);
          rmtk_table_free(raw);
          raw = nullptr;
          break;
        }
        case 2: {  // MP law at c = 0.5
          rc = rmtk_ensemble_esd("wishart", 1000, 2000, 1.0, "", "real", seed,
                                 &raw);
          if (rc != RMTK_OK) break;
          hist_overlay(raw, "mp", 0.5, 60, result);
          rmtk_table_free(raw);
          raw = nullptr;
          break;
        }
        case 3: {  // MP law across aspect ratios
          for (double cc : {0.1, 0.5, 1.0}) {
            rc = rmtk_ensemble_esd("wishart", 1000,
                                   int(std::lround(1000 / cc)), 1.0, "",
                                   "real", seed, &raw);
            if (rc != RMTK_OK) break;
            hist_overlay(raw, "mp", cc, 60, result, cc, "c");
            rmtk_table_free(raw);
            raw = nullptr;
          }
          break;
        }
        case 5:    // Gaussian-weight depth sweep
        case 6: {  // orthogonal-weight depth sweep at criticality
          const char* ens = fig_no == 5 ? "gaussian" : "orthogonal";
          const char* act = fig_no == 5 ? "relu" : "hard-tanh";
          double w2, b2;
          if (fig_no == 5) {
            w2 = 2.0;  // ReLU criticality: sigma_w^2 * p = 1 with p = 1/2
            b2 = 0.0;
          } else {
            // hard-tanh at unit length: sigma_w^2 = 1/p(1),
            // sigma_b^2 = 1 - sigma_w^2 E[phi(h)^2]
            const double q = 1.0, a = 1.0 / std::sqrt(2.0 * q);
            const double pq = std::erf(a);
            const double ephi2 = q * std::erf(a) -
                                 std::sqrt(2.0 * q / M_PI) *
                                     std::exp(-1.0 / (2.0 * q)) +
                                 1.0 - std::erf(a);
            w2 = 1.0 / pq;
            b2 = q - w2 * ephi2;
          }
          for (const char* md : {"limit", "sample"}) {
            rc = rmtk_nn_jacobian(ens, act, 1.0, "2,4,8,16", 1000, w2, b2,
                                  md, seed, &raw);
            if (rc != RMTK_OK) break;
            OwnedTable t = own(raw);
            rmtk_table_free(raw);
            raw = nullptr;
            if (result.names.empty()) result.names = t.names;
            for (auto& row : t.rows) {
              if (std::string(md) == "limit")
                row[4] = OwnedTable::label(row[4].text + "-limit");
              result.rows.push_back(std::move(row));
            }
          }
          break;
        }
        case 7: {  // curvature densities over error energy and load
          const double combos[][2] = {{1.0, 2.0 / 3.0},
                                      {0.1, 0.5},
                                      {1e-3, 1.0 / 3.0}};
          result.names = {"epsilon", "c", "x", "density"};
          for (auto& ec : combos) {
            rc = rmtk_nn_hessian(ec[0], ec[1], 1.0, 0, -3.0, 6.0, 451, &raw);
            if (rc != RMTK_OK) break;
            for (int64_t r = 0; r < rmtk_table_nrows(raw); ++r)
              result.rows.push_back(
                  {OwnedTable::num(ec[0]), OwnedTable::num(ec[1]),
                   OwnedTable::num(rmtk_table_value(raw, r, 0, nullptr)),
                   OwnedTable::num(rmtk_table_value(raw, r, 1, nullptr))});
            rmtk_table_free(raw);
            raw = nullptr;
          }
          break;
        }
        case 8:    // single-layer output covariance across slopes
        case 9: {  // ten-layer output covariance: saturating vs linear
          result.names = {"tag", "bin_center", "bin_width",
                          "empirical_density"};
          auto add = [&](const char* act, double al, int layers_,
                         const std::string& tag) {
            rc = rmtk_nn_datacov_esd(act, al, layers_, 500, 500, 1000, 1.0,
                                     1.0, seed, &raw);
            if (rc != RMTK_OK) return;
            Histogram h = histogram(raw, 1, 60);
            for (size_t b = 0; b < h.centers.size(); ++b)
              result.rows.push_back({OwnedTable::label(tag),
                                     OwnedTable::num(h.centers[b]),
                                     OwnedTable::num(h.widths[b]),
                                     OwnedTable::num(h.density[b])});
            rmtk_table_free(raw);
            raw = nullptr;
          };
          if (fig_no == 8) {
            for (double al : {-1.0, 0.0, 1.0}) {
              char tag[32];
              std::snprintf(tag, sizeof tag, "alpha=%g", al);
              add("falpha", al, 1, tag);
              if (rc != RMTK_OK) break;
            }
          } else {
            add("falpha", 1.0, 10, "f1-10-layers");
            if (rc == RMTK_OK) add("linear", 0.0, 10, "linear-10-layers");
          }
          break;
        }
        default:
          std::cerr << "error: unknown figure " << fig_no
                    << " (expected 1|2|3|5|6|7|8|9)\n";
          return kExitUsage;
      }
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (int thrown_rc) {
    return fail(thrown_rc);
  }

  if (rc != RMTK_OK) return fail(rc);
  if (raw) {
    result = own(raw);
    rmtk_table_free(raw);
  }
  rec_globals();

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();

  std::ostringstream body;
  if (format == "json")
    write_json(body, result);
  else
    write_csv(body, result);

  if (out_path.empty()) {
    std::cout << body.str();
    return kExitOk;
  }
  {
    std::ofstream os(out_path, std::ios::binary);
    if (!os) {
      std::cerr << "error: cannot open " << out_path << "\n";
      return kExitIo;
    }
    os << body.str();
    if (!os) {
      std::cerr << "error: write failed: " << out_path << "\n";
      return kExitIo;
    }
  }
  json manifest;
  std::ostringstream cmdline;
  for (int i = 0; i < argc; ++i) cmdline << (i ? " " : "") << argv[i];
  manifest["command"] = cmdline.str();
  manifest["subcommand"] = subname;
  manifest["params"] = json::object();
  for (const auto& [k, v] : ctx.used) manifest["params"][k] = v;
  manifest["seed"] = seed;
  manifest["version"] = rmtk_version();
  manifest["outputs"] = json::array({out_path});
  manifest["wall_time_seconds"] = wall;
  std::ofstream ms(out_path + ".manifest.json", std::ios::binary);
  if (!ms) {
    std::cerr << "error: cannot open " << out_path << ".manifest.json\n";
    return kExitIo;
  }
  ms << manifest.dump(2) << "\n";
  return kExitOk;
}
