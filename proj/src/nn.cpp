#include "rmt/nn.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "rmt/rng.hpp"
#include "rmt/transforms.hpp"

namespace rmt::nn {

namespace {

constexpr double kSqrt2Pi = 2.5066282746310002;

double relu(double x) { return x > 0 ? x : 0.0; }

void silence_gsl() {
  // Report GSL failures through status codes instead of aborting.
  static gsl_error_handler_t* once = gsl_set_error_handler_off();
  (void)once;
}

struct GaussCtx {
  const std::function<double(double)>* g;
  double scale;
};

double gauss_integrand(double x, void* p) {
  const auto* ctx = static_cast<GaussCtx*>(p);
  return (*ctx->g)(ctx->scale * x);
}

double weighted_integrand(double x, void* p) {
  const auto* ctx = static_cast<GaussCtx*>(p);
  return (*ctx->g)(ctx->scale * x) * std::exp(-0.5 * x * x) / kSqrt2Pi;
}

// Adaptive variant that stays accurate for activations with kinks, where a
// fixed Hermite rule converges too slowly for tight tolerances.
double gauss_expect_adaptive(const std::function<double(double)>& g,
                             double q) {
  silence_gsl();
  require(q >= 0, "gauss_expect: variance must be nonnegative");
  GaussCtx ctx{&g, std::sqrt(q)};
  gsl_function fn{&weighted_integrand, &ctx};
  gsl_integration_workspace* w = gsl_integration_workspace_alloc(2000);
  double total = 0.0;
  int worst = GSL_SUCCESS;
  // Split at the origin so a kink there sits on an interval boundary.
  for (int side = 0; side < 2; ++side) {
    double part = 0.0, abserr = 0.0;
    const int status =
        side == 0 ? gsl_integration_qagil(&fn, 0.0, 1e-12, 1e-10, 2000, w,
                                          &part, &abserr)
                  : gsl_integration_qagiu(&fn, 0.0, 1e-12, 1e-10, 2000, w,
                                          &part, &abserr);
    if (status != GSL_SUCCESS && status != GSL_EROUND) worst = status;
    total += part;
  }
  gsl_integration_workspace_free(w);
  if (worst != GSL_SUCCESS || !std::isfinite(total))
    throw NumericError("gauss_expect: non-finite integrand");
  return total;
}

}  // namespace

Activation act_linear() {
  return {ActKind::Linear, 0.0, [](double x) { return x; },
          [](double) { return 1.0; }};
}

Activation act_relu() {
  // Left-segment convention at the kink: slope 0 at x = 0.
  return {ActKind::Relu, 0.0, [](double x) { return relu(x); },
          [](double x) { return x > 0 ? 1.0 : 0.0; }};
}

Activation act_hard_tanh() {
  return {ActKind::HardTanh, 0.0,
          [](double x) { return std::clamp(x, -1.0, 1.0); },
          [](double x) { return (x > -1.0 && x <= 1.0) ? 1.0 : 0.0; }};
}

Activation act_tanh() {
  return {ActKind::Tanh, 0.0, [](double x) { return std::tanh(x); },
          [](double x) {
            const double t = std::tanh(x);
            return 1.0 - t * t;
          }};
}

Activation act_custom(std::function<double(double)> f,
                      std::function<double(double)> df) {
  return {ActKind::Custom, 0.0, std::move(f), std::move(df)};
}

Activation f_alpha(double alpha) {
  const double d2 =
      0.5 * (1.0 + alpha * alpha) - (1.0 + alpha) * (1.0 + alpha) / (2.0 * M_PI);
  require(d2 > 0, "f_alpha: degenerate normalization");
  const double d = std::sqrt(d2);
  const double shift = (1.0 + alpha) / kSqrt2Pi;
  Activation a;
  a.kind = ActKind::ShiftedAbsFamily;
  a.alpha = alpha;
  a.f = [alpha, d, shift](double x) {
    return (relu(x) + alpha * relu(-x) - shift) / d;
  };
  a.df = [alpha, d](double x) { return (x > 0 ? 1.0 : -alpha) / d; };
  return a;
}

double gauss_expect(const std::function<double(double)>& g, double q,
                    int nodes) {
  silence_gsl();
  require(q >= 0, "gauss_expect: variance must be nonnegative");
  require(nodes >= 2, "gauss_expect: need at least two nodes");
  gsl_integration_fixed_workspace* w = gsl_integration_fixed_alloc(
      gsl_integration_fixed_hermite, nodes, 0.0, 0.5, 0.0, 0.0);
  if (w == nullptr) throw NumericError("gauss_expect: workspace allocation");
  GaussCtx ctx{&g, std::sqrt(q)};
  gsl_function fn{&gauss_integrand, &ctx};
  double result = 0.0;
  const int status = gsl_integration_fixed(&fn, &result, w);
  gsl_integration_fixed_free(w);
  result /= kSqrt2Pi;
  if (status != GSL_SUCCESS || !std::isfinite(result))
    throw NumericError("gauss_expect: non-finite integrand");
  return result;
}

namespace {

double variance_map(const NetConfig& cfg, double q) {
  const auto& f = cfg.activation.f;
  return cfg.sigma_w2 *
             gauss_expect_adaptive([&f](double x) { return f(x) * f(x); }, q) +
         cfg.sigma_b2;
}

}  // namespace

double q_star(const NetConfig& cfg) {
  require(cfg.sigma_w2 >= 0 && cfg.sigma_b2 >= 0,
          "q_star: variances must be nonnegative");
  double q = cfg.sigma_b2 + cfg.sigma_w2;
  for (int it = 0; it < 20000; ++it) {
    const double next = variance_map(cfg, q);
    const double resid = std::abs(next - q);
    q = 0.5 * (q + next);
    if (!std::isfinite(q) || q > 1e100)
      throw NumericError("q_star: no finite fixed point");
    if (resid < 1e-13) break;
  }
  if (!(std::abs(variance_map(cfg, q) - q) < 1e-12))
    throw NumericError("q_star: no finite fixed point");
  return q;
}

std::vector<double> propagate_q(const NetConfig& cfg, double q0, int layers) {
  require(q0 >= 0, "propagate_q: q0 must be nonnegative");
  require(layers >= 1, "propagate_q: need at least one layer");
  std::vector<double> out;
  double q = q0;
  for (int l = 0; l < layers; ++l) {
    q = variance_map(cfg, q);
    out.push_back(q);
  }
  return out;
}

double chi(const NetConfig& cfg, double q) {
  const auto& df = cfg.activation.df;
  return cfg.sigma_w2 *
         gauss_expect_adaptive([&df](double x) { return df(x) * df(x); }, q);
}

double p_linear(const Activation& act, double q) {
  require(q >= 0, "p_linear: variance must be nonnegative");
  switch (act.kind) {
    case ActKind::Linear:
      return 1.0;
    case ActKind::Relu:
      return 0.5;
    case ActKind::HardTanh:
      return q > 0 ? std::erf(1.0 / std::sqrt(2.0 * q)) : 1.0;
    default:
      throw RangeError(
          "p_linear: activation has no unit-slope linear segment");
  }
}

SpectralSample jacobian_empirical(const NetConfig& cfg, ensembles::Seed seed) {
  require(cfg.L >= 1 && cfg.N >= 1, "jacobian_empirical: bad shape");
  const int N = cfg.N;
  const double q =
      cfg.q_star_override ? *cfg.q_star_override : q_star(cfg);
  const auto& f = cfg.activation.f;
  const auto& df = cfg.activation.df;

  const CounterRng rin(substream(seed.value, 0), kStreamNnInput);
  VectorXd x(N);
  for (int i = 0; i < N; ++i) x(i) = f(std::sqrt(q) * rin.normal(i));

  MatrixXd jac = MatrixXd::Identity(N, N);
  const double sw = std::sqrt(cfg.sigma_w2);
  for (int l = 1; l <= cfg.L; ++l) {
    MatrixXd w;
    if (cfg.ensemble == WeightEnsemble::Gaussian)
      w = ensembles::gen_iid_real(N, N,
                                  ensembles::Seed{substream(seed.value, 2 * l)}) *
          (sw / std::sqrt(double(N)));
    else
      w = ensembles::gen_orthogonal(
          N, sw, ensembles::Seed{substream(seed.value, 2 * l)});
    const CounterRng rb(substream(seed.value, 2 * l + 1), kStreamNnBias);
    VectorXd h = w * x;
    const double sb = std::sqrt(cfg.sigma_b2);
    for (int i = 0; i < N; ++i) h(i) += sb * rb.normal(i);
    VectorXd slope(N);
    for (int i = 0; i < N; ++i) {
      slope(i) = df(h(i));
      x(i) = f(h(i));
    }
    jac = slope.asDiagonal() * (w * jac);
    if (!jac.allFinite() || jac.norm() > 1e150)
      throw NumericError("jacobian_empirical: gradient overflow");
  }
  MatrixXd gram = jac * jac.transpose();
  gram = 0.5 * (gram + gram.transpose()).eval();
  return ensembles::esd(gram);
}

JacobianTheory jacobian_theory(const NetConfig& cfg) {
  const int L = cfg.L;
  require(L >= 1, "jacobian_theory: depth must be positive");
  if (cfg.activation.kind == ActKind::Linear) {
    if (cfg.ensemble == WeightEnsemble::Orthogonal) return {1.0, 0.0};
    return {std::pow(double(L), -L) * std::pow(double(L + 1), L + 1),
            double(L)};
  }
  const double q =
      cfg.q_star_override ? *cfg.q_star_override : q_star(cfg);
  const double p = p_linear(cfg.activation, q);  // rejects unsupported kinds
  if (cfg.ensemble == WeightEnsemble::Gaussian)
    return {M_E / p * L, double(L) / p};
  const double ratio = (1.0 - p) / p;
  const double shape =
      L == 1 ? 1.0 : std::pow(double(L), L) / std::pow(double(L - 1), L - 1);
  return {ratio * shape, ratio * L};
}

namespace {

// Law of the squared activation slope at pre-activation variance q, as
// (value, weight) atoms; defined for piecewise-linear activations.
std::vector<std::pair<double, double>> slope_squared_atoms(
    const Activation& act, double q) {
  switch (act.kind) {
    case ActKind::Linear:
      return {{1.0, 1.0}};
    case ActKind::Relu:
      return {{0.0, 0.5}, {1.0, 0.5}};
    case ActKind::HardTanh: {
      const double p = p_linear(act, q);
      return {{0.0, 1.0 - p}, {1.0, p}};
    }
    case ActKind::ShiftedAbsFamily: {
      const double d2 = 0.5 * (1.0 + act.alpha * act.alpha) -
                        (1.0 + act.alpha) * (1.0 + act.alpha) / (2.0 * M_PI);
      const double up = 1.0 / d2;
      const double down = act.alpha * act.alpha / d2;
      if (std::abs(up - down) < 1e-15) return {{up, 1.0}};
      return {{down, 0.5}, {up, 0.5}};
    }
    default:
      throw RangeError(
          "jacobian_density_free: activation is not piecewise linear");
  }
}

}  // namespace

std::vector<double> jacobian_density_free(const NetConfig& cfg,
                                          const std::vector<double>& grid) {
  require(cfg.L >= 1, "jacobian_density_free: depth must be positive");
  const double q =
      cfg.q_star_override ? *cfg.q_star_override : q_star(cfg);
  const auto s_w =
      cfg.ensemble == WeightEnsemble::Gaussian
          ? transforms::s_transform(
                transforms::carrier_mp(1.0, std::sqrt(cfg.sigma_w2)))
          : transforms::s_transform(
                transforms::carrier_atoms({{cfg.sigma_w2, 1.0}}));
  const auto s_d = transforms::s_transform(
      transforms::carrier_atoms(slope_squared_atoms(cfg.activation, q)));
  transforms::Transform total = transforms::free_multiply(s_w, s_d);
  for (int l = 1; l < cfg.L; ++l)
    total = transforms::free_multiply(transforms::free_multiply(total, s_w),
                                      s_d);
  return transforms::density_from_s(total, grid);
}

namespace {

transforms::Transform hessian_r_transform(const HessianModelParams& p,
                                          bool refined) {
  require(p.epsilon >= 0 && p.c >= 0,
          "hessian model: epsilon and c must be nonnegative");
  if (!refined) {
    const double eps = p.epsilon, c = p.c;
    return {[eps, c](cplx w) { return 1.0 / (1.0 - w * c) + 2.0 * eps * w; },
            1.0};
  }
  require(p.sigma > 0, "hessian model: sigma must be positive");
  const double eps = p.epsilon, c = p.c, s = p.sigma;
  return {[eps, c, s](cplx w) {
            return eps * c * w / (2.0 - eps * c * c * w * w) +
                   s / (1.0 - s * w * c);
          },
          p.sigma};
}

}  // namespace

std::vector<double> hessian_density(const HessianModelParams& params,
                                    const std::vector<double>& grid,
                                    bool refined) {
  return transforms::density_from_r(hessian_r_transform(params, refined), grid,
                                    1e-6);
}

SpectralSample hessian_sample(const HessianModelParams& params, int n,
                              ensembles::Seed seed) {
  require(n >= 2, "hessian_sample: need n >= 2");
  require(params.epsilon >= 0 && params.c >= 0,
          "hessian_sample: epsilon and c must be nonnegative");
  MatrixXd h = MatrixXd::Zero(n, n);
  if (params.c > 0) {
    const int m = std::max(1, int(std::lround(n / params.c)));
    const MatrixXd x = ensembles::gen_iid_real(
        n, m, ensembles::Seed{substream(seed.value, 1)});
    h = x * x.transpose() / double(m);
  }
  if (params.epsilon > 0)
    h += ensembles::gen_wigner_real(n, std::sqrt(2.0 * params.epsilon),
                                    ensembles::Seed{substream(seed.value, 2)});
  return ensembles::esd(h);
}

namespace {

double density_at(void* ctx, double x) {
  const auto* m = static_cast<std::function<cplx(cplx)>*>(ctx);
  const double v = (*m)(cplx(x, 1e-6)).imag() / M_PI;
  return v > 0 ? v : 0.0;
}

double index_integrand(double x, void* ctx) { return density_at(ctx, x); }

}  // namespace

double normalized_index(const HessianModelParams& params, bool refined) {
  silence_gsl();
  auto m = transforms::stieltjes_from_r(hessian_r_transform(params, refined));
  const double lo =
      -(2.0 * std::sqrt(2.0 * params.epsilon) * (1.0 + params.sigma) + 2.0);
  gsl_integration_workspace* w = gsl_integration_workspace_alloc(2000);
  gsl_function fn{&index_integrand, &m};
  double result = 0.0, abserr = 0.0;
  const int status = gsl_integration_qags(&fn, lo, 0.0, 1e-9, 1e-7, 2000, w,
                                          &result, &abserr);
  gsl_integration_workspace_free(w);
  if ((status != GSL_SUCCESS && status != GSL_EROUND) ||
      !std::isfinite(result))
    throw NumericError("normalized_index: quadrature failure");
  return std::clamp(result, 0.0, 1.0);
}

double epsilon_c(double c, bool refined, double sigma) {
  require(c > 0, "epsilon_c: c must be positive");
  if (!refined)
    return (1.0 - 20.0 * c - 8.0 * c * c + std::pow(1.0 + 8.0 * c, 1.5)) /
           16.0;
  require(c < 1, "epsilon_c: refined form needs c < 1");
  require(sigma > 0, "epsilon_c: sigma must be positive");
  const double x = 1.0 + 16.0 * c - 8.0 * c * c;
  return sigma * sigma *
         (27.0 - 18.0 * x - x * x + 8.0 * std::pow(x, 1.5)) /
         (32.0 * c * std::pow(1.0 - c, 3));
}

EtaZeta eta_zeta(const Activation& act, double s) {
  require(s > 0, "eta_zeta: scale must be positive");
  const double q = s * s;
  const auto& f = act.f;
  const auto& df = act.df;
  const double mean = gauss_expect_adaptive(f, q);
  if (std::abs(mean) >= 1e-8) {
    std::ostringstream msg;
    msg << "eta_zeta: activation has nonzero Gaussian mean " << mean;
    throw RangeError(msg.str());
  }
  const double eta =
      gauss_expect_adaptive([&f](double x) { return f(x) * f(x); }, q);
  const double slope = s * gauss_expect_adaptive(df, q);
  return {eta, slope * slope};
}

namespace {

using Poly = std::array<cplx, 5>;  // coefficients, constant term first

Poly poly_mul(const Poly& a, const Poly& b) {
  Poly out{};
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j + i < 5; ++j) out[i + j] += a[i] * b[j];
  return out;
}

std::vector<cplx> poly_roots(const Poly& p) {
  double scale = 0.0;
  for (const cplx& c : p) scale = std::max(scale, std::abs(c));
  require(scale > 0, "datacov_stieltjes: zero polynomial");
  int deg = 4;
  while (deg > 0 && std::abs(p[deg]) < 1e-13 * scale) --deg;
  require(deg >= 1, "datacov_stieltjes: constant polynomial");
  MatrixXcd comp = MatrixXcd::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -p[i] / p[deg];
  Eigen::ComplexEigenSolver<MatrixXcd> es(comp, false);
  const auto& ev = es.eigenvalues();
  return {ev.data(), ev.data() + deg};
}

// The coupled moment-series system reduced to one polynomial in P at
// t = 1/(z psi).
Poly datacov_polynomial(cplx t, double eta, double zeta, double xi,
                        double psi) {
  const Poly a = {t * (1.0 - xi) * (1.0 - psi),
                  t * ((1.0 - xi) * psi + (1.0 - psi) * xi), t * xi * psi, 0.0,
                  0.0};
  Poly b{};  // u - 1 - (eta - zeta) A
  b[0] = -1.0 - (eta - zeta) * a[0];
  b[1] = 1.0 - (eta - zeta) * a[1];
  b[2] = -(eta - zeta) * a[2];
  Poly c{};  // 1 - zeta A
  c[0] = 1.0 - zeta * a[0];
  c[1] = -zeta * a[1];
  c[2] = -zeta * a[2];
  Poly out = poly_mul(b, c);
  for (int i = 0; i < 5; ++i) out[i] -= zeta * a[i];
  return out;
}

cplx eval_poly(const Poly& p, cplx u) {
  cplx acc = 0.0;
  for (int i = 4; i >= 0; --i) acc = acc * u + p[i];
  return acc;
}

}  // namespace

cplx datacov_stieltjes(cplx z, double eta, double zeta, double xi,
                       double psi) {
  require(z.imag() > 0, "datacov_stieltjes: need Im z > 0");
  require(eta > 0, "datacov_stieltjes: eta must be positive");
  require(zeta >= 0 && zeta <= eta + 1e-12,
          "datacov_stieltjes: need 0 <= zeta <= eta");
  require(xi > 0 && psi > 0, "datacov_stieltjes: ratios must be positive");

  // Continue the moment-series root from deep in the upper half plane
  // (where P -> 1) down to the requested z.
  const double im_far = std::max(8.0, 2.0 * std::abs(z));
  cplx p_prev = 1.0;
  const int steps = 24;
  for (int k = steps; k >= 0; --k) {
    const double frac = double(k) / steps;
    const cplx zk(z.real(),
                  z.imag() * std::pow(im_far / z.imag(), frac));
    const Poly poly = datacov_polynomial(1.0 / (zk * psi), eta, zeta, xi, psi);
    const auto roots = poly_roots(poly);
    cplx best = roots[0];
    for (const cplx& r : roots)
      if (std::abs(r - p_prev) < std::abs(best - p_prev)) best = r;
    p_prev = best;
  }
  const Poly poly = datacov_polynomial(1.0 / (z * psi), eta, zeta, xi, psi);
  double scale = 0.0;
  for (const cplx& c : poly) scale = std::max(scale, std::abs(c));
  if (std::abs(eval_poly(poly, p_prev)) > 1e-10 * std::max(1.0, scale))
    throw NumericError("datacov_stieltjes: root tracking failed");

  const cplx g = psi / z * p_prev + (1.0 - psi) / z;  // sums moments z^{-k-1}
  const cplx m = -g;
  if (m.imag() <= -1e-9)
    throw NumericError("datacov_stieltjes: non-Herglotz branch");
  return m;
}

SpectralSample datacov_empirical(const Activation& act, int L, int n0, int n1,
                                 int m, double sigma_w2, double sigma_x2,
                                 ensembles::Seed seed) {
  require(L >= 1 && n0 >= 1 && n1 >= 1 && m >= 1,
          "datacov_empirical: bad shape");
  require(sigma_w2 > 0 && sigma_x2 > 0,
          "datacov_empirical: variances must be positive");
  MatrixXd y = ensembles::gen_iid_real(
                   n0, m, ensembles::Seed{substream(seed.value, 0)}) *
               std::sqrt(sigma_x2);
  int prev = n0;
  for (int l = 1; l <= L; ++l) {
    const MatrixXd w =
        ensembles::gen_iid_real(n1, prev,
                                ensembles::Seed{substream(seed.value, l)}) *
        std::sqrt(sigma_w2 / prev);
    MatrixXd zmat = w * y;
    y.resize(n1, m);
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < n1; ++i) y(i, j) = act.f(zmat(i, j));
    prev = n1;
  }
  return ensembles::esd(MatrixXd(y * y.transpose() / double(m)));
}

}  // namespace rmt::nn
