// Deep-network spectra: signal-propagation fixed points, input-output
// Jacobian spectra, the loss-surface curvature model, and the data
// covariance after nonlinear layers.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "rmt/ensembles.hpp"
#include "rmt/laws.hpp"
#include "rmt/nn.hpp"
#include "rmt/transforms.hpp"
#include "rmt/types.hpp"

using rmt::cplx;
using rmt::RangeError;
using rmt::NumericError;
using rmt::ensembles::Seed;
namespace nn = rmt::nn;
namespace laws = rmt::laws;
namespace transforms = rmt::transforms;

namespace {

double sample_mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

double sample_var(const std::vector<double>& v) {
  double m = sample_mean(v), s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return s / v.size();
}

// KS distance between a sample (restricted to points >= cutoff) and a
// density tabulated on a grid, with the cdf anchored at the right end
// (1 - tail integral) so that any point mass at zero is absorbed.
double ks_tail(std::vector<double> sample, const std::vector<double>& xs,
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
    double F = cdf(sample[i]);
    ks = std::max(ks, std::max(std::abs(F - i / n), std::abs(F - (i + 1) / n)));
  }
  return ks;
}

nn::NetConfig critical_hard_tanh(int L, int N, double q) {
  double p = std::erf(1.0 / std::sqrt(2.0 * q));
  nn::NetConfig cfg;
  cfg.L = L;
  cfg.N = N;
  cfg.sigma_w2 = 1.0 / p;
  cfg.activation = nn::act_hard_tanh();
  cfg.q_star_override = q;
  // E[clamp(sqrt(q) h, -1, 1)^2] in closed form for standard normal h.
  double a = 1.0 / std::sqrt(2.0 * q);
  double ephi2 = q * std::erf(a) -
                 std::sqrt(2.0 * q / M_PI) * std::exp(-1.0 / (2.0 * q)) + 1.0 -
                 std::erf(a);
  cfg.sigma_b2 = q - cfg.sigma_w2 * ephi2;
  return cfg;
}

}  // namespace

TEST_CASE("activation derivatives match finite differences off the kinks") {
  const double h = 1e-5;
  for (const auto& act :
       {nn::act_linear(), nn::act_relu(), nn::act_hard_tanh(), nn::act_tanh(),
        nn::f_alpha(0.0), nn::f_alpha(0.7), nn::f_alpha(-1.0)}) {
    for (double x : {-1.7, -0.4, 0.3, 0.6, 2.1}) {
      double fd = (act.f(x + h) - act.f(x - h)) / (2 * h);
      CHECK(act.df(x) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("Gaussian quadrature reproduces normal moments") {
  auto sq = [](double x) { return x * x; };
  CHECK(nn::gauss_expect(sq, 1.0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(nn::gauss_expect(sq, 2.5) == doctest::Approx(2.5).epsilon(1e-10));
  CHECK(nn::gauss_expect([](double x) { return x * x * x * x; }, 1.0) ==
        doctest::Approx(3.0).epsilon(1e-10));
  // E[relu(h)^2] = 1/2 for standard normal h.
  auto relu2 = [](double x) { return x > 0 ? x * x : 0.0; };
  CHECK(nn::gauss_expect(relu2, 1.0) == doctest::Approx(0.5).epsilon(1e-4));
  // q = 0 collapses to g(0).
  CHECK(nn::gauss_expect([](double) { return 7.0; }, 0.0) ==
        doctest::Approx(7.0));
  CHECK_THROWS_AS(nn::gauss_expect(sq, -1.0), RangeError);
  CHECK_THROWS_AS(nn::gauss_expect(sq, 1.0, 1), RangeError);
}

TEST_CASE("variance fixed point: closed forms") {
  nn::NetConfig cfg;
  cfg.activation = nn::act_linear();
  cfg.sigma_w2 = 0.5;
  cfg.sigma_b2 = 0.25;
  // Linear map has fixed point sigma_b^2 / (1 - sigma_w^2).
  CHECK(nn::q_star(cfg) == doctest::Approx(0.5).epsilon(1e-12));

  cfg.activation = nn::act_relu();
  cfg.sigma_w2 = 1.5;
  cfg.sigma_b2 = 0.3;
  // Relu halves the second moment: q* = 0.3 / (1 - 0.75) = 1.2.
  CHECK(nn::q_star(cfg) == doctest::Approx(1.2).epsilon(1e-9));

  // Expansive relu map has no finite fixed point.
  cfg.sigma_w2 = 2.5;
  CHECK_THROWS_AS(nn::q_star(cfg), NumericError);
}

TEST_CASE("variance propagation converges to the fixed point") {
  nn::NetConfig cfg = critical_hard_tanh(1, 100, 0.5);
  double qs = nn::q_star(cfg);
  CHECK(qs == doctest::Approx(0.5).epsilon(1e-8));
  auto path = nn::propagate_q(cfg, 2.0, 20);
  REQUIRE(path.size() == 20);
  CHECK(std::abs(path.back() - qs) < 1e-6);
  // Monotone approach from above.
  for (size_t i = 1; i < path.size(); ++i) CHECK(path[i] <= path[i - 1] + 1e-12);
}

TEST_CASE("gradient growth rate chi") {
  nn::NetConfig cfg;
  cfg.activation = nn::act_linear();
  cfg.sigma_w2 = 1.7;
  CHECK(nn::chi(cfg, 0.9) == doctest::Approx(1.7).epsilon(1e-10));
  cfg.activation = nn::act_relu();
  CHECK(nn::chi(cfg, 0.9) == doctest::Approx(0.85).epsilon(1e-8));
  cfg.activation = nn::act_hard_tanh();
  double q = 0.8;
  CHECK(nn::chi(cfg, q) ==
        doctest::Approx(1.7 * std::erf(1.0 / std::sqrt(2 * q))).epsilon(1e-8));
}

TEST_CASE("unit-slope probability") {
  CHECK(nn::p_linear(nn::act_linear(), 0.3) == doctest::Approx(1.0));
  CHECK(nn::p_linear(nn::act_relu(), 0.3) == doctest::Approx(0.5));
  CHECK(nn::p_linear(nn::act_hard_tanh(), 0.8) ==
        doctest::Approx(std::erf(1.0 / std::sqrt(1.6))).epsilon(1e-12));
  CHECK_THROWS_AS(nn::p_linear(nn::act_tanh(), 0.5), RangeError);
}

TEST_CASE("linear orthogonal network is a perfect isometry") {
  nn::NetConfig cfg;
  cfg.L = 4;
  cfg.N = 80;
  cfg.sigma_w2 = 1.0;
  cfg.ensemble = nn::WeightEnsemble::Orthogonal;
  cfg.activation = nn::act_linear();
  auto s = nn::jacobian_empirical(cfg, Seed{3});
  REQUIRE(static_cast<int>(s.eigenvalues.size()) == 80);
  for (double v : s.eigenvalues) CHECK(v == doctest::Approx(1.0).epsilon(1e-10));
  auto th = nn::jacobian_theory(cfg);
  CHECK(th.lambda_max == doctest::Approx(1.0));
  CHECK(th.variance == doctest::Approx(0.0));
}

TEST_CASE("linear Gaussian single layer reproduces the sample-covariance law") {
  nn::NetConfig cfg;
  cfg.L = 1;
  cfg.N = 400;
  cfg.sigma_w2 = 1.0;
  cfg.activation = nn::act_linear();
  auto s = nn::jacobian_empirical(cfg, Seed{4});
  laws::MPLaw mp(1.0, 1.0);
  CHECK(laws::ks_distance(s, mp) < 0.08);
  double lm = *std::max_element(s.eigenvalues.begin(), s.eigenvalues.end());
  CHECK(lm == doctest::Approx(4.0).epsilon(0.15));
  // Determinism.
  auto s2 = nn::jacobian_empirical(cfg, Seed{4});
  CHECK(s.eigenvalues == s2.eigenvalues);
}

TEST_CASE("critical networks preserve mean squared singular value") {
  // chi = 1 makes tr(JJ^T)/N concentrate at 1.
  nn::NetConfig relu;
  relu.L = 3;
  relu.N = 300;
  relu.sigma_w2 = 2.0;
  relu.activation = nn::act_relu();
  auto s = nn::jacobian_empirical(relu, Seed{6});
  CHECK(sample_mean(s.eigenvalues) == doctest::Approx(1.0).epsilon(0.08));

  nn::NetConfig ht = critical_hard_tanh(3, 300, 1.0);
  ht.ensemble = nn::WeightEnsemble::Orthogonal;
  auto s2 = nn::jacobian_empirical(ht, Seed{7});
  CHECK(sample_mean(s2.eigenvalues) == doctest::Approx(1.0).epsilon(0.08));
}

TEST_CASE("Jacobian closed forms at criticality") {
  nn::NetConfig cfg;
  cfg.activation = nn::act_linear();
  cfg.sigma_w2 = 1.0;
  cfg.ensemble = nn::WeightEnsemble::Gaussian;
  cfg.L = 1;
  auto t1 = nn::jacobian_theory(cfg);
  CHECK(t1.lambda_max == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(t1.variance == doctest::Approx(1.0).epsilon(1e-12));
  cfg.L = 2;
  auto t2 = nn::jacobian_theory(cfg);
  CHECK(t2.lambda_max == doctest::Approx(6.75).epsilon(1e-12));
  CHECK(t2.variance == doctest::Approx(2.0).epsilon(1e-12));

  // Gaussian relu at criticality: lambda_max = (e/p) L, variance = L/p.
  cfg.activation = nn::act_relu();
  cfg.sigma_w2 = 2.0;
  cfg.L = 4;
  auto t3 = nn::jacobian_theory(cfg);
  CHECK(t3.lambda_max ==
        doctest::Approx(2.0 * std::exp(1.0) * 4).epsilon(1e-12));
  CHECK(t3.variance == doctest::Approx(8.0).epsilon(1e-12));

  // Orthogonal nonlinear: variance ((1-p)/p) L stays bounded vs p -> 1.
  nn::NetConfig ht = critical_hard_tanh(4, 100, 1.0);
  ht.ensemble = nn::WeightEnsemble::Orthogonal;
  double p = std::erf(1.0 / std::sqrt(2.0));
  auto t4 = nn::jacobian_theory(ht);
  CHECK(t4.variance == doctest::Approx((1 - p) / p * 4).epsilon(1e-10));
  CHECK(t4.lambda_max ==
        doctest::Approx((1 - p) / p * std::pow(4.0, 4) / std::pow(3.0, 3))
            .epsilon(1e-10));

  // Smooth activations have no closed form here.
  nn::NetConfig sm = cfg;
  sm.activation = nn::act_tanh();
  CHECK_THROWS_AS(nn::jacobian_theory(sm), RangeError);
}

TEST_CASE("free-convolution Jacobian density") {
  // L = 1 linear Gaussian is exactly the c = 1 sample-covariance density.
  nn::NetConfig cfg;
  cfg.L = 1;
  cfg.sigma_w2 = 1.0;
  cfg.activation = nn::act_linear();
  std::vector<double> xs;
  for (double x = 0.05; x <= 3.95; x += 0.05) xs.push_back(x);
  auto d = nn::jacobian_density_free(cfg, xs);
  for (size_t i = 0; i < xs.size(); ++i)
    CHECK(d[i] == doctest::Approx(laws::mp_pdf(xs[i], 1.0)).epsilon(5e-3));

  // Two relu layers: density matches a random draw away from the zero atom.
  nn::NetConfig relu;
  relu.L = 2;
  relu.N = 500;
  relu.sigma_w2 = 2.0;
  relu.activation = nn::act_relu();
  auto th = nn::jacobian_theory(relu);
  std::vector<double> grid;
  for (double x = 0.05; x <= th.lambda_max * 1.3; x += 0.002) grid.push_back(x);
  auto dens = nn::jacobian_density_free(relu, grid);
  auto emp = nn::jacobian_empirical(relu, Seed{11});
  CHECK(ks_tail(emp.eigenvalues, grid, dens, 0.2) < 0.06);
}

TEST_CASE("curvature model: zero error energy is pure sample covariance") {
  rmt::nn::HessianModelParams p{0.0, 0.25, 1.0};
  // Compare away from the square-root edges at 0.25 and 2.25, where the
  // evaluation's imaginary broadening smooths the density by O(sqrt(delta)).
  std::vector<double> xs;
  for (double x = 0.05; x <= 0.19; x += 0.01) xs.push_back(x);
  for (double x = 0.31; x <= 2.19; x += 0.01) xs.push_back(x);
  auto d = nn::hessian_density(p, xs);
  for (size_t i = 0; i < xs.size(); ++i)
    CHECK(std::abs(d[i] - laws::mp_pdf(xs[i], 0.25)) < 1e-3);
  CHECK(nn::normalized_index(p) < 1e-6);
}

TEST_CASE("curvature model: density integrates to one and matches samples") {
  rmt::nn::HessianModelParams p{1.0, 2.0 / 3.0, 1.0};
  std::vector<double> xs;
  for (double x = -8.0; x <= 10.0 + 1e-9; x += 0.002) xs.push_back(x);
  auto d = nn::hessian_density(p, xs);
  double mass = 0;
  for (size_t i = 1; i < xs.size(); ++i)
    mass += 0.5 * (d[i] + d[i - 1]) * (xs[i] - xs[i - 1]);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-5));

  auto s = nn::hessian_sample(p, 600, Seed{7});
  CHECK(ks_tail(s.eigenvalues, xs, d, -8.0) < 0.05);

  rmt::nn::HessianModelParams p2{1e-3, 1.0 / 3.0, 1.0};
  std::vector<double> xs2;
  for (double x = -0.5; x <= 3.5 + 1e-9; x += 0.001) xs2.push_back(x);
  auto d2 = nn::hessian_density(p2, xs2);
  auto s2 = nn::hessian_sample(p2, 600, Seed{8});
  CHECK(ks_tail(s2.eigenvalues, xs2, d2, -0.5) < 0.05);
}

TEST_CASE("curvature model: negative-index onset") {
  CHECK(nn::epsilon_c(0.25) == doctest::Approx(0.04350953).epsilon(1e-6));
  CHECK(nn::epsilon_c(1e-8) == doctest::Approx(0.125).epsilon(1e-6));
  // Index vanishes at the onset and grows monotonically past it.
  rmt::nn::HessianModelParams pc{nn::epsilon_c(0.25), 0.25, 1.0};
  CHECK(nn::normalized_index(pc) < 1e-3);
  double prev = 0;
  for (double eps : {0.1, 0.3, 1.0, 3.0}) {
    rmt::nn::HessianModelParams p{eps, 0.25, 1.0};
    double idx = nn::normalized_index(p);
    CHECK(idx >= prev - 1e-9);
    CHECK(idx < 0.5);
    prev = idx;
  }
  rmt::nn::HessianModelParams big{1.0, 2.0 / 3.0, 1.0};
  CHECK(nn::normalized_index(big) == doctest::Approx(0.31227).epsilon(5e-3));
}

TEST_CASE("curvature model: refined spectrum") {
  CHECK(nn::epsilon_c(0.25, true) == doctest::Approx(0.62741700).epsilon(1e-6));
  // Scale knob enters as sigma^2.
  CHECK(nn::epsilon_c(0.25, true, 2.0) ==
        doctest::Approx(4 * nn::epsilon_c(0.25, true)).epsilon(1e-12));
  rmt::nn::HessianModelParams pc{nn::epsilon_c(0.25, true), 0.25, 1.0};
  CHECK(nn::normalized_index(pc, true) < 1e-3);
  rmt::nn::HessianModelParams above{3.0, 0.25, 1.0};
  CHECK(nn::normalized_index(above, true) > 1e-3);
  // The refined onset needs under-parameterized c in (0, 1).
  CHECK_THROWS_AS(nn::epsilon_c(1.5, true), RangeError);
}

TEST_CASE("activation constants eta and zeta") {
  auto z0 = nn::eta_zeta(nn::f_alpha(0.0));
  CHECK(z0.eta == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(z0.zeta == doctest::Approx(0.73347110).epsilon(2e-3));
  auto z1 = nn::eta_zeta(nn::f_alpha(1.0));
  CHECK(z1.eta == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(std::abs(z1.zeta) < 1e-8);
  auto zm1 = nn::eta_zeta(nn::f_alpha(-1.0));
  CHECK(zm1.eta == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(zm1.zeta == doctest::Approx(1.0).epsilon(1e-8));
  // Purely linear activations have eta = zeta at any scale.
  auto lin = nn::eta_zeta(nn::act_linear(), 1.7);
  CHECK(lin.eta == doctest::Approx(lin.zeta).epsilon(1e-10));
  CHECK(lin.eta == doctest::Approx(1.7 * 1.7).epsilon(1e-8));
  // Nonzero Gaussian mean is rejected.
  CHECK_THROWS_AS(nn::eta_zeta(nn::act_relu()), RangeError);
}

TEST_CASE("data-covariance Stieltjes transform") {
  // zeta = 0 erases the input spectrum: the output law is Marchenko-Pastur
  // with aspect ratio xi/psi (= n1/m), for any input ratio.
  for (cplx z : {cplx(0.5, 0.3), cplx(-1.0, 0.05), cplx(3.0, 1.0)}) {
    cplx md = nn::datacov_stieltjes(z, 1.0, 0.0, 0.7, 0.7);
    CHECK(std::abs(md - transforms::stieltjes_mp(z, 1.0, 1.0)) < 1e-8);
    cplx m2 = nn::datacov_stieltjes(z, 1.0, 0.0, 0.5, 1.0);
    CHECK(std::abs(m2 - transforms::stieltjes_mp(z, 0.5, 1.0)) < 1e-8);
  }
  // The linear case (zeta = eta) is a product of two sample covariances;
  // its transform matches a Monte Carlo draw of W X.
  {
    std::vector<double> xs;
    for (double x = 0.02; x <= 7.0; x += 0.01) xs.push_back(x);
    std::vector<double> dens(xs.size());
    for (size_t i = 0; i < xs.size(); ++i)
      dens[i] =
          nn::datacov_stieltjes(cplx(xs[i], 1e-5), 1.0, 1.0, 0.5, 1.0).imag() /
          M_PI;
    auto emp = nn::datacov_empirical(nn::act_linear(), 1, 500, 500, 1000, 1.0,
                                     1.0, Seed{31});
    CHECK(ks_tail(emp.eigenvalues, xs, dens, 0.05) < 0.05);
  }
  // Herglotz normalization -iy m(iy) -> 1.
  cplx tailz(0.0, 1e4);
  cplx mt = nn::datacov_stieltjes(tailz, 1.0, 0.3, 0.4, 0.8);
  CHECK(std::abs(-tailz * mt - 1.0) < 1e-3);
  CHECK(nn::datacov_stieltjes(cplx(1.0, 0.1), 1.0, 0.3, 0.4, 0.8).imag() >
        0.0);
  CHECK_THROWS_AS(nn::datacov_stieltjes(cplx(1.0, -0.1), 1.0, 0.3, 0.4, 0.8),
                  RangeError);
  CHECK_THROWS_AS(nn::datacov_stieltjes(cplx(1.0, 0.1), 1.0, 1.3, 0.4, 0.8),
                  RangeError);
  CHECK_THROWS_AS(nn::datacov_stieltjes(cplx(1.0, 0.1), -1.0, 0.3, 0.4, 0.8),
                  RangeError);
}

TEST_CASE("nonlinear data covariance: zeta = 0 layer acts like fresh noise") {
  // f_alpha(1) has zeta = 0: one layer at xi = n0/m = 1/2, psi = 1 gives
  // the c = 1/2 sample-covariance law again.
  auto s = nn::datacov_empirical(nn::f_alpha(1.0), 1, 500, 500, 1000, 1.0, 1.0,
                                 Seed{21});
  laws::MPLaw mp(0.5, 1.0);
  CHECK(laws::ks_distance(s, mp) < 0.05);
  CHECK(sample_mean(s.eigenvalues) == doctest::Approx(1.0).epsilon(0.02));
  // Ten layers stay within striking distance of the same law, while ten
  // linear layers drift far away.
  auto s10 = nn::datacov_empirical(nn::f_alpha(1.0), 10, 400, 400, 800, 1.0,
                                   1.0, Seed{22});
  CHECK(laws::ks_distance(s10, mp) < 0.12);
  auto slin = nn::datacov_empirical(nn::act_linear(), 10, 400, 400, 800, 1.0,
                                    1.0, Seed{23});
  CHECK(laws::ks_distance(slin, mp) > 0.2);
  // Determinism.
  auto sr = nn::datacov_empirical(nn::f_alpha(1.0), 1, 500, 500, 1000, 1.0,
                                  1.0, Seed{21});
  CHECK(s.eigenvalues == sr.eigenvalues);
}
