#include <cmath>

#include "doctest.h"
#include "rmt/ensembles.hpp"
#include "rmt/laws.hpp"
#include "rmt/linalg.hpp"

using namespace rmt;
using namespace rmt::ensembles;

TEST_CASE("wigner determinism and basic shape") {
  const Seed s{7};
  MatrixXd a = gen_wigner_real(64, 1.0, s);
  MatrixXd b = gen_wigner_real(64, 1.0, s);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a - a.transpose()).cwiseAbs().maxCoeff() == 0.0);
  MatrixXd c = gen_wigner_real(64, 1.0, Seed{8});
  CHECK((a - c).cwiseAbs().maxCoeff() > 0.0);

  MatrixXd one = gen_wigner_real(1, 1.0, s);
  CHECK(std::isfinite(one(0, 0)));
  CHECK_THROWS_AS(gen_wigner_real(0, 1.0, s), RangeError);
  CHECK_THROWS_AS(gen_wigner_real(4, 0.0, s), RangeError);

  MatrixXcd h = gen_wigner_complex(32, 1.0, s);
  CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("wigner ESD matches semicircle at N=2000") {
  SpectralSample es = esd(gen_wigner_real(2000, 1.0, Seed{1}));
  CHECK(laws::ks_distance(es, laws::SemicircleLaw(1.0)) < 0.03);
}

TEST_CASE("iid matrix: wishart ESD matches MP, trace LLN") {
  const int N = 1000, n = 2000;
  MatrixXd x = gen_iid_real(N, n, Seed{3});
  MatrixXd scm = x * x.transpose() / double(n);
  SpectralSample es = esd(scm);
  CHECK(laws::ks_distance(es, laws::MPLaw(0.5, 1.0)) < 0.03);
  const double tr = scm.trace() / N;
  CHECK(tr == doctest::Approx(1.0).epsilon(3.0 / std::sqrt(double(N) * n)));
}

TEST_CASE("general SCM: identity population equals null wishart") {
  const int N = 40, n = 80;
  const Seed s{11};
  AnyMatrix g = gen_general_scm(std::vector<double>(N, 1.0), n, Field::Real, s);
  MatrixXd x = gen_iid_real(N, n, s);
  MatrixXd null_w = x * x.transpose() / double(n);
  CHECK((g.r - null_w).cwiseAbs().maxCoeff() < 1e-12);

  AnyMatrix g2 =
      gen_general_scm(std::vector<double>(N, 2.5), n, Field::Real, s);
  CHECK((g2.r - 2.5 * null_w).cwiseAbs().maxCoeff() < 1e-10);

  CHECK_THROWS_AS(gen_general_scm({1.0, -0.5}, 8, Field::Real, s), RangeError);
}

TEST_CASE("spiked SCM population layout and degenerate spike") {
  SpikeSpec spikes{{3.0, 2.0}, {1, 2}};
  auto pop = spiked_population(spikes, 6);
  CHECK(pop == std::vector<double>{3.0, 2.0, 2.0, 1.0, 1.0, 1.0});
  // alpha = 1 spike is the null population exactly.
  auto pop1 = spiked_population(SpikeSpec{{1.0}, {2}}, 5);
  CHECK(pop1 == std::vector<double>(5, 1.0));
  CHECK_THROWS_AS(spiked_population(SpikeSpec{{2.0}, {9}}, 4), RangeError);
}

TEST_CASE("spiked SCM largest eigenvalue near the spike map value") {
  // alpha=3, c=0.5: limit alpha + c*alpha/(alpha-1) = 3.75.
  const int N = 2000, n = 4000;
  auto pop = spiked_population(SpikeSpec{{3.0}, {1}}, N);
  VectorXd sq(N);
  for (int i = 0; i < N; ++i) sq[i] = std::sqrt(pop[i]);
  MatrixXd y = sq.asDiagonal() * gen_iid_real(N, n, Seed{5});
  auto op = [&](const VectorXd& v) {
    return VectorXd(y * (y.transpose() * v) / double(n));
  };
  auto ex = linalg::lanczos_real(op, N, VectorXd::Ones(N), 60);
  CHECK(ex.max == doctest::Approx(3.75).epsilon(0.1 / 3.75));
}

TEST_CASE("orthogonal draws are scaled isometries") {
  MatrixXd w = gen_orthogonal(60, 1.3, Seed{2});
  MatrixXd gram = w.transpose() * w;
  CHECK((gram - 1.3 * 1.3 * MatrixXd::Identity(60, 60)).cwiseAbs().maxCoeff() <
        1e-10);
  MatrixXd w1 = gen_orthogonal(1, 2.0, Seed{9});
  CHECK(std::abs(std::abs(w1(0, 0)) - 2.0) < 1e-12);
  // Product of independent draws keeps all singular values at sigma^L.
  MatrixXd p = gen_orthogonal(20, 1.1, Seed{1}) *
               gen_orthogonal(20, 1.1, Seed{2}) *
               gen_orthogonal(20, 1.1, Seed{3});
  MatrixXd pg = p.transpose() * p;
  const double s6 = std::pow(1.1, 6);
  CHECK((pg - s6 * MatrixXd::Identity(20, 20)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("GUE sampler") {
  SpectralSample g1 = gen_gue(1, Seed{4});
  CHECK(g1.eigenvalues.size() == 1);  // a single standard Gaussian scalar
  CHECK(std::abs(g1.eigenvalues[0]) < 6.0);

  // Scaled by 1/sqrt(k), the ESD approaches the unit semicircle.
  SpectralSample big = gen_gue(2000, Seed{6});
  for (double& ev : big.eigenvalues) ev /= std::sqrt(2000.0);
  CHECK(laws::ks_distance(big, laws::SemicircleLaw(1.0)) < 0.03);
}

TEST_CASE("GUE k=2 largest eigenvalue mean matches closed form") {
  // For 2x2 GUE, lmax = (x1+x2)/2 + sqrt((x1-x2)^2/4 + |h12|^2) and
  // E lmax = E sqrt(g) with g ~ twice a chi^2-like combination; the exact
  // value is sqrt(pi)/... frozen from a high-trial quadrature oracle:
  // E lmax = E[r/ (something)] -- validated here against Monte Carlo only.
  double acc = 0;
  const int trials = 4000;
  for (int t = 0; t < trials; ++t) {
    SpectralSample s = gen_gue(2, Seed{static_cast<uint64_t>(1000 + t)});
    acc += s.eigenvalues[1];
  }
  acc /= trials;
  // Oracle: lmax = sqrt((d^2)/4 + |h|^2) in distribution with d ~ N(0,2),
  // |h|^2 ~ Exp(1); E lmax = E sqrt(chi), computed once by quadrature: 1.12838.
  CHECK(acc == doctest::Approx(1.12838).epsilon(0.05));
}

TEST_CASE("esd contracts") {
  CHECK(esd(MatrixXd(MatrixXd::Identity(3, 3))).eigenvalues ==
        std::vector<double>{1.0, 1.0, 1.0});
  MatrixXd d = MatrixXd::Zero(2, 2);
  d(0, 0) = 2;
  d(1, 1) = -1;
  CHECK(esd(d).eigenvalues == std::vector<double>{-1.0, 2.0});

  MatrixXd r = gen_wigner_real(50, 1.0, Seed{12});
  SpectralSample es = esd(r);
  double sum = 0;
  for (double ev : es.eigenvalues) sum += ev;
  CHECK(sum == doctest::Approx(r.trace()).epsilon(1e-10));

  MatrixXd bad = MatrixXd::Zero(2, 2);
  bad(0, 1) = 1.0;  // not symmetric
  CHECK_THROWS_AS(esd(bad), RangeError);
}

TEST_CASE("no-outlier property at moderate scale") {
  // Smoke version of the Theorem 2.8 check (full version in acceptance).
  const int N = 400, n = 800;
  int ok = 0;
  for (int t = 0; t < 20; ++t) {
    MatrixXd y = gen_iid_real(N, n, Seed{static_cast<uint64_t>(100 + t)});
    auto op = [&](const VectorXd& v) {
      return VectorXd(y * (y.transpose() * v) / double(n));
    };
    auto ex = linalg::lanczos_real(op, N, VectorXd::Ones(N));
    const double a = std::pow(1 - std::sqrt(0.5), 2);
    const double b = std::pow(1 + std::sqrt(0.5), 2);
    if (ex.max < b + 0.15 && ex.min > a - 0.1) ++ok;
  }
  CHECK(ok >= 19);
}
