#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "rmt/ensembles.hpp"
#include "rmt/linalg.hpp"
#include "rmt/spiked.hpp"

using namespace rmt;
using namespace rmt::spiked;

TEST_CASE("spike map values, pole, edge continuity, monotonicity") {
  CHECK(spike_map(2.0, 0.5) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(spike_map(3.0, 0.5) == doctest::Approx(3.75).epsilon(1e-12));
  CHECK_THROWS_AS(spike_map(1.0, 0.5), RangeError);
  for (double c : {0.1, 0.5, 0.9, 2.0}) {
    const double sc = std::sqrt(c);
    CHECK(spike_map(1.0 + sc, c) ==
          doctest::Approx((1.0 + sc) * (1.0 + sc)).epsilon(1e-12));
    CHECK(spike_map(1.0 - sc, c) ==
          doctest::Approx((1.0 - sc) * (1.0 - sc)).epsilon(1e-12));
    double prev = spike_map(1.0 + sc + 1e-6, c);
    for (double a = 1.0 + sc + 0.05; a < 6.0; a += 0.05) {
      const double v = spike_map(a, c);
      CHECK(v > prev);
      prev = v;
    }
  }
}

TEST_CASE("spike classification regimes, limits and index layout") {
  {
    const auto r = classify_spikes({{1.5}, {1}}, 1.0, 100);
    REQUIRE(r.size() == 1);
    CHECK(r[0].regime == Regime::Subcritical);
    CHECK(r[0].predicted_limit == doctest::Approx(4.0));
    CHECK(r[0].index_begin == 0);
    CHECK(r[0].index_end == 1);
  }
  {
    const auto r = classify_spikes({{3.0}, {2}}, 0.5, 100);
    CHECK(r[0].regime == Regime::SupercriticalHigh);
    CHECK(r[0].predicted_limit == doctest::Approx(3.75));
    CHECK(r[0].index_end == 2);
  }
  {
    const auto r = classify_spikes({{0.2}, {1}}, 0.25, 100);
    CHECK(r[0].regime == Regime::SupercriticalLow);
    CHECK(r[0].predicted_limit == doctest::Approx(0.1375));
    CHECK(r[0].index_begin == 99);
    CHECK(r[0].index_end == 100);
  }
  {
    // Mixed spec: ranges disjoint, top spikes descending, bottom from below.
    const auto r = classify_spikes({{0.2, 5.0, 2.0}, {1, 2, 1}}, 0.25, 50);
    REQUIRE(r.size() == 3);
    CHECK(r[0].alpha == 5.0);
    CHECK(r[0].index_begin == 0);
    CHECK(r[0].index_end == 2);
    CHECK(r[1].alpha == 2.0);
    CHECK(r[1].index_begin == 2);
    CHECK(r[1].index_end == 3);
    CHECK(r[2].alpha == 0.2);
    CHECK(r[2].index_begin == 49);
  }
  CHECK_THROWS_AS(classify_spikes({{0.5}, {1}}, 2.0, 100), RangeError);
  CHECK_THROWS_AS(classify_spikes({{2.0}, {1, 2}}, 0.5, 100),
                  RangeError);
}

TEST_CASE("spike fluctuation constants") {
  const auto [mu, v] = spike_fluctuation_params(3.0, 0.5);
  CHECK(mu == doctest::Approx(3.75).epsilon(1e-12));
  CHECK(v == doctest::Approx(3.0 * std::sqrt(0.875)).epsilon(1e-12));
  // Scale collapses at the transition.
  CHECK(spike_fluctuation_params(1.0 + std::sqrt(0.5) + 1e-8, 0.5).v < 1e-3);
  CHECK_THROWS_AS(spike_fluctuation_params(1.5, 0.5), RangeError);
}

TEST_CASE("largest-eigenvalue law selector") {
  const auto tw = bbp_largest_law(1.2, 0.5, 1);
  CHECK(tw.kind == LargestLaw::Kind::TW2);
  CHECK(tw.center == doctest::Approx((1 + std::sqrt(0.5)) *
                                     (1 + std::sqrt(0.5))));
  const auto g1 = bbp_largest_law(3.0, 0.5, 1);
  CHECK(g1.kind == LargestLaw::Kind::Gaussian);
  CHECK(g1.center == doctest::Approx(3.75));
  CHECK(g1.scale == doctest::Approx(3.0 * std::sqrt(0.875)));
  const auto g2 = bbp_largest_law(3.0, 0.5, 2);
  CHECK(g2.kind == LargestLaw::Kind::GueLargest);
  CHECK(g2.k == 2);
  // Delegation target: the 2x2 comparison ensemble has known mean top
  // eigenvalue 2/sqrt(pi).
  double acc = 0;
  const int T = 2000;
  for (int t = 0; t < T; ++t)
    acc += ensembles::gen_gue(2, ensembles::Seed{77 + (unsigned)t})
               .eigenvalues.back();
  CHECK(acc / T == doctest::Approx(2.0 / std::sqrt(M_PI)).epsilon(0.05));
  CHECK_THROWS_AS(bbp_largest_law(3.0, 1.5, 1), RangeError);
}

TEST_CASE("m3 quadrature") {
  CHECK(m3(3.75, 0.5) == doctest::Approx(2.0 / 7.0).epsilon(1e-6));
  CHECK(m3(100.0, 0.5) == doctest::Approx(1.0308e-4).epsilon(0.01));
  // Far away it decays like mean/lambda^2.
  CHECK(m3(100.0, 0.5) == doctest::Approx(1e-4).epsilon(0.1));
  // Degenerate c: point mass at 1 gives 1/(lambda-1)^2.
  CHECK(m3(2.0, 1e-3) == doctest::Approx(1.0).epsilon(0.01));
  CHECK_THROWS_AS(m3(1.0, 0.5), RangeError);
  // Theorem-scale cross-check: 1/(1 + c m3 tau) at tau = 3, c = 0.5 is 0.7.
  const double s = 1.0 / (1.0 + 0.5 * m3(3.75, 0.5) * 3.0);
  CHECK(s == doctest::Approx(0.7).epsilon(1e-6));
}

TEST_CASE("supercritical spike detaches to phi and fluctuates normally") {
  // Complex spiked SCM, tau = 3, c = 0.5 (N = 300, n = 600): standardized
  // largest eigenvalue vs the standard normal.
  const int N = 300, n = 600, trials = 250;
  const auto [mu, v] = spike_fluctuation_params(3.0, 0.5);
  std::vector<double> z;
  const double sq = std::sqrt(3.0);
  for (int t = 0; t < trials; ++t) {
    MatrixXcd x =
        ensembles::gen_iid_complex(N, n, ensembles::Seed{3300 + (unsigned)t});
    x.row(0) *= sq;
    auto op = [&](const VectorXcd& vv) {
      return VectorXcd(x * (x.adjoint() * vv) / double(n));
    };
    const auto ex = linalg::lanczos_herm(op, N, VectorXcd::Ones(N), 70);
    z.push_back(std::sqrt(double(n)) * (ex.max - mu) / v);
  }
  std::sort(z.begin(), z.end());
  double ks = 0;
  for (size_t i = 0; i < z.size(); ++i) {
    const double f = 0.5 * std::erfc(-z[i] / std::sqrt(2.0));
    ks = std::max(ks, std::max(std::abs((i + 1.0) / z.size() - f),
                               std::abs(double(i) / z.size() - f)));
  }
  CHECK(ks < 0.1);

  // Subcritical spike stays invisible at the bulk edge.
  MatrixXcd x =
      ensembles::gen_iid_complex(500, 1000, ensembles::Seed{4400});
  x.row(0) *= std::sqrt(1.3);
  auto op = [&](const VectorXcd& vv) {
    return VectorXcd(x * (x.adjoint() * vv) / 1000.0);
  };
  const auto ex = linalg::lanczos_herm(op, 500, VectorXcd::Ones(500), 80);
  CHECK(std::abs(ex.max - (1 + std::sqrt(0.5)) * (1 + std::sqrt(0.5))) < 0.1);
}
