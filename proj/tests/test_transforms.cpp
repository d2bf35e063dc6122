#include <cmath>

#include "doctest.h"
#include "rmt/ensembles.hpp"
#include "rmt/laws.hpp"
#include "rmt/transforms.hpp"

using namespace rmt;
using namespace rmt::transforms;
using rmt::cplx;

namespace {

// 1 - suffix integral of a gridded density: immune to an integrable
// divergence at the left support edge.
std::vector<double> cdf_from_density(const std::vector<double>& xs,
                                     const std::vector<double>& fs) {
  std::vector<double> tail(xs.size(), 0.0);
  for (size_t i = xs.size() - 1; i > 0; --i)
    tail[i - 1] = tail[i] + 0.5 * (fs[i] + fs[i - 1]) * (xs[i] - xs[i - 1]);
  std::vector<double> cdf(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) cdf[i] = 1.0 - tail[i];
  return cdf;
}

double sup_cdf_gap(const std::vector<double>& xs,
                   const std::vector<double>& cdf,
                   const std::vector<double>& sorted_sample) {
  // Empirical cdf of the sample evaluated against the gridded theory cdf.
  double d = 0;
  size_t j = 0;
  const size_t n = sorted_sample.size();
  for (size_t i = 0; i < n; ++i) {
    const double x = sorted_sample[i];
    while (j + 1 < xs.size() && xs[j + 1] < x) ++j;
    const double f = cdf[std::min(j + 1, xs.size() - 1)];
    d = std::max(d, std::abs((i + 1.0) / n - f));
  }
  return d;
}

}  // namespace

TEST_CASE("empirical Stieltjes transform hand values") {
  SpectralSample one;
  one.eigenvalues = {0.0};
  one.dim = 1;
  CHECK(std::abs(stieltjes_empirical(one, cplx(0, 1)) - cplx(0, 1)) < 1e-14);

  SpectralSample two;
  two.eigenvalues = {1.0, -1.0};
  two.dim = 2;
  CHECK(std::abs(stieltjes_empirical(two, cplx(0, 2)) - cplx(0, 0.4)) < 1e-14);

  const cplx big = stieltjes_empirical(two, cplx(0, 1e6));
  CHECK(std::abs(big) == doctest::Approx(1e-6).epsilon(1e-6));
  CHECK_THROWS_AS(stieltjes_empirical(two, cplx(2, 0)), RangeError);
}

TEST_CASE("closed-form Stieltjes transforms") {
  CHECK(std::abs(stieltjes_semicircle(cplx(0, 1)) - cplx(0, 0.6180339887)) <
        1e-9);
  CHECK(std::abs(stieltjes_semicircle(cplx(0, 3)) - cplx(0, 0.3027756377)) <
        1e-9);
  CHECK(std::abs(stieltjes_mp(cplx(0, 1), 1.0) -
                 cplx(0.3002425902, 0.6248105338)) < 1e-8);
  // c -> 0 degenerates to the point mass at 1.
  CHECK(std::abs(stieltjes_mp(cplx(0, 1), 1e-12) - cplx(0.5, 0.5)) < 1e-5);

  // Quadratic residual and Herglotz property on a grid.
  for (int i = 0; i < 100; ++i) {
    const cplx z(-3.0 + 0.07 * i, 0.2 + 0.01 * i);
    const cplx ms = stieltjes_semicircle(z);
    CHECK(std::abs(ms * ms + z * ms + 1.0) < 1e-10);
    CHECK(ms.imag() > 0);
    const double c = 0.5;
    const cplx mm = stieltjes_mp(z, c);
    CHECK(std::abs(c * z * mm * mm + (z + c - 1.0) * mm + 1.0) < 1e-10);
    CHECK(mm.imag() > 0);
  }
  // Normalization -iy m(iy) -> 1.
  const cplx zz(0, 1e3);
  CHECK(std::abs(-zz * stieltjes_mp(zz, 0.5) - 1.0) < 1e-3);
}

TEST_CASE("Wigner sample agrees with semicircle transform") {
  auto s = ensembles::esd(ensembles::gen_wigner_real(2000, 1.0,
                                                     ensembles::Seed{17}));
  const cplx diff =
      stieltjes_empirical(s, cplx(0, 1)) - stieltjes_semicircle(cplx(0, 1));
  CHECK(std::abs(diff) < 0.02);
}

TEST_CASE("density inversion from the upper half plane") {
  auto dens = inverse_stieltjes_density(
      [](cplx z) { return stieltjes_semicircle(z); }, {0.0}, 1e-4);
  CHECK(dens[0] == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-3));
  auto dmp = inverse_stieltjes_density(
      [](cplx z) { return stieltjes_mp(z, 0.5); }, {1.0}, 1e-6);
  CHECK(dmp[0] == doctest::Approx(0.42110).epsilon(1e-3));
  auto outside = inverse_stieltjes_density(
      [](cplx z) { return stieltjes_mp(z, 0.5); }, {5.0}, 1e-6);
  CHECK(outside[0] < 1e-5);
}

TEST_CASE("companion identity") {
  const cplx z(0.3, 0.8);
  const cplx m_ab(0.1, 0.4);
  CHECK(std::abs(companion_ab_to_ba(m_ab, 5, 5, z) - m_ab) < 1e-15);
  // Round trip is exact algebra.
  const cplx ba = companion_ab_to_ba(m_ab, 1000, 2000, z);
  CHECK(std::abs(companion_ba_to_ab(ba, 1000, 2000, z) - m_ab) < 1e-12);
  // Eq-19-style form: m_companion = c m + (c-1)/z with c = N/n.
  const double c = 0.5;
  const cplx m = stieltjes_mp(z, c);
  const cplx comp = companion_ab_to_ba(m, 1000, 2000, z);
  CHECK(std::abs(comp - (c * m + (c - 1.0) / z)) < 1e-12);
  // Hand value: N=2, n=1, m_AB=i at z=i (note 1/i = -i).
  CHECK(std::abs(companion_ab_to_ba(cplx(0, 1), 2, 1, cplx(0, 1)) -
                 cplx(0, 1)) < 1e-14);
}

TEST_CASE("Silverstein fixed point: identity and scaled populations") {
  const double c = 0.5;
  const cplx z(0, 1);
  auto r = silverstein_fixed_point({{1.0, 1.0}}, c, z);
  CHECK(r.residual < 1e-10);
  const cplx expect = c * stieltjes_mp(z, c) + (c - 1.0) / z;
  CHECK(std::abs(r.m - expect) < 1e-8);

  auto r2 = silverstein_fixed_point({{2.0, 1.0}}, c, z);
  const cplx expect2 =
      c * stieltjes_mp(z, c, std::sqrt(2.0)) + (c - 1.0) / z;
  CHECK(std::abs(r2.m - expect2) < 1e-8);
}

TEST_CASE("Silverstein two-atom population vs sampled SCM") {
  const double c = 0.5;
  const int N = 500, n = 1000;
  std::vector<std::pair<double, double>> H{{1.0, 0.5}, {3.0, 0.5}};
  auto rz = silverstein_fixed_point(H, c, cplx(0, 1));
  CHECK(rz.residual < 1e-10);
  CHECK(rz.m.imag() > 0);

  // Density of the N-side spectrum via the companion identity.
  std::vector<double> xs, fs;
  for (double x = 0.01; x < 8.0; x += 0.01) {
    const cplx z(x, 1e-3);
    const cplx mf_comp = silverstein_fixed_point(H, c, z).m;
    const cplx mf = companion_ba_to_ab(mf_comp, N, n, z);
    xs.push_back(x);
    fs.push_back(std::max(0.0, mf.imag() / std::numbers::pi));
  }
  auto cdf = cdf_from_density(xs, fs);

  std::vector<double> pop;
  for (int i = 0; i < N; ++i) pop.push_back(i < N / 2 ? 1.0 : 3.0);
  auto sample =
      ensembles::esd(ensembles::gen_general_scm(pop, n, Field::Real,
                                                ensembles::Seed{23}));
  CHECK(sup_cdf_gap(xs, cdf, sample.eigenvalues) < 0.05);
}

TEST_CASE("S-transform closed forms") {
  for (double c : {0.5, 1.0}) {
    auto S = s_transform(carrier_mp(c));
    for (double w = -0.4; w <= 0.401; w += 0.1) {
      const cplx got = S.eval(cplx(w, 0));
      CHECK(std::abs(got - 1.0 / (1.0 + c * w)) < 1e-6);
    }
  }
  auto Spoint = s_transform(carrier_atoms({{1.0, 1.0}}));
  for (double w : {-0.3, 0.2, 0.45})
    CHECK(std::abs(Spoint.eval(cplx(w, 0)) - 1.0) < 1e-8);
}

TEST_CASE("R-transform closed forms") {
  for (double sigma : {1.0, 1.5}) {
    auto R = r_transform(carrier_semicircle(sigma));
    for (double w = -0.4; w <= 0.401; w += 0.1) {
      if (std::abs(w) < 1e-9) continue;
      CHECK(std::abs(R.eval(cplx(w, 0)) - sigma * sigma * w) < 1e-6);
    }
  }
}

TEST_CASE("free addition of semicircles") {
  auto R = free_add(r_transform(carrier_semicircle(1.0)),
                    r_transform(carrier_semicircle(2.0)));
  const double s = std::sqrt(5.0);
  std::vector<double> xs;
  for (double x = -2 * s + 0.01; x < 2 * s; x += 0.02) xs.push_back(x);
  auto fs = density_from_r(R, xs, 1e-5);
  auto cdf = cdf_from_density(xs, fs);
  laws::SemicircleLaw law(s);
  double gap = 0;
  for (size_t i = 0; i < xs.size(); ++i)
    gap = std::max(gap, std::abs(cdf[i] - law.cdf(xs[i])));
  CHECK(gap < 0.02);
}

TEST_CASE("free multiplication: MP round trip and product Wishart") {
  // Round trip: density_from_s(s_transform(MP(c))) recovers mp_pdf.
  const double c = 0.5;
  auto S = s_transform(carrier_mp(c));
  auto [a, b] = laws::mp_support(c);
  const double width = b - a;
  std::vector<double> xs;
  for (double x = a + 0.01 * width; x < b - 0.01 * width; x += width / 300)
    xs.push_back(x);
  auto fs = density_from_s(S, xs, 1e-6);
  double sup = 0;
  for (size_t i = 0; i < xs.size(); ++i)
    sup = std::max(sup, std::abs(fs[i] - laws::mp_pdf(xs[i], c)));
  CHECK(sup < 5e-3);

  // Free cube of MP(1) vs a sampled product Wishart (N=500, L=3).
  auto S1 = s_transform(carrier_mp(1.0));
  auto S3 = free_multiply(free_multiply(S1, S1), S1);
  std::vector<double> gx;
  for (double x = 1e-3; x < 11.0; x += (x < 0.2 ? 2e-3 : 0.02)) gx.push_back(x);
  auto gf = density_from_s(S3, gx, 1e-5);
  auto gcdf = cdf_from_density(gx, gf);

  const int N = 500;
  MatrixXd j = MatrixXd::Identity(N, N);
  for (int l = 0; l < 3; ++l)
    j = j * (ensembles::gen_iid_real(N, N, ensembles::Seed{200 + (unsigned)l}) /
             std::sqrt(double(N)));
  auto es = ensembles::esd(MatrixXd(j * j.transpose()));
  // Compare at the grid abscissae: the density diverges like x^{-3/4} at 0,
  // so sample points below the grid floor cannot be bracketed meaningfully.
  double gap = 0;
  for (size_t i = 0; i < gx.size(); ++i) {
    double emp = 0;
    for (double ev : es.eigenvalues)
      if (ev <= gx[i]) emp += 1.0 / N;
    gap = std::max(gap, std::abs(emp - gcdf[i]));
  }
  CHECK(gap < 0.05);
}

TEST_CASE("Stieltjes functions reconstructed from transforms are Herglotz") {
  auto S = s_transform(carrier_mp(0.5));
  auto m = stieltjes_from_s(S);
  for (double x : {0.3, 1.0, 2.0}) {
    const cplx v = m(cplx(x, 1e-3));
    CHECK(v.imag() > 0);
  }
  auto R = r_transform(carrier_semicircle(1.0));
  auto mr = stieltjes_from_r(R);
  CHECK(mr(cplx(0.0, 1e-3)).imag() > 0);
}
