#pragma once
// Stieltjes-transform calculus and free-probability composition.
//
// Conventions: m(z) = integral dF(t)/(t - z) is the Stieltjes transform
// (Herglotz: Im m > 0 for Im z > 0); G = -m is the Cauchy transform used for
// the R-transform; M(z) = -z m(z) - 1 collects the moment series
// sum_k mu_k z^{-k}.  S(w) = (1+w)/(w M^{-1}(w)) and R(w) = G^{-1}(w) - 1/w.

#include <functional>
#include <memory>
#include <utility>

#include "rmt/types.hpp"

namespace rmt::transforms {

cplx stieltjes_empirical(const SpectralSample& sample, cplx z);
cplx stieltjes_semicircle(cplx z, double sigma = 1.0);
cplx stieltjes_mp(cplx z, double c, double sigma = 1.0);

std::vector<double> inverse_stieltjes_density(
    const std::function<cplx(cplx)>& m, const std::vector<double>& xs,
    double eps);

// (n/N) m_BA(z) = m_AB(z) + ((N-n)/N)(1/z), AB being N x N and BA n x n.
cplx companion_ab_to_ba(cplx m_ab, int N, int n, cplx z);
cplx companion_ba_to_ab(cplx m_ba, int N, int n, cplx z);

// Companion transform of the general sample covariance T^{1/2}XX^H T^{1/2}/n
// with population law H given as (value, weight) atoms and c = N/n:
// m = -(z - c * integral t/(1+t m) dH(t))^{-1}, the Herglotz root.
struct FixedPointResult {
  cplx m;
  double residual;
  int iterations;
};
FixedPointResult silverstein_fixed_point(
    const std::vector<std::pair<double, double>>& pop_atoms, double c, cplx z,
    double tol = 1e-10, int max_iter = 10000);

// A spectral law carried by its analytic Stieltjes transform.
class Carrier {
 public:
  virtual ~Carrier() = default;
  virtual cplx m(cplx z) const = 0;  // valid for Im z != 0 and real z off-support
  virtual double mean() const = 0;
};

std::shared_ptr<Carrier> carrier_semicircle(double sigma);
std::shared_ptr<Carrier> carrier_mp(double c, double sigma = 1.0);
std::shared_ptr<Carrier> carrier_atoms(
    std::vector<std::pair<double, double>> atoms);  // (value, weight)

// Evaluable transform with a first-moment hint for asymptotic starts.
struct Transform {
  std::function<cplx(cplx)> eval;
  double mean = 1.0;
};

Transform s_transform(std::shared_ptr<Carrier> law);
Transform r_transform(std::shared_ptr<Carrier> law);
Transform free_multiply(const Transform& s1, const Transform& s2);
Transform free_add(const Transform& r1, const Transform& r2);

// Recover spectral densities on a grid by numerically re-inverting the
// transform chain back to a Stieltjes function at z = x + i*eps.
std::vector<double> density_from_s(const Transform& s,
                                   const std::vector<double>& xs,
                                   double eps = 1e-6);
std::vector<double> density_from_r(const Transform& r,
                                   const std::vector<double>& xs,
                                   double eps = 1e-6);

// Stieltjes transforms derived from the S/R objects (used by nn module).
std::function<cplx(cplx)> stieltjes_from_s(const Transform& s);
std::function<cplx(cplx)> stieltjes_from_r(const Transform& r);

}  // namespace rmt::transforms
