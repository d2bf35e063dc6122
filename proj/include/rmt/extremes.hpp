#pragma once

#include <utility>
#include <vector>

#include "rmt/ensembles.hpp"
#include "rmt/types.hpp"

namespace rmt::extremes {

// Ai and Ai' on [-15, 15]; arguments outside that window are rejected.
double airy(double x);
double airy_deriv(double x);

// Hastings-McLeod solution of q'' = t q + 2 q^3 with q ~ Ai at +infinity,
// tabulated on a uniform descending grid from t_max down to t_min.
struct Painleve2Solution {
  std::vector<double> t;   // descending, uniform
  std::vector<double> q;
  std::vector<double> qp;  // q'
};

Painleve2Solution solve_painleve2(double t_max = 8.0, double t_min = -10.0,
                                  double tol = 1e-10);

// Tracy-Widom distribution of order 1 or 2, built from the Painleve II
// tabulation once and evaluated by monotone interpolation afterwards.
class TWLaw {
 public:
  explicit TWLaw(int order);

  int order() const { return order_; }
  double cdf(double t) const;
  double quantile(double p) const;  // p in (1e-6, 1 - 1e-6)

  // Shared immutable instances (built on first use).
  static const TWLaw& order1();
  static const TWLaw& order2();

  const std::vector<double>& grid() const { return t_; }

 private:
  int order_;
  std::vector<double> t_;    // ascending
  std::vector<double> cdf_;  // monotone
};

enum class Which { Max, Min };

// Centering/scaling constants standardizing an extreme sample-covariance
// eigenvalue (SCM convention (1/n) X X^H, X is N x n) so that
// (lambda - center) / scale converges to Tracy-Widom of the given order.
// `alternate` switches the scale to the symmetric-in-(N,n) variant.
struct ExtremeScaling {
  double center;
  double scale;  // signed: negative for the smallest eigenvalue
  int order;     // 1 real, 2 complex
};

ExtremeScaling wishart_extreme_scaling(int N, int n, Which which, Field field,
                                       bool alternate = false);

// Bulk edges (1 -+ sqrt(c))^2 that the extreme eigenvalues converge to.
std::pair<double, double> extreme_limits(double c);

// Samples of -(X+ + X-)/2 where X+ ~ TW2 and X- is an independent copy of
// -X+; the limit law of N^{2/3}(lambda_max/lambda_min + 1) for Wigner.
std::vector<double> condition_number_limit_sampler(ensembles::Seed seed,
                                                   int trials);

inline constexpr std::uint64_t kStreamCondition = 0x434F4E44ull;

}  // namespace rmt::extremes
