#pragma once
// Closed-form limiting spectral laws: semicircle and Marchenko-Pastur, with
// cdf/quantile machinery and Kolmogorov-Smirnov goodness of fit.

#include <memory>
#include <utility>

#include "rmt/ensembles.hpp"
#include "rmt/types.hpp"

namespace rmt::laws {

class Law {
 public:
  virtual ~Law() = default;
  virtual double pdf(double x) const = 0;
  // Includes any point mass at 0 (right-continuous cdf).
  virtual double cdf(double x) const = 0;
  virtual std::pair<double, double> support() const = 0;
  virtual double quantile(double p) const = 0;
  virtual double atom_at_zero() const { return 0.0; }

  std::vector<double> sample(int n, ensembles::Seed seed) const;
};

class SemicircleLaw final : public Law {
 public:
  explicit SemicircleLaw(double sigma);
  double pdf(double x) const override;
  double cdf(double x) const override;
  std::pair<double, double> support() const override {
    return {-2 * sigma_, 2 * sigma_};
  }
  double quantile(double p) const override;
  double sigma() const { return sigma_; }

 private:
  double sigma_;
};

class MPLaw final : public Law {
 public:
  MPLaw(double c, double sigma = 1.0);
  double pdf(double x) const override;
  double cdf(double x) const override;
  std::pair<double, double> support() const override { return {a_, b_}; }
  double quantile(double p) const override;
  double atom_at_zero() const override { return atom_; }
  double c() const { return c_; }
  double sigma() const { return sigma_; }

 private:
  double c_, sigma_, a_, b_, atom_;
  // Cumulative mass of the continuous part on a sin^2-substituted grid.
  std::vector<double> theta_, cum_;
};

double semicircle_pdf(double x, double sigma);
double mp_pdf(double x, double c, double sigma = 1.0);
double mp_mass_at_zero(double c);
std::pair<double, double> mp_support(double c, double sigma = 1.0);

// sup_x |ecdf(x) - law.cdf(x)|, evaluated from both sides at sample points.
double ks_distance(const SpectralSample& sample, const Law& law);
double ks_distance(const std::vector<double>& sorted_sample, const Law& law);

SpectralSample law_sample(const Law& law, int n, ensembles::Seed seed);

// KS against a generic cdf (used for normality and Tracy-Widom checks).
double ks_distance_cdf(std::vector<double> sample,
                       const std::function<double(double)>& cdf);

}  // namespace rmt::laws
