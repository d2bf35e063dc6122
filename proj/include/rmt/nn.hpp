#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "rmt/ensembles.hpp"
#include "rmt/types.hpp"

namespace rmt::nn {

// Pointwise activation with its derivative.  At a kink the derivative takes
// the value of the segment to the left, which is measure-zero under the
// Gaussian pre-activations and therefore spectrally irrelevant, but keeps
// every draw deterministic.
enum class ActKind { Linear, Relu, HardTanh, Tanh, ShiftedAbsFamily, Custom };

struct Activation {
  ActKind kind = ActKind::Linear;
  double alpha = 0.0;  // family parameter for ShiftedAbsFamily
  std::function<double(double)> f;
  std::function<double(double)> df;
};

Activation act_linear();
Activation act_relu();
Activation act_hard_tanh();
Activation act_tanh();
Activation act_custom(std::function<double(double)> f,
                      std::function<double(double)> df);

// Zero-Gaussian-mean, unit-second-moment blend of x^+ and -alpha x^-;
// alpha = -1 is linear, alpha = 1 the shifted absolute value.
Activation f_alpha(double alpha);

enum class WeightEnsemble { Gaussian, Orthogonal };

struct NetConfig {
  int L = 1;
  int N = 100;
  double sigma_w2 = 1.0;
  double sigma_b2 = 0.0;
  WeightEnsemble ensemble = WeightEnsemble::Gaussian;
  Activation activation = act_linear();
  std::optional<double> q_star_override;
};

// E[g(sqrt(q) h)] for standard normal h, by Gauss-Hermite quadrature.
double gauss_expect(const std::function<double(double)>& g, double q,
                    int nodes = 201);

// Fixed point of the layer-to-layer pre-activation variance map
// q -> sigma_w^2 E[phi(sqrt(q) h)^2] + sigma_b^2.
double q_star(const NetConfig& cfg);

// The same map iterated from an arbitrary start; returns q^1..q^layers.
std::vector<double> propagate_q(const NetConfig& cfg, double q0, int layers);

// Mean squared singular value of D W, the gradient growth rate per layer.
double chi(const NetConfig& cfg, double q);

// Probability that the activation slope equals one at pre-activation
// variance q; defined for piecewise-linear activations with unit slope.
double p_linear(const Activation& act, double q);

// Squared singular values of the input-output Jacobian of one random draw.
SpectralSample jacobian_empirical(const NetConfig& cfg, ensembles::Seed seed);

struct JacobianTheory {
  double lambda_max = 1.0;
  double variance = 0.0;
};
// Closed forms under the criticality normalization sigma_w^2 p(q*) = 1.
JacobianTheory jacobian_theory(const NetConfig& cfg);

// Limit density of the squared Jacobian singular values on a grid, via the
// multiplicative free convolution of the weight and slope-squared laws.
std::vector<double> jacobian_density_free(const NetConfig& cfg,
                                          const std::vector<double>& grid);

// Loss-surface curvature model: a rank-constrained positive part plus an
// error-driven symmetric part, freely added.
struct HessianModelParams {
  double epsilon = 0.0;  // error energy; sets the symmetric part's scale
  double c = 0.5;        // parameters per sample
  double sigma = 1.0;    // refined-model scale knob
};

std::vector<double> hessian_density(const HessianModelParams& params,
                                    const std::vector<double>& grid,
                                    bool refined = false);
SpectralSample hessian_sample(const HessianModelParams& params, int n,
                              ensembles::Seed seed);
// Fraction of negative curvature directions.
double normalized_index(const HessianModelParams& params, bool refined = false);
// Energy below which the negative fraction vanishes.
double epsilon_c(double c, bool refined = false, double sigma = 1.0);

// Second-moment and squared-mean-slope constants of an activation under
// pre-activation scale s = sigma_w * sigma_x; requires zero Gaussian mean.
struct EtaZeta {
  double eta = 0.0;
  double zeta = 0.0;
};
EtaZeta eta_zeta(const Activation& act, double s = 1.0);

// Stieltjes transform of the limiting output-covariance spectrum of a
// single nonlinear layer (Im z > 0; Herglotz convention).
cplx datacov_stieltjes(cplx z, double eta, double zeta, double xi, double psi);

// Eigenvalues of (1/m) Y Y^T after L layers of width n1 on Gaussian data.
SpectralSample datacov_empirical(const Activation& act, int L, int n0, int n1,
                                 int m, double sigma_w2, double sigma_x2,
                                 ensembles::Seed seed);

inline constexpr std::uint64_t kStreamNnBias = 0x4E4E4249;
inline constexpr std::uint64_t kStreamNnInput = 0x4E4E4950;

}  // namespace rmt::nn
