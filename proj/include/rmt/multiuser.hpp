#pragma once

#include <vector>

#include "rmt/ensembles.hpp"
#include "rmt/types.hpp"

namespace rmt::multiuser {

struct PowerAtom {
  double power = 1.0;
  double weight = 1.0;
};

struct SystemProfile {
  double c = 0.5;              // K/N
  double noise_power = 0.1;    // sigma_u^2
  std::vector<PowerAtom> power_dist = {{1.0, 1.0}};
  Field field = Field::Complex;
  double fourth_moment = 3.0;  // E|v11|^4 (3 kills the kurtosis correction)
};

enum class Receiver { MRC, ZF, MMSE };

// Per-user linear signal extractors, one column per user.  Channels are
// the columns of h; powers are the users' average receive powers.
MatrixXd build_receiver(Receiver kind, const MatrixXd& h,
                        const VectorXd& powers, double sigma_u2);
MatrixXcd build_receiver(Receiver kind, const MatrixXcd& h,
                         const VectorXd& powers, double sigma_u2);

// Output SINR of user k for extractor column w_k (0-based k).
double output_sinr(const MatrixXd& w, const MatrixXd& h,
                   const VectorXd& powers, double sigma_u2, int k);
double output_sinr(const MatrixXcd& w, const MatrixXcd& h,
                   const VectorXd& powers, double sigma_u2, int k);

// All K users' MMSE output SINRs from one matrix factorization.
VectorXd mmse_sinr_all(const MatrixXcd& h, const VectorXd& powers,
                       double sigma_u2);

// Large-system limits of the output SINR.
double limit_sinr_mrc(double pk, const SystemProfile& profile);
double limit_sinr_zf(double pk, double c, double sigma_u2);
double limit_sinr_mmse(double pk, const SystemProfile& profile);

// Equal-power MMSE limit as an explicit function of the receive power.
double mmse_equal_power_limit(double p, double sigma_u2, double c);

struct CltParams {
  double mean = 0.0;
  double variance = 0.0;  // of the sqrt(N)-scaled fluctuation
};
CltParams clt_params_zf(double p1, double sigma_u2, double c,
                        double fourth_moment);
CltParams clt_params_mmse(double p, double sigma_u2, double c,
                          double fourth_moment, Field field);

// Iterative decision-feedback limits: entry l of the schedule is the
// decision-correlation coefficient in force at iteration l (0 = cold start).
std::vector<double> bigdfe_limit_sinr(double p, double sigma_u2, double c,
                                      const std::vector<double>& rho);

// Finite-size QPSK simulation of the same iteration; returns the empirical
// per-iteration SINR averaged over users.
std::vector<double> bigdfe_simulate(const MatrixXcd& h, double p,
                                    double sigma_u2,
                                    const std::vector<double>& rho,
                                    int symbols, ensembles::Seed seed);

inline constexpr std::uint64_t kStreamBigdfe = 0x42494744ull;

}  // namespace rmt::multiuser
