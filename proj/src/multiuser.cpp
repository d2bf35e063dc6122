#include "rmt/multiuser.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>

#include "rmt/rng.hpp"

namespace rmt::multiuser {

namespace {

void check_profile(const SystemProfile& p) {
  require(p.c > 0, "profile: c must be positive");
  require(p.noise_power > 0, "profile: noise power must be positive");
  require(!p.power_dist.empty(), "profile: empty power distribution");
  double w = 0;
  for (const auto& a : p.power_dist) {
    require(a.power > 0, "profile: powers must be positive");
    require(a.weight >= 0, "profile: weights must be nonnegative");
    w += a.weight;
  }
  require(std::abs(w - 1.0) < 1e-9, "profile: weights must sum to 1");
  require(p.fourth_moment >= 1.0, "profile: fourth moment must be >= 1");
}

template <typename Mat>
Mat build_receiver_impl(Receiver kind, const Mat& h, const VectorXd& powers,
                        double sigma_u2) {
  const int K = static_cast<int>(h.cols());
  require(powers.size() == K, "build_receiver: powers size mismatch");
  require(sigma_u2 > 0, "build_receiver: noise power must be positive");
  switch (kind) {
    case Receiver::MRC: {
      Mat w = h;
      for (int k = 0; k < K; ++k) w.col(k) /= h.col(k).squaredNorm();
      return w;
    }
    case Receiver::ZF: {
      require(h.rows() >= h.cols(), "build_receiver: ZF needs N >= K");
      const Mat g = h.adjoint() * h;
      Eigen::FullPivLU<Mat> lu(g);
      require(lu.isInvertible(), "build_receiver: rank-deficient channel");
      return h * lu.inverse();
    }
    case Receiver::MMSE: {
      Mat a = h * powers.asDiagonal() * h.adjoint();
      a.diagonal().array() += sigma_u2;
      const Mat ainv = a.llt().solve(Mat::Identity(h.rows(), h.rows()));
      Mat w = ainv * h;
      for (int k = 0; k < K; ++k) w.col(k) *= powers(k);
      return w;
    }
  }
  throw RangeError("build_receiver: unknown receiver");
}

template <typename Mat>
double output_sinr_impl(const Mat& w, const Mat& h, const VectorXd& powers,
                        double sigma_u2, int k) {
  const int K = static_cast<int>(h.cols());
  require(k >= 0 && k < K, "output_sinr: user index out of range");
  require(w.rows() == h.rows() && w.cols() == K,
          "output_sinr: shape mismatch");
  const auto wk = w.col(k);
  const double num =
      powers(k) * std::norm(std::complex<double>(wk.dot(h.col(k))));
  require(num > 0, "output_sinr: zero signal response");
  double den = sigma_u2 * wk.squaredNorm();
  for (int j = 0; j < K; ++j) {
    if (j == k) continue;
    den += powers(j) * std::norm(std::complex<double>(wk.dot(h.col(j))));
  }
  return num / den;
}

}  // namespace

MatrixXd build_receiver(Receiver kind, const MatrixXd& h,
                        const VectorXd& powers, double sigma_u2) {
  return build_receiver_impl(kind, h, powers, sigma_u2);
}
MatrixXcd build_receiver(Receiver kind, const MatrixXcd& h,
                         const VectorXd& powers, double sigma_u2) {
  return build_receiver_impl(kind, h, powers, sigma_u2);
}
double output_sinr(const MatrixXd& w, const MatrixXd& h,
                   const VectorXd& powers, double sigma_u2, int k) {
  return output_sinr_impl(w, h, powers, sigma_u2, k);
}
double output_sinr(const MatrixXcd& w, const MatrixXcd& h,
                   const VectorXd& powers, double sigma_u2, int k) {
  return output_sinr_impl(w, h, powers, sigma_u2, k);
}

VectorXd mmse_sinr_all(const MatrixXcd& h, const VectorXd& powers,
                       double sigma_u2) {
  const int K = static_cast<int>(h.cols());
  require(powers.size() == K, "mmse_sinr_all: powers size mismatch");
  MatrixXcd a = h * powers.asDiagonal() * h.adjoint();
  a.diagonal().array() += sigma_u2;
  const Eigen::LLT<MatrixXcd> llt(a);
  VectorXd out(K);
  for (int k = 0; k < K; ++k) {
    // t = p_k h_k^H A^{-1} h_k with A including user k; remove the user's
    // own contribution via t / (1 - t).
    const VectorXcd s = llt.solve(h.col(k));
    const double t = powers(k) * s.dot(h.col(k)).real();
    out(k) = t / (1.0 - t);
  }
  return out;
}

double limit_sinr_mrc(double pk, const SystemProfile& profile) {
  check_profile(profile);
  require(pk > 0, "limit_sinr_mrc: pk must be positive");
  double mean_p = 0;
  for (const auto& a : profile.power_dist) mean_p += a.power * a.weight;
  return pk / (profile.c * mean_p + profile.noise_power);
}

double limit_sinr_zf(double pk, double c, double sigma_u2) {
  require(pk > 0 && c > 0 && sigma_u2 > 0,
          "limit_sinr_zf: arguments must be positive");
  return c < 1.0 ? pk / sigma_u2 * (1.0 - c) : 0.0;
}

double mmse_equal_power_limit(double p, double sigma_u2, double c) {
  require(p > 0 && sigma_u2 > 0 && c > 0,
          "mmse_equal_power_limit: arguments must be positive");
  const double s = p / sigma_u2;
  return (1.0 - c) * s / 2.0 - 0.5 +
         std::sqrt((1.0 - c) * (1.0 - c) * s * s / 4.0 +
                   (1.0 + c) * s / 2.0 + 0.25);
}

double limit_sinr_mmse(double pk, const SystemProfile& profile) {
  check_profile(profile);
  require(pk > 0, "limit_sinr_mmse: pk must be positive");
  auto rhs = [&](double g) {
    double intf = 0;
    for (const auto& a : profile.power_dist)
      intf += pk * a.power * a.weight / (pk + a.power * g);
    return pk / (profile.noise_power + profile.c * intf);
  };
  double g = pk / profile.noise_power;  // start at the single-user bound
  for (int it = 0; it < 100000; ++it) {
    const double next = rhs(g);
    if (std::abs(next - g) < 1e-14 * std::max(1.0, g)) {
      g = next;
      break;
    }
    g = 0.5 * (g + next);
  }
  require(std::abs(rhs(g) - g) < 1e-10,
          "limit_sinr_mmse: fixed point did not converge");
  return g;
}

CltParams clt_params_zf(double p1, double sigma_u2, double c,
                        double fourth_moment) {
  require(c > 0 && c < 1, "clt_params_zf: requires 0 < c < 1");
  require(p1 > 0 && sigma_u2 > 0, "clt_params_zf: arguments must be positive");
  const double a =
      2.0 * (1.0 - c) + (fourth_moment - 3.0) * (1.0 - c) * (1.0 - c);
  const double r = p1 / sigma_u2;
  return {r * (1.0 - c), r * r * a};
}

CltParams clt_params_mmse(double p, double sigma_u2, double c,
                          double fourth_moment, Field field) {
  require(c > 0, "clt_params_mmse: c must be positive");
  const double g = mmse_equal_power_limit(p, sigma_u2, c);
  const double onep = (1.0 + g) * (1.0 + g);
  double b = 2.0 * g * onep / (sigma_u2 / p * onep + c) +
             (fourth_moment - 3.0) * g * g;
  if (field == Field::Complex) b *= 0.5;
  return {g, b};
}

std::vector<double> bigdfe_limit_sinr(double p, double sigma_u2, double c,
                                      const std::vector<double>& rho) {
  std::vector<double> out;
  for (double r : rho) {
    require(r >= 0.0 && r < 1.0, "bigdfe_limit_sinr: rho must be in [0, 1)");
    const double f = 1.0 - r * r;
    out.push_back(mmse_equal_power_limit(f * p, sigma_u2, c) / f);
  }
  return out;
}

std::vector<double> bigdfe_simulate(const MatrixXcd& h, double p,
                                    double sigma_u2,
                                    const std::vector<double>& rho,
                                    int symbols, ensembles::Seed seed) {
  const int N = static_cast<int>(h.rows());
  const int K = static_cast<int>(h.cols());
  require(symbols >= 1, "bigdfe_simulate: need at least one symbol");
  require(p > 0 && sigma_u2 > 0,
          "bigdfe_simulate: powers must be positive");

  // QPSK symbols at power p and the received block.
  const CounterRng rng(seed.value, kStreamBigdfe);
  const double amp = std::sqrt(p / 2.0);
  MatrixXcd s(K, symbols);
  for (int j = 0; j < symbols; ++j)
    for (int k = 0; k < K; ++k) {
      const std::uint64_t idx = 2ull * (std::uint64_t(j) * K + k);
      s(k, j) = {rng.uniform(idx) < 0.5 ? -amp : amp,
                 rng.uniform(idx + 1) < 0.5 ? -amp : amp};
    }
  MatrixXcd u(N, symbols);
  const CounterRng nrng(substream(seed.value, 1), kStreamBigdfe);
  const double ns = std::sqrt(sigma_u2);
  for (int j = 0; j < symbols; ++j)
    for (int i = 0; i < N; ++i)
      u(i, j) = ns * nrng.cnormal(std::uint64_t(j) * N + i);
  const MatrixXcd x = h * s + u;

  MatrixXcd sbar = MatrixXcd::Zero(K, symbols);  // previous hard decisions
  std::vector<double> out;
  for (double r : rho) {
    require(r >= 0.0 && r < 1.0, "bigdfe_simulate: rho must be in [0, 1)");
    const double f = 1.0 - r * r;
    MatrixXcd a = f * (h * h.adjoint());
    a.diagonal().array() += sigma_u2 / p;
    const MatrixXcd ffe = a.llt().solve(h);  // F_l
    const MatrixXcd fh = ffe.adjoint() * h;  // F_l^H H
    const VectorXcd diag = fh.diagonal();    // A_l
    MatrixXcd off = fh;
    off.diagonal().setZero();                // F^H H - A_l (sign-flipped FBE)

    // shat = F^H x - rho (F^H H - A) sbar.
    const MatrixXcd shat = ffe.adjoint() * x - r * (off * sbar);

    double acc = 0;
    for (int k = 0; k < K; ++k) {
      double err = 0;
      for (int j = 0; j < symbols; ++j)
        err += std::norm(shat(k, j) - diag(k) * s(k, j));
      acc += std::norm(diag(k)) * p / (err / symbols);
    }
    out.push_back(acc / K);

    for (int j = 0; j < symbols; ++j)
      for (int k = 0; k < K; ++k)
        sbar(k, j) = {shat(k, j).real() < 0 ? -amp : amp,
                      shat(k, j).imag() < 0 ? -amp : amp};
  }
  return out;
}

}  // namespace rmt::multiuser
