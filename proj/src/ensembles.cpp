#include "rmt/ensembles.hpp"

#include <algorithm>
#include <cmath>

#include "rmt/linalg.hpp"

namespace rmt::ensembles {

MatrixXd gen_wigner_real(int n, double sigma, Seed seed) {
  require(n >= 1, "gen_wigner: n must be positive");
  require(sigma > 0, "gen_wigner: sigma must be positive");
  CounterRng rng(seed.value, kStreamWigner);
  const double sd = sigma / std::sqrt(static_cast<double>(n));
  MatrixXd w(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const double v = sd * rng.normal(static_cast<std::uint64_t>(i) * n + j);
      w(i, j) = v;
      w(j, i) = v;
    }
  return w;
}

MatrixXcd gen_wigner_complex(int n, double sigma, Seed seed) {
  require(n >= 1, "gen_wigner: n must be positive");
  require(sigma > 0, "gen_wigner: sigma must be positive");
  CounterRng rng(seed.value, kStreamWigner);
  const double sd = sigma / std::sqrt(static_cast<double>(n));
  MatrixXcd w(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const std::uint64_t idx = static_cast<std::uint64_t>(i) * n + j;
      if (i == j) {
        w(i, i) = sd * rng.normal(idx);
      } else {
        const cplx v = sd * rng.cnormal(idx);
        w(i, j) = v;
        w(j, i) = std::conj(v);
      }
    }
  }
  return w;
}

AnyMatrix gen_wigner(int n, double sigma, Field field, Seed seed) {
  AnyMatrix out;
  out.field = field;
  if (field == Field::Real)
    out.r = gen_wigner_real(n, sigma, seed);
  else
    out.c = gen_wigner_complex(n, sigma, seed);
  return out;
}

MatrixXd gen_iid_real(int N, int n, Seed seed) {
  require(N >= 1 && n >= 1, "gen_iid_matrix: dimensions must be positive");
  CounterRng rng(seed.value, kStreamIid);
  MatrixXd x(N, n);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < n; ++j)
      x(i, j) = rng.normal(static_cast<std::uint64_t>(i) * n + j);
  return x;
}

MatrixXcd gen_iid_complex(int N, int n, Seed seed) {
  require(N >= 1 && n >= 1, "gen_iid_matrix: dimensions must be positive");
  CounterRng rng(seed.value, kStreamIid);
  MatrixXcd x(N, n);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < n; ++j)
      x(i, j) = rng.cnormal(static_cast<std::uint64_t>(i) * n + j);
  return x;
}

AnyMatrix gen_iid_matrix(int N, int n, Field field, Seed seed) {
  AnyMatrix out;
  out.field = field;
  if (field == Field::Real)
    out.r = gen_iid_real(N, n, seed);
  else
    out.c = gen_iid_complex(N, n, seed);
  return out;
}

AnyMatrix gen_general_scm(const std::vector<double>& pop_spectrum, int n,
                          Field field, Seed seed) {
  const int N = static_cast<int>(pop_spectrum.size());
  require(N >= 1, "gen_general_scm: empty population spectrum");
  for (double t : pop_spectrum)
    require(t >= 0, "gen_general_scm: negative population eigenvalue");
  VectorXd sq(N);
  for (int i = 0; i < N; ++i) sq[i] = std::sqrt(pop_spectrum[i]);
  AnyMatrix out;
  out.field = field;
  if (field == Field::Real) {
    MatrixXd x = gen_iid_real(N, n, seed);
    x = sq.asDiagonal() * x;
    out.r = (x * x.transpose()) / static_cast<double>(n);
  } else {
    MatrixXcd x = gen_iid_complex(N, n, seed);
    x = sq.asDiagonal() * x;
    out.c = (x * x.adjoint()) / static_cast<double>(n);
  }
  return out;
}

std::vector<double> spiked_population(const SpikeSpec& spikes, int N) {
  require(spikes.values.size() == spikes.multiplicities.size(),
          "SpikeSpec: values/multiplicities length mismatch");
  std::vector<double> pop;
  pop.reserve(N);
  for (size_t j = 0; j < spikes.values.size(); ++j) {
    require(spikes.values[j] > 0, "SpikeSpec: spikes must be positive");
    require(spikes.multiplicities[j] >= 1, "SpikeSpec: multiplicity >= 1");
    for (int r = 0; r < spikes.multiplicities[j]; ++r)
      pop.push_back(spikes.values[j]);
  }
  require(static_cast<int>(pop.size()) <= N,
          "SpikeSpec: total multiplicity exceeds N");
  pop.resize(N, 1.0);
  return pop;
}

AnyMatrix gen_spiked_scm(const SpikeSpec& spikes, int N, int n, Field field,
                         Seed seed) {
  return gen_general_scm(spiked_population(spikes, N), n, field, seed);
}

MatrixXd gen_orthogonal(int n, double sigma_w, Seed seed) {
  require(n >= 1, "gen_orthogonal: n must be positive");
  CounterRng rng(seed.value, kStreamOrtho);
  MatrixXd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      g(i, j) = rng.normal(static_cast<std::uint64_t>(i) * n + j);
  Eigen::HouseholderQR<MatrixXd> qr(g);
  MatrixXd q = qr.householderQ();
  // Sign-of-R-diagonal correction makes the distribution exactly Haar.
  MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  return sigma_w * q;
}

SpectralSample gen_gue(int k, Seed seed) {
  require(k >= 1, "gen_gue: k must be positive");
  CounterRng rng(seed.value, kStreamGue);
  MatrixXcd h(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j) {
      const std::uint64_t idx = static_cast<std::uint64_t>(i) * k + j;
      if (i == j) {
        h(i, i) = rng.normal(idx);
      } else {
        const cplx v = rng.cnormal(idx);  // |v|^2 has mean 1
        h(i, j) = v;
        h(j, i) = std::conj(v);
      }
    }
  SpectralSample s;
  s.dim = k;
  s.field = Field::Complex;
  VectorXd ev = linalg::herm_eigenvalues(h);
  s.eigenvalues.assign(ev.data(), ev.data() + k);
  return s;
}

namespace {

template <typename Mat>
void check_hermitian(const Mat& a) {
  require(a.rows() == a.cols(), "esd: matrix must be square");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  const double dev = (a - a.adjoint()).cwiseAbs().maxCoeff();
  if (dev > 1e-8 * scale)
    throw RangeError("esd: matrix is not Hermitian within tolerance");
}

}  // namespace

SpectralSample esd(const MatrixXd& a) {
  check_hermitian(a);
  MatrixXd sym = 0.5 * (a + a.transpose());
  SpectralSample s;
  s.dim = static_cast<int>(a.rows());
  s.field = Field::Real;
  VectorXd ev = linalg::sym_eigenvalues(sym);
  s.eigenvalues.assign(ev.data(), ev.data() + s.dim);
  return s;
}

SpectralSample esd(const MatrixXcd& a) {
  check_hermitian(a);
  MatrixXcd herm = 0.5 * (a + a.adjoint());
  SpectralSample s;
  s.dim = static_cast<int>(a.rows());
  s.field = Field::Complex;
  VectorXd ev = linalg::herm_eigenvalues(herm);
  s.eigenvalues.assign(ev.data(), ev.data() + s.dim);
  return s;
}

SpectralSample esd(const AnyMatrix& a) {
  return a.field == Field::Real ? esd(a.r) : esd(a.c);
}

}  // namespace rmt::ensembles
