#pragma once
// Seeded random-matrix ensemble generators and empirical spectra.
//
// Every generator is a pure function of (parameters, seed): entry (i,j) of a
// draw is produced from a fixed per-generator stream id and counter i*cols+j,
// so outputs are bit-identical across platforms and evaluation orders.

#include <cstdint>

#include "rmt/rng.hpp"
#include "rmt/types.hpp"

namespace rmt::ensembles {

struct Seed {
  std::uint64_t value = 42;
};

// Population spikes alpha_1 > alpha_2 > ... with multiplicities.
struct SpikeSpec {
  std::vector<double> values;
  std::vector<int> multiplicities;
};

// Real or complex dense matrix behind one type, for field-generic call sites.
struct AnyMatrix {
  Field field = Field::Real;
  MatrixXd r;
  MatrixXcd c;

  Eigen::Index rows() const { return field == Field::Real ? r.rows() : c.rows(); }
  Eigen::Index cols() const { return field == Field::Real ? r.cols() : c.cols(); }
};

// Stream ids; offsets keep independent draws within one operation disjoint.
inline constexpr std::uint64_t kStreamWigner = 0x57494752;   // wigner entries
inline constexpr std::uint64_t kStreamIid = 0x49494431;      // iid rectangular
inline constexpr std::uint64_t kStreamOrtho = 0x4F525448;    // orthogonal draws
inline constexpr std::uint64_t kStreamGue = 0x47554531;      // GUE entries

// Hermitian Wigner matrix; off-diagonal entry variance sigma^2/n.
MatrixXd gen_wigner_real(int n, double sigma, Seed seed);
MatrixXcd gen_wigner_complex(int n, double sigma, Seed seed);
AnyMatrix gen_wigner(int n, double sigma, Field field, Seed seed);

// N x n matrix of i.i.d. unit-variance entries.
MatrixXd gen_iid_real(int N, int n, Seed seed);
MatrixXcd gen_iid_complex(int N, int n, Seed seed);
AnyMatrix gen_iid_matrix(int N, int n, Field field, Seed seed);

// T^{1/2} (1/n) X X^H T^{1/2} with diagonal population T = pop_spectrum.
// Shares the iid stream, so pop_spectrum == ones reproduces the null Wishart
// built from gen_iid_matrix under the same seed.
AnyMatrix gen_general_scm(const std::vector<double>& pop_spectrum, int n,
                          Field field, Seed seed);

AnyMatrix gen_spiked_scm(const SpikeSpec& spikes, int N, int n, Field field,
                         Seed seed);

// Population spectrum encoded by a SpikeSpec (spikes then trailing ones).
std::vector<double> spiked_population(const SpikeSpec& spikes, int N);

// Haar-direction orthogonal matrix scaled so W^T W = sigma_w^2 I.
MatrixXd gen_orthogonal(int n, double sigma_w, Seed seed);

// Eigenvalues of a k x k GUE matrix (weight exp(-tr H^2/2)).
SpectralSample gen_gue(int k, Seed seed);

// Sorted eigenvalues; the input must be Hermitian within 1e-8 relative.
SpectralSample esd(const AnyMatrix& a);
SpectralSample esd(const MatrixXd& a);
SpectralSample esd(const MatrixXcd& a);

}  // namespace rmt::ensembles
