#pragma once
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rmt {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using cplx = std::complex<double>;

enum class Field { Real, Complex };

// Eigenvalues of one random matrix draw, sorted ascending.
struct SpectralSample {
  std::vector<double> eigenvalues;
  int dim = 0;
  Field field = Field::Real;
};

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RangeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw RangeError(msg);
}

}  // namespace rmt
