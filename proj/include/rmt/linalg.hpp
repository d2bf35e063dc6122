#pragma once
// Dense symmetric/Hermitian eigenvalue helpers (LAPACK-backed) and a Lanczos
// routine for extreme eigenvalues of large implicit operators.

#include <functional>

#include "rmt/types.hpp"

namespace rmt::linalg {

// Eigenvalues of a real symmetric matrix, ascending.  Uses dsyevd.
VectorXd sym_eigenvalues(const MatrixXd& a);

// Eigenvalues of a complex Hermitian matrix, ascending.  Uses zheevd.
VectorXd herm_eigenvalues(const MatrixXcd& a);

// Extreme eigenvalues of a symmetric operator given by its matvec.
// Lanczos with full reorthogonalization; `steps` Krylov dimensions are enough
// for edge eigenvalues of the matrix sizes used here (spacing ~ dim^{-2/3}).
struct Extremes {
  double min = 0.0;
  double max = 0.0;
};
Extremes lanczos_real(const std::function<VectorXd(const VectorXd&)>& op,
                      int dim, const VectorXd& start, int steps = 110);

// Complex Hermitian variant.
Extremes lanczos_herm(const std::function<VectorXcd(const VectorXcd&)>& op,
                      int dim, const VectorXcd& start, int steps = 110);

}  // namespace rmt::linalg
