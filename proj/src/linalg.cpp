#include "rmt/linalg.hpp"

#include <lapacke.h>

namespace rmt::linalg {

VectorXd sym_eigenvalues(const MatrixXd& a) {
  require(a.rows() == a.cols(), "sym_eigenvalues: matrix must be square");
  MatrixXd work = a;
  VectorXd evals(a.rows());
  const lapack_int n = static_cast<lapack_int>(a.rows());
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', n,
                                         work.data(), n, evals.data());
  if (info != 0) throw NumericError("dsyevd failed to converge");
  return evals;
}

VectorXd herm_eigenvalues(const MatrixXcd& a) {
  require(a.rows() == a.cols(), "herm_eigenvalues: matrix must be square");
  MatrixXcd work = a;
  VectorXd evals(a.rows());
  const lapack_int n = static_cast<lapack_int>(a.rows());
  const lapack_int info = LAPACKE_zheevd(
      LAPACK_COL_MAJOR, 'N', 'L', n,
      reinterpret_cast<lapack_complex_double*>(work.data()), n, evals.data());
  if (info != 0) throw NumericError("zheevd failed to converge");
  return evals;
}

namespace {

// Shared Lanczos body: Scalar is double or std::complex<double>.
template <typename Scalar, typename Vec>
Extremes lanczos_impl(const std::function<Vec(const Vec&)>& op, int dim,
                      const Vec& start, int steps) {
  require(dim > 1, "lanczos: dim must exceed 1");
  steps = std::min(steps, dim - 1);
  std::vector<Vec> basis;
  basis.reserve(steps + 1);
  Vec v = start / start.norm();
  basis.push_back(v);
  VectorXd alpha(steps), beta(steps);
  int k = 0;
  for (; k < steps; ++k) {
    Vec w = op(basis[k]);
    const double a = std::real(Scalar(basis[k].dot(w)));
    alpha[k] = a;
    // Full reorthogonalization keeps Ritz values clean at the spectrum edges.
    for (int pass = 0; pass < 2; ++pass)
      for (const Vec& b : basis) w -= b * Scalar(b.dot(w));
    const double bnorm = w.norm();
    beta[k] = bnorm;
    if (bnorm < 1e-12) {
      ++k;
      break;
    }
    basis.push_back(w / bnorm);
  }
  MatrixXd tri = MatrixXd::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    tri(i, i) = alpha[i];
    if (i + 1 < k) tri(i, i + 1) = tri(i + 1, i) = beta[i];
  }
  VectorXd ritz = sym_eigenvalues(tri);
  return {ritz[0], ritz[k - 1]};
}

}  // namespace

Extremes lanczos_real(const std::function<VectorXd(const VectorXd&)>& op,
                      int dim, const VectorXd& start, int steps) {
  return lanczos_impl<double, VectorXd>(op, dim, start, steps);
}

Extremes lanczos_herm(const std::function<VectorXcd(const VectorXcd&)>& op,
                      int dim, const VectorXcd& start, int steps) {
  return lanczos_impl<cplx, VectorXcd>(op, dim, start, steps);
}

}  // namespace rmt::linalg
