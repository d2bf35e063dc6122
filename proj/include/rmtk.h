/* C interface to the random-matrix spectral library.
 *
 * Every operation returns a status code and, on success, a heap-allocated
 * result table of named columns (numeric cells formatted with "%.12g",
 * label cells verbatim).  Tables are owned by the caller and released with
 * rmtk_table_free.  On failure the table out-parameter is set to NULL and
 * rmtk_last_error() describes the problem (thread-local).
 *
 * Status codes:
 *   RMTK_OK           success
 *   RMTK_ERR_NUMERIC  an iteration failed to converge or a result left its
 *                     numeric contract
 *   RMTK_ERR_USAGE    unknown enumeration label or malformed list argument
 *   RMTK_ERR_RANGE    argument outside the documented domain
 *   RMTK_ERR_IO       reserved for callers doing file I/O
 */
#ifndef RMTK_H
#define RMTK_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define RMTK_OK 0
#define RMTK_ERR_NUMERIC 1
#define RMTK_ERR_USAGE 2
#define RMTK_ERR_RANGE 3
#define RMTK_ERR_IO 4

typedef struct rmtk_table rmtk_table;

const char* rmtk_version(void);

/* Message of the most recent failure on this thread; empty string if none. */
const char* rmtk_last_error(void);

/* Caps the linear-algebra thread pool (also settable via RMTK_THREADS). */
void rmtk_set_threads(int n);

/* ----- result tables ----- */
void rmtk_table_free(rmtk_table* t);
int rmtk_table_ncols(const rmtk_table* t);
int64_t rmtk_table_nrows(const rmtk_table* t);
const char* rmtk_table_col_name(const rmtk_table* t, int col);
/* Formatted cell contents; NULL if the indices are out of range. */
const char* rmtk_table_cell(const rmtk_table* t, int64_t row, int col);
/* Numeric cell value; *is_number (optional) reports whether the cell is
 * numeric.  Label cells return 0. */
double rmtk_table_value(const rmtk_table* t, int64_t row, int col,
                        int* is_number);

/* ----- ensembles and laws ----- */

/* kind: "wigner" | "wishart" | "spiked".  spikes: comma list of population
 * spike values (ignored unless kind is "spiked"; multiplicity 1 each).
 * field: "real" | "complex".  Columns: index,eigenvalue. */
int rmtk_ensemble_esd(const char* kind, int N, int n, double sigma,
                      const char* spikes, const char* field, uint64_t seed,
                      rmtk_table** out);

/* law: "semicircle" | "mp".  Columns: x,density. */
int rmtk_law_pdf(const char* law, double c, double sigma, double x0, double x1,
                 int points, rmtk_table** out);

/* Tracy-Widom cdf tabulation.  Columns: t,F1,F2. */
int rmtk_tw_table(double t0, double t1, int points, rmtk_table** out);

/* Columns: order,p,quantile. */
int rmtk_tw_quantile(int order, double p, rmtk_table** out);

/* alphas: comma list of population spikes (multiplicity 1 each).
 * Columns: alpha,regime,limit,index_begin,index_end. */
int rmtk_spiked_predict(const char* alphas, double c, int N, rmtk_table** out);

/* detector: "ed" | "med" | "cnd" | "eme" | "agm" | "msee".
 * method: "analytic" | "mc" (AGM supports only "mc"; trials and seed are
 * used only by "mc").  Columns: detector,N,n,pfa,threshold,method. */
int rmtk_sense_threshold(const char* detector, int N, int n, double pfa,
                         const char* method, int trials, uint64_t seed,
                         rmtk_table** out);

/* Empirical receiver operating curve of a detector at K primary users and
 * the given SNR (dB).  pfa_grid: comma list of target false-alarm rates.
 * Columns: pfa,pd,pfa_se,pd_se,trials. */
int rmtk_sense_roc(const char* detector, int N, int n, int K, double snr_db,
                   const char* pfa_grid, int trials, uint64_t seed,
                   rmtk_table** out);

/* receiver: "mrc" | "zf" | "mmse".  snr_db: comma list; one output row per
 * entry.  Equal unit powers; noise set from the SNR.  trials Monte Carlo
 * draws of an N x cN channel per row (0 skips simulation; mc columns NaN).
 * Columns: receiver,c,snr_db,limit_sinr,mc_mean,mc_se,N,trials. */
int rmtk_mu_sinr(const char* receiver, double c, const char* snr_db,
                 int N, int trials, uint64_t seed, rmtk_table** out);

/* Iterative decision-feedback equalizer on a square N-user system.  rho:
 * comma list of decision correlations per iteration, or "" for a
 * self-consistent 4-step schedule.  symbols=0 skips simulation.
 * Columns: iteration,rho,limit_sinr,sim_sinr. */
int rmtk_bigdfe(double snr_db, const char* rho, int N, int symbols,
                uint64_t seed, rmtk_table** out);

/* Grant-free uplink state evolution and limit SINRs.  betas: comma list of
 * path-loss samples.  tau2 < 0 derives the error variance from the state
 * evolution fixed point.  One row per beta.
 * Columns: beta,tau2,v,dv,gamma,sinr_mrc,sinr_mmse. */
int rmtk_massive_sinr(double xi, double omega, double epsilon, double c,
                      double sigma_u2, const char* betas, double tau2,
                      rmtk_table** out);

/* activation: "linear" | "relu" | "hard-tanh" | "tanh" | "falpha" (uses
 * alpha).  Columns: layer,q,q_star (layer 0 carries q0). */
int rmtk_nn_qstar(const char* activation, double alpha, double sigma_w2,
                  double sigma_b2, double q0, int layers, rmtk_table** out);

/* Depth sweep of the squared-singular-value spectrum summary of the
 * input-output Jacobian.  ensemble: "gaussian" | "orthogonal".  depths:
 * comma list of L values.  mode: "limit" (closed forms) | "sample"
 * (one random network per depth of width N).
 * Columns: L,lambda_max,variance,ensemble,activation. */
int rmtk_nn_jacobian(const char* ensemble, const char* activation,
                     double alpha, const char* depths, int N, double sigma_w2,
                     double sigma_b2, const char* mode, uint64_t seed,
                     rmtk_table** out);

/* Loss-curvature model density on a uniform grid.
 * Columns: x,density. */
int rmtk_nn_hessian(double epsilon, double c, double sigma, int refined,
                    double x0, double x1, int points, rmtk_table** out);

/* Limiting output-covariance density of one nonlinear layer from the
 * activation constants (eta, zeta) and shape ratios.
 * Columns: x,density. */
int rmtk_nn_datacov(double eta, double zeta, double xi, double psi, double x0,
                    double x1, int points, rmtk_table** out);

/* Eigenvalues of a finite multi-layer post-activation covariance.
 * Columns: index,eigenvalue. */
int rmtk_nn_datacov_esd(const char* activation, double alpha, int L, int n0,
                        int n1, int m, double sigma_w2, double sigma_x2,
                        uint64_t seed, rmtk_table** out);

/* Runs the acceptance suite, invoking line(text, ctx) per criterion and for
 * the summary.  Returns the number of failed criteria. */
int rmtk_selftest(void (*line)(const char* text, void* ctx), void* ctx);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* RMTK_H */
