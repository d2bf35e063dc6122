#include "rmt/transforms.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace rmt::transforms {

using std::numbers::pi;

cplx stieltjes_empirical(const SpectralSample& sample, cplx z) {
  require(z.imag() != 0, "stieltjes_empirical: z must be non-real");
  require(!sample.eigenvalues.empty(), "stieltjes_empirical: empty sample");
  cplx acc = 0;
  for (double ev : sample.eigenvalues) acc += 1.0 / (ev - z);
  return acc / static_cast<double>(sample.eigenvalues.size());
}

namespace {

// Square root branch with nonnegative imaginary part.
cplx sqrt_upper(cplx v) {
  cplx r = std::sqrt(v);
  return r.imag() >= 0 ? r : -r;
}

}  // namespace

cplx stieltjes_semicircle(cplx z, double sigma) {
  require(sigma > 0, "stieltjes_semicircle: sigma must be positive");
  const double s2 = sigma * sigma;
  // Root of s2 m^2 + z m + 1 = 0 with the Herglotz branch.
  if (z.imag() > 0) return (-z + sqrt_upper(z * z - 4.0 * s2)) / (2.0 * s2);
  if (z.imag() < 0) return std::conj(stieltjes_semicircle(std::conj(z), sigma));
  // Real z: outside the support the branch decaying like -1/z; inside, the
  // boundary limit from the upper half-plane.
  const double x = z.real();
  if (std::abs(x) <= 2 * sigma)
    return (-z + sqrt_upper(cplx(x * x - 4 * s2, 0.0))) / (2.0 * s2);
  const double r = std::sqrt(x * x - 4 * s2);
  return cplx((-x + (x < 0 ? -r : r)) / (2 * s2), 0.0);
}

cplx stieltjes_mp(cplx z, double c, double sigma) {
  require(c > 0 && sigma > 0, "stieltjes_mp: c and sigma must be positive");
  const double s2 = sigma * sigma;
  if (z.imag() < 0) return std::conj(stieltjes_mp(std::conj(z), c, sigma));
  // c s2 z m^2 + (z + s2(c-1)) m + 1 = 0 (general-sigma MP).
  const cplx A = c * s2 * z;
  const cplx B = z + s2 * (c - 1.0);
  const cplx disc = B * B - 4.0 * A;
  if (z.imag() > 0) {
    // Roots via the cancellation-free pair q/A and 1/q (root product = 1/A),
    // with q chosen to avoid subtracting nearly equal terms when A is tiny.
    const cplx d = sqrt_upper(disc);
    const cplx q = std::abs(B - d) > std::abs(B + d) ? -(B - d) / 2.0
                                                     : -(B + d) / 2.0;
    const cplx r1 = q / A;
    const cplx r2 = 1.0 / q;
    return r1.imag() > 0 ? r1 : r2;
  }
  // Real z inside the support: boundary limit from the upper half-plane.
  const double x = z.real();
  if (disc.real() < 0)
    return (-B + cplx(0.0, std::sqrt(-disc.real()))) / (2.0 * A);
  // Real z off the support (and off the origin): pick the decaying branch.
  const double sr = std::sqrt(disc.real());
  const cplx r1 = (-B + sr) / (2.0 * A);
  const cplx r2 = (-B - sr) / (2.0 * A);
  // The physical branch behaves like -1/z for |z| -> inf and is the one
  // continuous with it; select by matching m ~ -1/x at large |x| via the
  // smaller |m + 1/x| ... both roots are real; choose by sign pattern.
  const cplx pick = std::abs(r1 + 1.0 / x) < std::abs(r2 + 1.0 / x) ? r1 : r2;
  return pick;
}

std::vector<double> inverse_stieltjes_density(
    const std::function<cplx(cplx)>& m, const std::vector<double>& xs,
    double eps) {
  require(eps > 0, "inverse_stieltjes_density: eps must be positive");
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(m(cplx(x, eps)).imag() / pi);
  return out;
}

cplx companion_ab_to_ba(cplx m_ab, int N, int n, cplx z) {
  require(z != cplx(0, 0), "companion identity: z must be nonzero");
  const double N_ = N, n_ = n;
  return (N_ / n_) * (m_ab + (N_ - n_) / N_ / z);
}

cplx companion_ba_to_ab(cplx m_ba, int N, int n, cplx z) {
  require(z != cplx(0, 0), "companion identity: z must be nonzero");
  const double N_ = N, n_ = n;
  return (n_ / N_) * m_ba - (N_ - n_) / N_ / z;
}

FixedPointResult silverstein_fixed_point(
    const std::vector<std::pair<double, double>>& pop_atoms, double c, cplx z,
    double tol, int max_iter) {
  require(z.imag() > 0, "silverstein_fixed_point: need Im z > 0");
  require(!pop_atoms.empty(), "silverstein_fixed_point: empty population law");
  const auto step = [&](cplx m) {
    cplx integral = 0;
    for (const auto& [t, w] : pop_atoms) integral += w * t / (1.0 + t * m);
    return -1.0 / (z - c * integral);
  };
  cplx m = -1.0 / z;
  double beta = 0.5;
  double prev_res = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= max_iter; ++it) {
    const cplx g = step(m);
    const double res = std::abs(g - m);
    if (res < tol && m.imag() > 0) return {g, std::abs(step(g) - g), it};
    if (res > prev_res) beta = std::max(0.05, beta * 0.5);
    prev_res = res;
    m = (1 - beta) * m + beta * g;
    // Near the real axis plain iteration contracts slowly; once roughly
    // converged, polish with Newton on f(m) = m - step(m).
    if (res < 1e-4 && it > 20) {
      for (int nw = 0; nw < 60; ++nw) {
        const cplx f = m - step(m);
        if (std::abs(f) < tol * 0.5) break;
        const cplx h = 1e-8 * (1.0 + std::abs(m));
        const cplx df = ((m + h - step(m + h)) - f) / h;
        if (std::abs(df) < 1e-300) break;
        m -= f / df;
      }
      const double fres = std::abs(m - step(m));
      if (fres < tol && m.imag() > 0) return {m, fres, it};
    }
  }
  throw NumericError("silverstein_fixed_point: no convergence, residual " +
                     std::to_string(prev_res));
}

// ---------------------------------------------------------------------------
// Carriers

namespace {

class SemicircleCarrier final : public Carrier {
 public:
  explicit SemicircleCarrier(double sigma) : sigma_(sigma) {}
  cplx m(cplx z) const override { return stieltjes_semicircle(z, sigma_); }
  double mean() const override { return 0.0; }

 private:
  double sigma_;
};

class MPCarrier final : public Carrier {
 public:
  MPCarrier(double c, double sigma) : c_(c), sigma_(sigma) {}
  cplx m(cplx z) const override { return stieltjes_mp(z, c_, sigma_); }
  double mean() const override { return sigma_ * sigma_; }

 private:
  double c_, sigma_;
};

class AtomCarrier final : public Carrier {
 public:
  explicit AtomCarrier(std::vector<std::pair<double, double>> atoms)
      : atoms_(std::move(atoms)) {
    double tw = 0;
    for (const auto& [x, w] : atoms_) {
      require(w >= 0, "carrier_atoms: negative weight");
      tw += w;
      mean_ += w * x;
    }
    require(std::abs(tw - 1) < 1e-9, "carrier_atoms: weights must sum to 1");
  }
  cplx m(cplx z) const override {
    cplx acc = 0;
    for (const auto& [x, w] : atoms_) acc += w / (x - z);
    return acc;
  }
  double mean() const override { return mean_; }

 private:
  std::vector<std::pair<double, double>> atoms_;
  double mean_ = 0;
};

}  // namespace

std::shared_ptr<Carrier> carrier_semicircle(double sigma) {
  return std::make_shared<SemicircleCarrier>(sigma);
}
std::shared_ptr<Carrier> carrier_mp(double c, double sigma) {
  return std::make_shared<MPCarrier>(c, sigma);
}
std::shared_ptr<Carrier> carrier_atoms(
    std::vector<std::pair<double, double>> atoms) {
  return std::make_shared<AtomCarrier>(std::move(atoms));
}

// ---------------------------------------------------------------------------
// Newton inversion with ray continuation from the asymptotic branch

namespace {

using Fn = std::function<cplx(cplx)>;

bool newton_solve(const Fn& f, cplx target, cplx& z, double tol) {
  for (int it = 0; it < 60; ++it) {
    const cplx r = f(z) - target;
    if (std::abs(r) < tol) return true;
    const cplx h = 1e-7 * (1.0 + std::abs(z));
    const cplx d = (f(z + h) - f(z)) / h;
    if (!std::isfinite(std::abs(d)) || std::abs(d) < 1e-300) return false;
    cplx step = r / d;
    // Damped: shrink until the residual actually drops.
    double lambda = 1.0;
    bool moved = false;
    for (int k = 0; k < 25; ++k) {
      const cplx cand = z - lambda * step;
      const double rc = std::abs(f(cand) - target);
      if (std::isfinite(rc) && rc < std::abs(r)) {
        z = cand;
        moved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!moved) return false;
  }
  return std::abs(f(z) - target) < tol * 100;
}

// Solve f(z) = w following the ray t*w from t ~ 0, where the start
// start_of(w) is valid for small |w| (asymptotic branch).
cplx invert_along_ray(const Fn& f, cplx w, const Fn& start_of) {
  const double tol = 1e-11 * (1.0 + std::abs(w));
  for (int segments = 1; segments <= 256; segments *= 2) {
    cplx z = start_of(w / static_cast<double>(segments));
    bool ok = true;
    for (int k = 1; k <= segments && ok; ++k) {
      const cplx wk = w * (static_cast<double>(k) / segments);
      ok = newton_solve(f, wk, z, tol);
    }
    if (ok) return z;
  }
  throw NumericError("transform inversion failed (ray continuation)");
}

}  // namespace

Transform s_transform(std::shared_ptr<Carrier> law) {
  const double mu = law->mean();
  require(std::abs(mu) > 1e-12,
          "s_transform: law must have nonzero mean (M not invertible at 0)");
  const Fn M = [law](cplx z) { return -z * law->m(z) - 1.0; };
  const Fn start = [mu](cplx w) { return cplx(mu) / w; };
  Transform t;
  t.mean = mu;
  t.eval = [M, start, mu](cplx w) -> cplx {
    if (std::abs(w) < 1e-9) return 1.0 / mu;
    const cplx z = invert_along_ray(M, w, start);
    return (1.0 + w) / (w * z);
  };
  return t;
}

Transform r_transform(std::shared_ptr<Carrier> law) {
  const double mu = law->mean();
  const Fn G = [law](cplx z) { return -law->m(z); };
  const Fn start = [](cplx w) { return 1.0 / w; };
  Transform t;
  t.mean = mu;
  t.eval = [G, start, mu](cplx w) -> cplx {
    if (std::abs(w) < 1e-9) return mu;
    const cplx z = invert_along_ray(G, w, start);
    return z - 1.0 / w;
  };
  return t;
}

Transform free_multiply(const Transform& s1, const Transform& s2) {
  Transform t;
  t.mean = s1.mean * s2.mean;
  t.eval = [a = s1.eval, b = s2.eval](cplx w) { return a(w) * b(w); };
  return t;
}

Transform free_add(const Transform& r1, const Transform& r2) {
  Transform t;
  t.mean = r1.mean + r2.mean;
  t.eval = [a = r1.eval, b = r2.eval](cplx w) { return a(w) + b(w); };
  return t;
}

// ---------------------------------------------------------------------------
// Density recovery

namespace {

// Generic walk: for each x solve eq(w) = z with z = x + i*eps, warm-started
// from the previous grid point; cold starts descend from high above the axis.
std::vector<cplx> solve_along_grid(const Fn& eq_raw /* w -> z */,
                                   const Fn& w_asymptotic /* z -> w guess */,
                                   const std::vector<double>& xs, double eps) {
  // Inner transform evaluations may fail off their continuation path; treat
  // that as a soft Newton failure so the cold restart below can recover.
  const Fn eq = [&eq_raw](cplx w) -> cplx {
    try {
      return eq_raw(w);
    } catch (const NumericError&) {
      return cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
    }
  };
  std::vector<cplx> ws(xs.size());
  double hi = 4.0;
  for (double x : xs) hi = std::max(hi, 2.0 * std::abs(x));
  cplx w;
  bool warm = false;
  for (size_t i = 0; i < xs.size(); ++i) {
    const cplx z(xs[i], eps);
    bool ok = false;
    if (warm) {
      cplx cand = w;
      ok = newton_solve(eq, z, cand, 1e-10 * (1.0 + std::abs(z)));
      if (ok) w = cand;
    }
    if (!ok) {  // descend from far above the real axis
      const int steps = 24;
      cplx cand = w_asymptotic(cplx(xs[i], hi));
      ok = true;
      for (int j = 0; j <= steps && ok; ++j) {
        const double y = hi * std::pow(eps / hi, static_cast<double>(j) / steps);
        ok = newton_solve(eq, cplx(xs[i], y), cand,
                          1e-10 * (1.0 + std::abs(z)));
      }
      if (ok) w = cand;
    }
    if (!ok) throw NumericError("density recovery failed near x = " +
                                std::to_string(xs[i]));
    warm = true;
    ws[i] = w;
  }
  return ws;
}

}  // namespace

std::vector<double> density_from_s(const Transform& s,
                                   const std::vector<double>& xs, double eps) {
  const Fn eq = [&s](cplx w) { return (1.0 + w) / (w * s.eval(w)); };
  const Fn guess = [&s](cplx z) { return cplx(s.mean) / z; };
  const auto ws = solve_along_grid(eq, guess, xs, eps);
  std::vector<double> out(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) {
    const cplx m = -(ws[i] + 1.0) / cplx(xs[i], eps);
    out[i] = std::max(0.0, m.imag() / pi);
  }
  return out;
}

std::vector<double> density_from_r(const Transform& r,
                                   const std::vector<double>& xs, double eps) {
  const Fn eq = [&r](cplx w) { return r.eval(w) + 1.0 / w; };
  const Fn guess = [](cplx z) { return 1.0 / z; };
  const auto ws = solve_along_grid(eq, guess, xs, eps);
  std::vector<double> out(xs.size());
  for (size_t i = 0; i < xs.size(); ++i)
    out[i] = std::max(0.0, -ws[i].imag() / pi);
  return out;
}

std::function<cplx(cplx)> stieltjes_from_s(const Transform& s) {
  return [s](cplx z) -> cplx {
    const Fn eq = [&s](cplx w) { return (1.0 + w) / (w * s.eval(w)); };
    const Fn guess = [&s](cplx zz) { return cplx(s.mean) / zz; };
    const auto ws = solve_along_grid(eq, guess, {z.real()}, z.imag());
    return -(ws[0] + 1.0) / z;
  };
}

std::function<cplx(cplx)> stieltjes_from_r(const Transform& r) {
  return [r](cplx z) -> cplx {
    const Fn eq = [&r](cplx w) { return r.eval(w) + 1.0 / w; };
    const Fn guess = [](cplx zz) { return 1.0 / zz; };
    const auto ws = solve_along_grid(eq, guess, {z.real()}, z.imag());
    return -ws[0];
  };
}

}  // namespace rmt::transforms
