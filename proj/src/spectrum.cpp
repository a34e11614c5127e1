#include "jtrace/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "jtrace/ddouble.hpp"
#include "jtrace/errors.hpp"
#include "jtrace/parallel.hpp"
#include "jtrace/polycore.hpp"

namespace jtrace {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Series tolerance for evaluations at refined (double-double) eigenvalues.
constexpr double kTightTol = 1e-24;

double guard_pivot(double d, double scale) {
  if (d != 0.0) return d;
  return -kEps * (scale == 0.0 ? 1.0 : scale);
}

struct OneSided {
  std::vector<double> D;  // forward pivots
  std::vector<double> E;  // backward pivots
};

OneSided pivots(const TruncatedJacobi& T, double lambda) {
  const std::size_t N = T.size();
  OneSided f;
  f.D.resize(N);
  f.E.resize(N);
  f.D[0] = guard_pivot(T.diag[0] - lambda, std::abs(T.diag[0]) + std::abs(lambda));
  for (std::size_t i = 1; i < N; ++i) {
    const double off = T.offdiag[i - 1];
    const double d = (T.diag[i] - lambda) - off * (off / f.D[i - 1]);
    f.D[i] = guard_pivot(d, std::abs(T.diag[i]) + std::abs(lambda));
  }
  f.E[N - 1] = guard_pivot(T.diag[N - 1] - lambda, std::abs(T.diag[N - 1]) + std::abs(lambda));
  for (std::size_t i = N - 1; i-- > 0;) {
    const double off = T.offdiag[i];
    const double e = (T.diag[i] - lambda) - off * (off / f.E[i + 1]);
    f.E[i] = guard_pivot(e, std::abs(T.diag[i]) + std::abs(lambda));
  }
  return f;
}

// P_0..P_n at a double-double argument.
std::vector<DD> poly_dd(const JacobiParams& params, std::size_t n, const DD& x) {
  std::vector<DD> p(n + 1);
  p[0] = DD(1.0);
  DD prev(0.0);
  double alpha_prev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Entries en = entries(params, i);
    p[i + 1] = ((x - DD(en.beta)) * p[i] - prev * alpha_prev) / DD(en.alpha);
    prev = p[i];
    alpha_prev = en.alpha;
  }
  return p;
}

// Phi_n = (-1)^n k^{-n} W_n at a double-double argument.
SeriesValue phi_eval(const JacobiParams& params, const PowerSeriesApprox& s, std::size_t n, const DD& z) {
  SeriesValue v = eval_series(s, z, kInf);
  DD factor = pow_int(DD(1.0) / DD(params.k()), static_cast<unsigned>(n));
  if (n % 2 == 1) factor = -factor;
  v.value_dd = v.value_dd * factor;
  v.value = v.value_dd.value();
  v.err_bound *= std::abs(factor.value());
  v.magnitude *= std::abs(factor.value());
  return v;
}

// Same, from a series sized for kTightTol.
SeriesValue phi_tight(const JacobiParams& params, std::size_t n, const DD& z) {
  return phi_eval(params, make_series(params, SeriesId::w(n), std::abs(z.value()), kTightTol), n, z);
}

double rel_err(const SeriesValue& v) {
  return v.value == 0.0 ? kInf : v.err_bound / std::abs(v.value);
}

struct NewtonResult {
  DD lambda;
  bool ok = false;
  double F = kNaN;
  double F_bound = kNaN;
};

NewtonResult newton_refine(const JacobiParams& params, double start, double tol) {
  NewtonResult out;
  out.lambda = DD(start);
  try {
    const PowerSeriesApprox s = make_series(params, SeriesId::f(), start * (1.0 + 1e-6), kTightTol);
    DD lam(start);
    for (int it = 0; it < 12; ++it) {
      const SeriesValue f = eval_series(s, lam, kInf);
      const SeriesValue fp = eval_series_derivative(s, lam, kInf);
      if (fp.value == 0.0 || !std::isfinite(fp.value)) return out;
      const DD step = f.value_dd / fp.value_dd;
      lam = lam - step;
      if (std::abs(step.value()) <= 1e-31 * std::abs(lam.value())) break;
    }
    const SeriesValue f = eval_series(s, lam, kInf);
    const SeriesValue fp = eval_series_derivative(s, lam, kInf);
    out.F = std::abs(f.value);
    out.F_bound = f.err_bound;
    const double location = (std::abs(f.value) + f.err_bound) / std::abs(fp.value);
    const bool derivative_ok = fp.err_bound < 0.5 * std::abs(fp.value);
    const bool close = std::abs(lam.value() - start) <= std::max(1e-8, 100.0 * tol) * start;
    out.ok = derivative_ok && close && location <= std::max(tol, 1e-15) * lam.value();
    out.lambda = lam;
  } catch (const NumericalFailure&) {
    out.ok = false;
  }
  return out;
}

// Everything the series side knows about one eigenvalue.
struct RootSeries {
  bool ok = false;
  std::size_t match = 0;
  std::vector<DD> phi;  // Phi_0 .. Phi_{n_max}
  DD W;
  DD F_prime;
  double mass = kNaN;
  double mass_rel_err = kInf;
};

RootSeries root_series(const JacobiParams& params, const DD& lam, std::size_t n_max, bool want_vector) {
  RootSeries out;
  try {
    const PowerSeriesApprox fs = make_series(params, SeriesId::f(), lam.value() * (1.0 + 1e-6), kTightTol);
    const SeriesValue fp = eval_series_derivative(fs, lam, kInf);

    // First index whose series is well conditioned at lam.
    std::size_t best_n = 0;
    double best_rel = kInf;
    SeriesValue best;
    std::size_t worse = 0;
    for (std::size_t n = 0; n <= 256; ++n) {
      SeriesValue v;
      try {
        v = phi_tight(params, n, lam);
      } catch (const NumericalFailure&) {
        break;
      }
      // Marginal gains are not worth a larger n: P_n(lam) picks up the
      // growing solution as n increases.
      const double rel = rel_err(v);
      const bool gain = rel < 0.5 * best_rel;
      if (rel < best_rel) {
        best_rel = rel;
        best_n = n;
        best = v;
      }
      if (gain) {
        worse = 0;
      } else if (++worse >= 4 && best_rel < 1e-10) {
        break;
      }
      if (rel <= 1e-20) break;
    }
    if (!std::isfinite(best_rel)) return out;

    const std::size_t m = best_n;
    const std::vector<DD> p = poly_dd(params, m, lam);
    out.match = m;
    out.W = best.value_dd / p[m];
    out.F_prime = fp.value_dd;
    const DD mass = -out.W / out.F_prime;
    out.mass = mass.value();
    out.mass_rel_err = best_rel + rel_err(fp) + 8.0 * static_cast<double>(m + 2) * kDDEpsilon;

    if (want_vector) {
      out.phi.resize(n_max + 1);
      for (std::size_t n = 0; n <= n_max && n < m; ++n) out.phi[n] = out.W * p[n];
      if (m <= n_max) out.phi[m] = best.value_dd;
      for (std::size_t n = m + 1; n <= n_max; ++n) out.phi[n] = phi_tight(params, n, lam).value_dd;
    }
    out.ok = std::isfinite(out.mass) && out.mass_rel_err < 1e-3;
  } catch (const NumericalFailure&) {
    out.ok = false;
  }
  return out;
}

// Corrected a-priori bound |Phi_n(z)| <= k^n exp(|z| tail(n+1)/(1-k^2)) / ((1-k^2) min_{j>=n} a_j).
double phi_bound(const JacobiParams& params, std::size_t n, double z) {
  const double denom = 1.0 - params.k2();
  const double amin = params.seq().min_from(n);
  const double expo = std::abs(z) * params.seq().tail_sum_reciprocal(n + 1) / denom;
  return std::pow(params.k(), static_cast<double>(n)) * std::exp(expo) / (denom * amin);
}

double norm_tail(const JacobiParams& params, std::size_t n_max, double z) {
  double sum = 0.0;
  for (std::size_t n = n_max + 1; n <= n_max + 2000; ++n) {
    const double b = phi_bound(params, n, z);
    const double b2 = b * b;
    sum += b2;
    if (b2 == 0.0 || b2 < 1e-40 * sum) break;
  }
  return sum;
}

DD dd_lambda(const SpectralData& sd, std::size_t j) {
  const double lo = j < sd.lambdas_lo.size() ? sd.lambdas_lo[j] : 0.0;
  return DD(sd.lambdas[j], lo);
}

double matrix_residual(const TruncatedJacobi& T, const std::vector<double>& v, double lambda) {
  const std::size_t N = T.size();
  DD sq(0.0);
  for (std::size_t i = 0; i < N; ++i) {
    DD r = DD(T.diag[i] - lambda) * v[i];
    if (i > 0) r += DD(T.offdiag[i - 1]) * v[i - 1];
    if (i + 1 < N) r += DD(T.offdiag[i]) * v[i + 1];
    sq += r * r;
  }
  return std::sqrt(sq.value());
}

}  // namespace

TruncatedJacobi truncate(const JacobiParams& params, std::size_t N) {
  if (N == 0) throw std::invalid_argument("truncate: N must be at least 1");
  TruncatedJacobi T;
  T.diag.resize(N);
  T.offdiag.resize(N - 1);
  for (std::size_t i = 0; i < N; ++i) {
    const Entries en = entries(params, i);
    if (!std::isfinite(en.alpha) || !std::isfinite(en.beta)) {
      throw ParameterOutOfRange("truncate: matrix entry overflows at index " + std::to_string(i));
    }
    T.diag[i] = en.beta;
    if (i + 1 < N) T.offdiag[i] = en.alpha;
  }
  return T;
}

TruncatedJacobi truncate_associated(const JacobiParams& params, std::size_t N) {
  TruncatedJacobi full = truncate(params, N + 1);
  TruncatedJacobi T;
  T.diag.assign(full.diag.begin() + 1, full.diag.end());
  T.offdiag.assign(full.offdiag.begin() + 1, full.offdiag.end());
  return T;
}

std::size_t sturm_count(const TruncatedJacobi& T, double x) {
  std::size_t negatives = 0;
  double d = 1.0;
  for (std::size_t i = 0; i < T.size(); ++i) {
    double v = T.diag[i] - x;
    if (i > 0) v -= T.offdiag[i - 1] * (T.offdiag[i - 1] / d);
    if (v == 0.0) v = -kEps * (std::abs(T.diag[i]) + std::abs(x) + 1e-300);
    if (v < 0.0) ++negatives;
    d = v;
  }
  return negatives;
}

std::pair<double, double> gershgorin_bounds(const TruncatedJacobi& T) {
  double lo = kInf;
  double hi = -kInf;
  for (std::size_t i = 0; i < T.size(); ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(T.offdiag[i - 1]);
    if (i + 1 < T.size()) r += std::abs(T.offdiag[i]);
    lo = std::min(lo, T.diag[i] - r);
    hi = std::max(hi, T.diag[i] + r);
  }
  return {lo, hi};
}

double eigen_bisect(const TruncatedJacobi& T, std::size_t j, double tol, std::optional<double> lower) {
  if (j >= T.size()) throw std::invalid_argument("eigen_bisect: index out of range");
  auto [lo, hi] = gershgorin_bounds(T);
  if (lower && *lower > lo && sturm_count(T, *lower) <= j) lo = *lower;
  hi *= 1.0 + 4.0 * kEps;
  for (int it = 0; it < 4000; ++it) {
    const double mid = (lo > 0.0 && hi / lo > 4.0) ? std::sqrt(lo) * std::sqrt(hi) : lo + (hi - lo) / 2.0;
    if (!(mid > lo && mid < hi)) break;
    if (sturm_count(T, mid) > j) {
      hi = mid;
    } else {
      lo = mid;
    }
    if (tol > 0.0 && hi - lo <= tol * std::abs(lo)) break;
  }
  return lo + (hi - lo) / 2.0;
}

std::vector<double> section_eigenvalues(const TruncatedJacobi& T, std::size_t count, double tol,
                                        std::optional<double> lower) {
  count = std::min(count, T.size());
  std::vector<double> out(count);
  parallel_for(count, [&](std::size_t j) { out[j] = eigen_bisect(T, j, tol, lower); });
  return out;
}

SectionVector section_eigenvector(const TruncatedJacobi& T, double lambda) {
  const std::size_t N = T.size();
  const OneSided f = pivots(T, lambda);
  std::size_t m = 0;
  double best = kInf;
  for (std::size_t i = 0; i < N; ++i) {
    const double g = std::abs(f.D[i] + f.E[i] - (T.diag[i] - lambda));
    if (g < best) {
      best = g;
      m = i;
    }
  }
  // log|z_i| and signs; z_m = 1.
  std::vector<double> lg(N, 0.0);
  std::vector<double> sg(N, 1.0);
  for (std::size_t i = m; i-- > 0;) {
    lg[i] = std::log(T.offdiag[i]) + lg[i + 1] - std::log(std::abs(f.D[i]));
    sg[i] = -sg[i + 1] * (f.D[i] < 0.0 ? -1.0 : 1.0);
  }
  for (std::size_t i = m + 1; i < N; ++i) {
    lg[i] = std::log(T.offdiag[i - 1]) + lg[i - 1] - std::log(std::abs(f.E[i]));
    sg[i] = -sg[i - 1] * (f.E[i] < 0.0 ? -1.0 : 1.0);
  }
  const double top = *std::max_element(lg.begin(), lg.end());
  double norm2 = 0.0;
  for (double l : lg) norm2 += std::exp(2.0 * (l - top));
  const double log_norm = top + 0.5 * std::log(norm2);
  SectionVector out;
  out.twist = m;
  out.v.resize(N);
  const double flip = sg[0] < 0.0 ? -1.0 : 1.0;
  for (std::size_t i = 0; i < N; ++i) out.v[i] = flip * sg[i] * std::exp(lg[i] - log_norm);
  out.weight = std::exp(2.0 * (lg[0] - log_norm));
  return out;
}

std::vector<double> tridiagonal_solve(const TruncatedJacobi& T, double shift, const std::vector<double>& rhs) {
  const std::size_t n = T.size();
  if (rhs.size() != n) throw std::invalid_argument("tridiagonal_solve: size mismatch");
  std::vector<double> d(n);
  std::vector<double> du(T.offdiag);
  std::vector<double> dl(T.offdiag);
  std::vector<double> du2(n, 0.0);
  std::vector<double> b(rhs);
  for (std::size_t i = 0; i < n; ++i) d[i] = T.diag[i] - shift;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::abs(d[i]) >= std::abs(dl[i])) {
      if (d[i] == 0.0) throw NumericalFailure("tridiagonal_solve: singular matrix");
      const double fact = dl[i] / d[i];
      d[i + 1] -= fact * du[i];
      b[i + 1] -= fact * b[i];
    } else {
      const double fact = d[i] / dl[i];
      d[i] = dl[i];
      const double temp = d[i + 1];
      d[i + 1] = du[i] - fact * temp;
      if (i + 2 < n) {
        du2[i] = du[i + 1];
        du[i + 1] = -fact * du2[i];
      }
      du[i] = temp;
      const double bi = b[i];
      b[i] = b[i + 1];
      b[i + 1] = bi - fact * b[i + 1];
    }
  }
  if (d[n - 1] == 0.0) throw NumericalFailure("tridiagonal_solve: singular matrix");
  b[n - 1] /= d[n - 1];
  if (n > 1) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
  for (std::size_t i = n >= 2 ? n - 2 : 0; i-- > 0;) {
    b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
  }
  return b;
}

double section_trace_inverse(const TruncatedJacobi& T) {
  const OneSided f = pivots(T, 0.0);
  DD sum(0.0);
  for (std::size_t i = 0; i < T.size(); ++i) sum += DD(1.0) / DD(f.D[i] + f.E[i] - T.diag[i]);
  return sum.value();
}

double section_resolvent00(const TruncatedJacobi& T, double z) {
  const std::size_t N = T.size();
  double e = T.diag[N - 1] - z;
  for (std::size_t i = N - 1; i-- > 0;) {
    e = guard_pivot(e, std::abs(T.diag[i + 1]) + std::abs(z));
    e = (T.diag[i] - z) - T.offdiag[i] * (T.offdiag[i] / e);
  }
  return 1.0 / e;
}

SpectralData spectrum(const JacobiParams& params, std::size_t count, double tol, std::size_t start_N) {
  if (!(tol > 0.0)) throw std::invalid_argument("spectrum: tolerance must be positive");
  SpectralData sd;
  sd.tol = tol;
  sd.gamma = gamma_lower_bound(params);
  sd.trace = trace_inverse(params, std::max(tol * 1e-2, 1e-16)).value();
  if (count == 0) return sd;

  std::size_t N = std::max(start_N, count + 20);
  std::vector<double> prev;
  TruncatedJacobi T;
  bool converged = false;
  for (int attempt = 0; attempt <= 10; ++attempt) {
    try {
      T = truncate(params, N);
    } catch (const ParameterOutOfRange& e) {
      throw ConvergenceFailure(std::string("spectrum: section size limited by entry overflow: ") + e.what());
    }
    std::vector<double> ev = section_eigenvalues(T, count, 0.0, sd.gamma);
    if (!prev.empty()) {
      double movement = 0.0;
      for (std::size_t j = 0; j < count; ++j) movement = std::max(movement, std::abs(ev[j] - prev[j]) / ev[j]);
      if (movement < tol / 10.0) {
        prev = std::move(ev);
        converged = true;
        break;
      }
    }
    prev = std::move(ev);
    N *= 2;
  }
  if (!converged) throw ConvergenceFailure("spectrum: eigenvalues did not stabilize after ten doublings");

  sd.N_used = N;
  sd.section_lambdas = prev;
  sd.lambdas.assign(count, 0.0);
  sd.lambdas_lo.assign(count, 0.0);
  sd.masses.assign(count, 0.0);
  sd.mass_fallback.assign(count, false);
  sd.quadrature_weights.assign(count, 0.0);
  sd.residual_F.assign(count, kNaN);
  sd.residual_F_bound.assign(count, kNaN);
  sd.residual_matrix.assign(count, 0.0);
  sd.refined.assign(count, false);

  std::vector<double> series_mass(count, kNaN);
  parallel_for(count, [&](std::size_t j) {
    const double sec = sd.section_lambdas[j];
    const SectionVector sv = section_eigenvector(T, sec);
    sd.quadrature_weights[j] = sv.weight;
    sd.residual_matrix[j] = matrix_residual(T, sv.v, sec) / sec;

    const NewtonResult nr = newton_refine(params, sec, tol);
    DD lam(sec);
    if (nr.ok) {
      lam = nr.lambda;
      sd.refined[j] = true;
      sd.residual_F[j] = nr.F;
      sd.residual_F_bound[j] = nr.F_bound;
    } else {
      try {
        const PowerSeriesApprox s = make_series(params, SeriesId::f(), sec, 1e-14);
        const SeriesValue f = eval_series(s, sec, kInf);
        if (std::isfinite(f.err_bound)) {
          sd.residual_F[j] = std::abs(f.value);
          sd.residual_F_bound[j] = f.err_bound;
        }
      } catch (const NumericalFailure&) {
      }
    }
    sd.lambdas[j] = lam.hi;
    sd.lambdas_lo[j] = lam.lo;
    if (nr.ok) {
      const RootSeries rs = root_series(params, lam, 0, false);
      if (rs.ok) series_mass[j] = rs.mass;
    }
  });

  for (std::size_t j = 0; j < count; ++j) {
    if (std::isfinite(series_mass[j])) {
      if (!(series_mass[j] > 0.0)) {
        throw MassNegative("spectrum: non-positive mass at index " + std::to_string(j));
      }
      sd.masses[j] = series_mass[j];
    } else {
      sd.masses[j] = sd.quadrature_weights[j];
      sd.mass_fallback[j] = true;
    }
  }

  DD partial(0.0);
  for (double l : sd.lambdas) partial += DD(1.0) / DD(l);
  DD section_partial(0.0);
  for (double l : sd.section_lambdas) section_partial += DD(1.0) / DD(l);
  sd.tail_estimate = std::max(0.0, (DD(section_trace_inverse(T)) - section_partial).value());
  sd.completeness_defect = std::abs((partial + DD(sd.tail_estimate) - DD(sd.trace)).value());
  return sd;
}

MassVectors masses_and_vectors(const JacobiParams& params, const SpectralData& sd, std::size_t n_max, double tol) {
  (void)tol;
  const std::size_t count = sd.lambdas.size();
  MassVectors mv;
  mv.masses.assign(count, 0.0);
  mv.series_masses.assign(count, kNaN);
  mv.series_mass_err.assign(count, kInf);
  mv.quadrature_masses = sd.quadrature_weights;
  mv.quadrature_masses.resize(count, kNaN);
  mv.fallback.assign(count, false);
  mv.match_index.assign(count, 0);
  mv.phi.assign(count, std::vector<double>(n_max + 1, kNaN));
  mv.W_values.assign(count, kNaN);
  mv.F_prime.assign(count, kNaN);
  mv.norm_sums.assign(count, kNaN);
  mv.norm_residuals.assign(count, kNaN);
  mv.norm_tails.assign(count, kNaN);
  mv.eigen_residuals.assign(count, kNaN);

  parallel_for(count, [&](std::size_t j) {
    // An unrefined lambda is too coarse for the matching step.
    if (j < sd.refined.size() && !sd.refined[j]) return;
    const DD lam = dd_lambda(sd, j);
    const RootSeries rs = root_series(params, lam, n_max, true);
    if (!rs.ok) return;
    mv.series_masses[j] = rs.mass;
    mv.series_mass_err[j] = rs.mass_rel_err;
    mv.match_index[j] = rs.match;
    mv.W_values[j] = rs.W.value();
    mv.F_prime[j] = rs.F_prime.value();
    for (std::size_t n = 0; n <= n_max; ++n) mv.phi[j][n] = rs.phi[n].value();

    DD sq(0.0);
    for (const DD& p : rs.phi) sq += p * p;
    const double tail = norm_tail(params, n_max, lam.value());
    mv.norm_tails[j] = tail;
    mv.norm_sums[j] = (sq + DD(tail)).value();
    mv.norm_residuals[j] = std::abs((sq + DD(tail) + rs.F_prime * rs.W).value());

    DD res(0.0);
    for (std::size_t n = 0; n < n_max; ++n) {
      const Entries en = entries(params, n);
      DD r = (DD(en.beta) - lam) * rs.phi[n] + rs.phi[n + 1] * en.alpha;
      if (n > 0) r += rs.phi[n - 1] * entries(params, n - 1).alpha;
      res += r * r;
    }
    mv.eigen_residuals[j] = std::sqrt(res.value()) / std::sqrt(sq.value());
  });

  for (std::size_t j = 0; j < count; ++j) {
    if (std::isfinite(mv.series_masses[j])) {
      if (!(mv.series_masses[j] > 0.0)) {
        throw MassNegative("masses_and_vectors: non-positive mass at index " + std::to_string(j));
      }
      mv.masses[j] = mv.series_masses[j];
    } else {
      mv.masses[j] = mv.quadrature_masses[j];
      mv.fallback[j] = true;
      if (!(mv.masses[j] > 0.0)) {
        throw MassNegative("masses_and_vectors: non-positive quadrature weight at index " + std::to_string(j));
      }
    }
  }
  return mv;
}

OrthoReport orthonormality_check(const JacobiParams& params, const SpectralData& sd, std::size_t smax, double tol) {
  const std::size_t count = sd.lambdas.size();
  if (count < 2) throw TailDominates("orthonormality_check: need at least two eigenvalues");
  std::vector<std::vector<DD>> P(count);
  parallel_for(count, [&](std::size_t j) { P[j] = poly_dd(params, smax, dd_lambda(sd, j)); });

  OrthoReport out;
  DD msum(0.0);
  for (double m : sd.masses) msum += DD(m);
  out.mass_sum_defect = std::abs((msum - DD(1.0)).value());

  for (std::size_t s = 0; s <= smax; ++s) {
    for (std::size_t t = s; t <= smax; ++t) {
      DD g(0.0);
      for (std::size_t j = 0; j < count; ++j) g += P[j][s] * P[j][t] * sd.masses[j];
      const double dev = std::abs((g - DD(s == t ? 1.0 : 0.0)).value());
      out.max_deviation = std::max(out.max_deviation, dev);

      const double last = std::abs((P[count - 1][s] * P[count - 1][t]).value() * sd.masses[count - 1]);
      const double before = std::abs((P[count - 2][s] * P[count - 2][t]).value() * sd.masses[count - 2]);
      double est = 0.0;
      if (last > 0.0) {
        const double ratio = before > 0.0 ? last / before : kInf;
        est = ratio < 1.0 ? last * ratio / (1.0 - ratio) : kInf;
      }
      out.tail_estimate = std::max(out.tail_estimate, est);
    }
  }
  if (!(out.tail_estimate <= tol)) {
    throw TailDominates("orthonormality_check: omitted eigenvalues may contribute " +
                        std::to_string(out.tail_estimate));
  }
  return out;
}

WeylValues weyl(const JacobiParams& params, double z, const SpectralData& sd, double tol) {
  WeylValues out;
  try {
    const PowerSeriesApprox ws = make_series(params, SeriesId::w(0), z, tol);
    const PowerSeriesApprox fs = make_series(params, SeriesId::f(), z, tol);
    const SeriesValue W = eval_series(ws, z, tol);
    const SeriesValue F = eval_series(fs, z, tol);
    const double v = (W.value_dd / F.value_dd).value();
    out.series = v;
    out.series_err = std::abs(v) * (rel_err(W) + rel_err(F)) + std::abs(v) * kEps;
  } catch (const NumericalFailure&) {
    out.series.reset();
  }

  DD poles(0.0);
  DD msum(0.0);
  for (std::size_t j = 0; j < sd.lambdas.size(); ++j) {
    poles += DD(sd.masses[j]) / (dd_lambda(sd, j) - DD(z));
    msum += DD(sd.masses[j]);
  }
  out.poles = poles.value();
  const double remaining = std::max(0.0, (DD(1.0) - msum).value()) + 4.0 * kEps;
  const double edge = sd.lambdas.empty() ? sd.gamma : sd.lambdas.back();
  out.poles_tail = z < edge ? remaining / (edge - z) : kInf;

  std::size_t N = std::max<std::size_t>(sd.N_used, 60);
  out.N = N;
  out.resolvent = section_resolvent00(truncate(params, N), z);
  return out;
}

SecondKind second_kind(const JacobiParams& params, std::size_t n, double z, double tol) {
  SecondKind out;
  const SeriesValue phi = phi_n(params, n, z, tol);
  const SeriesValue F = char_function(params, z, tol);
  out.value = (phi.value_dd / F.value_dd).value();
  out.err_bound = std::abs(out.value) * (rel_err(phi) + rel_err(F) + kEps);

  if (z < gamma_lower_bound(params)) {
    // P_j(z) for z below the spectrum alternates in sign and grows, so the
    // terms decay quickly; values are kept as mantissa and binary exponent.
    std::size_t len = n + 64;
    for (;;) {
      const PolyEval p = eval_P(params, len + 1, z, PolyMode::Recurrence);
      DD sum(0.0);
      double last = 0.0;
      for (std::size_t j = n; j <= len; ++j) {
        const double alpha = entries(params, j).alpha;
        const double mant = p.mantissas[j] * p.mantissas[j + 1] * alpha;
        const int ex = p.exponents[j] + p.exponents[j + 1];
        const double term = std::ldexp(1.0 / mant, -ex);
        sum += DD(term);
        last = term;
      }
      const bool done = std::abs(last) <= 1e-20 * std::abs(sum.value()) || len >= n + 4096;
      if (done) {
        const double pn = std::ldexp(p.mantissas[n], p.exponents[n]);
        out.tail_route = -(sum * pn).value();
        break;
      }
      len *= 2;
    }
  }
  return out;
}

// I_n = (-1)^n k^{-n} w_n(0) = sum_{j>=n} k^{2(j-n)} / a_j, which stays in
// range where w_n(0) itself underflows.
double scaled_w_at_zero(const JacobiParams& params, std::size_t n) {
  const auto& seq = params.seq();
  const double k2 = params.k2();
  DD sum(0.0);
  double weight = 1.0;
  for (std::size_t j = n; j < n + 100000; ++j) {
    const double a = seq.a(j);
    if (std::isfinite(a)) sum += DD(weight) / DD(a);
    weight *= k2;
    if (weight * seq.tail_sum_reciprocal(j + 1) <= 1e-18 * sum.value()) break;
  }
  return sum.value();
}

CharFromWn char_from_wn(const JacobiParams& params, double z, std::size_t N, double tol) {
  CharFromWn out;
  const bool automatic = N == 0;
  const std::size_t limit = automatic ? 1u << 20 : N;
  const double log2_k = std::log2(params.k());
  // P_n(z) by the recurrence, carried as value * 2^scale.
  double p_prev = 0.0;
  double p_cur = 1.0;
  int scale = 0;
  double alpha_prev = 0.0;
  DD sum(0.0);
  double prev = 0.0;
  std::size_t small_run = 0;
  for (std::size_t n = 0; n < limit; ++n) {
    const double a = params.seq().a(n);
    if (!std::isfinite(a)) break;
    // w_n(0) P_n(z) = I_n (-k)^n P_n(z)
    const double e = static_cast<double>(scale) + static_cast<double>(n) * log2_k;
    const double whole = std::floor(e);
    const double sign = n % 2 == 0 ? 1.0 : -1.0;
    const double term = std::ldexp(sign * scaled_w_at_zero(params, n) * p_cur * std::exp2(e - whole),
                                   static_cast<int>(whole));
    sum += DD(term);
    ++out.terms;
    const double contrib = std::abs(z * term);
    prev = contrib;
    if (automatic) {
      small_run = contrib <= tol * 1e-2 * std::max(1.0, std::abs(1.0 - (sum * z).value())) ? small_run + 1 : 0;
      if (n >= 5 && small_run >= 3) break;
    }
    const Entries en = entries(params, n);
    const double next = ((z - en.beta) / en.alpha) * p_cur - (alpha_prev / en.alpha) * p_prev;
    p_prev = p_cur;
    p_cur = next;
    alpha_prev = en.alpha;
    if (std::abs(p_cur) > 0x1p600) {
      p_prev = std::ldexp(p_prev, -600);
      p_cur = std::ldexp(p_cur, -600);
      scale += 600;
    }
  }
  out.value = (DD(1.0) - sum * z).value();
  out.tail_bound = prev;
  return out;
}

AssociatedReport associated_checks(const JacobiParams& params, std::size_t N, std::size_t zeros, double tol) {
  if (N < 3) throw std::invalid_argument("associated_checks: N must be at least 3");
  AssociatedReport out;
  out.N = N;
  TruncatedJacobi T;
  TruncatedJacobi A;
  try {
    T = truncate(params, N);
    A = truncate_associated(params, N - 1);
  } catch (const ParameterOutOfRange& e) {
    throw ConvergenceFailure(std::string("associated_checks: ") + e.what());
  }

  out.trace_direct = section_trace_inverse(A);
  out.trace_J = section_trace_inverse(T);
  std::vector<double> e0(N, 0.0);
  std::vector<double> e1(N, 0.0);
  e0[0] = 1.0;
  e1[1] = 1.0;
  const std::vector<double> v0 = tridiagonal_solve(T, 0.0, e0);
  const std::vector<double> v1 = tridiagonal_solve(T, 0.0, e1);
  const double beta0 = T.diag[0];
  const double alpha0 = T.offdiag[0];
  auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
    DD s(0.0);
    for (std::size_t i = 0; i < a.size(); ++i) s += DD(a[i]) * b[i];
    return s;
  };
  const DD x00 = DD(alpha0) * alpha0 * v1[1] / (DD(beta0) * v0[0]);
  const DD x11 = DD(alpha0) * alpha0 / DD(beta0);
  const DD formula = DD(out.trace_J) + x00 * dot(v0, v0) + dot(v0, v1) * (2.0 * alpha0) + x11 * dot(v1, v1) -
                     DD(1.0) / DD(beta0);
  out.trace_formula = formula.value();
  out.trace_rel_diff = std::abs(out.trace_formula - out.trace_direct) / std::abs(out.trace_direct);

  // Zeros of W lie strictly between consecutive eigenvalues of J.
  const std::size_t want = std::min(zeros, N - 2);
  out.associated_eigenvalues = section_eigenvalues(A, want, 0.0);
  const std::vector<double> lam = section_eigenvalues(T, want + 1, 0.0, gamma_lower_bound(params));
  out.W_zeros.assign(want, kNaN);
  // The zeros can sit closer to the next eigenvalue than a double ulp, so
  // both brackets are Newton-refined and the bisection runs in double-double.
  // Near eigenvalues the plain W series is ill-conditioned; instead
  // W = (Phi_m - F R_m) / P_m with R the solution of the recurrence that
  // absorbs the inhomogeneous first row (R_0 = 0, R_1 = 1/alpha_0).
  std::vector<NewtonResult> ends(want + 1);
  parallel_for(want + 1, [&](std::size_t i) { ends[i] = newton_refine(params, lam[i], tol); });
  parallel_for(want, [&](std::size_t i) {
    // Unrefined brackets are too coarse to separate a zero from the eigenvalue.
    if (!ends[i].ok || !ends[i + 1].ok) return;
    DD lo = ends[i].lambda;
    DD hi = ends[i + 1].lambda;
    const std::size_t m = root_series(params, hi, 0, false).match;
    const PowerSeriesApprox fs = make_series(params, SeriesId::f(), hi.value() * (1.0 + 1e-6), kTightTol);
    const PowerSeriesApprox ws = make_series(params, SeriesId::w(m), hi.value() * (1.0 + 1e-6), kTightTol);
    auto sign_at = [&](const DD& x) {
      const SeriesValue phi = phi_eval(params, ws, m, x);
      const SeriesValue f = eval_series(fs, x, kInf);
      const std::vector<DD> p = poly_dd(params, m, x);
      DD r_prev(0.0);
      DD r(0.0);
      if (m >= 1) r = DD(1.0) / DD(entries(params, 0).alpha);
      for (std::size_t n = 1; n < m; ++n) {
        const DD next = ((x - DD(entries(params, n).beta)) * r - r_prev * entries(params, n - 1).alpha) /
                        DD(entries(params, n).alpha);
        r_prev = r;
        r = next;
      }
      const DD fr = f.value_dd * r;
      const DD numer = phi.value_dd - fr;
      const double err = phi.err_bound + std::abs(r.value()) * f.err_bound +
                         1e3 * kDDEpsilon * (std::abs(phi.value) + std::abs(fr.value()));
      if (std::abs(numer.value()) <= err) return 0;
      return (numer.value() < 0.0) != (p[m].value() < 0.0) ? -1 : 1;
    };
    const int s_lo = sign_at(lo);
    const int s_hi = sign_at(hi);
    if (s_hi == 0) {
      // W vanishes at the next eigenvalue to working precision.
      out.W_zeros[i] = hi.value();
      return;
    }
    if (s_lo == 0 || s_lo == s_hi) return;
    for (int it = 0; it < 400; ++it) {
      const DD mid = (hi.value() / lo.value() > 4.0) ? DD(std::sqrt(lo.value()) * std::sqrt(hi.value()))
                                                     : (lo + hi) * 0.5;
      if (!(lo < mid && mid < hi)) break;
      const int sm = sign_at(mid);
      if (sm == 0) {
        lo = hi = mid;
        break;
      }
      (sm == s_lo ? lo : hi) = mid;
      if ((hi - lo).value() <= 1e-30 * lo.value()) break;
    }
    out.W_zeros[i] = ((lo + hi) * 0.5).value();
  });
  for (std::size_t i = 0; i < want; ++i) {
    const double d = std::abs(out.W_zeros[i] - out.associated_eigenvalues[i]) / out.associated_eigenvalues[i];
    out.zeros_max_rel_diff = std::max(out.zeros_max_rel_diff, std::isfinite(d) ? d : kInf);
  }
  return out;
}

}  // namespace jtrace
