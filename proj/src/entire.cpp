#include "jtrace/entire.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "jtrace/errors.hpp"
#include "jtrace/polycore.hpp"

namespace jtrace {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr std::size_t kMaxCutoff = std::size_t{1} << 15;
constexpr std::size_t kMaxOrder = 1024;

DD divide_by(const DD& numerator, double a) {
  if (!std::isfinite(a)) return DD(0.0);
  return numerator / DD(a);
}

double one_minus_k2(const JacobiParams& params) { return 1.0 - params.k2(); }

// Ratio bound rho_m: every chain of length m+1 extends a chain of length m by
// an index no smaller than first_index(m), and the extension weighs at most
// 1/((1-k^2) a_j).
double ratio_bound_at(const JacobiParams& params, SeriesId id, std::size_t m) {
  const std::size_t first = id.kind == SeriesKind::F ? m : id.n + m + 1;
  return params.seq().tail_sum_reciprocal(first) / one_minus_k2(params);
}

double arithmetic_epsilon(const PowerSeriesApprox& s) {
  const auto M = static_cast<double>(s.M);
  const auto J = static_cast<double>(s.J);
  return ((M + 2.0) * (J + 8.0) + 4.0 * (M + 1.0)) * kDDEpsilon;
}

// Relative rounding error of a DP level-m chain sum over cutoff J.
double coeff_rel_error(std::size_t J, std::size_t m) {
  return static_cast<double>((J + 8) * (m + 2)) * kDDEpsilon;
}

double scale_floor(const PowerSeriesApprox& s) { return s.coeffs.empty() ? 1.0 : s.coeffs[0].value(); }

[[noreturn]] void cancellation(const char* what, double z, double bound, double limit) {
  throw CancellationFailure(std::string(what) + " at z=" + std::to_string(z) + ": bound " + std::to_string(bound) +
                            " exceeds " + std::to_string(limit));
}

}  // namespace

namespace detail {

ChainDP::ChainDP(const JacobiParams& params, SeriesId id, std::size_t cutoff)
    : a_(params.seq().values(cutoff + 1)), k2_(eft::two_prod(params.k(), params.k())), sums_(cutoff + 1) {
  if (id.kind == SeriesKind::F) {
    // S_1(j) = (1 + k^2 + ... + k^{2j}) / a_j
    level_ = 1;
    DD geometric(1.0);
    for (std::size_t j = 0; j <= cutoff; ++j) {
      if (j > 0) geometric = DD(1.0) + k2_ * geometric;
      sums_[j] = divide_by(geometric, a_[j]);
    }
  } else {
    // T_0(j) = k^{2j} / a_j on j >= n
    level_ = 0;
    DD power(1.0);
    for (std::size_t j = 0; j <= cutoff; ++j) {
      if (j > 0) power = power * k2_;
      sums_[j] = j >= id.n ? divide_by(power, a_[j]) : DD(0.0);
    }
  }
}

DD ChainDP::total() const {
  DD s(0.0);
  for (const DD& v : sums_) s += v;
  return s;
}

void ChainDP::advance() {
  DD weighted(0.0);
  DD prefix(0.0);
  for (std::size_t j = 0; j < sums_.size(); ++j) {
    const DD current = sums_[j];
    sums_[j] = divide_by(prefix, a_[j]);
    weighted = k2_ * weighted + current;
    prefix += weighted;
  }
  ++level_;
}

}  // namespace detail

double PowerSeriesApprox::truncation_bound(double r) const {
  long double omitted = 0.0L;
  long double rm = 1.0L;
  for (std::size_t m = 0; m <= M; ++m) {
    omitted += static_cast<long double>(std::max(0.0, upper[m] - coeffs[m].value())) * rm;
    if (m < M) rm *= r;
  }
  const long double theta = static_cast<long double>(ratio_bound) * r;
  if (theta >= 1.0L) return std::numeric_limits<double>::infinity();
  const long double remainder = static_cast<long double>(upper[M]) * rm * theta / (1.0L - theta);
  return static_cast<double>(omitted + remainder);
}

double PowerSeriesApprox::derivative_truncation_bound(double r) const {
  long double omitted = 0.0L;
  long double rm = 1.0L;  // r^{m-1}
  for (std::size_t m = 1; m <= M; ++m) {
    omitted += static_cast<long double>(m) * std::max(0.0, upper[m] - coeffs[m].value()) * rm;
    if (m < M) rm *= r;
  }
  const long double rM = M == 0 ? 1.0L : rm * r;
  const long double theta =
      static_cast<long double>(ratio_bound) * r * static_cast<long double>(M + 2) / static_cast<long double>(M + 1);
  if (theta >= 1.0L) return std::numeric_limits<double>::infinity();
  const long double first = static_cast<long double>(M + 1) * upper[M] * ratio_bound * rM;
  return static_cast<double>(omitted + first / (1.0L - theta));
}

PowerSeriesApprox series_coeffs(const JacobiParams& params, SeriesId id, std::size_t M, std::size_t J) {
  if (M > J) {
    throw std::invalid_argument("series_coeffs: order M=" + std::to_string(M) + " exceeds cutoff J=" +
                                std::to_string(J));
  }
  if (id.kind == SeriesKind::W && J <= id.n) {
    throw std::invalid_argument("series_coeffs: W(n) needs cutoff J > n");
  }
  const double denom = one_minus_k2(params);
  PowerSeriesApprox s;
  s.id = id;
  s.M = M;
  s.J = J;
  s.k = params.k();
  s.tail_omitted = params.seq().tail_sum_reciprocal(J + 1) / denom;
  s.S = params.seq().tail_sum_reciprocal(id.kind == SeriesKind::F ? 0 : id.n) / denom;
  s.coeffs.reserve(M + 1);
  s.upper.reserve(M + 1);

  detail::ChainDP dp(params, id, J);
  if (id.kind == SeriesKind::F) {
    s.coeffs.emplace_back(1.0);
    s.upper.push_back(1.0);
  } else {
    s.lead_omitted = std::pow(params.k2(), static_cast<double>(J + 1)) * params.seq().tail_sum_reciprocal(J + 1);
    const DD c0 = dp.total();
    s.coeffs.push_back(c0);
    s.upper.push_back(c0.value() * (1.0 + coeff_rel_error(J, 0)) + s.lead_omitted);
    if (M > 0) dp.advance();
  }
  for (std::size_t m = 1; m <= M; ++m) {
    const DD cm = dp.total();
    s.coeffs.push_back(cm);
    s.upper.push_back(cm.value() * (1.0 + coeff_rel_error(J, m)) + s.tail_omitted * s.upper[m - 1]);
    if (m < M) dp.advance();
  }
  s.ratio_bound = ratio_bound_at(params, id, M);
  return s;
}

PowerSeriesApprox make_series(const JacobiParams& params, SeriesId id, double radius, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("make_series: tolerance must be positive");
  const double r = std::abs(radius);
  const double denom = one_minus_k2(params);
  const double target = tol / 10.0;
  const std::size_t base = id.kind == SeriesKind::W ? id.n : 0;

  // The remainder estimate needs rho_M r < 1/2; give up early when that
  // order is out of reach instead of growing M towards J.
  std::size_t needed = 0;
  while (ratio_bound_at(params, id, needed) * r >= 0.5) {
    if (++needed > kMaxOrder) {
      throw TruncationTooCoarse("make_series: no truncation order up to " + std::to_string(kMaxOrder) +
                                " certifies radius " + std::to_string(r));
    }
  }

  std::size_t J = base + 16;
  while (J < kMaxCutoff && params.seq().tail_sum_reciprocal(J + 1) * std::max(r, 1.0) / denom >= target) {
    J = std::min(kMaxCutoff, 2 * J);
  }

  for (;;) {
    // Grow M level by level until the m > M remainder is negligible.
    detail::ChainDP dp(params, id, J);
    std::vector<DD> coeffs;
    double upper_prev = 1.0;
    double c0 = 1.0;
    const double t = params.seq().tail_sum_reciprocal(J + 1) / denom;
    std::size_t M = 0;
    long double rm = 1.0L;
    if (id.kind == SeriesKind::W) {
      c0 = dp.total().value();
      upper_prev = c0 + std::pow(params.k2(), static_cast<double>(J + 1)) * params.seq().tail_sum_reciprocal(J + 1);
    }
    for (std::size_t m = 1;; ++m) {
      const double rho = ratio_bound_at(params, id, m - 1);
      const long double theta = static_cast<long double>(rho) * r;
      const bool converged = theta < 0.5L && static_cast<long double>(upper_prev) * rm * theta / (1.0L - theta) <=
                                                 static_cast<long double>(target * c0);
      if ((converged && m - 1 >= std::min<std::size_t>(2, J)) || m - 1 == J) {
        M = m - 1;
        break;
      }
      if (id.kind == SeriesKind::W || m > 1) dp.advance();
      upper_prev = dp.total().value() * (1.0 + coeff_rel_error(J, m)) + t * upper_prev;
      rm *= r;
    }
    PowerSeriesApprox s = series_coeffs(params, id, M, J);
    if (s.truncation_bound(r) <= target * c0 || J >= kMaxCutoff) return s;
    J = std::min(kMaxCutoff, 2 * J);
  }
}

SeriesValue eval_series(const PowerSeriesApprox& s, const DD& z, double tol) {
  const double r = std::abs(z.value());
  DD acc(0.0);
  long double magnitude = 0.0L;
  long double rm = 1.0L;
  for (std::size_t m = 0; m <= s.M; ++m) {
    magnitude += static_cast<long double>(s.coeffs[m].value()) * rm;
    rm *= r;
  }
  const DD w = -z;
  for (std::size_t i = s.M + 1; i-- > 0;) acc = acc * w + s.coeffs[i];

  SeriesValue out;
  out.value_dd = acc;
  out.value = acc.value();
  out.magnitude = static_cast<double>(magnitude);
  out.kappa = out.value == 0.0 ? std::numeric_limits<double>::infinity() : out.magnitude / std::abs(out.value);
  const double arith = out.magnitude * arithmetic_epsilon(s);
  const double trunc = s.truncation_bound(r);
  out.err_bound = trunc + arith + std::abs(out.value) * kDDEpsilon;

  const double limit = tol * std::max(std::abs(out.value), scale_floor(s));
  if (!(trunc <= limit)) cancellation("series truncation not certified", z.value(), trunc, limit);
  if (!(arith <= limit)) cancellation("cancellation in series evaluation", z.value(), arith, limit);
  return out;
}

SeriesValue eval_series(const PowerSeriesApprox& s, double z, double tol) { return eval_series(s, DD(z), tol); }

ComplexSeriesValue eval_series(const PowerSeriesApprox& s, std::complex<double> z, double tol) {
  const double r = std::abs(z);
  const CDD w(-z);
  CDD acc(DD(0.0), DD(0.0));
  long double magnitude = 0.0L;
  long double rm = 1.0L;
  for (std::size_t m = 0; m <= s.M; ++m) {
    magnitude += static_cast<long double>(s.coeffs[m].value()) * rm;
    rm *= r;
  }
  for (std::size_t i = s.M + 1; i-- > 0;) acc = acc * w + CDD(s.coeffs[i], DD(0.0));

  ComplexSeriesValue out;
  out.value = acc.value();
  out.magnitude = static_cast<double>(magnitude);
  const double absval = std::abs(out.value);
  out.kappa = absval == 0.0 ? std::numeric_limits<double>::infinity() : out.magnitude / absval;
  const double arith = 2.0 * out.magnitude * arithmetic_epsilon(s);
  const double trunc = s.truncation_bound(r);
  out.err_bound = trunc + arith + absval * kEps;

  const double limit = tol * std::max(absval, scale_floor(s));
  if (!(trunc <= limit)) cancellation("series truncation not certified", r, trunc, limit);
  if (!(arith <= limit)) cancellation("cancellation in series evaluation", r, arith, limit);
  return out;
}

SeriesValue eval_series_derivative(const PowerSeriesApprox& s, const DD& z, double tol) {
  const double r = std::abs(z.value());
  DD acc(0.0);
  long double magnitude = 0.0L;
  long double rm = 1.0L;
  for (std::size_t m = 1; m <= s.M; ++m) {
    magnitude += static_cast<long double>(m) * s.coeffs[m].value() * rm;
    rm *= r;
  }
  const DD w = -z;
  for (std::size_t m = s.M; m >= 1; --m) acc = acc * w + s.coeffs[m] * static_cast<double>(m);
  acc = -acc;

  SeriesValue out;
  out.value_dd = acc;
  out.value = acc.value();
  out.magnitude = static_cast<double>(magnitude);
  out.kappa = out.value == 0.0 ? std::numeric_limits<double>::infinity() : out.magnitude / std::abs(out.value);
  const double arith = out.magnitude * arithmetic_epsilon(s);
  const double trunc = s.derivative_truncation_bound(r);
  out.err_bound = trunc + arith + std::abs(out.value) * kDDEpsilon;

  const double floor = s.M >= 1 ? s.coeffs[1].value() : 1.0;
  const double limit = tol * std::max(std::abs(out.value), floor);
  if (!(trunc <= limit)) cancellation("derivative truncation not certified", z.value(), trunc, limit);
  if (!(arith <= limit)) cancellation("cancellation in derivative evaluation", z.value(), arith, limit);
  return out;
}

SeriesValue eval_series_derivative(const PowerSeriesApprox& s, double z, double tol) {
  return eval_series_derivative(s, DD(z), tol);
}

namespace {

SeriesValue scale_phi(SeriesValue v, const JacobiParams& params, std::size_t n) {
  DD factor = pow_int(DD(1.0) / DD(params.k()), static_cast<unsigned>(n));
  if (n % 2 == 1) factor = -factor;
  v.value_dd = v.value_dd * factor;
  v.value = v.value_dd.value();
  v.err_bound *= std::abs(factor.value());
  v.magnitude *= std::abs(factor.value());
  return v;
}

}  // namespace

SeriesValue phi_n(const JacobiParams& params, std::size_t n, double z, std::size_t M, std::size_t J, double tol) {
  return scale_phi(eval_series(series_coeffs(params, SeriesId::w(n), M, J), z, tol), params, n);
}

SeriesValue phi_n(const JacobiParams& params, std::size_t n, double z, double tol) {
  return scale_phi(eval_series(make_series(params, SeriesId::w(n), z, tol), z, tol), params, n);
}

SeriesValue phi_n(const JacobiParams& params, std::size_t n, const DD& z, double tol) {
  const double r = std::abs(z.value());
  return scale_phi(eval_series(make_series(params, SeriesId::w(n), r, std::isfinite(tol) ? tol : 1e-14), z, tol),
                   params, n);
}

SeriesValue char_function(const JacobiParams& params, double z, double tol) {
  return eval_series(make_series(params, SeriesId::f(), z, tol), z, tol);
}

double wronskian(const JacobiParams& params, std::size_t n, double z, double tol) {
  const PolyEval p = eval_P(params, n + 1, z, PolyMode::Recurrence);
  const double phi0 = phi_n(params, n, z, tol).value;
  const double phi1 = phi_n(params, n + 1, z, tol).value;
  const double alpha = entries(params, n).alpha;
  return alpha * (p.values[n] * phi1 - p.values[n + 1] * phi0);
}

Residual wronskian_residual(const JacobiParams& params, std::size_t n, double z, double tol) {
  const PolyEval p = eval_P(params, n + 1, z, PolyMode::Recurrence);
  const SeriesValue phi0 = phi_n(params, n, z, tol);
  const SeriesValue phi1 = phi_n(params, n + 1, z, tol);
  const SeriesValue f = char_function(params, z, tol);
  const double alpha = entries(params, n).alpha;
  const double t1 = alpha * p.values[n] * phi1.value;
  const double t2 = alpha * p.values[n + 1] * phi0.value;

  Residual out;
  out.value = std::abs((t1 - t2) - f.value);
  out.scale = std::max({std::abs(t1), std::abs(t2), std::abs(f.value)});
  const double poly_rel = 8.0 * static_cast<double>(n + 2) * kEps;
  out.err_bound = alpha * (std::abs(p.values[n]) * phi1.err_bound + std::abs(p.values[n + 1]) * phi0.err_bound) +
                  poly_rel * (std::abs(t1) + std::abs(t2)) + f.err_bound + 4.0 * kEps * out.scale;
  return out;
}

Residual phi_recurrence_residual(const JacobiParams& params, std::size_t n, double z, double tol) {
  const Entries en = entries(params, n);
  const SeriesValue cur = phi_n(params, n, z, tol);
  const SeriesValue next = phi_n(params, n + 1, z, tol);
  double t_prev = 0.0;
  double e_prev = 0.0;
  if (n == 0) {
    const SeriesValue f = char_function(params, z, tol);
    t_prev = -f.value;
    e_prev = f.err_bound;
  } else {
    const SeriesValue prev = phi_n(params, n - 1, z, tol);
    const double alpha_prev = entries(params, n - 1).alpha;
    t_prev = alpha_prev * prev.value;
    e_prev = alpha_prev * prev.err_bound;
  }
  const double t_next = en.alpha * next.value;
  const double t_cur = (en.beta - z) * cur.value;

  Residual out;
  out.value = std::abs(t_next + t_cur + t_prev);
  out.scale = std::max({std::abs(t_next), std::abs(t_cur), std::abs(t_prev)});
  out.err_bound = en.alpha * next.err_bound + std::abs(en.beta - z) * cur.err_bound + e_prev + 8.0 * kEps * out.scale;
  return out;
}

}  // namespace jtrace
