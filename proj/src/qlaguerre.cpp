#include "jtrace/qlaguerre.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "jtrace/entire.hpp"
#include "jtrace/errors.hpp"
#include "jtrace/polycore.hpp"

namespace jtrace {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxTerms = 100000;

void check_q(double q) {
  if (!(q > 0.0 && q < 1.0)) throw ParameterOutOfRange("q must lie in (0,1), got " + std::to_string(q));
}

DD one_minus(const DD& x) { return DD(1.0) - x; }

// Sums t_0 = 1, t_{n+1} = t_n * ratio(n) until the omitted tail, bounded by
// |t_{n+1}| / (1 - rho(n+1)) with rho(i) >= sup_{l >= i} |t_{l+1}/t_l|, falls
// below tol relative to the partial sum.
template <class Ratio, class Rho>
QSeries sum_series(Ratio ratio, Rho rho, double tol, double floor) {
  DD term(1.0);
  DD sum(1.0);
  long double mag = 1.0L;
  QSeries out;
  double tail = kInf;
  std::size_t n = 0;
  for (; n < kMaxTerms; ++n) {
    const DD next = term * ratio(n);
    const double r = rho(n + 1);
    const double a = std::abs(next.value());
    if (a == 0.0) {
      tail = 0.0;
      break;
    }
    if (r < 1.0) {
      const double bound = a / (1.0 - r);
      if (bound <= tol * std::max(std::abs(sum.value()), floor)) {
        tail = bound;
        break;
      }
    }
    term = next;
    sum += term;
    mag += a;
  }
  out.value_dd = sum;
  out.value = sum.value();
  out.terms = n + 1;
  out.err_bound = tail + static_cast<double>(mag) * 4.0 * static_cast<double>(n + 2) * kDDEpsilon;
  return out;
}

QSeries phi01_core(const DD& b, double q, const DD& x, double tol) {
  const double ab = std::abs(b.value());
  const double ax = std::abs(x.value());
  DD qn(1.0);
  std::size_t at = 0;
  auto ratio = [&](std::size_t n) {
    // called with n = 0, 1, 2, ... in order
    if (n != at) qn = pow_int(DD(q), static_cast<unsigned>(n));
    at = n + 1;
    const DD cur = qn;
    qn = qn * q;
    return x * cur * cur / (one_minus(qn) * one_minus(b * cur));
  };
  auto rho = [&](std::size_t n) {
    const double qn_d = std::pow(q, static_cast<double>(n));
    const double den = (1.0 - qn_d * q) * (1.0 - ab * qn_d);
    return den > 0.0 ? ax * qn_d * qn_d / den : kInf;
  };
  return sum_series(ratio, rho, tol, 1e-300);
}

QSeries phi11_core(const DD& a, const DD& b, double q, const DD& x, double tol) {
  const double aa = std::abs(a.value());
  const double ab = std::abs(b.value());
  const double ax = std::abs(x.value());
  auto ratio = [&](std::size_t n) {
    const DD qn = pow_int(DD(q), static_cast<unsigned>(n));
    return -(one_minus(a * qn) * qn * x) / (one_minus(qn * q) * one_minus(b * qn));
  };
  auto rho = [&](std::size_t n) {
    const double qn = std::pow(q, static_cast<double>(n));
    const double den = (1.0 - qn * q) * (1.0 - ab * qn);
    return den > 0.0 ? (1.0 + aa * qn) * ax * qn / den : kInf;
  };
  return sum_series(ratio, rho, tol, 1e-300);
}

// 1phi1(q^{-n}; b; q, x), terminating after n+1 terms.
DD phi11_terminating_core(std::size_t n, const DD& b, double q, const DD& x, double* mag_out) {
  DD term(1.0);
  DD sum(1.0);
  long double mag = 1.0L;
  DD qm(1.0);
  const DD q_inv_n = pow_int(DD(1.0) / DD(q), static_cast<unsigned>(n));
  for (std::size_t m = 0; m < n; ++m) {
    // (1 - q^{m-n}) / ((1 - q^{m+1})(1 - b q^m)) * (-q^m) * x
    const DD qm1 = qm * q;
    term = -(term * one_minus(qm * q_inv_n) * qm * x) / (one_minus(qm1) * one_minus(b * qm));
    sum += term;
    mag += std::abs(term.value());
    qm = qm1;
  }
  if (mag_out) *mag_out = static_cast<double>(mag);
  return sum;
}

DD qpow_dd(double q, std::size_t e) { return pow_int(DD(q), static_cast<unsigned>(e)); }

DD qpoch_dd(const DD& a, double q, std::size_t n) {
  DD p(1.0);
  DD qi(1.0);
  for (std::size_t i = 0; i < n; ++i) {
    p *= one_minus(a * qi);
    qi = qi * q;
  }
  return p;
}

DD laguerre_dd(std::size_t n, int a, const DD& x, double q) {
  const DD b = qpow_dd(q, static_cast<std::size_t>(a + 1));
  const DD pref = qpoch_dd(b, q, n) / qpoch_dd(DD(q), q, n);
  const DD arg = -(qpow_dd(q, n + static_cast<std::size_t>(a) + 1) * x);
  return pref * phi11_terminating_core(n, b, q, arg, nullptr);
}

DD modified_dd(std::size_t n, const DD& x, double q) {
  return qpow_dd(q, n + 1) * laguerre_dd(n, 0, x, q) + laguerre_dd(n, 1, x, q) * (1.0 - q);
}

double infinite_ratio(double num_a, double q) {
  const InfiniteProduct top = qpochhammer_inf(num_a, q);
  const InfiniteProduct bottom = qpochhammer_inf(q, q);
  return top.value / bottom.value;
}

// J_nu^{(2)} with the half-argument x/2 given in double-double.
QSeries bessel_core(double nu, double q, const DD& half, double tol) {
  const bool integer = nu == std::floor(nu) && nu >= 0.0 && nu < 64.0;
  const DD b = integer ? qpow_dd(q, static_cast<std::size_t>(nu) + 1) : DD(std::pow(q, nu + 1.0));
  const DD arg = -(b * half * half);
  QSeries s = phi01_core(b, q, arg, tol);
  const DD pref(infinite_ratio(b.value(), q));
  const DD power = integer ? pow_int(half, static_cast<unsigned>(nu)) : DD(std::pow(half.value(), nu));
  const DD factor = pref * power;
  s.value_dd = s.value_dd * factor;
  s.value = s.value_dd.value();
  // the infinite products are good to a few ulps in double
  s.err_bound = s.err_bound * std::abs(factor.value()) + 8.0 * std::numeric_limits<double>::epsilon() * std::abs(s.value);
  return s;
}

DD small_z_limit(double c0, double c1, const DD& z) { return DD(c0) - z * c1; }

// W_I = q^2/(1-q^2) 0phi1(; q^3; q, -q^4 z).
QSeries w_one_phi(double q, const DD& z, double tol) {
  const DD pref = qpow_dd(q, 2) / one_minus(qpow_dd(q, 2));
  QSeries s = phi01_core(qpow_dd(q, 3), q, -(qpow_dd(q, 4) * z), tol);
  s.value_dd = s.value_dd * pref;
  s.value = s.value_dd.value();
  s.err_bound *= std::abs(pref.value());
  return s;
}

// W_II = sum_m q^{(m+3)(m+1)} S_m / ((q;q)_m (q^2;q)_m) (-z)^m,
// S_m = sum_j q^{(m+2)j} / (1 - q^{j+m+2}) = 2phi1(q^{m+2}, q; q^{m+3}; q, q^{m+2}) / (1 - q^{m+2}).
QSeries w_two(double q, const DD& z, double tol) {
  const double az = std::abs(z.value());
  DD sum(0.0);
  long double err = 0.0L;
  long double mag = 0.0L;
  DD qq_m(1.0);   // (q;q)_m
  DD q2q_m(1.0);  // (q^2;q)_m
  DD zpow(1.0);   // (-z)^m
  QSeries out;
  double tail = kInf;
  std::size_t m = 0;
  double first = 0.0;
  for (; m < 4096; ++m) {
    const double qm2 = std::pow(q, static_cast<double>(m + 2));
    const QSeries p21 = phi21(qm2, q, qm2 * q, q, qm2, std::min(tol, 1e-20));
    const DD S = p21.value_dd / one_minus(qpow_dd(q, m + 2));
    const DD t = qpow_dd(q, (m + 3) * (m + 1)) * S * zpow / (qq_m * q2q_m);
    const double at = std::abs(t.value());
    if (m == 0) first = at;
    sum += t;
    mag += at;
    err += at * (p21.err_bound / std::abs(p21.value));

    // next coefficient ratio bound, decreasing in m
    const double qn = std::pow(q, static_cast<double>(m + 1));
    const double rho = std::pow(q, 2.0 * static_cast<double>(m + 1) + 5.0) * az /
                       ((1.0 - qn * q) * (1.0 - qn * q * q));
    const double next_bound = at * std::pow(q, 2.0 * static_cast<double>(m) + 5.0) * az /
                              ((1.0 - qn) * (1.0 - qn * q));
    if (rho < 1.0) {
      const double bound = next_bound / (1.0 - rho);
      if (bound <= tol * std::max(std::abs(sum.value()), first)) {
        tail = bound;
        ++m;
        break;
      }
    }
    qq_m *= one_minus(qpow_dd(q, m + 1));
    q2q_m *= one_minus(qpow_dd(q, m + 2));
    zpow = -(zpow * z);
  }
  out.value_dd = sum;
  out.value = sum.value();
  out.terms = m;
  out.err_bound = tail + static_cast<double>(err) + static_cast<double>(mag) * 8.0 * static_cast<double>(m + 2) * kDDEpsilon;
  return out;
}

QSeries w_closed_dd(double q, const DD& z) {
  const QSeries one = w_one_phi(q, z, 1e-31);
  const QSeries two = w_two(q, z, 1e-31);
  QSeries out;
  out.value_dd = one.value_dd + two.value_dd;
  out.value = out.value_dd.value();
  out.err_bound = one.err_bound + two.err_bound;
  out.terms = one.terms + two.terms;
  return out;
}

}  // namespace

QParams::QParams(double q_) : q(q_) { check_q(q_); }

JacobiParams QParams::jacobi() const { return JacobiParams(SequenceSpec::geometric(q), std::sqrt(q)); }

double qpochhammer(double a, double q, std::size_t n) { return qpochhammer_dd(a, q, n).value(); }

DD qpochhammer_dd(double a, double q, std::size_t n) { return qpoch_dd(DD(a), q, n); }

InfiniteProduct qpochhammer_inf(double a, double q, double tol) {
  if (!(std::abs(q) < 1.0)) throw DivergentArgument("qpochhammer_inf: needs |q| < 1");
  InfiniteProduct out;
  DD p(1.0);
  double aqn = a;
  std::size_t n = 0;
  for (; n < kMaxTerms; ++n) {
    const double rem = std::abs(aqn) / ((1.0 - std::abs(q)) * (1.0 - std::abs(aqn)));
    if (std::abs(aqn) < 0.5 && rem < tol) {
      out.rel_bound = rem;
      break;
    }
    p *= DD(1.0) - DD(aqn);
    aqn *= q;
  }
  out.value = p.value();
  out.factors = n;
  return out;
}

QSeries phi01(double b, double q, double x, double tol) { return phi01(b, q, DD(x), tol); }

QSeries phi01(double b, double q, const DD& x, double tol) {
  check_q(q);
  return phi01_core(DD(b), q, x, tol);
}

QSeries phi11(double a, double b, double q, double x, double tol) {
  check_q(q);
  return phi11_core(DD(a), DD(b), q, DD(x), tol);
}

QSeries phi11_terminating(std::size_t n, double b, double q, double x) {
  check_q(q);
  double mag = 0.0;
  QSeries out;
  out.value_dd = phi11_terminating_core(n, DD(b), q, DD(x), &mag);
  out.value = out.value_dd.value();
  out.terms = n + 1;
  out.err_bound = mag * 8.0 * static_cast<double>(n + 2) * kDDEpsilon;
  return out;
}

QSeries phi21(double a, double b, double c, double q, double x, double tol) {
  check_q(q);
  if (!(std::abs(x) < 1.0)) throw DivergentArgument("phi21: series diverges for |x| >= 1");
  const double aa = std::abs(a);
  const double ab = std::abs(b);
  const double ac = std::abs(c);
  const double ax = std::abs(x);
  auto ratio = [&](std::size_t n) {
    const DD qn = qpow_dd(q, n);
    return one_minus(qn * a) * one_minus(qn * b) * x / (one_minus(qn * q) * one_minus(qn * c));
  };
  auto rho = [&](std::size_t n) {
    const double qn = std::pow(q, static_cast<double>(n));
    const double den = (1.0 - qn * q) * (1.0 - ac * qn);
    return den > 0.0 ? (1.0 + aa * qn) * (1.0 + ab * qn) * ax / den : kInf;
  };
  return sum_series(ratio, rho, tol, 1e-300);
}

double q_laguerre(std::size_t n, int a, double x, double q) {
  check_q(q);
  if (a != 0 && a != 1) throw std::invalid_argument("q_laguerre: a must be 0 or 1");
  return laguerre_dd(n, a, DD(x), q).value();
}

double modified_laguerre(std::size_t n, double x, double q) {
  check_q(q);
  return modified_dd(n, DD(x), q).value();
}

double classical_laguerre(std::size_t n, double x) {
  double prev = 0.0;
  double cur = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<double>(i);
    const double next = ((2.0 * k + 1.0 - x) * cur - k * prev) / (k + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

double l0_l1_residual(std::size_t n, double x, double q) {
  check_q(q);
  const DD X(x);
  const DD t0 = qpow_dd(q, n) * laguerre_dd(n, 0, X, q);
  const DD t1 = n == 0 ? DD(0.0) : laguerre_dd(n - 1, 1, X, q);
  const DD t2 = laguerre_dd(n, 1, X, q);
  const double scale = std::max({std::abs(t0.value()), std::abs(t1.value()), std::abs(t2.value())});
  return std::abs((t0 + t1 - t2).value()) / scale;
}

double l0_recurrence_residual(std::size_t n, double x, double q) {
  check_q(q);
  const DD X(x);
  const DD Ln = laguerre_dd(n, 0, X, q);
  const DD Lp = laguerre_dd(n + 1, 0, X, q);
  const DD Lm = n == 0 ? DD(0.0) : laguerre_dd(n - 1, 0, X, q);
  const DD c1 = one_minus(qpow_dd(q, n + 1));
  const DD c2 = one_minus(qpow_dd(q, n)) * q;
  const DD lhs = -(qpow_dd(q, 2 * n + 1) * X * Ln);
  const DD rhs = c1 * (Lp - Ln) - c2 * (Ln - Lm);
  const double scale = std::max({std::abs(lhs.value()), std::abs((c1 * Lp).value()), std::abs((c1 * Ln).value()),
                                 std::abs((c2 * Ln).value()), std::abs((c2 * Lm).value())});
  return std::abs((lhs - rhs).value()) / scale;
}

double modified_recurrence_residual(std::size_t n, double x, double q) {
  check_q(q);
  const DD X(x);
  const DD Ln = modified_dd(n, X, q);
  const DD Lp = modified_dd(n + 1, X, q);
  const DD Lm = n == 0 ? DD(0.0) : modified_dd(n - 1, X, q);
  const DD c1 = one_minus(qpow_dd(q, n + 1));
  const DD c3 = one_minus(qpow_dd(q, n)) * qpow_dd(q, 3);
  const DD t1 = c1 * Lp;
  const DD t2 = (c1 + c3) * Ln;
  const DD t3 = c3 * Lm;
  const DD t4 = X * qpow_dd(q, 2 * n + 2) * Ln;
  const double scale = std::max({std::abs(t1.value()), std::abs(t2.value()), std::abs(t3.value()), std::abs(t4.value())});
  return std::abs((t1 - t2 + t3 + t4).value()) / scale;
}

ModifiedVsP modified_vs_P(std::size_t n, double x, double q) {
  const QParams qp(q);
  const JacobiParams params = qp.jacobi();
  ModifiedVsP out;
  out.P = eval_P(params, n, x, PolyMode::Recurrence).values[n];
  DD scale = pow_int(DD(1.0) / DD(params.k()), static_cast<unsigned>(n));
  if (n % 2 == 1) scale = -scale;
  out.scaled = (scale * modified_dd(n, DD(x), q)).value();
  out.residual = std::abs(out.P - out.scaled);
  const double denom = std::max(std::abs(out.P), std::abs(out.scaled));
  out.rel_residual = denom == 0.0 ? out.residual : out.residual / denom;
  out.recurrence_residual = modified_recurrence_residual(n, x, q);
  return out;
}

QSeries jackson_qbessel2(double nu, double x, double q, double tol) {
  check_q(q);
  if (!(nu > -1.0)) throw ParameterOutOfRange("jackson_qbessel2: nu must exceed -1");
  if (x < 0.0) throw ParameterOutOfRange("jackson_qbessel2: x must be non-negative");
  return bessel_core(nu, q, DD(x) * 0.5, tol);
}

std::vector<double> qbessel_roots(double nu, double q, std::size_t count) {
  check_q(q);
  auto f = [&](double x) { return jackson_qbessel2(nu, x, q, 1e-20).value; };
  std::vector<double> roots;
  double x = 0.05;
  double fx = f(x);
  while (roots.size() < count && x < 1e15) {
    const double y = x * 1.01;
    const double fy = f(y);
    if (fx == 0.0) {
      roots.push_back(x);
    } else if ((fx < 0.0) != (fy < 0.0)) {
      double lo = x;
      double hi = y;
      const bool lo_negative = fx < 0.0;
      for (int it = 0; it < 200; ++it) {
        const double mid = lo + (hi - lo) / 2.0;
        if (!(mid > lo && mid < hi)) break;
        const double fm = f(mid);
        if (fm == 0.0) {
          lo = hi = mid;
          break;
        }
        ((fm < 0.0) == lo_negative ? lo : hi) = mid;
      }
      roots.push_back(lo + (hi - lo) / 2.0);
    }
    x = y;
    fx = fy;
  }
  return roots;
}

double F_coefficient(std::size_t m, double q) {
  check_q(q);
  return (qpow_dd(q, m * (m + 1)) / (qpoch_dd(DD(q), q, m) * qpoch_dd(qpow_dd(q, 2), q, m))).value();
}

ClosedFormF closed_form_F(double z, double q) {
  check_q(q);
  ClosedFormF out;
  const DD Z(z);
  const DD q2 = qpow_dd(q, 2);
  out.via_phi01 = phi01_core(q2, q, -(q2 * Z), 1e-20).value;

  if (std::abs(z) < 1e-8) {
    out.via_bessel = small_z_limit(1.0, q * q / ((1.0 - q) * (1.0 - q * q)), Z).value();
  } else if (z > 0.0) {
    const DD half = sqrt(Z);
    const QSeries j1 = bessel_core(1.0, q, half, 1e-20);
    out.via_bessel = (j1.value_dd * (1.0 - q) / half).value();
  } else {
    out.via_bessel = std::numeric_limits<double>::quiet_NaN();
  }

  const JacobiParams params = QParams(q).jacobi();
  out.via_series = eval_series(make_series(params, SeriesId::f(), std::abs(z), 1e-14), z, 1e-12).value;
  return out;
}

ClosedFormW closed_form_W(double z, double q) {
  check_q(q);
  ClosedFormW out;
  const DD Z(z);
  DD w_one;
  double w_one_err = 0.0;
  if (std::abs(z) < 1e-8) {
    const double c0 = q * q / (1.0 - q * q);
    w_one = small_z_limit(c0, c0 * std::pow(q, 4) / ((1.0 - q) * (1.0 - q * q * q)), Z);
    w_one_err = c0 * 1e-15;
  } else if (z > 0.0) {
    const DD half = sqrt(Z * q);
    const QSeries j2 = bessel_core(2.0, q, half, 1e-20);
    w_one = j2.value_dd * ((1.0 - q) * q) / Z;
    w_one_err = j2.err_bound * (1.0 - q) * q / std::abs(z);
  } else {
    const QSeries s = w_one_phi(q, Z, 1e-20);
    w_one = s.value_dd;
    w_one_err = s.err_bound;
  }
  const QSeries two = w_two(q, Z, 1e-20);
  out.W_I = w_one.value();
  out.W_II = two.value;
  out.via_closed = (w_one + two.value_dd).value();
  out.err_bound = w_one_err + two.err_bound;

  const JacobiParams params = QParams(q).jacobi();
  out.via_series = eval_series(make_series(params, SeriesId::w(0), std::abs(z), 1e-14), z, 1e-12).value;
  return out;
}

double closed_form_mass(const DD& lambda, double q) {
  check_q(q);
  const QSeries W = w_closed_dd(q, lambda);
  // F'(z) = -sum_{m>=1} m c_m (-z)^{m-1}
  DD deriv(0.0);
  DD zpow(1.0);
  DD c(1.0);
  const double az = std::abs(lambda.value());
  double first = 0.0;
  for (std::size_t m = 1; m < 4096; ++m) {
    c = c * qpow_dd(q, 2 * m) / (one_minus(qpow_dd(q, m)) * one_minus(qpow_dd(q, m + 1)));
    const DD t = c * zpow * static_cast<double>(m);
    deriv -= t;
    const double at = std::abs(t.value());
    if (m == 1) first = at;
    const double rho = std::pow(q, 2.0 * static_cast<double>(m + 1)) * az * 2.0 /
                       ((1.0 - std::pow(q, static_cast<double>(m + 1))) * (1.0 - std::pow(q, static_cast<double>(m + 2))));
    if (rho < 0.5 && at * rho <= 1e-22 * std::max(std::abs(deriv.value()), first)) break;
    zpow = -(zpow * lambda);
  }
  return (-(W.value_dd / deriv)).value();
}

}  // namespace jtrace
