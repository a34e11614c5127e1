#include "jtrace/polycore.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "jtrace/ddouble.hpp"
#include "jtrace/entire.hpp"

namespace jtrace {
namespace {

constexpr std::size_t kMaxTerms = std::size_t{1} << 22;
constexpr int kRescaleExp = 600;

double one_minus_k_power(double k, double e) {
  const double p = std::pow(k, e);
  return p <= 0.5 ? 1.0 - p : -std::expm1(e * std::log(k));
}

void store(PolyEval& out, std::size_t i, double scaled, int scale_exp) {
  int e = 0;
  const double m = std::frexp(scaled, &e);
  out.mantissas[i] = m;
  out.exponents[i] = e + scale_exp;
  const double v = std::ldexp(m, out.exponents[i]);
  if (std::isinf(v)) out.overflow = true;
  out.values[i] = v;
}

PolyEval recurrence(const JacobiParams& params, std::size_t n, double x) {
  PolyEval out;
  out.n = n;
  out.x = x;
  out.values.resize(n + 1);
  out.mantissas.resize(n + 1);
  out.exponents.resize(n + 1);

  // prev and cur share the scale 2^scale_exp.
  double prev = 0.0;
  double cur = 1.0;
  int scale_exp = 0;
  double alpha_prev = 0.0;
  store(out, 0, cur, scale_exp);
  for (std::size_t i = 0; i < n; ++i) {
    const Entries en = entries(params, i);
    // Divide first: beta alone can be near 2^1000 while cur sits near 2^600.
    const double next = ((x - en.beta) / en.alpha) * cur - (alpha_prev / en.alpha) * prev;
    prev = cur;
    cur = next;
    alpha_prev = en.alpha;
    if (std::abs(cur) > std::ldexp(1.0, kRescaleExp)) {
      prev = std::ldexp(prev, -kRescaleExp);
      cur = std::ldexp(cur, -kRescaleExp);
      scale_exp += kRescaleExp;
    }
    store(out, i + 1, cur, scale_exp);
  }
  return out;
}

// Chain sums restricted to j <= i-1 give the coefficients of (-1)^i k^i P_i,
// so a single DP with cutoff n-1 serves every degree up to n via prefix sums.
PolyEval explicit_form(const JacobiParams& params, std::size_t n, double x) {
  PolyEval out;
  out.n = n;
  out.x = x;
  out.values.resize(n + 1);
  out.mantissas.resize(n + 1);
  out.exponents.resize(n + 1);
  if (n == 0) {
    store(out, 0, 1.0, 0);
    out.coeffs = {1.0};
    return out;
  }

  // chain[i][m]: magnitude of the x^m coefficient of (-1)^i k^i P_i.
  std::vector<std::vector<DD>> chain(n + 1, std::vector<DD>(n + 1, DD(0.0)));
  for (std::size_t i = 0; i <= n; ++i) chain[i][0] = DD(1.0);
  detail::ChainDP dp(params, SeriesId::f(), n - 1);
  for (std::size_t m = 1; m <= n; ++m) {
    DD prefix(0.0);
    const auto& s = dp.sums();
    for (std::size_t i = 1; i <= n; ++i) {
      prefix += s[i - 1];
      chain[i][m] = prefix;
    }
    if (m < n) dp.advance();
  }

  const double k = params.k();
  for (std::size_t i = 0; i <= n; ++i) {
    DD acc(0.0);
    for (std::size_t m = i + 1; m-- > 0;) acc = acc * DD(-x) + chain[i][m];
    // P_i = (-1)^i k^{-i} acc; keep k^{-i} in the exponent to avoid overflow.
    const double log2_scale = -static_cast<double>(i) * std::log2(k);
    const int whole = static_cast<int>(std::floor(log2_scale));
    const double scaled = acc.value() * std::exp2(log2_scale - whole) * (i % 2 == 0 ? 1.0 : -1.0);
    store(out, i, scaled, whole);
  }

  out.coeffs.resize(n + 1);
  const double scale = std::pow(k, -static_cast<double>(n));
  for (std::size_t m = 0; m <= n; ++m) {
    const double sign = (n + m) % 2 == 0 ? 1.0 : -1.0;
    out.coeffs[m] = sign * scale * chain[n][m].value();
  }
  return out;
}

}  // namespace

PolyEval eval_P(const JacobiParams& params, std::size_t n, double x, PolyMode mode) {
  return mode == PolyMode::Recurrence ? recurrence(params, n, x) : explicit_form(params, n, x);
}

double P_at_zero(const JacobiParams& params, std::size_t n) {
  return (n % 2 == 0 ? 1.0 : -1.0) * std::pow(params.k(), -static_cast<double>(n));
}

TruncatedSum w_at_zero(const JacobiParams& params, std::size_t n, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("w_at_zero: tolerance must be positive");
  const double k = params.k();
  const auto& seq = params.seq();
  DD sum(0.0);
  TruncatedSum out;
  for (std::size_t j = n;; ++j) {
    const double a = seq.a(j);
    if (std::isfinite(a)) sum += DD(std::pow(k, 2.0 * static_cast<double>(j) - static_cast<double>(n))) / DD(a);
    ++out.terms;
    const double tail = std::pow(k, 2.0 * static_cast<double>(j + 1) - static_cast<double>(n)) *
                        seq.tail_sum_reciprocal(j + 1);
    if (tail < tol / 2.0 || out.terms >= kMaxTerms) {
      out.tail_bound = tail;
      break;
    }
  }
  out.value = (n % 2 == 0 ? 1.0 : -1.0) * sum.value();
  out.tail_bound += std::abs(out.value) * std::numeric_limits<double>::epsilon();
  return out;
}

TraceInverse trace_inverse(const JacobiParams& params, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("trace_inverse: tolerance must be positive");
  const double k = params.k();
  const double k2 = params.k2();
  const double denom = 1.0 - k2;
  const auto& seq = params.seq();
  TraceInverse out;

  // Direct route.  The omitted tail sum_{j>J} lies in a certified interval;
  // its midpoint is added and its half-width reported.
  std::vector<double> a;
  DD sum(0.0);
  double lo = 0.0;
  double hi = 0.0;
  for (std::size_t j = 0;; ++j) {
    a.push_back(seq.a(j));
    if (std::isfinite(a[j])) {
      sum += DD(one_minus_k_power(k, 2.0 * static_cast<double>(j + 1))) / DD(denom * a[j]);
    }
    lo = one_minus_k_power(k, 2.0 * static_cast<double>(j + 2)) * seq.tail_sum_reciprocal_lower(j + 1) / denom;
    hi = seq.tail_sum_reciprocal(j + 1) / denom;
    if ((hi - lo) / 2.0 < tol / 4.0 || a.size() >= kMaxTerms) break;
  }
  out.direct.terms = a.size();
  out.direct.value = (sum + DD((lo + hi) / 2.0)).value();
  out.direct.tail_bound = (hi - lo) / 2.0 + 4.0 * std::numeric_limits<double>::epsilon() * out.direct.value;

  // Second-kind route: w_n(0) P_n(0) = I_n := sum_{j>=n} k^{2(j-n)} / a_j,
  // with I_n = 1/a_n + k^2 I_{n+1} run backwards from n = N.
  // Summing I_n over n >= N gives (T_N - k^2 I_N) / (1-k^2) exactly, with
  // T_N = sum_{j>=N} 1/a_j; an error in the start value for I_N then
  // survives only with weight k^{2N+2}.
  const std::size_t N = a.size();
  const double t_lo = seq.tail_sum_reciprocal_lower(N);
  const double t_hi = seq.tail_sum_reciprocal(N);
  const double start = std::min(t_hi, 1.0 / (a[N - 1] * denom));
  DD inner(start);
  DD total(0.0);
  for (std::size_t n = N; n-- > 0;) {
    inner = (std::isfinite(a[n]) ? DD(1.0) / DD(a[n]) : DD(0.0)) + inner * k2;
    total += inner;
  }
  const DD outer = (DD((t_lo + t_hi) / 2.0) - DD(start) * k2) / DD(denom);
  out.second_kind.terms = N;
  out.second_kind.value = (total + outer).value();
  out.second_kind.tail_bound = (t_hi - t_lo) / 2.0 / denom + std::pow(k2, static_cast<double>(N + 1)) * t_hi / denom +
                               4.0 * std::numeric_limits<double>::epsilon() * out.second_kind.value;
  return out;
}

}  // namespace jtrace
