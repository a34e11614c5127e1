#include "jtrace/identities.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <random>
#include <string>

#include "jtrace/ddouble.hpp"
#include "jtrace/errors.hpp"

namespace jtrace {
namespace {

constexpr std::size_t kMaxDepth = std::size_t{1} << 22;

void require(bool ok, const std::string& what) {
  if (!ok) throw ParameterOutOfRange(what);
}

// (x;q)_n for real x.
DD poch(double x, double q, std::size_t n) {
  DD p(1.0);
  double xi = x;
  for (std::size_t i = 0; i < n; ++i) {
    p *= DD(1.0) - DD(xi);
    xi *= q;
  }
  return p;
}

double qp(double q, double e) { return std::pow(q, e); }

// Smallest N in [1, kMaxDepth] with tail(N) <= tol; tail must be non-increasing.
std::size_t pick_depth(const std::function<double(std::size_t)>& tail, double tol, const char* name) {
  std::size_t hi = 1;
  while (!(tail(hi) <= tol)) {
    if (hi >= kMaxDepth) {
      throw TruncationTooCoarse(std::string(name) + ": tail bound " + std::to_string(tail(hi)) +
                                " exceeds tol at the depth cap");
    }
    hi *= 2;
  }
  std::size_t lo = hi / 2;  // tail(lo) > tol unless lo == 0
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    (tail(mid) <= tol ? hi : lo) = mid;
  }
  return hi;
}

struct Side {
  DD value;
  double tail = 0.0;
  std::size_t depth = 0;
};

// sum_{n<N} q^{rn} / (q^n w; q)_{r+1}
Side basic_lhs(double q, int r, double w, double tol) {
  const double aw = std::abs(w);
  auto tail = [&](std::size_t N) {
    const double d = 1.0 - aw * qp(q, static_cast<double>(N));
    if (d <= 0.0) return HUGE_VAL;
    return qp(q, static_cast<double>(r) * static_cast<double>(N)) /
           ((1.0 - qp(q, r)) * std::pow(d, r + 1));
  };
  Side s;
  s.depth = pick_depth(tail, tol, "BASIC");
  s.tail = tail(s.depth);
  DD qrn(1.0);
  double wn = w;
  for (std::size_t n = 0; n < s.depth; ++n) {
    s.value += qrn / poch(wn, q, static_cast<std::size_t>(r) + 1);
    qrn = qrn * qp(q, r);
    wn *= q;
  }
  return s;
}

// sum_s (q^m;q)_s / (q;q)_s w^s
Side phi10_lhs(double q, int m, double w, double tol) {
  Side s;
  if (m == 0) {
    s.value = DD(1.0);
    s.depth = 1;
    return s;
  }
  const double aw = std::abs(w);
  const double qqm1 = poch(q, q, static_cast<std::size_t>(m - 1)).value();
  auto tail = [&](std::size_t N) { return std::pow(aw, static_cast<double>(N)) / ((1.0 - aw) * qqm1); };
  s.depth = pick_depth(tail, tol, "PHI10");
  s.tail = tail(s.depth);
  DD term(1.0);
  const double qm = qp(q, m);
  double qs = 1.0;
  for (std::size_t n = 0; n < s.depth; ++n) {
    s.value += term;
    // ratio (1 - q^{m+s}) / (1 - q^{s+1}) w
    term = term * (DD(1.0) - DD(qm * qs)) / (DD(1.0) - DD(qs * q)) * w;
    qs *= q;
  }
  return s;
}

// sum_j q^{mj} w^j / (1 - q^{j+m+1})
Side lemma1_rhs(double q, int m, double w, double tol) {
  const double aw = std::abs(w);
  auto tail = [&](std::size_t N) {
    return std::pow(qp(q, m) * aw, static_cast<double>(N)) / ((1.0 - qp(q, m + 1)) * (1.0 - qp(q, m) * aw));
  };
  Side s;
  s.depth = pick_depth(tail, tol, "LEMMA1 rhs");
  s.tail = tail(s.depth);
  DD x(1.0);
  for (std::size_t j = 0; j < s.depth; ++j) {
    s.value += x / (DD(1.0) - DD(qp(q, static_cast<double>(j) + m + 1)));
    x = x * (qp(q, m) * w);
  }
  return s;
}

Side lemma1_lhs(double q, int m, double w, double tol) {
  const double aw = std::abs(w);
  const DD pref = (DD(1.0) - DD(qp(q, m))) * poch(w, q, static_cast<std::size_t>(m));
  const double apref = std::abs(pref.value());
  const double D = 1.0 / std::pow(1.0 - aw, m + 1);
  const double ratio = qp(q, m + 1) * aw;
  auto outer_tail = [&](std::size_t J) {
    return apref * std::pow(ratio, static_cast<double>(J)) / (1.0 - ratio) * D / ((1.0 - q) * (1.0 - qp(q, m)));
  };
  Side s;
  const std::size_t J = pick_depth(outer_tail, tol / 2.0, "LEMMA1");

  // inner tails summed over the kept j, with coefficient |q^{(m+1)j} w^j / (1 - q^{j+m})|
  auto inner_tail = [&](std::size_t N) {
    const double d = 1.0 - aw * qp(q, static_cast<double>(N));
    double total = 0.0;
    double cj = 1.0;
    for (std::size_t j = 0; j < J; ++j) {
      const double e = static_cast<double>(j) + m + 1;
      total += cj / (1.0 - qp(q, static_cast<double>(j) + m)) * qp(q, e * static_cast<double>(N)) /
               ((1.0 - qp(q, e)) * std::pow(d, m + 1));
      cj *= ratio;
    }
    return apref * total;
  };
  const std::size_t N = pick_depth(inner_tail, tol / 2.0, "LEMMA1");
  s.tail = outer_tail(J) + inner_tail(N);
  s.depth = std::max(J, N);

  std::vector<DD> inv(N);
  double wn = w;
  for (std::size_t n = 0; n < N; ++n) {
    inv[n] = DD(1.0) / poch(wn, q, static_cast<std::size_t>(m) + 1);
    wn *= q;
  }
  DD outer(0.0);
  DD coef(1.0);
  for (std::size_t j = 0; j < J; ++j) {
    const double base = qp(q, static_cast<double>(j) + m + 1);
    DD inner(0.0);
    DD pw(1.0);
    for (std::size_t n = 0; n < N; ++n) {
      inner += pw * inv[n];
      pw = pw * base;
    }
    outer += coef / (DD(1.0) - DD(qp(q, static_cast<double>(j) + m))) * inner;
    coef = coef * (qp(q, m + 1) * w);
  }
  s.value = pref * outer;
  return s;
}

// Ordered chain 0 <= n_last <= ... <= n_first < N evaluated level by level:
// H_top(n) = f_top(n); H_i(n) = f_i(n) sum_{n' <= n} H_{i+1}(n').
DD nested_ordered(const std::vector<std::function<DD(std::size_t)>>& levels, std::size_t N) {
  std::vector<DD> H(N, DD(1.0));
  bool first = true;
  for (auto it = levels.rbegin(); it != levels.rend(); ++it) {
    DD prefix(0.0);
    for (std::size_t n = 0; n < N; ++n) {
      if (first) {
        H[n] = (*it)(n);
      } else {
        prefix += H[n];
        H[n] = (*it)(n) * prefix;
      }
    }
    first = false;
  }
  DD total(0.0);
  for (const DD& h : H) total += h;
  return total;
}

Side denom_lhs(double q, int m, double a, double tol) {
  const double qqm = poch(q, q, static_cast<std::size_t>(m)).value();
  const double qa = poch(qp(q, a), q, static_cast<std::size_t>(2 * m + 1)).value();
  auto tail = [&](std::size_t N) { return qp(q, static_cast<double>(N)) / ((1.0 - q) * qqm * qa); };
  Side s;
  s.depth = pick_depth(tail, tol, "DENOM");
  s.tail = tail(s.depth);
  // level i = 0 .. m, index n_i; level m is innermost
  std::vector<std::function<DD(std::size_t)>> levels;
  for (int i = 0; i <= m; ++i) {
    const double off = a + 2.0 * (m - i);
    const std::size_t len = i == 0 ? 1 : 2;
    levels.emplace_back([=](std::size_t n) {
      const double x = static_cast<double>(n);
      return DD(qp(q, x)) / poch(qp(q, x + off), q, len);
    });
  }
  s.value = nested_ordered(levels, s.depth);
  return s;
}

// sum_j q^{(m+a)j} / (1 - q^{j+m+1}) / ((q;q)_m (q^a;q)_m)
Side denom_rhs(double q, int m, double a, double tol) {
  const DD pref = DD(1.0) / (poch(q, q, static_cast<std::size_t>(m)) * poch(qp(q, a), q, static_cast<std::size_t>(m)));
  const double ap = std::abs(pref.value());
  auto tail = [&](std::size_t N) {
    return ap * qp(q, (m + a) * static_cast<double>(N)) / ((1.0 - qp(q, m + a)) * (1.0 - qp(q, m + 1)));
  };
  Side s;
  s.depth = pick_depth(tail, tol, "DENOM rhs");
  s.tail = tail(s.depth);
  DD sum(0.0);
  for (std::size_t j = 0; j < s.depth; ++j) {
    const double x = static_cast<double>(j);
    sum += DD(qp(q, (m + a) * x)) / (DD(1.0) - DD(qp(q, x + m + 1)));
  }
  s.value = pref * sum;
  return s;
}

// (1-q)^{-m-closed} sum_{j_0 <= ... <= j_m} q^{sum c_i j_i} [1 - q^{j_0+1}] prod (1 - q^{j_i - j_{i-1}})
Side chain_lhs(double q, const std::vector<double>& c, bool closed, double tol) {
  const std::size_t m = c.size() - 1;
  const double norm = std::pow(1.0 - q, -static_cast<double>(m + (closed ? 1 : 0)));
  double rest = 1.0;
  for (std::size_t i = 0; i < m; ++i) rest /= 1.0 - qp(q, c[i]);
  auto tail = [&](std::size_t N) {
    return norm * rest * qp(q, c[m] * static_cast<double>(N)) / (1.0 - qp(q, c[m]));
  };
  Side s;
  s.depth = pick_depth(tail, tol, closed ? "CHAIN_CLOSED" : "CHAIN_OPEN");
  s.tail = tail(s.depth);
  const std::size_t N = s.depth;

  std::vector<DD> A(N);
  for (std::size_t j = 0; j < N; ++j) {
    const double x = static_cast<double>(j);
    A[j] = DD(qp(q, c[0] * x));
    if (closed) A[j] = A[j] * (DD(1.0) - DD(qp(q, x + 1.0)));
  }
  for (std::size_t i = 1; i <= m; ++i) {
    // sum_{j' <= j} A(j') (1 - q^{j-j'}) = E(j) - B(j), B(j) = q B(j-1) + A(j)
    DD B(0.0);
    DD E(0.0);
    const double ci = qp(q, c[i]);
    DD cij(1.0);
    for (std::size_t j = 0; j < N; ++j) {
      B = B * q + A[j];
      E += A[j];
      A[j] = cij * (E - B);
      cij = cij * ci;
    }
  }
  DD total(0.0);
  for (const DD& x : A) total += x;
  s.value = total * norm;
  return s;
}

DD chain_rhs(double q, const std::vector<double>& c, bool closed) {
  const std::size_t m = c.size() - 1;
  std::vector<double> C(m + 1);
  double acc = 0.0;
  for (std::size_t i = m + 1; i-- > 0;) {
    acc += c[i];
    C[i] = acc;
  }
  double weighted = 0.0;
  for (std::size_t i = 1; i <= m; ++i) weighted += static_cast<double>(i) * c[i];
  DD den = poch(qp(q, C[0]), q, closed ? 2 : 1);
  for (std::size_t i = 1; i <= m; ++i) den *= poch(qp(q, C[i]), q, 2);
  return DD(qp(q, weighted)) / den;
}

Side synchro_lhs(double q, const std::vector<int>& sv, double a, double tol) {
  const std::size_t m = sv.size();
  int S = 0;
  for (int x : sv) S += x;
  const double dmin = poch(qp(q, a), q, static_cast<std::size_t>(S) + m).value();
  double rest = 1.0;
  for (std::size_t i = 1; i < m; ++i) rest /= 1.0 - qp(q, sv[i]);
  auto tail = [&](std::size_t N) {
    return qp(q, sv[0] * static_cast<double>(N)) / (1.0 - qp(q, sv[0])) * rest / dmin;
  };
  Side s;
  s.depth = pick_depth(tail, tol, "SYNCHRO");
  s.tail = tail(s.depth);
  // level i = 1..m (vector index i-1); offset a + (s_{i+1} + ... + s_m) + (m - i)
  std::vector<std::function<DD(std::size_t)>> levels;
  int after = S;
  for (std::size_t i = 1; i <= m; ++i) {
    after -= sv[i - 1];
    const double off = a + after + static_cast<double>(m - i);
    const int si = sv[i - 1];
    levels.emplace_back([=](std::size_t n) {
      const double x = static_cast<double>(n);
      return DD(qp(q, si * x)) / poch(qp(q, x + off), q, static_cast<std::size_t>(si) + 1);
    });
  }
  s.value = nested_ordered(levels, s.depth);
  return s;
}

DD synchro_rhs(double q, const std::vector<int>& sv, double a) {
  DD den(1.0);
  int partial = 0;
  for (int x : sv) {
    partial += x;
    den *= DD(1.0) - DD(qp(q, partial));
  }
  den *= poch(qp(q, a), q, static_cast<std::size_t>(partial));
  return DD(1.0) / den;
}

void validate(IdentityId id, const IdentityParams& p) {
  require(p.q > 0.0 && p.q < 1.0, "q must lie in (0,1)");
  switch (id) {
    case IdentityId::BASIC:
      require(p.r >= 1, "BASIC: r must be a positive integer");
      require(std::isfinite(p.w), "BASIC: w must be finite");
      break;
    case IdentityId::PHI10:
      require(p.m >= 0, "PHI10: m must be a non-negative integer");
      require(std::abs(p.w) < 1.0, "PHI10: |w| < 1 required");
      break;
    case IdentityId::LEMMA1:
      require(p.m >= 1, "LEMMA1: m must be a positive integer");
      require(std::abs(p.w) < 1.0, "LEMMA1: |w| < 1 required");
      break;
    case IdentityId::DENOM:
      require(p.m >= 0, "DENOM: m must be a non-negative integer");
      require(p.a > 0.0, "DENOM: a must be positive");
      break;
    case IdentityId::CHAIN_OPEN:
    case IdentityId::CHAIN_CLOSED:
      require(!p.c.empty(), "chain identities need c_0 .. c_m");
      for (double x : p.c) require(x > 0.0 && std::isfinite(x), "chain identities need every c_i > 0");
      break;
    case IdentityId::SYNCHRO:
      require(!p.s.empty(), "SYNCHRO needs s_1 .. s_m");
      for (int x : p.s) require(x >= 1, "SYNCHRO needs every s_i >= 1");
      require(p.a > 0.0, "SYNCHRO: a must be positive");
      break;
  }
}

}  // namespace

std::vector<IdentityId> all_identities() {
  return {IdentityId::BASIC, IdentityId::CHAIN_CLOSED, IdentityId::CHAIN_OPEN, IdentityId::DENOM,
          IdentityId::LEMMA1, IdentityId::PHI10, IdentityId::SYNCHRO};
}

std::string identity_name(IdentityId id) {
  switch (id) {
    case IdentityId::BASIC: return "BASIC";
    case IdentityId::PHI10: return "PHI10";
    case IdentityId::LEMMA1: return "LEMMA1";
    case IdentityId::DENOM: return "DENOM";
    case IdentityId::CHAIN_OPEN: return "CHAIN_OPEN";
    case IdentityId::CHAIN_CLOSED: return "CHAIN_CLOSED";
    case IdentityId::SYNCHRO: return "SYNCHRO";
  }
  return "?";
}

std::optional<IdentityId> parse_identity(const std::string& name) {
  std::string up = name;
  std::transform(up.begin(), up.end(), up.begin(), [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
  for (IdentityId id : all_identities()) {
    if (identity_name(id) == up) return id;
  }
  return std::nullopt;
}

IdentityReport check(IdentityId id, const IdentityParams& params, double tol) {
  if (!(tol > 0.0)) throw ParameterOutOfRange("tol must be positive");
  validate(id, params);
  const double q = params.q;
  IdentityReport rep;
  rep.id = id;
  rep.params = params;
  Side lhs;
  DD rhs;
  double rhs_tail = 0.0;
  switch (id) {
    case IdentityId::BASIC:
      lhs = basic_lhs(q, params.r, params.w, tol);
      rhs = DD(1.0) / ((DD(1.0) - DD(qp(q, params.r))) * poch(params.w, q, static_cast<std::size_t>(params.r)));
      break;
    case IdentityId::PHI10:
      lhs = phi10_lhs(q, params.m, params.w, tol);
      rhs = DD(1.0) / poch(params.w, q, static_cast<std::size_t>(params.m));
      break;
    case IdentityId::LEMMA1: {
      lhs = lemma1_lhs(q, params.m, params.w, tol / 2.0);
      const Side r = lemma1_rhs(q, params.m, params.w, tol / 2.0);
      rhs = r.value;
      rhs_tail = r.tail;
      break;
    }
    case IdentityId::DENOM: {
      lhs = denom_lhs(q, params.m, params.a, tol / 2.0);
      const Side r = denom_rhs(q, params.m, params.a, tol / 2.0);
      rhs = r.value;
      rhs_tail = r.tail;
      break;
    }
    case IdentityId::CHAIN_OPEN:
    case IdentityId::CHAIN_CLOSED: {
      const bool closed = id == IdentityId::CHAIN_CLOSED;
      lhs = chain_lhs(q, params.c, closed, tol);
      rhs = chain_rhs(q, params.c, closed);
      break;
    }
    case IdentityId::SYNCHRO:
      lhs = synchro_lhs(q, params.s, params.a, tol);
      rhs = synchro_rhs(q, params.s, params.a);
      break;
  }
  if (!std::isfinite(lhs.value.value()) || !std::isfinite(rhs.value())) {
    throw ParameterOutOfRange(identity_name(id) + ": parameters hit a pole");
  }
  rep.lhs = lhs.value.value();
  rep.rhs = rhs.value();
  rep.abs_err = std::abs((lhs.value - rhs).value());
  rep.rel_err = rep.rhs != 0.0 ? rep.abs_err / std::abs(rep.rhs) : rep.abs_err;
  rep.trunc_bound = lhs.tail + rhs_tail;
  rep.depth = lhs.depth;
  if (rep.trunc_bound > tol) {
    throw TruncationTooCoarse(identity_name(id) + ": truncation bound " + std::to_string(rep.trunc_bound) +
                              " exceeds tol");
  }
  return rep;
}

std::vector<IdentityParams> draw_params(IdentityId id, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed + 7919u * static_cast<std::uint64_t>(id));
  std::uniform_real_distribution<double> uq(0.2, 0.7);
  std::uniform_real_distribution<double> uw(-0.8, 0.8);
  std::uniform_real_distribution<double> ua(0.5, 3.0);
  std::uniform_int_distribution<int> ur(1, 4);
  std::uniform_int_distribution<int> um(1, 3);
  std::uniform_int_distribution<int> us(1, 3);
  std::vector<IdentityParams> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    IdentityParams p;
    p.q = uq(rng);
    p.r = ur(rng);
    p.w = uw(rng);
    p.m = um(rng);
    p.a = ua(rng);
    if (id == IdentityId::CHAIN_OPEN || id == IdentityId::CHAIN_CLOSED) {
      p.c.resize(static_cast<std::size_t>(p.m) + 1);
      for (double& x : p.c) x = ua(rng);
    }
    if (id == IdentityId::SYNCHRO) {
      p.s.resize(static_cast<std::size_t>(p.m));
      for (int& x : p.s) x = us(rng);
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace jtrace
