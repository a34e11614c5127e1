#include "jtrace/sequences.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "jtrace/errors.hpp"

namespace jtrace {
namespace {

constexpr double kSlack = 8.0 * std::numeric_limits<double>::epsilon();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void validate(const GeometricRule& r) {
  if (!(r.q > 0.0 && r.q < 1.0)) {
    throw std::invalid_argument("geometric sequence: q must lie in (0,1), got " + std::to_string(r.q));
  }
}

void validate(const PowerLawRule& r) {
  if (!(r.c > 0.0) || !std::isfinite(r.c)) {
    throw std::invalid_argument("power-law sequence: c must be positive, got " + std::to_string(r.c));
  }
  if (!(r.p > 1.0) || !std::isfinite(r.p)) {
    throw std::invalid_argument("power-law sequence: p must exceed 1, got " + std::to_string(r.p));
  }
}

void validate(const TailRule& r) {
  std::visit([](const auto& rule) { validate(rule); }, r);
}

// 1 - q^m without cancellation for q^m close to 1.
double one_minus_power(double q, double m) {
  const double qm = std::pow(q, m);
  return qm <= 0.5 ? 1.0 - qm : -std::expm1(m * std::log(q));
}

double rule_a(const GeometricRule& r, std::size_t n) {
  const double m = static_cast<double>(n + 1);
  return std::pow(r.q, -2.0 * m) * one_minus_power(r.q, m);
}

double rule_a(const PowerLawRule& r, std::size_t n) {
  return r.c * std::pow(static_cast<double>(n + 1), r.p);
}

double rule_a(const TailRule& r, std::size_t n) {
  return std::visit([n](const auto& rule) { return rule_a(rule, n); }, r);
}

// For j >= n0: 1/a_j = q^{2(j+1)} / (1 - q^{j+1}) <= q^{2(j+1)} / (1 - q^{n0+1}).
double rule_tail_upper(const GeometricRule& r, std::size_t n0) {
  const double m = static_cast<double>(n0 + 1);
  return std::pow(r.q, 2.0 * m) / (one_minus_power(r.q, 2.0) * one_minus_power(r.q, m));
}

double rule_tail_lower(const GeometricRule& r, std::size_t n0) {
  const double m = static_cast<double>(n0 + 1);
  return std::pow(r.q, 2.0 * m) / one_minus_power(r.q, 2.0);
}

// (j+1)^{-p} <= int_j^{j+1} x^{-p} dx for j >= 1.
double rule_tail_upper(const PowerLawRule& r, std::size_t n0) {
  if (n0 == 0) return (1.0 + 1.0 / (r.p - 1.0)) / r.c;
  return std::pow(static_cast<double>(n0), 1.0 - r.p) / ((r.p - 1.0) * r.c);
}

// (j+1)^{-p} >= int_{j+1}^{j+2} x^{-p} dx.
double rule_tail_lower(const PowerLawRule& r, std::size_t n0) {
  return std::pow(static_cast<double>(n0 + 1), 1.0 - r.p) / ((r.p - 1.0) * r.c);
}

double rule_tail_upper(const TailRule& r, std::size_t n0) {
  return std::visit([n0](const auto& rule) { return rule_tail_upper(rule, n0); }, r);
}

double rule_tail_lower(const TailRule& r, std::size_t n0) {
  return std::visit([n0](const auto& rule) { return rule_tail_lower(rule, n0); }, r);
}

}  // namespace

SequenceSpec::SequenceSpec(Kind kind) : kind_(std::move(kind)) {
  std::visit(Overloaded{
                 [](const GeometricRule& r) { validate(r); },
                 [](const PowerLawRule& r) { validate(r); },
                 [](const ExplicitRule& r) {
                   for (std::size_t i = 0; i < r.values.size(); ++i) {
                     if (!(r.values[i] > 0.0) || !std::isfinite(r.values[i])) {
                       throw std::invalid_argument("explicit sequence: value " + std::to_string(i) +
                                                   " is not a finite positive number");
                     }
                   }
                   validate(r.tail);
                 },
             },
             kind_);
}

double SequenceSpec::a(std::size_t n) const {
  return std::visit(Overloaded{
                        [n](const GeometricRule& r) { return rule_a(r, n); },
                        [n](const PowerLawRule& r) { return rule_a(r, n); },
                        [n](const ExplicitRule& r) {
                          return n < r.values.size() ? r.values[n] : rule_a(r.tail, n);
                        },
                    },
                    kind_);
}

std::vector<double> SequenceSpec::values(std::size_t count) const {
  std::vector<double> out(count);
  for (std::size_t n = 0; n < count; ++n) out[n] = a(n);
  return out;
}

double SequenceSpec::tail_sum_reciprocal(std::size_t n0) const {
  const double bound = std::visit(Overloaded{
                                      [n0](const GeometricRule& r) { return rule_tail_upper(r, n0); },
                                      [n0](const PowerLawRule& r) { return rule_tail_upper(r, n0); },
                                      [n0](const ExplicitRule& r) {
                                        double s = 0.0;
                                        for (std::size_t j = n0; j < r.values.size(); ++j) s += 1.0 / r.values[j];
                                        return s + rule_tail_upper(r.tail, std::max(n0, r.values.size()));
                                      },
                                  },
                                  kind_);
  return bound * (1.0 + kSlack);
}

double SequenceSpec::tail_sum_reciprocal_lower(std::size_t n0) const {
  const double bound = std::visit(Overloaded{
                                      [n0](const GeometricRule& r) { return rule_tail_lower(r, n0); },
                                      [n0](const PowerLawRule& r) { return rule_tail_lower(r, n0); },
                                      [n0](const ExplicitRule& r) {
                                        double s = 0.0;
                                        for (std::size_t j = n0; j < r.values.size(); ++j) s += 1.0 / r.values[j];
                                        return s + rule_tail_lower(r.tail, std::max(n0, r.values.size()));
                                      },
                                  },
                                  kind_);
  return bound * (1.0 - kSlack);
}

double SequenceSpec::min_from(std::size_t n) const {
  return std::visit(Overloaded{
                        [n](const GeometricRule& r) { return rule_a(r, n); },
                        [n](const PowerLawRule& r) { return rule_a(r, n); },
                        [n](const ExplicitRule& r) {
                          double m = rule_a(r.tail, std::max(n, r.values.size()));
                          for (std::size_t j = n; j < r.values.size(); ++j) m = std::min(m, r.values[j]);
                          return m;
                        },
                    },
                    kind_);
}

JacobiParams::JacobiParams(SequenceSpec seq, double k) : seq_(std::move(seq)), k_(k) {
  if (!(k > 0.0 && k < 1.0)) {
    throw std::invalid_argument("k must lie strictly inside (0,1), got " + std::to_string(k));
  }
}

Entries entries(const JacobiParams& params, std::size_t n) {
  const double a = params.seq().a(n);
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw ParameterOutOfRange("sequence value a_" + std::to_string(n) + " is not a finite positive number");
  }
  double beta = a;
  if (n > 0) {
    const double prev = params.seq().a(n - 1);
    if (!(prev > 0.0) || !std::isfinite(prev)) {
      throw ParameterOutOfRange("sequence value a_" + std::to_string(n - 1) + " is not a finite positive number");
    }
    beta += params.k2() * prev;
  }
  return {a, params.k() * a, beta};
}

double tail_sum_reciprocal(const SequenceSpec& spec, std::size_t n0) { return spec.tail_sum_reciprocal(n0); }

double gamma_lower_bound(const JacobiParams& params) {
  const double a_min = params.seq().min_from(0);
  if (!(a_min > 0.0) || !std::isfinite(a_min)) {
    throw ParameterOutOfRange("cannot certify a positive minimum of the sequence");
  }
  const double one_minus_k = 1.0 - params.k();
  return a_min * one_minus_k * one_minus_k;
}

}  // namespace jtrace
