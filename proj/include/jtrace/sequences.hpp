#pragma once

// Positive sequences {a_n} with summable reciprocals and the Jacobi matrix
// entries they induce:
//
//   alpha_n = k a_n,   beta_n = a_n + k^2 a_{n-1}  (beta_0 = a_0).

#include <cstddef>
#include <variant>
#include <vector>

namespace jtrace {

/// a_n = q^{-2(n+1)} (1 - q^{n+1}),  0 < q < 1.
struct GeometricRule {
  double q;
};

/// a_n = c (n+1)^p,  c > 0, p > 1.
struct PowerLawRule {
  double c;
  double p;
};

using TailRule = std::variant<GeometricRule, PowerLawRule>;

/// Finite list a_0..a_{L-1}; for n >= L the tail rule is evaluated at n.
struct ExplicitRule {
  std::vector<double> values;
  TailRule tail;
};

class SequenceSpec {
 public:
  using Kind = std::variant<GeometricRule, PowerLawRule, ExplicitRule>;

  /// Throws std::invalid_argument when the rule parameters are out of range.
  explicit SequenceSpec(Kind kind);

  static SequenceSpec geometric(double q) { return SequenceSpec(GeometricRule{q}); }
  static SequenceSpec power_law(double c, double p) { return SequenceSpec(PowerLawRule{c, p}); }
  static SequenceSpec explicit_values(std::vector<double> values, TailRule tail) {
    return SequenceSpec(ExplicitRule{std::move(values), tail});
  }

  [[nodiscard]] const Kind& kind() const { return kind_; }

  /// a_n; may be +inf once the value leaves the double range.
  [[nodiscard]] double a(std::size_t n) const;

  /// a_0..a_{count-1}.
  [[nodiscard]] std::vector<double> values(std::size_t count) const;

  /// Certified upper bound on sum_{j >= n0} 1/a_j.
  [[nodiscard]] double tail_sum_reciprocal(std::size_t n0) const;

  /// Certified lower bound on sum_{j >= n0} 1/a_j.
  [[nodiscard]] double tail_sum_reciprocal_lower(std::size_t n0) const;

  /// min{a_j : j >= n}.  Both tail rules are increasing, so the minimum is
  /// attained on the finite explicit prefix or at the first rule index.
  [[nodiscard]] double min_from(std::size_t n) const;

 private:
  Kind kind_;
};

struct Entries {
  double a;
  double alpha;
  double beta;
};

class JacobiParams {
 public:
  /// Throws std::invalid_argument unless 0 < k < 1.
  JacobiParams(SequenceSpec seq, double k);

  [[nodiscard]] const SequenceSpec& seq() const { return seq_; }
  [[nodiscard]] double k() const { return k_; }
  [[nodiscard]] double k2() const { return k_ * k_; }

 private:
  SequenceSpec seq_;
  double k_;
};

/// Jacobi entries at index n.  Throws ParameterOutOfRange if a_n (or a_{n-1})
/// is not a finite positive number.
Entries entries(const JacobiParams& params, std::size_t n);

/// Upper bound on sum_{j >= n0} 1/a_j (closed-form geometric majorant or
/// integral bound).
double tail_sum_reciprocal(const SequenceSpec& spec, std::size_t n0);

/// gamma = a_min (1 - k)^2, a lower bound for the operator and all its
/// finite sections.
double gamma_lower_bound(const JacobiParams& params);

}  // namespace jtrace
