#pragma once

// Orthonormal polynomials of the family: the three-term recurrence
//
//   alpha_n P_{n+1}(x) + (beta_n - x) P_n(x) + alpha_{n-1} P_{n-1}(x) = 0,  P_0 = 1,
//
// and the explicit chain-sum expansion of (-1)^n k^n P_n(x).

#include <cstddef>
#include <vector>

#include "jtrace/sequences.hpp"

namespace jtrace {

enum class PolyMode { Recurrence, Explicit };

struct PolyEval {
  std::size_t n = 0;
  double x = 0.0;
  /// P_0(x)..P_n(x); +-inf where the value leaves the double range.
  std::vector<double> values;
  /// values[i] = mantissas[i] * 2^exponents[i], always finite.
  std::vector<double> mantissas;
  std::vector<int> exponents;
  /// Explicit mode only: monomial coefficients of P_n, index = power.
  std::vector<double> coeffs;
  bool overflow = false;
};

PolyEval eval_P(const JacobiParams& params, std::size_t n, double x, PolyMode mode);

/// (-1)^n k^{-n}.
double P_at_zero(const JacobiParams& params, std::size_t n);

struct TruncatedSum {
  double value = 0.0;
  double tail_bound = 0.0;  // certified bound on |exact - value|
  std::size_t terms = 0;
};

/// w_n(0) = (-1)^n sum_{j>=n} k^{2j-n} / a_j.
TruncatedSum w_at_zero(const JacobiParams& params, std::size_t n, double tol);

struct TraceInverse {
  TruncatedSum direct;         // sum_j (1-k^{2j+2}) / ((1-k^2) a_j)
  TruncatedSum second_kind;    // sum_n w_n(0) P_n(0)
  [[nodiscard]] double value() const { return direct.value; }
};

TraceInverse trace_inverse(const JacobiParams& params, double tol);

}  // namespace jtrace
