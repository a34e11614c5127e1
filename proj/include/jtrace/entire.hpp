#pragma once

// Truncated power series of the entire functions
//
//   F(z)   = sum_m (-1)^m c_m z^m,  c_m = sum over chains 0 <= j_1 < ... < j_m
//            of (1-k^{2(j_1+1)}) (1-k^{2(j_2-j_1)}) ... / ((1-k^2)^m a_{j_1} ... a_{j_m}),
//   W_n(z) = sum_m (-1)^m c_m z^m,  chains n <= j_0 < j_1 < ... < j_m weighted by
//            k^{2 j_0} (1-k^{2(j_1-j_0)}) ... / ((1-k^2)^m a_{j_0} ... a_{j_m}),
//
// with certified bounds on everything that was cut off.  W_0 is W.
//
// Chain sums are accumulated level by level.  With S_m(j) the sum over chains
// of length m ending at j, the link factor (1-k^{2(j-i)})/(1-k^2) equals
// sum_{l<j-i} k^{2l}, so
//
//   B_m(j) = k^2 B_m(j-1) + S_m(j),   E_m(j) = sum_{i<j} B_m(i),   S_{m+1}(j) = E_m(j) / a_j.
//
// Every quantity is a sum of positive terms: no cancellation and no k^{-2i}
// overflow.  The accumulation runs in double-double.

#include <complex>
#include <cstddef>
#include <vector>

#include "jtrace/ddouble.hpp"
#include "jtrace/sequences.hpp"

namespace jtrace {

enum class SeriesKind { F, W };

struct SeriesId {
  SeriesKind kind = SeriesKind::F;
  std::size_t n = 0;  // first admissible index for W(n); ignored for F

  static SeriesId f() { return {SeriesKind::F, 0}; }
  static SeriesId w(std::size_t n) { return {SeriesKind::W, n}; }
};

namespace detail {

/// Streaming level-by-level chain-sum dynamic program on indices 0..J.
class ChainDP {
 public:
  ChainDP(const JacobiParams& params, SeriesId id, std::size_t cutoff);

  /// Chain length of the current level (F starts at 1, W at 0).
  [[nodiscard]] std::size_t level() const { return level_; }
  /// S_level(j) for j = 0..J.
  [[nodiscard]] const std::vector<DD>& sums() const { return sums_; }
  [[nodiscard]] DD total() const;
  void advance();

 private:
  std::vector<double> a_;
  DD k2_;
  std::size_t level_ = 0;
  std::vector<DD> sums_;
};

}  // namespace detail

/// Truncated representation of F or W(n).  coeffs[m] is the magnitude of the
/// z^m coefficient restricted to chain indices <= J; upper[m] bounds the
/// untruncated magnitude.
struct PowerSeriesApprox {
  SeriesId id;
  std::vector<DD> coeffs;
  std::vector<double> upper;
  std::size_t M = 0;
  std::size_t J = 0;
  double S = 0.0;             // sum_j 1/((1-k^2) a_j) over admissible j, including the tail bound
  double tail_omitted = 0.0;  // sum_{j>J} 1/((1-k^2) a_j) upper bound
  double lead_omitted = 0.0;  // upper bound on the j>J part of c_0 (W only)
  double ratio_bound = 0.0;   // rho_M: c_{m+1} <= rho_M c_m for all m >= M
  double k = 0.0;

  [[nodiscard]] double coeff(std::size_t m) const { return coeffs.at(m).value(); }

  /// Bound on the total z-independent truncation: sum_{m<=M} (upper-coeffs) r^m
  /// plus the m > M remainder.  +inf when the remainder bound does not apply.
  [[nodiscard]] double truncation_bound(double r) const;
  [[nodiscard]] double derivative_truncation_bound(double r) const;
};

/// Chain-sum coefficients up to order M using indices <= J.
/// Throws std::invalid_argument when M > J, or J <= n for W(n).
PowerSeriesApprox series_coeffs(const JacobiParams& params, SeriesId id, std::size_t M, std::size_t J);

/// Picks J and M so that the truncation error on |z| <= radius stays below
/// tol * c_0.
PowerSeriesApprox make_series(const JacobiParams& params, SeriesId id, double radius, double tol);

struct SeriesValue {
  double value = 0.0;
  DD value_dd;
  double magnitude = 0.0;  // sum_m c_m |z|^m
  double kappa = 1.0;      // magnitude / |value|
  double err_bound = 0.0;
};

struct ComplexSeriesValue {
  std::complex<double> value;
  double magnitude = 0.0;
  double kappa = 1.0;
  double err_bound = 0.0;
};

/// Evaluates sum (-1)^m c_m z^m in double-double.  Throws CancellationFailure
/// when either the rounding or the truncation part of the error bound exceeds
/// tol * max(c_0, |value|); tol = +inf only reports the bound.
SeriesValue eval_series(const PowerSeriesApprox& s, double z, double tol = 1e-12);
SeriesValue eval_series(const PowerSeriesApprox& s, const DD& z, double tol = 1e-12);
ComplexSeriesValue eval_series(const PowerSeriesApprox& s, std::complex<double> z, double tol = 1e-12);

/// d/dz of the series, same error model.
SeriesValue eval_series_derivative(const PowerSeriesApprox& s, double z, double tol = 1e-12);
SeriesValue eval_series_derivative(const PowerSeriesApprox& s, const DD& z, double tol = 1e-12);

/// Phi_n(z) = (-1)^n k^{-n} W_n(z).
SeriesValue phi_n(const JacobiParams& params, std::size_t n, double z, std::size_t M, std::size_t J,
                  double tol = 1e-12);
SeriesValue phi_n(const JacobiParams& params, std::size_t n, double z, double tol = 1e-12);
/// Double-double argument; with tol = +inf the series is sized for 1e-14.
SeriesValue phi_n(const JacobiParams& params, std::size_t n, const DD& z, double tol);

/// F(z) with automatic truncation.
SeriesValue char_function(const JacobiParams& params, double z, double tol = 1e-12);

struct Residual {
  double value = 0.0;      // the residual itself
  double err_bound = 0.0;  // what the residual may be from evaluation error alone
  double scale = 0.0;      // size of the largest term involved
};

/// |alpha_n (P_n Phi_{n+1} - P_{n+1} Phi_n) - F(z)|.
Residual wronskian_residual(const JacobiParams& params, std::size_t n, double z, double tol = 1e-12);

/// alpha_n (P_n(z) Phi_{n+1}(z) - P_{n+1}(z) Phi_n(z)).
double wronskian(const JacobiParams& params, std::size_t n, double z, double tol = 1e-12);

/// n >= 1: |alpha_n Phi_{n+1} + (beta_n - z) Phi_n + alpha_{n-1} Phi_{n-1}|;
/// n = 0: |alpha_0 Phi_1 + (beta_0 - z) Phi_0 - F(z)|.
Residual phi_recurrence_residual(const JacobiParams& params, std::size_t n, double z, double tol = 1e-12);

}  // namespace jtrace
