#pragma once

// The q-Laguerre member of the family: a_n = q^{-2(n+1)} (1 - q^{n+1}), k = q^{1/2}.
// Basic hypergeometric series use the standard convention
//
//   r phi s(a; b; q, x) = sum_n (a;q)_n / ((q;q)_n (b;q)_n) [(-1)^n q^{n(n-1)/2}]^{1+s-r} x^n,
//
// so 0phi1 carries q^{n(n-1)}, 1phi1 carries (-1)^n q^{n(n-1)/2} and 2phi1 nothing.
// All sums are accumulated in double-double.

#include <cstddef>
#include <vector>

#include "jtrace/ddouble.hpp"
#include "jtrace/sequences.hpp"

namespace jtrace {

struct QParams {
  double q;

  /// Throws ParameterOutOfRange unless 0 < q < 1.
  explicit QParams(double q_);
  [[nodiscard]] JacobiParams jacobi() const;
};

/// (a;q)_n.
double qpochhammer(double a, double q, std::size_t n);
DD qpochhammer_dd(double a, double q, std::size_t n);

struct InfiniteProduct {
  double value = 0.0;
  double rel_bound = 0.0;  // |log(exact / value)| bound from the omitted factors
  std::size_t factors = 0;
};

/// (a;q)_inf, truncated once the log remainder a q^n / ((1-q)(1 - a q^n)) drops below tol.
InfiniteProduct qpochhammer_inf(double a, double q, double tol = 1e-17);

struct QSeries {
  double value = 0.0;
  DD value_dd;
  double err_bound = 0.0;  // truncation plus rounding
  std::size_t terms = 0;
};

QSeries phi01(double b, double q, double x, double tol = 1e-17);
QSeries phi01(double b, double q, const DD& x, double tol = 1e-17);
QSeries phi11(double a, double b, double q, double x, double tol = 1e-17);
/// 1phi1(q^{-n}; b; q, x): exactly n+1 terms.
QSeries phi11_terminating(std::size_t n, double b, double q, double x);
/// Throws DivergentArgument when |x| >= 1.
QSeries phi21(double a, double b, double c, double q, double x, double tol = 1e-17);

/// L_n^{(a)}(x;q) for a in {0, 1}.
double q_laguerre(std::size_t n, int a, double x, double q);
/// q^{n+1} L_n^{(0)} + (1-q) L_n^{(1)}.
double modified_laguerre(std::size_t n, double x, double q);
/// Classical L_n^{(0)}(x) by its three-term recurrence.
double classical_laguerre(std::size_t n, double x);

/// |q^n L_n^{(0)} + L_{n-1}^{(1)} - L_n^{(1)}| relative to the largest term (L_{-1} = 0).
double l0_l1_residual(std::size_t n, double x, double q);
/// Residual of the L_n^{(0)} three-term recurrence, relative to the largest term.
double l0_recurrence_residual(std::size_t n, double x, double q);
/// Residual of the modified-polynomial recurrence, relative to the largest term.
double modified_recurrence_residual(std::size_t n, double x, double q);

struct ModifiedVsP {
  double P = 0.0;
  double scaled = 0.0;  // (-1)^n q^{-n/2} L~_n(x;q)
  double residual = 0.0;
  double rel_residual = 0.0;
  double recurrence_residual = 0.0;
};

ModifiedVsP modified_vs_P(std::size_t n, double x, double q);

/// Jackson q-Bessel function of the second kind, x >= 0, nu > -1.
QSeries jackson_qbessel2(double nu, double x, double q, double tol = 1e-17);

/// First `count` positive roots of J_nu^{(2)}(x;q): log-grid scan (ratio 1.01) then bisection.
std::vector<double> qbessel_roots(double nu, double q, std::size_t count);

/// q^{m(m+1)} / ((q;q)_m (q^2;q)_m).
double F_coefficient(std::size_t m, double q);

struct ClosedFormF {
  double via_bessel = 0.0;
  double via_phi01 = 0.0;
  double via_series = 0.0;
};

/// Throws CancellationFailure when the generic series is not certifiable at z.
ClosedFormF closed_form_F(double z, double q);

struct ClosedFormW {
  double via_closed = 0.0;
  double via_series = 0.0;
  double W_I = 0.0;
  double W_II = 0.0;
  double err_bound = 0.0;  // on via_closed
};

ClosedFormW closed_form_W(double z, double q);

/// -W(lambda)/F'(lambda) with both functions from the closed forms.
double closed_form_mass(const DD& lambda, double q);

}  // namespace jtrace
