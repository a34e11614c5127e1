#pragma once

// Point spectrum and orthogonality measure.  Finite sections are handled by
// Sturm bisection; the entire functions F and W refine and cross-check them.

#include <cstddef>
#include <optional>
#include <vector>

#include "jtrace/entire.hpp"
#include "jtrace/sequences.hpp"

namespace jtrace {

struct TruncatedJacobi {
  std::vector<double> diag;     // beta_0 .. beta_{N-1}
  std::vector<double> offdiag;  // alpha_0 .. alpha_{N-2}
  [[nodiscard]] std::size_t size() const { return diag.size(); }
};

/// Leading N x N section.  Throws ParameterOutOfRange if an entry overflows.
TruncatedJacobi truncate(const JacobiParams& params, std::size_t N);

/// Section of the associated matrix: rows and columns 1..N of J.
TruncatedJacobi truncate_associated(const JacobiParams& params, std::size_t N);

/// Number of eigenvalues of T strictly below x.
std::size_t sturm_count(const TruncatedJacobi& T, double x);

/// [lo, hi] containing every eigenvalue of T.
std::pair<double, double> gershgorin_bounds(const TruncatedJacobi& T);

/// j-th smallest eigenvalue of T.  Bisection stops once the bracket is
/// narrower than tol relative to its lower end, or cannot shrink further.
/// `lower` (if given) must be a known lower bound for the spectrum.
double eigen_bisect(const TruncatedJacobi& T, std::size_t j, double tol, std::optional<double> lower = std::nullopt);

/// Smallest `count` eigenvalues, computed in parallel.
std::vector<double> section_eigenvalues(const TruncatedJacobi& T, std::size_t count, double tol,
                                        std::optional<double> lower = std::nullopt);

struct SectionVector {
  std::vector<double> v;  // unit eigenvector, first component >= 0
  double weight = 0.0;    // v_0^2, computed without underflow of the intermediate steps
  std::size_t twist = 0;  // index where the two one-sided factorizations meet
};

/// Eigenvector of T for an (approximate) eigenvalue lambda via a twisted
/// factorization: products of ratios only, so tiny components keep their
/// relative accuracy.
SectionVector section_eigenvector(const TruncatedJacobi& T, double lambda);

/// Solves (T - shift) x = rhs with partial pivoting.
std::vector<double> tridiagonal_solve(const TruncatedJacobi& T, double shift, const std::vector<double>& rhs);

/// tr(T^{-1}) from the diagonal of the inverse.
double section_trace_inverse(const TruncatedJacobi& T);

/// <e_0, (T - z)^{-1} e_0> by the backward continued fraction.
double section_resolvent00(const TruncatedJacobi& T, double z);

struct SpectralData {
  std::vector<double> lambdas;
  std::vector<double> lambdas_lo;       // low words: lambda_j = lambdas[j] + lambdas_lo[j] after refinement
  std::vector<double> section_lambdas;  // before refinement
  std::vector<double> masses;
  std::vector<bool> mass_fallback;      // mass taken from the section quadrature weight
  std::vector<double> quadrature_weights;
  std::vector<double> residual_F;       // |F(lambda_j)|, NaN where not certifiable
  std::vector<double> residual_F_bound;
  std::vector<double> residual_matrix;  // ||(T_N - lambda_j) v|| / lambda_j, unit section eigenvector
  std::vector<bool> refined;
  std::size_t N_used = 0;
  double gamma = 0.0;
  double trace = 0.0;                   // tr J^{-1}
  double tail_estimate = 0.0;           // sum_{j >= count} 1/lambda_j^{(N)}
  double completeness_defect = 0.0;
  double tol = 0.0;
};

/// First `count` eigenvalues of J with masses.  The section size starts at
/// max(start_N, count + 20).  Throws ConvergenceFailure if ten doublings of
/// it do not stabilize the eigenvalues to tol/10.
SpectralData spectrum(const JacobiParams& params, std::size_t count, double tol, std::size_t start_N = 0);

struct MassVectors {
  std::vector<double> masses;             // series masses where available, else quadrature
  std::vector<double> series_masses;      // -W(lambda)/F'(lambda); NaN if not certifiable
  std::vector<double> series_mass_err;    // relative error estimate
  std::vector<double> quadrature_masses;  // section quadrature weights
  std::vector<bool> fallback;
  std::vector<std::size_t> match_index;   // m_j: Phi_n for n >= m_j straight from the series
  std::vector<std::vector<double>> phi;   // phi[j][n], n = 0..n_max
  std::vector<double> W_values;           // W(lambda_j) = Phi_0(lambda_j)
  std::vector<double> F_prime;            // F'(lambda_j)
  std::vector<double> norm_sums;          // sum_{n<=n_max} Phi_n^2 + tail
  std::vector<double> norm_residuals;     // |norm_sums - (-F' W)|
  std::vector<double> norm_tails;
  std::vector<double> eigen_residuals;    // ||(T - lambda) Phi|| / ||Phi||, rows 0..n_max-1
};

/// Masses and eigenvector samples Phi_0..Phi_{n_max} at each eigenvalue.
/// Throws MassNegative if a mass comes out non-positive.
MassVectors masses_and_vectors(const JacobiParams& params, const SpectralData& sd, std::size_t n_max,
                               double tol = 1e-12);

struct OrthoReport {
  double max_deviation = 0.0;
  double tail_estimate = 0.0;
  double mass_sum_defect = 0.0;  // |sum mu_j - 1|
};

/// max_{s,t<=smax} |sum_j mu_j P_s(lambda_j) P_t(lambda_j) - delta_{st}|.
/// Throws TailDominates when the estimated omitted contribution exceeds tol.
OrthoReport orthonormality_check(const JacobiParams& params, const SpectralData& sd, std::size_t smax,
                                 double tol = 1e-6);

struct WeylValues {
  std::optional<double> series;  // W(z)/F(z); empty if the series is not certifiable at z
  double series_err = 0.0;
  double poles = 0.0;            // sum_j mu_j / (lambda_j - z)
  double poles_tail = 0.0;       // bound on the omitted poles
  double resolvent = 0.0;        // <e_0, (T_N - z)^{-1} e_0>
  std::size_t N = 0;
};

WeylValues weyl(const JacobiParams& params, double z, const SpectralData& sd, double tol = 1e-12);

struct SecondKind {
  double value = 0.0;                // Phi_n(z) / F(z)
  double err_bound = 0.0;
  std::optional<double> tail_route;  // -(sum_{j>=n} 1/(alpha_j P_j P_{j+1})) P_n, only for z < gamma
};

SecondKind second_kind(const JacobiParams& params, std::size_t n, double z, double tol = 1e-12);

struct CharFromWn {
  double value = 0.0;
  double tail_bound = 0.0;
  std::size_t terms = 0;
};

/// 1 - z sum_{n<N} w_n(0) P_n(z).
CharFromWn char_from_wn(const JacobiParams& params, double z, std::size_t N, double tol = 1e-14);

struct AssociatedReport {
  std::size_t N = 0;
  double trace_direct = 0.0;   // tr of the inverse of the associated section
  double trace_formula = 0.0;  // via J_N^{-1} and J_N^{-2} entries
  double trace_rel_diff = 0.0;
  double trace_J = 0.0;
  std::vector<double> W_zeros;
  std::vector<double> associated_eigenvalues;
  double zeros_max_rel_diff = 0.0;
};

AssociatedReport associated_checks(const JacobiParams& params, std::size_t N, std::size_t zeros = 5,
                                   double tol = 1e-12);

}  // namespace jtrace
