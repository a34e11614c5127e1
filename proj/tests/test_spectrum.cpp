#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "jtrace/errors.hpp"
#include "jtrace/spectrum.hpp"

using namespace jtrace;

namespace {

const JacobiParams kQ(SequenceSpec::geometric(0.25), 0.5);

// Frozen with 160-digit arithmetic on the N = 60 section.
const double kLambda[12] = {11.8418098430658350456013, 239.3590120740972317077949, 4029.434412620592266603389,
                            65269.73726249983925794072, 1047510.948954245127602839, 16772955.79579311854518308,
                            268418415.1831665134610752, 4294899132.732664563962376, 68719204082.93065788339764,
                            1099510537163.722631440479, 17592181681966.89052573864, 281474959260859.5621029487};
const double kMu[6] = {0.9993047484667935725146725, 6.95249297564811481562748e-4, 2.235641584810289185764571e-9,
                       3.119347553966810657969975e-17, 1.775465827088824041853111e-27,
                       4.008321695361601094048468e-40};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("two by two section") {
  const TruncatedJacobi T = truncate(kQ, 2);
  CHECK(T.diag[1] == doctest::Approx(243.0));
  const auto ev = section_eigenvalues(T, 2, 0.0);
  CHECK(rel(ev[0], 11.844260842792587339) < 1e-15);
  CHECK(rel(ev[1], 243.15573915720741266) < 1e-15);
  CHECK(sturm_count(T, 100.0) == 1);
  const auto [lo, hi] = gershgorin_bounds(T);
  CHECK(lo <= ev[0]);
  CHECK(hi >= ev[1]);
}

TEST_CASE("section eigenvalues at N = 60") {
  const TruncatedJacobi T = truncate(kQ, 60);
  const auto ev = section_eigenvalues(T, 12, 0.0, gamma_lower_bound(kQ));
  for (std::size_t j = 0; j < 12; ++j) CHECK(rel(ev[j], kLambda[j]) < 4e-16);
  for (std::size_t j = 0; j < 6; ++j) CHECK(rel(section_eigenvector(T, ev[j]).weight, kMu[j]) < 1e-9);
}

TEST_CASE("interlacing of consecutive sections") {
  for (std::size_t N = 1; N < 30; ++N) {
    const auto small = section_eigenvalues(truncate(kQ, N), N, 0.0);
    const auto big = section_eigenvalues(truncate(kQ, N + 1), N + 1, 0.0);
    for (std::size_t j = 0; j < N; ++j) {
      CHECK(big[j] <= small[j]);
      CHECK(small[j] <= big[j + 1]);
    }
  }
}

TEST_CASE("tridiagonal solve and resolvent") {
  const TruncatedJacobi T = truncate(kQ, 60);
  std::vector<double> e0(60, 0.0);
  e0[0] = 1.0;
  const auto x = tridiagonal_solve(T, 1.5, e0);
  CHECK(rel(x[0], 0.096630569716494482281) < 1e-14);
  CHECK(rel(section_resolvent00(T, 1.5), 0.096630569716494482281) < 1e-14);
  CHECK(rel(section_trace_inverse(truncate_associated(kQ, 59)), 0.004445100546613893438) < 1e-13);
}

TEST_CASE("spectrum refines eigenvalues and masses") {
  const SpectralData sd = spectrum(kQ, 8, 1e-13);
  REQUIRE(sd.lambdas.size() == 8);
  for (std::size_t j = 0; j < 8; ++j) {
    CHECK(sd.refined[j]);
    CHECK(rel(sd.lambdas[j], kLambda[j]) < 1e-15);
  }
  for (std::size_t j = 0; j < 6; ++j) {
    CHECK(!sd.mass_fallback[j]);
    CHECK(rel(sd.masses[j], kMu[j]) < 1e-12);
  }
  CHECK(std::abs(sd.trace - 4.0 / 45.0) < 1e-15);
  CHECK(sd.completeness_defect < 1e-12);
}

TEST_CASE("empty request") {
  const SpectralData sd = spectrum(kQ, 0, 1e-12);
  CHECK(sd.lambdas.empty());
  CHECK(std::abs(sd.trace - 4.0 / 45.0) < 1e-15);
}

TEST_CASE("vectors, norms and orthonormality") {
  const SpectralData sd = spectrum(kQ, 12, 1e-13);
  const MassVectors mv = masses_and_vectors(kQ, sd, 40);
  for (std::size_t j = 0; j <= 6; ++j) {
    CHECK(mv.eigen_residuals[j] < 1e-8);
    CHECK(mv.norm_residuals[j] < 1e-8 * mv.norm_sums[j]);
    CHECK(rel(mv.series_masses[j], mv.quadrature_masses[j]) < 1e-6);
  }
  const OrthoReport o = orthonormality_check(kQ, sd, 8);
  CHECK(o.max_deviation < 1e-6);
  CHECK(o.mass_sum_defect < 1e-8);
}

TEST_CASE("Weyl function by three routes") {
  const SpectralData sd = spectrum(kQ, 12, 1e-13);
  const WeylValues w = weyl(kQ, 1.5, sd);
  REQUIRE(w.series.has_value());
  CHECK(rel(*w.series, 0.096630569716494482281) < 1e-12);
  CHECK(rel(w.poles, 0.096630569716494482281) < 1e-12);
  CHECK(rel(w.resolvent, 0.096630569716494482281) < 1e-12);
  CHECK(rel(weyl(kQ, 0.0, sd).resolvent, 0.084390744133695109184) < 1e-13);
}

TEST_CASE("second kind routes and the characteristic function from w_n") {
  for (std::size_t n : {0u, 3u}) {
    const SecondKind s = second_kind(kQ, n, 1.0);
    REQUIRE(s.tail_route.has_value());
    CHECK(rel(*s.tail_route, s.value) < 1e-10);
  }
  const CharFromWn c = char_from_wn(kQ, 0.0, 0);
  CHECK(c.value == 1.0);
}

TEST_CASE("associated operator") {
  const AssociatedReport r = associated_checks(kQ, 60);
  CHECK(r.trace_rel_diff < 1e-8);
  const double expect[5] = {239.2008308986873465, 4029.4344036390700225, 65269.737262499837222,
                            1047510.9489542451276, 16772955.795793118545};
  for (std::size_t j = 0; j < 5; ++j) {
    CHECK(rel(r.associated_eigenvalues[j], expect[j]) < 1e-14);
    CHECK(rel(r.W_zeros[j], expect[j]) < 1e-10);
  }
}

TEST_CASE("power law spectrum is positive and ordered") {
  const JacobiParams p(SequenceSpec::power_law(1.0, 2.0), 0.5);
  const SpectralData sd = spectrum(p, 5, 1e-10);
  for (std::size_t j = 0; j < 5; ++j) {
    CHECK(sd.masses[j] > 0.0);
    if (j > 0) CHECK(sd.lambdas[j] > sd.lambdas[j - 1]);
    CHECK(sd.lambdas[j] >= sd.gamma);
  }
}

TEST_CASE("characteristic function from w_n past the underflow of w_n(0)") {
  // k^n / a_n leaves the double range near n = 600 while the terms still matter.
  const JacobiParams p(SequenceSpec::power_law(1.0, 4.0), 0.3);
  for (double z : {2.0, 5.0}) {
    const CharFromWn c = char_from_wn(p, z, 0);
    CHECK(c.terms > 600);
    CHECK(c.value == doctest::Approx(char_function(p, z).value).epsilon(1e-10));
  }
}

TEST_CASE("unrefined eigenvalues fall back to quadrature masses") {
  const JacobiParams p(SequenceSpec::power_law(1.0, 4.0), 0.3);
  const SpectralData sd = spectrum(p, 4, 1e-12);
  const MassVectors mv = masses_and_vectors(p, sd, 12);
  for (std::size_t j = 0; j < 4; ++j) {
    CHECK(mv.masses[j] > 0.0);
    CHECK(mv.fallback[j] == !sd.refined[j]);
  }
}

TEST_CASE("bad tolerance") { CHECK_THROWS_AS(spectrum(kQ, 3, 0.0), std::invalid_argument); }
