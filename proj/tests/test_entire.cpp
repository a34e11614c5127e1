#include <doctest.h>

#include <cmath>
#include <complex>

#include "brute.hpp"
#include "jtrace/entire.hpp"
#include "jtrace/errors.hpp"

using namespace jtrace;

namespace {
const JacobiParams kQ(SequenceSpec::geometric(0.25), 0.5);
}

TEST_CASE("low-order coefficients of F") {
  const PowerSeriesApprox s = make_series(kQ, SeriesId::f(), 1.0, 1e-20);
  CHECK(s.coeff(0) == 1.0);
  CHECK(s.coeff(1) == doctest::Approx(4.0 / 45.0).epsilon(1e-15));
  CHECK(s.coeff(2) == doctest::Approx(16.0 / 42525.0).epsilon(1e-14));
}

TEST_CASE("chain accumulation matches brute-force enumeration") {
  for (const JacobiParams& p : {kQ, JacobiParams(SequenceSpec::power_law(2.0, 1.5), 0.7)}) {
    for (std::size_t J : {3u, 7u, 12u}) {
      const std::vector<double> a = p.seq().values(J + 1);
      const PowerSeriesApprox f = series_coeffs(p, SeriesId::f(), 3, J);
      const PowerSeriesApprox w = series_coeffs(p, SeriesId::w(2), 3, J);
      for (std::size_t m = 0; m <= 3; ++m) {
        CHECK(f.coeff(m) == doctest::Approx(brute::f_coeff(a, p.k(), m, J)).epsilon(1e-14));
        CHECK(w.coeff(m) == doctest::Approx(brute::w_coeff(a, p.k(), 2, m, J)).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("truncation bounds cover the omitted part") {
  const PowerSeriesApprox coarse = series_coeffs(kQ, SeriesId::f(), 6, 10);
  const PowerSeriesApprox fine = make_series(kQ, SeriesId::f(), 50.0, 1e-22);
  for (double z : {1.0, 20.0, 50.0}) {
    const double diff = std::abs(eval_series(coarse, z, HUGE_VAL).value - eval_series(fine, z).value);
    CHECK(diff <= coarse.truncation_bound(z) + 1e-15);
  }
}

TEST_CASE("F vanishes at the first eigenvalue") {
  const double lam0 = 11.8418098430658350456013;
  const PowerSeriesApprox f = make_series(kQ, SeriesId::f(), lam0, 1e-20);
  const SeriesValue v = eval_series(f, lam0, HUGE_VAL);
  const double slope = std::abs(eval_series_derivative(f, lam0).value);
  // lam0 is the double nearest the root
  CHECK(std::abs(v.value) <= slope * lam0 * 2.3e-16 + v.err_bound);
  CHECK(char_function(kQ, 0.0).value == 1.0);
}

TEST_CASE("derivative against a central difference") {
  const PowerSeriesApprox s = make_series(kQ, SeriesId::f(), 20.0, 1e-20);
  const double z = 7.0;
  const double h = 1e-4;
  const double fd = (eval_series(s, z + h).value - eval_series(s, z - h).value) / (2 * h);
  CHECK(eval_series_derivative(s, z).value == doctest::Approx(fd).epsilon(1e-8));
}

TEST_CASE("complex evaluation reduces to the real one on the axis") {
  const PowerSeriesApprox s = make_series(kQ, SeriesId::w(0), 10.0, 1e-18);
  const auto c = eval_series(s, std::complex<double>(3.0, 0.0));
  CHECK(c.value.real() == doctest::Approx(eval_series(s, 3.0).value).epsilon(1e-15));
  CHECK(c.value.imag() == 0.0);
}

TEST_CASE("Wronskian is constant and equals F") {
  for (double z : {1.0, 5.0, 10.0}) {
    const double F = char_function(kQ, z).value;
    for (std::size_t n = 0; n <= 10; ++n) {
      CHECK(wronskian_residual(kQ, n, z).value <= 1e-9 * std::abs(F));
      CHECK(phi_recurrence_residual(kQ, n, z).value <= 1e-9 * std::abs(F) + 1e-12);
    }
  }
}

TEST_CASE("W(0) is the first second-kind value at zero") {
  CHECK(phi_n(kQ, 0, 0.0).value == doctest::Approx(0.084390744133695109184).epsilon(1e-14));
  CHECK(phi_n(kQ, 1, 0.0).value == doctest::Approx(-0.0021148216007235517013).epsilon(1e-12));
}
