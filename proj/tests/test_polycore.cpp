#include <doctest.h>

#include <cmath>

#include "jtrace/polycore.hpp"

using namespace jtrace;

namespace {
const JacobiParams kQ(SequenceSpec::geometric(0.25), 0.5);
}

TEST_CASE("P_2 for q = 1/4") {
  const PolyEval e = eval_P(kQ, 2, 0.0, PolyMode::Explicit);
  REQUIRE(e.coeffs.size() == 3);
  CHECK(e.coeffs[0] == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(e.coeffs[1] == doctest::Approx(-17.0 / 48.0).epsilon(1e-14));
  CHECK(e.coeffs[2] == doctest::Approx(1.0 / 720.0).epsilon(1e-14));
  for (double x : {-3.0, 0.5, 11.0, 250.0}) {
    const double expect = x * x / 720.0 - 17.0 * x / 48.0 + 4.0;
    CHECK(eval_P(kQ, 2, x, PolyMode::Recurrence).values[2] == doctest::Approx(expect).epsilon(1e-13));
  }
}

TEST_CASE("values at zero alternate with ratio -1/k") {
  const PolyEval e = eval_P(kQ, 30, 0.0, PolyMode::Recurrence);
  for (std::size_t n = 0; n <= 30; ++n) {
    const double expect = (n % 2 ? -1.0 : 1.0) * std::ldexp(1.0, static_cast<int>(n));
    CHECK(e.values[n] == doctest::Approx(expect).epsilon(1e-13));
    CHECK(P_at_zero(kQ, n) == expect);
  }
}

TEST_CASE("recurrence and explicit expansion agree for a power law") {
  const JacobiParams p(SequenceSpec::power_law(1.0, 2.0), 0.3);
  for (std::size_t n : {1u, 4u, 9u}) {
    for (double x : {-2.0, 0.7, 5.0}) {
      const double r = eval_P(p, n, x, PolyMode::Recurrence).values[n];
      const double e = eval_P(p, n, x, PolyMode::Explicit).values[n];
      CHECK(r == doctest::Approx(e).epsilon(1e-11));
    }
  }
}

TEST_CASE("mantissa-exponent form survives overflow") {
  const PolyEval e = eval_P(kQ, 200, 1e6, PolyMode::Recurrence);
  for (std::size_t n = 0; n <= 200; ++n) CHECK(std::isfinite(e.mantissas[n]));
  CHECK(std::ldexp(e.mantissas[3], e.exponents[3]) == doctest::Approx(e.values[3]));
}

TEST_CASE("w_n(0) and the trace") {
  const TruncatedSum w0 = w_at_zero(kQ, 0, 1e-18);
  CHECK(w0.value == doctest::Approx(0.084390744133695109184).epsilon(1e-14));
  const TruncatedSum w1 = w_at_zero(kQ, 1, 1e-18);
  CHECK(w1.value == doctest::Approx(-0.0021148216007235517013).epsilon(1e-13));

  const TraceInverse t = trace_inverse(kQ, 1e-16);
  CHECK(std::abs(t.value() - 4.0 / 45.0) <= 1e-12 * 4.0 / 45.0);
  CHECK(std::abs(t.second_kind.value - 4.0 / 45.0) <= 1e-12 * 4.0 / 45.0);
  CHECK(t.direct.tail_bound <= 1e-16);
}

TEST_CASE("trace routes agree for a slowly growing sequence") {
  // sum_j 1/(j+1)^2 converges only polynomially; the second route must not
  // inherit the slow tail through its start value.
  const JacobiParams p(SequenceSpec::power_law(1.0, 2.0), 0.5);
  const TraceInverse t = trace_inverse(p, 1e-14);
  CHECK(std::abs(t.second_kind.value - t.direct.value) <= 1e-12 * t.direct.value);
  CHECK(std::abs(t.second_kind.value - t.direct.value) <= t.second_kind.tail_bound + t.direct.tail_bound);
}
