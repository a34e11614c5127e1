#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "jtrace/errors.hpp"
#include "jtrace/sequences.hpp"

using namespace jtrace;

TEST_CASE("geometric rule matches its closed form") {
  const SequenceSpec s = SequenceSpec::geometric(0.25);
  CHECK(s.a(0) == doctest::Approx(12.0));
  CHECK(s.a(1) == doctest::Approx(240.0));
  CHECK(s.a(2) == doctest::Approx(4032.0));
  double sum = 0.0;
  for (std::size_t j = 0; j < 10; ++j) sum += 1.0 / s.a(j);
  CHECK(sum == doctest::Approx(0.0877643527000298).epsilon(1e-14));
}

TEST_CASE("tail bounds bracket the exact tail") {
  const SequenceSpec pl = SequenceSpec::power_law(1.0, 2.0);
  const double exact = 0.0951663356816857;  // trigamma(11)
  CHECK(pl.tail_sum_reciprocal(10) >= exact);
  CHECK(pl.tail_sum_reciprocal_lower(10) <= exact);
  CHECK(pl.tail_sum_reciprocal(10) < 1.2 * exact);

  const SequenceSpec g = SequenceSpec::geometric(0.25);
  double tail = 0.0;
  for (std::size_t j = 5; j < 60; ++j) tail += 1.0 / g.a(j);
  CHECK(g.tail_sum_reciprocal(5) >= tail * (1 - 1e-15));
  CHECK(g.tail_sum_reciprocal_lower(5) <= tail * (1 + 1e-15));
}

TEST_CASE("explicit prefix then tail rule") {
  const SequenceSpec s = SequenceSpec::explicit_values({2.0, 3.0}, PowerLawRule{1.0, 2.0});
  CHECK(s.a(0) == 2.0);
  CHECK(s.a(1) == 3.0);
  CHECK(s.a(2) == doctest::Approx(9.0));
  CHECK(s.min_from(0) == 2.0);
}

TEST_CASE("Jacobi entries") {
  const JacobiParams p(SequenceSpec::geometric(0.25), 0.5);
  const Entries e0 = entries(p, 0);
  CHECK(e0.alpha == doctest::Approx(6.0));
  CHECK(e0.beta == doctest::Approx(12.0));
  const Entries e1 = entries(p, 1);
  CHECK(e1.beta == doctest::Approx(240.0 + 0.25 * 12.0));
  CHECK(gamma_lower_bound(p) == doctest::Approx(12.0 * 0.25));
}

TEST_CASE("invalid parameters are rejected") {
  CHECK_THROWS_AS(SequenceSpec::geometric(1.0), std::invalid_argument);
  CHECK_THROWS_AS(SequenceSpec::power_law(1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(JacobiParams(SequenceSpec::geometric(0.25), 1.5), std::invalid_argument);
  const JacobiParams p(SequenceSpec::geometric(0.25), 0.5);
  CHECK(std::isinf(p.seq().a(600)));
  CHECK_THROWS_AS(entries(p, 600), ParameterOutOfRange);
}
