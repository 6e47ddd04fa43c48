#include "doctest.h"

#include <cmath>
#include <random>

#include "metasys/error.hpp"
#include "metasys/milieu.hpp"
#include "metasys/state.hpp"
#include "support.hpp"

using namespace metasys;

namespace {

EntityTuple bits(const std::string& s) { return parse_state_line(s, StateKind::Boolean); }

EntityTuple complement(const EntityTuple& t) {
  std::vector<double> v;
  for (double x : t.values()) v.push_back(1.0 - x);
  return EntityTuple(StateKind::Boolean, v);
}

}  // namespace

TEST_SUITE_BEGIN("state");

TEST_CASE("entity tuples reject values outside the state set") {
  CHECK_THROWS_AS(EntityTuple(StateKind::Boolean, {0.0, 2.0}), Error);
  CHECK_THROWS_AS(EntityTuple(StateKind::Real, {0.0, NAN}), Error);
  CHECK_THROWS_AS(EntityTuple(StateKind::Real, {INFINITY}), Error);
  try {
    EntityTuple(StateKind::Boolean, {0.5});
    FAIL("expected StateDomainViolation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::StateDomainViolation);
  }
  EntityTuple t = EntityTuple::zeros(StateKind::Boolean, 3);
  CHECK_THROWS_AS(t.set(1, 0.3), Error);
  t.set(1, 1.0);
  CHECK(t[1] == 1.0);
}

TEST_CASE("match examples") {
  const auto x = bits(testing::kTargetState);
  CHECK(match(x, x) == 1.0);
  CHECK(match(x, complement(x)) == 0.0);

  // 28 of 31 positions equal.
  std::string y = testing::kTargetState;
  for (std::size_t i : {0u, 7u, 30u}) y[i] = y[i] == '0' ? '1' : '0';
  CHECK(match(x, bits(y)) == doctest::Approx(28.0 / 31.0));
  CHECK(match(x, bits(y)) == 28.0 / 31.0);
  CHECK(match(x, bits(y)) == doctest::Approx(0.903).epsilon(0.001));
}

TEST_CASE("match rejects tuples of different length") {
  try {
    match(bits("0101"), bits("010"));
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionMismatch);
  }
}

TEST_CASE("real match uses the absolute tolerance") {
  const EntityTuple a(StateKind::Real, {0.25, 1.0, -3.0});
  const EntityTuple b(StateKind::Real, {0.25 + 5e-10, 1.0 + 2e-9, -3.0});
  CHECK(match(a, b) == doctest::Approx(2.0 / 3.0));
  CHECK(match(a, b, 1e-8) == 1.0);
}

TEST_CASE("match axioms hold on random Boolean tuples") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t p = 1 + rng() % 64;
    const auto sa = testing::random_bits(rng, p);
    const auto sb = testing::random_bits(rng, p);
    const auto a = bits(sa);
    const auto b = bits(sb);
    std::size_t equal = 0;
    for (std::size_t i = 0; i < p; ++i) equal += sa[i] == sb[i];
    const double m = match(a, b);
    CHECK(match(a, a) == 1.0);
    CHECK(m == match(b, a));
    CHECK(m >= 0.0);
    CHECK(m <= 1.0);
    CHECK(m == static_cast<double>(equal) / static_cast<double>(p));
  }
}

TEST_CASE("decimal rendering is fixed at 9 places") {
  CHECK(format_decimal(0.123456789) == "0.123456789");
  CHECK(format_decimal(-1.0) == "-1.000000000");
  CHECK(format_decimal(0.5) == "0.500000000");
  double v = 0.0;
  CHECK(parse_decimal("0.123456789", v));
  CHECK(v == 0.123456789);
  CHECK(parse_decimal("+2.5", v));
  CHECK(v == 2.5);
  CHECK_FALSE(parse_decimal("", v));
  CHECK_FALSE(parse_decimal("1.0x", v));
  CHECK_FALSE(parse_decimal("nan", v));
  CHECK_FALSE(parse_decimal("1e5", v));
}

TEST_CASE("quantized values survive a text round trip") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dist(-50.0, 50.0);
  for (int k = 0; k < 20000; ++k) {
    const double q = quantize_decimal(dist(rng));
    double back = 0.0;
    REQUIRE(parse_decimal(format_decimal(q), back));
    CHECK(back == q);
    CHECK(quantize_decimal(q) == q);
  }
}

TEST_CASE("state lines round trip") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 100; ++k) {
    const auto s = testing::random_bits(rng, 1 + rng() % 40);
    CHECK(format_state_line(parse_state_line(s, StateKind::Boolean)) == s);
  }
  const EntityTuple r(StateKind::Real, {0.5, -1.25, 3.0});
  CHECK(format_state_line(r) == "0.500000000 -1.250000000 3.000000000");
  CHECK(parse_state_line(format_state_line(r), StateKind::Real) == r);
  CHECK_THROWS_AS(parse_state_line("01a1", StateKind::Boolean), Error);
  CHECK_THROWS_AS(parse_state_line("0.5  1.0", StateKind::Real), Error);
  CHECK_THROWS_AS(parse_state_line("", StateKind::Boolean), Error);
}

TEST_CASE("milieu matrix keeps rows sorted and counts q") {
  MilieuMatrix m(MilieuKind::Boolean, 4);
  m.set(2, 3);
  m.set(2, 0);
  m.set(2, 2);
  CHECK(m.milieu_size(2) == 3);
  CHECK(m.row(2)[0].source == 0);
  CHECK(m.row(2)[2].source == 3);
  CHECK(m.contains(2, 3));
  CHECK_FALSE(m.contains(3, 2));
  CHECK_THROWS_AS(m.set(4, 0), Error);
  CHECK_THROWS_AS(m.set(0, 1, 0.5), Error);
  m.erase(2, 0);
  CHECK(m.milieu_size(2) == 2);

  MilieuMatrix w(MilieuKind::Weighted, 2);
  w.set(1, 0, 0.0);
  CHECK(w.milieu_size(1) == 1);  // a zero weight is still a link
  CHECK(w.weight(1, 0) == 0.0);
  CHECK_THROWS_AS(w.set(1, 0, INFINITY), Error);
}

TEST_SUITE_END();
