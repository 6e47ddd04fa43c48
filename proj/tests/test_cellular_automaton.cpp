#include "doctest.h"

#include <random>

#include "metasys/cellular_automaton.hpp"
#include "metasys/error.hpp"
#include "support.hpp"

using namespace metasys;

namespace {

std::string rotate(const std::string& s, std::size_t k) {
  k %= s.size();
  return s.substr(s.size() - k) + s.substr(0, s.size() - k);
}

std::string run_rule(unsigned rule, const std::string& init, std::size_t steps) {
  return ca::format_state(run(ca::make_system(ca::RuleNumber(rule), ca::parse_state(init)), steps).back());
}

}  // namespace

TEST_SUITE_BEGIN("cellular-automaton");

TEST_CASE("rule numbers cover 0..255") {
  CHECK(ca::RuleNumber(0).value() == 0);
  CHECK(ca::RuleNumber(255).value() == 255);
  CHECK_THROWS_AS(ca::RuleNumber(256), Error);
  CHECK_THROWS_AS(ca::RuleNumber(-1), Error);
  try {
    ca::RuleNumber(300);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OutOfRange);
  }
}

TEST_CASE("rule 110 truth table") {
  const auto t = ca::rule_table(ca::RuleNumber(110));
  // Neighbourhoods 111 110 101 100 011 010 001 000.
  CHECK(t(1, 1, 1) == 0);
  CHECK(t(1, 1, 0) == 1);
  CHECK(t(1, 0, 1) == 1);
  CHECK(t(1, 0, 0) == 0);
  CHECK(t(0, 1, 1) == 1);
  CHECK(t(0, 1, 0) == 1);
  CHECK(t(0, 0, 1) == 1);
  CHECK(t(0, 0, 0) == 0);
  CHECK(t.number() == 110);
  CHECK(ca::ca_update(0, 0, 1, t) == 1);
}

TEST_CASE("rule table bit order matches the Wolfram number") {
  for (unsigned n = 0; n < 256; ++n) {
    const auto t = ca::rule_table(ca::RuleNumber(n));
    CHECK(t.number() == n);
    for (unsigned b = 0; b < 8; ++b) CHECK(t(b >> 2, (b >> 1) & 1U, b & 1U) == ((n >> b) & 1U));
  }
}

TEST_CASE("rule tables are distinct for distinct numbers") {
  for (unsigned a = 0; a < 256; ++a) {
    for (unsigned b = a + 1; b < 256; ++b) {
      if (ca::rule_table(ca::RuleNumber(a)) == ca::rule_table(ca::RuleNumber(b))) {
        FAIL("rules " << a << " and " << b << " share a table");
      }
    }
  }
}

TEST_CASE("ring milieu") {
  const auto m = ca::ring_milieu(31);
  CHECK(m.dimension() == 31);
  CHECK(m.link_count() == 93);
  CHECK(m.contains(0, 30));
  CHECK(m.contains(0, 0));
  CHECK(m.contains(0, 1));
  CHECK(m.contains(30, 0));
  CHECK(m.milieu_size(15) == 3);
  CHECK(ca::ring_milieu(3).link_count() == 9);
  try {
    ca::ring_milieu(2);
    FAIL("expected TooFewEntities");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooFewEntities);
  }
}

TEST_CASE("state strings") {
  const auto s = ca::parse_state(testing::kInitialState);
  CHECK(s.size() == 31);
  CHECK(s[15] == 1.0);
  CHECK(s[14] == 0.0);
  CHECK(ca::format_state(s) == testing::kInitialState);
  CHECK_THROWS_AS(ca::parse_state(""), Error);
  CHECK_THROWS_AS(ca::parse_state("0102"), Error);
  CHECK_THROWS_AS(ca::format_state(EntityTuple(StateKind::Real, {0.5})), Error);
  try {
    ca::parse_state("01x");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BadCharacter);
  }
}

TEST_CASE("rule 110 reproduces the reference target") {
  CHECK(run_rule(110, testing::kInitialState, 15) == testing::kTargetState);
  CHECK(run_rule(110, testing::kInitialState, 1) == "0000000000000011000000000000000");
}

TEST_CASE("rule 204 is the identity") {
  std::mt19937_64 rng(41);
  for (int k = 0; k < 20; ++k) {
    const auto s = testing::random_bits(rng, 3 + rng() % 30);
    CHECK(run_rule(204, s, 7) == s);
  }
}

TEST_CASE("every rule agrees with the string oracle") {
  std::mt19937_64 rng(43);
  for (unsigned rule = 0; rule < 256; ++rule) {
    const auto init = testing::random_bits(rng, 3 + rng() % 29);
    const auto traj = run(ca::make_system(ca::RuleNumber(rule), ca::parse_state(init)), 8);
    const auto oracle = testing::oracle_ca_run(init, rule, 8);
    for (std::size_t k = 0; k <= 8; ++k) CHECK(ca::format_state(traj.snapshots[k]) == oracle[k]);
  }
}

TEST_CASE("ring CA commutes with rotation") {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 200; ++trial) {
    const unsigned rule = rng() % 256;
    const std::size_t p = 3 + rng() % 30;
    const std::size_t k = rng() % p;
    const std::size_t steps = rng() % 8;
    const auto init = testing::random_bits(rng, p);
    CHECK(run_rule(rule, rotate(init, k), steps) == rotate(run_rule(rule, init, steps), k));
  }
}

TEST_CASE("neighbourhood resolution") {
  const auto ring = ca::resolve_neighbourhoods(ca::ring_milieu(5));
  CHECK(ring[0] == Neighbourhood{4, 0, 1});
  CHECK(ring[2] == Neighbourhood{1, 2, 3});
  CHECK(ring[4] == Neighbourhood{3, 4, 0});

  // p = 3: the two others of cell 0 are 1 and 2; 2 sits just below 0 on the ring.
  const auto tri = ca::resolve_neighbourhoods(ca::ring_milieu(3));
  CHECK(tri[0] == Neighbourhood{2, 0, 1});
  CHECK(tri[1] == Neighbourhood{0, 1, 2});

  MilieuMatrix open = ca::ring_milieu(5);
  open.erase(0, 4);
  open.erase(4, 0);
  const auto o = ca::resolve_neighbourhoods(open);
  CHECK(o[0] == Neighbourhood{0, 0, 1});
  CHECK(o[4] == Neighbourhood{3, 4, 4});

  MilieuMatrix lonely(MilieuKind::Boolean, 3);
  for (std::size_t i = 0; i < 3; ++i) lonely.set(i, i);
  CHECK(ca::resolve_neighbourhoods(lonely)[1] == Neighbourhood{1, 1, 1});

  MilieuMatrix no_self = ca::ring_milieu(4);
  no_self.erase(2, 2);
  CHECK_THROWS_AS(ca::resolve_neighbourhoods(no_self), Error);
}

TEST_CASE("open boundary matches the clamped oracle") {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t p = 3 + rng() % 20;
    const unsigned rule = rng() % 256;
    MilieuMatrix open = ca::ring_milieu(p);
    open.erase(0, p - 1);
    open.erase(p - 1, 0);
    SystemSpec spec;
    spec.entities = p;
    const auto init = testing::random_bits(rng, p);
    const auto s = modulate(spec, ca::rule_table(ca::RuleNumber(rule)), open, ca::parse_state(init));
    CHECK(ca::format_state(step(s).current()) == testing::oracle_clamped_step(init, rule));
  }
}

TEST_SUITE_END();
