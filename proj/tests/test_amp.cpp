#include "doctest.h"

#include <filesystem>
#include <random>

#include "metasys/amp.hpp"
#include "metasys/cellular_automaton.hpp"
#include "metasys/error.hpp"
#include "metasys/neural_network.hpp"
#include "support.hpp"

using namespace metasys;

namespace {

amp::AmpDocument reference_doc(std::size_t steps = 15) {
  return amp::emit(ca::make_system(ca::RuleNumber(110), ca::parse_state(testing::kInitialState)),
                   steps, ca::parse_state(testing::kTargetState));
}

std::size_t parse_error_line(const std::string& text) {
  try {
    amp::parse(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  FAIL("expected ParseError for:\n" << text);
  return 0;
}

const char* const kSmallCa =
    "# three-cell ring\n"
    "amp 1\n"
    "kind ca\n"
    "p 3\n"
    "states boolean\n"
    "schedule synchronous\n"
    "milieu boolean\n"
    "row 0: 0 1 2\n"
    "row 1: 0 1 2\n"
    "row 2: 0 1 2\n"
    "update table 01101110\n"
    "init 010\n"
    "steps 2\n";

}  // namespace

TEST_SUITE_BEGIN("amp");

TEST_CASE("written CA documents have the canonical layout") {
  const auto text = amp::write(reference_doc());
  CHECK(text.rfind("amp 1\nkind ca\np 31\nstates boolean\nschedule synchronous\nmilieu boolean\n", 0) == 0);
  CHECK(text.find("row 0: 0 1 30\n") != std::string::npos);
  CHECK(text.find("update table 01101110\n") != std::string::npos);
  CHECK(text.find("init " + testing::kInitialState + "\nsteps 15\ntarget " + testing::kTargetState + "\n") !=
        std::string::npos);
}

TEST_CASE("parse(write(doc)) == doc for CA documents") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t p = 3 + rng() % 40;
    const auto s = ca::make_system(ca::RuleNumber(static_cast<long>(rng() % 256)),
                                   ca::parse_state(testing::random_bits(rng, p)));
    std::optional<EntityTuple> target;
    if (rng() & 1U) target = ca::parse_state(testing::random_bits(rng, p));
    const auto doc = amp::emit(s, rng() % 20, target);
    const auto text = amp::write(doc);
    const auto back = amp::parse(text);
    CHECK(back == doc);
    CHECK(amp::write(back) == text);
  }
}

TEST_CASE("parse(write(doc)) == doc for network documents") {
  std::mt19937_64 rng(103);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto net = nn::randomized(nn::layered_milieu(2 + seed % 4, 1 + seed % 7), {}, seed, 0);
    const auto input = ca::parse_state(testing::random_bits(rng, net.width));
    const auto s = nn::to_system(net, input);
    const auto doc = amp::emit(s, net.layers - 1);
    const auto back = amp::parse(amp::write(doc));
    CHECK(back == doc);
    // Weights already on the decimal grid come back unchanged, so the
    // interpreter reproduces the original run exactly.
    CHECK(amp::interpret(back) == run(s, net.layers - 1));
    CHECK(nn::from_system(amp::to_system(back)) == net);
  }
}

TEST_CASE("decimals render with nine places") {
  auto net = nn::layered_milieu(2, 1);
  net.weights.set(1, 0, 0.123456789);
  net.bias_of(1) = -0.5;
  const auto text = amp::write(amp::emit(nn::to_system(net, ca::parse_state("1")), 1));
  CHECK(text.find("row 1: 0=0.123456789\n") != std::string::npos);
  CHECK(text.find("bias 1: -0.500000000\n") != std::string::npos);
  CHECK(text.find("update perceptron width 1 strategy output-layer-only\n") != std::string::npos);
  CHECK(text.find("schedule layered\n") != std::string::npos);
}

TEST_CASE("emit quantizes off-grid weights") {
  auto net = nn::layered_milieu(2, 1);
  net.weights.set(1, 0, 0.1234567891234);
  const auto doc = amp::emit(nn::to_system(net, ca::parse_state("1")), 1);
  CHECK(*doc.milieu.weight(1, 0) == 0.123456789);
  CHECK_THROWS_AS(amp::emit(nn::to_system(net, ca::parse_state("1")), 1, ca::parse_state("011")), Error);
}

TEST_CASE("interpret runs the document") {
  const auto t = amp::interpret(reference_doc());
  REQUIRE(t.size() == 16);
  CHECK(ca::format_state(t.snapshots.front()) == testing::kInitialState);
  CHECK(ca::format_state(t.back()) == testing::kTargetState);
  const auto t0 = amp::interpret(reference_doc(0));
  REQUIRE(t0.size() == 1);
  CHECK(ca::format_state(t0.back()) == testing::kInitialState);

  const auto small = amp::interpret(amp::parse(kSmallCa));
  REQUIRE(small.size() == 3);
  CHECK(ca::format_state(small.snapshots[1]) == testing::oracle_ca_step("010", 110));
}

TEST_CASE("comments and blank lines are ignored") {
  const std::string text = std::string("\n\n") + kSmallCa + "# trailing\n\n";
  CHECK(amp::parse(text) == amp::parse(kSmallCa));
  std::string inline_comment = kSmallCa;
  inline_comment.replace(inline_comment.find("steps 2"), 7, "steps 2   # two steps");
  CHECK(amp::parse(inline_comment).steps == 2);
}

TEST_CASE("an entity index beyond p is a semantic error") {
  std::string text = kSmallCa;
  text.replace(text.find("row 2: 0 1 2"), 12, "row 2: 0 1 99");
  CHECK_THROWS_AS(amp::parse(text), Error);
  try {
    amp::parse(text);
  } catch (const ParseError&) {
    FAIL("out-of-range index is not a syntax error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SemanticError);
  }
}

TEST_CASE("unrunnable documents are semantic errors") {
  std::string text = kSmallCa;
  text.replace(text.find("schedule synchronous"), 20, "schedule layered");
  const auto doc = amp::parse(text);
  try {
    amp::interpret(doc);
    FAIL("expected SemanticError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SemanticError);
  }

  std::string wrong_kind = kSmallCa;
  wrong_kind.replace(wrong_kind.find("kind ca"), 7, "kind ann");
  CHECK_THROWS_AS(amp::parse(wrong_kind), Error);

  std::string long_init = kSmallCa;
  long_init.replace(long_init.find("init 010"), 8, "init 0101");
  try {
    amp::parse(long_init);
    FAIL("expected SemanticError");
  } catch (const ParseError&) {
    FAIL("a wrong entity count is not a syntax error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SemanticError);
    CHECK(std::string(e.what()).find("line 12") != std::string::npos);
  }
}

TEST_CASE("syntax errors carry the line number") {
  auto replaced = [](std::string from, std::string to) {
    std::string t = kSmallCa;
    t.replace(t.find(from), from.size(), to);
    return t;
  };
  CHECK(parse_error_line(replaced("amp 1", "amp 2")) == 2);
  CHECK(parse_error_line(replaced("kind ca", "kind xyz")) == 3);
  CHECK(parse_error_line(replaced("p 3", "p three")) == 4);
  CHECK(parse_error_line(replaced("row 1: 0 1 2", "row 1: 0 x 2")) == 9);
  CHECK(parse_error_line(replaced("row 1: 0 1 2", "row 2: 0 1 2")) == 9);
  CHECK(parse_error_line(replaced("update table 01101110", "update table 0110111")) == 11);
  CHECK(parse_error_line(replaced("init 010", "init 0102")) == 12);
  CHECK(parse_error_line(replaced("steps 2", "steps -1")) == 13);
  CHECK(parse_error_line(std::string(kSmallCa) + "extra 1\n") == 14);
  CHECK(parse_error_line(replaced("states boolean\n", "")) == 5);
}

TEST_CASE("empty and truncated documents") {
  CHECK(parse_error_line("") == 0);
  CHECK(parse_error_line("# only a comment\n") == 0);
  std::string text = kSmallCa;
  text.erase(text.find("init"));
  CHECK(parse_error_line(text) == 0);
}

TEST_CASE("files round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "metasys-amp-test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "model.amp").string();
  amp::write_file(path, reference_doc());
  CHECK(amp::read_file(path) == reference_doc());
  std::filesystem::remove_all(dir);
  CHECK_THROWS_AS(amp::read_file(path), ParseError);
}

TEST_SUITE_END();
