#include "doctest.h"

#include <future>
#include <random>
#include <vector>

#include "metasys/amp.hpp"
#include "metasys/cellular_automaton.hpp"
#include "metasys/codegen.hpp"
#include "metasys/error.hpp"
#include "metasys/neural_network.hpp"
#include "metasys/search.hpp"
#include "metasys/toolchain.hpp"
#include "support.hpp"

using namespace metasys;

namespace {

amp::AmpDocument ca_doc(unsigned rule, const std::string& init, std::size_t steps) {
  return amp::emit(ca::make_system(ca::RuleNumber(rule), ca::parse_state(init)), steps);
}

ErrorCode toolchain_failure(const std::string& source, const ToolchainConfig& config,
                            std::string* diagnostics = nullptr) {
  try {
    compile_and_run(source, config);
  } catch (const ToolchainError& e) {
    if (diagnostics) *diagnostics = e.diagnostics();
    return e.code();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a toolchain error");
  return ErrorCode::SemanticError;
}

}  // namespace

TEST_SUITE_BEGIN("toolchain");

TEST_CASE("toolchain configuration is validated") {
  ToolchainConfig c;
  try {
    validate(c);
    FAIL("expected NoBackendConfigured");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoBackendConfigured);
  }
  c.command = "c++ -o {bin}";
  CHECK_THROWS_AS(validate(c), Error);
  c.command = "c++ {src}";
  CHECK_THROWS_AS(validate(c), Error);
  c.command = cxx_command("g++");
  CHECK(c.command == "g++ -std=c++17 -O1 -o {bin} {src}");
  CHECK_NOTHROW(validate(c));
  c.timeout = std::chrono::seconds(0);
  CHECK_THROWS_AS(validate(c), Error);
  CHECK_THROWS_AS(compile_and_run("int main() {}", ToolchainConfig{}), Error);
}

TEST_CASE("process runner captures output, status and timeouts") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto ok = run_process({"/bin/sh", "-c", "echo out; echo err >&2; exit 3"}, dir,
                              std::chrono::milliseconds(5000));
  CHECK(ok.exit_code == 3);
  CHECK(ok.out == "out\n");
  CHECK(ok.err == "err\n");
  CHECK_FALSE(ok.timed_out);

  const auto slow = run_process({"/bin/sh", "-c", "sleep 5 & sleep 5; wait"}, dir,
                                std::chrono::milliseconds(200));
  CHECK(slow.timed_out);

  const auto capped = run_process({"/bin/sh", "-c", "yes | head -c 100000"}, dir,
                                  std::chrono::milliseconds(5000), 1000);
  CHECK(capped.out.size() == 1000);
  CHECK(capped.exit_code == 0);
}

TEST_CASE("trajectory parsing") {
  const auto t = parse_trajectory("010\n111\n");
  REQUIRE(t.size() == 2);
  CHECK(t.back() == ca::parse_state("111"));
  const auto r = parse_trajectory("0.500000000 1.000000000\n");
  CHECK(r.back().kind() == StateKind::Real);
  CHECK_THROWS_AS(parse_trajectory(""), Error);
  CHECK_THROWS_AS(parse_trajectory("010"), Error);
  CHECK_THROWS_AS(parse_trajectory("010\n01\n"), Error);
  CHECK_THROWS_AS(parse_trajectory("01x\n"), Error);
}

TEST_CASE("trajectory comparison") {
  const auto a = parse_trajectory("010\n111\n000\n");
  const auto b = parse_trajectory("010\n110\n000\n");
  CHECK(compare_trajectories(a, a).equal);
  const auto v = compare_trajectories(a, b);
  CHECK_FALSE(v.equal);
  CHECK(v.step == 1);
  CHECK(v.expected == "111");
  CHECK(v.actual == "110");
  const auto short_run = compare_trajectories(a, parse_trajectory("010\n111\n"));
  CHECK(short_run.step == 2);
  CHECK(short_run.actual.empty());
}

TEST_CASE("compiled programs reproduce the interpreter") {
  const auto tc = testing::test_toolchain();
  if (!tc) {
    MESSAGE("no toolchain configured; skipping");
    return;
  }
  const auto doc = ca_doc(110, testing::kInitialState, 15);
  const auto compiled = compile_and_run(codegen::generate_source(doc).text(), *tc);
  CHECK(compiled == amp::interpret(doc));
  CHECK(ca::format_state(compiled.back()) == testing::kTargetState);

  CHECK(verify_equivalence(doc, *tc).equal);
  CHECK(verify_equivalence(ca_doc(30, "0010011", 0), *tc).equal);

  const auto net = nn::randomized(nn::layered_milieu(5, 6), {}, 11, 0);
  const auto s = nn::to_system(net, ca::parse_state("110100"));
  CHECK(verify_equivalence(s, 9, *tc).equal);
  CHECK(verify_equivalence(nn::to_system(net, ca::parse_state("110100"), Schedule::SynchronousAll), 6,
                           *tc)
            .equal);
}

TEST_CASE("build failures surface the compiler diagnostics") {
  const auto tc = testing::test_toolchain();
  if (!tc) return;
  auto source = codegen::generate_source(ca_doc(110, testing::kInitialState, 2)).text();
  source.replace(source.find("int main()"), 10, "int main() { undeclared_symbol; ");
  std::string diagnostics;
  CHECK(toolchain_failure(source, *tc, &diagnostics) == ErrorCode::CompileFailed);
  CHECK(diagnostics.find("undeclared_symbol") != std::string::npos);

  ToolchainConfig missing = *tc;
  missing.command = "nonexistent-compiler-xyz -o {bin} {src}";
  CHECK(toolchain_failure(source, missing) == ErrorCode::CompileFailed);
}

TEST_CASE("runaway programs are stopped") {
  const auto tc = testing::test_toolchain();
  if (!tc) return;
  auto source = codegen::generate_source(ca_doc(110, testing::kInitialState, 2)).text();
  source.replace(source.find("t < kSteps"), 10, "t >= 0");
  ToolchainConfig quick = *tc;
  quick.timeout = std::chrono::seconds(2);
  // The endless loop also floods stdout; the cap keeps memory bounded.
  CHECK(toolchain_failure(source, quick) == ErrorCode::RunTimeout);
}

TEST_CASE("crashing and silent programs are reported") {
  const auto tc = testing::test_toolchain();
  if (!tc) return;
  CHECK(toolchain_failure("int main() { return 7; }\n", *tc) == ErrorCode::RunFailed);
  CHECK(toolchain_failure("int main() { return 0; }\n", *tc) == ErrorCode::OutputParseError);
}

TEST_CASE("a faulty generator is caught at the first diverging step") {
  const auto tc = testing::test_toolchain();
  if (!tc) return;
  const auto doc = ca_doc(110, testing::kInitialState, 30);
  auto open = doc;
  open.milieu.erase(0, 30);
  open.milieu.erase(30, 0);
  const auto faulty = [&](const amp::AmpDocument& d) {
    auto prog = codegen::generate_source(d);
    prog.milieu = codegen::milieu_block(open);
    return prog;
  };
  std::string ring = testing::kInitialState;
  std::string clamped = testing::kInitialState;
  std::size_t expected_step = 0;
  for (std::size_t k = 1; k <= 30 && expected_step == 0; ++k) {
    ring = testing::oracle_ca_step(ring, 110);
    clamped = testing::oracle_clamped_step(clamped, 110);
    if (ring != clamped) expected_step = k;
  }
  REQUIRE(expected_step > 0);
  const auto v = verify_equivalence(doc, *tc, faulty);
  CHECK_FALSE(v.equal);
  CHECK(v.step == expected_step);
  CHECK(v.expected == ring);
  CHECK(v.actual == clamped);
}

TEST_CASE("concurrent builds use separate work directories") {
  const auto tc = testing::test_toolchain();
  if (!tc) return;
  std::vector<std::future<bool>> jobs;
  for (unsigned rule : {30U, 90U, 110U, 184U}) {
    jobs.push_back(std::async(std::launch::async, [&, rule] {
      const auto doc = ca_doc(rule, testing::kInitialState, 10);
      return verify_equivalence(doc, *tc).equal;
    }));
  }
  for (auto& j : jobs) CHECK(j.get());
}

TEST_CASE("codegen-route search matches the interpreter route") {
  const auto tc = testing::test_toolchain();
  if (!tc) return;
  const auto problem = search::make_problem(ca::parse_state(testing::kInitialState),
                                            ca::parse_state(testing::kTargetState), 15);
  search::SearchOptions opts;
  opts.budget = 4;
  opts.seed = 31;
  const auto interp = search::random_rule_search(problem, opts);
  opts.route = search::Route::Codegen;
  opts.toolchain = *tc;
  const auto compiled = search::random_rule_search(problem, opts);
  CHECK(compiled == interp);
  CHECK(search::format_report(compiled) == search::format_report(interp));

  search::SearchOptions no_tc = opts;
  no_tc.toolchain = {};
  CHECK_THROWS_AS(search::random_rule_search(problem, no_tc), Error);
}

TEST_SUITE_END();
