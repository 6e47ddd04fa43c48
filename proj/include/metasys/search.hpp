#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "metasys/cellular_automaton.hpp"
#include "metasys/state.hpp"
#include "metasys/toolchain.hpp"

namespace metasys::search {

/// Known parameters of a CA rule search; the rule number is the unknown.
struct SearchProblem {
  EntityTuple initial;
  MilieuMatrix milieu;
  std::size_t steps = 0;
  EntityTuple target;
  double threshold = 1.0;
};

/// Ring-milieu problem. Throws DimensionMismatch when the tuples differ in
/// length and OutOfRange for a threshold outside (0, 1].
SearchProblem make_problem(const EntityTuple& initial, const EntityTuple& target,
                           std::size_t steps, double threshold = 1.0);

void validate(const SearchProblem& problem);

enum class Route {
  Interpreter,  // in-process run()
  Codegen,      // emit, generate source, compile and run
};

struct SearchOptions {
  std::size_t budget = 1000;
  std::uint64_t seed = 0;
  Route route = Route::Interpreter;
  ToolchainConfig toolchain;  // used by Route::Codegen
  /// Draw without replacement (a fresh permutation of the 256 rules per
  /// cycle). Off by default: plain random search has no memory.
  bool deduplicate = false;
  unsigned threads = 1;
};

struct AttemptRecord {
  std::size_t attempt = 0;  // 1-based
  unsigned rule = 0;
  double match = 0.0;

  friend bool operator==(const AttemptRecord&, const AttemptRecord&) = default;
};

struct SearchReport {
  std::uint64_t seed = 0;
  std::size_t attempts = 0;
  std::optional<unsigned> solution;
  unsigned best_rule = 0;
  double best_match = 0.0;
  std::vector<AttemptRecord> log;

  bool solved() const noexcept { return solution.has_value(); }

  friend bool operator==(const SearchReport&, const SearchReport&) = default;
};

/// Rule drawn at `attempt` (0-based) of a plain random search with `seed`.
unsigned draw_rule(std::uint64_t seed, std::size_t attempt);

/// Match of rule `rule` on `problem` via the interpreter.
double score_rule(const SearchProblem& problem, unsigned rule);

/// Generate-and-test over uniformly drawn rules: modulate, run, compare the
/// final state with the target; stop at the first attempt reaching the
/// threshold or when the budget is spent. Throws BadDimensions for a zero
/// budget.
SearchReport random_rule_search(const SearchProblem& problem, const SearchOptions& options);

/// All rules reaching the threshold, ascending.
std::vector<unsigned> exhaustive_rule_search(const SearchProblem& problem);

struct AttemptSummary {
  std::size_t runs = 0;
  std::size_t min_attempts = 0;
  double median_attempts = 0.0;
  std::size_t max_attempts = 0;
  double success_rate = 0.0;
};

/// Throws EmptyInput for an empty list.
AttemptSummary attempt_statistics(std::span<const SearchReport> reports);

/// Fraction of reports that found a solution within `max_attempts`.
double success_within(std::span<const SearchReport> reports, std::size_t max_attempts);

/// Line-oriented log: `attempt <k> rule <n> match <score>` per attempt, then
/// `solution <n> attempts <k>` or `exhausted best <n> match <score>`.
std::string format_report(const SearchReport& report);
std::string format_attempt(const AttemptRecord& record);
std::string format_outcome(const SearchReport& report);

}  // namespace metasys::search
