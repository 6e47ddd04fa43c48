#include "metasys/search.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <random>
#include <sstream>

#include "metasys/amp.hpp"
#include "metasys/codegen.hpp"
#include "metasys/error.hpp"
#include "metasys/parallel.hpp"
#include "metasys/random.hpp"

namespace metasys::search {

namespace {

MetastableSystem build(const SearchProblem& problem, unsigned rule) {
  SystemSpec spec;
  spec.states = StateKind::Boolean;
  spec.entities = problem.initial.size();
  spec.schedule = Schedule::SynchronousAll;
  spec.phi_known = false;
  return modulate(spec, ca::rule_table(ca::RuleNumber(rule)), problem.milieu, problem.initial);
}

double score_via_codegen(const SearchProblem& problem, unsigned rule,
                         const ToolchainConfig& toolchain) {
  const auto doc = amp::emit(build(problem, rule), problem.steps, problem.target);
  const auto trajectory = compile_and_run(codegen::generate_source(doc).text(), toolchain);
  if (trajectory.size() != problem.steps + 1) {
    throw Error(ErrorCode::OutputParseError,
                "model program printed " + std::to_string(trajectory.size()) + " states, expected " +
                    std::to_string(problem.steps + 1));
  }
  return match(trajectory.back(), problem.target);
}

/// Rule order for deduplicating search: a fresh permutation per 256 draws.
unsigned dedup_rule(std::uint64_t seed, std::size_t attempt) {
  const std::size_t cycle = attempt / ca::kRuleCount;
  auto engine = attempt_engine(seed ^ 0x5bd1e995ULL, cycle);
  std::array<unsigned, ca::kRuleCount> rules{};
  std::iota(rules.begin(), rules.end(), 0U);
  for (std::size_t i = rules.size() - 1; i > 0; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i);
    std::swap(rules[i], rules[pick(engine)]);
  }
  return rules[attempt % ca::kRuleCount];
}

}  // namespace

SearchProblem make_problem(const EntityTuple& initial, const EntityTuple& target,
                           std::size_t steps, double threshold) {
  SearchProblem p;
  p.initial = initial;
  p.target = target;
  p.steps = steps;
  p.threshold = threshold;
  p.milieu = ca::ring_milieu(initial.size());
  validate(p);
  return p;
}

void validate(const SearchProblem& problem) {
  if (problem.initial.kind() != StateKind::Boolean || problem.target.kind() != StateKind::Boolean) {
    throw Error(ErrorCode::StateDomainViolation, "rule search works on Boolean states");
  }
  if (problem.initial.size() != problem.target.size() ||
      problem.milieu.dimension() != problem.initial.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "initial state, target and milieu must agree on p (" +
                    std::to_string(problem.initial.size()) + ", " +
                    std::to_string(problem.target.size()) + ", " +
                    std::to_string(problem.milieu.dimension()) + ")");
  }
  if (!(problem.threshold > 0.0 && problem.threshold <= 1.0)) {
    throw Error(ErrorCode::OutOfRange, "match threshold must lie in (0, 1]");
  }
}

unsigned draw_rule(std::uint64_t seed, std::size_t attempt) {
  return static_cast<unsigned>(attempt_seed(seed, attempt) >> 56);
}

double score_rule(const SearchProblem& problem, unsigned rule) {
  MetastableSystem s = build(problem, rule);
  for (std::size_t k = 0; k < problem.steps; ++k) s = step(s);
  return match(s.current(), problem.target);
}

SearchReport random_rule_search(const SearchProblem& problem, const SearchOptions& options) {
  validate(problem);
  if (options.budget < 1) throw Error(ErrorCode::BadDimensions, "search budget must be >= 1");
  if (options.route == Route::Codegen) validate(options.toolchain);

  SearchReport report;
  report.seed = options.seed;
  report.log.reserve(std::min<std::size_t>(options.budget, 4096));
  const auto rule_at = [&](std::size_t k) {
    return options.deduplicate ? dedup_rule(options.seed, k) : draw_rule(options.seed, k);
  };
  const auto evaluate = [&](std::size_t k) {
    const unsigned rule = rule_at(k);
    const double m = options.route == Route::Interpreter
                         ? score_rule(problem, rule)
                         : score_via_codegen(problem, rule, options.toolchain);
    return AttemptRecord{k + 1, rule, m};
  };

  const std::size_t batch = options.threads <= 1 ? 1 : std::size_t{options.threads} * 8;
  std::size_t next = 0;
  while (next < options.budget) {
    const std::size_t count = std::min(batch, options.budget - next);
    const auto records = evaluate_batch<AttemptRecord>(next, count, options.threads, evaluate);
    for (const AttemptRecord& r : records) {
      report.log.push_back(r);
      report.attempts = r.attempt;
      if (report.log.size() == 1 || r.match > report.best_match) {
        report.best_match = r.match;
        report.best_rule = r.rule;
      }
      if (r.match >= problem.threshold) {
        report.solution = r.rule;
        return report;
      }
    }
    next += count;
  }
  return report;
}

std::vector<unsigned> exhaustive_rule_search(const SearchProblem& problem) {
  validate(problem);
  std::vector<unsigned> solutions;
  for (unsigned rule = 0; rule < ca::kRuleCount; ++rule) {
    if (score_rule(problem, rule) >= problem.threshold) solutions.push_back(rule);
  }
  return solutions;
}

AttemptSummary attempt_statistics(std::span<const SearchReport> reports) {
  if (reports.empty()) throw Error(ErrorCode::EmptyInput, "no search reports to summarize");
  std::vector<std::size_t> attempts;
  attempts.reserve(reports.size());
  std::size_t solved = 0;
  for (const auto& r : reports) {
    attempts.push_back(r.attempts);
    solved += r.solved();
  }
  std::sort(attempts.begin(), attempts.end());
  AttemptSummary s;
  s.runs = reports.size();
  s.min_attempts = attempts.front();
  s.max_attempts = attempts.back();
  const std::size_t mid = attempts.size() / 2;
  s.median_attempts = attempts.size() % 2 == 1
                          ? static_cast<double>(attempts[mid])
                          : (static_cast<double>(attempts[mid - 1]) + static_cast<double>(attempts[mid])) / 2.0;
  s.success_rate = static_cast<double>(solved) / static_cast<double>(reports.size());
  return s;
}

double success_within(std::span<const SearchReport> reports, std::size_t max_attempts) {
  if (reports.empty()) throw Error(ErrorCode::EmptyInput, "no search reports to summarize");
  std::size_t n = 0;
  for (const auto& r : reports) n += r.solved() && r.attempts <= max_attempts;
  return static_cast<double>(n) / static_cast<double>(reports.size());
}

std::string format_attempt(const AttemptRecord& record) {
  return "attempt " + std::to_string(record.attempt) + " rule " + std::to_string(record.rule) +
         " match " + format_decimal(record.match);
}

std::string format_outcome(const SearchReport& report) {
  if (report.solution) {
    return "solution " + std::to_string(*report.solution) + " attempts " +
           std::to_string(report.attempts);
  }
  return "exhausted best " + std::to_string(report.best_rule) + " match " +
         format_decimal(report.best_match);
}

std::string format_report(const SearchReport& report) {
  std::ostringstream out;
  for (const auto& r : report.log) out << format_attempt(r) << '\n';
  out << format_outcome(report) << '\n';
  return out.str();
}

}  // namespace metasys::search
