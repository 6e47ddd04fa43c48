#include "metasys/amp.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "metasys/error.hpp"

namespace metasys::amp {

std::string_view to_string(ModelKind kind) { return kind == ModelKind::Ca ? "ca" : "ann"; }

namespace {

std::string table_bits(const RuleTable& table) {
  std::string bits;
  for (int b = 7; b >= 0; --b) bits.push_back(table.outputs[static_cast<std::size_t>(b)] ? '1' : '0');
  return bits;
}

EntityTuple quantized(const EntityTuple& t) {
  if (t.kind() == StateKind::Boolean) return t;
  std::vector<double> v(t.values().begin(), t.values().end());
  for (double& x : v) x = quantize_decimal(x);
  return EntityTuple(t.kind(), std::move(v));
}

[[noreturn]] void semantic(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::SemanticError, "line " + std::to_string(line) + ": " + what);
}

struct Line {
  std::size_t number;
  std::string_view text;
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const auto start = s.find_first_not_of(" \t", pos);
    if (start == std::string_view::npos) break;
    const auto end = std::min(s.find_first_of(" \t", start), s.size());
    out.push_back(s.substr(start, end - start));
    pos = end;
  }
  return out;
}

bool to_size(std::string_view s, std::size_t& out) {
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

class Reader {
 public:
  explicit Reader(std::string_view text) {
    std::size_t number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const auto end = std::min(text.find('\n', pos), text.size());
      std::string_view raw = text.substr(pos, end - pos);
      ++number;
      if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
      raw = trim(raw);
      if (!raw.empty()) lines_.push_back({number, raw});
      if (end == text.size()) break;
      pos = end + 1;
    }
  }

  bool done() const { return next_ >= lines_.size(); }
  std::size_t line() const { return done() ? 0 : lines_[next_].number; }

  bool peek(std::string_view keyword) const {
    if (done()) return false;
    const auto t = split(lines_[next_].text);
    return !t.empty() && t[0] == keyword;
  }

  /// Next line, which must start with `keyword`; returns the remaining tokens.
  std::vector<std::string_view> expect(std::string_view keyword) {
    if (done()) throw ParseError(0, "unexpected end of document, expected '" + std::string(keyword) + "'");
    auto tokens = split(lines_[next_].text);
    if (tokens.empty() || tokens[0] != keyword) {
      throw ParseError(line(), "expected '" + std::string(keyword) + "', found '" +
                                   std::string(tokens.empty() ? "" : tokens[0]) + "'");
    }
    rest_ = trim(lines_[next_].text.substr(keyword.size()));
    current_ = lines_[next_].number;
    ++next_;
    tokens.erase(tokens.begin());
    return tokens;
  }

  /// Text after the keyword of the line consumed last.
  std::string_view rest() const { return rest_; }
  std::size_t current() const { return current_; }

  std::string_view single(std::string_view keyword) {
    auto t = expect(keyword);
    if (t.size() != 1) throw ParseError(current_, "'" + std::string(keyword) + "' takes one value");
    return t[0];
  }

  std::size_t count(std::string_view keyword) {
    const auto v = single(keyword);
    std::size_t n = 0;
    if (!to_size(v, n)) throw ParseError(current_, "'" + std::string(v) + "' is not a count");
    return n;
  }

 private:
  std::vector<Line> lines_;
  std::size_t next_ = 0;
  std::string_view rest_;
  std::size_t current_ = 0;
};

EntityTuple parse_state_section(Reader& r, std::string_view keyword, StateKind kind,
                                std::size_t p) {
  r.expect(keyword);
  EntityTuple t;
  try {
    t = parse_state_line(r.rest(), kind);
  } catch (const Error& e) {
    throw ParseError(r.current(), std::string(keyword) + ": " + e.what());
  }
  if (t.size() != p) {
    semantic(r.current(), std::string(keyword) + " has " + std::to_string(t.size()) +
                              " entities, expected " + std::to_string(p));
  }
  return t;
}

/// "<i>:" -> i
std::size_t row_index(Reader& r, const std::vector<std::string_view>& t, std::string_view what) {
  std::size_t i = 0;
  if (t.empty() || t[0].size() < 2 || t[0].back() != ':' ||
      !to_size(t[0].substr(0, t[0].size() - 1), i)) {
    throw ParseError(r.current(), "expected '" + std::string(what) + " <index>:'");
  }
  return i;
}

}  // namespace

AmpDocument emit(const MetastableSystem& system, std::size_t steps,
                 const std::optional<EntityTuple>& target) {
  AmpDocument doc;
  doc.kind = system.is_rule_table() ? ModelKind::Ca : ModelKind::Ann;
  doc.entities = system.entities();
  doc.states = system.spec().states;
  doc.schedule = system.spec().schedule;
  doc.steps = steps;
  doc.init = quantized(system.current());
  if (target) {
    if (target->size() != doc.entities || target->kind() != doc.states) {
      throw Error(ErrorCode::DimensionMismatch, "target does not match the system's p and s");
    }
    doc.target = quantized(*target);
  }
  if (doc.kind == ModelKind::Ca) {
    doc.milieu = system.milieu();
    doc.update = system.phi();
  } else {
    const auto& src = system.milieu();
    doc.milieu = MilieuMatrix(MilieuKind::Weighted, doc.entities);
    for (std::size_t i = 0; i < doc.entities; ++i) {
      for (const MilieuEntry& e : src.row(i)) doc.milieu.set(i, e.source, quantize_decimal(e.weight));
    }
    PerceptronRule rule = std::get<PerceptronRule>(system.phi());
    for (double& b : rule.bias) b = quantize_decimal(b);
    doc.update = std::move(rule);
  }
  return doc;
}

std::string write(const AmpDocument& doc) {
  std::ostringstream out;
  out << "amp " << doc.version << '\n';
  out << "kind " << to_string(doc.kind) << '\n';
  out << "p " << doc.entities << '\n';
  out << "states " << to_string(doc.states) << '\n';
  out << "schedule " << to_string(doc.schedule) << '\n';
  const bool weighted = doc.milieu.kind() == MilieuKind::Weighted;
  out << "milieu " << (weighted ? "weighted" : "boolean") << '\n';
  for (std::size_t i = 0; i < doc.milieu.dimension(); ++i) {
    out << "row " << i << ':';
    for (const MilieuEntry& e : doc.milieu.row(i)) {
      out << ' ' << e.source;
      if (weighted) out << '=' << format_decimal(e.weight);
    }
    out << '\n';
  }
  if (const auto* table = std::get_if<RuleTable>(&doc.update)) {
    out << "update table " << table_bits(*table) << '\n';
  } else {
    const auto& rule = std::get<PerceptronRule>(doc.update);
    out << "update perceptron width " << rule.width << " strategy " << to_string(rule.strategy)
        << '\n';
    for (std::size_t k = 0; k < rule.bias.size(); ++k) {
      out << "bias " << rule.width + k << ": " << format_decimal(rule.bias[k]) << '\n';
    }
  }
  out << "init " << format_state_line(doc.init) << '\n';
  out << "steps " << doc.steps << '\n';
  if (doc.target) out << "target " << format_state_line(*doc.target) << '\n';
  return out.str();
}

AmpDocument parse(std::string_view text) {
  Reader r(text);
  AmpDocument doc;
  if (r.done()) throw ParseError(0, "empty document");

  if (r.single("amp") != "1") throw ParseError(r.current(), "unsupported AMP version");
  doc.version = kFormatVersion;

  const auto kind = r.single("kind");
  if (kind == "ca") {
    doc.kind = ModelKind::Ca;
  } else if (kind == "ann") {
    doc.kind = ModelKind::Ann;
  } else {
    throw ParseError(r.current(), "unknown model kind '" + std::string(kind) + "'");
  }

  doc.entities = r.count("p");
  if (doc.entities == 0) semantic(r.current(), "p must be at least 1");
  const std::size_t p = doc.entities;

  const auto states = r.single("states");
  if (states == "boolean") {
    doc.states = StateKind::Boolean;
  } else if (states == "real") {
    doc.states = StateKind::Real;
  } else {
    throw ParseError(r.current(), "unknown state set '" + std::string(states) + "'");
  }

  const auto schedule = r.single("schedule");
  if (schedule == "synchronous") {
    doc.schedule = Schedule::SynchronousAll;
  } else if (schedule == "layered") {
    doc.schedule = Schedule::LayeredSweep;
  } else {
    throw ParseError(r.current(), "unknown schedule '" + std::string(schedule) + "'");
  }

  const auto milieu = r.single("milieu");
  bool weighted = false;
  if (milieu == "weighted") {
    weighted = true;
  } else if (milieu != "boolean") {
    throw ParseError(r.current(), "unknown milieu kind '" + std::string(milieu) + "'");
  }
  doc.milieu = MilieuMatrix(weighted ? MilieuKind::Weighted : MilieuKind::Boolean, p);
  for (std::size_t i = 0; i < p; ++i) {
    const auto t = r.expect("row");
    if (row_index(r, t, "row") != i) {
      throw ParseError(r.current(), "expected row " + std::to_string(i));
    }
    for (std::size_t k = 1; k < t.size(); ++k) {
      std::string_view tok = t[k];
      double w = 1.0;
      if (weighted) {
        const auto eq = tok.find('=');
        if (eq == std::string_view::npos || !parse_decimal(tok.substr(eq + 1), w)) {
          throw ParseError(r.current(), "expected '<index>=<weight>', found '" + std::string(tok) + "'");
        }
        tok = tok.substr(0, eq);
      }
      std::size_t j = 0;
      if (!to_size(tok, j)) {
        throw ParseError(r.current(), "'" + std::string(tok) + "' is not an entity index");
      }
      if (j >= p) {
        semantic(r.current(), "entity " + std::to_string(j) + " out of range for p = " +
                                  std::to_string(p));
      }
      if (doc.milieu.contains(i, j)) semantic(r.current(), "duplicate milieu entry " + std::to_string(j));
      doc.milieu.set(i, j, w);
    }
  }

  const auto update = r.expect("update");
  if (!update.empty() && update[0] == "table") {
    if (update.size() != 2 || update[1].size() != 8 ||
        update[1].find_first_not_of("01") != std::string_view::npos) {
      throw ParseError(r.current(), "'update table' takes 8 bits");
    }
    RuleTable table;
    for (std::size_t b = 0; b < 8; ++b) table.outputs[7 - b] = update[1][b] == '1';
    doc.update = table;
  } else if (!update.empty() && update[0] == "perceptron") {
    PerceptronRule rule;
    if (update.size() != 5 || update[1] != "width" || update[3] != "strategy" ||
        !to_size(update[2], rule.width)) {
      throw ParseError(r.current(), "expected 'update perceptron width <w> strategy <name>'");
    }
    if (update[4] == "output-layer-only") {
      rule.strategy = TrainingStrategy::OutputLayerOnly;
    } else if (update[4] == "layerwise-targets") {
      rule.strategy = TrainingStrategy::LayerwiseTargets;
    } else {
      throw ParseError(r.current(), "unknown strategy '" + std::string(update[4]) + "'");
    }
    if (rule.width == 0 || rule.width >= p) {
      semantic(r.current(), "perceptron width must be in [1, p)");
    }
    for (std::size_t i = rule.width; i < p; ++i) {
      const auto t = r.expect("bias");
      if (row_index(r, t, "bias") != i) {
        throw ParseError(r.current(), "expected bias " + std::to_string(i));
      }
      double b = 0.0;
      if (t.size() != 2 || !parse_decimal(t[1], b)) {
        throw ParseError(r.current(), "malformed bias value");
      }
      rule.bias.push_back(b);
    }
    doc.update = std::move(rule);
  } else {
    throw ParseError(r.current(), "expected 'update table' or 'update perceptron'");
  }
  if ((doc.kind == ModelKind::Ca) != std::holds_alternative<RuleTable>(doc.update)) {
    semantic(r.current(), "kind " + std::string(to_string(doc.kind)) + " does not match the update");
  }

  doc.init = parse_state_section(r, "init", doc.states, p);
  doc.steps = r.count("steps");
  if (r.peek("target")) doc.target = parse_state_section(r, "target", doc.states, p);
  if (!r.done()) throw ParseError(r.line(), "unexpected content after the last section");
  return doc;
}

MetastableSystem to_system(const AmpDocument& doc) {
  SystemSpec spec;
  spec.states = doc.states;
  spec.entities = doc.entities;
  spec.schedule = doc.schedule;
  try {
    return modulate(spec, doc.update, doc.milieu, doc.init);
  } catch (const Error& e) {
    throw Error(ErrorCode::SemanticError, std::string("document is not runnable: ") + e.what());
  }
}

Trajectory interpret(const AmpDocument& doc) { return run(to_system(doc), doc.steps); }

AmpDocument read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(0, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void write_file(const std::string& path, const AmpDocument& doc) {
  std::ofstream out(path, std::ios::binary);
  out << write(doc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
}

}  // namespace metasys::amp
