#include "metasys/codegen.hpp"

#include <sstream>
#include <string>
#include <vector>

#include "metasys/cellular_automaton.hpp"
#include "metasys/error.hpp"

namespace metasys::codegen {

namespace {

template <class Range, class Format>
std::string join(const Range& values, Format format) {
  std::ostringstream out;
  std::size_t n = 0;
  for (const auto& v : values) {
    if (n != 0) out << (n % 16 == 0 ? ",\n    " : ", ");
    out << format(v);
    ++n;
  }
  return out.str();
}

std::string number(std::size_t v) { return std::to_string(v); }

}  // namespace

std::string structure_block(const amp::AmpDocument& doc) {
  std::ostringstream out;
  out << "// structure\n"
         "#include <cmath>\n"
         "#include <cstdio>\n"
         "#include <cstdlib>\n"
         "#include <cstring>\n"
         "\n"
         "static const int kEntities = "
      << doc.entities << ";\n"
      << "static const bool kBooleanStates = " << (doc.states == StateKind::Boolean ? "true" : "false")
      << ";\n"
      << "static double state[kEntities] = {\n    "
      << join(doc.init.values(),
              [&](double v) {
                return doc.states == StateKind::Boolean ? std::string(v != 0.0 ? "1" : "0")
                                                        : format_decimal(v);
              })
      << "};\n\n";
  return out.str();
}

std::string milieu_block(const amp::AmpDocument& doc) {
  std::ostringstream out;
  out << "// milieu\n";
  if (doc.kind == amp::ModelKind::Ca) {
    std::vector<Neighbourhood> n;
    try {
      n = ca::resolve_neighbourhoods(doc.milieu);
    } catch (const Error& e) {
      throw Error(ErrorCode::SemanticError, std::string("milieu cannot feed a rule table: ") + e.what());
    }
    std::vector<std::size_t> left, center, right;
    for (const auto& x : n) {
      left.push_back(x.left);
      center.push_back(x.center);
      right.push_back(x.right);
    }
    out << "static const int kLeft[kEntities] = {\n    " << join(left, number) << "};\n"
        << "static const int kCenter[kEntities] = {\n    " << join(center, number) << "};\n"
        << "static const int kRight[kEntities] = {\n    " << join(right, number) << "};\n\n";
    return out.str();
  }
  // Compressed rows, each with a trailing sentinel so no array is empty.
  std::vector<std::size_t> starts{0};
  std::vector<std::size_t> sources;
  std::vector<double> weights;
  for (std::size_t i = 0; i < doc.milieu.dimension(); ++i) {
    for (const MilieuEntry& e : doc.milieu.row(i)) {
      sources.push_back(e.source);
      weights.push_back(e.weight);
    }
    starts.push_back(sources.size());
  }
  sources.push_back(0);
  weights.push_back(0.0);
  out << "static const int kRowStart[kEntities + 1] = {\n    " << join(starts, number) << "};\n"
      << "static const int kSource[] = {\n    " << join(sources, number) << "};\n"
      << "static const double kWeight[] = {\n    "
      << join(weights, [](double w) { return format_decimal(w); }) << "};\n\n";
  return out.str();
}

std::string update_block(const amp::AmpDocument& doc) {
  std::ostringstream out;
  out << "// update function\n";
  if (const auto* table = std::get_if<RuleTable>(&doc.update)) {
    out << "// kTable[4 * left + 2 * center + right]\n"
        << "static const unsigned char kTable[8] = {"
        << join(table->outputs, [](std::uint8_t b) { return std::to_string(b); }) << "};\n"
        << "static const int kFirstUpdated = 0;\n"
           "static const int kLayerWidth = kEntities;\n"
           "\n"
           "static double update(int i, const double* s) {\n"
           "  const int l = s[kLeft[i]] != 0.0;\n"
           "  const int c = s[kCenter[i]] != 0.0;\n"
           "  const int r = s[kRight[i]] != 0.0;\n"
           "  return kTable[4 * l + 2 * c + r];\n"
           "}\n\n";
    return out.str();
  }
  const auto& rule = std::get<PerceptronRule>(doc.update);
  out << "static const int kWidth = " << rule.width << ";\n"
      << "static const double kBias[kEntities - kWidth] = {\n    "
      << join(rule.bias, [](double b) { return format_decimal(b); }) << "};\n"
      << "static const int kFirstUpdated = kWidth;\n"
         "static const int kLayerWidth = kWidth;\n"
         "\n"
         "static double update(int i, const double* s) {\n"
         "  double in = kBias[i - kWidth];\n"
         "  for (int k = kRowStart[i]; k < kRowStart[i + 1]; ++k) in += kWeight[k] * s[kSource[k]];\n"
         "  if (!std::isfinite(in)) {\n"
         "    std::fprintf(stderr, \"entity %d: non-finite input\\n\", i);\n"
         "    std::exit(4);\n"
         "  }\n"
         "  return in >= 0.5 ? 1.0 : 0.0;\n"
         "}\n\n";
  return out.str();
}

std::string main_loop_block(const amp::AmpDocument& doc) {
  std::ostringstream out;
  out << "// main loop\n"
      << "static const long kSteps = " << doc.steps << ";\n"
      << "\n"
         "static void print_state(const double* s) {\n"
         "  if (kBooleanStates) {\n"
         "    static char line[kEntities + 1];\n"
         "    for (int i = 0; i < kEntities; ++i) line[i] = s[i] != 0.0 ? '1' : '0';\n"
         "    line[kEntities] = '\\n';\n"
         "    std::fwrite(line, 1, sizeof line, stdout);\n"
         "    return;\n"
         "  }\n"
         "  for (int i = 0; i < kEntities; ++i) std::printf(i ? \" %.9f\" : \"%.9f\", s[i]);\n"
         "  std::putchar('\\n');\n"
         "}\n"
         "\n"
         "int main() {\n"
         "  static double next[kEntities];\n"
         "  print_state(state);\n"
         "  for (long t = 0; t < kSteps; ++t) {\n";
  if (doc.schedule == Schedule::LayeredSweep) {
    out << "    const int layer = static_cast<int>(t % (kEntities / kLayerWidth - 1)) + 1;\n"
           "    const int lo = layer * kLayerWidth;\n"
           "    const int hi = lo + kLayerWidth;\n";
  } else {
    out << "    const int lo = kFirstUpdated;\n"
           "    const int hi = kEntities;\n";
  }
  out << "    std::memcpy(next, state, sizeof state);\n"
         "    for (int i = lo; i < hi; ++i) next[i] = update(i, state);\n"
         "    std::memcpy(state, next, sizeof state);\n"
         "    print_state(state);\n"
         "  }\n"
         "  return std::fflush(stdout) == 0 ? 0 : 1;\n"
         "}\n";
  return out.str();
}

GeneratedProgram generate_source(const amp::AmpDocument& doc, std::string_view backend) {
  if (backend != kDefaultBackend) {
    throw Error(ErrorCode::NoBackendConfigured,
                "no code generator for backend '" + std::string(backend) + "' (available: cxx)");
  }
  return GeneratedProgram{structure_block(doc), milieu_block(doc), update_block(doc),
                          main_loop_block(doc)};
}

}  // namespace metasys::codegen
