#pragma once

// AMP: the line-oriented, self-contained text form of a model program.
//
//   # comment
//   amp 1
//   kind ca|ann
//   p <entities>
//   states boolean|real
//   schedule synchronous|layered
//   milieu boolean|weighted
//   row <i>: <j> <j> ...            (boolean; one line per entity, in order)
//   row <i>: <j>=<w> <j>=<w> ...    (weighted)
//   update table <b7..b0>           (ca: outputs for 111, 110, ..., 000)
//   update perceptron width <w> strategy output-layer-only|layerwise-targets
//   bias <i>: <value>               (ann: one per non-input entity, in order)
//   init <state line>
//   steps <T>
//   target <state line>             (optional, not used for execution)
//
// Sections appear in exactly this order. Weights, biases and real states use
// 9 decimal places.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "metasys/milieu.hpp"
#include "metasys/state.hpp"
#include "metasys/system.hpp"
#include "metasys/update_function.hpp"

namespace metasys::amp {

inline constexpr int kFormatVersion = 1;

enum class ModelKind { Ca, Ann };

std::string_view to_string(ModelKind kind);

struct AmpDocument {
  int version = kFormatVersion;
  ModelKind kind = ModelKind::Ca;
  std::size_t entities = 0;
  StateKind states = StateKind::Boolean;
  Schedule schedule = Schedule::SynchronousAll;
  MilieuMatrix milieu;
  UpdateFunction update;
  EntityTuple init;
  std::size_t steps = 0;
  std::optional<EntityTuple> target;

  friend bool operator==(const AmpDocument&, const AmpDocument&) = default;
};

/// Captures a system and run length as a document. Weights, biases and real
/// states are rounded to 9 decimals; values already on that grid are kept
/// exactly, which makes interpret(emit(S, T)) == run(S, T).
/// Throws DimensionMismatch for a target of the wrong length.
AmpDocument emit(const MetastableSystem& system, std::size_t steps,
                 const std::optional<EntityTuple>& target = std::nullopt);

std::string write(const AmpDocument& doc);

/// Throws ParseError (with line number) for malformed text and
/// Error(SemanticError) for well-formed text describing an invalid model.
AmpDocument parse(std::string_view text);

/// Throws SemanticError when the document does not describe a runnable system.
MetastableSystem to_system(const AmpDocument& doc);

/// run(to_system(doc), doc.steps).
Trajectory interpret(const AmpDocument& doc);

AmpDocument read_file(const std::string& path);
void write_file(const std::string& path, const AmpDocument& doc);

}  // namespace metasys::amp
