#pragma once

#include <string>
#include <string_view>

#include "metasys/amp.hpp"

namespace metasys::codegen {

/// Standalone C++ program text, kept as the four building blocks it is
/// concatenated from. Each block depends on one part of the document only:
///   structure  <- p, state set, init
///   milieu     <- milieu rows
///   update     <- update table / perceptron biases
///   main_loop  <- schedule, steps
/// The program prints the trajectory in the canonical line format and exits 0.
struct GeneratedProgram {
  std::string structure;
  std::string milieu;
  std::string update;
  std::string main_loop;

  std::string text() const { return structure + milieu + update + main_loop; }
};

inline constexpr std::string_view kDefaultBackend = "cxx";

/// Throws NoBackendConfigured for a backend other than "cxx".
GeneratedProgram generate_source(const amp::AmpDocument& doc,
                                 std::string_view backend = kDefaultBackend);

std::string structure_block(const amp::AmpDocument& doc);
std::string milieu_block(const amp::AmpDocument& doc);
std::string update_block(const amp::AmpDocument& doc);
std::string main_loop_block(const amp::AmpDocument& doc);

}  // namespace metasys::codegen
