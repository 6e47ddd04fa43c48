#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "metasys/amp.hpp"
#include "metasys/codegen.hpp"
#include "metasys/system.hpp"

namespace metasys {

/// Environment variable holding the build command template.
inline constexpr const char* kToolchainEnv = "METASYS_TOOLCHAIN";

/// Host build command. `command` is run through /bin/sh with `{src}`,
/// `{bin}` and `{dir}` replaced by the (quoted) source path, binary path and
/// work directory; `{src}` and `{bin}` are required.
struct ToolchainConfig {
  std::string command;
  std::chrono::seconds timeout{60};
  std::filesystem::path work_root = std::filesystem::temp_directory_path();
  bool keep_work_dir = false;

  bool configured() const noexcept { return !command.empty(); }
};

/// Throws NoBackendConfigured for an empty command, BadDimensions for a
/// missing placeholder or a non-positive timeout.
void validate(const ToolchainConfig& config);

/// `<compiler> -std=c++17 -O1 -o {bin} {src}`
std::string cxx_command(std::string_view compiler);

/// Config from the environment, or nullopt when the variable is unset/empty.
std::optional<ToolchainConfig> toolchain_from_env();

struct ProcessResult {
  int exit_code = -1;     // valid when !timed_out and !signaled
  bool signaled = false;
  bool timed_out = false;
  std::string out;
  std::string err;
};

/// Runs argv[0] (PATH lookup) in `cwd`, capturing both streams. On timeout
/// the whole process group is killed. At most `output_cap` bytes of each
/// stream are kept; the rest is drained and dropped.
ProcessResult run_process(const std::vector<std::string>& argv,
                          const std::filesystem::path& cwd, std::chrono::milliseconds timeout,
                          std::size_t output_cap = std::size_t{64} << 20);

/// Parses program output as a trajectory (one state per line). Throws
/// OutputParseError.
Trajectory parse_trajectory(std::string_view text);

/// Writes `source` to a fresh work directory, builds it with the configured
/// command, runs the binary and parses its standard output.
/// Throws CompileFailed (with the build diagnostics), RunTimeout, RunFailed
/// or OutputParseError.
Trajectory compile_and_run(std::string_view source, const ToolchainConfig& config);

struct EquivalenceVerdict {
  bool equal = true;
  std::size_t step = 0;  // first differing step when !equal
  std::string expected;  // interpreter line at that step ("" past the end)
  std::string actual;    // compiled-program line at that step
};

using SourceGenerator = std::function<codegen::GeneratedProgram(const amp::AmpDocument&)>;

/// Compares two trajectories line by line.
EquivalenceVerdict compare_trajectories(const Trajectory& expected, const Trajectory& actual);

/// Runs the document through the interpreter and through generated,
/// compiled code, and compares the trajectories bit for bit.
EquivalenceVerdict verify_equivalence(const amp::AmpDocument& doc, const ToolchainConfig& config,
                                      const SourceGenerator& generator = {});

/// Same check with run(system, steps) as the reference route.
EquivalenceVerdict verify_equivalence(const MetastableSystem& system, std::size_t steps,
                                      const ToolchainConfig& config,
                                      const SourceGenerator& generator = {});

}  // namespace metasys
