#include "metasys/toolchain.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "metasys/error.hpp"

namespace metasys {

namespace fs = std::filesystem;

namespace {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out.push_back(c);
    }
  }
  out.push_back('\'');
  return out;
}

std::string expand(std::string command, const fs::path& src, const fs::path& bin,
                   const fs::path& dir) {
  const std::array<std::pair<std::string, std::string>, 3> subs{{
      {"{src}", shell_quote(src.string())},
      {"{bin}", shell_quote(bin.string())},
      {"{dir}", shell_quote(dir.string())},
  }};
  for (const auto& [key, value] : subs) {
    for (auto pos = command.find(key); pos != std::string::npos;
         pos = command.find(key, pos + value.size())) {
      command.replace(pos, key.size(), value);
    }
  }
  return command;
}

/// Unique work directory, removed on destruction unless kept.
class WorkDir {
 public:
  WorkDir(const fs::path& root, bool keep) : keep_(keep) {
    fs::create_directories(root);
    std::string tmpl = (root / "metasys-XXXXXX").string();
    if (::mkdtemp(tmpl.data()) == nullptr) {
      throw ToolchainError(ErrorCode::CompileFailed,
                           "cannot create a work directory under " + root.string(),
                           std::strerror(errno));
    }
    path_ = tmpl;
  }
  ~WorkDir() {
    if (!keep_) {
      std::error_code ec;
      fs::remove_all(path_, ec);
    }
  }
  WorkDir(const WorkDir&) = delete;
  WorkDir& operator=(const WorkDir&) = delete;

  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
  bool keep_;
};

void append_capped(std::string& sink, const char* data, std::size_t n, std::size_t cap) {
  if (sink.size() < cap) sink.append(data, std::min(n, cap - sink.size()));
}

std::string tail(const std::string& s, std::size_t n = 4000) {
  return s.size() <= n ? s : "..." + s.substr(s.size() - n);
}

}  // namespace

void validate(const ToolchainConfig& config) {
  if (!config.configured()) {
    throw Error(ErrorCode::NoBackendConfigured,
                std::string("no toolchain configured; pass a command template or set ") +
                    kToolchainEnv);
  }
  for (const char* key : {"{src}", "{bin}"}) {
    if (config.command.find(key) == std::string::npos) {
      throw Error(ErrorCode::BadDimensions,
                  std::string("toolchain command lacks the ") + key + " placeholder");
    }
  }
  if (config.timeout.count() <= 0) throw Error(ErrorCode::BadDimensions, "timeout must be positive");
}

std::string cxx_command(std::string_view compiler) {
  return std::string(compiler) + " -std=c++17 -O1 -o {bin} {src}";
}

std::optional<ToolchainConfig> toolchain_from_env() {
  const char* v = std::getenv(kToolchainEnv);
  if (v == nullptr || *v == '\0') return std::nullopt;
  ToolchainConfig c;
  c.command = v;
  return c;
}

ProcessResult run_process(const std::vector<std::string>& argv, const fs::path& cwd,
                          std::chrono::milliseconds timeout, std::size_t output_cap) {
  int out_pipe[2];
  int err_pipe[2];
  if (::pipe2(out_pipe, O_CLOEXEC) != 0 || ::pipe2(err_pipe, O_CLOEXEC) != 0) {
    throw std::runtime_error(std::string("pipe: ") + std::strerror(errno));
  }
  std::vector<char*> args;
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);
  const std::string dir = cwd.string();

  const pid_t pid = ::fork();
  if (pid < 0) throw std::runtime_error(std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    ::setpgid(0, 0);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::dup2(err_pipe[1], STDERR_FILENO);
    if (!dir.empty() && ::chdir(dir.c_str()) != 0) ::_exit(126);
    ::execvp(args[0], args.data());
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  ::close(out_pipe[1]);
  ::close(err_pipe[1]);

  ProcessResult result;
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  std::array<pollfd, 2> fds{{{out_pipe[0], POLLIN, 0}, {err_pipe[0], POLLIN, 0}}};
  std::array<std::string*, 2> sinks{&result.out, &result.err};
  int open = 2;
  char buf[65536];
  while (open > 0) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      result.timed_out = true;
      ::kill(-pid, SIGKILL);
      break;
    }
    const int ready = ::poll(fds.data(), fds.size(), static_cast<int>(left.count()));
    if (ready < 0 && errno != EINTR) break;
    for (std::size_t k = 0; k < fds.size(); ++k) {
      if (fds[k].fd < 0 || !(fds[k].revents & (POLLIN | POLLHUP | POLLERR))) continue;
      const ssize_t n = ::read(fds[k].fd, buf, sizeof buf);
      if (n > 0) {
        append_capped(*sinks[k], buf, static_cast<std::size_t>(n), output_cap);
      } else if (n == 0 || errno != EINTR) {
        ::close(fds[k].fd);
        fds[k].fd = -1;
        --open;
      }
    }
  }
  for (auto& f : fds) {
    if (f.fd >= 0) ::close(f.fd);
  }

  int status = 0;
  if (!result.timed_out) {
    // Output closed; the child may still be running with closed streams.
    while (true) {
      const pid_t r = ::waitpid(pid, &status, WNOHANG);
      if (r == pid) break;
      if (std::chrono::steady_clock::now() >= deadline) {
        result.timed_out = true;
        ::kill(-pid, SIGKILL);
        break;
      }
      ::usleep(1000);
    }
  }
  if (result.timed_out) {
    ::waitpid(pid, &status, 0);
    return result;
  }
  if (WIFEXITED(status)) {
    result.exit_code = WEXITSTATUS(status);
  } else if (WIFSIGNALED(status)) {
    result.signaled = true;
  }
  return result;
}

Trajectory parse_trajectory(std::string_view text) {
  Trajectory t;
  std::size_t pos = 0;
  std::size_t line = 0;
  while (pos < text.size()) {
    const auto end = text.find('\n', pos);
    if (end == std::string_view::npos) {
      throw Error(ErrorCode::OutputParseError, "output ends without a newline");
    }
    ++line;
    const std::string_view l = text.substr(pos, end - pos);
    const bool boolean = !l.empty() && l.find_first_not_of("01") == std::string_view::npos;
    try {
      t.snapshots.push_back(parse_state_line(l, boolean ? StateKind::Boolean : StateKind::Real));
    } catch (const Error& e) {
      throw Error(ErrorCode::OutputParseError,
                  "output line " + std::to_string(line) + ": " + e.what());
    }
    if (t.snapshots.size() > 1 && t.snapshots.back().size() != t.snapshots.front().size()) {
      throw Error(ErrorCode::OutputParseError,
                  "output line " + std::to_string(line) + " has a different entity count");
    }
    pos = end + 1;
  }
  if (t.snapshots.empty()) throw Error(ErrorCode::OutputParseError, "program printed nothing");
  return t;
}

Trajectory compile_and_run(std::string_view source, const ToolchainConfig& config) {
  validate(config);
  const WorkDir work(config.work_root, config.keep_work_dir);
  const fs::path src = work.path() / "model.cpp";
  const fs::path bin = work.path() / "model";
  {
    std::ofstream out(src, std::ios::binary);
    out << source;
    if (!out) {
      throw ToolchainError(ErrorCode::CompileFailed, "cannot write " + src.string(), "");
    }
  }
  const auto timeout = std::chrono::duration_cast<std::chrono::milliseconds>(config.timeout);

  const auto build = run_process({"/bin/sh", "-c", expand(config.command, src, bin, work.path())},
                                 work.path(), timeout);
  if (build.timed_out) {
    throw ToolchainError(ErrorCode::RunTimeout,
                         "build exceeded " + std::to_string(config.timeout.count()) + " s",
                         build.out + build.err);
  }
  if (build.exit_code != 0) {
    std::string diagnostics = build.err + build.out;
    const std::string hint = build.exit_code == 127 ? " (command not found?)" : "";
    const std::string message = "build failed with status " + std::to_string(build.exit_code) +
                                hint + ":\n" + tail(diagnostics);
    throw ToolchainError(ErrorCode::CompileFailed, message, std::move(diagnostics));
  }

  const auto exec = run_process({bin.string()}, work.path(), timeout);
  if (exec.timed_out) {
    throw ToolchainError(ErrorCode::RunTimeout,
                         "model program exceeded " + std::to_string(config.timeout.count()) + " s",
                         exec.err);
  }
  if (exec.signaled || exec.exit_code != 0) {
    throw ToolchainError(ErrorCode::RunFailed,
                         "model program failed" +
                             (exec.signaled ? std::string(" (signal)")
                                            : " with status " + std::to_string(exec.exit_code)) +
                             (exec.err.empty() ? "" : ":\n" + tail(exec.err)),
                         exec.err);
  }
  return parse_trajectory(exec.out);
}

EquivalenceVerdict compare_trajectories(const Trajectory& expected, const Trajectory& actual) {
  EquivalenceVerdict v;
  const std::size_t n = std::max(expected.size(), actual.size());
  for (std::size_t k = 0; k < n; ++k) {
    const std::string e = k < expected.size() ? format_state_line(expected.snapshots[k]) : "";
    const std::string a = k < actual.size() ? format_state_line(actual.snapshots[k]) : "";
    if (e != a) {
      v.equal = false;
      v.step = k;
      v.expected = e;
      v.actual = a;
      return v;
    }
  }
  return v;
}

EquivalenceVerdict verify_equivalence(const amp::AmpDocument& doc, const ToolchainConfig& config,
                                      const SourceGenerator& generator) {
  const Trajectory reference = amp::interpret(doc);
  const auto program = generator ? generator(doc) : codegen::generate_source(doc);
  const Trajectory compiled = compile_and_run(program.text(), config);
  return compare_trajectories(reference, compiled);
}

EquivalenceVerdict verify_equivalence(const MetastableSystem& system, std::size_t steps,
                                      const ToolchainConfig& config,
                                      const SourceGenerator& generator) {
  const Trajectory reference = run(system, steps);
  const auto doc = amp::emit(system, steps);
  const auto program = generator ? generator(doc) : codegen::generate_source(doc);
  return compare_trajectories(reference, compile_and_run(program.text(), config));
}

}  // namespace metasys
