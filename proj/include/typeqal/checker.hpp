#pragma once

// TypeCheck: apply predicted stubs beside their modules, run an external
// checker, and count diagnostics whose code is whitelisted.

#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <filesystem>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "typeqal/errors.hpp"
#include "typeqal/harvest.hpp"
#include "typeqal/stripper.hpp"

namespace typeqal {

inline constexpr std::string_view kDefaultCheckerCommand =
    "mypy --show-error-codes --no-color-output --no-pretty --no-error-summary {tree}";

inline const std::set<std::string>& default_whitelist() {
  static const std::set<std::string> codes = {"attr-defined", "assignment", "arg-type", "union-attr", "index"};
  return codes;
}

struct Diagnostic {
  std::string path;
  std::size_t line = 0;
  std::string severity;
  std::string message;
  std::string code;
};

struct CheckerConfig {
  std::string command = std::string(kDefaultCheckerCommand);
  std::set<std::string> whitelist = default_whitelist();
  std::chrono::milliseconds timeout = std::chrono::minutes(15);
};

struct CheckReport {
  std::vector<Diagnostic> diagnostics;
  std::vector<std::string> unparsed;  ///< output lines not matching the diagnostic format
  std::size_t counted = 0;
  int exit_status = 0;
  bool timed_out = false;  ///< result is N/A
  std::string command;
  double duration_seconds = 0.0;
};

struct ApplyResult {
  std::size_t applied = 0;
  std::vector<Warning> warnings;
};

/// Copies repo into out and places every stub from `stubs` beside its
/// module. Stubs without a matching `.py` are skipped with a warning.
inline ApplyResult apply_stubs(const std::filesystem::path& repo, const std::filesystem::path& stubs,
                               const std::filesystem::path& out) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(repo)) throw IoError("not a directory: " + repo.string());
  if (!fs::is_directory(stubs)) throw IoError("not a directory: " + stubs.string());
  ApplyResult result;
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw IoError("cannot create " + out.string() + ": " + ec.message());
  fs::copy(repo, out, fs::copy_options::recursive | fs::copy_options::overwrite_existing, ec);
  if (ec) throw IoError("cannot copy " + repo.string() + ": " + ec.message());
  for (const auto& rel : list_files(stubs)) {
    fs::path stub(rel);
    if (stub.extension() != ".pyi") continue;
    fs::path module = stub;
    module.replace_extension(".py");
    if (!fs::exists(repo / module)) {
      result.warnings.push_back({rel, "no matching module in repository; stub not applied"});
      continue;
    }
    if (fs::exists(out / stub)) result.warnings.push_back({rel, "repository already has this stub; overwritten"});
    fs::copy_file(stubs / stub, out / stub, fs::copy_options::overwrite_existing, ec);
    if (ec) throw IoError("cannot copy " + (stubs / stub).string() + ": " + ec.message());
    ++result.applied;
  }
  return result;
}

inline std::size_t count_whitelisted(const std::vector<Diagnostic>& diags, const std::set<std::string>& whitelist) {
  std::size_t n = 0;
  for (const auto& d : diags) n += whitelist.contains(d.code) ? 1 : 0;
  return n;
}

/// Parses `path:line: error: message [code]` lines. Paths under `tree` are
/// made relative to it.
inline CheckReport parse_checker_output(std::string_view output, const std::set<std::string>& whitelist,
                                        const std::filesystem::path& tree = {}) {
  static const std::regex kLine(R"(^(.+?):(\d+): error: (.*) \[([a-z0-9-]+)\]$)");
  const std::string prefix = tree.empty() ? "" : (std::filesystem::absolute(tree).lexically_normal().generic_string() + "/");
  CheckReport report;
  std::size_t pos = 0;
  while (pos < output.size()) {
    std::size_t nl = output.find('\n', pos);
    if (nl == std::string_view::npos) nl = output.size();
    std::string line(output.substr(pos, nl - pos));
    pos = nl + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::smatch m;
    if (std::regex_match(line, m, kLine)) {
      Diagnostic d;
      d.path = m[1].str();
      if (!prefix.empty() && d.path.starts_with(prefix)) d.path.erase(0, prefix.size());
      d.line = std::stoul(m[2].str());
      d.severity = "error";
      d.message = m[3].str();
      d.code = m[4].str();
      report.diagnostics.push_back(std::move(d));
    } else {
      report.unparsed.push_back(std::move(line));
    }
  }
  report.counted = count_whitelisted(report.diagnostics, whitelist);
  return report;
}

inline std::string shell_quote(std::string_view s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

inline std::string expand_command(std::string_view templ, const std::filesystem::path& tree) {
  const std::string quoted = shell_quote(std::filesystem::absolute(tree).lexically_normal().string());
  std::string out(templ);
  for (std::size_t at = out.find("{tree}"); at != std::string::npos; at = out.find("{tree}", at + quoted.size())) {
    out.replace(at, 6, quoted);
  }
  return out;
}

namespace detail {

struct ProcessResult {
  std::string output;
  int exit_status = 0;
  bool timed_out = false;
};

// Runs `sh -c command` in cwd with stdout and stderr merged. On timeout the
// whole process group is killed.
inline ProcessResult run_shell(const std::string& command, const std::filesystem::path& cwd,
                               std::chrono::milliseconds timeout) {
  int fds[2];
  if (pipe(fds) != 0) throw IoError("pipe failed");
  const pid_t pid = fork();
  if (pid < 0) {
    close(fds[0]);
    close(fds[1]);
    throw IoError("fork failed");
  }
  if (pid == 0) {
    setpgid(0, 0);
    dup2(fds[1], STDOUT_FILENO);
    dup2(fds[1], STDERR_FILENO);
    close(fds[0]);
    close(fds[1]);
    if (chdir(cwd.c_str()) != 0) _exit(126);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  setpgid(pid, pid);
  close(fds[1]);
  ProcessResult r;
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  char buf[4096];
  while (true) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      r.timed_out = true;
      kill(-pid, SIGKILL);
      break;
    }
    pollfd p{fds[0], POLLIN, 0};
    const int ready = poll(&p, 1, static_cast<int>(std::min<long long>(left.count(), 1000)));
    if (ready < 0 && errno != EINTR) break;
    if (ready <= 0) continue;
    const ssize_t n = read(fds[0], buf, sizeof buf);
    if (n <= 0) break;
    r.output.append(buf, static_cast<std::size_t>(n));
  }
  close(fds[0]);
  int status = 0;
  waitpid(pid, &status, 0);
  if (!r.timed_out) {
    // Reap anything the checker left running in its group.
    kill(-pid, SIGKILL);
  }
  r.exit_status = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
  return r;
}

}  // namespace detail

/// Throws CheckerNotFound when the shell cannot run the command (exit 126 or
/// 127) and CheckerCrashed when it exits nonzero without any parseable
/// diagnostic. A timeout yields a report with timed_out set.
inline CheckReport run_typecheck(const std::filesystem::path& tree, const CheckerConfig& config = {}) {
  if (!std::filesystem::is_directory(tree)) throw IoError("not a directory: " + tree.string());
  const std::string command = expand_command(config.command, tree);
  const auto start = std::chrono::steady_clock::now();
  const auto proc = detail::run_shell(command, tree, config.timeout);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CheckReport report;
  if (!proc.timed_out) {
    if (proc.exit_status == 126 || proc.exit_status == 127) {
      throw CheckerNotFound("checker not runnable: " + command + "\n" + proc.output);
    }
    report = parse_checker_output(proc.output, config.whitelist, tree);
    if (proc.exit_status != 0 && report.diagnostics.empty()) {
      throw CheckerCrashed("checker exited with status " + std::to_string(proc.exit_status) +
                               " without parseable diagnostics",
                           proc.output);
    }
  }
  report.timed_out = proc.timed_out;
  report.exit_status = proc.exit_status;
  report.command = command;
  report.duration_seconds = seconds;
  return report;
}

inline nlohmann::json check_report_json(const CheckReport& r, const std::set<std::string>& whitelist) {
  nlohmann::json j;
  j["status"] = r.timed_out ? "N/A" : "ok";
  j["counted"] = r.timed_out ? nlohmann::json(nullptr) : nlohmann::json(r.counted);
  j["exit_status"] = r.exit_status;
  j["command"] = r.command;
  j["duration_seconds"] = r.duration_seconds;
  j["whitelist"] = whitelist;
  j["diagnostics"] = nlohmann::json::array();
  for (const auto& d : r.diagnostics) {
    j["diagnostics"].push_back({{"path", d.path},
                                {"line", d.line},
                                {"severity", d.severity},
                                {"message", d.message},
                                {"code", d.code},
                                {"counted", whitelist.contains(d.code)}});
  }
  j["unparsed"] = r.unparsed;
  return j;
}

}  // namespace typeqal
