#include "t2m/harness.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/stat.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cerrno>
#include <chrono>
#include <cctype>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

namespace t2m::harness {

namespace fs = std::filesystem;

std::string_view to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "Optimal";
    case Status::Satisfied: return "Satisfied";
    case Status::Unsatisfiable: return "Unsatisfiable";
    case Status::CompileError: return "CompileError";
    case Status::RuntimeError: return "RuntimeError";
    case Status::Timeout: return "Timeout";
    case Status::Unknown: return "Unknown";
  }
  return "Unknown";
}

std::string_view to_string(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::SyntaxError: return "SyntaxError";
    case ErrorCategory::UndefinedIdentifier: return "UndefinedIdentifier";
    case ErrorCategory::ArrayIndexing: return "ArrayIndexing";
    case ErrorCategory::FunctionNotFound: return "FunctionNotFound";
    case ErrorCategory::VariableRedefinition: return "VariableRedefinition";
    case ErrorCategory::FlatteningError: return "FlatteningError";
    case ErrorCategory::TimeoutError: return "TimeoutError";
    case ErrorCategory::SolverLimitation: return "SolverLimitation";
    case ErrorCategory::MissingData: return "MissingData";
    case ErrorCategory::Unclassified: return "Unclassified";
  }
  return "Unclassified";
}

std::optional<Status> parse_status(std::string_view text) {
  for (auto s : {Status::Optimal, Status::Satisfied, Status::Unsatisfiable, Status::CompileError, Status::RuntimeError,
                 Status::Timeout, Status::Unknown}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

std::optional<ErrorCategory> parse_category(std::string_view text) {
  for (int i = 0; i <= static_cast<int>(ErrorCategory::Unclassified); ++i) {
    if (to_string(static_cast<ErrorCategory>(i)) == text) return static_cast<ErrorCategory>(i);
  }
  return std::nullopt;
}

corpus::Json result_to_json(const SolveResult& r) {
  corpus::Json j;
  j["status"] = std::string(to_string(r.status));
  j["objective_value"] = r.objective_value ? corpus::Json(*r.objective_value) : corpus::Json(nullptr);
  j["assignments"] = corpus::Json::object();
  for (const auto& [name, value] : r.assignments) j["assignments"][name] = corpus::value_to_json(value);
  if (r.error) j["error"] = {{"category", std::string(to_string(r.error->category))}, {"message", r.error->raw}};
  else j["error"] = nullptr;
  j["executed"] = r.executed();
  j["wall_seconds"] = r.wall_seconds;
  return j;
}

bool SolveResult::executed() const {
  switch (status) {
    case Status::Optimal:
    case Status::Satisfied:
    case Status::Unsatisfiable: return true;
    case Status::Unknown: return output_parse_failed;
    default: return false;
  }
}

namespace {

struct Pattern {
  ErrorCategory category;
  std::regex re;
};

const std::vector<Pattern>& patterns() {
  static const std::vector<Pattern> table = [] {
    const auto icase = std::regex::ECMAScript | std::regex::icase | std::regex::optimize;
    std::vector<Pattern> t;
    auto add = [&](ErrorCategory c, const char* re) { t.push_back({c, std::regex(re, icase)}); };
    add(ErrorCategory::SyntaxError, R"(syntax error|unexpected end of file|unterminated)");
    add(ErrorCategory::MissingData, R"(must be defined|forget to specify a data file|has no value|no value for)");
    add(ErrorCategory::UndefinedIdentifier, R"(undefined identifier|identifier .* not defined|undeclared identifier)");
    add(ErrorCategory::FunctionNotFound, R"(no function or predicate|function .* not found|predicate .* not found)");
    add(ErrorCategory::VariableRedefinition, R"(multiple assignment|already defined|redefinition|multiple definition)");
    add(ErrorCategory::ArrayIndexing,
        R"(invalid type-inst: expected .array|array index|index out of (range|bounds)|index set|array access|array dimension|array\[int(,int)*\] of .* actual|index_set)");
    add(ErrorCategory::FlatteningError, R"(flattening error|unbounded coefficient|cannot be flattened)");
    add(ErrorCategory::SolverLimitation,
        R"(unable to create linear formulation|not supported by|unsupported|cannot handle|no solver|solver .* does not support|float .* not supported)");
    add(ErrorCategory::TimeoutError, R"(time ?limit|timed out|timeout)");
    return t;
  }();
  return table;
}

bool starts_with(std::string_view s, std::string_view p) { return s.substr(0, p.size()) == p; }

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    pos = nl + 1;
  }
  return out;
}

}  // namespace

ErrorCategory classify_error(std::string_view text) {
  const std::string s(text);
  for (const auto& p : patterns()) {
    if (std::regex_search(s, p.re)) return p.category;
  }
  return ErrorCategory::Unclassified;
}

bool is_compile_phase(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::SyntaxError:
    case ErrorCategory::UndefinedIdentifier:
    case ErrorCategory::ArrayIndexing:
    case ErrorCategory::FunctionNotFound:
    case ErrorCategory::VariableRedefinition:
    case ErrorCategory::FlatteningError:
    case ErrorCategory::MissingData: return true;
    default: return false;
  }
}

ParsedSolution parse_solution(std::string_view stdout_text, corpus::Objective objective) {
  ParsedSolution out;
  std::string block, last_block;
  for (std::string_view line : lines_of(stdout_text)) {
    if (line == "----------") {
      out.has_solution = true;
      last_block = std::move(block);
      block.clear();
    } else if (line == "==========") {
      out.optimal = true;
    } else if (line == "=====UNSATISFIABLE=====") {
      out.unsatisfiable = true;
    } else if (line == "=====UNKNOWN=====") {
      out.unknown = true;
    } else if (starts_with(line, "=====") && line.size() > 10 && line.substr(line.size() - 5) == "=====") {
      // ERROR, UNBOUNDED, UNSATorUNBOUNDED
      if (line.find("UNSAT") != std::string_view::npos) out.unsatisfiable = true;
      else out.error = true;
    } else {
      block.append(line);
      block.push_back('\n');
    }
  }
  if (!out.has_solution) return out;

  dzn::Bindings parsed;
  try {
    parsed = dzn::parse(last_block);
  } catch (const std::exception& e) {
    throw OutputParseError(std::string("solution block is not DZN: ") + e.what(), last_block);
  }
  for (const auto& [name, value] : parsed) {
    if (name == "_objective") {
      if (value.is_int() || value.is_float()) out.objective_value = value.as_number();
      else throw OutputParseError("_objective is not a number", last_block);
      continue;
    }
    out.assignments.add(name, value);
  }
  if (!corpus::is_optimization(objective)) out.objective_value.reset();
  return out;
}

// ---------------------------------------------------------------------------
// Process execution.

namespace {

struct ProcessOutcome {
  std::string out;
  std::string err;
  int exit_code = -1;
  bool killed = false;
  bool spawn_failed = false;
  double seconds = 0.0;
};

void set_nonblocking(int fd) { fcntl(fd, F_SETFL, fcntl(fd, F_GETFL) | O_NONBLOCK); }

ProcessOutcome run_process(const std::vector<std::string>& argv, double hard_limit_seconds) {
  ProcessOutcome r;
  int out_pipe[2], err_pipe[2], exec_pipe[2];
  if (pipe(out_pipe) != 0 || pipe(err_pipe) != 0 || pipe(exec_pipe) != 0) {
    r.spawn_failed = true;
    r.err = std::string("pipe: ") + std::strerror(errno);
    return r;
  }
  fcntl(exec_pipe[1], F_SETFD, FD_CLOEXEC);

  std::vector<char*> args;
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);

  const auto started = std::chrono::steady_clock::now();
  const pid_t pid = fork();
  if (pid < 0) {
    r.spawn_failed = true;
    r.err = std::string("fork: ") + std::strerror(errno);
    return r;
  }
  if (pid == 0) {
    setpgid(0, 0);
    dup2(out_pipe[1], STDOUT_FILENO);
    dup2(err_pipe[1], STDERR_FILENO);
    int devnull = open("/dev/null", O_RDONLY);
    if (devnull >= 0) dup2(devnull, STDIN_FILENO);
    close(out_pipe[0]);
    close(err_pipe[0]);
    close(exec_pipe[0]);
    execvp(args[0], args.data());
    const int e = errno;
    (void)!write(exec_pipe[1], &e, sizeof e);
    _exit(127);
  }
  setpgid(pid, pid);
  close(out_pipe[1]);
  close(err_pipe[1]);
  close(exec_pipe[1]);

  int exec_errno = 0;
  if (read(exec_pipe[0], &exec_errno, sizeof exec_errno) == sizeof exec_errno) {
    r.spawn_failed = true;
    r.err = argv[0] + ": " + std::strerror(exec_errno);
  }
  close(exec_pipe[0]);

  set_nonblocking(out_pipe[0]);
  set_nonblocking(err_pipe[0]);
  const auto deadline = started + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                      std::chrono::duration<double>(hard_limit_seconds));
  std::array<pollfd, 2> fds{{{out_pipe[0], POLLIN, 0}, {err_pipe[0], POLLIN, 0}}};
  int open_fds = 2;
  std::array<char, 65536> buf;
  while (open_fds > 0) {
    const auto now = std::chrono::steady_clock::now();
    if (now >= deadline && !r.killed) {
      kill(-pid, SIGKILL);
      kill(pid, SIGKILL);
      r.killed = true;
    }
    const int wait_ms = r.killed ? 200
                                 : static_cast<int>(std::max<long long>(
                                       1, std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count()));
    const int n = poll(fds.data(), fds.size(), std::min(wait_ms, 1000));
    if (n < 0 && errno != EINTR) break;
    if (n == 0 && r.killed) break;  // killed and the pipes stay silent: stop waiting
    for (std::size_t i = 0; i < fds.size(); ++i) {
      if (fds[i].fd < 0 || !(fds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
      const ssize_t got = read(fds[i].fd, buf.data(), buf.size());
      if (got > 0) {
        (i == 0 ? r.out : r.err).append(buf.data(), static_cast<std::size_t>(got));
      } else if (got == 0 || (errno != EAGAIN && errno != EINTR)) {
        close(fds[i].fd);
        fds[i].fd = -1;
        --open_fds;
      }
    }
  }
  for (auto& f : fds) {
    if (f.fd >= 0) close(f.fd);
  }
  int status = 0;
  if (r.killed) kill(-pid, SIGKILL);
  waitpid(pid, &status, 0);
  if (WIFEXITED(status)) r.exit_code = WEXITSTATUS(status);
  else if (WIFSIGNALED(status)) r.exit_code = 128 + WTERMSIG(status);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return r;
}

class ScratchDir {
 public:
  ScratchDir() {
    std::string tmpl = (fs::temp_directory_path() / "t2m-solve-XXXXXX").string();
    if (!mkdtemp(tmpl.data())) throw Error("IoError", std::string("mkdtemp: ") + std::strerror(errno));
    path_ = tmpl;
  }
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

void write_file(const fs::path& p, std::string_view text) {
  std::ofstream out(p, std::ios::binary);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

bool is_executable(const fs::path& p) { return access(p.c_str(), X_OK) == 0 && fs::is_regular_file(p); }

// Scratch paths reduced to bare file names, so equal inputs give equal text.
std::string strip_scratch(std::string text, const fs::path& scratch) {
  const std::string prefix = scratch.string() + "/";
  for (std::size_t at; (at = text.find(prefix)) != std::string::npos;) text.erase(at, prefix.size());
  static const std::regex wasm_prefix(R"(/minizinc/in[0-9]+_)");
  return std::regex_replace(text, wasm_prefix, "");
}

std::string error_text(const std::string& err, const std::string& out) {
  std::string text = err.empty() ? out : err;
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.pop_back();
  return text;
}

}  // namespace

MiniZincToolchain::MiniZincToolchain(std::string executable, int max_parallel)
    : executable_(std::move(executable)), max_parallel_(std::max(1, max_parallel)) {
  if (executable_.empty()) throw ToolchainMissing("no MiniZinc executable configured");
  if (executable_.find('/') != std::string::npos ? !is_executable(executable_) : false) {
    throw ToolchainMissing("MiniZinc executable not found: " + executable_);
  }
}

std::optional<std::string> MiniZincToolchain::locate() {
  if (const char* env = std::getenv("T2M_MINIZINC"); env && *env) {
    if (is_executable(env)) return std::string(env);
    return std::nullopt;
  }
  const char* path = std::getenv("PATH");
  if (!path) return std::nullopt;
  std::stringstream ss(path);
  std::string dir;
  while (std::getline(ss, dir, ':')) {
    if (dir.empty()) continue;
    const fs::path candidate = fs::path(dir) / "minizinc";
    if (is_executable(candidate)) return candidate.string();
  }
  return std::nullopt;
}

std::string MiniZincToolchain::identity() const { return "minizinc:" + executable_; }

std::string MiniZincToolchain::version() {
  std::lock_guard lock(mu_);
  if (version_.empty()) {
    const ProcessOutcome p = run_process({executable_, "--version"}, 60);
    if (p.spawn_failed) throw ToolchainMissing(p.err);
    version_ = p.out.substr(0, p.out.find('\n'));
  }
  return version_;
}

SolveResult MiniZincToolchain::solve(std::string_view model_text, std::string_view data_text, const SolverConfig& config) {
  if (!(config.time_limit_seconds > 0)) throw Error("InvalidConfig", "time limit must be positive");
  {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return running_ < max_parallel_; });
    ++running_;
  }
  struct Release {
    MiniZincToolchain* self;
    ~Release() {
      {
        std::lock_guard lock(self->mu_);
        --self->running_;
      }
      self->cv_.notify_one();
    }
  } release{this};

  ScratchDir dir;
  const fs::path model_path = dir.path() / "model.mzn";
  write_file(model_path, model_text);
  const auto limit_ms = static_cast<long long>(config.time_limit_seconds * 1000.0 + 0.5);
  std::vector<std::string> argv = {executable_,  "--solver",      config.solver, "--time-limit", std::to_string(limit_ms),
                                   "--output-mode", "dzn", "--output-objective"};
  argv.insert(argv.end(), config.extra_flags.begin(), config.extra_flags.end());
  argv.push_back(model_path.string());
  if (data_text.find_first_not_of(" \t\r\n") != std::string_view::npos) {
    const fs::path data_path = dir.path() / "data.dzn";
    write_file(data_path, data_text);
    argv.push_back(data_path.string());
  }

  const ProcessOutcome p = run_process(argv, config.time_limit_seconds + kKillGraceSeconds);
  if (p.spawn_failed) throw ToolchainMissing(p.err);

  SolveResult r;
  r.wall_seconds = p.seconds;
  r.stdout_text = strip_scratch(p.out, dir.path());
  r.stderr_text = strip_scratch(p.err, dir.path());

  ParsedSolution sol;
  try {
    sol = parse_solution(p.out, corpus::Objective::Minimize);
  } catch (const OutputParseError& e) {
    r.status = Status::Unknown;
    r.output_parse_failed = true;
    r.error = SolveError{ErrorCategory::Unclassified, e.what()};
    return r;
  }

  const bool limit_reached = p.killed || p.seconds >= config.time_limit_seconds;
  if (sol.has_solution) {
    r.status = sol.optimal ? Status::Optimal : Status::Satisfied;
    r.objective_value = sol.objective_value;
    r.assignments = std::move(sol.assignments);
    return r;
  }
  if (sol.unsatisfiable) {
    r.status = Status::Unsatisfiable;
    return r;
  }
  if (p.killed || (sol.unknown && limit_reached)) {
    r.status = Status::Timeout;
    std::ostringstream msg;
    msg << "time limit of " << config.time_limit_seconds << " s exceeded without a solution";
    if (p.killed) msg << " (process killed)";
    r.error = SolveError{ErrorCategory::TimeoutError, msg.str()};
    return r;
  }
  const std::string text = error_text(r.stderr_text, p.exit_code != 0 || sol.error ? r.stdout_text : std::string());
  if (p.exit_code != 0 || sol.error || text.find("Error") != std::string::npos) {
    const ErrorCategory cat = classify_error(text.empty() ? "exit code " + std::to_string(p.exit_code) : text);
    r.status = is_compile_phase(cat) ? Status::CompileError : Status::RuntimeError;
    r.error = SolveError{cat, text.empty() ? "minizinc exited with code " + std::to_string(p.exit_code) : text};
    return r;
  }
  r.status = Status::Unknown;
  return r;
}

SolveResult MemoToolchain::solve(std::string_view model_text, std::string_view data_text, const SolverConfig& config) {
  std::string key;
  key.reserve(model_text.size() + data_text.size() + 64);
  key.append(std::to_string(model_text.size())).append(":").append(model_text);
  key.append(std::to_string(data_text.size())).append(":").append(data_text);
  key.append(config.solver).append("|").append(std::to_string(config.time_limit_seconds));
  for (const auto& f : config.extra_flags) key.append("|").append(f);
  {
    std::lock_guard lock(mu_);
    if (auto it = cache_.find(key); it != cache_.end()) {
      ++hits_;
      return it->second;
    }
  }
  SolveResult r = inner_->solve(model_text, data_text, config);
  // Timeouts depend on machine load; do not pin them.
  if (r.status != Status::Timeout) {
    std::lock_guard lock(mu_);
    cache_.emplace(std::move(key), r);
  }
  return r;
}

std::shared_ptr<Toolchain> default_toolchain() {
  static std::mutex mu;
  static std::shared_ptr<Toolchain> shared;
  std::lock_guard lock(mu);
  if (!shared) {
    auto path = MiniZincToolchain::locate();
    if (!path) throw ToolchainMissing("MiniZinc executable not found (set T2M_MINIZINC or put `minizinc` on PATH)");
    shared = std::make_shared<MiniZincToolchain>(*path);
  }
  return shared;
}

SolveResult solve(std::string_view model_text, std::string_view data_text, const SolverConfig& config) {
  return default_toolchain()->solve(model_text, data_text, config);
}

bool verify_satisfaction(Toolchain& toolchain, std::string_view ground_truth_model, std::string_view data_text,
                         const dzn::Bindings& candidate, const SolverConfig& config) {
  std::string data(data_text);
  if (!data.empty() && data.back() != '\n') data.push_back('\n');
  data += dzn::serialize(candidate);
  const SolveResult r = toolchain.solve(ground_truth_model, data, config);
  switch (r.status) {
    case Status::Optimal:
    case Status::Satisfied: return true;
    case Status::CompileError:
    case Status::RuntimeError: {
      const SolveResult alone = toolchain.solve(ground_truth_model, data_text, config);
      if (alone.status == Status::CompileError || alone.status == Status::RuntimeError) {
        throw VerifierCompileError("ground-truth model does not compile on its own data: " +
                                   (alone.error ? alone.error->raw : std::string(to_string(alone.status))));
      }
      return false;
    }
    default: return false;
  }
}

}  // namespace t2m::harness
