#pragma once

// Compiles and runs MiniZinc models through the `minizinc` executable and
// turns its output into SolveResults.

#include <condition_variable>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "t2m/corpus.hpp"
#include "t2m/dzn.hpp"
#include "t2m/error.hpp"

namespace t2m::harness {

T2M_DEFINE_ERROR(ToolchainMissing);
T2M_DEFINE_ERROR(VerifierCompileError);

class OutputParseError : public Error {
 public:
  OutputParseError(const std::string& message, std::string raw)
      : Error("OutputParseError", message), raw_(std::move(raw)) {}
  const std::string& raw() const { return raw_; }

 private:
  std::string raw_;
};

enum class Status { Optimal, Satisfied, Unsatisfiable, CompileError, RuntimeError, Timeout, Unknown };

enum class ErrorCategory {
  SyntaxError,
  UndefinedIdentifier,
  ArrayIndexing,
  FunctionNotFound,
  VariableRedefinition,
  FlatteningError,
  TimeoutError,
  SolverLimitation,
  MissingData,
  Unclassified,
};

std::string_view to_string(Status s);
std::string_view to_string(ErrorCategory c);
std::optional<Status> parse_status(std::string_view text);
std::optional<ErrorCategory> parse_category(std::string_view text);

struct SolverConfig {
  std::string solver = "gecode";
  double time_limit_seconds = 60.0;
  std::vector<std::string> extra_flags;
};

struct SolveError {
  ErrorCategory category = ErrorCategory::Unclassified;
  std::string raw;
};

struct SolveResult {
  Status status = Status::Unknown;
  std::optional<double> objective_value;
  dzn::Bindings assignments;
  std::optional<SolveError> error;
  double wall_seconds = 0.0;
  bool output_parse_failed = false;
  std::string stdout_text;
  std::string stderr_text;

  // The model compiled and ran: a solution, proven infeasibility, or an
  // unparseable solution block.
  bool executed() const;
};

// {status, objective_value, assignments, error: {category, message}, wall_seconds}
corpus::Json result_to_json(const SolveResult& r);

// First match over an ordered pattern table; Unclassified when nothing fits.
ErrorCategory classify_error(std::string_view text);

// True for the categories raised before search starts.
bool is_compile_phase(ErrorCategory c);

struct ParsedSolution {
  std::optional<double> objective_value;
  dzn::Bindings assignments;
  bool has_solution = false;
  bool optimal = false;        // "==========" seen
  bool unsatisfiable = false;  // "=====UNSATISFIABLE====="
  bool unknown = false;        // "=====UNKNOWN====="
  bool error = false;          // "=====ERROR====="
};

// Parses `--output-mode dzn --output-objective` output. The last solution
// block wins. Throws OutputParseError when that block is not DZN.
ParsedSolution parse_solution(std::string_view stdout_text, corpus::Objective objective);

class Toolchain {
 public:
  virtual ~Toolchain() = default;
  virtual SolveResult solve(std::string_view model_text, std::string_view data_text, const SolverConfig& config) = 0;
  virtual std::string identity() const = 0;
};

class MiniZincToolchain : public Toolchain {
 public:
  // Throws ToolchainMissing if `executable` cannot be run.
  explicit MiniZincToolchain(std::string executable, int max_parallel = 1);

  // T2M_MINIZINC, then `minizinc` on PATH.
  static std::optional<std::string> locate();

  SolveResult solve(std::string_view model_text, std::string_view data_text, const SolverConfig& config) override;
  std::string identity() const override;
  const std::string& executable() const { return executable_; }
  // `minizinc --version` first line, cached.
  std::string version();

  // Added to the solver flag on top of the time limit before the process
  // group is killed.
  static constexpr double kKillGraceSeconds = 5.0;

 private:
  std::string executable_;
  std::string version_;
  int max_parallel_;
  int running_ = 0;
  std::mutex mu_;
  std::condition_variable cv_;
};

// Caches results of identical (model, data, config) solves.
class MemoToolchain : public Toolchain {
 public:
  explicit MemoToolchain(std::shared_ptr<Toolchain> inner) : inner_(std::move(inner)) {}
  SolveResult solve(std::string_view model_text, std::string_view data_text, const SolverConfig& config) override;
  std::string identity() const override { return inner_->identity(); }
  std::size_t hits() const { return hits_; }

 private:
  std::shared_ptr<Toolchain> inner_;
  std::mutex mu_;
  std::map<std::string, SolveResult> cache_;
  std::size_t hits_ = 0;
};

// Shared MiniZincToolchain built from locate(); throws ToolchainMissing.
std::shared_ptr<Toolchain> default_toolchain();

SolveResult solve(std::string_view model_text, std::string_view data_text, const SolverConfig& config);

// Runs the ground-truth model with the candidate assignments appended to the
// instance data. Throws VerifierCompileError when the ground truth fails to
// compile on its own data.
bool verify_satisfaction(Toolchain& toolchain, std::string_view ground_truth_model, std::string_view data_text,
                         const dzn::Bindings& candidate, const SolverConfig& config);

}  // namespace t2m::harness
