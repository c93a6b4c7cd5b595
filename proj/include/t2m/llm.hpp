#pragma once

// Prompt templates and chat-completion access.

#include <atomic>
#include <chrono>
#include <cstddef>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "t2m/error.hpp"

namespace t2m::llm {

T2M_DEFINE_ERROR(UnknownTemplate);
T2M_DEFINE_ERROR(AuthError);
T2M_DEFINE_ERROR(RateLimited);
T2M_DEFINE_ERROR(TransportError);
T2M_DEFINE_ERROR(BudgetExceeded);

class MissingSlot : public Error {
 public:
  explicit MissingSlot(std::string slot) : Error("MissingSlot", "missing slot `" + slot + "'"), slot_(std::move(slot)) {}
  const std::string& slot() const { return slot_; }

 private:
  std::string slot_;
};

// A failure worth retrying: network errors, 5xx, 429.
class TransientError : public Error {
 public:
  TransientError(const std::string& message, bool rate_limited = false,
                 std::optional<double> retry_after_seconds = std::nullopt)
      : Error("TransientError", message), rate_limited_(rate_limited), retry_after_(retry_after_seconds) {}
  bool rate_limited() const { return rate_limited_; }
  std::optional<double> retry_after() const { return retry_after_; }

 private:
  bool rate_limited_;
  std::optional<double> retry_after_;
};

enum class TemplateId {
  Baseline,
  Cot,
  KgCreate,
  KgCodegen,
  CodeValidation,
  GrammarValidation,
  AgenticParamsVars,
  AgenticConstraints,
  AgenticObjective,
  AgenticStitch,
};

inline constexpr TemplateId kAllTemplates[] = {
    TemplateId::Baseline,          TemplateId::Cot,
    TemplateId::KgCreate,          TemplateId::KgCodegen,
    TemplateId::CodeValidation,    TemplateId::GrammarValidation,
    TemplateId::AgenticParamsVars, TemplateId::AgenticConstraints,
    TemplateId::AgenticObjective,  TemplateId::AgenticStitch,
};

std::string_view to_string(TemplateId id);
// Throws UnknownTemplate.
TemplateId parse_template_id(std::string_view name);

using Slots = std::map<std::string, std::string, std::less<>>;

std::string template_body(TemplateId id);
// Slot names referenced by the body, sorted.
std::vector<std::string> template_slots(TemplateId id);

std::string render_prompt(TemplateId id, const Slots& slots);
std::string render_prompt(std::string_view template_name, const Slots& slots);

// Appends the embed-data and MiniZinc-only notes. Callers apply it only to
// instances whose data file is empty.
std::string augment_for_empty_data(std::string_view prompt);

struct RetryPolicy {
  int max_attempts = 3;
  double initial_backoff_seconds = 1.0;
  double backoff_multiplier = 2.0;
  double max_backoff_seconds = 30.0;
};

struct CompletionConfig {
  std::string model = "gpt-4o";
  double temperature = 0.0;
  std::optional<int> max_tokens;
  std::optional<long long> seed = 0;
  double timeout_seconds = 120.0;
  RetryPolicy retry;
};

struct AttemptLog {
  int attempt = 0;
  bool ok = false;
  std::string error;
  double wait_seconds = 0.0;  // sleep before the next attempt
};

struct CallRecord {
  std::string template_id;
  std::string prompt;
  std::string response;
  double wall_seconds = 0.0;
  std::optional<long long> prompt_tokens;
  std::optional<long long> completion_tokens;
  std::string transport;
  int sequence = 0;
  std::vector<AttemptLog> attempts;
};

struct TransportRequest {
  std::string template_id;
  std::string prompt;
  const CompletionConfig* config = nullptr;
};

struct TransportResponse {
  std::string text;
  std::optional<long long> prompt_tokens;
  std::optional<long long> completion_tokens;
};

// send() throws TransientError (retried), AuthError or TransportError.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual TransportResponse send(const TransportRequest& request) = 0;
  virtual std::string identity() const = 0;
};

// Chat-completions over HTTP(S). The bearer token is read from `api_key_env`
// on every call.
class LiveTransport : public Transport {
 public:
  explicit LiveTransport(std::string base_url = "https://api.openai.com", std::string api_key_env = "OPENAI_API_KEY",
                         std::string path = "/v1/chat/completions");
  // Uses `api_key` held in memory instead of the environment.
  static std::shared_ptr<LiveTransport> with_key(std::string api_key, std::string base_url = "https://api.openai.com",
                                                 std::string path = "/v1/chat/completions");
  TransportResponse send(const TransportRequest& request) override;
  std::string identity() const override;

 private:
  std::string base_url_;
  std::string api_key_env_;
  std::string path_;
  std::optional<std::string> api_key_;
};

// Answers from a trace file. Prompts are matched exactly; repeated prompts
// are served in file order.
class ReplayTransport : public Transport {
 public:
  explicit ReplayTransport(const std::filesystem::path& trace);
  explicit ReplayTransport(const std::vector<CallRecord>& records);
  TransportResponse send(const TransportRequest& request) override;
  std::string identity() const override { return "replay"; }

 private:
  std::mutex mu_;
  std::map<std::string, std::deque<std::string>> answers_;
};

// Deterministic mock driven by a function of the request.
class MockTransport : public Transport {
 public:
  using Responder = std::function<std::string(const TransportRequest&)>;
  explicit MockTransport(Responder responder, std::string name = "mock")
      : responder_(std::move(responder)), name_(std::move(name)) {}
  TransportResponse send(const TransportRequest& request) override { return {responder_(request), {}, {}}; }
  std::string identity() const override { return name_; }

 private:
  Responder responder_;
  std::string name_;
};

// Response equals prompt.
std::shared_ptr<Transport> echo_transport();

// Plays a fixed script, one step per send. A step is either a response or a
// failure; the script repeats its last step once exhausted.
class ScriptedTransport : public Transport {
 public:
  enum class Failure { None, Transient, RateLimit, Auth, Fatal };
  struct Step {
    std::string text;
    Failure failure = Failure::None;
  };
  static Step reply(std::string text) { return {std::move(text), Failure::None}; }
  static Step fail(Failure f) { return {"", f}; }

  explicit ScriptedTransport(std::vector<Step> script) : script_(std::move(script)) {}
  TransportResponse send(const TransportRequest& request) override;
  std::string identity() const override { return "scripted"; }
  std::size_t sends() const { return next_; }
  const std::vector<std::string>& prompts() const { return prompts_; }

 private:
  std::mutex mu_;
  std::vector<Step> script_;
  std::size_t next_ = 0;
  std::vector<std::string> prompts_;
};

class Gateway;

// Sequence numbering and call cap for one strategy run.
class Run {
 public:
  CallRecord complete(TemplateId id, const std::string& prompt, const CompletionConfig& config);
  CallRecord complete(TemplateId id, const std::string& prompt);
  int calls() const { return used_.load(); }
  int budget() const { return budget_; }

 private:
  friend class Gateway;
  Run(Gateway& gateway, int budget) : gateway_(gateway), budget_(budget) {}
  Gateway& gateway_;
  int budget_;
  std::atomic<int> used_{0};
};

class Gateway {
 public:
  using Sleeper = std::function<void(double seconds)>;
  struct Options {
    CompletionConfig defaults;
    double min_interval_seconds = 0.0;  // between sends, across all runs
    Sleeper sleep;                      // defaults to std::this_thread::sleep_for
    std::function<void(const std::string& line)> log;
  };

  explicit Gateway(std::shared_ptr<Transport> transport);
  Gateway(std::shared_ptr<Transport> transport, Options options);

  std::unique_ptr<Run> start_run(int budget);
  // One call outside any run; no budget, sequence 1.
  CallRecord complete(TemplateId id, const std::string& prompt, const CompletionConfig& config);
  // Free-form call recorded under template id "chat".
  CallRecord chat(const std::string& prompt, const CompletionConfig& config);

  const CompletionConfig& defaults() const { return options_.defaults; }
  std::string transport_identity() const { return transport_->identity(); }

 private:
  friend class Run;
  CallRecord call(std::string tag, const std::string& prompt, const CompletionConfig& config, int sequence);
  void pace();
  void sleep(double seconds);

  std::shared_ptr<Transport> transport_;
  Options options_;
  std::mutex pace_mu_;
  std::chrono::steady_clock::time_point next_send_{};
};

// JSON-lines trace of CallRecords, one object per line.
void write_trace(const std::vector<CallRecord>& records, const std::filesystem::path& path);
std::vector<CallRecord> read_trace(const std::filesystem::path& path);
std::string record_to_json_line(const CallRecord& record);
CallRecord record_from_json_line(std::string_view line);

}  // namespace t2m::llm
