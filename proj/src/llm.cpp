#include "t2m/llm.hpp"

#include <httplib.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "t2m/assets.hpp"

namespace t2m::llm {

using Json = nlohmann::ordered_json;

std::string_view to_string(TemplateId id) {
  switch (id) {
    case TemplateId::Baseline: return "baseline";
    case TemplateId::Cot: return "cot";
    case TemplateId::KgCreate: return "kg_create";
    case TemplateId::KgCodegen: return "kg_codegen";
    case TemplateId::CodeValidation: return "code_validation";
    case TemplateId::GrammarValidation: return "grammar_validation";
    case TemplateId::AgenticParamsVars: return "agentic_params_vars";
    case TemplateId::AgenticConstraints: return "agentic_constraints";
    case TemplateId::AgenticObjective: return "agentic_objective";
    case TemplateId::AgenticStitch: return "agentic_stitch";
  }
  return "";
}

TemplateId parse_template_id(std::string_view name) {
  for (TemplateId id : kAllTemplates) {
    if (to_string(id) == name) return id;
  }
  throw UnknownTemplate("unknown template `" + std::string(name) + "'");
}

std::string template_body(TemplateId id) { return assets::load("prompts/" + std::string(to_string(id)) + ".txt"); }

namespace {

const std::regex& slot_re() {
  static const std::regex re(R"(\{([a-z_]+)\})");
  return re;
}

}  // namespace

std::vector<std::string> template_slots(TemplateId id) {
  const std::string body = template_body(id);
  std::set<std::string> names;
  for (std::sregex_iterator it(body.begin(), body.end(), slot_re()), end; it != end; ++it) names.insert((*it)[1]);
  return {names.begin(), names.end()};
}

std::string render_prompt(TemplateId id, const Slots& slots) {
  const std::string body = template_body(id);
  for (const auto& name : template_slots(id)) {
    if (slots.find(name) == slots.end()) throw MissingSlot(name);
  }
  std::string out;
  out.reserve(body.size() * 2);
  auto last = body.cbegin();
  for (std::sregex_iterator it(body.begin(), body.end(), slot_re()), end; it != end; ++it) {
    out.append(last, (*it)[0].first);
    out.append(slots.find((*it)[1].str())->second);
    last = (*it)[0].second;
  }
  out.append(last, body.cend());
  return out;
}

std::string render_prompt(std::string_view template_name, const Slots& slots) {
  return render_prompt(parse_template_id(template_name), slots);
}

std::string augment_for_empty_data(std::string_view prompt) {
  std::string out(prompt);
  if (!out.empty() && out.back() != '\n') out.push_back('\n');
  out += assets::load("prompts/note_empty_data.txt");
  out += assets::load("prompts/note_code_only.txt");
  return out;
}

// ---------------------------------------------------------------------------
// Transports.

LiveTransport::LiveTransport(std::string base_url, std::string api_key_env, std::string path)
    : base_url_(std::move(base_url)), api_key_env_(std::move(api_key_env)), path_(std::move(path)) {}

std::shared_ptr<LiveTransport> LiveTransport::with_key(std::string api_key, std::string base_url, std::string path) {
  auto t = std::make_shared<LiveTransport>(std::move(base_url), "", std::move(path));
  t->api_key_ = std::move(api_key);
  return t;
}

std::string LiveTransport::identity() const { return "live:" + base_url_ + path_; }

TransportResponse LiveTransport::send(const TransportRequest& request) {
  const char* key = api_key_ ? api_key_->c_str() : std::getenv(api_key_env_.c_str());
  if (!key || !*key)
    throw AuthError(api_key_ ? std::string("empty credential")
                             : "credential environment variable " + api_key_env_ + " is not set");
  const CompletionConfig& cfg = request.config ? *request.config : CompletionConfig{};

  Json body = {{"model", cfg.model},
               {"messages", Json::array({{{"role", "user"}, {"content", request.prompt}}})},
               {"temperature", cfg.temperature}};
  if (cfg.max_tokens) body["max_tokens"] = *cfg.max_tokens;
  if (cfg.seed) body["seed"] = *cfg.seed;

  httplib::Client client(base_url_);
  const auto secs = static_cast<time_t>(cfg.timeout_seconds);
  const auto usecs = static_cast<time_t>((cfg.timeout_seconds - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  client.set_bearer_token_auth(key);
  auto res = client.Post(path_, body.dump(), "application/json");
  if (!res) throw TransientError("request failed: " + httplib::to_string(res.error()));

  if (res->status == 401 || res->status == 403) throw AuthError("endpoint rejected the credential (HTTP " + std::to_string(res->status) + ")");
  if (res->status == 429 || res->status >= 500) {
    std::optional<double> retry_after;
    if (res->has_header("Retry-After")) {
      try {
        retry_after = std::stod(res->get_header_value("Retry-After"));
      } catch (const std::exception&) {
      }
    }
    throw TransientError("HTTP " + std::to_string(res->status), res->status == 429, retry_after);
  }
  if (res->status != 200) throw TransportError("HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 500));

  TransportResponse out;
  try {
    const Json j = Json::parse(res->body);
    const Json& content = j.at("choices").at(0).at("message").at("content");
    out.text = content.is_string() ? content.get<std::string>() : std::string();
    if (j.contains("usage")) {
      const Json& u = j["usage"];
      if (u.contains("prompt_tokens")) out.prompt_tokens = u["prompt_tokens"].get<long long>();
      if (u.contains("completion_tokens")) out.completion_tokens = u["completion_tokens"].get<long long>();
    }
  } catch (const Json::exception& e) {
    throw TransportError(std::string("malformed completion response: ") + e.what());
  }
  return out;
}

ReplayTransport::ReplayTransport(const std::filesystem::path& trace) : ReplayTransport(read_trace(trace)) {}

ReplayTransport::ReplayTransport(const std::vector<CallRecord>& records) {
  for (const auto& r : records) answers_[r.prompt].push_back(r.response);
}

TransportResponse ReplayTransport::send(const TransportRequest& request) {
  std::lock_guard lock(mu_);
  auto it = answers_.find(request.prompt);
  if (it == answers_.end() || it->second.empty()) {
    throw TransportError("no recorded response for this " + request.template_id + " prompt");
  }
  TransportResponse out{it->second.front(), {}, {}};
  it->second.pop_front();
  return out;
}

std::shared_ptr<Transport> echo_transport() {
  return std::make_shared<MockTransport>([](const TransportRequest& r) { return r.prompt; }, "echo");
}

TransportResponse ScriptedTransport::send(const TransportRequest& request) {
  Step step;
  {
    std::lock_guard lock(mu_);
    if (script_.empty()) throw TransportError("empty script");
    step = script_[std::min(next_, script_.size() - 1)];
    ++next_;
    prompts_.push_back(request.prompt);
  }
  switch (step.failure) {
    case Failure::None: return {step.text, {}, {}};
    case Failure::Transient: throw TransientError("scripted transient failure");
    case Failure::RateLimit: throw TransientError("scripted rate limit", true);
    case Failure::Auth: throw AuthError("scripted credential rejection");
    case Failure::Fatal: throw TransportError("scripted fatal failure");
  }
  return {};
}

// ---------------------------------------------------------------------------
// Gateway.

Gateway::Gateway(std::shared_ptr<Transport> transport) : Gateway(std::move(transport), Options{}) {}

Gateway::Gateway(std::shared_ptr<Transport> transport, Options options)
    : transport_(std::move(transport)), options_(std::move(options)) {
  if (!transport_) throw TransportError("no transport configured");
}

std::unique_ptr<Run> Gateway::start_run(int budget) { return std::unique_ptr<Run>(new Run(*this, budget)); }

CallRecord Gateway::complete(TemplateId id, const std::string& prompt, const CompletionConfig& config) {
  return call(std::string(to_string(id)), prompt, config, 1);
}

CallRecord Gateway::chat(const std::string& prompt, const CompletionConfig& config) {
  return call("chat", prompt, config, 1);
}

void Gateway::sleep(double seconds) {
  if (seconds <= 0) return;
  if (options_.sleep) options_.sleep(seconds);
  else std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
}

void Gateway::pace() {
  if (options_.min_interval_seconds <= 0) return;
  double wait = 0;
  {
    std::lock_guard lock(pace_mu_);
    const auto now = std::chrono::steady_clock::now();
    const auto slot = std::max(now, next_send_);
    wait = std::chrono::duration<double>(slot - now).count();
    next_send_ = slot + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                            std::chrono::duration<double>(options_.min_interval_seconds));
  }
  sleep(wait);
}

CallRecord Gateway::call(std::string tag, const std::string& prompt, const CompletionConfig& config, int sequence) {
  CallRecord rec;
  rec.template_id = std::move(tag);
  rec.prompt = prompt;
  rec.transport = transport_->identity();
  rec.sequence = sequence;
  const TransportRequest request{rec.template_id, prompt, &config};
  const int max_attempts = std::max(1, config.retry.max_attempts);
  double backoff = config.retry.initial_backoff_seconds;
  const auto started = std::chrono::steady_clock::now();
  auto log = [&](const AttemptLog& a) {
    rec.attempts.push_back(a);
    if (options_.log) {
      std::ostringstream line;
      line << rec.template_id << " #" << sequence << " attempt " << a.attempt << ": "
           << (a.ok ? "ok" : "failed: " + a.error);
      if (a.wait_seconds > 0) line << " (retry in " << a.wait_seconds << " s)";
      options_.log(line.str());
    }
  };

  for (int attempt = 1;; ++attempt) {
    pace();
    try {
      TransportResponse res = transport_->send(request);
      log({attempt, true, "", 0.0});
      rec.response = std::move(res.text);
      rec.prompt_tokens = res.prompt_tokens;
      rec.completion_tokens = res.completion_tokens;
      break;
    } catch (const TransientError& e) {
      if (attempt >= max_attempts) {
        log({attempt, false, e.what(), 0.0});
        const std::string msg = std::string(e.what()) + " after " + std::to_string(attempt) + " attempts";
        if (e.rate_limited()) throw RateLimited(msg);
        throw TransportError(msg);
      }
      const double wait = std::min(config.retry.max_backoff_seconds, e.retry_after().value_or(backoff));
      log({attempt, false, e.what(), wait});
      sleep(wait);
      backoff *= config.retry.backoff_multiplier;
    } catch (const Error& e) {
      log({attempt, false, e.what(), 0.0});
      throw;
    }
  }
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return rec;
}

CallRecord Run::complete(TemplateId id, const std::string& prompt, const CompletionConfig& config) {
  const int seq = ++used_;
  if (seq > budget_) {
    --used_;
    throw BudgetExceeded("call budget of " + std::to_string(budget_) + " exhausted");
  }
  return gateway_.call(std::string(to_string(id)), prompt, config, seq);
}

CallRecord Run::complete(TemplateId id, const std::string& prompt) { return complete(id, prompt, gateway_.defaults()); }

// ---------------------------------------------------------------------------
// Traces.

std::string record_to_json_line(const CallRecord& r) {
  Json j = {{"sequence", r.sequence},
            {"template", r.template_id},
            {"prompt", r.prompt},
            {"response", r.response},
            {"wall_seconds", r.wall_seconds},
            {"transport", r.transport}};
  if (r.prompt_tokens) j["prompt_tokens"] = *r.prompt_tokens;
  if (r.completion_tokens) j["completion_tokens"] = *r.completion_tokens;
  Json attempts = Json::array();
  for (const auto& a : r.attempts) {
    Json aj = {{"attempt", a.attempt}, {"ok", a.ok}};
    if (!a.error.empty()) aj["error"] = a.error;
    if (a.wait_seconds > 0) aj["wait_seconds"] = a.wait_seconds;
    attempts.push_back(std::move(aj));
  }
  j["attempts"] = std::move(attempts);
  return j.dump();
}

CallRecord record_from_json_line(std::string_view line) {
  try {
    const Json j = Json::parse(line);
    CallRecord r;
    r.sequence = j.value("sequence", 0);
    r.template_id = j.value("template", "");
    r.prompt = j.at("prompt").get<std::string>();
    r.response = j.at("response").get<std::string>();
    r.wall_seconds = j.value("wall_seconds", 0.0);
    r.transport = j.value("transport", "");
    if (j.contains("prompt_tokens")) r.prompt_tokens = j["prompt_tokens"].get<long long>();
    if (j.contains("completion_tokens")) r.completion_tokens = j["completion_tokens"].get<long long>();
    if (j.contains("attempts")) {
      for (const auto& a : j["attempts"]) {
        r.attempts.push_back({a.value("attempt", 0), a.value("ok", false), a.value("error", ""), a.value("wait_seconds", 0.0)});
      }
    }
    return r;
  } catch (const Json::exception& e) {
    throw TransportError(std::string("malformed trace line: ") + e.what());
  }
}

void write_trace(const std::vector<CallRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw TransportError("cannot write trace " + path.string());
  for (const auto& r : records) out << record_to_json_line(r) << '\n';
}

std::vector<CallRecord> read_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TransportError("cannot read trace " + path.string());
  std::vector<CallRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(record_from_json_line(line));
  }
  return out;
}

}  // namespace t2m::llm
