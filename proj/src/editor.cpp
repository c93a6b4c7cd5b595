#include "t2m/editor.hpp"

#include <httplib.h>

#include <random>
#include <sstream>

#include "t2m/evaluator.hpp"

namespace t2m::editor {

namespace {

std::string join_findings(const std::vector<std::string>& findings) {
  std::string out = "instance failed validation";
  for (std::size_t i = 0; i < findings.size(); ++i) out += (i ? "; " : ": ") + findings[i];
  return out;
}

std::string random_id() {
  std::random_device rd;
  std::ostringstream out;
  out << std::hex;
  for (int i = 0; i < 4; ++i) out << rd();
  return out.str();
}

int http_status(const std::string& kind) {
  if (kind == "NotFound") return 404;
  if (kind == "ValidationFailed") return 422;
  if (kind == "AuthError") return 401;
  if (kind == "RateLimited") return 429;
  if (kind == "ToolchainMissing" || kind == "TransientError") return 503;
  if (kind == "TransportError") return 502;
  if (kind == "BadRequest" || kind == "MalformedInput" || kind == "InvalidInstance" || kind == "InvalidObjective" ||
      kind == "DznParseError")
    return 400;
  return 500;
}

Json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return Json::object();
  try {
    Json j = Json::parse(req.body);
    if (!j.is_object()) throw BadRequest("request body must be a JSON object");
    return j;
  } catch (const Json::parse_error& e) {
    throw BadRequest(std::string("request body is not JSON: ") + e.what());
  }
}

template <typename T>
std::optional<T> optional_field(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  try {
    return it->get<T>();
  } catch (const Json::exception&) {
    throw BadRequest(std::string("field \"") + key + "\" has the wrong type");
  }
}

void send_json(httplib::Response& res, const Json& j, int status = 200) {
  res.status = status;
  res.set_content(j.dump(2), "application/json");
}

template <typename F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const ValidationFailed& e) {
      send_json(res, {{"error", e.kind()}, {"message", e.what()}, {"findings", e.findings()}}, 422);
    } catch (const Error& e) {
      Json body = {{"error", e.kind()}, {"message", e.what()}};
      if (e.kind() == "RateLimited" || e.kind() == "TransientError") body["retry"] = true;
      send_json(res, body, http_status(e.kind()));
    } catch (const std::exception& e) {
      send_json(res, {{"error", "InternalError"}, {"message", e.what()}}, 500);
    }
  };
}

}  // namespace

ValidationFailed::ValidationFailed(std::vector<std::string> findings)
    : Error("ValidationFailed", join_findings(findings)), findings_(std::move(findings)) {}

EditorService::EditorService(Options options, std::shared_ptr<harness::Toolchain> toolchain, TransportFactory factory)
    : options_(std::move(options)),
      toolchain_(std::move(toolchain)),
      factory_(std::move(factory)),
      corpus_(corpus::Corpus::open(options_.corpus_root)) {
  if (!factory_) factory_ = [](const std::string& credential) { return llm::LiveTransport::with_key(credential); };
}

std::shared_ptr<std::mutex> EditorService::instance_lock(const std::string& id) const {
  std::lock_guard lock(locks_mu_);
  auto& m = locks_[id];
  if (!m) m = std::make_shared<std::mutex>();
  return m;
}

corpus::ProblemInstance EditorService::load(const std::string& id) const {
  std::lock_guard lock(corpus_mu_);
  if (!corpus_.path_of(id)) throw NotFound("no instance `" + id + "'");
  return corpus_.load(id);
}

Json EditorService::list_problems(const ProblemFilter& filter) const {
  std::vector<std::string> ids;
  {
    std::lock_guard lock(corpus_mu_);
    for (const auto& e : corpus_.entries()) ids.push_back(e.id);
  }
  Json out = Json::array();
  for (const auto& id : ids) {
    const auto inst = [&] {
      std::lock_guard lock(*instance_lock(id));
      return load(id);
    }();
    const auto& m = inst.input.metadata;
    if (filter.source && m.source() != *filter.source) continue;
    if (filter.domain && m.domain != *filter.domain) continue;
    if (filter.objective && m.objective != *filter.objective) continue;
    out.push_back({{"id", inst.id()},
                   {"title", m.title},
                   {"domain", m.domain},
                   {"source", m.source()},
                   {"objective", std::string(corpus::to_string(m.objective))},
                   {"verified", inst.verified}});
  }
  return out;
}

Json EditorService::get_problem(const std::string& id) const {
  std::lock_guard lock(*instance_lock(id));
  return corpus::instance_to_json(load(id));
}

void EditorService::put_problem(const std::string& id, const Json& body) {
  corpus::ProblemInstance inst;
  try {
    inst = corpus::instance_from_json(body);
  } catch (const Error& e) {
    throw ValidationFailed({e.what()});
  }
  std::vector<std::string> findings = corpus::check_invariants(inst);
  if (inst.id() != id) findings.push_back("metadata.identifier `" + inst.id() + "' does not match `" + id + "'");
  if (!findings.empty()) throw ValidationFailed(std::move(findings));
  std::lock_guard lock(*instance_lock(id));
  std::lock_guard corpus_lock(corpus_mu_);
  corpus_.store(inst);
}

Json EditorService::execute_problem(const std::string& id, const ExecuteRequest& request) {
  if (request.timeout_seconds < 1 || request.timeout_seconds > 600)
    throw BadRequest("timeout must be within [1, 600] seconds");
  corpus::ProblemInstance inst = [&] {
    std::lock_guard lock(*instance_lock(id));
    return load(id);
  }();
  const std::string model = request.model ? *request.model : inst.ground_truth_model.value_or("");
  if (model.empty()) throw BadRequest("instance `" + id + "' has no model and the request supplies none");
  if (request.data) inst.data_text = *request.data;
  if (!toolchain_) throw harness::ToolchainMissing("no MiniZinc toolchain is configured");

  harness::SolverConfig config;
  config.solver = request.solver;
  config.time_limit_seconds = request.timeout_seconds;
  const harness::SolveResult result = toolchain_->solve(model, inst.data_text, config);
  const evaluator::InstanceOutcome outcome = evaluator::judge_instance(result, inst, "editor", *toolchain_, config);

  Json out;
  out["result"] = harness::result_to_json(result);
  out["verdict"] = outcome.excluded ? "unscored" : outcome.solution_correct ? "match" : "mismatch";
  out["outcome"] = evaluator::outcome_to_json(outcome);
  out["saved"] = false;
  if (request.save && (request.model || request.data)) {
    inst.ground_truth_model = model;
    std::lock_guard lock(*instance_lock(id));
    std::lock_guard corpus_lock(corpus_mu_);
    if (auto findings = corpus::check_invariants(inst); !findings.empty()) throw ValidationFailed(findings);
    corpus_.store(inst);
    out["saved"] = true;
  }
  return out;
}

std::string EditorService::create_session(std::optional<std::string> instance_id,
                                          std::optional<std::string> credential) {
  if (instance_id) load(*instance_id);
  auto s = std::make_shared<Session>();
  s->instance_id = std::move(instance_id);
  if (credential && !credential->empty()) s->credential = std::move(credential);
  const std::string id = random_id();
  std::lock_guard lock(sessions_mu_);
  sessions_[id] = std::move(s);
  return id;
}

std::shared_ptr<EditorService::Session> EditorService::session(const std::string& id) const {
  std::lock_guard lock(sessions_mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw NotFound("no session `" + id + "'");
  return it->second;
}

std::string EditorService::context_prompt(const Session& s, const std::string& message) const {
  const corpus::ProblemInstance inst = [&] {
    std::lock_guard lock(*instance_lock(*s.instance_id));
    return load(*s.instance_id);
  }();
  std::ostringstream out;
  out << "You are assisting with a MiniZinc modelling problem.\n\n"
      << "Problem description:\n" << inst.input.description << "\n\n"
      << "Data (.dzn):\n" << inst.data_text << "\n\n"
      << "Model code:\n" << inst.ground_truth_model.value_or("") << "\n\n";
  if (!s.history.empty()) {
    out << "Conversation so far:\n";
    for (const auto& t : s.history) out << (t.role == "user" ? "User: " : "Assistant: ") << t.text << '\n';
    out << '\n';
  }
  out << "User: " << message << '\n';
  return out.str();
}

std::string EditorService::chat(const std::string& session_id, const std::string& message,
                                std::optional<std::string> instance_id) {
  auto s = session(session_id);
  std::lock_guard lock(s->mu);
  if (!s->credential) throw llm::AuthError("session has no API credential");
  if (instance_id) {
    load(*instance_id);
    s->instance_id = std::move(instance_id);
  }
  if (!s->instance_id) throw BadRequest("session has no active instance");
  if (message.empty()) throw BadRequest("empty message");
  const std::string prompt = context_prompt(*s, message);
  llm::Gateway::Options gopts;
  gopts.defaults = options_.completion;
  llm::Gateway gateway(factory_(*s->credential), gopts);
  const llm::CallRecord rec = gateway.chat(prompt, options_.completion);
  s->history.push_back({"user", message});
  s->history.push_back({"assistant", rec.response});
  return rec.response;
}

std::vector<ChatTurn> EditorService::history(const std::string& session_id) const {
  auto s = session(session_id);
  std::lock_guard lock(s->mu);
  return s->history;
}

void EditorService::mount(httplib::Server& server) {
  server.Get("/health", guarded([this](const httplib::Request&, httplib::Response& res) {
    send_json(res, {{"status", "ok"}, {"toolchain", toolchain_ ? toolchain_->identity() : "missing"}});
  }));

  server.Get("/problems", guarded([this](const httplib::Request& req, httplib::Response& res) {
    ProblemFilter f;
    if (req.has_param("source")) f.source = req.get_param_value("source");
    if (req.has_param("domain")) f.domain = req.get_param_value("domain");
    if (req.has_param("objective")) f.objective = corpus::parse_objective(req.get_param_value("objective"));
    send_json(res, list_problems(f));
  }));

  server.Get("/problems/:id", guarded([this](const httplib::Request& req, httplib::Response& res) {
    send_json(res, get_problem(req.path_params.at("id")));
  }));

  server.Put("/problems/:id", guarded([this](const httplib::Request& req, httplib::Response& res) {
    put_problem(req.path_params.at("id"), parse_body(req));
    send_json(res, {{"saved", true}});
  }));

  server.Post("/problems/:id/execute", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const Json body = parse_body(req);
    ExecuteRequest r;
    r.solver = optional_field<std::string>(body, "solver").value_or(r.solver);
    r.timeout_seconds = optional_field<double>(body, "timeout").value_or(r.timeout_seconds);
    r.model = optional_field<std::string>(body, "model");
    r.data = optional_field<std::string>(body, "data");
    r.save = optional_field<bool>(body, "save").value_or(false);
    send_json(res, execute_problem(req.path_params.at("id"), r));
  }));

  server.Post("/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const Json body = parse_body(req);
    const std::string id =
        create_session(optional_field<std::string>(body, "instance_id"), optional_field<std::string>(body, "credential"));
    send_json(res, {{"session_id", id}}, 201);
  }));

  server.Post("/sessions/:id/chat", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const Json body = parse_body(req);
    const std::string reply = chat(req.path_params.at("id"), optional_field<std::string>(body, "message").value_or(""),
                                   optional_field<std::string>(body, "instance_id"));
    send_json(res, {{"reply", reply}});
  }));

  server.Get("/sessions/:id", guarded([this](const httplib::Request& req, httplib::Response& res) {
    Json turns = Json::array();
    for (const auto& t : history(req.path_params.at("id"))) turns.push_back({{"role", t.role}, {"text", t.text}});
    send_json(res, {{"history", turns}});
  }));

  if (options_.static_dir) {
    server.set_mount_point("/", options_.static_dir->string());
  } else {
    server.Get("/", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("<!doctype html><title>t2m editor</title><p>Editor UI assets are not configured.</p>\n",
                      "text/html");
    });
  }
}

}  // namespace t2m::editor
