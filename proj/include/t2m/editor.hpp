#pragma once

// HTTP backend of the instance editor.

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "t2m/corpus.hpp"
#include "t2m/error.hpp"
#include "t2m/harness.hpp"
#include "t2m/llm.hpp"

namespace httplib {
class Server;
}

namespace t2m::editor {

using Json = corpus::Json;

T2M_DEFINE_ERROR(NotFound);
T2M_DEFINE_ERROR(BadRequest);

class ValidationFailed : public Error {
 public:
  explicit ValidationFailed(std::vector<std::string> findings);
  const std::vector<std::string>& findings() const { return findings_; }

 private:
  std::vector<std::string> findings_;
};

struct ProblemFilter {
  std::optional<std::string> source;
  std::optional<std::string> domain;
  std::optional<corpus::Objective> objective;
};

struct ExecuteRequest {
  std::string solver = "gecode";
  double timeout_seconds = 60.0;  // [1, 600]
  std::optional<std::string> model;
  std::optional<std::string> data;
  bool save = false;
};

struct ChatTurn {
  std::string role;  // "user" or "assistant"
  std::string text;
};

// Builds the transport for a session from its credential.
using TransportFactory = std::function<std::shared_ptr<llm::Transport>(const std::string& credential)>;

class EditorService {
 public:
  struct Options {
    std::filesystem::path corpus_root;
    std::optional<std::filesystem::path> static_dir;
    llm::CompletionConfig completion;
  };

  // `toolchain` may be null; execute then fails with ToolchainMissing.
  // The default factory talks to the live endpoint with the session credential.
  EditorService(Options options, std::shared_ptr<harness::Toolchain> toolchain, TransportFactory factory = {});

  Json list_problems(const ProblemFilter& filter) const;
  Json get_problem(const std::string& id) const;
  void put_problem(const std::string& id, const Json& body);
  Json execute_problem(const std::string& id, const ExecuteRequest& request);

  // Returns the session id.
  std::string create_session(std::optional<std::string> instance_id, std::optional<std::string> credential);
  std::string chat(const std::string& session_id, const std::string& message,
                   std::optional<std::string> instance_id = std::nullopt);
  std::vector<ChatTurn> history(const std::string& session_id) const;

  void mount(httplib::Server& server);

 private:
  struct Session {
    std::mutex mu;
    std::vector<ChatTurn> history;
    std::optional<std::string> instance_id;
    std::optional<std::string> credential;
  };

  std::shared_ptr<std::mutex> instance_lock(const std::string& id) const;
  corpus::ProblemInstance load(const std::string& id) const;
  std::shared_ptr<Session> session(const std::string& id) const;
  std::string context_prompt(const Session& s, const std::string& message) const;

  Options options_;
  std::shared_ptr<harness::Toolchain> toolchain_;
  TransportFactory factory_;

  mutable std::mutex corpus_mu_;
  corpus::Corpus corpus_;
  mutable std::mutex locks_mu_;
  mutable std::map<std::string, std::shared_ptr<std::mutex>> locks_;
  mutable std::mutex sessions_mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
};

}  // namespace t2m::editor
