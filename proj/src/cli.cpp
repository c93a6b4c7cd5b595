#include "t2m/cli.hpp"

#include <CLI11.hpp>
#include <httplib.h>

#include <atomic>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "t2m/editor.hpp"
#include "t2m/grammar.hpp"

namespace t2m::cli {

namespace fs = std::filesystem;
using strategies::StrategyId;

namespace {

constexpr const char* kGarbage = "I am unable to produce a model. ]] :: {{ not minizinc";

void write_file(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw corpus::IoError("cannot write " + p.string());
  out << text;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw corpus::IoError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string make_run_id(StrategyId s) {
  std::string stamp = utc_now();
  std::erase(stamp, '-');
  std::erase(stamp, ':');
  std::random_device rd;
  char suffix[8];
  std::snprintf(suffix, sizeof suffix, "%04x", rd() & 0xffff);
  return std::string(strategies::to_string(s)) + "-" + stamp + "-" + suffix;
}

const char* mock_mode_name(MockMode m) { return m == MockMode::Oracle ? "oracle" : "garbage"; }

MockMode parse_mock_mode(std::string_view s) {
  if (s == "oracle") return MockMode::Oracle;
  if (s == "garbage") return MockMode::Garbage;
  throw Error("InvalidConfig", "unknown mock mode `" + std::string(s) + "' (oracle, garbage)");
}

std::shared_ptr<llm::Transport> instance_transport(const RunOptions& o, const corpus::ProblemInstance& inst,
                                                   const std::shared_ptr<llm::Transport>& shared) {
  if (o.transport != "mock") return shared;
  if (o.mock_mode == MockMode::Garbage)
    return std::make_shared<llm::MockTransport>([](const llm::TransportRequest&) { return std::string(kGarbage); },
                                                "mock:garbage");
  const std::string answer = "```minizinc\n" + inst.ground_truth_model.value_or("") + "\n```\n";
  return std::make_shared<llm::MockTransport>([answer](const llm::TransportRequest&) { return answer; },
                                              "mock:oracle");
}

std::shared_ptr<llm::Transport> shared_transport(const RunOptions& o) {
  if (o.transport == "live") return std::make_shared<llm::LiveTransport>(o.base_url, o.api_key_env);
  if (o.transport == "replay") {
    if (!o.trace) throw Error("InvalidConfig", "--transport replay needs --trace");
    if (!fs::is_regular_file(*o.trace)) throw corpus::IoError("trace " + o.trace->string() + " does not exist");
    return std::make_shared<llm::ReplayTransport>(*o.trace);
  }
  if (o.transport == "mock") return nullptr;
  throw Error("InvalidConfig", "unknown transport `" + o.transport + "' (live, replay, mock)");
}

std::string file_key(const std::string& name) {
  std::string out;
  for (char c : name) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') ? c : '_';
  return out;
}

struct InstanceRun {
  evaluator::InstanceOutcome outcome;
  std::vector<llm::CallRecord> calls;
};

InstanceRun run_one(const RunOptions& o, const corpus::ProblemInstance& inst, harness::Toolchain& toolchain,
                    const std::shared_ptr<llm::Transport>& shared, const std::function<void(const std::string&)>& log) {
  const std::string strategy(strategies::to_string(o.strategy));
  const fs::path dir = o.out / "instances" / file_key(inst.id());
  fs::remove_all(dir);
  llm::Gateway::Options gopts;
  gopts.defaults = o.completion;
  if (log) gopts.log = [&log, &inst](const std::string& line) { log(inst.id() + ": " + line); };
  llm::Gateway gateway(instance_transport(o, inst, shared), gopts);
  strategies::Context ctx{gateway, &toolchain, o.solver, nullptr, o.completion};

  InstanceRun r;
  Json generation = {{"strategy", strategy}, {"calls", 0}, {"degraded", false}, {"notes", Json::array()}};
  std::optional<std::string> model;
  try {
    strategies::GeneratedModel g = strategies::run_strategy(o.strategy, inst, ctx);
    r.calls = std::move(g.calls);
    model = g.model_text;
    generation["degraded"] = g.degraded;
    generation["notes"] = g.notes;
    for (const auto& [key, text] : g.intermediate) write_file(dir / "intermediate" / (file_key(key) + ".txt"), text);
  } catch (const Error& e) {
    generation["error"] = {{"kind", e.kind()}, {"message", e.what()}};
    r.outcome = evaluator::generation_failure(inst, strategy, e.kind() + ": " + e.what());
  }
  generation["calls"] = r.calls.size();

  if (model) {
    write_file(dir / "model.mzn", *model + (model->ends_with('\n') ? "" : "\n"));
    try {
      const harness::SolveResult result = toolchain.solve(*model, inst.data_text, o.solver);
      r.outcome = evaluator::judge_instance(result, inst, strategy, toolchain, o.solver);
    } catch (const Error& e) {
      r.outcome = evaluator::generation_failure(inst, strategy, e.kind() + ": " + e.what());
      r.outcome.detail = "solve failed";
    }
  }
  write_file(dir / "generation.json", generation.dump(2) + "\n");
  write_file(dir / "outcome.json", evaluator::outcome_to_json(r.outcome).dump(2) + "\n");
  llm::write_trace(r.calls, dir / "trace.jsonl");
  if (log) {
    log(inst.id() + ": " + std::string(harness::to_string(r.outcome.status)) +
        (r.outcome.executed ? " executed" : " not executed") + (r.outcome.solution_correct ? ", correct" : ""));
  }
  return r;
}

}  // namespace

RunSummary run_batch(const RunOptions& o, std::shared_ptr<harness::Toolchain> toolchain,
                     const std::function<void(const std::string&)>& log) {
  if (!toolchain) throw harness::ToolchainMissing("no MiniZinc toolchain available");
  if (o.jobs < 1) throw Error("InvalidConfig", "--jobs must be at least 1");
  const corpus::Corpus corpus = corpus::Corpus::open(o.corpus);
  std::vector<std::string> ids = o.instances;
  if (ids.empty()) {
    for (const auto& e : corpus.entries()) ids.push_back(e.id);
  }
  std::vector<corpus::ProblemInstance> selected;
  for (const auto& id : ids) {
    if (!corpus.path_of(id)) throw Error("UnknownInstance", "corpus has no instance `" + id + "'");
    selected.push_back(corpus.load(id));
  }
  const auto transport = shared_transport(o);
  fs::create_directories(o.out);
  const std::string started = utc_now();

  std::vector<InstanceRun> runs(selected.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mu;
  const std::function<void(const std::string&)> locked_log = [&](const std::string& line) {
    if (!log) return;
    std::lock_guard lock(log_mu);
    log(line);
  };
  auto worker = [&] {
    for (std::size_t i = next++; i < selected.size(); i = next++)
      runs[i] = run_one(o, selected[i], *toolchain, transport, locked_log);
  };
  std::vector<std::thread> pool;
  for (int j = 1; j < std::min<int>(o.jobs, static_cast<int>(selected.size())); ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  RunSummary summary;
  std::vector<llm::CallRecord> all_calls;
  Json instances = Json::array();
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const std::string key = file_key(selected[i].id());
    instances.push_back({{"id", selected[i].id()},
                         {"calls", runs[i].calls.size()},
                         {"outcome", "instances/" + key + "/outcome.json"},
                         {"model", "instances/" + key + "/model.mzn"},
                         {"trace", "instances/" + key + "/trace.jsonl"}});
    all_calls.insert(all_calls.end(), runs[i].calls.begin(), runs[i].calls.end());
    summary.call_counts.push_back(static_cast<int>(runs[i].calls.size()));
    summary.outcomes.push_back(std::move(runs[i].outcome));
  }
  llm::write_trace(all_calls, o.out / "trace.jsonl");

  const evaluator::EvaluationReport report = evaluator::build_report(summary.outcomes);
  write_file(o.out / "leaderboard.json", evaluator::emit_leaderboard(report, evaluator::Format::Json));
  write_file(o.out / "leaderboard.md", evaluator::emit_leaderboard(report, evaluator::Format::Markdown));
  write_file(o.out / "leaderboard.csv", evaluator::emit_leaderboard(report, evaluator::Format::Csv));

  Json tools = {{"t2m", kVersion}, {"toolchain", toolchain->identity()}};
  if (auto* mzn = dynamic_cast<harness::MiniZincToolchain*>(toolchain.get())) tools["minizinc"] = mzn->version();
  Json& m = summary.manifest;
  m["manifest_version"] = kManifestVersion;
  m["run_id"] = make_run_id(o.strategy);
  m["strategy"] = std::string(strategies::to_string(o.strategy));
  m["transport"] = {{"kind", o.transport}};
  if (o.transport == "mock") m["transport"]["mode"] = mock_mode_name(o.mock_mode);
  if (o.transport == "live") m["transport"]["base_url"] = o.base_url;
  if (o.transport == "replay") m["transport"]["source"] = fs::absolute(*o.trace).string();
  m["llm"] = {{"model", o.completion.model}, {"temperature", o.completion.temperature}, {"seed", o.completion.seed ? Json(*o.completion.seed) : Json(nullptr)}};
  m["solver"] = {{"solver", o.solver.solver}, {"time_limit_seconds", o.solver.time_limit_seconds}};
  m["corpus"] = {{"root", fs::absolute(o.corpus).lexically_normal().string()}, {"instances", ids}};
  m["jobs"] = o.jobs;
  m["started_at"] = started;
  m["finished_at"] = utc_now();
  m["trace"] = "trace.jsonl";
  m["instances"] = instances;
  m["tools"] = tools;
  write_file(o.out / "manifest.json", m.dump(2) + "\n");
  return summary;
}

RunOptions options_from_manifest(const fs::path& manifest_path) {
  const Json m = Json::parse(read_file(manifest_path));
  RunOptions o;
  o.strategy = strategies::parse_strategy(m.at("strategy").get<std::string>());
  o.corpus = m.at("corpus").at("root").get<std::string>();
  o.instances = m.at("corpus").at("instances").get<std::vector<std::string>>();
  o.transport = "replay";
  o.trace = manifest_path.parent_path() / m.value("trace", "trace.jsonl");
  o.solver.solver = m.at("solver").value("solver", o.solver.solver);
  o.solver.time_limit_seconds = m.at("solver").value("time_limit_seconds", o.solver.time_limit_seconds);
  if (m.contains("llm")) {
    o.completion.model = m["llm"].value("model", o.completion.model);
    o.completion.temperature = m["llm"].value("temperature", o.completion.temperature);
    if (m["llm"].contains("seed") && m["llm"]["seed"].is_number()) o.completion.seed = m["llm"]["seed"].get<long long>();
  }
  return o;
}

std::vector<evaluator::InstanceOutcome> load_outcomes(const fs::path& run_dir) {
  const Json m = Json::parse(read_file(run_dir / "manifest.json"));
  std::vector<evaluator::InstanceOutcome> out;
  for (const auto& e : m.at("instances"))
    out.push_back(evaluator::outcome_from_json(Json::parse(read_file(run_dir / e.at("outcome").get<std::string>()))));
  return out;
}

namespace {

std::shared_ptr<harness::Toolchain> make_toolchain(const std::string& path, int parallel) {
  std::string exe = path;
  if (exe.empty()) {
    auto found = harness::MiniZincToolchain::locate();
    if (!found) throw harness::ToolchainMissing("no MiniZinc executable: set T2M_MINIZINC, put minizinc on PATH or pass --minizinc");
    exe = *found;
  }
  return std::make_shared<harness::MemoToolchain>(std::make_shared<harness::MiniZincToolchain>(exe, parallel));
}

std::string strategy_list() {
  std::string out;
  for (StrategyId id : strategies::kAllStrategies) out += (out.empty() ? "" : ", ") + std::string(strategies::to_string(id));
  return out;
}

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int cmd_run(const RunOptions& base, const std::string& strategy_name, const std::string& mock_mode,
            const std::optional<fs::path>& from_manifest, const std::string& minizinc, const std::string& format,
            std::ostream& out, std::ostream& err) {
  RunOptions o = base;
  if (from_manifest) {
    RunOptions m = options_from_manifest(*from_manifest);
    m.out = base.out;
    m.jobs = base.jobs;
    o = m;
  } else {
    if (strategy_name.empty()) throw UsageError("--strategy is required (one of: " + strategy_list() + ")");
    try {
      o.strategy = strategies::parse_strategy(strategy_name);
    } catch (const strategies::UnknownStrategy& e) {
      throw UsageError(e.what());
    }
    if (o.corpus.empty()) throw UsageError("--corpus is required");
    o.mock_mode = parse_mock_mode(mock_mode);
  }
  const auto fmt = evaluator::parse_format(format);
  std::mutex mu;
  const RunSummary s = run_batch(o, make_toolchain(minizinc, o.jobs), [&](const std::string& line) {
    std::lock_guard lock(mu);
    err << line << '\n';
  });
  out << evaluator::emit_leaderboard(evaluator::build_report(s.outcomes), fmt);
  err << "manifest: " << (o.out / "manifest.json").string() << '\n';
  return 0;
}

int cmd_evaluate(const std::vector<fs::path>& runs, const std::string& corpus_override, bool rejudge,
                 const std::string& minizinc, const std::string& format, const std::string& output, std::ostream& out) {
  std::vector<evaluator::InstanceOutcome> all;
  std::shared_ptr<harness::Toolchain> toolchain;
  for (const auto& dir : runs) {
    if (!rejudge) {
      auto outcomes = load_outcomes(dir);
      all.insert(all.end(), outcomes.begin(), outcomes.end());
      continue;
    }
    if (!toolchain) toolchain = make_toolchain(minizinc, 1);
    const Json m = Json::parse(read_file(dir / "manifest.json"));
    const RunOptions o = options_from_manifest(dir / "manifest.json");
    const corpus::Corpus c = corpus::Corpus::open(corpus_override.empty() ? o.corpus : fs::path(corpus_override));
    for (const auto& e : m.at("instances")) {
      const corpus::ProblemInstance inst = c.load(e.at("id").get<std::string>());
      const fs::path model = dir / e.at("model").get<std::string>();
      if (!fs::is_regular_file(model)) {
        all.push_back(evaluator::outcome_from_json(Json::parse(read_file(dir / e.at("outcome").get<std::string>()))));
        continue;
      }
      const std::string text = read_file(model);
      all.push_back(evaluator::judge_instance(toolchain->solve(text, inst.data_text, o.solver), inst,
                                              std::string(strategies::to_string(o.strategy)), *toolchain, o.solver));
    }
  }
  const std::string text = evaluator::emit_leaderboard(evaluator::build_report(all), evaluator::parse_format(format));
  if (!output.empty()) write_file(output, text);
  out << text;
  return 0;
}

int cmd_check(const std::vector<fs::path>& files, const std::string& grammar_path, std::ostream& out) {
  std::optional<grammar::GrammarSpec> custom;
  if (!grammar_path.empty()) custom = grammar::load_grammar(read_file(grammar_path));
  const grammar::GrammarSpec& g = custom ? *custom : grammar::minizinc_grammar();
  bool clean = true;
  for (const auto& f : files) {
    const auto diags = grammar::validate_syntax(read_file(f), g);
    if (diags.empty()) {
      out << f.string() << ": ok\n";
      continue;
    }
    clean = false;
    std::istringstream lines(grammar::format_diagnostics(diags));
    for (std::string line; std::getline(lines, line);) out << f.string() << ':' << line << '\n';
  }
  return clean ? 0 : 1;
}

int cmd_validate_corpus(const fs::path& root, bool solve, double time_limit, const std::string& minizinc,
                        std::ostream& out) {
  const corpus::Corpus c = corpus::Corpus::open(root);
  std::shared_ptr<harness::Toolchain> toolchain;
  if (solve) toolchain = make_toolchain(minizinc, 1);
  harness::SolverConfig config;
  config.time_limit_seconds = time_limit;
  int bad = 0;
  for (const auto& e : c.entries()) {
    std::vector<std::string> problems;
    try {
      const corpus::ProblemInstance inst = c.load(e.id);
      problems = corpus::check_invariants(inst);
      for (const auto& f : corpus::cross_validate(inst)) problems.push_back(f.message);
      if (toolchain && inst.ground_truth_model) {
        const auto result = toolchain->solve(*inst.ground_truth_model, inst.data_text, config);
        const auto o = evaluator::judge_instance(result, inst, "ground_truth", *toolchain, config);
        if (!o.executed) problems.push_back("ground truth does not execute: " + o.error);
        else if (!o.excluded && !o.solution_correct) problems.push_back("ground truth disagrees with output.json: " + o.detail);
      }
    } catch (const std::exception& ex) {
      problems.push_back(ex.what());
    }
    if (problems.empty()) {
      out << e.id << ": ok\n";
    } else {
      ++bad;
      for (const auto& p : problems) out << e.id << ": " << p << '\n';
    }
  }
  out << c.entries().size() - bad << " of " << c.entries().size() << " instances valid\n";
  return bad ? 1 : 0;
}

int cmd_serve(const fs::path& corpus_root, const std::string& listen, int jobs, const std::string& static_dir,
              const std::string& minizinc, std::ostream& err) {
  const auto colon = listen.rfind(':');
  if (colon == std::string::npos) throw UsageError("--listen expects HOST:PORT");
  const std::string host = listen.substr(0, colon);
  const int port = std::stoi(listen.substr(colon + 1));
  std::shared_ptr<harness::Toolchain> toolchain;
  try {
    toolchain = make_toolchain(minizinc, jobs);
  } catch (const harness::ToolchainMissing& e) {
    err << "warning: " << e.what() << "; execute requests will fail\n";
  }
  editor::EditorService::Options opts;
  opts.corpus_root = corpus_root;
  if (!static_dir.empty()) opts.static_dir = static_dir;
  editor::EditorService service(opts, toolchain);
  httplib::Server server;
  service.mount(server);
  err << "serving " << corpus_root.string() << " on http://" << listen << '\n';
  if (!server.listen(host, port)) throw Error("ListenFailed", "cannot listen on " + listen);
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Text-to-MiniZinc copilot pipeline and benchmark harness", "t2m"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  RunOptions run;
  std::string strategy_name, mock_mode = "oracle", run_minizinc, run_format = "markdown";
  std::optional<fs::path> from_manifest;
  std::string trace;
  auto* run_cmd = app.add_subcommand("run", "Run one strategy over a corpus, solve and judge every model");
  run_cmd->add_option("--strategy", strategy_name, "Strategy id: " + strategy_list());
  run_cmd->add_option("--corpus", run.corpus, "Corpus root")->envname("T2M_CORPUS");
  run_cmd->add_option("--instance", run.instances, "Instance id (repeatable; default all)");
  run_cmd->add_option("--transport", run.transport, "live | replay | mock")->capture_default_str();
  run_cmd->add_option("--mock-mode", mock_mode, "oracle | garbage")->capture_default_str();
  run_cmd->add_option("--trace", trace, "Trace to replay (replay transport)");
  run_cmd->add_option("--from-manifest", from_manifest, "Replay the run described by this manifest");
  run_cmd->add_option("--out", run.out, "Output directory")->required();
  run_cmd->add_option("--jobs", run.jobs, "Instances processed in parallel")->capture_default_str();
  run_cmd->add_option("--solver", run.solver.solver, "MiniZinc solver tag")->capture_default_str();
  run_cmd->add_option("--time-limit", run.solver.time_limit_seconds, "Solver time limit in seconds")->capture_default_str();
  run_cmd->add_option("--llm-model", run.completion.model, "Chat-completion model")->capture_default_str();
  run_cmd->add_option("--temperature", run.completion.temperature, "Sampling temperature")->capture_default_str();
  run_cmd->add_option("--base-url", run.base_url, "Live endpoint base URL")->capture_default_str();
  run_cmd->add_option("--api-key-env", run.api_key_env, "Variable holding the live credential")->capture_default_str();
  run_cmd->add_option("--minizinc", run_minizinc, "MiniZinc executable");
  run_cmd->add_option("--format", run_format, "Leaderboard on stdout: json | markdown | csv")->capture_default_str();

  std::vector<fs::path> eval_runs;
  std::string eval_corpus, eval_minizinc, eval_format = "markdown", eval_output;
  bool rejudge = false;
  auto* eval_cmd = app.add_subcommand("evaluate", "Aggregate run directories into a leaderboard");
  eval_cmd->add_option("runs", eval_runs, "Run directories")->required()->check(CLI::ExistingDirectory);
  eval_cmd->add_flag("--rejudge", rejudge, "Solve and judge the stored models again");
  eval_cmd->add_option("--corpus", eval_corpus, "Corpus root (default: the one in each manifest)");
  eval_cmd->add_option("--minizinc", eval_minizinc, "MiniZinc executable");
  eval_cmd->add_option("--format", eval_format, "json | markdown | csv")->capture_default_str();
  eval_cmd->add_option("--output", eval_output, "Also write the leaderboard here");

  std::vector<fs::path> check_files;
  std::string grammar_path;
  auto* check_cmd = app.add_subcommand("check", "Check model files against the MiniZinc grammar");
  check_cmd->add_option("files", check_files, "Model files")->required()->check(CLI::ExistingFile);
  check_cmd->add_option("--grammar", grammar_path, "BNF grammar file (default: bundled)");

  fs::path vc_root;
  bool vc_solve = false;
  double vc_limit = 60;
  std::string vc_minizinc;
  auto* vc_cmd = app.add_subcommand("validate-corpus", "Check every instance of a corpus");
  vc_cmd->add_option("--corpus", vc_root, "Corpus root")->required()->envname("T2M_CORPUS");
  vc_cmd->add_flag("--solve", vc_solve, "Also run each ground truth and compare with output.json");
  vc_cmd->add_option("--time-limit", vc_limit, "Solver time limit in seconds")->capture_default_str();
  vc_cmd->add_option("--minizinc", vc_minizinc, "MiniZinc executable");

  fs::path serve_root;
  std::string listen = "127.0.0.1:8080", static_dir, serve_minizinc;
  int serve_jobs = 2;
  auto* serve_cmd = app.add_subcommand("serve", "Serve the editor HTTP API");
  serve_cmd->add_option("--corpus", serve_root, "Corpus root")->required()->envname("T2M_CORPUS");
  serve_cmd->add_option("--listen", listen, "HOST:PORT")->envname("T2M_LISTEN")->capture_default_str();
  serve_cmd->add_option("--jobs", serve_jobs, "Concurrent solver runs")->envname("T2M_JOBS")->capture_default_str();
  serve_cmd->add_option("--static", static_dir, "Built editor UI assets served at /");
  serve_cmd->add_option("--minizinc", serve_minizinc, "MiniZinc executable");

  std::vector<std::string> argv_storage = {"t2m"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n' << "run `t2m --help` for usage\n";
    return 2;
  }

  try {
    if (*run_cmd) {
      if (!trace.empty()) run.trace = trace;
      return cmd_run(run, strategy_name, mock_mode, from_manifest, run_minizinc, run_format, out, err);
    }
    if (*eval_cmd) return cmd_evaluate(eval_runs, eval_corpus, rejudge, eval_minizinc, eval_format, eval_output, out);
    if (*check_cmd) return cmd_check(check_files, grammar_path, out);
    if (*vc_cmd) return cmd_validate_corpus(vc_root, vc_solve, vc_limit, vc_minizinc, out);
    if (*serve_cmd) return cmd_serve(serve_root, listen, serve_jobs, static_dir, serve_minizinc, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.kind() << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace t2m::cli
