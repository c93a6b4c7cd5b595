#include "t2m/strategies.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "t2m/dzn.hpp"

namespace t2m::strategies {

using llm::TemplateId;

std::string_view to_string(StrategyId id) {
  switch (id) {
    case StrategyId::ZeroShot: return "zero_shot";
    case StrategyId::CoT: return "cot";
    case StrategyId::KnowledgeGraph: return "knowledge_graph";
    case StrategyId::CoTCode: return "cot_code";
    case StrategyId::CoTGrammar: return "cot_grammar";
    case StrategyId::CoTCodeGrammar: return "cot_code_grammar";
    case StrategyId::Agentic: return "agentic";
    case StrategyId::AgenticCode: return "agentic_code";
  }
  return "";
}

StrategyId parse_strategy(std::string_view name) {
  std::string known;
  for (StrategyId id : kAllStrategies) {
    if (to_string(id) == name) return id;
    if (!known.empty()) known += ", ";
    known += to_string(id);
  }
  throw UnknownStrategy("unknown strategy `" + std::string(name) + "' (expected one of: " + known + ")");
}

int call_budget(StrategyId id) {
  switch (id) {
    case StrategyId::ZeroShot: return 1;
    case StrategyId::CoT: return 1;
    case StrategyId::KnowledgeGraph: return 2;
    case StrategyId::CoTCode: return 2;
    case StrategyId::CoTGrammar: return 2;
    case StrategyId::CoTCodeGrammar: return 3;
    case StrategyId::Agentic: return 4;
    case StrategyId::AgenticCode: return 5;
  }
  return 0;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

struct Fence {
  std::string tag;
  std::string body;
};

std::vector<Fence> fences(std::string_view text) {
  std::vector<Fence> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t open = text.find("```", pos);
    if (open == std::string_view::npos) break;
    const std::size_t eol = text.find('\n', open);
    if (eol == std::string_view::npos) break;
    Fence f;
    f.tag = lower(trim(text.substr(open + 3, eol - open - 3)));
    std::size_t close = text.find("```", eol + 1);
    // Closing fences sit at the start of a line.
    while (close != std::string_view::npos && close > 0 && text[close - 1] != '\n') close = text.find("```", close + 3);
    f.body = std::string(text.substr(eol + 1, close == std::string_view::npos ? std::string_view::npos : close - eol - 1));
    out.push_back(std::move(f));
    if (close == std::string_view::npos) break;
    pos = close + 3;
  }
  return out;
}

}  // namespace

std::string extract_code(std::string_view response) {
  if (trim(response).empty()) throw EmptyResponse("empty response");
  const auto blocks = fences(response);
  std::string code;
  auto tagged = std::find_if(blocks.begin(), blocks.end(),
                             [](const Fence& f) { return f.tag == "minizinc" || f.tag == "mzn"; });
  if (tagged != blocks.end()) code = tagged->body;
  else if (!blocks.empty()) code = blocks.front().body;
  else code = std::string(response);
  code = std::string(trim(code));
  if (code.empty()) throw EmptyResponse("response contains no code");
  return code;
}

std::string objective_type(corpus::Objective objective) {
  switch (objective) {
    case corpus::Objective::Minimize: return "minimization";
    case corpus::Objective::Maximize: return "maximization";
    case corpus::Objective::Satisfy: return "satisfaction";
  }
  return "satisfaction";
}

namespace {

constexpr std::size_t kExampleValues = 5;

std::string examples_of(const dzn::Value& v) {
  if (!v.is_array()) return dzn::format_value(v);
  const auto& elems = v.array().elements;
  std::string out;
  for (std::size_t i = 0; i < std::min(kExampleValues, elems.size()); ++i) {
    if (i) out += ", ";
    out += dzn::format_value(elems[i]);
  }
  if (elems.size() > kExampleValues) out += ", ... (" + std::to_string(elems.size()) + " values)";
  return "[" + out + "]";
}

}  // namespace

std::string data_nomenclature(const corpus::ProblemInstance& instance) {
  dzn::Bindings data;
  try {
    data = dzn::parse(instance.data_text);
  } catch (const std::exception&) {
    // Examples are best effort; the names and shapes still go out.
  }
  std::ostringstream out;
  for (const auto& p : instance.input.parameters) {
    out << p.symbol << " (";
    if (p.shape.empty()) {
      out << "scalar";
    } else {
      for (std::size_t i = 0; i < p.shape.size(); ++i) out << (i ? ", " : "") << p.shape[i];
    }
    out << "): " << p.definition;
    if (const dzn::Value* v = data.find(p.symbol)) out << "\n  example: " << p.symbol << " = " << examples_of(*v);
    out << '\n';
  }
  if (!instance.input.output.empty()) {
    out << "Output:\n";
    for (const auto& o : instance.input.output) {
      out << o.symbol << " (";
      if (o.shape.empty()) {
        out << "scalar";
      } else {
        for (std::size_t i = 0; i < o.shape.size(); ++i) out << (i ? ", " : "") << o.shape[i];
      }
      out << "): " << o.definition << '\n';
    }
  }
  std::string text = out.str();
  if (!text.empty() && text.back() == '\n') text.pop_back();
  return text;
}

namespace {

class Session {
 public:
  Session(StrategyId id, const corpus::ProblemInstance& instance, Context& ctx)
      : instance_(instance), ctx_(ctx), run_(ctx.gateway.start_run(call_budget(id))) {
    result_.strategy = id;
    nomenclature_ = data_nomenclature(instance);
  }

  llm::Slots base_slots() const {
    return {{"problem_description", instance_.input.description}, {"data_nomenclature", nomenclature_}};
  }

  std::string call(TemplateId id, const llm::Slots& slots) {
    std::string prompt = llm::render_prompt(id, slots);
    if (trim(instance_.data_text).empty()) prompt = llm::augment_for_empty_data(prompt);
    llm::CallRecord rec = ctx_.completion ? run_->complete(id, prompt, *ctx_.completion) : run_->complete(id, prompt);
    std::string response = rec.response;
    result_.calls.push_back(std::move(rec));
    return response;
  }

  // Repair call output, or the current model when the call gave no code.
  void repair(TemplateId id, const llm::Slots& slots, const std::string& label) {
    const std::string response = call(id, slots);
    result_.intermediate["pre_" + label + "_model"] = result_.model_text;
    try {
      result_.model_text = extract_code(response);
    } catch (const EmptyResponse&) {
      result_.degraded = true;
      result_.notes.push_back(label + " returned no code; kept the previous model");
    }
  }

  void code_validation() {
    if (!ctx_.toolchain) throw Error("InvalidConfig", "code validation needs a MiniZinc toolchain");
    const harness::SolveResult r = ctx_.toolchain->solve(result_.model_text, instance_.data_text, ctx_.solver);
    std::string message;
    if ((r.status == harness::Status::CompileError || r.status == harness::Status::RuntimeError) && r.error) {
      message = r.error->raw;
    }
    result_.intermediate["code_validation_error"] = message;
    llm::Slots slots = base_slots();
    slots["objective_type"] = objective_type(instance_.objective());
    slots["minizinc_code"] = result_.model_text;
    slots["syntax_error_message"] = message;
    repair(TemplateId::CodeValidation, slots, "code_validation");
    result_.notes.push_back("scored model is the post-repair model; it was not re-validated");
  }

  void grammar_validation() {
    const grammar::GrammarSpec& g = ctx_.grammar ? *ctx_.grammar : grammar::minizinc_grammar();
    const std::string message = grammar::format_diagnostics(grammar::validate_syntax(result_.model_text, g));
    result_.intermediate["grammar_diagnostics"] = message;
    llm::Slots slots = base_slots();
    slots["current_code"] = result_.model_text;
    slots["syntax_error_message"] = message;
    slots["minizinc_grammar"] = grammar::render_grammar_for_prompt(g);
    repair(TemplateId::GrammarValidation, slots, "grammar_validation");
  }

  std::string fragment(TemplateId id, const llm::Slots& slots, const std::string& stage) {
    try {
      std::string code = extract_code(call(id, slots));
      result_.intermediate[stage] = code;
      return code;
    } catch (const EmptyResponse&) {
      throw FragmentEmpty(stage);
    }
  }

  GeneratedModel& result() { return result_; }
  const corpus::ProblemInstance& instance() const { return instance_; }

 private:
  const corpus::ProblemInstance& instance_;
  Context& ctx_;
  std::unique_ptr<llm::Run> run_;
  std::string nomenclature_;
  GeneratedModel result_;
};

void zero_shot(Session& s) { s.result().model_text = extract_code(s.call(TemplateId::Baseline, s.base_slots())); }

void cot(Session& s) { s.result().model_text = extract_code(s.call(TemplateId::Cot, s.base_slots())); }

void knowledge_graph(Session& s) {
  const std::string ttl(trim(s.call(TemplateId::KgCreate, s.base_slots())));
  if (ttl.empty()) throw KgEmpty("knowledge-graph call returned blank text");
  s.result().intermediate["ttl"] = ttl;
  llm::Slots slots = s.base_slots();
  slots["knowledge_graph"] = ttl;
  s.result().model_text = extract_code(s.call(TemplateId::KgCodegen, slots));
}

void agentic(Session& s) {
  llm::Slots slots = s.base_slots();
  slots["parameters_and_variables"] = s.fragment(TemplateId::AgenticParamsVars, slots, "params_vars");
  slots["constraints"] = s.fragment(TemplateId::AgenticConstraints, slots, "constraints");
  slots["objective"] = s.fragment(TemplateId::AgenticObjective, slots, "objective");
  s.result().model_text = s.fragment(TemplateId::AgenticStitch, slots, "stitch");
}

}  // namespace

GeneratedModel run_strategy(StrategyId id, const corpus::ProblemInstance& instance, Context& ctx) {
  Session s(id, instance, ctx);
  switch (id) {
    case StrategyId::ZeroShot: zero_shot(s); break;
    case StrategyId::CoT: cot(s); break;
    case StrategyId::KnowledgeGraph: knowledge_graph(s); break;
    case StrategyId::CoTCode:
      cot(s);
      s.code_validation();
      break;
    case StrategyId::CoTGrammar:
      cot(s);
      s.grammar_validation();
      break;
    case StrategyId::CoTCodeGrammar:
      cot(s);
      s.code_validation();
      s.grammar_validation();
      break;
    case StrategyId::Agentic: agentic(s); break;
    case StrategyId::AgenticCode:
      agentic(s);
      s.code_validation();
      break;
  }
  return std::move(s.result());
}

GeneratedModel run_zero_shot(const corpus::ProblemInstance& instance, Context& ctx) {
  return run_strategy(StrategyId::ZeroShot, instance, ctx);
}
GeneratedModel run_cot(const corpus::ProblemInstance& instance, Context& ctx) {
  return run_strategy(StrategyId::CoT, instance, ctx);
}
GeneratedModel run_knowledge_graph(const corpus::ProblemInstance& instance, Context& ctx) {
  return run_strategy(StrategyId::KnowledgeGraph, instance, ctx);
}
GeneratedModel run_agentic(const corpus::ProblemInstance& instance, Context& ctx) {
  return run_strategy(StrategyId::Agentic, instance, ctx);
}

}  // namespace t2m::strategies
