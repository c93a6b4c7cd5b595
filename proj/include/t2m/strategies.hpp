#pragma once

// The eight copilot strategies: prompt chains that turn a problem instance
// into a MiniZinc model through the LLM gateway.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "t2m/corpus.hpp"
#include "t2m/error.hpp"
#include "t2m/grammar.hpp"
#include "t2m/harness.hpp"
#include "t2m/llm.hpp"

namespace t2m::strategies {

T2M_DEFINE_ERROR(EmptyResponse);
T2M_DEFINE_ERROR(KgEmpty);
T2M_DEFINE_ERROR(UnknownStrategy);

class FragmentEmpty : public Error {
 public:
  explicit FragmentEmpty(std::string stage)
      : Error("FragmentEmpty", "stage `" + stage + "' produced no code"), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

enum class StrategyId { ZeroShot, CoT, KnowledgeGraph, CoTCode, CoTGrammar, CoTCodeGrammar, Agentic, AgenticCode };

inline constexpr StrategyId kAllStrategies[] = {
    StrategyId::ZeroShot,       StrategyId::CoT,     StrategyId::KnowledgeGraph, StrategyId::CoTCode,
    StrategyId::CoTGrammar,     StrategyId::CoTCodeGrammar, StrategyId::Agentic, StrategyId::AgenticCode,
};

std::string_view to_string(StrategyId id);
// Throws UnknownStrategy naming the eight ids.
StrategyId parse_strategy(std::string_view name);
// Number of LLM calls every run of the strategy makes.
int call_budget(StrategyId id);

struct GeneratedModel {
  std::string model_text;
  StrategyId strategy = StrategyId::ZeroShot;
  std::vector<llm::CallRecord> calls;
  // "ttl", "params_vars", "constraints", "objective", "pre_repair_model", ...
  std::map<std::string, std::string> intermediate;
  // A repair call returned no code and the previous model was kept.
  bool degraded = false;
  std::vector<std::string> notes;
};

struct Context {
  llm::Gateway& gateway;
  // Needed by the code-validation strategies.
  harness::Toolchain* toolchain = nullptr;
  harness::SolverConfig solver;
  const grammar::GrammarSpec* grammar = nullptr;  // minizinc_grammar() when null
  std::optional<llm::CompletionConfig> completion;
};

// First ```minizinc block, else the first fenced block, else the trimmed
// text. Throws EmptyResponse when nothing is left.
std::string extract_code(std::string_view response);

// "symbol (shape): definition" per parameter, with example values from the
// data file.
std::string data_nomenclature(const corpus::ProblemInstance& instance);
// "minimization", "maximization" or "satisfaction".
std::string objective_type(corpus::Objective objective);

GeneratedModel run_strategy(StrategyId id, const corpus::ProblemInstance& instance, Context& ctx);

GeneratedModel run_zero_shot(const corpus::ProblemInstance& instance, Context& ctx);
GeneratedModel run_cot(const corpus::ProblemInstance& instance, Context& ctx);
GeneratedModel run_knowledge_graph(const corpus::ProblemInstance& instance, Context& ctx);
GeneratedModel run_agentic(const corpus::ProblemInstance& instance, Context& ctx);

}  // namespace t2m::strategies
