#include <gtest/gtest.h>

#include "t2m/strategies.hpp"
#include "test_util.hpp"

using namespace t2m;
using namespace t2m::strategies;
using llm::TemplateId;

namespace {

const std::filesystem::path kData(T2M_TEST_DATA_DIR);

harness::Toolchain& toolchain() {
  static harness::MemoToolchain tc(std::make_shared<harness::MiniZincToolchain>(T2M_MINIZINC));
  return tc;
}

harness::SolverConfig solver() {
  harness::SolverConfig c;
  c.time_limit_seconds = 20;
  return c;
}

const corpus::Corpus& fixtures() {
  static const corpus::Corpus c = corpus::Corpus::open(kData / "corpus");
  return c;
}

std::shared_ptr<llm::MockTransport> constant(std::string text) {
  return std::make_shared<llm::MockTransport>([text](const llm::TransportRequest&) { return text; });
}

// Answers by template id; unknown ids get `fallback`.
std::shared_ptr<llm::MockTransport> by_template(std::map<std::string, std::string> answers, std::string fallback,
                                                std::vector<llm::TransportRequest>* seen = nullptr) {
  return std::make_shared<llm::MockTransport>([=](const llm::TransportRequest& r) {
    if (seen) seen->push_back(r);
    auto it = answers.find(r.template_id);
    return it == answers.end() ? fallback : it->second;
  });
}

GeneratedModel run(StrategyId id, const corpus::ProblemInstance& inst, std::shared_ptr<llm::Transport> t) {
  llm::Gateway gw(std::move(t));
  Context ctx{gw, &toolchain(), solver(), nullptr, std::nullopt};
  return run_strategy(id, inst, ctx);
}

const std::string& prompt_of(const GeneratedModel& m, TemplateId id) {
  for (const auto& c : m.calls) {
    if (c.template_id == llm::to_string(id)) return c.prompt;
  }
  static const std::string none;
  ADD_FAILURE() << "no call for " << llm::to_string(id);
  return none;
}

}  // namespace

TEST(ExtractCode, FencedMiniZinc) { EXPECT_EQ(extract_code("```minizinc\nvar int: x;\n```"), "var int: x;"); }

TEST(ExtractCode, PlainText) { EXPECT_EQ(extract_code("  var int: x;\n"), "var int: x;"); }

TEST(ExtractCode, ProseAndTwoBlocks) {
  EXPECT_EQ(extract_code("Here is the model:\n```\nint: a;\n```\nand a variant:\n```\nint: b;\n```\n"), "int: a;");
  EXPECT_EQ(extract_code("Sketch:\n```text\nplan\n```\nModel:\n```minizinc\nint: b;\n```\n"), "int: b;");
  EXPECT_EQ(extract_code("```MiniZinc\nint: c;\n```"), "int: c;");
}

TEST(ExtractCode, UnclosedFenceAndInlineTicks) {
  EXPECT_EQ(extract_code("```minizinc\nvar 1..3: x;\nsolve satisfy;"), "var 1..3: x;\nsolve satisfy;");
  EXPECT_EQ(extract_code("```minizinc\nvar 1..3: x; % use ```x```\n```"), "var 1..3: x; % use ```x```");
}

TEST(ExtractCode, Empty) {
  EXPECT_THROW(extract_code(""), EmptyResponse);
  EXPECT_THROW(extract_code(" \n\t"), EmptyResponse);
  EXPECT_THROW(extract_code("```minizinc\n\n```"), EmptyResponse);
}

TEST(Strategies, BudgetTable) {
  const std::vector<int> want = {1, 1, 2, 2, 2, 3, 4, 5};
  for (std::size_t i = 0; i < std::size(kAllStrategies); ++i) EXPECT_EQ(call_budget(kAllStrategies[i]), want[i]);
}

TEST(Strategies, UnknownStrategyListsIds) {
  try {
    parse_strategy("few_shot");
    FAIL();
  } catch (const UnknownStrategy& e) {
    for (StrategyId id : kAllStrategies) EXPECT_NE(std::string(e.what()).find(to_string(id)), std::string::npos);
  }
  EXPECT_EQ(parse_strategy("agentic_code"), StrategyId::AgenticCode);
}

TEST(Strategies, Nomenclature) {
  const auto inst = fixtures().load("nlp4lp_knapsack");
  const std::string text = data_nomenclature(inst);
  EXPECT_NE(text.find("C (scalar): Truck capacity in kilograms\n  example: C = 26"), std::string::npos);
  EXPECT_NE(text.find("Weight (N): Weight of each crate\n  example: Weight = [12, 7, 11, 8, 9]"), std::string::npos);
  EXPECT_NE(text.find("Load (N)"), std::string::npos);
}

TEST(Strategies, ZeroShotPassesGroundTruthThrough) {
  const auto inst = fixtures().load("nlp4lp_knapsack");
  const auto m = run(StrategyId::ZeroShot, inst, constant(*inst.ground_truth_model));
  EXPECT_EQ(m.model_text, extract_code(*inst.ground_truth_model));
  ASSERT_EQ(m.calls.size(), 1u);
  EXPECT_EQ(m.calls[0].template_id, "baseline");
  EXPECT_EQ(m.calls[0].prompt.find("embed all data directly"), std::string::npos);
}

TEST(Strategies, EmptyDataPromptsCarryNotes) {
  const auto inst = fixtures().load("csplib_send_more_money");
  for (StrategyId id : {StrategyId::ZeroShot, StrategyId::Agentic}) {
    const auto m = run(id, inst, constant(*inst.ground_truth_model));
    for (const auto& c : m.calls) {
      EXPECT_NE(c.prompt.find("embed all data directly"), std::string::npos) << c.template_id;
      EXPECT_NE(c.prompt.find("Do NOT generate CPOPT"), std::string::npos) << c.template_id;
    }
  }
}

TEST(Strategies, CoTSkeletonAndEcho) {
  const auto inst = fixtures().load("lpwp_assignment");
  const auto m = run(StrategyId::CoT, inst, llm::echo_transport());
  ASSERT_EQ(m.calls.size(), 1u);
  EXPECT_NE(m.calls[0].prompt.find("% Parameters\n% Variables\n% Constraints\n% Objective"), std::string::npos);
  EXPECT_EQ(m.model_text, extract_code(m.calls[0].prompt));
}

TEST(Strategies, KnowledgeGraphChainsTtl) {
  const std::string ttl = t2m::testing::read_text(kData / "kg_example.ttl");
  const auto inst = fixtures().load("nlp4lp_production");
  const auto m = run(StrategyId::KnowledgeGraph, inst,
                     by_template({{"kg_create", ttl}}, "```minizinc\n" + *inst.ground_truth_model + "```"));
  ASSERT_EQ(m.calls.size(), 2u);
  EXPECT_EQ(m.calls[0].template_id, "kg_create");
  EXPECT_EQ(m.calls[1].template_id, "kg_codegen");
  EXPECT_NE(m.intermediate.at("ttl").find(":MaximizeRevenue a :Objective"), std::string::npos);
  const std::string trimmed = m.intermediate.at("ttl");
  EXPECT_NE(m.calls[1].prompt.find("Knowledge Graph:\n```\n" + trimmed + "\n```"), std::string::npos);
  EXPECT_EQ(m.model_text, extract_code(*inst.ground_truth_model));
}

TEST(Strategies, KnowledgeGraphBlank) {
  const auto inst = fixtures().load("nlp4lp_production");
  EXPECT_THROW(run(StrategyId::KnowledgeGraph, inst, by_template({{"kg_create", "  \n"}}, "int: x;")), KgEmpty);
}

TEST(Strategies, CodeValidationCarriesSolverError) {
  const auto inst = fixtures().load("nlp4lp_knapsack");
  const std::string broken = "int: N;\nvar 1..N: x;\nconstraint forall(i where i > 2)(x > i);\nsolve satisfy;";
  const auto m =
      run(StrategyId::CoTCode, inst, by_template({{"cot", broken}}, "```minizinc\n" + *inst.ground_truth_model + "```"));
  ASSERT_EQ(m.calls.size(), 2u);
  const std::string& repair = prompt_of(m, TemplateId::CodeValidation);
  const std::string err = m.intermediate.at("code_validation_error");
  EXPECT_NE(err.find("syntax error"), std::string::npos);
  EXPECT_NE(repair.find("Error message after execution:\n" + err), std::string::npos);
  EXPECT_NE(repair.find("```minizinc\n" + broken + "\n```"), std::string::npos);
  EXPECT_NE(repair.find("Objective Type:\nmaximization"), std::string::npos);
  EXPECT_EQ(m.model_text, extract_code(*inst.ground_truth_model));
  EXPECT_EQ(m.intermediate.at("pre_code_validation_model"), broken);
}

TEST(Strategies, CodeValidationRunsEvenWhenModelCompiles) {
  const auto inst = fixtures().load("nlp4lp_knapsack");
  const auto m = run(StrategyId::CoTCode, inst, constant(*inst.ground_truth_model));
  ASSERT_EQ(m.calls.size(), 2u);
  EXPECT_EQ(m.intermediate.at("code_validation_error"), "");
}

TEST(Strategies, GrammarValidationPrompt) {
  const auto inst = fixtures().load("nlp4lp_knapsack");
  const std::string broken = "int: N;\nvar bool: b = True;\nsolve satisfy;";
  const auto m = run(StrategyId::CoTGrammar, inst, by_template({{"cot", broken}}, *inst.ground_truth_model));
  ASSERT_EQ(m.calls.size(), 2u);
  const std::string& p = prompt_of(m, TemplateId::GrammarValidation);
  EXPECT_NE(p.find("MiniZinc Grammar Specification:\n" + grammar::render_grammar_for_prompt(grammar::minizinc_grammar())),
            std::string::npos);
  EXPECT_NE(p.find("Current Code with Syntax Errors:\n" + broken), std::string::npos);
  EXPECT_NE(p.find("2:15: syntax error"), std::string::npos);
}

TEST(Strategies, CodeThenGrammarOrder) {
  const auto inst = fixtures().load("lpwp_assignment");
  const auto m = run(StrategyId::CoTCodeGrammar, inst, constant(*inst.ground_truth_model));
  ASSERT_EQ(m.calls.size(), 3u);
  EXPECT_EQ(m.calls[0].template_id, "cot");
  EXPECT_EQ(m.calls[1].template_id, "code_validation");
  EXPECT_EQ(m.calls[2].template_id, "grammar_validation");
}

TEST(Strategies, AgenticStagesAndFragments) {
  const auto inst = fixtures().load("complexor_transport");
  const std::map<std::string, std::string> answers = {
      {"agentic_params_vars", "```minizinc\n% Parameters\nint: P;\n```"},
      {"agentic_constraints", "```minizinc\n% Constraints\nconstraint true;\n```"},
      {"agentic_objective", "```minizinc\n% Objective\nsolve satisfy;\n```"},
  };
  const auto m = run(StrategyId::Agentic, inst, by_template(answers, *inst.ground_truth_model));
  ASSERT_EQ(m.calls.size(), 4u);
  const std::vector<std::string> order = {"agentic_params_vars", "agentic_constraints", "agentic_objective",
                                          "agentic_stitch"};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(m.calls[i].template_id, order[i]);
    EXPECT_EQ(m.calls[i].sequence, static_cast<int>(i + 1));
  }
  EXPECT_NE(m.calls[1].prompt.find("Parameters and Variables:\n```minizinc\n% Parameters\nint: P;\n```"),
            std::string::npos);
  for (const char* frag : {"int: P;", "constraint true;", "solve satisfy;"}) {
    EXPECT_NE(m.calls[3].prompt.find(frag), std::string::npos) << frag;
  }
  EXPECT_EQ(m.intermediate.at("params_vars"), "% Parameters\nint: P;");
  EXPECT_EQ(m.model_text, extract_code(*inst.ground_truth_model));
}

TEST(Strategies, AgenticEmptyFragment) {
  const auto inst = fixtures().load("complexor_transport");
  try {
    run(StrategyId::Agentic, inst, by_template({{"agentic_constraints", "```minizinc\n```"}}, "int: x;"));
    FAIL();
  } catch (const FragmentEmpty& e) {
    EXPECT_EQ(e.stage(), "constraints");
  }
}

TEST(Strategies, RepairWithoutCodeKeepsPreviousModel) {
  const auto inst = fixtures().load("nlp4lp_knapsack");
  const auto m = run(StrategyId::CoTCode, inst, by_template({{"code_validation", "  "}}, *inst.ground_truth_model));
  EXPECT_TRUE(m.degraded);
  EXPECT_EQ(m.model_text, extract_code(*inst.ground_truth_model));
  EXPECT_EQ(m.calls.size(), 2u);
}

TEST(Strategies, CallBudgetExactOnFixtures) {
  for (const auto& e : fixtures().entries()) {
    const auto inst = fixtures().load(e.id);
    for (StrategyId id : kAllStrategies) {
      const auto m = run(id, inst, constant(*inst.ground_truth_model));
      EXPECT_EQ(static_cast<int>(m.calls.size()), call_budget(id)) << e.id << " " << to_string(id);
      EXPECT_EQ(m.model_text, extract_code(*inst.ground_truth_model)) << e.id << " " << to_string(id);
    }
  }
}

TEST(Strategies, ReplayReproducesModel) {
  const auto inst = fixtures().load("csplib_sudoku_4x4");
  int n = 0;
  auto varying = std::make_shared<llm::MockTransport>([&](const llm::TransportRequest& r) {
    ++n;
    if (r.template_id == "agentic_params_vars") return std::string("```minizinc\nint: broken\n```");
    return "```minizinc\n% answer " + std::to_string(n) + "\n" + *inst.ground_truth_model + "```";
  });
  const auto first = run(StrategyId::AgenticCode, inst, varying);
  const auto again = run(StrategyId::AgenticCode, inst, std::make_shared<llm::ReplayTransport>(first.calls));
  EXPECT_EQ(again.model_text, first.model_text);
  ASSERT_EQ(again.calls.size(), first.calls.size());
  for (std::size_t i = 0; i < first.calls.size(); ++i) EXPECT_EQ(again.calls[i].prompt, first.calls[i].prompt);
}
