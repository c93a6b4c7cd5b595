#include <gtest/gtest.h>

#include <filesystem>

#include <json.hpp>

#include "t2m/grammar.hpp"
#include "test_util.hpp"

using namespace t2m::grammar;

namespace {

const std::filesystem::path kFixtures = std::filesystem::path(T2M_TEST_DATA_DIR) / "grammar";

bool within(const std::string& text, const SyntaxDiagnostic& d) {
  int line = 1, col = 1;
  for (char c : text) {
    if (line == d.line && col == d.column) return true;
    if (c == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return false;
}

}  // namespace

TEST(GrammarLoad, BoolLiteralRule) {
  const GrammarSpec g = load_grammar("<bool-literal> ::= \"false\" | \"true\"\n");
  ASSERT_EQ(g.rules.size(), 1u);
  EXPECT_EQ(g.start, "bool-literal");
  const Rule* r = g.find("bool-literal");
  ASSERT_NE(r, nullptr);
  ASSERT_EQ(r->productions.size(), 2u);
  EXPECT_EQ(r->productions[0].elements[0].text, "false");
  EXPECT_EQ(r->productions[1].elements[0].text, "true");
}

TEST(GrammarLoad, DanglingReferenceIsRejected) {
  EXPECT_THROW(load_grammar("<expr> ::= <expr2> \"+\" <expr>\n"), GrammarSpecError);
}

TEST(GrammarLoad, EmptySpecHasNoStartSymbol) {
  EXPECT_THROW(load_grammar(""), GrammarSpecError);
  EXPECT_THROW(load_grammar("# only a comment\n"), GrammarSpecError);
}

TEST(GrammarLoad, MalformedProductions) {
  for (const char* spec : {"<a> \"x\"", "<a> ::= \"x\" |", "<a> ::= ( \"x\"", "<a> ::= \"unterminated",
                           "<a> ::= \"x\"\n<a> ::= \"y\"", "@start <b>\n<a> ::= \"x\"", "<a> ::= \"two words\"",
                           "@literal <n> number\n<a> ::= <n>", "| \"x\""}) {
    EXPECT_THROW(load_grammar(spec), GrammarSpecError) << spec;
  }
}

TEST(GrammarLoad, ContinuationLinesAndEbnf) {
  const GrammarSpec g = load_grammar(
      "@literal <n> integer\n"
      "<list> ::= \"[\" ( <n> ( \",\" <n> )* )? \"]\"\n"
      "    | \"empty\"\n");
  ASSERT_EQ(g.find("list")->productions.size(), 2u);
  EXPECT_TRUE(validate_syntax("[1, 2, 3]", g).empty());
  EXPECT_TRUE(validate_syntax("[]", g).empty());
  EXPECT_TRUE(validate_syntax("empty", g).empty());
  EXPECT_FALSE(validate_syntax("[1 2]", g).empty());
}

TEST(GrammarRender, OneRuleOneLine) {
  const GrammarSpec g = load_grammar("<bool-literal> ::= \"false\" | \"true\"");
  const std::string text = render_grammar_for_prompt(g);
  EXPECT_NE(text.find("<bool-literal> ::= \"false\" | \"true\"\n"), std::string::npos);
  std::size_t rule_lines = 0;
  for (std::size_t p = 0; (p = text.find("::=", p)) != std::string::npos; ++p) ++rule_lines;
  EXPECT_EQ(rule_lines, 1u);
}

TEST(GrammarRender, DeterministicAndReloadable) {
  const GrammarSpec& g = minizinc_grammar();
  const std::string a = render_grammar_for_prompt(g);
  EXPECT_EQ(a, render_grammar_for_prompt(g));
  const GrammarSpec again = load_grammar(a);
  EXPECT_EQ(again, g);
  EXPECT_EQ(render_grammar_for_prompt(again), a);
}

TEST(MiniZincGrammar, BoolLiteralCase) {
  const GrammarSpec& g = minizinc_grammar();
  EXPECT_TRUE(validate_syntax("var bool: b = true;", g).empty());
  EXPECT_TRUE(validate_syntax("var bool: b = false;", g).empty());
  for (const char* bad : {"True", "TRUE", "False"}) {
    const auto d = validate_syntax(std::string("var bool: b = ") + bad + ";", g);
    ASSERT_EQ(d.size(), 1u) << bad;
    EXPECT_EQ(d[0].line, 1);
    EXPECT_EQ(d[0].column, 15);
    EXPECT_EQ(d[0].found, bad);
  }
}

TEST(MiniZincGrammar, WhereMisplaced) {
  const auto d = validate_syntax("var 1..3: x;\nconstraint forall(i where i > 2)(x > i);\n", minizinc_grammar());
  ASSERT_FALSE(d.empty());
  EXPECT_EQ(d[0].line, 2);
  EXPECT_EQ(d[0].column, 21);
  EXPECT_EQ(d[0].found, "where");
  EXPECT_NE(d[0].message.find("syntax error, unexpected where"), std::string::npos);
}

TEST(MiniZincGrammar, ExpectedSetAndRuleContext) {
  const auto d = validate_syntax("int n = 3;", minizinc_grammar());
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].found, "n");
  EXPECT_FALSE(d[0].expected.empty());
  EXPECT_FALSE(d[0].rule.empty());
}

TEST(MiniZincGrammar, EndOfFileDiagnosticIsInsideText) {
  const std::string text = "var 1..3: x;\nconstraint x >";
  const auto d = validate_syntax(text, minizinc_grammar());
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].found, "end of file");
  EXPECT_TRUE(within(text, d[0]));
}

TEST(MiniZincGrammar, RecoveryReportsSeveralErrors) {
  const std::string text =
      "var 1..3: x;\n"
      "constraint x > > 1;\n"
      "constraint (x < 3;\n"
      "solve satisfy;\n";
  const auto d = validate_syntax(text, minizinc_grammar());
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d[0].line, 2);
  EXPECT_EQ(d[1].line, 3);
}

TEST(MiniZincGrammar, DiagnosticsAreCapped) {
  std::string text;
  for (int i = 0; i < 40; ++i) text += "constraint x > ;\n";
  EXPECT_EQ(validate_syntax(text, minizinc_grammar()).size(), kMaxDiagnostics);
}

TEST(MiniZincGrammar, LexerEdgeCases) {
  const GrammarSpec& g = minizinc_grammar();
  EXPECT_TRUE(validate_syntax("array[1..3] of int: a = [1,2,3];", g).empty());
  EXPECT_TRUE(validate_syntax("float: f = 1.5e-3; int: h = 0x1F; int: o = 0o17;", g).empty());
  EXPECT_TRUE(validate_syntax("output [\"v=\\(a[1] + (2 * 3))\\n\"];", g).empty());
  EXPECT_TRUE(validate_syntax("% comment only\n/* block */", g).empty());
  EXPECT_TRUE(validate_syntax("", g).empty());
  EXPECT_FALSE(validate_syntax("int: x = 3 @ 4;", g).empty());
  EXPECT_FALSE(validate_syntax("/* open", g).empty());
}

TEST(MiniZincGrammar, PureFunctionOfInputs) {
  const std::string text = "var 1..3: x\nsolve satisfy;";
  const auto a = validate_syntax(text, minizinc_grammar());
  const auto b = validate_syntax(text, minizinc_grammar());
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].line, b[i].line);
    EXPECT_EQ(a[i].message, b[i].message);
  }
}

TEST(MiniZincGrammar, AgreesWithFrozenParserLabels) {
  const auto labels = nlohmann::json::parse(t2m::testing::read_text(kFixtures / "labels.json"));
  std::size_t valid = 0, invalid = 0;
  for (const auto& [file, verdict] : labels.items()) {
    const std::string text = t2m::testing::read_text(kFixtures / file);
    const auto diags = validate_syntax(text, minizinc_grammar());
    const bool accepted = diags.empty();
    EXPECT_EQ(accepted, verdict == "accept") << file << "\n" << format_diagnostics(diags);
    for (const auto& d : diags) EXPECT_TRUE(within(text, d)) << file;
    (verdict == "accept" ? valid : invalid)++;
  }
  EXPECT_GE(valid, 20u);
  EXPECT_GE(invalid, 20u);
}
