#pragma once

// Grammar-driven syntax checking for MiniZinc model text.
//
// Exchange format, one rule per logical line:
//
//   <bool-literal> ::= "false" | "true"
//   <model> ::= ( <item> ";" )* <item>?
//       | <other-alternative>            (a line starting with '|' continues the rule)
//
// Elements are quoted terminals, <nonterminals>, and parenthesized groups;
// any element may carry a '?', '*' or '+' suffix. Lines starting with '#' are
// comments. Directives:
//
//   @start <model>                   start symbol (default: first rule)
//   @literal <ident> identifier      binds a nonterminal to a token class
//                                    (identifier, integer, float, string)
//   @case-strict <bool-literal>      identifiers spelling one of the rule's
//                                    keywords in another letter case are errors

#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "t2m/error.hpp"

namespace t2m::grammar {

T2M_DEFINE_ERROR(GrammarSpecError);

enum class LiteralClass { Identifier, Integer, Float, String };

std::string_view to_string(LiteralClass c);

struct Sequence;

struct Element {
  enum class Kind { Terminal, NonTerminal, Group };
  Kind kind = Kind::Terminal;
  std::string text;                    // terminal text or nonterminal name (without brackets)
  std::vector<Sequence> alternatives;  // Group only
  char repeat = 0;                     // 0, '?', '*' or '+'

  bool operator==(const Element&) const;
};

struct Sequence {
  std::vector<Element> elements;  // empty means epsilon
  bool operator==(const Sequence&) const = default;
};

struct Rule {
  std::string name;
  std::vector<Sequence> productions;
  bool operator==(const Rule&) const = default;
};

class CompiledGrammar;

struct GrammarSpec {
  std::vector<Rule> rules;  // file order
  std::string start;
  std::map<std::string, LiteralClass> literals;
  std::set<std::string> case_strict;

  const Rule* find(std::string_view name) const;
  // Keyword and punctuation terminals, in first-use order.
  std::vector<std::string> terminals() const;

  // Structural equality; the compiled form is ignored.
  bool operator==(const GrammarSpec& other) const;

  std::shared_ptr<const CompiledGrammar> compiled;
};

GrammarSpec load_grammar(std::string_view spec_text);

// Canonical rendering: directives first, then one rule per line. Feeding the
// result back to load_grammar gives an equal GrammarSpec.
std::string render_grammar_for_prompt(const GrammarSpec& grammar);

struct SyntaxDiagnostic {
  int line = 1;
  int column = 1;
  std::string found;
  std::vector<std::string> expected;
  std::string rule;
  std::string message;
};

constexpr std::size_t kMaxDiagnostics = 25;

std::vector<SyntaxDiagnostic> validate_syntax(std::string_view model_text, const GrammarSpec& grammar);

// "line:column: message" lines, as fed to the repair prompt and printed by `t2m check`.
std::string format_diagnostics(const std::vector<SyntaxDiagnostic>& diagnostics);

// The MiniZinc grammar shipped with the library (overridable through the
// T2M_GRAMMAR_FILE environment variable).
const GrammarSpec& minizinc_grammar();
std::string_view minizinc_grammar_text();

}  // namespace t2m::grammar
