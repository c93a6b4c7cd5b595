#include "t2m/grammar.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "t2m/assets.hpp"

namespace t2m::grammar {

std::string_view to_string(LiteralClass c) {
  switch (c) {
    case LiteralClass::Identifier: return "identifier";
    case LiteralClass::Integer: return "integer";
    case LiteralClass::Float: return "float";
    case LiteralClass::String: return "string";
  }
  return "";
}

bool Element::operator==(const Element& o) const {
  return kind == o.kind && text == o.text && repeat == o.repeat && alternatives == o.alternatives;
}

const Rule* GrammarSpec::find(std::string_view name) const {
  for (const auto& r : rules) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

namespace {

void collect_terminals(const std::vector<Sequence>& alts, std::vector<std::string>& out, std::set<std::string>& seen) {
  for (const auto& seq : alts) {
    for (const auto& e : seq.elements) {
      if (e.kind == Element::Kind::Terminal && seen.insert(e.text).second) out.push_back(e.text);
      if (e.kind == Element::Kind::Group) collect_terminals(e.alternatives, out, seen);
    }
  }
}

bool is_word(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

bool is_punct(std::string_view s) {
  static constexpr std::string_view kChars = "!#$&*+,-./:;<=>?@[\\]^`{|}~()";
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return kChars.find(c) != std::string_view::npos; });
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::vector<std::string> GrammarSpec::terminals() const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& r : rules) collect_terminals(r.productions, out, seen);
  return out;
}

bool GrammarSpec::operator==(const GrammarSpec& o) const {
  return rules == o.rules && start == o.start && literals == o.literals && case_strict == o.case_strict;
}

// ---------------------------------------------------------------------------
// Compiled form: plain BNF over integer symbols for the Earley recognizer.

class CompiledGrammar {
 public:
  struct Production {
    int lhs;
    std::vector<int> rhs;  // >= 0 nonterminal, < 0 terminal -(id + 1)
  };

  std::vector<std::string> nonterminal_names;  // user-facing owner rule name
  std::vector<std::vector<int>> by_lhs;
  std::vector<Production> productions;
  std::vector<bool> nullable;
  std::vector<std::string> terminal_names;  // keyword/punct text or class label
  std::unordered_map<std::string, int> keyword_ids;
  std::vector<std::pair<std::string, int>> punct;  // longest first
  int class_ids[4] = {-1, -1, -1, -1};
  std::unordered_map<std::string, std::string> case_strict;  // lowercase -> canonical
  int start_rule = -1;  // augmented production index

  static int term_sym(int id) { return -(id + 1); }
  static int term_id(int sym) { return -sym - 1; }

  int terminal(const std::string& text) {
    if (auto it = keyword_ids.find(text); it != keyword_ids.end()) return it->second;
    for (const auto& [t, id] : punct) {
      if (t == text) return id;
    }
    const int id = static_cast<int>(terminal_names.size());
    terminal_names.push_back(text);
    if (is_word(text)) keyword_ids.emplace(text, id);
    else punct.emplace_back(text, id);
    return id;
  }

  int class_terminal(LiteralClass c) {
    int& slot = class_ids[static_cast<int>(c)];
    if (slot < 0) {
      slot = static_cast<int>(terminal_names.size());
      terminal_names.push_back(std::string(to_string(c)));
    }
    return slot;
  }

  int new_nonterminal(const std::string& owner) {
    nonterminal_names.push_back(owner);
    by_lhs.emplace_back();
    return static_cast<int>(nonterminal_names.size()) - 1;
  }

  void add(int lhs, std::vector<int> rhs) {
    by_lhs[lhs].push_back(static_cast<int>(productions.size()));
    productions.push_back({lhs, std::move(rhs)});
  }
};

namespace {

class Compiler {
 public:
  explicit Compiler(const GrammarSpec& g) : g_(g) {}

  std::shared_ptr<CompiledGrammar> run() {
    auto c = std::make_shared<CompiledGrammar>();
    c_ = c.get();
    for (const auto& r : g_.rules) ids_[r.name] = c_->new_nonterminal(r.name);
    for (const auto& r : g_.rules) {
      for (const auto& seq : r.productions) c_->add(ids_.at(r.name), sequence(seq, r.name));
    }
    const int aug = c_->new_nonterminal(g_.start);
    c_->start_rule = static_cast<int>(c_->productions.size());
    c_->add(aug, {ids_.at(g_.start)});

    for (const auto& name : g_.case_strict) {
      std::vector<std::string> words;
      std::set<std::string> seen;
      collect_terminals(g_.find(name)->productions, words, seen);
      for (const auto& w : words) {
        if (is_word(w)) c_->case_strict.emplace(lower(w), w);
      }
    }
    std::stable_sort(c_->punct.begin(), c_->punct.end(),
                     [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });
    compute_nullable();
    return c;
  }

 private:
  std::vector<int> sequence(const Sequence& seq, const std::string& owner) {
    std::vector<int> out;
    for (const auto& e : seq.elements) out.push_back(element(e, owner));
    return out;
  }

  int element(const Element& e, const std::string& owner) {
    int base = 0;
    switch (e.kind) {
      case Element::Kind::Terminal:
        base = CompiledGrammar::term_sym(c_->terminal(e.text));
        break;
      case Element::Kind::NonTerminal:
        if (auto it = g_.literals.find(e.text); it != g_.literals.end()) {
          base = CompiledGrammar::term_sym(c_->class_terminal(it->second));
        } else {
          base = ids_.at(e.text);
        }
        break;
      case Element::Kind::Group: {
        base = c_->new_nonterminal(owner);
        for (const auto& alt : e.alternatives) c_->add(base, sequence(alt, owner));
        break;
      }
    }
    if (e.repeat == 0) return base;
    const int aux = c_->new_nonterminal(owner);
    switch (e.repeat) {
      case '?':
        c_->add(aux, {});
        c_->add(aux, {base});
        break;
      case '*':
        c_->add(aux, {});
        c_->add(aux, {aux, base});
        break;
      default:
        c_->add(aux, {base});
        c_->add(aux, {aux, base});
        break;
    }
    return aux;
  }

  void compute_nullable() {
    c_->nullable.assign(c_->nonterminal_names.size(), false);
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& p : c_->productions) {
        if (c_->nullable[p.lhs]) continue;
        if (std::all_of(p.rhs.begin(), p.rhs.end(), [&](int s) { return s >= 0 && c_->nullable[s]; })) {
          c_->nullable[p.lhs] = true;
          changed = true;
        }
      }
    }
  }

  const GrammarSpec& g_;
  CompiledGrammar* c_ = nullptr;
  std::map<std::string, int> ids_;
};

// ---------------------------------------------------------------------------
// Spec text loader.

class SpecReader {
 public:
  SpecReader(std::string_view body, int line) : s_(body), line_(line) {}

  std::vector<Sequence> alternatives(bool nested) {
    std::vector<Sequence> alts;
    alts.push_back(sequence());
    skip_ws();
    while (pos_ < s_.size() && s_[pos_] == '|') {
      ++pos_;
      alts.push_back(sequence());
      skip_ws();
    }
    if (!nested && pos_ < s_.size()) fail("unexpected `" + std::string(1, s_[pos_]) + "'");
    return alts;
  }

 private:
  Sequence sequence() {
    Sequence seq;
    for (;;) {
      skip_ws();
      if (pos_ >= s_.size() || s_[pos_] == '|' || s_[pos_] == ')') break;
      seq.elements.push_back(element());
    }
    if (seq.elements.empty()) fail("empty alternative");
    return seq;
  }

  Element element() {
    Element e;
    const char c = s_[pos_];
    if (c == '"') {
      e.kind = Element::Kind::Terminal;
      e.text = quoted();
      if (!is_word(e.text) && !is_punct(e.text)) fail("terminal \"" + e.text + "\" is neither a word nor punctuation");
    } else if (c == '<') {
      e.kind = Element::Kind::NonTerminal;
      e.text = name();
    } else if (c == '(') {
      ++pos_;
      e.kind = Element::Kind::Group;
      e.alternatives = alternatives(true);
      if (pos_ >= s_.size() || s_[pos_] != ')') fail("unbalanced `('");
      ++pos_;
    } else {
      fail("unexpected `" + std::string(1, c) + "'");
    }
    if (pos_ < s_.size() && (s_[pos_] == '?' || s_[pos_] == '*' || s_[pos_] == '+')) e.repeat = s_[pos_++];
    return e;
  }

 public:
  std::string name() {
    skip_ws();
    if (pos_ >= s_.size() || s_[pos_] != '<') fail("expected `<name>'");
    const auto close = s_.find('>', pos_ + 1);
    if (close == std::string_view::npos) fail("unterminated nonterminal");
    std::string n(s_.substr(pos_ + 1, close - pos_ - 1));
    if (n.empty() || !std::all_of(n.begin(), n.end(), [](char ch) {
          return std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_';
        })) {
      fail("malformed nonterminal name <" + n + ">");
    }
    pos_ = close + 1;
    return n;
  }

  std::string quoted() {
    std::string out;
    for (++pos_; pos_ < s_.size(); ++pos_) {
      char ch = s_[pos_];
      if (ch == '"') {
        ++pos_;
        if (out.empty()) fail("empty terminal");
        return out;
      }
      if (ch == '\\' && pos_ + 1 < s_.size()) ch = s_[++pos_];
      out += ch;
    }
    fail("unterminated terminal");
  }

  std::string word() {
    skip_ws();
    const auto begin = pos_;
    while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    return std::string(s_.substr(begin, pos_ - begin));
  }

  bool at_end() {
    skip_ws();
    return pos_ >= s_.size();
  }

  bool take(std::string_view token) {
    skip_ws();
    if (s_.substr(pos_, token.size()) != token) return false;
    pos_ += token.size();
    return true;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw GrammarSpecError("line " + std::to_string(line_) + ": malformed production: " + msg);
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  std::string_view s_;
  int line_;
  std::size_t pos_ = 0;
};

void check_references(const std::vector<Sequence>& alts, const GrammarSpec& g, const std::string& rule) {
  for (const auto& seq : alts) {
    for (const auto& e : seq.elements) {
      if (e.kind == Element::Kind::NonTerminal && !g.find(e.text) && !g.literals.count(e.text)) {
        throw GrammarSpecError("undefined nonterminal <" + e.text + "> referenced in <" + rule + ">");
      }
      if (e.kind == Element::Kind::Group) check_references(e.alternatives, g, rule);
    }
  }
}

std::string quote_terminal(const std::string& t) {
  std::string out = "\"";
  for (char c : t) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

void render_alternatives(const std::vector<Sequence>& alts, std::string& out);

void render_element(const Element& e, std::string& out) {
  switch (e.kind) {
    case Element::Kind::Terminal: out += quote_terminal(e.text); break;
    case Element::Kind::NonTerminal: out += "<" + e.text + ">"; break;
    case Element::Kind::Group:
      out += "( ";
      render_alternatives(e.alternatives, out);
      out += " )";
      break;
  }
  if (e.repeat) out += e.repeat;
}

void render_alternatives(const std::vector<Sequence>& alts, std::string& out) {
  for (std::size_t i = 0; i < alts.size(); ++i) {
    if (i) out += " | ";
    for (std::size_t j = 0; j < alts[i].elements.size(); ++j) {
      if (j) out += ' ';
      render_element(alts[i].elements[j], out);
    }
  }
}

}  // namespace

GrammarSpec load_grammar(std::string_view spec_text) {
  GrammarSpec g;
  struct Pending {
    std::string text;
    int line;
  };
  std::vector<Pending> rule_lines;

  std::istringstream in{std::string(spec_text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto first = raw.find_first_not_of(" \t\r");
    if (first == std::string::npos || raw[first] == '#') continue;
    std::string_view line(raw);
    line.remove_prefix(first);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.remove_suffix(1);

    if (line.front() == '@') {
      SpecReader r(line, line_no);
      const std::string directive = r.word();
      if (directive == "@start") {
        g.start = r.name();
      } else if (directive == "@literal") {
        const std::string name = r.name();
        const std::string cls = r.word();
        static const std::map<std::string, LiteralClass> classes = {{"identifier", LiteralClass::Identifier},
                                                                    {"integer", LiteralClass::Integer},
                                                                    {"float", LiteralClass::Float},
                                                                    {"string", LiteralClass::String}};
        auto it = classes.find(cls);
        if (it == classes.end()) r.fail("unknown literal class `" + cls + "'");
        g.literals[name] = it->second;
      } else if (directive == "@case-strict") {
        g.case_strict.insert(r.name());
      } else {
        r.fail("unknown directive " + directive);
      }
      if (!r.at_end()) r.fail("trailing text after directive");
      continue;
    }
    if (line.front() == '|') {
      if (rule_lines.empty()) throw GrammarSpecError("line " + std::to_string(line_no) + ": malformed production: continuation without a rule");
      rule_lines.back().text += " " + std::string(line);
      continue;
    }
    rule_lines.push_back({std::string(line), line_no});
  }

  for (const auto& [text, line] : rule_lines) {
    SpecReader r(text, line);
    Rule rule;
    rule.name = r.name();
    if (!r.take("::=")) r.fail("expected `::=' after <" + rule.name + ">");
    rule.productions = r.alternatives(false);
    if (g.find(rule.name)) throw GrammarSpecError("line " + std::to_string(line) + ": malformed production: <" + rule.name + "> defined twice");
    if (g.literals.count(rule.name)) throw GrammarSpecError("<" + rule.name + "> is both a literal class and a rule");
    g.rules.push_back(std::move(rule));
  }

  if (g.start.empty()) {
    if (g.rules.empty()) throw GrammarSpecError("grammar defines no rules and no start symbol");
    g.start = g.rules.front().name;
  }
  if (!g.find(g.start)) throw GrammarSpecError("start symbol <" + g.start + "> is not defined");
  for (const auto& name : g.case_strict) {
    if (!g.find(name)) throw GrammarSpecError("undefined nonterminal <" + name + "> in @case-strict");
  }
  for (const auto& r : g.rules) check_references(r.productions, g, r.name);

  g.compiled = Compiler(g).run();
  return g;
}

std::string render_grammar_for_prompt(const GrammarSpec& g) {
  std::string out = "@start <" + g.start + ">\n";
  for (const auto& [name, cls] : g.literals) out += "@literal <" + name + "> " + std::string(to_string(cls)) + "\n";
  for (const auto& name : g.case_strict) out += "@case-strict <" + name + ">\n";
  for (const auto& r : g.rules) {
    out += "<" + r.name + "> ::= ";
    render_alternatives(r.productions, out);
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Lexer and Earley recognizer.

namespace {

struct Token {
  enum class Kind { Identifier, QuotedIdentifier, Integer, Float, String, Punct, Invalid, End };
  Kind kind;
  std::string text;
  int line;
  int column;
  std::string problem;  // Invalid tokens only
};

class Lexer {
 public:
  Lexer(std::string_view text, const CompiledGrammar& g) : s_(text), g_(g) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_trivia(out);
      if (pos_ >= s_.size()) break;
      out.push_back(next());
    }
    Token end{Token::Kind::End, "", 1, 1, {}};
    if (!out.empty()) {
      end.line = out.back().line;
      end.column = out.back().column + std::max<int>(0, static_cast<int>(out.back().text.size()) - 1);
      if (out.back().text.find('\n') != std::string::npos) end.column = out.back().column;
    }
    out.push_back(end);
    return out;
  }

 private:
  char peek(std::size_t ahead = 0) const { return pos_ + ahead < s_.size() ? s_[pos_ + ahead] : '\0'; }

  void advance(std::size_t n = 1) {
    for (std::size_t i = 0; i < n && pos_ < s_.size(); ++i, ++pos_) {
      if (s_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
    }
  }

  void skip_trivia(std::vector<Token>& out) {
    for (;;) {
      const char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v') {
        advance();
      } else if (c == '%') {
        while (pos_ < s_.size() && peek() != '\n') advance();
      } else if (c == '/' && peek(1) == '*') {
        const int line = line_, col = col_;
        const auto close = s_.find("*/", pos_ + 2);
        if (close == std::string_view::npos) {
          out.push_back({Token::Kind::Invalid, "/*", line, col, "unterminated comment"});
          advance(s_.size() - pos_);
          return;
        }
        advance(close + 2 - pos_);
      } else {
        return;
      }
    }
  }

  Token next() {
    const int line = line_, col = col_;
    const std::size_t begin = pos_;
    const char c = peek();
    auto make = [&](Token::Kind k) { return Token{k, std::string(s_.substr(begin, pos_ - begin)), line, col, {}}; };

    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') advance();
      return make(Token::Kind::Identifier);
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return number(line, col);
    if (c == '"') {
      if (!string_body()) return {Token::Kind::Invalid, std::string(s_.substr(begin, pos_ - begin)), line, col, "unterminated string"};
      return make(Token::Kind::String);
    }
    if (c == '\'') {
      advance();
      while (pos_ < s_.size() && peek() != '\'' && peek() != '\n') advance();
      if (peek() != '\'') return {Token::Kind::Invalid, std::string(s_.substr(begin, pos_ - begin)), line, col, "unterminated quoted identifier"};
      advance();
      return make(Token::Kind::QuotedIdentifier);
    }
    for (const auto& [text, id] : g_.punct) {
      if (s_.substr(pos_, text.size()) == text) {
        advance(text.size());
        return make(Token::Kind::Punct);
      }
    }
    // One UTF-8 sequence at a time so the reported token is a whole character.
    std::size_t len = 1;
    const auto lead = static_cast<unsigned char>(c);
    if (lead >= 0xF0) len = 4;
    else if (lead >= 0xE0) len = 3;
    else if (lead >= 0xC0) len = 2;
    advance(std::min(len, s_.size() - pos_));
    Token t = make(Token::Kind::Invalid);
    t.problem = "invalid character";
    return t;
  }

  Token number(int line, int col) {
    const std::size_t begin = pos_;
    auto digits = [&](auto pred) {
      while (pred(static_cast<unsigned char>(peek()))) advance();
    };
    if (peek() == '0' && (peek(1) == 'x' || peek(1) == 'o' || peek(1) == 'b') && std::isxdigit(static_cast<unsigned char>(peek(2)))) {
      const char base = peek(1);
      advance(2);
      if (base == 'x') digits([](unsigned char ch) { return std::isxdigit(ch) != 0; });
      else if (base == 'o') digits([](unsigned char ch) { return ch >= '0' && ch <= '7'; });
      else digits([](unsigned char ch) { return ch == '0' || ch == '1'; });
      return {Token::Kind::Integer, std::string(s_.substr(begin, pos_ - begin)), line, col, {}};
    }
    digits([](unsigned char ch) { return std::isdigit(ch) != 0; });
    bool is_float = false;
    if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
      is_float = true;
      advance();
      digits([](unsigned char ch) { return std::isdigit(ch) != 0; });
    }
    if ((peek() == 'e' || peek() == 'E') &&
        (std::isdigit(static_cast<unsigned char>(peek(1))) ||
         ((peek(1) == '+' || peek(1) == '-') && std::isdigit(static_cast<unsigned char>(peek(2)))))) {
      is_float = true;
      advance(2);
      digits([](unsigned char ch) { return std::isdigit(ch) != 0; });
    }
    return {is_float ? Token::Kind::Float : Token::Kind::Integer, std::string(s_.substr(begin, pos_ - begin)), line, col, {}};
  }

  // Consumes a string literal including `\( ... )` interpolations.
  bool string_body() {
    advance();  // opening quote
    while (pos_ < s_.size()) {
      const char c = peek();
      if (c == '"') {
        advance();
        return true;
      }
      if (c == '\n') return false;
      if (c == '\\' && peek(1) == '(') {
        advance(2);
        if (!interpolation()) return false;
        continue;
      }
      if (c == '\\') advance();
      advance();
    }
    return false;
  }

  bool interpolation() {
    int depth = 1;
    while (pos_ < s_.size()) {
      const char c = peek();
      if (c == '"') {
        if (!string_body()) return false;
        continue;
      }
      if (c == '(') ++depth;
      if (c == ')' && --depth == 0) {
        advance();
        return true;
      }
      advance();
    }
    return false;
  }

  std::string_view s_;
  const CompiledGrammar& g_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

struct Item {
  int prod;
  int dot;
  int origin;
};

struct Failure {
  std::size_t token;  // index into the token vector
  std::vector<int> expected;
  std::string rule;
};

class Recognizer {
 public:
  Recognizer(const CompiledGrammar& g, const std::vector<Token>& tokens, const std::vector<std::vector<int>>& matches)
      : g_(g), tokens_(tokens), matches_(matches) {}

  // Parses tokens[first, end) (end is the End token index). Returns the
  // failure point, or nullopt when the start symbol derives the segment.
  std::optional<Failure> run(std::size_t first, std::size_t end) {
    sets_.clear();
    waiting_.clear();
    sets_.emplace_back();
    seen_.clear();
    add(0, {g_.start_rule, 0, 0});
    for (std::size_t k = 0;; ++k) {
      close(k);
      const std::size_t tok = first + k;
      if (tok == end) {
        for (const auto& it : sets_[k]) {
          if (it.prod == g_.start_rule && it.origin == 0 && it.dot == 1) return std::nullopt;
        }
        return failure(k, tok);
      }
      sets_.emplace_back();
      seen_.clear();
      for (const auto& it : sets_[k]) {
        const auto& rhs = g_.productions[it.prod].rhs;
        if (it.dot >= static_cast<int>(rhs.size()) || rhs[it.dot] >= 0) continue;
        const int term = CompiledGrammar::term_id(rhs[it.dot]);
        const auto& m = matches_[tok];
        if (std::find(m.begin(), m.end(), term) != m.end()) add(k + 1, {it.prod, it.dot + 1, it.origin});
      }
      if (sets_[k + 1].empty()) return failure(k, tok);
    }
  }

 private:
  static std::uint64_t key(const Item& it) {
    return (static_cast<std::uint64_t>(it.prod) << 40) ^ (static_cast<std::uint64_t>(it.dot) << 32) ^
           static_cast<std::uint32_t>(it.origin);
  }

  void add(std::size_t set, const Item& it) {
    if (seen_.insert(key(it)).second) sets_[set].push_back(it);
  }

  void close(std::size_t k) {
    // seen_ holds keys for set k (cleared when set k was created).
    for (std::size_t i = 0; i < sets_[k].size(); ++i) {
      const Item it = sets_[k][i];
      const auto& rhs = g_.productions[it.prod].rhs;
      if (it.dot < static_cast<int>(rhs.size())) {
        const int sym = rhs[it.dot];
        if (sym < 0) continue;
        for (int p : g_.by_lhs[sym]) add(k, {p, 0, static_cast<int>(k)});
        if (g_.nullable[sym]) add(k, {it.prod, it.dot + 1, it.origin});
        continue;
      }
      const int lhs = g_.productions[it.prod].lhs;
      if (static_cast<std::size_t>(it.origin) == k) continue;  // nullable completions are handled at prediction
      const auto& w = waiting_[it.origin];
      auto lo = std::lower_bound(w.begin(), w.end(), std::make_pair(lhs, 0));
      for (; lo != w.end() && lo->first == lhs; ++lo) {
        const Item& parent = sets_[it.origin][lo->second];
        add(k, {parent.prod, parent.dot + 1, parent.origin});
      }
    }
    std::vector<std::pair<int, int>> w;
    for (std::size_t i = 0; i < sets_[k].size(); ++i) {
      const Item& it = sets_[k][i];
      const auto& rhs = g_.productions[it.prod].rhs;
      if (it.dot < static_cast<int>(rhs.size()) && rhs[it.dot] >= 0) w.emplace_back(rhs[it.dot], static_cast<int>(i));
    }
    std::sort(w.begin(), w.end());
    waiting_.push_back(std::move(w));
  }

  Failure failure(std::size_t k, std::size_t tok) const {
    Failure f{tok, {}, {}};
    int best_origin = -1;
    for (const auto& it : sets_[k]) {
      const auto& rhs = g_.productions[it.prod].rhs;
      if (it.dot >= static_cast<int>(rhs.size()) || rhs[it.dot] >= 0) continue;
      const int term = CompiledGrammar::term_id(rhs[it.dot]);
      if (std::find(f.expected.begin(), f.expected.end(), term) == f.expected.end()) f.expected.push_back(term);
      if (it.origin > best_origin && it.prod != g_.start_rule) {
        best_origin = it.origin;
        f.rule = g_.nonterminal_names[g_.productions[it.prod].lhs];
      }
    }
    std::sort(f.expected.begin(), f.expected.end(), [&](int a, int b) { return g_.terminal_names[a] < g_.terminal_names[b]; });
    return f;
  }

  const CompiledGrammar& g_;
  const std::vector<Token>& tokens_;
  const std::vector<std::vector<int>>& matches_;
  std::vector<std::vector<Item>> sets_;
  std::vector<std::vector<std::pair<int, int>>> waiting_;
  std::unordered_set<std::uint64_t> seen_;
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case Token::Kind::End: return "end of file";
    case Token::Kind::Identifier:
    case Token::Kind::QuotedIdentifier: return "identifier `" + t.text + "'";
    case Token::Kind::Integer: return "integer literal " + t.text;
    case Token::Kind::Float: return "float literal " + t.text;
    case Token::Kind::String: return "string literal";
    case Token::Kind::Punct: return t.text;
    case Token::Kind::Invalid: return t.problem + " `" + t.text.substr(0, 16) + "'";
  }
  return t.text;
}

std::string expected_label(const CompiledGrammar& g, int term) {
  for (int c = 0; c < 4; ++c) {
    if (g.class_ids[c] == term) return g.terminal_names[term];
  }
  return g.terminal_names[term];
}

bool is_sync(const Token& t) { return t.kind == Token::Kind::Punct && (t.text == ";" || t.text == "}"); }

}  // namespace

std::vector<SyntaxDiagnostic> validate_syntax(std::string_view model_text, const GrammarSpec& grammar) {
  if (!grammar.compiled) throw GrammarSpecError("grammar was not produced by load_grammar");
  const CompiledGrammar& g = *grammar.compiled;
  const std::vector<Token> tokens = Lexer(model_text, g).run();

  std::vector<std::vector<int>> matches(tokens.size());
  std::vector<std::string> case_hint(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const Token& t = tokens[i];
    auto& m = matches[i];
    auto add_class = [&](LiteralClass c) {
      if (g.class_ids[static_cast<int>(c)] >= 0) m.push_back(g.class_ids[static_cast<int>(c)]);
    };
    switch (t.kind) {
      case Token::Kind::Identifier:
        if (auto it = g.keyword_ids.find(t.text); it != g.keyword_ids.end()) {
          m.push_back(it->second);
        } else if (auto cs = g.case_strict.find(lower(t.text)); cs != g.case_strict.end()) {
          case_hint[i] = cs->second;
        } else {
          add_class(LiteralClass::Identifier);
        }
        break;
      case Token::Kind::QuotedIdentifier: add_class(LiteralClass::Identifier); break;
      case Token::Kind::Integer: add_class(LiteralClass::Integer); break;
      case Token::Kind::Float: add_class(LiteralClass::Float); break;
      case Token::Kind::String: add_class(LiteralClass::String); break;
      case Token::Kind::Punct:
        for (const auto& [text, id] : g.punct) {
          if (text == t.text) m.push_back(id);
        }
        break;
      case Token::Kind::Invalid:
      case Token::Kind::End: break;
    }
  }

  std::vector<SyntaxDiagnostic> out;
  Recognizer rec(g, tokens, matches);
  const std::size_t end = tokens.size() - 1;
  std::size_t first = 0;
  bool resumed = false;
  while (first <= end && out.size() < kMaxDiagnostics) {
    const auto fail = rec.run(first, end);
    if (!fail) break;
    const Token& t = tokens[fail->token];
    // A restart that cannot even take its first token is a cascade of the
    // previous error; skip ahead silently.
    if (!(resumed && fail->token == first && t.kind != Token::Kind::End)) {
      SyntaxDiagnostic d;
      d.line = t.line;
      d.column = t.column;
      d.found = t.kind == Token::Kind::End ? "end of file" : t.text;
      for (int term : fail->expected) d.expected.push_back(expected_label(g, term));
      d.rule = fail->rule;
      const bool keyword = t.kind == Token::Kind::Identifier && g.keyword_ids.count(t.text);
      d.message = "syntax error, unexpected " + (keyword ? t.text : describe(t));
      if (!case_hint[fail->token].empty()) {
        d.message += " (keywords are case-sensitive; did you mean `" + case_hint[fail->token] + "'?)";
      } else if (!d.expected.empty() && d.expected.size() <= 4) {
        d.message += ", expecting ";
        for (std::size_t i = 0; i < d.expected.size(); ++i) {
          if (i) d.message += i + 1 == d.expected.size() ? " or " : ", ";
          d.message += d.expected[i];
        }
      }
      out.push_back(std::move(d));
    }
    std::size_t sync = fail->token;
    while (sync < end && !is_sync(tokens[sync])) ++sync;
    if (sync >= end) break;
    first = sync + 1;
    resumed = true;
  }
  return out;
}

std::string format_diagnostics(const std::vector<SyntaxDiagnostic>& diagnostics) {
  std::string out;
  for (const auto& d : diagnostics) {
    out += std::to_string(d.line) + ":" + std::to_string(d.column) + ": " + d.message;
    if (!d.rule.empty()) out += " [in <" + d.rule + ">]";
    out += "\n";
  }
  return out;
}

std::string_view minizinc_grammar_text() {
  static const std::string text = [] {
    if (const char* path = std::getenv("T2M_GRAMMAR_FILE"); path && *path) {
      std::ifstream in(path, std::ios::binary);
      if (!in) throw GrammarSpecError(std::string("cannot read grammar file ") + path);
      std::ostringstream ss;
      ss << in.rdbuf();
      return ss.str();
    }
    return assets::load("grammar/minizinc.bnf");
  }();
  return text;
}

const GrammarSpec& minizinc_grammar() {
  static const GrammarSpec g = load_grammar(minizinc_grammar_text());
  return g;
}

}  // namespace t2m::grammar
