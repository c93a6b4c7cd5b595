#include "t2m/dzn.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

namespace t2m::dzn {

bool Array::operator==(const Array& other) const {
  return dims == other.dims && elements == other.elements;
}

double Value::as_number() const {
  if (is_int()) return static_cast<double>(std::get<std::int64_t>(data));
  if (is_bool()) return std::get<bool>(data) ? 1.0 : 0.0;
  return std::get<double>(data);
}

bool Bindings::contains(std::string_view symbol) const { return find(symbol) != nullptr; }

const Value* Bindings::find(std::string_view symbol) const {
  for (const auto& [name, value] : entries_) {
    if (name == symbol) return &value;
  }
  return nullptr;
}

const Value& Bindings::at(std::string_view symbol) const {
  if (const Value* v = find(symbol)) return *v;
  throw std::out_of_range("no binding for `" + std::string(symbol) + "'");
}

void Bindings::add(std::string symbol, Value value) {
  if (contains(symbol)) throw DuplicateBinding(symbol);
  entries_.emplace_back(std::move(symbol), std::move(value));
}

void Bindings::set(std::string symbol, Value value) {
  for (auto& [name, existing] : entries_) {
    if (name == symbol) {
      existing = std::move(value);
      return;
    }
  }
  entries_.emplace_back(std::move(symbol), std::move(value));
}

DznParseError::DznParseError(int line, int column, const std::string& message)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column),
      detail_(message) {}

DuplicateBinding::DuplicateBinding(const std::string& symbol)
    : std::runtime_error("duplicate binding for `" + symbol + "'"), symbol_(symbol) {}

namespace {

enum class Tok {
  End,
  Ident,
  Int,
  Float,
  String,
  LBracket,     // [
  RBracket,     // ]
  LBracketBar,  // [|
  BarRBracket,  // |]
  Bar,          // |
  LBrace,
  RBrace,
  LParen,
  RParen,
  Comma,
  Colon,
  Semi,
  Equals,
  DotDot,
  Minus,
  Other,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1;
  int column = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    skip_trivia();
    Token tok;
    tok.line = line_;
    tok.column = column_;
    if (pos_ >= text_.size()) return tok;

    const char c = text_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        advance();
      }
      tok.kind = Tok::Ident;
      tok.text = std::string(text_.substr(start, pos_ - start));
      return tok;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return number(tok);
    if (c == '"') return string_literal(tok);

    auto two = [&](char a, char b) {
      return pos_ + 1 < text_.size() && text_[pos_] == a && text_[pos_ + 1] == b;
    };
    if (two('[', '|')) return punct(tok, Tok::LBracketBar, 2);
    if (two('|', ']')) return punct(tok, Tok::BarRBracket, 2);
    if (two('.', '.')) return punct(tok, Tok::DotDot, 2);
    switch (c) {
      case '[': return punct(tok, Tok::LBracket, 1);
      case ']': return punct(tok, Tok::RBracket, 1);
      case '|': return punct(tok, Tok::Bar, 1);
      case '{': return punct(tok, Tok::LBrace, 1);
      case '}': return punct(tok, Tok::RBrace, 1);
      case '(': return punct(tok, Tok::LParen, 1);
      case ')': return punct(tok, Tok::RParen, 1);
      case ',': return punct(tok, Tok::Comma, 1);
      case ':': return punct(tok, Tok::Colon, 1);
      case ';': return punct(tok, Tok::Semi, 1);
      case '=': return punct(tok, Tok::Equals, 1);
      case '-': return punct(tok, Tok::Minus, 1);
      default: return punct(tok, Tok::Other, 1);
    }
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_trivia() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '%') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '*') {
        const int line = line_, column = column_;
        advance();
        advance();
        while (pos_ + 1 < text_.size() && !(text_[pos_] == '*' && text_[pos_ + 1] == '/')) advance();
        if (pos_ + 1 >= text_.size()) throw DznParseError(line, column, "unterminated block comment");
        advance();
        advance();
      } else {
        break;
      }
    }
  }

  Token punct(Token& tok, Tok kind, int width) {
    tok.kind = kind;
    tok.text = std::string(text_.substr(pos_, width));
    for (int i = 0; i < width; ++i) advance();
    return tok;
  }

  Token number(Token& tok) {
    const std::size_t start = pos_;
    auto digit_run = [&](auto pred) {
      while (pos_ < text_.size() && pred(static_cast<unsigned char>(text_[pos_]))) advance();
    };
    tok.kind = Tok::Int;
    if (text_[pos_] == '0' && pos_ + 1 < text_.size() &&
        (text_[pos_ + 1] == 'x' || text_[pos_ + 1] == 'o' || text_[pos_ + 1] == 'b')) {
      const char base = text_[pos_ + 1];
      advance();
      advance();
      if (base == 'x') digit_run([](unsigned char ch) { return std::isxdigit(ch) != 0; });
      if (base == 'o') digit_run([](unsigned char ch) { return ch >= '0' && ch <= '7'; });
      if (base == 'b') digit_run([](unsigned char ch) { return ch == '0' || ch == '1'; });
      tok.text = std::string(text_.substr(start, pos_ - start));
      return tok;
    }
    digit_run([](unsigned char ch) { return std::isdigit(ch) != 0; });
    // A '.' followed by a digit starts a fraction; ".." is the range operator.
    if (pos_ + 1 < text_.size() && text_[pos_] == '.' && std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
      tok.kind = Tok::Float;
      advance();
      digit_run([](unsigned char ch) { return std::isdigit(ch) != 0; });
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
      if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
        tok.kind = Tok::Float;
        while (pos_ < look) advance();
        digit_run([](unsigned char ch) { return std::isdigit(ch) != 0; });
      }
    }
    tok.text = std::string(text_.substr(start, pos_ - start));
    return tok;
  }

  Token string_literal(Token& tok) {
    advance();
    std::string out;
    while (true) {
      if (pos_ >= text_.size() || text_[pos_] == '\n') {
        throw DznParseError(tok.line, tok.column, "unterminated string literal");
      }
      const char c = text_[pos_];
      if (c == '"') {
        advance();
        break;
      }
      if (c == '\\') {
        advance();
        if (pos_ >= text_.size()) throw DznParseError(tok.line, tok.column, "unterminated string literal");
        const char e = text_[pos_];
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          case '\'': out += '\''; break;
          default:
            throw DznParseError(line_, column_, std::string("unsupported escape sequence \\") + e);
        }
        advance();
        continue;
      }
      out += c;
      advance();
    }
    tok.kind = Tok::String;
    tok.text = std::move(out);
    return tok;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::End: return "end of input";
    case Tok::String: return "string literal";
    default: return "`" + t.text + "'";
  }
}

class Parser {
 public:
  explicit Parser(std::string_view text) : lexer_(text) { shift(); }

  Bindings parse_file() {
    Bindings out;
    while (cur_.kind != Tok::End) {
      if (cur_.kind == Tok::Semi) {
        shift();
        continue;
      }
      if (cur_.kind != Tok::Ident) fail(cur_, "expected an identifier, found " + describe(cur_));
      Token name = cur_;
      shift();
      expect(Tok::Equals, "`='");
      Value v = value();
      if (out.contains(name.text)) throw DuplicateBinding(name.text);
      out.add(name.text, std::move(v));
      if (cur_.kind == Tok::End) break;
      expect(Tok::Semi, "`;'");
    }
    return out;
  }

  Value parse_single() {
    Value v = value();
    if (cur_.kind == Tok::Semi) shift();
    if (cur_.kind != Tok::End) fail(cur_, "unexpected " + describe(cur_) + " after value");
    return v;
  }

 private:
  [[noreturn]] void fail(const Token& at, const std::string& message) {
    throw DznParseError(at.line, at.column, message);
  }

  void shift() { cur_ = lexer_.next(); }

  Token expect(Tok kind, const std::string& what) {
    if (cur_.kind != kind) fail(cur_, "expected " + what + ", found " + describe(cur_));
    Token t = cur_;
    shift();
    return t;
  }

  std::int64_t int_literal(const Token& t, bool negative) {
    std::int64_t v = 0;
    int base = 10;
    std::string_view digits = t.text;
    if (digits.size() > 2 && digits[0] == '0' && (digits[1] == 'x' || digits[1] == 'o' || digits[1] == 'b')) {
      base = digits[1] == 'x' ? 16 : digits[1] == 'o' ? 8 : 2;
      digits.remove_prefix(2);
    }
    // Parse via unsigned so that the most negative value is representable.
    std::uint64_t magnitude = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), magnitude, base);
    const std::uint64_t limit = negative ? std::uint64_t{1} << 63 : (std::uint64_t{1} << 63) - 1;
    if (ec != std::errc() || ptr != digits.data() + digits.size() || magnitude > limit) {
      fail(t, "integer literal out of range: " + t.text);
    }
    if (negative) {
      v = magnitude == (std::uint64_t{1} << 63) ? std::numeric_limits<std::int64_t>::min()
                                                 : -static_cast<std::int64_t>(magnitude);
    } else {
      v = static_cast<std::int64_t>(magnitude);
    }
    return v;
  }

  double float_literal(const Token& t, bool negative) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc() || ptr != t.text.data() + t.text.size()) fail(t, "malformed float literal " + t.text);
    return negative ? -v : v;
  }

  // Signed integer; used for ranges, indices and set members.
  std::int64_t signed_int(const std::string& context) {
    const bool negative = cur_.kind == Tok::Minus;
    if (negative) shift();
    if (cur_.kind != Tok::Int) fail(cur_, "expected an integer in " + context + ", found " + describe(cur_));
    Token t = cur_;
    shift();
    return int_literal(t, negative);
  }

  Value value() {
    const Token start = cur_;
    switch (cur_.kind) {
      case Tok::Minus:
      case Tok::Int:
      case Tok::Float: {
        const bool negative = cur_.kind == Tok::Minus;
        if (negative) shift();
        const Token t = cur_;
        if (t.kind == Tok::Int) {
          shift();
          const std::int64_t lo = int_literal(t, negative);
          if (cur_.kind == Tok::DotDot) {
            shift();
            const std::int64_t hi = signed_int("range");
            return range_set(start, lo, hi);
          }
          return Value(lo);
        }
        if (t.kind == Tok::Float) {
          shift();
          if (cur_.kind == Tok::DotDot) fail(start, "unsupported construct: float ranges");
          return Value(float_literal(t, negative));
        }
        fail(t, "expected a number after `-', found " + describe(t));
      }
      case Tok::String: {
        std::string s = cur_.text;
        shift();
        return Value(std::move(s));
      }
      case Tok::Ident: {
        if (cur_.text == "true" || cur_.text == "false") {
          const bool b = cur_.text == "true";
          shift();
          return Value(b);
        }
        if (cur_.text == "array1d" || cur_.text == "array2d") return array_call();
        if (cur_.text.rfind("array", 0) == 0 && cur_.text.size() > 6 && cur_.text.back() == 'd') {
          fail(cur_, "unsupported construct: " + cur_.text + " (arrays above two dimensions)");
        }
        fail(cur_, "unsupported construct: identifier `" + cur_.text + "' as a value (enums are not supported)");
      }
      case Tok::LBrace: return set_literal();
      case Tok::LBracket: return array1();
      case Tok::LBracketBar: return array2();
      default: fail(cur_, "expected a value, found " + describe(cur_));
    }
  }

  Value range_set(const Token& at, std::int64_t lo, std::int64_t hi) {
    IntSet s;
    if (hi >= lo) {
      if (hi - lo > 10'000'000) fail(at, "integer range too large to materialise");
      for (std::int64_t i = lo;; ++i) {
        s.members.push_back(i);
        if (i == hi) break;
      }
    }
    return Value(std::move(s));
  }

  Value set_literal() {
    shift();  // {
    IntSet s;
    while (cur_.kind != Tok::RBrace) {
      s.members.push_back(signed_int("set literal"));
      if (cur_.kind == Tok::Comma) {
        shift();
        continue;
      }
      if (cur_.kind != Tok::RBrace) fail(cur_, "expected `,' or `}' in set literal, found " + describe(cur_));
    }
    shift();
    std::sort(s.members.begin(), s.members.end());
    s.members.erase(std::unique(s.members.begin(), s.members.end()), s.members.end());
    return Value(std::move(s));
  }

  Value element() {
    if (cur_.kind == Tok::LBracket || cur_.kind == Tok::LBracketBar) {
      fail(cur_, "unsupported construct: nested array literal");
    }
    return value();
  }

  // Optional `int:` index annotation in front of an element. Returns the index
  // if present.
  std::optional<std::int64_t> index_annotation() {
    // Lookahead needs two tokens, so parse the integer and check for ':'.
    if (cur_.kind != Tok::Int && cur_.kind != Tok::Minus) return std::nullopt;
    Lexer saved_lexer = lexer_;
    Token saved = cur_;
    const bool negative = cur_.kind == Tok::Minus;
    if (negative) shift();
    if (cur_.kind != Tok::Int) {
      lexer_ = saved_lexer;
      cur_ = saved;
      return std::nullopt;
    }
    Token t = cur_;
    shift();
    if (cur_.kind == Tok::Colon) {
      shift();
      return int_literal(t, negative);
    }
    lexer_ = saved_lexer;
    cur_ = saved;
    return std::nullopt;
  }

  Value array1() {
    const Token open = cur_;
    shift();  // [
    Array a;
    std::optional<std::int64_t> first_index;
    std::int64_t expected_index = 0;
    while (cur_.kind != Tok::RBracket) {
      const Token at = cur_;
      if (auto idx = index_annotation()) {
        if (a.elements.empty()) {
          first_index = idx;
          expected_index = *idx;
        } else if (!first_index || *idx != expected_index) {
          fail(at, "index annotations must be contiguous and ascending");
        }
      }
      a.elements.push_back(element());
      ++expected_index;
      if (cur_.kind == Tok::Comma) {
        shift();
        continue;
      }
      if (cur_.kind != Tok::RBracket) fail(cur_, "expected `,' or `]' in array literal, found " + describe(cur_));
    }
    shift();
    if (cur_.kind == Tok::Bar) fail(open, "unsupported construct: array comprehension");
    const std::int64_t lo = first_index.value_or(1);
    a.dims = {IndexRange{lo, lo + static_cast<std::int64_t>(a.elements.size()) - 1}};
    return Value(std::move(a));
  }

  struct Row {
    std::optional<std::int64_t> label;
    std::vector<std::int64_t> header;
    std::vector<Value> values;
  };

  bool at_row_end() const { return cur_.kind == Tok::Bar || cur_.kind == Tok::BarRBracket; }

  Row row() {
    Row r;
    while (!at_row_end()) {
      const Token at = cur_;
      if (auto idx = index_annotation()) {
        if (at_row_end() || looks_like_annotation()) {
          if (!r.values.empty() || r.label) fail(at, "unexpected index annotation inside a row");
          r.header.push_back(*idx);
          continue;
        }
        if (!r.values.empty() || r.label || !r.header.empty()) fail(at, "unexpected index annotation inside a row");
        r.label = idx;
      }
      r.values.push_back(element());
      if (cur_.kind == Tok::Comma) {
        shift();
        continue;
      }
      if (!at_row_end()) fail(cur_, "expected `,', `|' or `|]' in 2-D array literal, found " + describe(cur_));
    }
    return r;
  }

  Value array2() {
    const Token open = cur_;
    shift();  // [|
    Array a;
    if (cur_.kind == Tok::BarRBracket) {
      shift();
      a.dims = {IndexRange{1, 0}, IndexRange{1, 0}};
      return Value(std::move(a));
    }
    std::vector<std::int64_t> column_header;
    std::vector<std::int64_t> row_labels;
    std::size_t rows = 0;
    std::size_t cols = 0;
    bool first = true;
    while (true) {
      Row r = row();
      const bool closing = cur_.kind == Tok::BarRBracket;
      shift();
      if (!r.header.empty()) {
        if (!first) fail(open, "column header must be the first row of a 2-D array literal");
        column_header = std::move(r.header);
        first = false;
        if (closing) fail(open, "2-D array literal has a header but no rows");
        continue;
      }
      first = false;
      if (r.values.empty() && closing && rows > 0) break;  // trailing `| |]`
      if (rows == 0) {
        cols = r.values.size();
      } else if (r.values.size() != cols) {
        fail(open, "rows of 2-D array literal have different lengths");
      }
      if (r.label) {
        if (rows > 0 && (row_labels.empty() || *r.label != row_labels.back() + 1)) {
          fail(open, "row index annotations must be contiguous and ascending");
        }
        row_labels.push_back(*r.label);
      } else if (!row_labels.empty()) {
        fail(open, "row index annotations must be given on every row");
      }
      for (auto& v : r.values) a.elements.push_back(std::move(v));
      ++rows;
      if (closing) break;
      if (cur_.kind == Tok::BarRBracket) {
        shift();
        break;
      }
    }
    if (!column_header.empty()) {
      if (column_header.size() != cols) fail(open, "column header length does not match row length");
      for (std::size_t i = 1; i < column_header.size(); ++i) {
        if (column_header[i] != column_header[i - 1] + 1) fail(open, "column indices must be contiguous");
      }
    }
    const std::int64_t rlo = row_labels.empty() ? 1 : row_labels.front();
    const std::int64_t clo = column_header.empty() ? 1 : column_header.front();
    a.dims = {IndexRange{rlo, rlo + static_cast<std::int64_t>(rows) - 1},
              IndexRange{clo, clo + static_cast<std::int64_t>(cols) - 1}};
    return Value(std::move(a));
  }

  bool looks_like_annotation() {
    if (cur_.kind != Tok::Int && cur_.kind != Tok::Minus) return false;
    Lexer saved_lexer = lexer_;
    Token saved = cur_;
    const bool result = index_annotation().has_value();
    lexer_ = saved_lexer;
    cur_ = saved;
    return result;
  }

  IndexRange index_range() {
    const Token at = cur_;
    if (cur_.kind == Tok::LBrace) {
      shift();
      if (cur_.kind != Tok::RBrace) fail(at, "unsupported construct: non-range index set");
      shift();
      return IndexRange{1, 0};
    }
    const std::int64_t lo = signed_int("index range");
    expect(Tok::DotDot, "`..'");
    const std::int64_t hi = signed_int("index range");
    return IndexRange{lo, hi};
  }

  Value array_call() {
    const Token head = cur_;
    const std::size_t rank = head.text == "array1d" ? 1 : 2;
    shift();
    expect(Tok::LParen, "`('");
    std::vector<IndexRange> dims;
    for (std::size_t i = 0; i < rank; ++i) {
      dims.push_back(index_range());
      expect(Tok::Comma, "`,'");
    }
    if (cur_.kind != Tok::LBracket) fail(cur_, "expected an array literal in " + head.text);
    Value inner = array1();
    expect(Tok::RParen, "`)'");
    Array a = std::get<Array>(std::move(inner.data));
    std::int64_t expected = 1;
    for (const auto& d : dims) expected *= d.extent();
    if (static_cast<std::int64_t>(a.elements.size()) != expected) {
      fail(head, head.text + ": index sets describe " + std::to_string(expected) + " elements but " +
                     std::to_string(a.elements.size()) + " were given");
    }
    a.dims = std::move(dims);
    return Value(std::move(a));
  }

  Lexer lexer_;
  Token cur_;
};

bool default_dims(const Array& a) {
  for (const auto& d : a.dims) {
    if (d.lo != 1) return false;
  }
  return true;
}

std::string range_text(const IndexRange& r) { return std::to_string(r.lo) + ".." + std::to_string(r.hi); }

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

std::string format_set(const IntSet& s) {
  const auto& m = s.members;
  if (m.size() >= 2 && m.back() - m.front() == static_cast<std::int64_t>(m.size()) - 1) {
    return std::to_string(m.front()) + ".." + std::to_string(m.back());
  }
  std::string out = "{";
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(m[i]);
  }
  return out + "}";
}

std::string join_elements(const std::vector<Value>& elements) {
  std::string out;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    if (i) out += ", ";
    out += format_value(elements[i]);
  }
  return out;
}

std::string format_array(const Array& a) {
  if (a.dims.size() == 1) {
    if (default_dims(a)) return "[" + join_elements(a.elements) + "]";
    return "array1d(" + range_text(a.dims[0]) + ", [" + join_elements(a.elements) + "])";
  }
  if (a.dims.size() == 2) {
    const auto rows = a.dims[0].extent();
    const auto cols = a.dims[1].extent();
    if (default_dims(a) && rows > 0 && cols > 0) {
      std::string out = "[|";
      for (std::int64_t r = 0; r < rows; ++r) {
        out += r ? " | " : " ";
        for (std::int64_t c = 0; c < cols; ++c) {
          if (c) out += ", ";
          out += format_value(a.elements[static_cast<std::size_t>(r * cols + c)]);
        }
      }
      return out + " |]";
    }
    return "array2d(" + range_text(a.dims[0]) + ", " + range_text(a.dims[1]) + ", [" + join_elements(a.elements) +
           "])";
  }
  throw std::invalid_argument("cannot serialize arrays with " + std::to_string(a.dims.size()) + " dimensions");
}

}  // namespace

Bindings parse(std::string_view text) { return Parser(text).parse_file(); }

Value parse_value(std::string_view text) { return Parser(text).parse_single(); }

std::string format_float(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("non-finite floats have no DZN literal");
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  std::string s(buf, ptr);
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  // MiniZinc requires digits after the mantissa point: "1e+20" is fine, but
  // "1.e5" is not produced by to_chars anyway.
  return s;
}

std::string format_value(const Value& value) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, double>) {
          return format_float(v);
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::string>) {
          return quote(v);
        } else if constexpr (std::is_same_v<T, Array>) {
          return format_array(v);
        } else {
          return format_set(v);
        }
      },
      value.data);
}

std::string serialize(const Bindings& bindings) {
  std::string out;
  for (const auto& [name, value] : bindings) {
    out += name;
    out += " = ";
    out += format_value(value);
    out += ";\n";
  }
  return out;
}

Value make_array(std::vector<Value> elements) {
  Array a;
  a.dims = {IndexRange{1, static_cast<std::int64_t>(elements.size())}};
  a.elements = std::move(elements);
  return Value(std::move(a));
}

Value make_array2d(std::size_t rows, std::size_t cols, std::vector<Value> elements) {
  if (elements.size() != rows * cols) throw std::invalid_argument("element count does not match 2-D shape");
  Array a;
  a.dims = {IndexRange{1, static_cast<std::int64_t>(rows)}, IndexRange{1, static_cast<std::int64_t>(cols)}};
  a.elements = std::move(elements);
  return Value(std::move(a));
}

}  // namespace t2m::dzn
