#pragma once

// DZN data files: the value model and a parser/serializer for the subset the
// corpus and the solver harness need.
//
// Supported: int/float/bool/string scalars, 1-D and 2-D array literals
// (`[..]`, `[| .. |]`, index-annotated forms and `array1d`/`array2d`), and
// integer sets (`{..}`, `a..b`). Anything else is reported as a positioned
// DznParseError rather than silently skipped.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace t2m::dzn {

struct IndexRange {
  std::int64_t lo = 1;
  std::int64_t hi = 0;

  std::int64_t extent() const { return hi >= lo ? hi - lo + 1 : 0; }
  bool operator==(const IndexRange&) const = default;
};

struct Value;

struct Array {
  std::vector<IndexRange> dims;
  std::vector<Value> elements;  // row-major

  bool operator==(const Array&) const;
};

struct IntSet {
  std::vector<std::int64_t> members;  // strictly increasing
  bool operator==(const IntSet&) const = default;
};

struct Value {
  using Storage = std::variant<std::int64_t, double, bool, std::string, Array, IntSet>;
  Storage data;

  Value() : data(std::int64_t{0}) {}
  Value(std::int64_t v) : data(v) {}
  Value(int v) : data(std::int64_t{v}) {}
  Value(double v) : data(v) {}
  Value(bool v) : data(v) {}
  Value(std::string v) : data(std::move(v)) {}
  Value(const char* v) : data(std::string(v)) {}
  Value(Array v) : data(std::move(v)) {}
  Value(IntSet v) : data(std::move(v)) {}

  bool is_int() const { return std::holds_alternative<std::int64_t>(data); }
  bool is_float() const { return std::holds_alternative<double>(data); }
  bool is_bool() const { return std::holds_alternative<bool>(data); }
  bool is_string() const { return std::holds_alternative<std::string>(data); }
  bool is_array() const { return std::holds_alternative<Array>(data); }
  bool is_set() const { return std::holds_alternative<IntSet>(data); }
  bool is_scalar() const { return !is_array(); }

  const Array& array() const { return std::get<Array>(data); }
  const IntSet& set() const { return std::get<IntSet>(data); }

  // Number of array dimensions; 0 for scalars and sets.
  std::size_t rank() const { return is_array() ? array().dims.size() : 0; }

  // Numeric view of int/float/bool scalars. Throws std::bad_variant_access otherwise.
  double as_number() const;

  bool operator==(const Value& other) const { return data == other.data; }
};

// Insertion-ordered symbol table. Symbols are unique.
class Bindings {
 public:
  using Entry = std::pair<std::string, Value>;

  bool contains(std::string_view symbol) const;
  const Value* find(std::string_view symbol) const;
  const Value& at(std::string_view symbol) const;
  // Throws DuplicateBinding if the symbol is already bound.
  void add(std::string symbol, Value value);
  void set(std::string symbol, Value value);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  bool operator==(const Bindings&) const = default;

 private:
  std::vector<Entry> entries_;
};

class DznParseError : public std::runtime_error {
 public:
  DznParseError(int line, int column, const std::string& message);
  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& detail() const { return detail_; }

 private:
  int line_;
  int column_;
  std::string detail_;
};

class DuplicateBinding : public std::runtime_error {
 public:
  explicit DuplicateBinding(const std::string& symbol);
  const std::string& symbol() const { return symbol_; }

 private:
  std::string symbol_;
};

Bindings parse(std::string_view text);

// Parses a single value expression (the right-hand side of an assignment).
Value parse_value(std::string_view text);

std::string serialize(const Bindings& bindings);
std::string format_value(const Value& value);

// Shortest decimal text that reads back to the same double, always carrying a
// '.' or exponent so the token stays a float literal.
std::string format_float(double value);

// Helpers for building arrays with default 1-based index ranges.
Value make_array(std::vector<Value> elements);
Value make_array2d(std::size_t rows, std::size_t cols, std::vector<Value> elements);

}  // namespace t2m::dzn
