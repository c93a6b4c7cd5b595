#pragma once

// Problem instances in the four-file layout:
//
//   <root>/input.json   description, parameters, output spec, metadata
//   <root>/data.dzn     instance data (optional, may be empty)
//   <root>/model.mzn    ground-truth model (required for satisfy problems)
//   <root>/output.json  expected output (optional)
//
// A corpus root holds instance directories plus index.json.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "t2m/dzn.hpp"
#include "t2m/error.hpp"

namespace t2m::corpus {

using Json = nlohmann::ordered_json;

T2M_DEFINE_ERROR(MissingInput);
T2M_DEFINE_ERROR(MalformedInput);
T2M_DEFINE_ERROR(InvalidObjective);
T2M_DEFINE_ERROR(MissingGroundTruth);
T2M_DEFINE_ERROR(IoError);
T2M_DEFINE_ERROR(InvalidInstance);

enum class Objective { Satisfy, Maximize, Minimize };

std::string_view to_string(Objective o);
// Throws InvalidObjective for anything but "satisfy", "maximize", "minimize".
Objective parse_objective(std::string_view text);
bool is_optimization(Objective o);

bool is_identifier(std::string_view symbol);

// Shared shape of parameter and output declarations. `shape` lists dimension
// extents by label; empty means scalar.
struct SymbolSpec {
  std::string definition;
  std::string symbol;
  std::vector<std::string> shape;
  Json extra = Json::object();  // unknown keys, preserved on save

  bool is_scalar() const { return shape.empty(); }
  bool operator==(const SymbolSpec&) const = default;
};

using ParamSpec = SymbolSpec;
using OutputSpec = SymbolSpec;

struct Metadata {
  std::string title;
  std::string identifier;
  std::string domain;
  std::optional<std::string> subdomain;
  Objective objective = Objective::Satisfy;
  std::vector<std::string> keywords;
  Json extra = Json::object();

  // Source dataset tag: metadata "source" when present, otherwise the
  // identifier prefix before the first '_', '-', ':' or '/'.
  std::string source() const;

  bool operator==(const Metadata&) const = default;
};

struct ProblemInput {
  std::string description;
  std::vector<ParamSpec> parameters;
  std::vector<OutputSpec> output;
  Metadata metadata;
  Json extra = Json::object();

  bool operator==(const ProblemInput&) const = default;
};

struct ExpectedOutput {
  std::optional<double> objective_value;
  Json variable_values = Json::object();  // symbol -> value tree (nested arrays for arrays)
  bool unsatisfiable = false;
  Json extra = Json::object();

  bool operator==(const ExpectedOutput&) const = default;
};

struct ProblemInstance {
  ProblemInput input;
  std::string data_text;
  std::optional<std::string> ground_truth_model;
  std::optional<ExpectedOutput> expected_output;
  bool verified = false;

  const std::string& id() const { return input.metadata.identifier; }
  Objective objective() const { return input.metadata.objective; }
  bool operator==(const ProblemInstance&) const = default;
};

// Invariant violations of an instance (duplicate symbols, bad identifiers,
// satisfy without a model, ...). Empty means valid.
std::vector<std::string> check_invariants(const ProblemInstance& instance);

ProblemInstance load_problem(const std::filesystem::path& root);
// Validates with check_invariants first; throws InvalidInstance without
// touching the directory when that fails.
void save_problem(const ProblemInstance& instance, const std::filesystem::path& root);

// JSON views of the on-disk files, also used by the editor service.
Json input_to_json(const ProblemInstance& instance);
Json expected_to_json(const ExpectedOutput& expected);
ProblemInput input_from_json(const Json& j);
ExpectedOutput expected_from_json(const Json& j);
// Full instance as one JSON document: {input, data, model, output, verified}.
Json instance_to_json(const ProblemInstance& instance);
ProblemInstance instance_from_json(const Json& j);

enum class FindingKind { MissingSymbol, ShapeMismatch, UnusedBinding };
std::string_view to_string(FindingKind k);

struct Finding {
  FindingKind kind;
  std::string symbol;
  std::string message;
  bool operator==(const Finding&) const = default;
};

using ValidationReport = std::vector<Finding>;

// Compares declared parameters with the parsed data file. Throws
// dzn::DznParseError / dzn::DuplicateBinding if the data does not parse.
// Value tree in the layout of output.json: nested arrays for arrays, member
// lists for sets.
Json value_to_json(const dzn::Value& v);

ValidationReport cross_validate(const ProblemInstance& instance);
ValidationReport cross_validate(const ProblemInstance& instance, const dzn::Bindings& data);

// Directory of instances plus index.json ({"instances": [{"id", "path"}]}).
class Corpus {
 public:
  struct Entry {
    std::string id;
    std::filesystem::path path;  // relative to the corpus root
  };

  // Reads index.json, or scans immediate subdirectories holding input.json
  // when there is no index.
  static Corpus open(const std::filesystem::path& root);

  const std::filesystem::path& root() const { return root_; }
  const std::vector<Entry>& entries() const { return entries_; }
  std::optional<std::filesystem::path> path_of(std::string_view id) const;
  ProblemInstance load(std::string_view id) const;
  // Saves the instance under <root>/<id> (or its indexed path) and updates the index.
  void store(const ProblemInstance& instance);
  void write_index() const;

 private:
  std::filesystem::path root_;
  std::vector<Entry> entries_;
};

}  // namespace t2m::corpus
