#include "t2m/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace t2m::corpus {

namespace fs = std::filesystem;

std::string_view to_string(Objective o) {
  switch (o) {
    case Objective::Satisfy: return "satisfy";
    case Objective::Maximize: return "maximize";
    case Objective::Minimize: return "minimize";
  }
  return "satisfy";
}

Objective parse_objective(std::string_view text) {
  if (text == "satisfy") return Objective::Satisfy;
  if (text == "maximize") return Objective::Maximize;
  if (text == "minimize") return Objective::Minimize;
  throw InvalidObjective("objective must be one of satisfy, maximize, minimize; got \"" + std::string(text) + "\"");
}

bool is_optimization(Objective o) { return o != Objective::Satisfy; }

bool is_identifier(std::string_view symbol) {
  if (symbol.empty()) return false;
  const auto first = static_cast<unsigned char>(symbol.front());
  if (!std::isalpha(first) && first != '_') return false;
  return std::all_of(symbol.begin() + 1, symbol.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

std::string Metadata::source() const {
  if (auto it = extra.find("source"); it != extra.end() && it->is_string()) return it->get<std::string>();
  const auto cut = identifier.find_first_of("_-:/");
  return cut == std::string::npos ? identifier : identifier.substr(0, cut);
}

std::string_view to_string(FindingKind k) {
  switch (k) {
    case FindingKind::MissingSymbol: return "missing-symbol";
    case FindingKind::ShapeMismatch: return "shape-mismatch";
    case FindingKind::UnusedBinding: return "unused-binding";
  }
  return "";
}

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, std::string_view content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + p.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write failed for " + p.string());
}

Json parse_json(const std::string& text, const fs::path& origin) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw MalformedInput(origin.string() + ": " + e.what());
  }
}

// Field accessors that turn nlohmann type errors into MalformedInput with the
// offending key in the message.
std::string take_string(Json& obj, const char* key, const std::string& where, bool required = true) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (required) throw MalformedInput(where + ": missing \"" + key + "\"");
    return {};
  }
  if (!it->is_string()) throw MalformedInput(where + ": \"" + key + "\" must be a string");
  std::string v = it->get<std::string>();
  obj.erase(it);
  return v;
}

std::vector<std::string> take_string_list(Json& obj, const char* key, const std::string& where, bool required) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (required) throw MalformedInput(where + ": missing \"" + key + "\"");
    return {};
  }
  if (!it->is_array()) throw MalformedInput(where + ": \"" + key + "\" must be a list");
  std::vector<std::string> out;
  for (const auto& e : *it) {
    if (e.is_string()) {
      out.push_back(e.get<std::string>());
    } else if (e.is_number_integer()) {
      // Some sources write numeric extents; keep them as labels.
      out.push_back(std::to_string(e.get<long long>()));
    } else {
      throw MalformedInput(where + ": \"" + key + "\" must contain strings");
    }
  }
  obj.erase(it);
  return out;
}

SymbolSpec symbol_from_json(const Json& j, const std::string& where) {
  if (!j.is_object()) throw MalformedInput(where + " must be an object");
  Json rest = j;
  SymbolSpec s;
  s.definition = take_string(rest, "definition", where);
  s.symbol = take_string(rest, "symbol", where);
  s.shape = take_string_list(rest, "shape", where, true);
  s.extra = std::move(rest);
  return s;
}

Json symbol_to_json(const SymbolSpec& s) {
  Json j = Json::object();
  j["definition"] = s.definition;
  j["symbol"] = s.symbol;
  j["shape"] = s.shape;
  for (const auto& [k, v] : s.extra.items()) j[k] = v;
  return j;
}

Json number_json(double v) {
  if (std::isfinite(v) && std::floor(v) == v && std::fabs(v) < 9007199254740992.0) {
    return Json(static_cast<long long>(v));
  }
  return Json(v);
}

void add_duplicate_findings(const std::vector<SymbolSpec>& specs, const char* what,
                            std::vector<std::string>& out) {
  std::set<std::string> seen;
  for (const auto& s : specs) {
    if (!is_identifier(s.symbol)) out.push_back(std::string(what) + " symbol `" + s.symbol + "' is not a valid identifier");
    if (!seen.insert(s.symbol).second) out.push_back("duplicate " + std::string(what) + " symbol `" + s.symbol + "'");
  }
}

}  // namespace

ProblemInput input_from_json(const Json& j) {
  if (!j.is_object()) throw MalformedInput("input.json must hold an object");
  Json rest = j;
  ProblemInput in;
  in.description = take_string(rest, "description", "input.json");

  auto list_of = [&](const char* key) {
    std::vector<SymbolSpec> out;
    auto it = rest.find(key);
    if (it == rest.end()) return out;
    if (!it->is_array()) throw MalformedInput(std::string("input.json: \"") + key + "\" must be a list");
    for (std::size_t i = 0; i < it->size(); ++i) {
      out.push_back(symbol_from_json((*it)[i], std::string(key) + "[" + std::to_string(i) + "]"));
    }
    rest.erase(it);
    return out;
  };
  in.parameters = list_of("parameters");
  in.output = list_of("output");

  auto meta_it = rest.find("metadata");
  if (meta_it == rest.end() || !meta_it->is_object()) throw MalformedInput("input.json: missing \"metadata\" object");
  Json meta = *meta_it;
  rest.erase(meta_it);
  in.metadata.title = take_string(meta, "title", "metadata", false);
  in.metadata.identifier = take_string(meta, "identifier", "metadata");
  in.metadata.domain = take_string(meta, "domain", "metadata", false);
  if (auto it = meta.find("subdomain"); it != meta.end()) {
    if (!it->is_null()) in.metadata.subdomain = take_string(meta, "subdomain", "metadata");
    else meta.erase(it);
  }
  in.metadata.objective = parse_objective(take_string(meta, "objective", "metadata"));
  in.metadata.keywords = take_string_list(meta, "keywords", "metadata", false);
  in.metadata.extra = std::move(meta);
  // "verified" lives next to the input fields but belongs to the instance.
  rest.erase("verified");
  in.extra = std::move(rest);
  return in;
}

ExpectedOutput expected_from_json(const Json& j) {
  if (!j.is_object()) throw MalformedInput("output.json must hold an object");
  Json rest = j;
  ExpectedOutput out;
  if (auto it = rest.find("objective_value"); it != rest.end()) {
    if (it->is_number()) {
      out.objective_value = it->get<double>();
    } else if (!it->is_null()) {
      throw MalformedInput("output.json: \"objective_value\" must be a number");
    }
    rest.erase(it);
  }
  if (auto it = rest.find("variable_values"); it != rest.end()) {
    if (!it->is_object()) throw MalformedInput("output.json: \"variable_values\" must be an object");
    out.variable_values = *it;
    rest.erase(it);
  }
  if (auto it = rest.find("unsatisfiable"); it != rest.end()) {
    if (!it->is_boolean()) throw MalformedInput("output.json: \"unsatisfiable\" must be a boolean");
    out.unsatisfiable = it->get<bool>();
    rest.erase(it);
  }
  out.extra = std::move(rest);
  return out;
}

Json input_to_json(const ProblemInstance& instance) {
  const ProblemInput& in = instance.input;
  Json j = Json::object();
  j["description"] = in.description;
  j["parameters"] = Json::array();
  for (const auto& p : in.parameters) j["parameters"].push_back(symbol_to_json(p));
  j["output"] = Json::array();
  for (const auto& o : in.output) j["output"].push_back(symbol_to_json(o));
  Json meta = Json::object();
  meta["title"] = in.metadata.title;
  meta["identifier"] = in.metadata.identifier;
  meta["domain"] = in.metadata.domain;
  if (in.metadata.subdomain) meta["subdomain"] = *in.metadata.subdomain;
  meta["objective"] = std::string(to_string(in.metadata.objective));
  meta["keywords"] = in.metadata.keywords;
  for (const auto& [k, v] : in.metadata.extra.items()) meta[k] = v;
  j["metadata"] = std::move(meta);
  j["verified"] = instance.verified;
  for (const auto& [k, v] : in.extra.items()) j[k] = v;
  return j;
}

Json expected_to_json(const ExpectedOutput& expected) {
  Json j = Json::object();
  if (expected.objective_value) j["objective_value"] = number_json(*expected.objective_value);
  j["variable_values"] = expected.variable_values;
  if (expected.unsatisfiable) j["unsatisfiable"] = true;
  for (const auto& [k, v] : expected.extra.items()) j[k] = v;
  return j;
}

Json instance_to_json(const ProblemInstance& instance) {
  Json j = Json::object();
  j["input"] = input_to_json(instance);
  j["data"] = instance.data_text;
  j["model"] = instance.ground_truth_model ? Json(*instance.ground_truth_model) : Json(nullptr);
  j["output"] = instance.expected_output ? expected_to_json(*instance.expected_output) : Json(nullptr);
  j["verified"] = instance.verified;
  return j;
}

ProblemInstance instance_from_json(const Json& j) {
  if (!j.is_object()) throw MalformedInput("instance body must be an object");
  auto input = j.find("input");
  if (input == j.end()) throw MalformedInput("instance body: missing \"input\"");
  ProblemInstance inst;
  inst.input = input_from_json(*input);
  if (auto v = input->find("verified"); v != input->end() && v->is_boolean()) inst.verified = v->get<bool>();
  if (auto it = j.find("data"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw MalformedInput("instance body: \"data\" must be a string");
    inst.data_text = it->get<std::string>();
  }
  if (auto it = j.find("model"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw MalformedInput("instance body: \"model\" must be a string");
    inst.ground_truth_model = it->get<std::string>();
  }
  if (auto it = j.find("output"); it != j.end() && !it->is_null()) inst.expected_output = expected_from_json(*it);
  if (auto it = j.find("verified"); it != j.end()) {
    if (!it->is_boolean()) throw MalformedInput("instance body: \"verified\" must be a boolean");
    inst.verified = it->get<bool>();
  }
  return inst;
}

std::vector<std::string> check_invariants(const ProblemInstance& instance) {
  std::vector<std::string> out;
  const auto& in = instance.input;
  if (in.metadata.identifier.empty()) out.push_back("metadata.identifier is empty");
  add_duplicate_findings(in.parameters, "parameter", out);
  add_duplicate_findings(in.output, "output", out);
  if (in.metadata.objective == Objective::Satisfy && !instance.ground_truth_model) {
    out.push_back("satisfy problems require a ground-truth model");
  }
  if (instance.expected_output && !instance.expected_output->unsatisfiable) {
    const auto& e = *instance.expected_output;
    if (is_optimization(in.metadata.objective) && !e.objective_value) {
      out.push_back("expected output of an optimization problem needs objective_value");
    }
    if (in.metadata.objective == Objective::Satisfy && e.variable_values.empty()) {
      out.push_back("expected output of a satisfaction problem needs variable_values");
    }
  }
  return out;
}

ProblemInstance load_problem(const fs::path& root) {
  const fs::path input_path = root / "input.json";
  if (!fs::is_regular_file(input_path)) throw MissingInput("no input.json in " + root.string());

  const Json input = parse_json(read_file(input_path), input_path);
  ProblemInstance inst;
  inst.input = input_from_json(input);
  if (auto v = input.find("verified"); v != input.end()) {
    if (!v->is_boolean()) throw MalformedInput("input.json: \"verified\" must be a boolean");
    inst.verified = v->get<bool>();
  }
  if (fs::is_regular_file(root / "data.dzn")) inst.data_text = read_file(root / "data.dzn");
  if (fs::is_regular_file(root / "model.mzn")) inst.ground_truth_model = read_file(root / "model.mzn");
  if (fs::is_regular_file(root / "output.json")) {
    inst.expected_output = expected_from_json(parse_json(read_file(root / "output.json"), root / "output.json"));
  }

  if (inst.objective() == Objective::Satisfy && !inst.ground_truth_model) {
    throw MissingGroundTruth(root.string() + ": satisfy problem without model.mzn");
  }
  std::vector<std::string> problems;
  const auto& in = inst.input;
  if (in.metadata.identifier.empty()) problems.push_back("metadata.identifier is empty");
  add_duplicate_findings(in.parameters, "parameter", problems);
  add_duplicate_findings(in.output, "output", problems);
  if (!problems.empty()) throw MalformedInput(root.string() + ": " + problems.front());
  return inst;
}

void save_problem(const ProblemInstance& instance, const fs::path& root) {
  if (auto problems = check_invariants(instance); !problems.empty()) {
    std::string msg = "refusing to save " + instance.id() + ":";
    for (const auto& p : problems) msg += " " + p + ";";
    throw InvalidInstance(msg);
  }
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw IoError("cannot create " + root.string() + ": " + ec.message());

  write_file(root / "input.json", input_to_json(instance).dump(2) + "\n");
  // data.dzn is always written so that an emptied data text does not leave a
  // stale file behind.
  write_file(root / "data.dzn", instance.data_text);
  if (instance.ground_truth_model) {
    write_file(root / "model.mzn", *instance.ground_truth_model);
  } else {
    fs::remove(root / "model.mzn", ec);
  }
  if (instance.expected_output) {
    write_file(root / "output.json", expected_to_json(*instance.expected_output).dump(2) + "\n");
  } else {
    fs::remove(root / "output.json", ec);
  }
}

namespace {

// Resolves a dimension label to an extent: integer literals directly, labels
// naming an integer scalar binding through the data.
std::optional<std::int64_t> resolve_extent(const std::string& label, const dzn::Bindings& data) {
  if (!label.empty() && std::all_of(label.begin(), label.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    return std::stoll(label);
  }
  if (const dzn::Value* v = data.find(label); v && v->is_int()) return std::get<std::int64_t>(v->data);
  if (const dzn::Value* v = data.find(label); v && v->is_set()) {
    return static_cast<std::int64_t>(v->set().members.size());
  }
  return std::nullopt;
}

std::string rank_name(std::size_t rank) {
  return rank == 0 ? std::string("scalar") : std::to_string(rank) + "-D";
}

}  // namespace

ValidationReport cross_validate(const ProblemInstance& instance, const dzn::Bindings& data) {
  ValidationReport report;
  std::set<std::string> declared;
  for (const auto& p : instance.input.parameters) {
    declared.insert(p.symbol);
    const dzn::Value* v = data.find(p.symbol);
    if (!v) {
      report.push_back({FindingKind::MissingSymbol, p.symbol, "`" + p.symbol + "' is declared but not bound in data.dzn"});
      continue;
    }
    const std::size_t rank = v->rank();
    if (rank != p.shape.size()) {
      report.push_back({FindingKind::ShapeMismatch, p.symbol,
                        "`" + p.symbol + "': expected " + rank_name(p.shape.size()) + ", found " + rank_name(rank)});
      continue;
    }
    for (std::size_t d = 0; d < rank; ++d) {
      const auto want = resolve_extent(p.shape[d], data);
      const auto have = v->array().dims[d].extent();
      if (want && *want != have) {
        report.push_back({FindingKind::ShapeMismatch, p.symbol,
                          "`" + p.symbol + "': dimension " + std::to_string(d + 1) + " (" + p.shape[d] +
                              ") expects extent " + std::to_string(*want) + ", found " + std::to_string(have)});
        break;
      }
    }
  }
  for (const auto& [symbol, value] : data) {
    if (!declared.count(symbol)) {
      report.push_back({FindingKind::UnusedBinding, symbol, "`" + symbol + "' is bound in data.dzn but not declared"});
    }
  }
  return report;
}

ValidationReport cross_validate(const ProblemInstance& instance) {
  return cross_validate(instance, dzn::parse(instance.data_text));
}

Corpus Corpus::open(const fs::path& root) {
  if (!fs::is_directory(root)) throw IoError("corpus root " + root.string() + " is not a directory");
  Corpus c;
  c.root_ = root;
  const fs::path index = root / "index.json";
  if (fs::is_regular_file(index)) {
    const Json j = parse_json(read_file(index), index);
    const Json& list = j.is_object() ? j.value("instances", Json::array()) : j;
    if (!list.is_array()) throw MalformedInput("index.json: expected a list of instances");
    for (const auto& e : list) {
      if (!e.is_object() || !e.contains("id") || !e.contains("path")) {
        throw MalformedInput("index.json: entries need \"id\" and \"path\"");
      }
      c.entries_.push_back({e["id"].get<std::string>(), fs::path(e["path"].get<std::string>())});
    }
    return c;
  }
  std::vector<fs::path> dirs;
  for (const auto& d : fs::directory_iterator(root)) {
    if (d.is_directory() && fs::is_regular_file(d.path() / "input.json")) dirs.push_back(d.path());
  }
  std::sort(dirs.begin(), dirs.end());
  for (const auto& d : dirs) {
    const ProblemInstance inst = load_problem(d);
    c.entries_.push_back({inst.id(), d.filename()});
  }
  return c;
}

std::optional<fs::path> Corpus::path_of(std::string_view id) const {
  for (const auto& e : entries_) {
    if (e.id == id) return root_ / e.path;
  }
  return std::nullopt;
}

ProblemInstance Corpus::load(std::string_view id) const {
  auto p = path_of(id);
  if (!p) throw MissingInput("no instance `" + std::string(id) + "' in corpus " + root_.string());
  return load_problem(*p);
}

void Corpus::store(const ProblemInstance& instance) {
  auto p = path_of(instance.id());
  if (!p) {
    if (!is_identifier(instance.id()) && instance.id().find_first_of("/\\") != std::string::npos) {
      throw InvalidInstance("identifier `" + instance.id() + "' cannot be used as a directory name");
    }
    save_problem(instance, root_ / instance.id());
    entries_.push_back({instance.id(), fs::path(instance.id())});
    write_index();
    return;
  }
  save_problem(instance, *p);
}

void Corpus::write_index() const {
  Json list = Json::array();
  for (const auto& e : entries_) list.push_back(Json{{"id", e.id}, {"path", e.path.generic_string()}});
  write_file(root_ / "index.json", Json{{"instances", list}}.dump(2) + "\n");
}

namespace {

Json array_slice(const dzn::Array& a, std::size_t dim, std::size_t& next) {
  Json out = Json::array();
  for (std::int64_t i = 0; i < a.dims[dim].extent(); ++i) {
    if (dim + 1 == a.dims.size()) out.push_back(value_to_json(a.elements[next++]));
    else out.push_back(array_slice(a, dim + 1, next));
  }
  return out;
}

}  // namespace

Json value_to_json(const dzn::Value& v) {
  if (v.is_int()) return std::get<std::int64_t>(v.data);
  if (v.is_float()) return std::get<double>(v.data);
  if (v.is_bool()) return std::get<bool>(v.data);
  if (v.is_string()) return std::get<std::string>(v.data);
  if (v.is_set()) return v.set().members;
  std::size_t next = 0;
  if (v.array().dims.empty()) return Json::array();
  return array_slice(v.array(), 0, next);
}

}  // namespace t2m::corpus
