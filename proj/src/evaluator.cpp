#include "t2m/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <tuple>

namespace t2m::evaluator {

using Json = nlohmann::ordered_json;

bool compare_objective(double got, double expected, corpus::Objective) {
  if (!std::isfinite(got) || !std::isfinite(expected)) return got == expected;
  return std::fabs(got - expected) <= std::max(kAbsTol, kRelTol * std::fabs(expected));
}

namespace {

bool json_equal(const Json& a, const Json& b) {
  if (a.is_number() && b.is_number()) return a.get<double>() == b.get<double>();
  if (a.is_boolean() && b.is_number()) return (a.get<bool>() ? 1.0 : 0.0) == b.get<double>();
  if (a.is_number() && b.is_boolean()) return json_equal(b, a);
  if (a.is_array() && b.is_array()) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!json_equal(a[i], b[i])) return false;
    }
    return true;
  }
  return a == b;
}

}  // namespace

InstanceOutcome generation_failure(const corpus::ProblemInstance& instance, std::string strategy,
                                   const std::string& message) {
  InstanceOutcome o;
  o.id = instance.id();
  o.source = instance.input.metadata.source();
  o.strategy = std::move(strategy);
  o.objective = instance.objective();
  o.status = harness::Status::Unknown;
  o.error = message;
  o.detail = "no model generated";
  if (instance.expected_output && instance.expected_output->objective_value)
    o.expected_objective = instance.expected_output->objective_value;
  return o;
}

InstanceOutcome judge_instance(const harness::SolveResult& result, const corpus::ProblemInstance& instance,
                               std::string strategy, harness::Toolchain& toolchain,
                               const harness::SolverConfig& config) {
  InstanceOutcome o;
  o.id = instance.id();
  o.source = instance.input.metadata.source();
  o.strategy = std::move(strategy);
  o.objective = instance.objective();
  o.status = result.status;
  o.executed = result.executed();
  if (result.error) {
    o.error_category = result.error->category;
    o.error = result.error->raw;
  }
  const auto& expected = instance.expected_output;
  const bool expect_unsat = expected && expected->unsatisfiable;

  if (corpus::is_optimization(instance.objective())) {
    if (result.status == harness::Status::Optimal || result.status == harness::Status::Satisfied)
      o.objective_value = result.objective_value;
    if (expect_unsat) {
      o.solution_correct = result.status == harness::Status::Unsatisfiable;
      o.detail = "expected infeasible";
      return o;
    }
    if (!expected || !expected->objective_value) {
      o.excluded = true;
      o.detail = "no expected objective value";
      return o;
    }
    o.expected_objective = expected->objective_value;
    if (!o.executed) {
      o.detail = "did not execute";
    } else if (!o.objective_value) {
      o.detail = "no objective value in solver output";
    } else {
      o.solution_correct = compare_objective(*o.objective_value, *o.expected_objective, instance.objective());
      std::ostringstream d;
      d << "objective " << dzn::format_float(*o.objective_value) << " vs expected "
        << dzn::format_float(*o.expected_objective) << " (tolerance "
        << dzn::format_float(std::max(kAbsTol, kRelTol * std::fabs(*o.expected_objective))) << ")";
      o.detail = d.str();
    }
    return o;
  }

  if (expect_unsat) {
    o.solution_correct = result.status == harness::Status::Unsatisfiable;
    o.detail = "expected infeasible";
    return o;
  }
  if (!instance.ground_truth_model) {
    o.excluded = true;
    o.detail = "no ground-truth model to verify against";
    return o;
  }
  if (result.status != harness::Status::Satisfied && result.status != harness::Status::Optimal) {
    o.detail = o.executed ? "no solution to verify" : "did not execute";
    return o;
  }
  dzn::Bindings candidate;
  for (const auto& out : instance.input.output) {
    const dzn::Value* v = result.assignments.find(out.symbol);
    if (!v) {
      o.verifier_verdict = false;
      o.detail = "output symbol `" + out.symbol + "' missing from the solution";
      return o;
    }
    candidate.add(out.symbol, *v);
  }
  if (expected && expected->variable_values.is_object()) {
    bool same = true;
    for (const auto& [name, value] : candidate) {
      auto it = expected->variable_values.find(name);
      same = same && it != expected->variable_values.end() && json_equal(corpus::value_to_json(value), *it);
    }
    o.matches_stored_output = same;
  }
  try {
    o.verifier_verdict =
        harness::verify_satisfaction(toolchain, *instance.ground_truth_model, instance.data_text, candidate, config);
    o.solution_correct = *o.verifier_verdict;
    o.detail = *o.verifier_verdict ? "verifier accepted the solution" : "verifier rejected the solution";
  } catch (const harness::VerifierCompileError& e) {
    o.corpus_fault = true;
    o.detail = std::string("corpus fault: ") + e.what();
  }
  return o;
}

namespace {

std::vector<const InstanceOutcome*> scored(const std::vector<InstanceOutcome>& outcomes) {
  std::vector<const InstanceOutcome*> out;
  for (const auto& o : outcomes) {
    if (!o.excluded) out.push_back(&o);
  }
  if (out.empty()) throw EmptySet("no scorable outcomes");
  return out;
}

}  // namespace

double execution_accuracy(const std::vector<InstanceOutcome>& outcomes) {
  const auto s = scored(outcomes);
  return static_cast<double>(std::count_if(s.begin(), s.end(), [](auto* o) { return o->executed; })) /
         static_cast<double>(s.size());
}

double solution_accuracy(const std::vector<InstanceOutcome>& outcomes) {
  const auto s = scored(outcomes);
  return static_cast<double>(std::count_if(s.begin(), s.end(), [](auto* o) { return o->solution_correct; })) /
         static_cast<double>(s.size());
}

std::string format_percent(double fraction) {
  char buf[32];
  // Round half away from zero at the second decimal, independent of binary noise.
  const double scaled = std::round(fraction * 100.0 * 100.0 + (fraction >= 0 ? 1e-9 : -1e-9)) / 100.0;
  std::snprintf(buf, sizeof buf, "%.2f", scaled);
  return buf;
}

EvaluationReport build_report(std::vector<InstanceOutcome> outcomes) {
  EvaluationReport r;
  std::sort(outcomes.begin(), outcomes.end(), [](const InstanceOutcome& a, const InstanceOutcome& b) {
    return std::tie(a.strategy, a.source, a.id) < std::tie(b.strategy, b.source, b.id);
  });
  std::map<std::pair<std::string, std::string>, Aggregate> rows;
  std::map<std::string, Aggregate> totals;
  for (const auto& o : outcomes) {
    if (o.excluded) {
      r.exclusions.push_back(o);
      continue;
    }
    for (Aggregate* a : {&rows[{o.strategy, o.source}], &totals[o.strategy]}) {
      ++a->n;
      a->executed += o.executed ? 1 : 0;
      a->correct += o.solution_correct ? 1 : 0;
    }
  }
  for (auto& [key, a] : rows) {
    a.strategy = key.first;
    a.source = key.second;
    r.rows.push_back(a);
  }
  for (auto& [strategy, a] : totals) {
    a.strategy = strategy;
    a.source = "TOTAL";
    r.totals.push_back(a);
  }
  r.outcomes = std::move(outcomes);
  return r;
}

Format parse_format(std::string_view name) {
  if (name == "json") return Format::Json;
  if (name == "markdown" || name == "md") return Format::Markdown;
  if (name == "csv") return Format::Csv;
  throw Error("InvalidFormat", "unknown format `" + std::string(name) + "' (json, markdown, csv)");
}

Json outcome_to_json(const InstanceOutcome& o) {
  Json j = {{"id", o.id},
            {"source", o.source},
            {"strategy", o.strategy},
            {"objective", std::string(corpus::to_string(o.objective))},
            {"executed", o.executed},
            {"solution_correct", o.solution_correct},
            {"excluded", o.excluded},
            {"corpus_fault", o.corpus_fault},
            {"status", std::string(harness::to_string(o.status))}};
  j["error_category"] = o.error_category ? Json(std::string(harness::to_string(*o.error_category))) : Json(nullptr);
  j["error"] = o.error;
  j["objective_value"] = o.objective_value ? Json(*o.objective_value) : Json(nullptr);
  j["expected_objective"] = o.expected_objective ? Json(*o.expected_objective) : Json(nullptr);
  j["verifier_verdict"] = o.verifier_verdict ? Json(*o.verifier_verdict) : Json(nullptr);
  j["matches_stored_output"] = o.matches_stored_output ? Json(*o.matches_stored_output) : Json(nullptr);
  j["detail"] = o.detail;
  return j;
}

InstanceOutcome outcome_from_json(const Json& j) {
  InstanceOutcome o;
  o.id = j.at("id").get<std::string>();
  o.source = j.value("source", "");
  o.strategy = j.value("strategy", "");
  o.objective = corpus::parse_objective(j.value("objective", "satisfy"));
  o.executed = j.value("executed", false);
  o.solution_correct = j.value("solution_correct", false);
  o.excluded = j.value("excluded", false);
  o.corpus_fault = j.value("corpus_fault", false);
  o.status = harness::parse_status(j.value("status", "Unknown")).value_or(harness::Status::Unknown);
  if (j.contains("error_category") && j["error_category"].is_string())
    o.error_category = harness::parse_category(j["error_category"].get<std::string>());
  o.error = j.value("error", "");
  auto opt_num = [&](const char* k) -> std::optional<double> {
    if (j.contains(k) && j[k].is_number()) return j[k].get<double>();
    return std::nullopt;
  };
  auto opt_bool = [&](const char* k) -> std::optional<bool> {
    if (j.contains(k) && j[k].is_boolean()) return j[k].get<bool>();
    return std::nullopt;
  };
  o.objective_value = opt_num("objective_value");
  o.expected_objective = opt_num("expected_objective");
  o.verifier_verdict = opt_bool("verifier_verdict");
  o.matches_stored_output = opt_bool("matches_stored_output");
  o.detail = j.value("detail", "");
  return o;
}

namespace {

Json aggregate_json(const Aggregate& a) {
  return {{"strategy", a.strategy},     {"source", a.source},
          {"n", a.n},                   {"executed", a.executed},
          {"correct", a.correct},       {"e_acc", format_percent(a.e_acc())},
          {"s_acc", format_percent(a.s_acc())}};
}

std::string emit_json(const EvaluationReport& r) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["metrics"] = {{"e_acc", "share of models that compile and run (Unsatisfiable counts as run)"},
                  {"s_acc", "optimization: objective within tolerance; satisfaction: ground-truth verifier accepts"},
                  {"abs_tol", kAbsTol},
                  {"rel_tol", kRelTol}};
  j["rows"] = Json::array();
  for (const auto& a : r.rows) j["rows"].push_back(aggregate_json(a));
  j["totals"] = Json::array();
  for (const auto& a : r.totals) j["totals"].push_back(aggregate_json(a));
  j["exclusions"] = Json::array();
  for (const auto& o : r.exclusions)
    j["exclusions"].push_back({{"id", o.id}, {"strategy", o.strategy}, {"reason", o.detail}});
  j["outcomes"] = Json::array();
  for (const auto& o : r.outcomes) j["outcomes"].push_back(outcome_to_json(o));
  return j.dump(2) + "\n";
}

std::string emit_markdown(const EvaluationReport& r) {
  std::vector<std::string> sources, strategies;
  for (const auto& a : r.rows) {
    if (std::find(sources.begin(), sources.end(), a.source) == sources.end()) sources.push_back(a.source);
  }
  for (const auto& a : r.totals) strategies.push_back(a.strategy);
  std::sort(sources.begin(), sources.end());

  std::ostringstream out;
  out << "| Strategy |";
  for (const auto& s : sources) out << ' ' << s << " E_acc | " << s << " S_acc |";
  out << " Total E_acc | Total S_acc |\n|---|";
  for (std::size_t i = 0; i < sources.size(); ++i) out << "---:|---:|";
  out << "---:|---:|\n";
  for (const auto& st : strategies) {
    out << "| " << st << " |";
    for (const auto& src : sources) {
      auto it = std::find_if(r.rows.begin(), r.rows.end(),
                             [&](const Aggregate& a) { return a.strategy == st && a.source == src; });
      if (it == r.rows.end()) out << " - | - |";
      else out << ' ' << format_percent(it->e_acc()) << " | " << format_percent(it->s_acc()) << " |";
    }
    auto t = std::find_if(r.totals.begin(), r.totals.end(), [&](const Aggregate& a) { return a.strategy == st; });
    out << ' ' << format_percent(t->e_acc()) << " | " << format_percent(t->s_acc()) << " |\n";
  }

  out << "\n| Strategy | Source | n | Executed | Correct |\n|---|---|---:|---:|---:|\n";
  for (const auto& st : strategies) {
    for (const auto& a : r.rows) {
      if (a.strategy == st)
        out << "| " << a.strategy << " | " << a.source << " | " << a.n << " | " << a.executed << " | " << a.correct
            << " |\n";
    }
    auto t = std::find_if(r.totals.begin(), r.totals.end(), [&](const Aggregate& a) { return a.strategy == st; });
    out << "| " << st << " | **Total** | " << t->n << " | " << t->executed << " | " << t->correct << " |\n";
  }

  if (!r.exclusions.empty()) {
    out << "\nExcluded (no expected result):\n\n";
    for (const auto& o : r.exclusions) out << "- " << o.strategy << " / " << o.id << ": " << o.detail << '\n';
  }
  out << "\nSatisfaction instances are scored by ground-truth verifier acceptance; objectives match within max("
      << dzn::format_float(kAbsTol) << ", " << dzn::format_float(kRelTol) << " * |expected|).\n";
  return out.str();
}

std::string emit_csv(const EvaluationReport& r) {
  std::ostringstream out;
  out << "strategy,source,n,executed,correct,e_acc,s_acc\n";
  auto row = [&](const Aggregate& a) {
    out << a.strategy << ',' << a.source << ',' << a.n << ',' << a.executed << ',' << a.correct << ','
        << format_percent(a.e_acc()) << ',' << format_percent(a.s_acc()) << '\n';
  };
  for (const auto& t : r.totals) {
    for (const auto& a : r.rows) {
      if (a.strategy == t.strategy) row(a);
    }
    row(t);
  }
  return out.str();
}

}  // namespace

std::string emit_leaderboard(const EvaluationReport& report, Format format) {
  switch (format) {
    case Format::Json: return emit_json(report);
    case Format::Markdown: return emit_markdown(report);
    case Format::Csv: return emit_csv(report);
  }
  return "";
}

}  // namespace t2m::evaluator
