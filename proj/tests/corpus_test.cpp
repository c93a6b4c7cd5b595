#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "t2m/corpus.hpp"
#include "test_util.hpp"

using namespace t2m;
using namespace t2m::corpus;
using t2m::testing::make_instance;
using t2m::testing::read_text;
using t2m::testing::TempDir;
using t2m::testing::write_text;

namespace {

const char* kMaximizeInput = R"({
  "description": "Pick the largest value.",
  "parameters": [{"definition": "Upper bound", "symbol": "M", "shape": []}],
  "output": [{"definition": "Chosen", "symbol": "x", "shape": []}],
  "metadata": {"title": "T", "identifier": "toy_max", "domain": "Testing",
               "objective": "maximize", "keywords": ["toy"], "source_url": "http://x"}
})";

}  // namespace

TEST(CorpusLoad, MaximizeWithOneScalarParameter) {
  TempDir dir;
  write_text(dir / "input.json", kMaximizeInput);
  write_text(dir / "data.dzn", "M = 4;\n");
  const ProblemInstance inst = load_problem(dir.path());
  EXPECT_EQ(inst.objective(), Objective::Maximize);
  ASSERT_EQ(inst.input.parameters.size(), 1u);
  EXPECT_TRUE(inst.input.parameters[0].is_scalar());
  EXPECT_EQ(inst.input.metadata.extra["source_url"], "http://x");
  EXPECT_FALSE(inst.verified);
}

TEST(CorpusLoad, UnknownObjectiveIsRejected) {
  TempDir dir;
  std::string text = kMaximizeInput;
  text.replace(text.find("maximize"), 8, "optimize");
  write_text(dir / "input.json", text);
  EXPECT_THROW(load_problem(dir.path()), InvalidObjective);
}

TEST(CorpusLoad, MissingDataFileGivesEmptyData) {
  TempDir dir;
  write_text(dir / "input.json", kMaximizeInput);
  const ProblemInstance inst = load_problem(dir.path());
  EXPECT_EQ(inst.data_text, "");
}

TEST(CorpusLoad, MissingInputJson) {
  TempDir dir;
  EXPECT_THROW(load_problem(dir.path()), MissingInput);
}

TEST(CorpusLoad, MalformedJsonAndSchema) {
  TempDir dir;
  write_text(dir / "input.json", "{ not json");
  EXPECT_THROW(load_problem(dir.path()), MalformedInput);
  write_text(dir / "input.json", R"({"description": 3, "metadata": {}})");
  EXPECT_THROW(load_problem(dir.path()), MalformedInput);
  std::string dup = kMaximizeInput;
  dup.replace(dup.find("\"symbol\": \"x\""), 13, "\"symbol\": \"M\"");
  write_text(dir / "input.json", dup);
  EXPECT_NO_THROW(load_problem(dir.path()));  // input and output namespaces are separate
  std::string bad_symbol = kMaximizeInput;
  bad_symbol.replace(bad_symbol.find("\"symbol\": \"M\""), 13, "\"symbol\": \"1M\"");
  write_text(dir / "input.json", bad_symbol);
  EXPECT_THROW(load_problem(dir.path()), MalformedInput);
}

TEST(CorpusLoad, SatisfyWithoutModelIsRejected) {
  TempDir dir;
  std::string text = kMaximizeInput;
  text.replace(text.find("maximize"), 8, "satisfy");
  write_text(dir / "input.json", text);
  EXPECT_THROW(load_problem(dir.path()), MissingGroundTruth);
  write_text(dir / "model.mzn", "var 1..3: x;\nsolve satisfy;\n");
  EXPECT_NO_THROW(load_problem(dir.path()));
}

TEST(CorpusLoad, RawTextsAreByteExact) {
  TempDir dir;
  write_text(dir / "input.json", kMaximizeInput);
  const std::string data = "% c\r\nM = 4;  \n\n";
  const std::string model = "int: M;\r\nvar 1..M: x;\tsolve maximize x;";
  write_text(dir / "data.dzn", data);
  write_text(dir / "model.mzn", model);
  const ProblemInstance inst = load_problem(dir.path());
  EXPECT_EQ(inst.data_text, data);
  EXPECT_EQ(*inst.ground_truth_model, model);
}

TEST(CorpusSave, RoundTripPreservesEverything) {
  TempDir dir;
  write_text(dir / "src" / "input.json", kMaximizeInput);
  write_text(dir / "src" / "output.json", R"({"objective_value": 4, "variable_values": {"x": 4}, "note": "kept"})");
  ProblemInstance inst = load_problem(dir / "src");
  inst.verified = true;
  save_problem(inst, dir / "dst");
  const ProblemInstance back = load_problem(dir / "dst");
  EXPECT_EQ(back, inst);
  EXPECT_TRUE(back.verified);
  EXPECT_EQ(back.expected_output->extra["note"], "kept");
}

TEST(CorpusSave, DuplicateParameterSymbolsRejectedBeforeWrite) {
  TempDir dir;
  ProblemInstance inst = make_instance("dup", Objective::Maximize);
  inst.input.parameters.push_back(inst.input.parameters.front());
  EXPECT_THROW(save_problem(inst, dir / "out"), InvalidInstance);
  EXPECT_FALSE(std::filesystem::exists(dir / "out"));
}

TEST(CorpusSave, DroppedOptionalFilesAreRemoved) {
  TempDir dir;
  ProblemInstance inst = make_instance("opt", Objective::Maximize);
  save_problem(inst, dir.path());
  inst.expected_output.reset();
  inst.ground_truth_model.reset();
  save_problem(inst, dir.path());
  EXPECT_FALSE(std::filesystem::exists(dir / "output.json"));
  EXPECT_FALSE(std::filesystem::exists(dir / "model.mzn"));
  EXPECT_EQ(load_problem(dir.path()), inst);
}

namespace {

ProblemInstance random_instance(std::mt19937_64& rng, int n) {
  const Objective objectives[] = {Objective::Satisfy, Objective::Maximize, Objective::Minimize};
  ProblemInstance inst = make_instance("gen_" + std::to_string(n), objectives[rng() % 3]);
  inst.verified = rng() % 2 == 0;
  inst.input.description = "line one\nline \"two\" \t\\ é " + std::to_string(rng());
  const std::size_t extra = rng() % 4;
  for (std::size_t i = 0; i < extra; ++i) {
    std::vector<std::string> shape;
    for (std::size_t d = 0; d < rng() % 3; ++d) shape.push_back(d == 0 ? "M" : "N" + std::to_string(d));
    inst.input.parameters.push_back({"param " + std::to_string(i), "P" + std::to_string(i), shape, Json::object()});
  }
  if (rng() % 2) inst.input.metadata.subdomain = "Sub";
  if (rng() % 2) inst.input.metadata.extra["origin"] = Json{{"page", rng() % 10}};
  if (rng() % 2) inst.input.extra["notes"] = "free-form";
  inst.input.metadata.keywords = {"k" + std::to_string(rng() % 9)};
  if (rng() % 3 == 0) inst.data_text.clear();
  if (inst.objective() != Objective::Satisfy && rng() % 3 == 0) inst.ground_truth_model.reset();
  if (inst.objective() != Objective::Satisfy && rng() % 3 == 0) inst.expected_output->objective_value = 2.5;
  if (rng() % 4 == 0) inst.expected_output.reset();
  return inst;
}

}  // namespace

TEST(CorpusProperty, SaveLoadRoundTrip) {
  TempDir dir;
  std::mt19937_64 rng(7);
  for (int i = 0; i < 60; ++i) {
    const ProblemInstance inst = random_instance(rng, i);
    ASSERT_TRUE(check_invariants(inst).empty());
    const auto path = dir / ("i" + std::to_string(i));
    save_problem(inst, path);
    EXPECT_EQ(load_problem(path), inst) << i;
    EXPECT_EQ(instance_from_json(instance_to_json(inst)), inst) << i;
  }
}

TEST(CrossValidate, ExactMatchIsClean) {
  ProblemInstance inst = make_instance("cv", Objective::Maximize);
  EXPECT_TRUE(cross_validate(inst).empty());
}

TEST(CrossValidate, EachFindingKindFiresOnce) {
  ProblemInstance inst = make_instance("cv", Objective::Maximize);
  inst.input.parameters.push_back({"Prices", "Prices", {"M"}, Json::object()});
  inst.data_text = "M = [1, 2];\nExtra = 3;\n";
  const ValidationReport r = cross_validate(inst);
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r[0].kind, FindingKind::ShapeMismatch);
  EXPECT_EQ(r[0].symbol, "M");
  EXPECT_NE(r[0].message.find("expected scalar, found 1-D"), std::string::npos);
  EXPECT_EQ(r[1].kind, FindingKind::MissingSymbol);
  EXPECT_EQ(r[1].symbol, "Prices");
  EXPECT_EQ(r[2].kind, FindingKind::UnusedBinding);
  EXPECT_EQ(r[2].symbol, "Extra");
}

TEST(CrossValidate, ExtentResolvedThroughData) {
  ProblemInstance inst = make_instance("cv", Objective::Maximize);
  inst.input.parameters.push_back({"Prices", "Prices", {"M"}, Json::object()});
  inst.data_text = "M = 4;\nPrices = [1, 2, 3];\n";
  const ValidationReport r = cross_validate(inst);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].kind, FindingKind::ShapeMismatch);
  inst.data_text = "M = 3;\nPrices = [1, 2, 3];\n";
  EXPECT_TRUE(cross_validate(inst).empty());
}

TEST(CrossValidate, ParseErrorsPropagate) {
  ProblemInstance inst = make_instance("cv", Objective::Maximize);
  inst.data_text = "M = ;";
  EXPECT_THROW(cross_validate(inst), dzn::DznParseError);
}

TEST(CrossValidate, PermutingParametersPermutesFindings) {
  ProblemInstance inst = make_instance("cv", Objective::Maximize);
  for (const char* s : {"A", "B", "C", "D"}) inst.input.parameters.push_back({s, s, {"M"}, Json::object()});
  inst.data_text = "M = 2; B = 7; D = [1, 2, 3];\n";
  const ValidationReport base = cross_validate(inst);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 10; ++i) {
    ProblemInstance shuffled = inst;
    std::shuffle(shuffled.input.parameters.begin(), shuffled.input.parameters.end(), rng);
    ValidationReport r = cross_validate(shuffled);
    ASSERT_EQ(r.size(), base.size());
    for (const auto& p : shuffled.input.parameters) {
      const auto it = std::find_if(base.begin(), base.end(), [&](const Finding& f) { return f.symbol == p.symbol; });
      const auto jt = std::find_if(r.begin(), r.end(), [&](const Finding& f) { return f.symbol == p.symbol; });
      EXPECT_EQ(it == base.end(), jt == r.end());
      if (it != base.end() && jt != r.end()) EXPECT_EQ(*it, *jt);
    }
    EXPECT_TRUE(std::is_permutation(r.begin(), r.end(), base.begin(), [](const Finding& a, const Finding& b) { return a == b; }));
  }
}

TEST(CorpusIndex, StoreOpenAndLoad) {
  TempDir dir;
  Corpus c = Corpus::open(dir.path());
  EXPECT_TRUE(c.entries().empty());
  c.store(make_instance("alpha", Objective::Minimize));
  c.store(make_instance("beta", Objective::Satisfy));
  const Corpus again = Corpus::open(dir.path());
  ASSERT_EQ(again.entries().size(), 2u);
  EXPECT_EQ(again.load("beta").objective(), Objective::Satisfy);
  EXPECT_THROW(again.load("gamma"), MissingInput);
  EXPECT_NE(read_text(dir / "index.json").find("\"alpha\""), std::string::npos);
}
