#pragma once

// Batch runs and the `t2m` command line.

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "t2m/evaluator.hpp"
#include "t2m/harness.hpp"
#include "t2m/llm.hpp"
#include "t2m/strategies.hpp"

namespace t2m::cli {

using Json = corpus::Json;

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kManifestVersion = 1;

// Mock transport answers: the instance's ground-truth model in a fence, or
// text that is not MiniZinc.
enum class MockMode { Oracle, Garbage };

struct RunOptions {
  strategies::StrategyId strategy = strategies::StrategyId::ZeroShot;
  std::filesystem::path corpus;
  std::vector<std::string> instances;  // empty: every instance in the corpus
  std::string transport = "mock";      // live | replay | mock
  MockMode mock_mode = MockMode::Oracle;
  std::optional<std::filesystem::path> trace;  // replay input
  std::filesystem::path out;
  int jobs = 1;
  harness::SolverConfig solver;
  llm::CompletionConfig completion;
  std::string base_url = "https://api.openai.com";
  std::string api_key_env = "OPENAI_API_KEY";
};

struct RunSummary {
  Json manifest;
  std::vector<evaluator::InstanceOutcome> outcomes;  // corpus order
  std::vector<int> call_counts;                      // per outcome
};

// Runs one strategy over the selection and writes, under options.out:
//   manifest.json, trace.jsonl, leaderboard.{json,md,csv}
//   instances/<id>/{model.mzn, outcome.json, generation.json, trace.jsonl, intermediate/*}
// Per-instance failures become outcomes. Throws on configuration faults.
RunSummary run_batch(const RunOptions& options, std::shared_ptr<harness::Toolchain> toolchain,
                     const std::function<void(const std::string&)>& log = {});

// Reads the options a manifest was produced with; the transport becomes
// replay over the manifest's trace.
RunOptions options_from_manifest(const std::filesystem::path& manifest_path);

// Outcomes recorded in a run directory, in manifest order.
std::vector<evaluator::InstanceOutcome> load_outcomes(const std::filesystem::path& run_dir);

// Exit status: 0 success, 1 runtime or configuration error, 2 usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace t2m::cli
