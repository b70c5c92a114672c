#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mdprolog {

/// One executable scenario: programs, a query and its exact expected outcome.
struct CorpusCase {
  enum class Expect { Solutions, BudgetExhausted, BudgetOrDuplicates, Error };

  std::string name;
  std::string topic;
  std::vector<std::filesystem::path> programs;  // resolved against the case file's directory
  std::vector<std::string> setup;                // goals run once each before the query
  std::string query;
  Expect expect = Expect::Solutions;
  std::vector<std::string> solutions;  // `X = a, Y = b` per solution, in order
  std::optional<std::string> output;   // exact output sink text
  std::optional<std::string> error;    // substring of the error message
  std::uint64_t budget = 0;
  bool prelude = true;
  std::size_t max_solutions = 10000;
};

struct CaseReport {
  std::string name;
  bool passed = false;
  /// `solutions`, `budget_exhausted` or `error`.
  std::string outcome;
  std::vector<std::string> solutions;
  std::string output;
  std::string error;
  std::vector<std::string> mismatches;
};

/// Loads cases from one JSON file or from every `*.json` file under a directory
/// (sorted by path). A file holds either an array of cases or `{"cases": [...]}`.
std::vector<CorpusCase> load_cases(const std::filesystem::path& path);

/// Runs a case on a fresh engine.
CaseReport run_case(const CorpusCase& c);

/// One line per case plus a summary, as printed by the CLI test command.
std::string format_report(const std::vector<CaseReport>& reports);

} // namespace mdprolog
