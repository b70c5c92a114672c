#include "mdprolog/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "mdprolog/engine.hpp"
#include "mdprolog/render.hpp"

namespace mdprolog {

namespace {

using nlohmann::json;

CorpusCase::Expect parse_expect(const std::string& s) {
  if (s == "solutions") return CorpusCase::Expect::Solutions;
  if (s == "budget_exhausted") return CorpusCase::Expect::BudgetExhausted;
  if (s == "budget_or_duplicates") return CorpusCase::Expect::BudgetOrDuplicates;
  if (s == "error") return CorpusCase::Expect::Error;
  throw std::runtime_error("unknown expectation: " + s);
}

CorpusCase parse_case(const json& j, const std::filesystem::path& dir) {
  CorpusCase c;
  c.name = j.at("name").get<std::string>();
  c.topic = j.value("topic", "");
  for (const auto& p : j.value("programs", json::array())) c.programs.push_back(dir / p.get<std::string>());
  for (const auto& g : j.value("setup", json::array())) c.setup.push_back(g.get<std::string>());
  c.query = j.at("query").get<std::string>();
  c.expect = parse_expect(j.value("expect", "solutions"));
  for (const auto& s : j.value("solutions", json::array())) c.solutions.push_back(s.get<std::string>());
  if (j.contains("output")) c.output = j.at("output").get<std::string>();
  if (j.contains("error")) c.error = j.at("error").get<std::string>();
  c.budget = j.value("budget", std::uint64_t{0});
  c.prelude = j.value("prelude", true);
  c.max_solutions = j.value("max_solutions", std::size_t{10000});
  return c;
}

void load_file(const std::filesystem::path& file, std::vector<CorpusCase>& out) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  json j = json::parse(in);
  const json& list = j.is_object() ? j.at("cases") : j;
  for (const auto& item : list) out.push_back(parse_case(item, file.parent_path()));
}

std::string quote(const std::string& s) { return json(s).dump(); }

} // namespace

std::vector<CorpusCase> load_cases(const std::filesystem::path& path) {
  std::vector<CorpusCase> out;
  if (std::filesystem::is_directory(path)) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(path)) {
      if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) load_file(f, out);
  } else {
    load_file(path, out);
  }
  return out;
}

CaseReport run_case(const CorpusCase& c) {
  CaseReport r;
  r.name = c.name;
  std::ostringstream out;
  std::ostringstream err;
  bool budget_hit = false;
  try {
    EngineOptions options;
    options.load_prelude = c.prelude;
    options.budget = c.budget;
    Engine engine(options);
    engine.set_output(&out);
    engine.set_error(&err);
    for (const auto& p : c.programs) engine.consult_file(p);
    for (const auto& g : c.setup) {
      if (!engine.run_once(g)) throw std::runtime_error("setup goal failed: " + g);
    }
    Query q = engine.query(c.query);
    while (r.solutions.size() < c.max_solutions && q.next()) r.solutions.push_back(q.format_bindings(", "));
    r.outcome = "solutions";
  } catch (const BudgetExhausted& e) {
    budget_hit = true;
    r.outcome = "budget_exhausted";
    r.error = e.what();
  } catch (const PrologError& e) {
    r.outcome = "error";
    OperatorTable ops = OperatorTable::defaults();
    r.error = "uncaught exception: " + render(e.ball(), ops);
  } catch (const std::exception& e) {
    r.outcome = "error";
    r.error = e.what();
  } catch (const Halt& h) {
    r.outcome = "error";
    r.error = "halt(" + std::to_string(h.code) + ")";
  }
  r.output = out.str();

  auto mismatch = [&](std::string m) { r.mismatches.push_back(std::move(m)); };
  switch (c.expect) {
  case CorpusCase::Expect::Solutions:
    if (r.outcome != "solutions") {
      mismatch("expected solutions, got " + r.outcome + ": " + r.error);
      break;
    }
    if (r.solutions != c.solutions) {
      std::string got;
      for (const auto& s : r.solutions) got += "\n    " + s;
      std::string want;
      for (const auto& s : c.solutions) want += "\n    " + s;
      mismatch("solutions differ; expected:" + (want.empty() ? " none" : want) +
               "\n  got:" + (got.empty() ? " none" : got));
    }
    break;
  case CorpusCase::Expect::BudgetExhausted:
    if (!budget_hit) mismatch("expected budget exhaustion, got " + r.outcome);
    break;
  case CorpusCase::Expect::BudgetOrDuplicates: {
    std::set<std::string> seen(r.solutions.begin(), r.solutions.end());
    if (!budget_hit && seen.size() == r.solutions.size()) {
      mismatch("expected budget exhaustion or duplicate solutions, got " + std::to_string(r.solutions.size()) +
               " distinct solutions");
    }
    break;
  }
  case CorpusCase::Expect::Error:
    if (r.outcome != "error") {
      mismatch("expected an error, got " + r.outcome);
    } else if (c.error && r.error.find(*c.error) == std::string::npos) {
      mismatch("error " + quote(r.error) + " does not mention " + quote(*c.error));
    }
    break;
  }
  if (c.output && r.output != *c.output) {
    mismatch("output differs; expected " + quote(*c.output) + ", got " + quote(r.output));
  }
  r.passed = r.mismatches.empty();
  return r;
}

std::string format_report(const std::vector<CaseReport>& reports) {
  std::ostringstream s;
  std::size_t passed = 0;
  for (const auto& r : reports) {
    s << (r.passed ? "PASS " : "FAIL ") << r.name << "\n";
    for (const auto& m : r.mismatches) s << "  " << m << "\n";
    if (r.passed) ++passed;
  }
  s << passed << "/" << reports.size() << " cases passed\n";
  return s.str();
}

} // namespace mdprolog
