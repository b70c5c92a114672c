#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "mdprolog/term.hpp"

namespace mdprolog {

struct SourceLocation {
  std::string file;
  int line = 0;

  std::string describe() const;
};

/// Lexical or syntactic error in source text.
class SyntaxError : public std::runtime_error {
public:
  SyntaxError(const std::string& message, SourceLocation where, int column = 0);

  const SourceLocation& where() const { return where_; }
  int column() const { return column_; }
  const std::string& detail() const { return detail_; }

private:
  SourceLocation where_;
  int column_;
  std::string detail_;
};

/// A Prolog exception term in flight. The ball may contain live variables of
/// the store that was active when it was raised.
class PrologError : public std::exception {
public:
  explicit PrologError(Term ball) : ball_(std::move(ball)) {}
  const Term& ball() const { return ball_; }
  const char* what() const noexcept override { return "prolog exception"; }

private:
  Term ball_;
};

/// Consult-time failure, carrying the clause provenance.
class ConsultError : public std::runtime_error {
public:
  ConsultError(const std::string& message, SourceLocation where)
      : std::runtime_error(where.describe() + ": " + message), where_(std::move(where)) {}
  const SourceLocation& where() const { return where_; }

private:
  SourceLocation where_;
};

/// Raised when a run exceeds its inference budget. Not catchable by catch/3.
class BudgetExhausted : public std::runtime_error {
public:
  explicit BudgetExhausted(std::uint64_t budget)
      : std::runtime_error("inference budget of " + std::to_string(budget) + " exhausted"), budget_(budget) {}
  std::uint64_t budget() const { return budget_; }

private:
  std::uint64_t budget_;
};

/// halt/0,1 unwinds to the session owner.
struct Halt {
  int code = 0;
};

/// ISO-style error balls: error(Formal, Context).
namespace errors {
[[noreturn]] void instantiation(Term context = Term());
[[noreturn]] void type(std::string_view type, Term culprit, Term context = Term());
[[noreturn]] void domain(std::string_view domain, Term culprit, Term context = Term());
[[noreturn]] void existence(std::string_view kind, Term culprit, Term context = Term());
[[noreturn]] void permission(std::string_view action, std::string_view type, Term culprit, Term context = Term());
[[noreturn]] void evaluation(std::string_view what, Term context = Term());
[[noreturn]] void representation(std::string_view what, Term context = Term());
[[noreturn]] void resource(std::string_view what, Term context = Term());
} // namespace errors

} // namespace mdprolog
