#include "mdprolog/errors.hpp"

namespace mdprolog {

std::string SourceLocation::describe() const {
  std::string out = file.empty() ? std::string("<input>") : file;
  if (line > 0) out += ":" + std::to_string(line);
  return out;
}

SyntaxError::SyntaxError(const std::string& message, SourceLocation where, int column)
    : std::runtime_error(where.describe() + (column > 0 ? ":" + std::to_string(column) : std::string()) +
                         ": syntax error: " + message),
      where_(std::move(where)),
      column_(column),
      detail_(message) {}

namespace errors {

namespace {

[[noreturn]] void raise(Term formal, Term context) {
  throw PrologError(Term::compound(sym::error(), {std::move(formal), std::move(context)}));
}

} // namespace

void instantiation(Term context) {
  raise(Term::atom("instantiation_error"), std::move(context));
}

void type(std::string_view type, Term culprit, Term context) {
  raise(Term::compound("type_error", {Term::atom(type), std::move(culprit)}), std::move(context));
}

void domain(std::string_view domain, Term culprit, Term context) {
  raise(Term::compound("domain_error", {Term::atom(domain), std::move(culprit)}), std::move(context));
}

void existence(std::string_view kind, Term culprit, Term context) {
  raise(Term::compound("existence_error", {Term::atom(kind), std::move(culprit)}), std::move(context));
}

void permission(std::string_view action, std::string_view type, Term culprit, Term context) {
  raise(Term::compound("permission_error", {Term::atom(action), Term::atom(type), std::move(culprit)}),
        std::move(context));
}

void evaluation(std::string_view what, Term context) {
  raise(Term::compound("evaluation_error", {Term::atom(what)}), std::move(context));
}

void representation(std::string_view what, Term context) {
  raise(Term::compound("representation_error", {Term::atom(what)}), std::move(context));
}

void resource(std::string_view what, Term context) {
  raise(Term::compound("resource_error", {Term::atom(what)}), std::move(context));
}

} // namespace errors

} // namespace mdprolog
