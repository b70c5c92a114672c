#include "mdprolog/render.hpp"

#include <charconv>
#include <cctype>
#include <cmath>

namespace mdprolog {

namespace {

bool symbol_char(char c) {
  switch (c) {
  case '+': case '-': case '*': case '/': case '\\': case '^': case '<': case '>': case '=':
  case '~': case ':': case '.': case '?': case '@': case '#': case '&': case '$':
    return true;
  default:
    return false;
  }
}

bool alnum_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || static_cast<unsigned char>(c) >= 0x80;
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !std::islower(static_cast<unsigned char>(s[0]))) return false;
  for (char c : s) {
    if (!alnum_char(c)) return false;
  }
  return true;
}

bool is_symbolic(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!symbol_char(c)) return false;
  }
  // A lone dot would read as an end token; `/*` would open a comment.
  return s != "." && s.rfind("/*", 0) != 0;
}

class Renderer {
public:
  Renderer(const OperatorTable& ops, const BindingStore* store, const RenderOptions& options)
      : ops_(ops), store_(store), options_(options) {}

  void term(const Term& raw, int max, std::size_t depth, bool operand = false) {
    Term t = store_ ? store_->deref(raw) : raw;
    if (depth > options_.max_depth) {
      emit("...");
      return;
    }
    switch (t.kind()) {
    case Term::Kind::Var:
      if (options_.var_names) {
        if (auto it = options_.var_names->find(t.var_id()); it != options_.var_names->end()) {
          emit(it->second);
          return;
        }
      }
      emit("_G" + std::to_string(t.var_id()));
      return;
    case Term::Kind::Integer: emit(std::to_string(t.int_value())); return;
    case Term::Kind::Float: emit(format_float(t.float_value())); return;
    case Term::Kind::Atom: atom_operand(t.functor(), max, operand); return;
    case Term::Kind::Compound: compound(t, max, depth); return;
    }
  }

  std::string take() { return std::move(out_); }

private:
  /// Appends text, separating tokens that would otherwise fuse.
  void emit(std::string_view s) {
    if (s.empty()) return;
    if (!out_.empty()) {
      char last = out_.back();
      char first = s.front();
      if ((symbol_char(last) && symbol_char(first)) || (alnum_char(last) && alnum_char(first))) {
        out_ += ' ';
      }
    }
    out_ += s;
  }

  void raw(std::string_view s) { out_ += s; }

  std::string atom_text(Symbol s) const {
    return options_.quoted ? quote_atom_if_needed(s.name()) : s.str();
  }

  void atom_operand(Symbol s, int max, bool operand) {
    std::string text = atom_text(s);
    // Operator atoms standing as operands are bracketed so they do not act as operators.
    if ((operand || max < 999) && ops_.is_operator(s)) {
      raw_open();
      emit(text);
      raw(")");
      return;
    }
    emit(text);
  }

  void raw_open() {
    // `(` directly after a name would read as a functional-notation call.
    if (!out_.empty() && (alnum_char(out_.back()) || symbol_char(out_.back()) || out_.back() == '\'' ||
                          out_.back() == ';' || out_.back() == '!')) {
      out_ += ' ';
    }
    out_ += '(';
  }

  void open_paren(bool needed) {
    if (needed) raw_open();
  }

  void close_paren(bool needed) {
    if (needed) raw(")");
  }

  void compound(const Term& t, int max, std::size_t depth) {
    Symbol f = t.functor();
    std::size_t n = t.arity();
    if (f == sym::dot() && n == 2) {
      list(t, depth);
      return;
    }
    if (f == sym::curly() && n == 1) {
      emit("{");
      term(t.arg(0), 1200, depth + 1);
      raw("}");
      return;
    }
    // Infix `|` reads back as `;`, so '|'/2 keeps canonical form.
    if (n == 2 && f.name() != "|") {
      if (auto def = ops_.infix(f)) {
        infix(t, *def, max, depth);
        return;
      }
    }
    if (n == 1) {
      if (auto def = ops_.prefix(f)) {
        prefix(t, *def, max, depth);
        return;
      }
      if (auto def = ops_.postfix(f)) {
        bool paren = def->priority > max;
        open_paren(paren);
        term(t.arg(0), def->left_max(), depth + 1, true);
        emit(atom_text(f));
        close_paren(paren);
        return;
      }
    }
    // `[](X)` and `{}(X, Y)` do not read as calls; the quoted names do.
    emit(f == sym::nil() || f == sym::curly() ? "'" + f.str() + "'" : atom_text(f));
    raw("(");
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0) raw(", ");
      term(t.arg(i), 999, depth + 1);
    }
    raw(")");
  }

  void infix(const Term& t, const OperatorDef& def, int max, std::size_t depth) {
    Symbol f = t.functor();
    bool paren = def.priority > max;
    open_paren(paren);
    term(t.arg(0), def.left_max(), depth + 1, true);
    if (f == sym::comma()) {
      raw(",");
    } else {
      std::string op = atom_text(f);
      bool alpha = !op.empty() && alnum_char(op.front());
      if (alpha || op == "->" || op == ":-" || op == "-->" || op == "*->" || op == "#" ||
          op == "?") {
        raw(" ");
        raw(op);
        raw(" ");
      } else if (op == "|" || op == ";") {
        raw(op);
      } else {
        emit(op);
      }
    }
    term(t.arg(1), def.right_max(), depth + 1, true);
    close_paren(paren);
  }

  void prefix(const Term& t, const OperatorDef& def, int max, std::size_t depth) {
    Symbol f = t.functor();
    Term arg = store_ ? store_->deref(t.arg(0)) : t.arg(0);
    bool paren = def.priority > max;
    open_paren(paren);
    std::string op = atom_text(f);
    emit(op);
    // `- 1` must stay distinct from the literal -1.
    bool needs_space = alnum_char(op.back()) || arg.is_number() ||
                       (arg.is_atom() && ops_.is_operator(arg.functor()));
    int arg_max = def.left_max();
    bool arg_paren = false;
    if (arg.is_compound()) {
      arg_paren = operator_priority(arg) > arg_max;
    }
    if (needs_space || arg_paren) raw(" ");
    if (arg.is_atom() && ops_.is_operator(arg.functor())) {
      raw("(");
      raw(atom_text(arg.functor()));
      raw(")");
    } else {
      const std::size_t at = out_.size();
      term(arg, arg_max, depth + 1, true);
      // `- 1` must stay distinct from the literal -1, even when the number leads a larger operand.
      if (!needs_space && !arg_paren && at < out_.size() && std::isdigit(static_cast<unsigned char>(out_[at])) &&
          (op == "-" || op == "+")) {
        out_.insert(at, " ");
      }
    }
    close_paren(paren);
  }

  int operator_priority(const Term& t) const {
    Symbol f = t.functor();
    if (f == sym::dot() && t.arity() == 2) return 0;
    if (t.arity() == 2 && f.name() != "|") {
      if (auto def = ops_.infix(f)) return def->priority;
    }
    if (t.arity() == 1) {
      if (f == sym::curly()) return 0;
      if (auto def = ops_.prefix(f)) return def->priority;
      if (auto def = ops_.postfix(f)) return def->priority;
    }
    return 0;
  }

  void list(const Term& t, std::size_t depth) {
    emit("[");
    term(t.arg(0), 999, depth + 1);
    Term tail = store_ ? store_->deref(t.arg(1)) : t.arg(1);
    std::size_t count = 1;
    while (tail.is_cons()) {
      if (++count > options_.max_depth) {
        raw("|...]");
        return;
      }
      raw(", ");
      term(tail.arg(0), 999, depth + 1);
      tail = store_ ? store_->deref(tail.arg(1)) : tail.arg(1);
    }
    if (!tail.is_nil()) {
      raw("|");
      term(tail, 999, depth + 1);
    }
    raw("]");
  }

  const OperatorTable& ops_;
  const BindingStore* store_;
  const RenderOptions& options_;
  std::string out_;
};

} // namespace

std::string quote_atom_if_needed(std::string_view name) {
  if (is_identifier(name) || is_symbolic(name) || name == "[]" || name == "!" || name == ";" || name == "{}") {
    return std::string(name);
  }
  std::string out = "'";
  for (char c : name) {
    switch (c) {
    case '\'': out += "\\'"; break;
    case '\\': out += "\\\\"; break;
    case '\n': out += "\\n"; break;
    case '\t': out += "\\t"; break;
    case '\r': out += "\\r"; break;
    case '\0': out += "\\0"; break;
    default: out += c;
    }
  }
  out += '\'';
  return out;
}

std::string format_float(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  if (auto e = s.find('e'); e != std::string::npos && s.find('.') == std::string::npos) {
    s.insert(e, ".0");
  }
  return s;
}

std::string render(const Term& t, const OperatorTable& ops, const BindingStore* store,
                   const RenderOptions& options) {
  Renderer r(ops, store, options);
  r.term(t, 1200, 0);
  return r.take();
}

} // namespace mdprolog
