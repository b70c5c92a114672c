#include <algorithm>
#include <charconv>
#include <limits>
#include <memory>
#include <ostream>
#include <string>

#include "mdprolog/arith.hpp"
#include "mdprolog/dispatcher.hpp"
#include "mdprolog/machine.hpp"
#include "mdprolog/reader.hpp"
#include "mdprolog/render.hpp"

namespace mdprolog {

namespace {

using Args = std::span<const Term>;
using Table = std::unordered_map<PredicateKey, Builtin, PredicateKeyHash>;

Term indicator(const PredicateKey& key) { return make_indicator(key.name, key.arity); }

std::string show(Machine& m, const Term& t, bool quoted) {
  RenderOptions options;
  options.quoted = quoted;
  return render(t, m.kb().operators(), &m.store(), options);
}

void print(Machine& m, std::string_view text) {
  if (m.runtime().out) *m.runtime().out << text;
}

std::int64_t int_arg(Machine& m, const Term& raw) {
  Term t = m.deref(raw);
  if (t.is_var()) errors::instantiation();
  if (!t.is_integer()) errors::type("integer", t);
  return t.int_value();
}

Term callable_arg(Machine& m, const Term& raw) {
  Term t = m.deref(raw);
  if (t.is_var()) errors::instantiation();
  if (!t.is_callable()) errors::type("callable", t);
  return t;
}

std::string text_arg(Machine& m, const Term& raw) {
  Term t = m.deref(raw);
  if (t.is_var()) errors::instantiation();
  if (t.is_atom()) return t.functor().str();
  if (t.is_number()) return show(m, t, false);
  errors::type("atomic", t);
}

/// Proper list elements or a type/instantiation error.
std::vector<Term> list_arg(Machine& m, const Term& raw) {
  Term t = m.deref(raw);
  if (auto items = list_items(m.store(), t)) return *items;
  Term x = t;
  while (x.is_cons()) x = m.deref(x.arg(1));
  if (x.is_var()) errors::instantiation();
  errors::type("list", t);
}

PredicateKey indicator_arg(Machine& m, const Term& raw) {
  Term t = m.deref(raw);
  if (t.is_var()) errors::instantiation();
  if (!t.is_compound(sym::slash(), 2)) errors::type("predicate_indicator", t);
  Term name = m.deref(t.arg(0));
  Term arity = m.deref(t.arg(1));
  if (name.is_var() || arity.is_var()) errors::instantiation();
  if (!name.is_atom()) errors::type("atom", name);
  if (!arity.is_integer()) errors::type("integer", arity);
  if (arity.int_value() < 0) errors::domain("not_less_than_zero", arity);
  return {name.functor(), static_cast<std::size_t>(arity.int_value())};
}

bool is_static_system(const PredicateKey& key) {
  return Machine::is_control(key) || Machine::builtins().count(key) > 0;
}

// ---------------------------------------------------------------- type checks

bool b_var(Machine& m, Args a) { return m.deref(a[0]).is_var(); }
bool b_nonvar(Machine& m, Args a) { return !m.deref(a[0]).is_var(); }
bool b_atom(Machine& m, Args a) { return m.deref(a[0]).is_atom(); }
bool b_number(Machine& m, Args a) { return m.deref(a[0]).is_number(); }
bool b_integer(Machine& m, Args a) { return m.deref(a[0]).is_integer(); }
bool b_float(Machine& m, Args a) { return m.deref(a[0]).is_float(); }
bool b_atomic(Machine& m, Args a) { return m.deref(a[0]).is_atomic(); }
bool b_compound(Machine& m, Args a) { return m.deref(a[0]).is_compound(); }
bool b_callable(Machine& m, Args a) { return m.deref(a[0]).is_callable(); }
bool b_is_list(Machine& m, Args a) { return list_items(m.store(), a[0]).has_value(); }
bool b_ground(Machine& m, Args a) { return m.store().resolve(a[0]).ground(); }

// ---------------------------------------------------------- unify and compare

bool b_unify(Machine& m, Args a) { return m.unify(a[0], a[1]); }
bool b_not_unify(Machine& m, Args a) {
  auto mark = m.store().trail_size();
  bool ok = m.unify(a[0], a[1]);
  m.store().undo(mark);
  return !ok;
}
bool b_unify_oc(Machine& m, Args a) { return m.store().unify(a[0], a[1], true); }
bool b_identical(Machine& m, Args a) { return compare(m.store(), a[0], a[1]) == 0; }
bool b_not_identical(Machine& m, Args a) { return compare(m.store(), a[0], a[1]) != 0; }
bool b_before(Machine& m, Args a) { return compare(m.store(), a[0], a[1]) < 0; }
bool b_after(Machine& m, Args a) { return compare(m.store(), a[0], a[1]) > 0; }
bool b_not_after(Machine& m, Args a) { return compare(m.store(), a[0], a[1]) <= 0; }
bool b_not_before(Machine& m, Args a) { return compare(m.store(), a[0], a[1]) >= 0; }

bool b_compare(Machine& m, Args a) {
  Term order = m.deref(a[0]);
  if (!order.is_var() && !order.is_atom()) errors::type("atom", order);
  int c = compare(m.store(), a[1], a[2]);
  return m.unify(order, Term::atom(c < 0 ? "<" : (c > 0 ? ">" : "=")));
}

// ---------------------------------------------------------------- arithmetic

bool b_is(Machine& m, Args a) { return m.unify(a[0], evaluate(m.store(), a[1])); }

int arith_compare(Machine& m, Args a) {
  return compare_numbers(evaluate(m.store(), a[0]), evaluate(m.store(), a[1]));
}
bool b_num_eq(Machine& m, Args a) { return arith_compare(m, a) == 0; }
bool b_num_ne(Machine& m, Args a) { return arith_compare(m, a) != 0; }
bool b_lt(Machine& m, Args a) { return arith_compare(m, a) < 0; }
bool b_gt(Machine& m, Args a) { return arith_compare(m, a) > 0; }
bool b_le(Machine& m, Args a) { return arith_compare(m, a) <= 0; }
bool b_ge(Machine& m, Args a) { return arith_compare(m, a) >= 0; }

bool b_succ(Machine& m, Args a) {
  Term x = m.deref(a[0]);
  if (x.is_integer()) {
    if (x.int_value() < 0) errors::type("not_less_than_zero", x);
    return m.unify(a[1], Term::integer(x.int_value() + 1));
  }
  Term y = m.deref(a[1]);
  if (y.is_var()) errors::instantiation();
  if (!y.is_integer()) errors::type("integer", y);
  if (y.int_value() <= 0) {
    if (y.int_value() < 0) errors::type("not_less_than_zero", y);
    return false;
  }
  return m.unify(x, Term::integer(y.int_value() - 1));
}

bool b_plus(Machine& m, Args a) {
  Term x = m.deref(a[0]);
  Term y = m.deref(a[1]);
  Term z = m.deref(a[2]);
  if (x.is_integer() && y.is_integer()) return m.unify(z, evaluate(m.store(), Term::compound("+", {x, y})));
  if (x.is_integer() && z.is_integer()) return m.unify(y, evaluate(m.store(), Term::compound("-", {z, x})));
  if (y.is_integer() && z.is_integer()) return m.unify(x, evaluate(m.store(), Term::compound("-", {z, y})));
  errors::instantiation();
}

bool b_between(Machine& m, Args a) {
  std::int64_t low = int_arg(m, a[0]);
  Term high_t = m.deref(a[1]);
  std::int64_t high;
  if (high_t.is_atom(Symbol("inf")) || high_t.is_atom(Symbol("infinite"))) {
    high = std::numeric_limits<std::int64_t>::max();
  } else {
    high = int_arg(m, high_t);
  }
  Term x = m.deref(a[2]);
  if (!x.is_var()) {
    if (!x.is_integer()) errors::type("integer", x);
    return x.int_value() >= low && x.int_value() <= high;
  }
  if (low > high) return false;
  struct Cursor {
    std::int64_t next;
    bool done = false;
  };
  auto cursor = std::make_shared<Cursor>(Cursor{low});
  m.retry_with([&m, cursor, high, x]() {
    if (cursor->done) return false;
    std::int64_t v = cursor->next;
    if (v == high) {
      cursor->done = true;
    } else {
      ++cursor->next;
    }
    return m.unify(x, Term::integer(v));
  });
  return false;
}

// --------------------------------------------------------- term construction

bool b_functor(Machine& m, Args a) {
  Term t = m.deref(a[0]);
  if (!t.is_var()) {
    if (t.is_compound()) return m.unify(a[1], Term::atom(t.functor())) && m.unify(a[2], Term::integer(static_cast<std::int64_t>(t.arity())));
    return m.unify(a[1], t) && m.unify(a[2], Term::integer(0));
  }
  Term name = m.deref(a[1]);
  Term arity = m.deref(a[2]);
  if (name.is_var() || arity.is_var()) errors::instantiation();
  if (!arity.is_integer()) errors::type("integer", arity);
  if (arity.int_value() < 0) errors::domain("not_less_than_zero", arity);
  if (arity.int_value() == 0) {
    if (!name.is_atomic()) errors::type("atomic", name);
    return m.unify(t, name);
  }
  if (name.is_compound()) errors::type("atomic", name);
  if (!name.is_atom()) errors::type("atom", name);
  std::vector<Term> args;
  for (std::int64_t i = 0; i < arity.int_value(); ++i) args.push_back(m.store().new_var());
  return m.unify(t, Term::compound(name.functor(), std::move(args)));
}

bool b_arg(Machine& m, Args a) {
  Term t = m.deref(a[1]);
  if (t.is_var()) errors::instantiation();
  if (!t.is_compound()) errors::type("compound", t);
  Term n = m.deref(a[0]);
  if (n.is_integer()) {
    std::int64_t i = n.int_value();
    if (i < 1 || static_cast<std::size_t>(i) > t.arity()) return false;
    return m.unify(a[2], t.arg(static_cast<std::size_t>(i - 1)));
  }
  if (!n.is_var()) errors::type("integer", n);
  auto index = std::make_shared<std::size_t>(0);
  Term value = a[2];
  m.retry_with([&m, index, t, n, value]() {
    while (*index < t.arity()) {
      std::size_t i = (*index)++;
      auto mark = m.store().trail_size();
      if (m.unify(n, Term::integer(static_cast<std::int64_t>(i + 1))) && m.unify(value, t.arg(i))) return true;
      m.store().undo(mark);
    }
    return false;
  });
  return false;
}

bool b_univ(Machine& m, Args a) {
  Term t = m.deref(a[0]);
  if (!t.is_var()) {
    if (!t.is_compound()) return m.unify(a[1], make_list({t}));
    std::vector<Term> items{Term::atom(t.functor())};
    items.insert(items.end(), t.args().begin(), t.args().end());
    return m.unify(a[1], make_list(items));
  }
  std::vector<Term> items = list_arg(m, a[1]);
  if (items.empty()) errors::domain("non_empty_list", Term());
  Term head = m.deref(items[0]);
  if (head.is_var()) errors::instantiation();
  if (items.size() == 1) {
    if (head.is_compound()) errors::type("atomic", head);
    return m.unify(t, head);
  }
  if (!head.is_atom()) errors::type("atom", head);
  return m.unify(t, Term::compound(head.functor(), std::vector<Term>(items.begin() + 1, items.end())));
}

bool b_copy_term(Machine& m, Args a) {
  FrozenTerm copy = freeze(m.store(), m.store().resolve(a[0]));
  return m.unify(a[1], instantiate(m.store(), copy));
}

// ---------------------------------------------------------------- atoms

std::string number_text(const Term& n) {
  if (n.is_integer()) return std::to_string(n.int_value());
  return format_float(n.float_value());
}

/// Parses number syntax (including a leading minus); nullopt when `text` is not a number.
std::optional<Term> parse_number(const std::string& text) {
  std::string body = text;
  while (!body.empty() && std::isspace(static_cast<unsigned char>(body.front()))) body.erase(body.begin());
  bool negative = false;
  if (!body.empty() && (body[0] == '-' || body[0] == '+')) {
    negative = body[0] == '-';
    body.erase(body.begin());
  }
  if (body.empty() || !std::isdigit(static_cast<unsigned char>(body[0]))) return std::nullopt;
  try {
    auto tokens = tokenize(body);
    if (tokens.size() != 1) return std::nullopt;
    const Token& t = tokens[0];
    if (t.kind == TokenKind::Integer) return Term::integer(negative ? -t.int_value : t.int_value);
    if (t.kind == TokenKind::Float) return Term::floating(negative ? -t.float_value : t.float_value);
  } catch (const SyntaxError&) {
  }
  return std::nullopt;
}

std::vector<std::string> utf8_chars(const std::string& s) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < s.size();) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    std::size_t len = c < 0x80 ? 1 : (c >> 5) == 6 ? 2 : (c >> 4) == 14 ? 3 : (c >> 3) == 30 ? 4 : 1;
    out.push_back(s.substr(i, len));
    i += len;
  }
  return out;
}

std::int64_t decode_utf8(const std::string& ch) {
  unsigned char c = static_cast<unsigned char>(ch[0]);
  if (ch.size() == 1) return c;
  std::int64_t cp = c & (0x3f >> (ch.size() - 1));
  for (std::size_t i = 1; i < ch.size(); ++i) cp = (cp << 6) | (static_cast<unsigned char>(ch[i]) & 0x3f);
  return cp;
}

std::string encode_utf8(std::int64_t cp) {
  std::string out;
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xc0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3f));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xe0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3f));
    out += static_cast<char>(0x80 | (cp & 0x3f));
  } else {
    out += static_cast<char>(0xf0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3f));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3f));
    out += static_cast<char>(0x80 | (cp & 0x3f));
  }
  return out;
}

std::string text_from_list(Machine& m, const Term& list, bool codes) {
  std::string out;
  for (const Term& raw : list_arg(m, list)) {
    Term item = m.deref(raw);
    if (item.is_var()) errors::instantiation();
    if (codes) {
      if (!item.is_integer()) errors::representation("character_code");
      out += encode_utf8(item.int_value());
    } else {
      if (!item.is_atom()) errors::type("character", item);
      out += item.functor().str();
    }
  }
  return out;
}

Term text_to_list(const std::string& text, bool codes) {
  std::vector<Term> items;
  for (const auto& ch : utf8_chars(text)) {
    items.push_back(codes ? Term::integer(decode_utf8(ch)) : Term::atom(ch));
  }
  return make_list(items);
}

bool atom_to_list(Machine& m, Args a, bool codes) {
  Term t = m.deref(a[0]);
  if (!t.is_var()) return m.unify(a[1], text_to_list(text_arg(m, t), codes));
  return m.unify(t, Term::atom(text_from_list(m, a[1], codes)));
}

bool b_atom_codes(Machine& m, Args a) { return atom_to_list(m, a, true); }
bool b_atom_chars(Machine& m, Args a) { return atom_to_list(m, a, false); }

bool number_to_list(Machine& m, Args a, bool codes) {
  Term t = m.deref(a[0]);
  if (!t.is_var()) {
    if (!t.is_number()) errors::type("number", t);
    return m.unify(a[1], text_to_list(number_text(t), codes));
  }
  std::string text = text_from_list(m, a[1], codes);
  auto n = parse_number(text);
  if (!n) errors::type("number", Term::atom(text));  // ISO reports a syntax error; close enough
  return m.unify(t, *n);
}

bool b_number_codes(Machine& m, Args a) { return number_to_list(m, a, true); }
bool b_number_chars(Machine& m, Args a) { return number_to_list(m, a, false); }

bool b_char_code(Machine& m, Args a) {
  Term c = m.deref(a[0]);
  if (c.is_atom()) return m.unify(a[1], Term::integer(decode_utf8(c.functor().str())));
  Term code = m.deref(a[1]);
  if (code.is_var()) errors::instantiation();
  return m.unify(c, Term::atom(encode_utf8(int_arg(m, code))));
}

bool b_atom_length(Machine& m, Args a) {
  return m.unify(a[1], Term::integer(static_cast<std::int64_t>(utf8_chars(text_arg(m, a[0])).size())));
}

bool b_atom_number(Machine& m, Args a) {
  Term t = m.deref(a[0]);
  if (t.is_var()) {
    Term n = m.deref(a[1]);
    if (n.is_var()) errors::instantiation();
    if (!n.is_number()) errors::type("number", n);
    return m.unify(t, Term::atom(number_text(n)));
  }
  auto n = parse_number(text_arg(m, t));
  return n && m.unify(a[1], *n);
}

bool b_atom_concat(Machine& m, Args a) {
  Term x = m.deref(a[0]);
  Term y = m.deref(a[1]);
  if (!x.is_var() && !y.is_var()) return m.unify(a[2], Term::atom(text_arg(m, x) + text_arg(m, y)));
  std::string whole = text_arg(m, a[2]);
  auto chars = utf8_chars(whole);
  auto split = std::make_shared<std::size_t>(0);
  m.retry_with([&m, split, chars, x, y]() {
    while (*split <= chars.size()) {
      std::size_t k = (*split)++;
      std::string left;
      std::string right;
      for (std::size_t i = 0; i < chars.size(); ++i) (i < k ? left : right) += chars[i];
      auto mark = m.store().trail_size();
      if (m.unify(x, Term::atom(left)) && m.unify(y, Term::atom(right))) return true;
      m.store().undo(mark);
    }
    return false;
  });
  return false;
}

bool b_atomic_list_concat(Machine& m, Args a) {
  std::string out;
  for (const Term& item : list_arg(m, a[0])) out += text_arg(m, item);
  return m.unify(a[1], Term::atom(out));
}

bool b_atomic_list_concat3(Machine& m, Args a) {
  std::string sep = text_arg(m, a[1]);
  Term list = m.deref(a[0]);
  auto items = list_items(m.store(), list);
  bool ground_items = items && std::all_of(items->begin(), items->end(), [&](const Term& t) { return !m.deref(t).is_var(); });
  if (ground_items) {
    std::string out;
    for (std::size_t i = 0; i < items->size(); ++i) {
      if (i > 0) out += sep;
      out += text_arg(m, (*items)[i]);
    }
    return m.unify(a[2], Term::atom(out));
  }
  if (sep.empty()) errors::domain("non_empty_atom", Term::atom(sep));
  std::string whole = text_arg(m, a[2]);
  std::vector<Term> parts;
  std::size_t start = 0;
  for (;;) {
    std::size_t pos = whole.find(sep, start);
    parts.push_back(Term::atom(whole.substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
    if (pos == std::string::npos) break;
    start = pos + sep.size();
  }
  return m.unify(list, make_list(parts));
}

bool b_term_to_atom(Machine& m, Args a) {
  Term t = m.deref(a[0]);
  if (!t.is_var()) return m.unify(a[1], Term::atom(show(m, t, true)));
  std::string text = text_arg(m, a[1]);
  try {
    return m.unify(t, parse_term(text, m.kb().operators(), m.store()));
  } catch (const SyntaxError& e) {
    errors::type("term_text", Term::atom(e.detail()));
  }
}

// ------------------------------------------------------------------ lists

bool b_length(Machine& m, Args a) {
  std::int64_t count = 0;
  Term tail = m.deref(a[0]);
  while (tail.is_cons()) {
    ++count;
    tail = m.deref(tail.arg(1));
  }
  Term n = m.deref(a[1]);
  if (tail.is_nil()) return m.unify(n, Term::integer(count));
  if (!tail.is_var()) return false;
  if (!n.is_var()) {
    if (!n.is_integer()) errors::type("integer", n);
    if (n.int_value() < count) return false;
    std::vector<Term> fresh;
    for (std::int64_t i = count; i < n.int_value(); ++i) fresh.push_back(m.store().new_var());
    return m.unify(tail, make_list(fresh));
  }
  auto extra = std::make_shared<std::int64_t>(0);
  m.retry_with([&m, extra, count, tail, n]() {
    std::vector<Term> fresh;
    for (std::int64_t i = 0; i < *extra; ++i) fresh.push_back(m.store().new_var());
    std::int64_t total = count + (*extra)++;
    return m.unify(tail, make_list(fresh)) && m.unify(n, Term::integer(total));
  });
  return false;
}

bool b_msort(Machine& m, Args a) {
  auto items = list_arg(m, a[0]);
  std::vector<Term> resolved;
  for (const auto& t : items) resolved.push_back(m.store().resolve(t));
  std::stable_sort(resolved.begin(), resolved.end(), [](const Term& x, const Term& y) { return compare_terms(x, y) < 0; });
  return m.unify(a[1], make_list(resolved));
}

bool b_sort(Machine& m, Args a) {
  auto items = list_arg(m, a[0]);
  std::vector<Term> resolved;
  for (const auto& t : items) resolved.push_back(m.store().resolve(t));
  std::stable_sort(resolved.begin(), resolved.end(), [](const Term& x, const Term& y) { return compare_terms(x, y) < 0; });
  resolved.erase(std::unique(resolved.begin(), resolved.end(),
                             [](const Term& x, const Term& y) { return compare_terms(x, y) == 0; }),
                 resolved.end());
  return m.unify(a[1], make_list(resolved));
}

bool b_sort4(Machine& m, Args a) {
  std::int64_t key = int_arg(m, a[0]);
  Term order = m.deref(a[1]);
  if (order.is_var()) errors::instantiation();
  std::string op = order.is_atom() ? order.functor().str() : "";
  if (op != "@<" && op != "@>" && op != "@=<" && op != "@>=") errors::domain("order", order);
  auto items = list_arg(m, a[2]);
  std::vector<std::pair<Term, Term>> keyed;
  for (const auto& raw : items) {
    Term t = m.store().resolve(raw);
    Term k = t;
    if (key > 0) {
      if (!t.is_compound() || static_cast<std::size_t>(key) > t.arity()) errors::type("compound", t);
      k = t.arg(static_cast<std::size_t>(key - 1));
    }
    keyed.emplace_back(k, t);
  }
  bool descending = op[1] == '>';
  std::stable_sort(keyed.begin(), keyed.end(), [&](const auto& x, const auto& y) {
    int c = compare_terms(x.first, y.first);
    return descending ? c > 0 : c < 0;
  });
  std::vector<Term> out;
  for (std::size_t i = 0; i < keyed.size(); ++i) {
    bool dedupe = op.size() == 2;
    if (dedupe && !out.empty() && compare_terms(keyed[i].first, keyed[i - 1].first) == 0) continue;
    out.push_back(keyed[i].second);
  }
  return m.unify(a[3], make_list(out));
}

bool b_keysort(Machine& m, Args a) {
  auto items = list_arg(m, a[0]);
  std::vector<Term> pairs;
  for (const auto& raw : items) {
    Term t = m.store().resolve(raw);
    if (t.is_var()) errors::instantiation();
    if (!t.is_compound(sym::minus(), 2)) errors::type("pair", t);
    pairs.push_back(t);
  }
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const Term& x, const Term& y) { return compare_terms(x.arg(0), y.arg(0)) < 0; });
  return m.unify(a[1], make_list(pairs));
}

// --------------------------------------------------------------- database

/// Splits a clause term into head and body, checking both.
std::pair<Term, Term> clause_parts(Machine& m, const Term& raw) {
  Term c = m.deref(raw);
  if (c.is_var()) errors::instantiation();
  Term head = c;
  Term body = Term::atom(sym::true_());
  if (c.is_compound(sym::neck(), 2)) {
    head = m.deref(c.arg(0));
    body = m.deref(c.arg(1));
  }
  if (head.is_var()) errors::instantiation();
  if (!head.is_callable()) errors::type("callable", head);
  if (body.is_number()) errors::type("callable", body);
  return {head, body};
}

/// Variables in goal position become call/1.
Term body_goals(const BindingStore& store, const Term& raw) {
  Term t = store.deref(raw);
  if (t.is_var()) return Term::compound(sym::call(), {t});
  if (t.is_number()) errors::type("callable", t);
  if (t.is_compound() && t.arity() == 2 &&
      (t.functor() == sym::comma() || t.functor() == sym::semicolon() || t.functor() == sym::arrow())) {
    return Term::compound(t.functor(), {body_goals(store, t.arg(0)), body_goals(store, t.arg(1))});
  }
  return t;
}

void check_modifiable(Machine& m, const PredicateKey& key) {
  if (is_static_system(key)) errors::permission("modify", "static_procedure", indicator(key));
  if (m.kb().is_multidimensional(key)) errors::permission("modify", "multidimensional_procedure", indicator(key));
}

bool assert_clause(Machine& m, const Term& raw, bool front) {
  auto [head, body] = clause_parts(m, raw);
  PredicateKey key = key_of(head);
  check_modifiable(m, key);
  Term goals = body_goals(m.store(), body);
  if (!m.kb().is_defined(key)) m.kb().declare_dynamic(key);
  m.kb().add_clause(key, make_clause(m.store(), head, goals));
  if (front) {
    // add_clause appended; move the new clause to the front.
    ClauseListPtr list = m.kb().clauses(key);
    ClausePtr added = list->back();
    m.kb().remove_clause(key, added);
    m.kb().add_clause(key, added, true);
  }
  return true;
}

bool b_assertz(Machine& m, Args a) { return assert_clause(m, a[0], false); }
bool b_asserta(Machine& m, Args a) { return assert_clause(m, a[0], true); }

bool b_retract(Machine& m, Args a) {
  auto [head, body] = clause_parts(m, a[0]);
  PredicateKey key = key_of(head);
  if (is_static_system(key)) errors::permission("modify", "static_procedure", indicator(key));
  ClauseListPtr snapshot = m.kb().clauses(key);
  if (!snapshot) return false;
  auto index = std::make_shared<std::size_t>(0);
  m.retry_with([&m, index, snapshot, head, body, key]() {
    while (*index < snapshot->size()) {
      ClausePtr c = (*snapshot)[(*index)++];
      auto mark = m.store().mark();
      VarId base = m.store().allocate(c->var_count);
      if (m.unify(head, instantiate(c->head, base)) && m.unify(body, instantiate(c->body, base)) &&
          m.kb().remove_clause(key, c)) {
        return true;
      }
      m.store().reset(mark);
    }
    return false;
  });
  return false;
}

bool b_retractall(Machine& m, Args a) {
  Term head = callable_arg(m, a[0]);
  PredicateKey key = key_of(head);
  check_modifiable(m, key);
  ClauseListPtr snapshot = m.kb().clauses(key);
  if (!snapshot) {
    m.kb().declare_dynamic(key);
    return true;
  }
  for (const ClausePtr& c : *snapshot) {
    auto mark = m.store().mark();
    VarId base = m.store().allocate(c->var_count);
    if (m.unify(head, instantiate(c->head, base))) m.kb().remove_clause(key, c);
    m.store().reset(mark);
  }
  return true;
}

bool b_clause(Machine& m, Args a) {
  Term head = callable_arg(m, a[0]);
  Term body = m.deref(a[1]);
  if (!body.is_var() && !body.is_callable()) errors::type("callable", body);
  PredicateKey key = key_of(head);
  if (is_static_system(key)) errors::permission("access", "private_procedure", indicator(key));
  ClauseListPtr snapshot = m.kb().clauses(key);
  if (!snapshot) return false;
  auto index = std::make_shared<std::size_t>(0);
  m.retry_with([&m, index, snapshot, head, body]() {
    while (*index < snapshot->size()) {
      ClausePtr c = (*snapshot)[(*index)++];
      auto mark = m.store().mark();
      VarId base = m.store().allocate(c->var_count);
      if (m.unify(head, instantiate(c->head, base)) && m.unify(body, instantiate(c->body, base))) return true;
      m.store().reset(mark);
    }
    return false;
  });
  return false;
}

void declare_dynamic(Machine& m, const Term& raw) {
  Term t = m.deref(raw);
  if (t.is_var()) errors::instantiation();
  if (t.is_compound(sym::comma(), 2)) {
    declare_dynamic(m, t.arg(0));
    declare_dynamic(m, t.arg(1));
    return;
  }
  if (t.is_cons() || t.is_nil()) {
    for (const Term& item : list_arg(m, t)) declare_dynamic(m, item);
    return;
  }
  PredicateKey key = indicator_arg(m, t);
  if (is_static_system(key)) errors::permission("modify", "static_procedure", indicator(key));
  if (m.kb().is_multidimensional(key)) errors::permission("modify", "multidimensional_procedure", indicator(key));
  m.kb().declare_dynamic(key);
}

bool b_dynamic(Machine& m, Args a) {
  declare_dynamic(m, a[0]);
  return true;
}

bool b_discontiguous(Machine&, Args) { return true; }

bool b_abolish(Machine& m, Args a) {
  PredicateKey key = indicator_arg(m, a[0]);
  check_modifiable(m, key);
  if (ClauseListPtr list = m.kb().clauses(key)) {
    for (const auto& c : *list) m.kb().remove_clause(key, c);
  }
  return true;
}

bool b_op(Machine& m, Args a) {
  try {
    apply_op_directive(m.kb().operators(), m.store(), a[0], a[1], a[2]);
  } catch (const std::invalid_argument&) {
    errors::domain("operator_priority", m.deref(a[0]));
  }
  return true;
}

bool b_current_op(Machine& m, Args a) {
  Term name = m.deref(a[2]);
  if (name.is_var()) errors::instantiation();
  if (!name.is_atom()) errors::type("atom", name);
  const auto& ops = m.kb().operators();
  std::vector<OperatorDef> defs;
  if (auto d = ops.prefix(name.functor())) defs.push_back(*d);
  if (auto d = ops.infix(name.functor())) defs.push_back(*d);
  if (auto d = ops.postfix(name.functor())) defs.push_back(*d);
  auto index = std::make_shared<std::size_t>(0);
  Term p = a[0];
  Term type = a[1];
  m.retry_with([&m, index, defs, p, type]() {
    while (*index < defs.size()) {
      const OperatorDef& d = defs[(*index)++];
      auto mark = m.store().trail_size();
      if (m.unify(p, Term::integer(d.priority)) && m.unify(type, Term::atom(fixity_name(d.type)))) return true;
      m.store().undo(mark);
    }
    return false;
  });
  return false;
}

// ------------------------------------------------------------- control

bool b_throw(Machine& m, Args a) {
  Term ball = m.store().resolve(a[0]);
  if (ball.is_var()) errors::instantiation();
  throw PrologError(ball);
}

bool b_halt0(Machine&, Args) { throw Halt{0}; }
bool b_halt1(Machine& m, Args a) { throw Halt{static_cast<int>(int_arg(m, a[0]))}; }

// ------------------------------------------------------------------ output

bool b_write(Machine& m, Args a) {
  print(m, show(m, a[0], false));
  return true;
}
bool b_print(Machine& m, Args a) {
  print(m, show(m, a[0], true));
  return true;
}
bool b_writeln(Machine& m, Args a) {
  print(m, show(m, a[0], false) + "\n");
  return true;
}
bool b_nl(Machine& m, Args) {
  print(m, "\n");
  return true;
}
bool b_tab(Machine& m, Args a) {
  Term value = evaluate(m.store(), a[0]);
  std::int64_t n = value.is_integer() ? value.int_value() : 0;
  print(m, std::string(static_cast<std::size_t>(std::max<std::int64_t>(n, 0)), ' '));
  return true;
}

bool format_impl(Machine& m, const Term& format_term, const Term& args_term) {
  std::string fmt = text_arg(m, format_term);
  Term args_raw = m.deref(args_term);
  std::vector<Term> args;
  if (auto items = list_items(m.store(), args_raw)) {
    args = *items;
  } else {
    args.push_back(args_raw);
  }
  std::size_t next = 0;
  auto take = [&]() -> Term {
    if (next >= args.size()) errors::domain("format_arguments", args_raw);
    return args[next++];
  };
  std::string out;
  for (std::size_t i = 0; i < fmt.size(); ++i) {
    if (fmt[i] != '~' || i + 1 >= fmt.size()) {
      out += fmt[i];
      continue;
    }
    char d = fmt[++i];
    switch (d) {
    case 'w': case 'a': out += show(m, take(), false); break;
    case 'p': case 'q': out += show(m, take(), true); break;
    case 'd': out += std::to_string(int_arg(m, take())); break;
    case 'n': out += '\n'; break;
    case '~': out += '~'; break;
    case 's': out += text_from_list(m, take(), true); break;
    default: errors::domain("format_directive", Term::atom(std::string(1, d)));
    }
  }
  print(m, out);
  return true;
}

bool b_format1(Machine& m, Args a) { return format_impl(m, a[0], Term()); }
bool b_format2(Machine& m, Args a) { return format_impl(m, a[0], a[1]); }

// --------------------------------------------------------------- objects

bool b_next_oid(Machine& m, Args a) { return m.unify(a[0], Term::integer(m.kb().next_object_id())); }

Table make_table() {
  Table t;
  auto add = [&](const char* name, std::size_t arity, Builtin fn) { t[{Symbol(name), arity}] = fn; };
  add("var", 1, b_var);
  add("nonvar", 1, b_nonvar);
  add("atom", 1, b_atom);
  add("number", 1, b_number);
  add("integer", 1, b_integer);
  add("float", 1, b_float);
  add("atomic", 1, b_atomic);
  add("compound", 1, b_compound);
  add("callable", 1, b_callable);
  add("is_list", 1, b_is_list);
  add("ground", 1, b_ground);
  add("=", 2, b_unify);
  add("\\=", 2, b_not_unify);
  add("unify_with_occurs_check", 2, b_unify_oc);
  add("==", 2, b_identical);
  add("\\==", 2, b_not_identical);
  add("@<", 2, b_before);
  add("@>", 2, b_after);
  add("@=<", 2, b_not_after);
  add("@>=", 2, b_not_before);
  add("compare", 3, b_compare);
  add("is", 2, b_is);
  add("=:=", 2, b_num_eq);
  add("=\\=", 2, b_num_ne);
  add("<", 2, b_lt);
  add(">", 2, b_gt);
  add("=<", 2, b_le);
  add(">=", 2, b_ge);
  add("succ", 2, b_succ);
  add("plus", 3, b_plus);
  add("between", 3, b_between);
  add("functor", 3, b_functor);
  add("arg", 3, b_arg);
  add("=..", 2, b_univ);
  add("copy_term", 2, b_copy_term);
  add("atom_codes", 2, b_atom_codes);
  add("atom_chars", 2, b_atom_chars);
  add("number_codes", 2, b_number_codes);
  add("number_chars", 2, b_number_chars);
  add("char_code", 2, b_char_code);
  add("atom_length", 2, b_atom_length);
  add("atom_number", 2, b_atom_number);
  add("atom_concat", 3, b_atom_concat);
  add("atomic_list_concat", 2, b_atomic_list_concat);
  add("atomic_list_concat", 3, b_atomic_list_concat3);
  add("term_to_atom", 2, b_term_to_atom);
  add("length", 2, b_length);
  add("msort", 2, b_msort);
  add("sort", 2, b_sort);
  add("sort", 4, b_sort4);
  add("keysort", 2, b_keysort);
  add("assert", 1, b_assertz);
  add("assertz", 1, b_assertz);
  add("asserta", 1, b_asserta);
  add("retract", 1, b_retract);
  add("retractall", 1, b_retractall);
  add("clause", 2, b_clause);
  add("abolish", 1, b_abolish);
  add("dynamic", 1, b_dynamic);
  add("discontiguous", 1, b_discontiguous);
  add("op", 3, b_op);
  add("current_op", 3, b_current_op);
  add("throw", 1, b_throw);
  add("halt", 0, b_halt0);
  add("halt", 1, b_halt1);
  add("write", 1, b_write);
  add("print", 1, b_print);
  add("writeq", 1, b_print);
  add("write_canonical", 1, b_print);
  add("writeln", 1, b_writeln);
  add("nl", 0, b_nl);
  add("tab", 1, b_tab);
  add("format", 1, b_format1);
  add("format", 2, b_format2);
  add("$next_oid", 1, b_next_oid);
  register_dispatch_builtins(t);
  return t;
}

} // namespace

const std::unordered_map<PredicateKey, Builtin, PredicateKeyHash>& Machine::builtins() {
  static const Table table = make_table();
  return table;
}

} // namespace mdprolog
