#include "mdprolog/arith.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string_view>

#include "mdprolog/errors.hpp"

namespace mdprolog {

namespace {

Term make_float(double d) {
  if (std::isnan(d)) errors::evaluation("undefined");
  if (std::isinf(d)) errors::evaluation("float_overflow");
  return Term::floating(d);
}

std::int64_t require_int(const Term& t) {
  if (!t.is_integer()) errors::type("integer", t);
  return t.int_value();
}

[[noreturn]] void overflow() { errors::evaluation("int_overflow"); }

std::int64_t checked_pow(std::int64_t base, std::int64_t exp) {
  std::int64_t result = 1;
  while (exp > 0) {
    if (exp & 1) {
      if (__builtin_mul_overflow(result, base, &result)) overflow();
    }
    exp >>= 1;
    if (exp > 0 && __builtin_mul_overflow(base, base, &base)) overflow();
  }
  return result;
}

std::int64_t to_integer(double d) {
  if (std::isnan(d) || std::isinf(d)) errors::evaluation("undefined");
  // 2^63 is exactly representable; anything at or beyond it does not fit.
  if (d >= 9223372036854775808.0 || d < -9223372036854775808.0) overflow();
  return static_cast<std::int64_t>(d);
}

Term eval(const BindingStore& store, const Term& raw);

Term eval_unary(std::string_view name, const Term& x) {
  const bool i = x.is_integer();
  const double d = x.numeric_value();
  if (name == "-") {
    if (i) {
      if (x.int_value() == std::numeric_limits<std::int64_t>::min()) overflow();
      return Term::integer(-x.int_value());
    }
    return Term::floating(-d);
  }
  if (name == "+") return x;
  if (name == "abs") {
    if (i) {
      if (x.int_value() == std::numeric_limits<std::int64_t>::min()) overflow();
      return Term::integer(x.int_value() < 0 ? -x.int_value() : x.int_value());
    }
    return Term::floating(std::fabs(d));
  }
  if (name == "sign") {
    if (i) return Term::integer((x.int_value() > 0) - (x.int_value() < 0));
    return Term::floating(d > 0 ? 1.0 : (d < 0 ? -1.0 : 0.0));
  }
  if (name == "floor") return i ? x : Term::integer(to_integer(std::floor(d)));
  if (name == "ceiling") return i ? x : Term::integer(to_integer(std::ceil(d)));
  if (name == "round") return i ? x : Term::integer(to_integer(std::round(d)));
  if (name == "truncate" || name == "integer") return i ? x : Term::integer(to_integer(name == "integer" ? std::round(d) : std::trunc(d)));
  if (name == "float") return Term::floating(d);
  if (name == "float_integer_part") return make_float(std::trunc(d));
  if (name == "float_fractional_part") return make_float(d - std::trunc(d));
  if (name == "sqrt") {
    if (d < 0) errors::evaluation("undefined");
    return make_float(std::sqrt(d));
  }
  if (name == "exp") return make_float(std::exp(d));
  if (name == "log") {
    if (d <= 0) errors::evaluation("undefined");
    return make_float(std::log(d));
  }
  if (name == "log2") {
    if (d <= 0) errors::evaluation("undefined");
    return make_float(std::log2(d));
  }
  if (name == "sin") return make_float(std::sin(d));
  if (name == "cos") return make_float(std::cos(d));
  if (name == "tan") return make_float(std::tan(d));
  if (name == "asin") return make_float(std::asin(d));
  if (name == "acos") return make_float(std::acos(d));
  if (name == "atan") return make_float(std::atan(d));
  if (name == "\\") return Term::integer(~require_int(x));
  if (name == "msb") {
    std::int64_t v = require_int(x);
    if (v <= 0) errors::type("positive_integer", x);
    return Term::integer(63 - __builtin_clzll(static_cast<unsigned long long>(v)));
  }
  errors::type("evaluable", make_indicator(Symbol(name), 1));
}

Term int_division(std::string_view name, std::int64_t a, std::int64_t b) {
  if (b == 0) errors::evaluation("zero_divisor");
  if (a == std::numeric_limits<std::int64_t>::min() && b == -1) {
    if (name == "mod" || name == "rem") return Term::integer(0);
    overflow();
  }
  if (name == "//") return Term::integer(a / b);
  if (name == "rem") return Term::integer(a % b);
  if (name == "div") {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return Term::integer(q);
  }
  std::int64_t m = a % b;  // mod takes the sign of the divisor
  if (m != 0 && ((m < 0) != (b < 0))) m += b;
  return Term::integer(m);
}

Term eval_binary(std::string_view name, const Term& x, const Term& y) {
  const bool ints = x.is_integer() && y.is_integer();
  const double a = x.numeric_value();
  const double b = y.numeric_value();
  if (name == "+") {
    if (ints) {
      std::int64_t r;
      if (__builtin_add_overflow(x.int_value(), y.int_value(), &r)) overflow();
      return Term::integer(r);
    }
    return make_float(a + b);
  }
  if (name == "-") {
    if (ints) {
      std::int64_t r;
      if (__builtin_sub_overflow(x.int_value(), y.int_value(), &r)) overflow();
      return Term::integer(r);
    }
    return make_float(a - b);
  }
  if (name == "*") {
    if (ints) {
      std::int64_t r;
      if (__builtin_mul_overflow(x.int_value(), y.int_value(), &r)) overflow();
      return Term::integer(r);
    }
    return make_float(a * b);
  }
  if (name == "/") {
    if (ints) {
      if (y.int_value() == 0) errors::evaluation("zero_divisor");
      if (x.int_value() % y.int_value() == 0) return int_division("//", x.int_value(), y.int_value());
      return make_float(a / b);
    }
    if (b == 0.0) errors::evaluation("zero_divisor");
    return make_float(a / b);
  }
  if (name == "//" || name == "mod" || name == "rem" || name == "div") {
    return int_division(name, require_int(x), require_int(y));
  }
  if (name == "min") return compare_numbers(x, y) <= 0 ? x : y;
  if (name == "max") return compare_numbers(x, y) >= 0 ? x : y;
  if (name == "**") {
    if (ints && y.int_value() >= 0) return Term::integer(checked_pow(x.int_value(), y.int_value()));
    return make_float(std::pow(a, b));
  }
  if (name == "^") {
    if (ints) {
      std::int64_t base = x.int_value();
      std::int64_t e = y.int_value();
      if (e < 0) {
        if (base == 1) return Term::integer(1);
        if (base == -1) return Term::integer(e % 2 == 0 ? 1 : -1);
        if (base == 0) errors::evaluation("zero_divisor");
        errors::type("float", x);
      }
      return Term::integer(checked_pow(base, e));
    }
    return make_float(std::pow(a, b));
  }
  if (name == ">>") return Term::integer(require_int(x) >> (require_int(y) & 63));
  if (name == "<<") {
    std::int64_t v = require_int(x);
    std::int64_t s = require_int(y);
    if (s < 0 || s > 62) overflow();
    std::int64_t r = static_cast<std::int64_t>(static_cast<std::uint64_t>(v) << s);
    if ((r >> s) != v) overflow();
    return Term::integer(r);
  }
  if (name == "/\\") return Term::integer(require_int(x) & require_int(y));
  if (name == "\\/") return Term::integer(require_int(x) | require_int(y));
  if (name == "xor") return Term::integer(require_int(x) ^ require_int(y));
  if (name == "atan2" || name == "atan") return make_float(std::atan2(a, b));
  if (name == "gcd") {
    std::int64_t p = require_int(x);
    std::int64_t q = require_int(y);
    while (q != 0) {
      std::int64_t t = p % q;
      p = q;
      q = t;
    }
    return Term::integer(p < 0 ? -p : p);
  }
  errors::type("evaluable", make_indicator(Symbol(name), 2));
}

Term eval(const BindingStore& store, const Term& raw) {
  Term t = store.deref(raw);
  switch (t.kind()) {
  case Term::Kind::Var: errors::instantiation();
  case Term::Kind::Integer:
  case Term::Kind::Float: return t;
  case Term::Kind::Atom: {
    std::string_view name = t.functor().name();
    if (name == "pi") return Term::floating(std::numbers::pi);
    if (name == "e") return Term::floating(std::numbers::e);
    if (name == "inf" || name == "infinite") return Term::floating(std::numeric_limits<double>::infinity());
    if (name == "nan") return Term::floating(std::numeric_limits<double>::quiet_NaN());
    if (name == "max_tagged_integer") return Term::integer(std::numeric_limits<std::int64_t>::max());
    if (name == "epsilon") return Term::floating(std::numeric_limits<double>::epsilon());
    errors::type("evaluable", make_indicator(t.functor(), 0));
  }
  case Term::Kind::Compound: {
    if (t.arity() == 1) {
      return eval_unary(t.functor().name(), eval(store, t.arg(0)));
    }
    if (t.arity() == 2) {
      if (t.is_cons()) {
        // "[X]" evaluates X, as used for character codes.
        if (!store.deref(t.arg(1)).is_nil()) errors::type("evaluable", t);
        return eval(store, t.arg(0));
      }
      Term x = eval(store, t.arg(0));
      Term y = eval(store, t.arg(1));
      return eval_binary(t.functor().name(), x, y);
    }
    errors::type("evaluable", make_indicator(t.functor(), t.arity()));
  }
  }
  errors::type("evaluable", t);
}

} // namespace

Term evaluate(const BindingStore& store, const Term& expr) { return eval(store, expr); }

int compare_numbers(const Term& a, const Term& b) {
  if (a.is_integer() && b.is_integer()) {
    return (a.int_value() > b.int_value()) - (a.int_value() < b.int_value());
  }
  double x = a.numeric_value();
  double y = b.numeric_value();
  return (x > y) - (x < y);
}

} // namespace mdprolog
