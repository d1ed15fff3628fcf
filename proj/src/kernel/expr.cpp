#include "scj2/kernel/expr.hpp"

#include "scj2/kernel/errors.hpp"

namespace scj2::kernel {

namespace {

ExprPtr make(Expr e) {
  std::uint64_t h = static_cast<std::uint64_t>(e.op) * 0x100000001b3ULL;
  switch (e.op) {
    case Op::Lit:
      h = hash_mix(h, e.lit.hash());
      break;
    case Op::Var:
      h = hash_mix(h, sym_hash(e.var));
      break;
    default:
      if (e.lhs) h = hash_mix(h, e.lhs->hash);
      if (e.rhs) h = hash_mix(h, e.rhs->hash);
  }
  e.hash = h;
  return std::make_shared<const Expr>(std::move(e));
}

const char* op_text(Op op) {
  switch (op) {
    case Op::Not:
      return "!";
    case Op::Neg:
      return "-";
    case Op::Add:
      return "+";
    case Op::Sub:
      return "-";
    case Op::Mul:
      return "*";
    case Op::Div:
      return "/";
    case Op::Mod:
      return "%";
    case Op::Eq:
      return "==";
    case Op::Ne:
      return "!=";
    case Op::Lt:
      return "<";
    case Op::Le:
      return "<=";
    case Op::Gt:
      return ">";
    case Op::Ge:
      return ">=";
    case Op::And:
      return "&&";
    case Op::Or:
      return "||";
    default:
      return "?";
  }
}

Value checked(std::int64_t r, IntRange range, const Expr& e) {
  if (r < range.lo || r > range.hi) {
    throw ModelRangeFault("value " + std::to_string(r) + " of '" +
                          to_string(e) + "' outside " +
                          std::to_string(range.lo) + ".." +
                          std::to_string(range.hi));
  }
  return Value::integer(static_cast<std::int32_t>(r));
}

std::int64_t want_int(const Value& v, const Expr& e) {
  if (v.kind != Value::Kind::Int) {
    throw WellFormednessFault("integer expected in '" + to_string(e) +
                              "', got " + v.str());
  }
  return v.v;
}

bool want_bool(const Value& v, const Expr& e) {
  if (v.kind != Value::Kind::Bool) {
    throw WellFormednessFault("boolean expected in '" + to_string(e) +
                              "', got " + v.str());
  }
  return v.as_bool();
}

}  // namespace

ExprPtr lit(Value v) {
  Expr e;
  e.op = Op::Lit;
  e.lit = v;
  return make(std::move(e));
}
ExprPtr int_lit(std::int32_t i) { return lit(Value::integer(i)); }
ExprPtr bool_lit(bool b) { return lit(Value::boolean(b)); }
ExprPtr id_lit(Sym s) { return lit(Value::id(s)); }
ExprPtr null_lit() { return lit(Value::null()); }

ExprPtr var(Sym s) {
  Expr e;
  e.op = Op::Var;
  e.var = s;
  return make(std::move(e));
}
ExprPtr var(std::string_view name) { return var(intern(name)); }

ExprPtr unary(Op op, ExprPtr a) {
  Expr e;
  e.op = op;
  e.lhs = std::move(a);
  return make(std::move(e));
}

ExprPtr binary(Op op, ExprPtr a, ExprPtr b) {
  Expr e;
  e.op = op;
  e.lhs = std::move(a);
  e.rhs = std::move(b);
  return make(std::move(e));
}

bool equal(const Expr& a, const Expr& b) {
  if (&a == &b) return true;
  if (a.hash != b.hash || a.op != b.op) return false;
  switch (a.op) {
    case Op::Lit:
      return a.lit == b.lit;
    case Op::Var:
      return a.var == b.var;
    default:
      break;
  }
  if ((a.lhs == nullptr) != (b.lhs == nullptr)) return false;
  if ((a.rhs == nullptr) != (b.rhs == nullptr)) return false;
  if (a.lhs && !equal(*a.lhs, *b.lhs)) return false;
  if (a.rhs && !equal(*a.rhs, *b.rhs)) return false;
  return true;
}

std::string to_string(const Expr& e) {
  switch (e.op) {
    case Op::Lit:
      return e.lit.str();
    case Op::Var:
      return sym_name(e.var);
    case Op::Not:
    case Op::Neg:
      return std::string(op_text(e.op)) + to_string(*e.lhs);
    default:
      return "(" + to_string(*e.lhs) + " " + op_text(e.op) + " " +
             to_string(*e.rhs) + ")";
  }
}

Value eval(const Expr& e, const Lookup& lookup, IntRange range) {
  switch (e.op) {
    case Op::Lit:
      if (e.lit.kind == Value::Kind::Int) return checked(e.lit.v, range, e);
      return e.lit;
    case Op::Var: {
      auto v = lookup(e.var);
      if (!v) throw WellFormednessFault("unbound variable " + sym_name(e.var));
      return *v;
    }
    case Op::Not:
      return Value::boolean(!want_bool(eval(*e.lhs, lookup, range), e));
    case Op::Neg:
      return checked(-want_int(eval(*e.lhs, lookup, range), e), range, e);
    case Op::And:
      // short-circuit so guards like (x != null && ...) are usable
      if (!want_bool(eval(*e.lhs, lookup, range), e)) return Value::boolean(false);
      return Value::boolean(want_bool(eval(*e.rhs, lookup, range), e));
    case Op::Or:
      if (want_bool(eval(*e.lhs, lookup, range), e)) return Value::boolean(true);
      return Value::boolean(want_bool(eval(*e.rhs, lookup, range), e));
    case Op::Eq:
      return Value::boolean(eval(*e.lhs, lookup, range) ==
                            eval(*e.rhs, lookup, range));
    case Op::Ne:
      return Value::boolean(eval(*e.lhs, lookup, range) !=
                            eval(*e.rhs, lookup, range));
    default:
      break;
  }
  const std::int64_t a = want_int(eval(*e.lhs, lookup, range), e);
  const std::int64_t b = want_int(eval(*e.rhs, lookup, range), e);
  switch (e.op) {
    case Op::Add:
      return checked(a + b, range, e);
    case Op::Sub:
      return checked(a - b, range, e);
    case Op::Mul:
      return checked(a * b, range, e);
    case Op::Div:
      if (b == 0) throw ModelRangeFault("division by zero in " + to_string(e));
      return checked(a / b, range, e);
    case Op::Mod:
      if (b == 0) throw ModelRangeFault("division by zero in " + to_string(e));
      return checked(a % b, range, e);
    case Op::Lt:
      return Value::boolean(a < b);
    case Op::Le:
      return Value::boolean(a <= b);
    case Op::Gt:
      return Value::boolean(a > b);
    case Op::Ge:
      return Value::boolean(a >= b);
    default:
      throw WellFormednessFault("bad operator in " + to_string(e));
  }
}

Value eval(const Expr& e, const Store& store, IntRange range) {
  return eval(
      e, [&store](Sym s) { return store.get(s); }, range);
}

}  // namespace scj2::kernel
