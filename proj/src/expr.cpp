#include "defimc/expr.hpp"

namespace defimc {

ExprPtr Expr::num(Int v) {
  auto e = std::make_shared<Expr>();
  e->op = Op::Num;
  e->value = v;
  return e;
}

ExprPtr Expr::cell_ref(CellId id) {
  auto e = std::make_shared<Expr>();
  e->op = Op::Cell;
  e->cell = id;
  return e;
}

ExprPtr Expr::sum_ref(ArrayId id) {
  auto e = std::make_shared<Expr>();
  e->op = Op::Sum;
  e->array = id;
  return e;
}

ExprPtr Expr::binary(Op op, ExprPtr l, ExprPtr r) {
  auto e = std::make_shared<Expr>();
  e->op = op;
  e->lhs = std::move(l);
  e->rhs = std::move(r);
  return e;
}

ExprPtr Expr::negate(ExprPtr x) {
  auto e = std::make_shared<Expr>();
  e->op = Op::Not;
  e->lhs = std::move(x);
  return e;
}

Int eval_expr(const Expr& e, const Store& s) {
  switch (e.op) {
    case Expr::Op::Num: return e.value;
    case Expr::Op::Cell: return s.get(e.cell);
    case Expr::Op::Sum: return s.sum(e.array);
    case Expr::Op::Not: return eval_expr(*e.lhs, s) == 0 ? 1 : 0;
    default: break;
  }
  // Short-circuit the connectives before touching the right operand.
  if (e.op == Expr::Op::And) return eval_pred(*e.lhs, s) && eval_pred(*e.rhs, s) ? 1 : 0;
  if (e.op == Expr::Op::Or) return eval_pred(*e.lhs, s) || eval_pred(*e.rhs, s) ? 1 : 0;
  Int l = eval_expr(*e.lhs, s);
  Int r = eval_expr(*e.rhs, s);
  switch (e.op) {
    case Expr::Op::Add: return l + r;
    case Expr::Op::Sub: return l - r;
    case Expr::Op::Mul: return l * r;
    case Expr::Op::Div:
      if (r == 0) throw ConfigError("division by zero in property expression");
      return l / r;
    case Expr::Op::Eq: return l == r;
    case Expr::Op::Ne: return l != r;
    case Expr::Op::Lt: return l < r;
    case Expr::Op::Le: return l <= r;
    case Expr::Op::Gt: return l > r;
    case Expr::Op::Ge: return l >= r;
    default: throw ConfigError("bad expression node");
  }
}

}  // namespace defimc
