#pragma once

#include <memory>

#include "defimc/store.hpp"

namespace defimc {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Integer expression over store cells: literals, cell reads, sum() over
/// a named array, arithmetic, comparisons and boolean connectives
/// (booleans are 0/1).
struct Expr {
  enum class Op {
    Num, Cell, Sum,
    Add, Sub, Mul, Div,
    Eq, Ne, Lt, Le, Gt, Ge,
    And, Or, Not,
  };

  Op op = Op::Num;
  Int value = 0;      // Num
  CellId cell;        // Cell
  ArrayId array;      // Sum
  ExprPtr lhs, rhs;   // binary ops; Not uses lhs only

  static ExprPtr num(Int v);
  static ExprPtr cell_ref(CellId id);
  static ExprPtr sum_ref(ArrayId id);
  static ExprPtr binary(Op op, ExprPtr l, ExprPtr r);
  static ExprPtr negate(ExprPtr e);
};

Int eval_expr(const Expr& e, const Store& s);
inline bool eval_pred(const Expr& e, const Store& s) { return eval_expr(e, s) != 0; }

}  // namespace defimc
