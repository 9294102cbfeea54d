#pragma once

#include <string>

#include "defimc/checker.hpp"

namespace defimc {

/// Syntax or name-resolution failure, with position and a suggestion for
/// near-miss identifiers.
struct PropertyParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parses one formula against the store schema. Accepted shapes:
///   G <pred>
///   G (<pred> -> F <pred>)
///   G (<event> -> G <pred>)
///   max <expr> | min <expr>
/// Predicates range over cells, sum(<array>), integer literals,
/// comparisons, && || !, and + - * /.
PropertySpec parse_property(const std::string& name, const std::string& text,
                            const StoreSchema& schema);

/// Expression-only entry point (used by the extremum CLI).
ExprPtr parse_expression(const std::string& text, const StoreSchema& schema);

}  // namespace defimc
