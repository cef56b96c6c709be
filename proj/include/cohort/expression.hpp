/**
 * Copyright 2026 The CohortKit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef COHORT_EXPRESSION_HPP_
#define COHORT_EXPRESSION_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "cohort/feature.hpp"
#include "cohort/walker.hpp"

namespace cohort {

// Boolean scope expression over atomic features.
//
//   expr := term (('&' | '|') term)*
//   term := Kind '(' args ')' | '(' expr ')' | '!' term
//
// '!' binds tighter than '&', which binds tighter than '|'; binary operators
// associate to the left.
struct Expr {
  enum class Op { kAtom, kNot, kAnd, kOr };

  Op op = Op::kAtom;
  Atom atom;                  // kAtom
  std::vector<Expr> children;  // one for kNot, two for kAnd / kOr

  static Expr Leaf(Atom a);
  static Expr Not(Expr e);
  static Expr And(Expr l, Expr r);
  static Expr Or(Expr l, Expr r);

  bool operator==(const Expr &) const = default;
};

// Throws Error(kParseError) with the byte offset and the expected-token set.
Expr ParseExpression(std::string_view text);

// Canonical text with the fewest parentheses that reparse to the same tree.
std::string PrintExpression(const Expr &e);

// Conjunctions of atoms must hold inside one description; '|' and '!' (and
// '&' over non-atomic operands) combine figure-level results.
bool MatchesFigure(const Expr &e, std::string_view figure, const DescriptionStore &store);

}  // namespace cohort

#endif  // COHORT_EXPRESSION_HPP_
