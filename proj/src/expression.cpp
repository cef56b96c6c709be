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
#include "cohort/expression.hpp"

#include <algorithm>

#include "cohort/error.hpp"

namespace cohort {

Expr Expr::Leaf(Atom a) {
  Expr e;
  e.atom = std::move(a);
  return e;
}

Expr Expr::Not(Expr inner) {
  Expr e;
  e.op = Op::kNot;
  e.children.push_back(std::move(inner));
  return e;
}

Expr Expr::And(Expr l, Expr r) {
  Expr e;
  e.op = Op::kAnd;
  e.children.push_back(std::move(l));
  e.children.push_back(std::move(r));
  return e;
}

Expr Expr::Or(Expr l, Expr r) {
  Expr e;
  e.op = Op::kOr;
  e.children.push_back(std::move(l));
  e.children.push_back(std::move(r));
  return e;
}

namespace {

const std::vector<std::string> kTermStart = {"\"!\"",        "\"(\"",      "Affiliation", "Celebrity",
                                             "Entity",       "Location",   "Relationship", "TimeRange"};

Error Failure(std::size_t offset, std::vector<std::string> expected, const std::string &what) {
  std::string msg = what + " at offset " + std::to_string(offset) + "; expected ";
  for (std::size_t i = 0; i < expected.size(); ++i) msg += (i ? ", " : "") + expected[i];
  return Error(ErrorCode::kParseError, msg).WithPosition(offset).WithExpected(std::move(expected));
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr Parse() {
    SkipSpace();
    if (pos_ == text_.size()) throw Failure(pos_, kTermStart, "empty expression");
    Expr e = ParseOr();
    SkipSpace();
    if (pos_ != text_.size()) throw Failure(pos_, {"\"&\"", "\"|\"", "end of input"}, "unexpected character");
    return e;
  }

 private:
  void SkipSpace() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
                                   text_[pos_] == '\r')) {
      ++pos_;
    }
  }

  bool Accept(char c) {
    SkipSpace();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr ParseOr() {
    Expr e = ParseAnd();
    while (Accept('|')) e = Expr::Or(std::move(e), ParseAnd());
    return e;
  }

  Expr ParseAnd() {
    Expr e = ParseTerm();
    while (Accept('&')) e = Expr::And(std::move(e), ParseTerm());
    return e;
  }

  Expr ParseTerm() {
    SkipSpace();
    if (pos_ >= text_.size()) throw Failure(pos_, kTermStart, "unexpected end of input");
    if (Accept('!')) return Expr::Not(ParseTerm());
    if (Accept('(')) {
      Expr e = ParseOr();
      if (!Accept(')')) {
        throw Failure(pos_, {"\"&\"", "\"|\"", "\")\""}, pos_ < text_.size() ? "unexpected character" : "unclosed '('");
      }
      return e;
    }
    const char c = text_[pos_];
    if (!((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z'))) throw Failure(pos_, kTermStart, "expected a term");
    try {
      return Expr::Leaf(ParseAtomAt(text_, pos_));
    } catch (Error &e) {
      // An unknown kind is reported with the full term-start set.
      if (e.expected().size() == 6 && e.position() && *e.position() == pos_) {
        throw Failure(pos_, kTermStart, "unknown feature kind");
      }
      throw;
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

int Precedence(Expr::Op op) {
  switch (op) {
    case Expr::Op::kOr:
      return 1;
    case Expr::Op::kAnd:
      return 2;
    case Expr::Op::kNot:
      return 3;
    case Expr::Op::kAtom:
      return 4;
  }
  return 4;
}

void Print(const Expr &e, std::string &out) {
  auto child = [&](const Expr &c, bool parens) {
    if (parens) out += '(';
    Print(c, out);
    if (parens) out += ')';
  };
  switch (e.op) {
    case Expr::Op::kAtom:
      out += e.atom.ToText();
      return;
    case Expr::Op::kNot:
      out += '!';
      child(e.children[0], Precedence(e.children[0].op) < Precedence(Expr::Op::kNot));
      return;
    case Expr::Op::kAnd:
    case Expr::Op::kOr: {
      const int p = Precedence(e.op);
      child(e.children[0], Precedence(e.children[0].op) < p);
      out += e.op == Expr::Op::kAnd ? " & " : " | ";
      child(e.children[1], Precedence(e.children[1].op) <= p);
      return;
    }
  }
}

void Conjuncts(const Expr &e, std::vector<const Expr *> &out) {
  if (e.op == Expr::Op::kAnd) {
    Conjuncts(e.children[0], out);
    Conjuncts(e.children[1], out);
  } else {
    out.push_back(&e);
  }
}

}  // namespace

Expr ParseExpression(std::string_view text) { return Parser(text).Parse(); }

std::string PrintExpression(const Expr &e) {
  std::string out;
  Print(e, out);
  return out;
}

bool MatchesFigure(const Expr &e, std::string_view figure, const DescriptionStore &store) {
  switch (e.op) {
    case Expr::Op::kAtom: {
      const auto descs = store.For(figure);
      return std::any_of(descs.begin(), descs.end(), [&](const Description &d) { return Matches(e.atom, d); });
    }
    case Expr::Op::kNot:
      return !MatchesFigure(e.children[0], figure, store);
    case Expr::Op::kOr:
      return MatchesFigure(e.children[0], figure, store) || MatchesFigure(e.children[1], figure, store);
    case Expr::Op::kAnd: {
      std::vector<const Expr *> parts;
      Conjuncts(e, parts);
      std::vector<const Atom *> atoms;
      for (const Expr *p : parts) {
        if (p->op == Expr::Op::kAtom) {
          atoms.push_back(&p->atom);
        } else if (!MatchesFigure(*p, figure, store)) {
          return false;
        }
      }
      if (atoms.empty()) return true;
      const auto descs = store.For(figure);
      return std::any_of(descs.begin(), descs.end(), [&](const Description &d) {
        return std::all_of(atoms.begin(), atoms.end(), [&](const Atom *a) { return Matches(*a, d); });
      });
    }
  }
  return false;
}

}  // namespace cohort
