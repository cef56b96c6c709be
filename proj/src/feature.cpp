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
#include "cohort/feature.hpp"

#include <algorithm>
#include <charconv>

#include "cohort/error.hpp"

namespace cohort {

namespace {

constexpr std::string_view kReserved = "\\,()[]&|!";

const std::vector<std::string> &KindNames() {
  static const std::vector<std::string> names = {"Affiliation", "Celebrity", "Entity",
                                                 "Location",    "Relationship", "TimeRange"};
  return names;
}

bool IsSpace(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

Error ParseFailure(std::size_t offset, std::vector<std::string> expected, const std::string &what) {
  std::string msg = what + " at offset " + std::to_string(offset) + "; expected ";
  for (std::size_t i = 0; i < expected.size(); ++i) msg += (i ? ", " : "") + expected[i];
  return Error(ErrorCode::kParseError, msg).WithPosition(offset).WithExpected(std::move(expected));
}

struct RawArg {
  std::string value;
  std::size_t offset;  // first byte of the argument
};

// Reads args up to and including the closing ')'.
std::vector<RawArg> ReadArgs(std::string_view text, std::size_t &pos) {
  std::vector<RawArg> args;
  for (;;) {
    while (pos < text.size() && IsSpace(text[pos])) ++pos;
    RawArg arg{{}, pos};
    std::size_t keep = 0;  // length of value up to the last significant char
    for (;;) {
      if (pos >= text.size()) throw ParseFailure(pos, {"\",\"", "\")\""}, "unterminated argument list");
      const char c = text[pos];
      if (c == '\\') {
        if (pos + 1 >= text.size()) throw ParseFailure(pos + 1, {"escaped character"}, "dangling escape");
        arg.value += text[pos + 1];
        keep = arg.value.size();
        pos += 2;
        continue;
      }
      if (c == ',' || c == ')') break;
      if (kReserved.find(c) != std::string_view::npos) {
        throw ParseFailure(pos, {"argument character", "\",\"", "\")\""}, "unexpected '" + std::string(1, c) + "'");
      }
      arg.value += c;
      if (!IsSpace(c)) keep = arg.value.size();
      ++pos;
    }
    arg.value.resize(keep);
    if (arg.value.empty()) throw ParseFailure(pos, {"argument"}, "empty argument");
    args.push_back(std::move(arg));
    if (text[pos++] == ')') return args;
  }
}

std::int64_t ParseYear(const RawArg &arg) {
  std::int64_t v = 0;
  const char *first = arg.value.data();
  const char *last = first + arg.value.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw ParseFailure(arg.offset, {"integer year"}, "bad year");
  return v;
}

bool AtomMatchesTokens(const Atom &a, const DescriptionTokens &t) {
  auto has = [&a](const std::vector<std::string> &v) { return std::find(v.begin(), v.end(), a.ref) != v.end(); };
  switch (a.kind) {
    case FeatureKind::kTimeRange:
      return std::any_of(t.years.begin(), t.years.end(), [&](std::int64_t y) { return y >= a.lo && y <= a.hi; });
    case FeatureKind::kLocation:
      return has(t.locations);
    case FeatureKind::kAffiliation:
      return has(t.offices);
    case FeatureKind::kCelebrity:
      return has(t.co_figures);
    case FeatureKind::kEntity:
      return has(t.entities);
    case FeatureKind::kRelationship:
      return std::any_of(t.relationships.begin(), t.relationships.end(),
                         [&](const RelationToken &r) { return r.type == a.ref; });
    case FeatureKind::kComposite:
      break;
  }
  return false;
}

}  // namespace

std::string_view FeatureKindName(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::kTimeRange:
      return "TimeRange";
    case FeatureKind::kLocation:
      return "Location";
    case FeatureKind::kAffiliation:
      return "Affiliation";
    case FeatureKind::kRelationship:
      return "Relationship";
    case FeatureKind::kCelebrity:
      return "Celebrity";
    case FeatureKind::kEntity:
      return "Entity";
    case FeatureKind::kComposite:
      return "Composite";
  }
  return "Composite";
}

std::optional<FeatureKind> AtomicKindFromName(std::string_view name) {
  for (auto k : {FeatureKind::kTimeRange, FeatureKind::kLocation, FeatureKind::kAffiliation,
                 FeatureKind::kRelationship, FeatureKind::kCelebrity, FeatureKind::kEntity}) {
    if (FeatureKindName(k) == name) return k;
  }
  return std::nullopt;
}

std::string EscapeArg(std::string_view arg) {
  std::string out;
  for (std::size_t i = 0; i < arg.size(); ++i) {
    const char c = arg[i];
    const bool edge_space = IsSpace(c) && (i == 0 || i + 1 == arg.size());
    if (kReserved.find(c) != std::string_view::npos || edge_space) out += '\\';
    out += c;
  }
  return out;
}

std::string Atom::ToText() const {
  std::string out(FeatureKindName(kind));
  out += '(';
  if (kind == FeatureKind::kTimeRange) {
    out += std::to_string(lo) + "," + std::to_string(hi);
  } else {
    out += EscapeArg(ref);
  }
  out += ')';
  return out;
}

bool Atom::SamePayload(const Atom &other) const {
  if (kind == FeatureKind::kTimeRange || other.kind == FeatureKind::kTimeRange) {
    return kind == other.kind && lo == other.lo && hi == other.hi;
  }
  return ref == other.ref;
}

Feature Feature::Atomic(Atom atom) {
  if (atom.kind == FeatureKind::kComposite) throw Error(ErrorCode::kInvalidArgument, "atom cannot be composite");
  Feature f;
  f.id_ = atom.ToText();
  f.parts_.push_back(std::move(atom));
  return f;
}

Feature Feature::Composite(std::vector<Atom> parts) {
  if (parts.size() < 2 || parts.size() > 3) {
    throw Error(ErrorCode::kInvalidArgument, "composite features combine 2-3 atomic features");
  }
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].kind == FeatureKind::kComposite) throw Error(ErrorCode::kInvalidArgument, "nested composite");
    for (std::size_t j = 0; j < i; ++j) {
      if (parts[i].SamePayload(parts[j])) {
        throw Error(ErrorCode::kInvalidArgument, "composite parts must have distinct payloads");
      }
    }
  }
  std::vector<std::pair<std::string, Atom>> keyed;
  for (auto &p : parts) keyed.emplace_back(p.ToText(), std::move(p));
  std::sort(keyed.begin(), keyed.end(), [](const auto &a, const auto &b) { return a.first < b.first; });
  Feature f;
  f.id_ = "[";
  for (std::size_t i = 0; i < keyed.size(); ++i) {
    if (i) f.id_ += " & ";
    f.id_ += keyed[i].first;
    f.parts_.push_back(std::move(keyed[i].second));
  }
  f.id_ += "]";
  return f;
}

Atom ParseAtomAt(std::string_view text, std::size_t &pos) {
  const std::size_t start = pos;
  while (pos < text.size() && ((text[pos] >= 'A' && text[pos] <= 'Z') || (text[pos] >= 'a' && text[pos] <= 'z'))) {
    ++pos;
  }
  const auto kind = AtomicKindFromName(text.substr(start, pos - start));
  if (!kind) {
    pos = start;
    throw ParseFailure(start, KindNames(), start < text.size() ? "unknown feature kind" : "unexpected end of input");
  }
  if (pos >= text.size() || text[pos] != '(') throw ParseFailure(pos, {"\"(\""}, "missing argument list");
  ++pos;
  auto args = ReadArgs(text, pos);
  Atom atom;
  atom.kind = *kind;
  if (*kind == FeatureKind::kTimeRange) {
    if (args.size() > 2) throw ParseFailure(args[2].offset - 1, {"\")\""}, "TimeRange takes one or two years");
    atom.lo = ParseYear(args[0]);
    atom.hi = args.size() == 2 ? ParseYear(args[1]) : atom.lo;
    if (atom.hi < atom.lo) throw ParseFailure(args[1].offset, {"year >= " + std::to_string(atom.lo)}, "reversed range");
  } else {
    if (args.size() != 1) throw ParseFailure(args[1].offset - 1, {"\")\""}, "expected a single argument");
    atom.ref = std::move(args[0].value);
  }
  return atom;
}

Feature ParseFeature(std::string_view text) {
  std::size_t pos = 0;
  Feature f;
  if (!text.empty() && text[0] == '[') {
    ++pos;
    std::vector<Atom> parts;
    parts.push_back(ParseAtomAt(text, pos));
    while (pos < text.size() && text[pos] != ']') {
      if (text.substr(pos, 3) != " & ") throw ParseFailure(pos, {"\" & \"", "\"]\""}, "bad composite separator");
      pos += 3;
      parts.push_back(ParseAtomAt(text, pos));
    }
    if (pos >= text.size()) throw ParseFailure(pos, {"\"]\""}, "unterminated composite");
    ++pos;
    if (parts.size() < 2 || parts.size() > 3) {
      throw ParseFailure(pos - 1, {"2-3 atomic features"}, "bad composite arity");
    }
    try {
      f = Feature::Composite(std::move(parts));
    } catch (const Error &e) {
      throw ParseFailure(0, {"distinct composite parts"}, e.what());
    }
  } else {
    f = Feature::Atomic(ParseAtomAt(text, pos));
  }
  if (pos != text.size()) throw ParseFailure(pos, {"end of input"}, "trailing characters");
  return f;
}

bool Matches(const Atom &atom, const Description &d) { return AtomMatchesTokens(atom, d.tokens); }

bool Matches(const Feature &feature, const Description &d) {
  return std::all_of(feature.parts().begin(), feature.parts().end(),
                     [&](const Atom &a) { return AtomMatchesTokens(a, d.tokens); });
}

std::optional<double> Frequency(const Feature &feature, std::string_view figure, const DescriptionStore &store,
                                CompositeSemantics semantics) {
  const auto descs = store.For(figure);
  if (descs.empty()) return std::nullopt;
  const double nd = static_cast<double>(descs.size());
  auto count = [&](auto &&pred) {
    return static_cast<double>(std::count_if(descs.begin(), descs.end(), pred));
  };
  if (semantics == CompositeSemantics::kPerFigure && feature.is_composite()) {
    double best = 1.0;
    for (const Atom &a : feature.parts()) {
      best = std::min(best, count([&](const Description &d) { return Matches(a, d); }) / nd);
    }
    return best;
  }
  return count([&](const Description &d) { return Matches(feature, d); }) / nd;
}

std::vector<std::string> SupportOf(const Feature &feature, std::span<const std::string> figures,
                                   const DescriptionStore &store, CompositeSemantics semantics) {
  std::vector<std::string> out;
  for (const auto &fig : figures) {
    auto f = Frequency(feature, fig, store, semantics);
    if (f && *f > 0.0) out.push_back(fig);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace cohort
