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
#ifndef COHORT_FEATURE_HPP_
#define COHORT_FEATURE_HPP_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cohort/walker.hpp"

namespace cohort {

enum class FeatureKind {
  kTimeRange,
  kLocation,
  kAffiliation,
  kRelationship,
  kCelebrity,
  kEntity,
  kComposite,
};

std::string_view FeatureKindName(FeatureKind kind);
std::optional<FeatureKind> AtomicKindFromName(std::string_view name);

// One atomic feature. TimeRange uses [lo, hi]; every other kind uses `ref`
// (a node id, or an edge type name for Relationship).
struct Atom {
  FeatureKind kind = FeatureKind::kLocation;
  std::string ref;
  std::int64_t lo = 0;
  std::int64_t hi = 0;

  static Atom TimeRange(std::int64_t lo, std::int64_t hi) { return {FeatureKind::kTimeRange, {}, lo, hi}; }
  static Atom Of(FeatureKind kind, std::string ref) { return {kind, std::move(ref), 0, 0}; }

  // Canonical text: Kind(args) with reserved characters escaped.
  std::string ToText() const;
  bool SamePayload(const Atom &other) const;

  auto operator<=>(const Atom &) const = default;
};

// Atomic or composite (AND of 2-3 atomics) feature. The id is the canonical
// text, so equality is syntactic.
class Feature {
 public:
  Feature() = default;
  static Feature Atomic(Atom atom);
  // Parts are sorted by canonical text. Throws Error(kInvalidArgument) unless
  // there are 2-3 parts with distinct payloads, none composite.
  static Feature Composite(std::vector<Atom> parts);

  const std::string &id() const { return id_; }
  FeatureKind kind() const { return parts_.size() > 1 ? FeatureKind::kComposite : parts_.front().kind; }
  bool is_composite() const { return parts_.size() > 1; }
  std::span<const Atom> parts() const { return parts_; }

  bool operator==(const Feature &other) const { return id_ == other.id_; }

  // Figures (sorted ids) of the extraction scope with at least one matching
  // description.
  std::vector<std::string> support;

 private:
  std::vector<Atom> parts_;
  std::string id_;
};

// Atom at text[pos...]; advances pos past it. Whitespace inside the
// parentheses around arguments is ignored. Throws Error(kParseError) with the
// byte offset and the expected-token set.
Atom ParseAtomAt(std::string_view text, std::size_t &pos);

// Canonical feature text: `Kind(args)` or `[a & b]` / `[a & b & c]`.
Feature ParseFeature(std::string_view text);

// Escapes reserved argument characters (\ , ( ) [ ] & | !) and edge spaces.
std::string EscapeArg(std::string_view arg);

enum class CompositeSemantics {
  kPerDescription,  // all parts inside one description
  kPerFigure,       // each part anywhere among the figure's descriptions
};

bool Matches(const Atom &atom, const Description &d);
bool Matches(const Feature &feature, const Description &d);

// N_f / N_d for one figure; nullopt when the figure has no descriptions.
std::optional<double> Frequency(const Feature &feature, std::string_view figure, const DescriptionStore &store,
                                CompositeSemantics semantics = CompositeSemantics::kPerDescription);

// Figures with frequency > 0, sorted.
std::vector<std::string> SupportOf(const Feature &feature, std::span<const std::string> figures,
                                   const DescriptionStore &store,
                                   CompositeSemantics semantics = CompositeSemantics::kPerDescription);

}  // namespace cohort

#endif  // COHORT_FEATURE_HPP_
