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
#ifndef COHORT_ANALYTICS_HPP_
#define COHORT_ANALYTICS_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cohort/feature.hpp"
#include "cohort/graph.hpp"
#include "cohort/walker.hpp"

namespace cohort {

enum class EventCategory { kPolitics, kAcademic, kReligion, kSociality, kMilitary };

inline constexpr std::array<EventCategory, 5> kEventCategories = {
    EventCategory::kPolitics, EventCategory::kAcademic, EventCategory::kReligion, EventCategory::kSociality,
    EventCategory::kMilitary};

std::string_view CategoryName(EventCategory c);
std::optional<EventCategory> CategoryFromName(std::string_view name);

struct EventRecord {
  std::string event;  // event node id
  std::string figure;
  EventCategory category = EventCategory::kSociality;
  std::optional<std::int64_t> year;
  std::optional<std::string> location;  // location-role node id
  std::vector<std::string> co_figures;  // other figures on the event, sorted
  std::string label;
};

struct DerivedEvents {
  std::vector<EventRecord> records;  // by figure, then event id
  std::size_t unmapped = 0;          // records whose edge type had no category
};

// One record per (figure, adjacent event node). The category comes from the
// schema's edge-type table; the location is an adjacent location node or the
// location of an adjacent office.
DerivedEvents DeriveEvents(const KnowledgeGraph &graph, const SchemaMapping &schema,
                           std::span<const std::string> figures);

struct EventRanking {
  std::size_t total = 0;
  std::vector<std::pair<EventCategory, std::size_t>> top3;  // nonzero, count desc then name
};

EventRanking RankEvents(std::string_view figure, std::span<const EventRecord> events);
EventRanking RankCounts(const std::array<std::size_t, 5> &counts);

struct RelationshipMatrix {
  std::vector<std::string> figures;         // display order
  std::vector<std::vector<std::size_t>> cells;  // shared events, in display order
  std::vector<std::size_t> community;       // per displayed figure
  std::size_t communities = 0;
};

// Cells count events whose participants include both figures. Rows are
// grouped by Girvan-Newman community (communities in order of their earliest
// input figure); inside a community by total cell mass, then input order.
RelationshipMatrix BuildRelationshipMatrix(std::span<const std::string> figures, std::span<const EventRecord> events);

struct MapBin {
  std::string location;
  std::optional<double> lat;
  std::optional<double> lon;
  std::size_t count = 0;
};

// Distinct events per location, count descending then id.
std::vector<MapBin> EventMap(const KnowledgeGraph &graph, std::span<const EventRecord> events);

inline constexpr std::size_t kTimelineSamples = 20;

struct TimelineBin {
  std::int64_t year = 0;
  std::size_t count = 0;
  std::vector<std::string> samples;  // up to kTimelineSamples labels
};

// Distinct events per year, ascending.
std::vector<TimelineBin> EventTimeline(std::span<const EventRecord> events);

// Events of one figure, optionally filtered, ordered by year (undated last).
std::vector<EventRecord> FigureHistory(std::string_view figure, std::span<const EventRecord> events,
                                       std::optional<EventCategory> category = std::nullopt);

OrderedJson EventToJson(const EventRecord &e);
OrderedJson RankingToJson(const EventRanking &r);
OrderedJson MatrixToJson(const RelationshipMatrix &m);
OrderedJson MapToJson(std::span<const MapBin> bins);
OrderedJson TimelineToJson(std::span<const TimelineBin> bins);

// Attributes, matched features (frequency descending), event summary,
// relationship list and opaque source URLs (attributes named source_url*).
OrderedJson FigureDetails(const KnowledgeGraph &graph, const SchemaMapping &schema, const DescriptionStore &store,
                          std::string_view figure, std::span<const Feature> features);

}  // namespace cohort

#endif  // COHORT_ANALYTICS_HPP_
