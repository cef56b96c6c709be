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
#include "cohort/fusion.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>

#include "cohort/error.hpp"
#include "cohort/random.hpp"

namespace cohort {

namespace {

std::vector<std::string> SortedUnique(std::span<const std::string> ids) {
  std::vector<std::string> out(ids.begin(), ids.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

FeatureVector MakeFeatureVector(std::string_view figure, std::span<const Feature> features,
                                const DescriptionStore &store) {
  FeatureVector v;
  v.figure = std::string(figure);
  v.values.assign(features.size(), 0.0);
  if (store.CountFor(figure) == 0) {
    v.zero_descriptions = true;
    return v;
  }
  for (std::size_t i = 0; i < features.size(); ++i) v.values[i] = *Frequency(features[i], figure, store);
  return v;
}

void TrainConfig::Validate() const {
  auto bad = [](const std::string &msg) { return Error(ErrorCode::kInvalidArgument, "train config: " + msg); };
  if (!(neg_ratio >= 0.0) || !std::isfinite(neg_ratio)) throw bad("neg_ratio must be finite and >= 0");
  if (epochs == 0) throw bad("epochs must be >= 1");
  if (!(lr > 0.0) || !std::isfinite(lr)) throw bad("lr must be finite and > 0");
  if (!std::isfinite(positive_target) || !std::isfinite(negative_target)) throw bad("targets must be finite");
}

TrainConfig TrainConfig::FromJson(const Json &j, const TrainConfig &defaults) {
  TrainConfig c = defaults;
  if (j.is_null()) return c;
  try {
    c.neg_ratio = j.value("neg_ratio", c.neg_ratio);
    c.epochs = j.value("epochs", c.epochs);
    c.lr = j.value("lr", c.lr);
    c.seed = j.value("seed", c.seed);
    c.positive_target = j.value("positive_target", c.positive_target);
    c.negative_target = j.value("negative_target", c.negative_target);
    c.tail_averaging = j.value("tail_averaging", c.tail_averaging);
    c.reliable_negatives = j.value("reliable_negatives", c.reliable_negatives);
  } catch (const Json::exception &e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("train config: ") + e.what());
  }
  c.Validate();
  return c;
}

TrainConfig TrainConfig::FromJson(const Json &j) { return FromJson(j, TrainConfig{}); }

OrderedJson TrainConfig::ToJson() const {
  return OrderedJson{{"neg_ratio", neg_ratio},
                     {"epochs", epochs},
                     {"lr", lr},
                     {"seed", seed},
                     {"positive_target", positive_target},
                     {"negative_target", negative_target},
                     {"tail_averaging", tail_averaging},
                     {"reliable_negatives", reliable_negatives}};
}

LinearFit FitLinearSgd(std::span<const std::vector<double>> x, std::span<const double> y, std::size_t epochs,
                       double lr, std::uint64_t seed, bool tail_averaging) {
  if (x.size() != y.size()) throw Error(ErrorCode::kDimensionMismatch, "one target per sample required");
  const std::size_t dim = x.empty() ? 0 : x.front().size();
  for (const auto &row : x) {
    if (row.size() != dim) throw Error(ErrorCode::kDimensionMismatch, "ragged design matrix");
  }
  LinearFit fit;
  fit.weights.assign(dim, 0.0);
  if (x.empty()) return fit;

  Rng rng(seed);
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> w(dim, 0.0);
  std::vector<double> avg(dim, 0.0);
  std::size_t averaged = 0;
  const std::size_t avg_from = epochs / 2;
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    rng.Shuffle(std::span<std::size_t>(order));
    for (std::size_t s : order) {
      const double err = Dot(w, x[s]) - y[s];
      for (std::size_t i = 0; i < dim; ++i) w[i] -= lr * err * x[s][i];
      if (tail_averaging && epoch >= avg_from) {
        ++averaged;
        const double inv = 1.0 / static_cast<double>(averaged);
        for (std::size_t i = 0; i < dim; ++i) avg[i] += (w[i] - avg[i]) * inv;
      }
    }
    const auto &current = (tail_averaging && averaged > 0) ? avg : w;
    double loss = 0.0;
    for (std::size_t s = 0; s < x.size(); ++s) {
      const double err = Dot(current, x[s]) - y[s];
      loss += err * err;
    }
    fit.loss_trace.push_back(loss / static_cast<double>(x.size()));
  }
  fit.weights = tail_averaging ? avg : w;
  return fit;
}

std::vector<Feature> ResolveGroup(const FeatureGroup &group, std::span<const Feature> candidates) {
  std::vector<Feature> out;
  for (const auto &id : group.features) {
    auto it = std::find_if(candidates.begin(), candidates.end(), [&](const Feature &f) { return f.id() == id; });
    out.push_back(it != candidates.end() ? *it : ParseFeature(id));
  }
  return out;
}

Concept TrainConcept(const FeatureGroup &group, std::vector<Feature> features, std::span<const std::string> positives,
                     std::span<const std::string> scope, const DescriptionStore &store, const TrainConfig &config) {
  config.Validate();
  if (features.size() != group.features.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "feature list does not match the group");
  }
  const auto scope_ids = SortedUnique(scope);
  const auto pos = SortedUnique(positives);
  if (pos.size() < 2) {
    throw Error(ErrorCode::kTooFewPositives,
                "training needs at least 2 positive figures, got " + std::to_string(pos.size()));
  }
  std::vector<std::string> complement;
  std::set_difference(scope_ids.begin(), scope_ids.end(), pos.begin(), pos.end(), std::back_inserter(complement));
  if (complement.size() + pos.size() != scope_ids.size()) {
    throw Error(ErrorCode::kInvalidArgument, "positives must be a subset of the scope");
  }

  Concept c;
  c.group = group;
  c.features = std::move(features);
  c.meta.config = config;
  c.meta.positives = pos.size();
  c.meta.empty_scope_complement = complement.empty();

  std::map<std::string, std::vector<double>> vectors;
  auto vec = [&](const std::string &fig) -> const std::vector<double> & {
    auto it = vectors.find(fig);
    if (it == vectors.end()) it = vectors.emplace(fig, MakeFeatureVector(fig, c.features, store).values).first;
    return it->second;
  };

  const auto wanted = static_cast<std::size_t>(std::floor(config.neg_ratio * static_cast<double>(pos.size())));
  Rng sampler(StreamSeed(config.seed, "negatives"));
  auto draw = [&](const std::vector<std::string> &pool) {
    std::vector<std::string> out;
    for (std::size_t i : sampler.SampleWithoutReplacement(pool.size(), std::min(wanted, pool.size()))) {
      out.push_back(pool[i]);
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  auto fit = [&](const std::vector<std::string> &negatives) {
    std::vector<std::vector<double>> x;
    std::vector<double> y;
    for (const auto &f : pos) {
      x.push_back(vec(f));
      y.push_back(config.positive_target);
    }
    for (const auto &f : negatives) {
      x.push_back(vec(f));
      y.push_back(config.negative_target);
    }
    return FitLinearSgd(x, y, config.epochs, config.lr, StreamSeed(config.seed, "sgd"), config.tail_averaging);
  };

  auto negatives = draw(complement);
  LinearFit result = fit(negatives);
  if (config.reliable_negatives && !complement.empty()) {
    std::vector<std::string> reliable;
    for (const auto &f : complement) {
      if (StatusForScore(CohortScore(result.weights, vec(f))) == Status::kExcluded) reliable.push_back(f);
    }
    negatives = draw(reliable);
    result = fit(negatives);
  }
  c.meta.negatives = negatives.size();
  c.weights = std::move(result.weights);
  c.meta.loss_trace = std::move(result.loss_trace);
  return c;
}

double CohortScore(std::span<const double> weights, std::span<const double> values) {
  if (weights.size() != values.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "concept has " + std::to_string(weights.size()) +
                                                   " weights but the vector has " + std::to_string(values.size()) +
                                                   " values");
  }
  return Dot(weights, values);
}

double CohortScore(const Concept &model, const FeatureVector &vector) {
  return CohortScore(model.weights, vector.values);
}

std::string_view StatusName(Status s) {
  switch (s) {
    case Status::kIncluded:
      return "included";
    case Status::kCandidate:
      return "candidate";
    case Status::kExcluded:
      return "excluded";
  }
  return "excluded";
}

std::string_view OriginName(Origin o) { return o == Origin::kManual ? "manual" : "model"; }

Status StatusFromName(std::string_view name) {
  if (name == "included") return Status::kIncluded;
  if (name == "candidate") return Status::kCandidate;
  if (name == "excluded") return Status::kExcluded;
  throw Error(ErrorCode::kInvalidArgument, "unknown status '" + std::string(name) + "'");
}

Origin OriginFromName(std::string_view name) {
  if (name == "model") return Origin::kModel;
  if (name == "manual") return Origin::kManual;
  throw Error(ErrorCode::kInvalidArgument, "unknown origin '" + std::string(name) + "'");
}

Status StatusForScore(double score, const Thresholds &t) {
  if (score > t.include) return Status::kIncluded;
  if (score > t.candidate) return Status::kCandidate;
  return Status::kExcluded;
}

CohortAssignment Classify(const Concept &model, std::span<const std::string> scope, const DescriptionStore &store,
                          const Thresholds &t) {
  CohortAssignment out;
  for (const auto &fig : SortedUnique(scope)) {
    const auto v = MakeFeatureVector(fig, model.features, store);
    FigureAssignment a;
    a.figure = fig;
    a.score = CohortScore(model, v);
    a.status = v.zero_descriptions ? Status::kExcluded : StatusForScore(a.score, t);
    a.zero_descriptions = v.zero_descriptions;
    out.push_back(std::move(a));
  }
  return out;
}

void Rescore(const Concept &model, CohortAssignment &assignment, const DescriptionStore &store,
             const Thresholds &t) {
  for (auto &a : assignment) {
    const auto v = MakeFeatureVector(a.figure, model.features, store);
    a.score = CohortScore(model, v);
    a.zero_descriptions = v.zero_descriptions;
    if (a.origin == Origin::kModel) a.status = v.zero_descriptions ? Status::kExcluded : StatusForScore(a.score, t);
  }
}

std::string FormatDouble(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double ParseDouble(std::string_view text) {
  double v = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw Error(ErrorCode::kInvalidArgument, "not a number: '" + std::string(text) + "'");
  }
  return v;
}

OrderedJson Concept::ToJson() const {
  OrderedJson j;
  j["group"] = group.ToJson();
  j["features"] = OrderedJson::array();
  for (std::size_t i = 0; i < features.size(); ++i) {
    j["features"].push_back(OrderedJson{
        {"id", features[i].id()}, {"kind", FeatureKindName(features[i].kind())}, {"weight", FormatDouble(weights[i])}});
  }
  OrderedJson meta;
  meta["config"] = this->meta.config.ToJson();
  meta["positives"] = this->meta.positives;
  meta["negatives"] = this->meta.negatives;
  meta["empty_scope_complement"] = this->meta.empty_scope_complement;
  meta["retrain_needed"] = this->meta.retrain_needed;
  meta["loss_trace"] = this->meta.loss_trace;
  j["training"] = std::move(meta);
  return j;
}

Concept Concept::FromJson(const Json &j) {
  Concept c;
  c.group = FeatureGroup::FromJson(j.at("group"));
  for (const auto &f : j.at("features")) {
    c.features.push_back(ParseFeature(f.at("id").get<std::string>()));
    c.weights.push_back(ParseDouble(f.at("weight").get<std::string>()));
  }
  const auto &meta = j.at("training");
  c.meta.config = TrainConfig::FromJson(meta.at("config"));
  c.meta.positives = meta.at("positives").get<std::size_t>();
  c.meta.negatives = meta.at("negatives").get<std::size_t>();
  c.meta.empty_scope_complement = meta.at("empty_scope_complement").get<bool>();
  c.meta.retrain_needed = meta.at("retrain_needed").get<bool>();
  c.meta.loss_trace = meta.at("loss_trace").get<std::vector<double>>();
  return c;
}

}  // namespace cohort
