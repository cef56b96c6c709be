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
#include "cohort/api.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <optional>
#include <set>
#include <shared_mutex>
#include <sstream>
#include <thread>

#include "cohort/analytics.hpp"
#include "httplib.h"

namespace cohort {

namespace fs = std::filesystem;

LoadedCorpus LoadCorpus(const CorpusFiles &files, const WalkConfig &walk, std::uint64_t seed) {
  auto read_json = [](const std::string &path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
    try {
      return Json::parse(in);
    } catch (const Json::exception &e) {
      throw Error(ErrorCode::kParseError, path + ": " + e.what());
    }
  };
  SchemaMapping schema = SchemaMapping::FromJson(read_json(files.schema));
  std::ifstream in(files.corpus);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + files.corpus);
  const auto records = ReadRecords(in);
  IngestResult ingested = IngestGraph(schema, records);
  LoadedCorpus out{Corpus::Build(std::move(schema), std::move(ingested.graph), read_json(files.templates), walk, seed),
                   std::move(ingested.rejects), std::move(ingested.warnings)};
  if (!files.aliases.empty()) out.corpus.AddAliases(read_json(files.aliases));
  return out;
}

std::string_view ApiErrorCode(ErrorCode code) { return ErrorCodeName(code); }

int HttpStatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParseError:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kUnknownType:
    case ErrorCode::kIncompatibleStep:
    case ErrorCode::kSchemaViolation:
    case ErrorCode::kDimensionMismatch:
    case ErrorCode::kUnknownTable:
      return 400;
    case ErrorCode::kUnknownFigure:
    case ErrorCode::kUnknownIteration:
    case ErrorCode::kUnknownNode:
      return 404;
    case ErrorCode::kTooFewPositives:
    case ErrorCode::kInsufficientFeatures:
    case ErrorCode::kNotARedundantNeighbor:
    case ErrorCode::kEmptyScopeComplement:
    case ErrorCode::kZeroMarginal:
      return 409;
    case ErrorCode::kGraphTooLarge:
      return 422;
    default:
      return 500;
  }
}

HttpResponse ErrorResponse(int status, std::string_view code, std::string_view message, const Error *detail) {
  OrderedJson err{{"code", code}, {"message", message}};
  if (detail) {
    if (detail->stage()) err["stage"] = *detail->stage();
    if (detail->position()) err["offset"] = *detail->position();
    if (!detail->expected().empty()) err["expected"] = detail->expected();
  }
  return HttpResponse{status, OrderedJson{{"error", std::move(err)}}.dump()};
}

namespace {

HttpResponse FromError(const Error &e) { return ErrorResponse(HttpStatusFor(e.code()), ApiErrorCode(e.code()), e.what(), &e); }

HttpResponse JsonResponse(const OrderedJson &j, int status = 200) { return HttpResponse{status, j.dump()}; }

HttpResponse NotFound(std::string_view what) { return ErrorResponse(404, "not_found", what); }

std::string PercentDecode(std::string_view s, bool plus_is_space) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '%' && i + 2 < s.size() && std::isxdigit(static_cast<unsigned char>(s[i + 1])) &&
        std::isxdigit(static_cast<unsigned char>(s[i + 2]))) {
      out += static_cast<char>(std::stoi(std::string(s.substr(i + 1, 2)), nullptr, 16));
      i += 2;
    } else if (c == '+' && plus_is_space) {
      out += ' ';
    } else {
      out += c;
    }
  }
  return out;
}

struct Request {
  std::string method;
  std::vector<std::string> segments;  // after /v1
  std::map<std::string, std::string> query;
  Json body;
  bool versioned = false;

  std::optional<std::string> Param(const std::string &key) const {
    auto it = query.find(key);
    if (it == query.end()) return std::nullopt;
    return it->second;
  }
};

std::vector<std::string> SplitList(const std::string &s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::size_t ParseIndex(const std::string &s) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }) || s.size() > 9) {
    throw Error(ErrorCode::kUnknownIteration, "no iteration '" + s + "'");
  }
  return static_cast<std::size_t>(std::stoul(s));
}

OrderedJson IterationResult(const std::string &session, const SessionIteration &it) {
  OrderedJson j;
  j["session"] = session;
  j["iteration"] = it.index;
  j["origin"] = it.origin;
  if (it.reverted_from) j["reverted_from"] = *it.reverted_from;
  const OrderedJson full = it.ToJson();
  j["summary"] = full["summary"];
  j["retrain_needed"] = it.model.meta.retrain_needed;
  j["groups"] = full["groups"];
  j["selected_group"] = it.selected_group;
  return j;
}

}  // namespace

// Serial executor: tasks run one at a time in arrival order.
class Strand {
 public:
  Strand() : worker_([this] { Run(); }) {}
  ~Strand() {
    {
      std::lock_guard lock(mu_);
      stop_ = true;
    }
    cv_.notify_all();
    worker_.join();
  }

  void Post(std::function<void()> task) {
    {
      std::lock_guard lock(mu_);
      queue_.push_back(std::move(task));
      ++pending_;
    }
    cv_.notify_all();
  }

  void WaitIdle() {
    std::unique_lock lock(mu_);
    idle_.wait(lock, [&] { return pending_ == 0; });
  }

 private:
  void Run() {
    for (;;) {
      std::function<void()> task;
      {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return stop_ || !queue_.empty(); });
        if (queue_.empty()) return;
        task = std::move(queue_.front());
        queue_.pop_front();
      }
      task();
      // Release captured session references before reporting idle.
      task = nullptr;
      {
        std::lock_guard lock(mu_);
        --pending_;
      }
      idle_.notify_all();
    }
  }

  std::mutex mu_;
  std::condition_variable cv_;
  std::condition_variable idle_;
  std::deque<std::function<void()>> queue_;
  std::size_t pending_ = 0;
  bool stop_ = false;
  std::thread worker_;
};

struct Service::SessionState {
  SessionState(std::string id, const Corpus &corpus, Clock clock) : session(std::move(id), corpus, std::move(clock)) {}

  Session session;
  std::optional<OrderedJson> query;
  std::vector<std::string> scope;
  bool has_scope = false;
  std::string log_path;
  mutable std::shared_mutex rw;
  Strand strand;
};

struct Service::Job {
  std::string id;
  std::string session;
  std::string kind;
  std::string status = "queued";
  OrderedJson result;
  std::optional<HttpResponse> error;
};

class Router {
 public:
  Router(Service &service, Request req) : s_(service), req_(std::move(req)) {}

  HttpResponse Route() {
    const auto &seg = req_.segments;
    const std::string &m = req_.method;
    if (!req_.versioned) return NotFound("unknown path; the API lives under /v1");
    if (seg.empty()) return NotFound("unknown path");
    if (seg[0] == "schema" && seg.size() == 1 && m == "GET") return Schema();
    if (seg[0] == "jobs" && seg.size() == 2 && m == "GET") return GetJob(seg[1]);
    if (seg[0] == "figures" && seg.size() == 3 && m == "GET") {
      if (seg[2] == "details") return FigureDetailsRoute(seg[1]);
      if (seg[2] == "history") return History(seg[1]);
      return NotFound("unknown figure resource");
    }
    if (seg[0] != "sessions") return NotFound("unknown path");
    if (seg.size() == 1) return m == "POST" ? CreateSession() : MethodNotAllowed();
    auto state = s_.FindSession(seg[1]);
    if (!state) return NotFound("unknown session '" + seg[1] + "'");
    if (seg.size() == 2) return m == "GET" ? GetSession(*state) : MethodNotAllowed();
    const std::string &action = seg[2];
    if (seg.size() == 3 && m == "POST") {
      if (action == "scope") return Scope(state);
      if (action == "identify") return Identify(state);
      if (action == "edits") return Edits(state);
      if (action == "update") return Update(state);
      if (action == "revert") return Revert(state);
      return NotFound("unknown session action");
    }
    if (action == "iterations" && seg.size() >= 4 && m == "GET") {
      std::shared_lock lock(state->rw);
      const SessionIteration &it = state->session.iteration(ParseIndex(seg[3]));
      if (seg.size() == 4) return JsonResponse(it.ToJson());
      if (seg.size() == 5) {
        if (seg[4] == "features") return Features(it);
        if (seg[4] == "assignment") return Assignment(it);
        if (seg[4] == "overview") return Overview(it);
        if (seg[4] == "export.csv") {
          return HttpResponse{200, state->session.ExportCsv(it.index), "text/csv; charset=utf-8"};
        }
      }
      if (seg.size() == 6 && seg[4] == "analytics") return Analytics(it, seg[5]);
      return NotFound("unknown iteration resource");
    }
    return seg.size() >= 3 ? MethodNotAllowed() : NotFound("unknown path");
  }

 private:
  HttpResponse MethodNotAllowed() { return ErrorResponse(405, "method_not_allowed", "method not allowed here"); }

  bool Wait() const {
    auto w = req_.Param("wait");
    return w && (*w == "true" || *w == "1");
  }

  HttpResponse Schema() {
    const TypeRegistry &types = s_.corpus_.graph.types();
    OrderedJson j;
    j["node_types"] = OrderedJson::array();
    for (const auto &t : types.node_types()) {
      OrderedJson nt{{"name", t.name}, {"kind", NodeKindName(t.kind)}};
      if (t.kind == NodeKind::kEntity) nt["role"] = EntityRoleName(t.role);
      j["node_types"].push_back(std::move(nt));
    }
    j["edge_types"] = OrderedJson::array();
    for (const auto &t : types.edge_types()) {
      j["edge_types"].push_back(
          OrderedJson{{"name", t.name}, {"source", t.source_type}, {"target", t.target_type}, {"symmetric", t.symmetric}});
    }
    std::set<std::string> keys;
    for (const auto &id : s_.corpus_.figures) {
      for (const auto &[k, v] : s_.corpus_.Figure(id).attrs) keys.insert(k);
    }
    j["figure_attributes"] = keys;
    j["feature_kinds"] = {"TimeRange", "Location", "Affiliation", "Relationship", "Celebrity", "Entity"};
    j["figures"] = s_.corpus_.figures.size();
    return JsonResponse(j);
  }

  HttpResponse GetJob(const std::string &id) {
    std::lock_guard lock(s_.mu_);
    auto it = s_.jobs_.find(id);
    if (it == s_.jobs_.end()) return NotFound("unknown job '" + id + "'");
    const auto &job = *it->second;
    OrderedJson j{{"id", job.id}, {"session", job.session}, {"kind", job.kind}, {"status", job.status}};
    if (job.status == "done") j["result"] = job.result;
    if (job.error) {
      j["http_status"] = job.error->status;
      j["error"] = OrderedJson::parse(job.error->body)["error"];
    }
    return JsonResponse(j);
  }

  HttpResponse CreateSession() {
    std::shared_ptr<Service::SessionState> state;
    {
      std::lock_guard lock(s_.mu_);
      char buf[32];
      std::snprintf(buf, sizeof buf, "s%06llu", static_cast<unsigned long long>(s_.next_session_++));
      state = s_.CreateSession(buf);
    }
    s_.Append(*state, OrderedJson{{"op", "create"}, {"session", state->session.id()}});
    return JsonResponse(OrderedJson{{"id", state->session.id()}}, 201);
  }

  HttpResponse GetSession(const Service::SessionState &state) {
    std::shared_lock lock(state.rw);
    OrderedJson j;
    j["id"] = state.session.id();
    if (state.has_scope) {
      j["scope"] = OrderedJson{{"query", *state.query}, {"count", state.scope.size()}};
    } else {
      j["scope"] = nullptr;
    }
    j["iterations"] = OrderedJson::array();
    for (const auto &it : state.session.iterations()) {
      OrderedJson row{{"index", it.index}, {"origin", it.origin}};
      if (it.reverted_from) row["reverted_from"] = *it.reverted_from;
      row["summary"] = it.ToJson()["summary"];
      j["iterations"].push_back(std::move(row));
    }
    j["current"] = state.session.empty() ? OrderedJson() : OrderedJson(state.session.current());
    return JsonResponse(j);
  }

  // Runs `task` on the session strand; waits for it unless async.
  HttpResponse Submit(const std::shared_ptr<Service::SessionState> &state, const std::string &kind, bool async,
                      std::function<OrderedJson()> task) {
    if (!async) {
      auto promise = std::make_shared<std::promise<HttpResponse>>();
      auto future = promise->get_future();
      state->strand.Post([promise, task] {
        try {
          promise->set_value(JsonResponse(task()));
        } catch (const Error &e) {
          promise->set_value(FromError(e));
        } catch (const std::exception &e) {
          promise->set_value(ErrorResponse(500, "internal_error", e.what()));
        }
      });
      return future.get();
    }
    auto job = std::make_shared<Service::Job>();
    {
      std::lock_guard lock(s_.mu_);
      char buf[32];
      std::snprintf(buf, sizeof buf, "j%06llu", static_cast<unsigned long long>(s_.next_job_++));
      job->id = buf;
      job->session = state->session.id();
      job->kind = kind;
      s_.jobs_[job->id] = job;
    }
    Service *svc = &s_;
    state->strand.Post([svc, job, task] {
      {
        std::lock_guard lock(svc->mu_);
        job->status = "running";
      }
      OrderedJson result;
      std::optional<HttpResponse> error;
      try {
        result = task();
      } catch (const Error &e) {
        error = FromError(e);
      } catch (const std::exception &e) {
        error = ErrorResponse(500, "internal_error", e.what());
      }
      std::lock_guard lock(svc->mu_);
      job->status = error ? "failed" : "done";
      job->result = std::move(result);
      job->error = std::move(error);
    });
    return JsonResponse(
        OrderedJson{{"job", job->id}, {"status", "queued"}, {"href", "/v1/jobs/" + job->id}}, 202);
  }

  HttpResponse Scope(const std::shared_ptr<Service::SessionState> &state) {
    const ScopeQuery query = ScopeQuery::FromJson(req_.body);
    Service *svc = &s_;
    return Submit(state, "scope", false, [svc, state, query] {
      auto figures = ResolveScope(state->session.corpus(), query);
      const OrderedJson query_json = query.ToJson();
      {
        std::unique_lock lock(state->rw);
        state->query = query_json;
        state->scope = figures;
        state->has_scope = true;
      }
      svc->Append(*state, OrderedJson{{"op", "scope"}, {"query", query_json}, {"figures", figures}});
      return OrderedJson{{"figures", figures}, {"count", figures.size()}};
    });
  }

  HttpResponse Identify(const std::shared_ptr<Service::SessionState> &state) {
    Json body = req_.body.is_null() ? Json::object() : req_.body;
    if (body.is_object() && !body.contains("seed")) body["seed"] = s_.config_.seed;
    const IdentifyConfig config = IdentifyConfig::FromJson(body);
    std::vector<std::string> scope;
    {
      std::shared_lock lock(state->rw);
      if (!state->has_scope) return ErrorResponse(409, "no_scope", "resolve a scope before identification");
      scope = state->scope;
    }
    const std::vector<std::string> positives = config.positives.value_or(scope);
    if (positives.size() < 2) {
      Error e(ErrorCode::kTooFewPositives, "identification needs at least 2 positive figures");
      e.WithStage("train");
      return FromError(e);
    }
    for (const auto &p : positives) {
      if (!std::binary_search(scope.begin(), scope.end(), p)) {
        Error e(ErrorCode::kInvalidArgument, "positive '" + p + "' is not in the scope");
        return FromError(e);
      }
    }
    Service *svc = &s_;
    return Submit(state, "identify", !Wait(), [svc, state, scope, config] {
      std::unique_lock lock(state->rw);
      const SessionIteration &it = state->session.Identify(scope, config);
      svc->Append(*state, OrderedJson{{"op", "iteration"}, {"iteration", it.ToJson()}});
      return IterationResult(state->session.id(), it);
    });
  }

  HttpResponse Update(const std::shared_ptr<Service::SessionState> &state) {
    {
      std::shared_lock lock(state->rw);
      if (state->session.empty()) {
        return ErrorResponse(409, "too_few_positives", "the session has no iteration to update");
      }
      const auto included = state->session.iteration(state->session.current()).Included();
      if (included.size() < 2) {
        Error e(ErrorCode::kTooFewPositives,
                "update needs at least 2 included figures, got " + std::to_string(included.size()));
        e.WithStage("update");
        return FromError(e);
      }
    }
    Service *svc = &s_;
    return Submit(state, "update", !Wait(), [svc, state] {
      std::unique_lock lock(state->rw);
      const SessionIteration &it = state->session.Update();
      svc->Append(*state, OrderedJson{{"op", "iteration"}, {"iteration", it.ToJson()}});
      return IterationResult(state->session.id(), it);
    });
  }

  HttpResponse Edits(const std::shared_ptr<Service::SessionState> &state) {
    const auto edits = EditOp::ListFromJson(req_.body);
    Service *svc = &s_;
    return Submit(state, "edits", false, [svc, state, edits] {
      std::unique_lock lock(state->rw);
      const SessionIteration &it = state->session.ApplyEdits(edits);
      OrderedJson ops = OrderedJson::array();
      for (const auto &e : edits) ops.push_back(e.ToJson());
      svc->Append(*state, OrderedJson{{"op", "edits"}, {"edits", ops}, {"iteration", it.ToJson()}});
      return IterationResult(state->session.id(), it);
    });
  }

  HttpResponse Revert(const std::shared_ptr<Service::SessionState> &state) {
    if (!req_.body.is_object() || !req_.body.contains("iteration") || !req_.body["iteration"].is_number_unsigned()) {
      return ErrorResponse(400, "invalid_argument", "body must be {\"iteration\": <index>}");
    }
    const auto index = req_.body["iteration"].get<std::size_t>();
    Service *svc = &s_;
    return Submit(state, "revert", false, [svc, state, index] {
      std::unique_lock lock(state->rw);
      const SessionIteration &it = state->session.Revert(index);
      svc->Append(*state, OrderedJson{{"op", "iteration"}, {"iteration", it.ToJson()}});
      return IterationResult(state->session.id(), it);
    });
  }

  HttpResponse Features(const SessionIteration &it) {
    std::vector<Feature> candidates;
    for (const auto &c : it.features) candidates.push_back(ParseFeature(c.id));
    OrderedJson j;
    const OrderedJson full = it.ToJson();
    j["features"] = full["features"];
    j["groups"] = full["groups"];
    j["selected_group"] = it.selected_group;
    j["concept"] = full["concept"]["features"];
    j["retrain_needed"] = it.model.meta.retrain_needed;
    OrderedJson matrix = OrderedJson::array();
    if (!candidates.empty()) {
      const FeatureSet set(candidates, it.scope, s_.corpus_.store);
      for (std::size_t a = 0; a < set.size(); ++a) {
        OrderedJson row = OrderedJson::array();
        for (std::size_t b = 0; b < set.size(); ++b) {
          const double v = set.support_count(a) && set.support_count(b) ? set.Pmi(a, b) : std::nan("");
          row.push_back(std::isfinite(v) ? OrderedJson(v) : OrderedJson());
        }
        matrix.push_back(std::move(row));
      }
    }
    j["pmi"] = std::move(matrix);
    return JsonResponse(j);
  }

  HttpResponse Assignment(const SessionIteration &it) {
    const OrderedJson full = it.ToJson();
    return JsonResponse(OrderedJson{{"iteration", it.index}, {"assignment", full["assignment"]}});
  }

  HttpResponse Overview(const SessionIteration &it) {
    std::vector<const FigureAssignment *> rows;
    for (const auto &a : it.assignment) rows.push_back(&a);
    std::sort(rows.begin(), rows.end(), [](const FigureAssignment *a, const FigureAssignment *b) {
      if (a->score != b->score) return a->score > b->score;
      return a->figure < b->figure;
    });
    OrderedJson figures = OrderedJson::array();
    for (const FigureAssignment *a : rows) {
      const auto v = MakeFeatureVector(a->figure, it.model.features, s_.corpus_.store);
      std::vector<double> contributions;
      for (std::size_t i = 0; i < v.values.size(); ++i) contributions.push_back(v.values[i] * it.model.weights[i]);
      figures.push_back(OrderedJson{{"figure", a->figure},
                                    {"name", s_.corpus_.Figure(a->figure).label},
                                    {"score", a->score},
                                    {"status", StatusName(a->status)},
                                    {"origin", OriginName(a->origin)},
                                    {"values", v.values},
                                    {"contributions", contributions}});
    }
    return JsonResponse(OrderedJson{{"iteration", it.index},
                                    {"features", it.model.group.features},
                                    {"weights", it.model.weights},
                                    {"figures", std::move(figures)}});
  }

  HttpResponse Analytics(const SessionIteration &it, const std::string &kind) {
    std::vector<std::string> figures = req_.Param("figures") ? SplitList(*req_.Param("figures")) : it.Included();
    for (const auto &f : figures) s_.corpus_.Figure(f);
    const auto events = DeriveEvents(s_.corpus_.graph, s_.corpus_.schema, figures);
    if (kind == "timeline") return JsonResponse(TimelineToJson(EventTimeline(events.records)));
    if (kind == "map") return JsonResponse(MapToJson(EventMap(s_.corpus_.graph, events.records)));
    if (kind == "matrix") return JsonResponse(MatrixToJson(BuildRelationshipMatrix(figures, events.records)));
    if (kind == "ranking") {
      OrderedJson out = OrderedJson::array();
      std::sort(figures.begin(), figures.end());
      figures.erase(std::unique(figures.begin(), figures.end()), figures.end());
      for (const auto &f : figures) {
        OrderedJson row = RankingToJson(RankEvents(f, events.records));
        row["figure"] = f;
        out.push_back(std::move(row));
      }
      return JsonResponse(out);
    }
    return NotFound("unknown analytics view '" + kind + "'");
  }

  HttpResponse FigureDetailsRoute(const std::string &figure) {
    std::vector<Feature> features;
    if (auto sid = req_.Param("session")) {
      auto state = s_.FindSession(*sid);
      if (!state) return NotFound("unknown session '" + *sid + "'");
      std::shared_lock lock(state->rw);
      if (!state->session.empty()) {
        const std::size_t index =
            req_.Param("iteration") ? ParseIndex(*req_.Param("iteration")) : state->session.current();
        for (const auto &c : state->session.iteration(index).features) features.push_back(ParseFeature(c.id));
      }
    }
    return JsonResponse(FigureDetails(s_.corpus_.graph, s_.corpus_.schema, s_.corpus_.store, figure, features));
  }

  HttpResponse History(const std::string &figure) {
    std::optional<EventCategory> category;
    if (auto c = req_.Param("category")) {
      category = CategoryFromName(*c);
      if (!category) return ErrorResponse(400, "invalid_argument", "unknown event category '" + *c + "'");
    }
    const std::string id = figure;
    const auto events = DeriveEvents(s_.corpus_.graph, s_.corpus_.schema, std::span<const std::string>(&id, 1));
    OrderedJson out = OrderedJson::array();
    for (const auto &e : FigureHistory(figure, events.records, category)) out.push_back(EventToJson(e));
    return JsonResponse(OrderedJson{{"figure", figure}, {"events", std::move(out)}});
  }

  Service &s_;
  Request req_;
};

Service::Service(const Corpus &corpus, ServiceConfig config, Clock clock)
    : corpus_(corpus), config_(std::move(config)), clock_(std::move(clock)) {
  if (!config_.state_dir.empty()) {
    fs::create_directories(config_.state_dir);
    Replay();
  }
}

Service::~Service() {
  Drain();
  std::lock_guard lock(mu_);
  sessions_.clear();
}

std::size_t Service::session_count() const {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

void Service::Drain() {
  std::vector<std::shared_ptr<SessionState>> all;
  {
    std::lock_guard lock(mu_);
    for (const auto &[id, s] : sessions_) all.push_back(s);
  }
  for (const auto &s : all) s->strand.WaitIdle();
}

std::shared_ptr<Service::SessionState> Service::FindSession(const std::string &id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

std::shared_ptr<Service::SessionState> Service::CreateSession(std::string id) {
  auto state = std::make_shared<SessionState>(id, corpus_, clock_);
  if (!config_.state_dir.empty()) state->log_path = (fs::path(config_.state_dir) / (id + ".ndjson")).string();
  sessions_[id] = state;
  return state;
}

void Service::Append(SessionState &s, const OrderedJson &entry) const {
  if (s.log_path.empty()) return;
  std::ofstream out(s.log_path, std::ios::app | std::ios::binary);
  out << entry.dump() << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "cannot append to " + s.log_path);
}

void Service::Replay() {
  std::vector<fs::path> logs;
  for (const auto &entry : fs::directory_iterator(config_.state_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".ndjson") logs.push_back(entry.path());
  }
  std::sort(logs.begin(), logs.end());
  for (const auto &path : logs) {
    const std::string id = path.stem().string();
    std::lock_guard lock(mu_);
    auto state = CreateSession(id);
    if (id.size() > 1 && id[0] == 's' && std::all_of(id.begin() + 1, id.end(), ::isdigit)) {
      next_session_ = std::max<std::uint64_t>(next_session_, std::stoull(id.substr(1)) + 1);
    }
    std::ifstream in(path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      Json entry;
      try {
        entry = Json::parse(line);
      } catch (const Json::exception &) {
        // A torn final line from a crash mid-append is dropped.
        if (in.peek() == std::char_traits<char>::eof()) break;
        throw Error(ErrorCode::kParseError, path.string() + ":" + std::to_string(lineno) + ": corrupt log entry");
      }
      const std::string op = entry.value("op", "");
      if (op == "scope") {
        state->query = entry.at("query");
        state->scope = entry.at("figures").get<std::vector<std::string>>();
        state->has_scope = true;
      } else if (op == "iteration" || op == "edits") {
        state->session.Restore(SessionIteration::FromJson(entry.at("iteration")));
      }
    }
  }
}

void Service::Mount(httplib::Server &server) {
  auto handler = [this](const httplib::Request &req, httplib::Response &res) {
    const HttpResponse r = Handle(req.method, req.target, req.body);
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  server.Get(".*", handler);
  server.Post(".*", handler);
  server.Put(".*", handler);
  server.Delete(".*", handler);
}

HttpResponse Service::Handle(std::string_view method, std::string_view target, std::string_view body) {
  Request req;
  req.method = std::string(method);
  std::string_view path = target;
  if (auto q = target.find('?'); q != std::string_view::npos) {
    path = target.substr(0, q);
    std::stringstream ss{std::string(target.substr(q + 1))};
    std::string pair;
    while (std::getline(ss, pair, '&')) {
      const auto eq = pair.find('=');
      const std::string key = PercentDecode(pair.substr(0, eq), true);
      req.query[key] = eq == std::string::npos ? "" : PercentDecode(pair.substr(eq + 1), true);
    }
  }
  std::vector<std::string> segments;
  std::size_t start = 0;
  while (start <= path.size()) {
    const auto slash = path.find('/', start);
    const auto part = path.substr(start, slash == std::string_view::npos ? std::string_view::npos : slash - start);
    if (!part.empty()) segments.push_back(PercentDecode(part, false));
    if (slash == std::string_view::npos) break;
    start = slash + 1;
  }
  if (!segments.empty() && segments[0] == "v1") {
    req.versioned = true;
    segments.erase(segments.begin());
  }
  req.segments = std::move(segments);
  try {
    if (!body.empty()) req.body = Json::parse(body);
  } catch (const Json::exception &e) {
    return ErrorResponse(400, "bad_request", std::string("request body is not valid JSON: ") + e.what());
  }
  try {
    return Router(*this, std::move(req)).Route();
  } catch (const Error &e) {
    return FromError(e);
  } catch (const Json::exception &e) {
    return ErrorResponse(400, "bad_request", e.what());
  } catch (const std::exception &e) {
    return ErrorResponse(500, "internal_error", e.what());
  }
}

}  // namespace cohort
