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
#ifndef COHORT_API_HPP_
#define COHORT_API_HPP_

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "cohort/error.hpp"
#include "cohort/graph.hpp"
#include "cohort/session.hpp"

namespace httplib {
class Server;
}

namespace cohort {

struct CorpusFiles {
  std::string corpus;     // JSON-Lines records
  std::string schema;     // schema mapping document
  std::string templates;  // template document
  std::string aliases;    // optional alias table
};

struct LoadedCorpus {
  Corpus corpus;
  std::vector<Reject> rejects;
  std::vector<std::string> warnings;
};

LoadedCorpus LoadCorpus(const CorpusFiles &files, const WalkConfig &walk, std::uint64_t seed);

struct ServiceConfig {
  std::string state_dir;  // empty: no persistence
  std::uint64_t seed = 0;  // default identify seed
};

struct HttpResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

// Machine-readable error codes surfaced by the API.
std::string_view ApiErrorCode(ErrorCode code);
int HttpStatusFor(ErrorCode code);
HttpResponse ErrorResponse(int status, std::string_view code, std::string_view message,
                           const Error *detail = nullptr);

// HTTP/JSON facade over sessions. Request handling is transport-free so it can
// be driven directly; Mount() wires it into a cpp-httplib server.
class Service {
 public:
  Service(const Corpus &corpus, ServiceConfig config, Clock clock = UtcNow);
  ~Service();
  Service(const Service &) = delete;
  Service &operator=(const Service &) = delete;

  // `target` is the request path, optionally with a query string.
  HttpResponse Handle(std::string_view method, std::string_view target, std::string_view body);

  void Mount(httplib::Server &server);

  // Blocks until every queued job has finished.
  void Drain();

  std::size_t session_count() const;

 private:
  struct SessionState;
  struct Job;

  std::shared_ptr<SessionState> FindSession(const std::string &id) const;
  std::shared_ptr<SessionState> CreateSession(std::string id);
  void Replay();
  void Append(SessionState &s, const OrderedJson &entry) const;

  const Corpus &corpus_;
  ServiceConfig config_;
  Clock clock_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<SessionState>> sessions_;
  std::map<std::string, std::shared_ptr<Job>> jobs_;
  std::uint64_t next_session_ = 1;
  std::uint64_t next_job_ = 1;

  friend class Router;
};

}  // namespace cohort

#endif  // COHORT_API_HPP_
