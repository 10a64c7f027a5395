#pragma once

// HTTP API over curriculum storage, metrics, what-if edits, simulation and
// plan profiles.
//
//   GET    /api/health
//   POST   /api/curricula                          body: curriculum file
//   GET    /api/curricula
//   GET    /api/curricula/{id}                     ETag carries the revision
//   PUT    /api/curricula/{id}                     If-Match: revision
//   DELETE /api/curricula/{id}
//   GET    /api/curricula/{id}/metrics
//   POST   /api/curricula/{id}/whatif              body: {"edits": [...]}
//   POST   /api/curricula/{id}/simulate            body: simulation request
//   GET    /api/curricula/{id}/plans/{name}/profile
//   GET    /api/curricula/{id}/dot?plan=&highlight=longest&blocked_by=
//   GET    /                                       UI assets
//
// Api::handle is transport independent; HttpServer binds it to a socket.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "curricula/core.hpp"

namespace curricula::service {

struct Request {
  std::string method;
  std::string path;
  std::multimap<std::string, std::string> query;
  std::map<std::string, std::string> headers;  // lower-case names
  std::string body;

  std::optional<std::string> header(std::string_view name) const;
  std::optional<std::string> param(std::string_view name) const;
};

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
  std::map<std::string, std::string> headers;
};

struct StoredCurriculum {
  std::string id;
  std::shared_ptr<const Curriculum> curriculum;
  std::uint64_t revision = 1;
  std::chrono::system_clock::time_point created;
  std::chrono::system_clock::time_point updated;
};

/// Thread-safe curriculum store. With a data directory every curriculum is
/// mirrored to `<dir>/<id>.curriculum.json` and reloaded at construction
/// (revisions restart at 1).
class CurriculumStore {
 public:
  explicit CurriculumStore(std::optional<std::filesystem::path> data_dir = std::nullopt);

  StoredCurriculum create(Curriculum c);
  std::optional<StoredCurriculum> get(const std::string& id) const;
  std::vector<StoredCurriculum> list() const;

  enum class Outcome { ok, not_found, conflict };
  struct ReplaceResult {
    Outcome outcome;
    std::optional<StoredCurriculum> current;  // after replacement, or the conflicting state
  };
  /// Replaces only when the stored revision equals `expected_revision`.
  ReplaceResult replace(const std::string& id, Curriculum c, std::uint64_t expected_revision);
  /// Removes; a given revision must match.
  Outcome remove(const std::string& id, std::optional<std::uint64_t> expected_revision);

 private:
  void persist(const StoredCurriculum& entry) const;
  std::string fresh_id();

  std::optional<std::filesystem::path> data_dir_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, StoredCurriculum> entries_;
  std::uint64_t id_counter_ = 0;
  std::uint64_t id_salt_;
};

struct ServiceOptions {
  std::optional<std::filesystem::path> data_dir;
  // Wall-clock budget for one simulation request.
  std::chrono::milliseconds simulation_budget{10000};
  std::string cors_origin = "*";
  // Directory with index.html etc.; a placeholder page is served without it.
  std::optional<std::filesystem::path> static_dir;
};

class Api {
 public:
  explicit Api(ServiceOptions options = {});

  Response handle(const Request& request);
  CurriculumStore& store() { return store_; }

 private:
  Response route(const Request& request);

  ServiceOptions options_;
  CurriculumStore store_;
};

class HttpServer {
 public:
  explicit HttpServer(Api& api);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds; port 0 picks a free port. Returns the bound port or -1.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  bool listen();
  void stop();
  /// Blocks until the server accepts connections.
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace curricula::service
