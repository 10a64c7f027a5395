#include "curricula/service.hpp"

#include <algorithm>
#include <cctype>
#include <random>

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <httplib.h>

#include "curricula/io.hpp"
#include "curricula/metrics.hpp"
#include "curricula/planner.hpp"
#include "curricula/simulator.hpp"

namespace curricula::service {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kFileSuffix = ".curriculum.json";

std::string lower(std::string_view text) {
  std::string out(text);
  for (char& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

std::string timestamp(std::chrono::system_clock::time_point t) {
  auto secs = std::chrono::time_point_cast<std::chrono::seconds>(t);
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::chrono::system_clock::to_time_t(secs)));
}

Response json_response(int status, const Json& body) {
  Response r;
  r.status = status;
  r.body = body.dump();
  return r;
}

Response error_response(int status, std::string_view message,
                        const std::optional<ValidationReport>& report = std::nullopt) {
  Json body;
  body["error"] = message;
  if (report) body["report"] = to_json(*report);
  return json_response(status, body);
}

bool has_format_errors(const ValidationReport& report) {
  return std::any_of(report.errors.begin(), report.errors.end(), [](const Issue& i) {
    return i.kind == IssueKind::syntax || i.kind == IssueKind::schema;
  });
}

// 400 for documents that do not decode, 422 for well-formed ones the
// domain rejects.
Response rejected_curriculum(const ValidationReport& report) {
  const int status = has_format_errors(report) ? 400 : 422;
  return error_response(status, report.errors.empty() ? "invalid curriculum"
                                                      : report.errors.front().message,
                        report);
}

Json summary(const StoredCurriculum& s) {
  Json j;
  j["id"] = s.id;
  j["name"] = s.curriculum->name();
  j["revision"] = s.revision;
  j["courses"] = s.curriculum->size();
  j["created"] = timestamp(s.created);
  j["updated"] = timestamp(s.updated);
  return j;
}

std::string etag(std::uint64_t revision) { return fmt::format("\"{}\"", revision); }

std::optional<std::uint64_t> parse_revision(std::string text) {
  if (text.size() >= 2 && text.front() == '"' && text.back() == '"')
    text = text.substr(1, text.size() - 2);
  if (text.empty() || text.size() > 19 ||
      !std::all_of(text.begin(), text.end(), [](char ch) { return ch >= '0' && ch <= '9'; }))
    return std::nullopt;
  return std::stoull(text);
}

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= path.size()) {
    auto end = path.find('/', start);
    if (end == std::string_view::npos) end = path.size();
    if (end > start) parts.emplace_back(path.substr(start, end - start));
    start = end + 1;
  }
  return parts;
}

std::string content_type_for(const fs::path& p) {
  auto ext = p.extension().string();
  if (ext == ".html") return "text/html; charset=utf-8";
  if (ext == ".js") return "text/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  return "application/octet-stream";
}

constexpr std::string_view kPlaceholderPage =
    "<!doctype html>\n<html><head><meta charset=\"utf-8\"><title>curricula</title></head>\n"
    "<body><h1>curricula service</h1><p>The web UI is not built. The API lives under "
    "<code>/api</code>.</p></body></html>\n";

Json whatif_body(const StoredCurriculum& s, const MetricsReport& before,
                 const std::optional<MetricsReport>& after, const ValidationReport& report) {
  Json body;
  body["revision"] = s.revision;
  body["report"] = to_json(report);
  body["before"] = to_json(before);
  body["after"] = after ? to_json(*after) : Json(nullptr);
  if (after) {
    Json delta;
    delta["complexity"] = after->complexity - before.complexity;
    delta["delay_total"] = after->delay_total - before.delay_total;
    delta["blocking_total"] = after->blocking_total - before.blocking_total;
    delta["longest_path_length"] = after->longest_path_length - before.longest_path_length;
    body["delta"] = std::move(delta);

    // per-course complexity changes, over the union of both course sets
    std::map<std::string, std::pair<std::optional<std::int64_t>, std::optional<std::int64_t>>> rows;
    for (const auto& m : before.courses) rows[m.id].first = m.complexity;
    for (const auto& m : after->courses) rows[m.id].second = m.complexity;
    Json courses = Json::array();
    for (const auto& [id, pair] : rows) {
      const auto& [b, a] = pair;
      if (b && a && *a == *b) continue;
      Json row;
      row["id"] = id;
      row["before"] = b ? Json(*b) : Json(nullptr);
      row["after"] = a ? Json(*a) : Json(nullptr);
      row["delta"] = a.value_or(0) - b.value_or(0);
      courses.push_back(std::move(row));
    }
    body["course_deltas"] = std::move(courses);
  } else {
    body["delta"] = nullptr;
    body["course_deltas"] = Json::array();
  }
  return body;
}

}  // namespace

std::optional<std::string> Request::header(std::string_view name) const {
  auto it = headers.find(lower(name));
  if (it == headers.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> Request::param(std::string_view name) const {
  auto it = query.find(std::string(name));
  if (it == query.end()) return std::nullopt;
  return it->second;
}

// ---- store ----------------------------------------------------------------

CurriculumStore::CurriculumStore(std::optional<fs::path> data_dir)
    : data_dir_(std::move(data_dir)), id_salt_(std::random_device{}()) {
  if (!data_dir_) return;
  std::error_code ec;
  fs::create_directories(*data_dir_, ec);
  if (ec) throw IoError(fmt::format("cannot create data directory '{}': {}", data_dir_->string(), ec.message()));
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(*data_dir_)) {
    auto name = entry.path().filename().string();
    if (entry.is_regular_file() && name.size() > kFileSuffix.size() && name.ends_with(kFileSuffix))
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    auto name = path.filename().string();
    std::string id = name.substr(0, name.size() - kFileSuffix.size());
    auto parsed = parse_curriculum(read_text_file(path));
    if (!parsed)
      throw IoError(fmt::format("'{}' is not a valid curriculum: {}", path.string(),
                                parsed.report.errors.front().message));
    auto now = std::chrono::system_clock::now();
    entries_[id] = {id, std::make_shared<const Curriculum>(std::move(*parsed.value)), 1, now, now};
  }
}

std::string CurriculumStore::fresh_id() {
  // Caller holds the write lock.
  for (;;) {
    std::uint64_t x = id_salt_ + 0x9e3779b97f4a7c15ULL * ++id_counter_;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    x ^= x >> 31;
    auto id = fmt::format("{:012x}", x & 0xffffffffffffULL);
    if (!entries_.contains(id)) return id;
  }
}

void CurriculumStore::persist(const StoredCurriculum& entry) const {
  if (!data_dir_) return;
  auto target = *data_dir_ / (entry.id + std::string(kFileSuffix));
  auto tmp = target;
  tmp += ".tmp";
  write_text_file(tmp, serialize_curriculum(*entry.curriculum));
  fs::rename(tmp, target);
}

StoredCurriculum CurriculumStore::create(Curriculum c) {
  std::unique_lock lock(mutex_);
  auto now = std::chrono::system_clock::now();
  StoredCurriculum entry{fresh_id(), std::make_shared<const Curriculum>(std::move(c)), 1, now, now};
  persist(entry);
  entries_[entry.id] = entry;
  return entry;
}

std::optional<StoredCurriculum> CurriculumStore::get(const std::string& id) const {
  std::shared_lock lock(mutex_);
  auto it = entries_.find(id);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::vector<StoredCurriculum> CurriculumStore::list() const {
  std::shared_lock lock(mutex_);
  std::vector<StoredCurriculum> out;
  for (const auto& [id, entry] : entries_) out.push_back(entry);
  return out;
}

CurriculumStore::ReplaceResult CurriculumStore::replace(const std::string& id, Curriculum c,
                                                        std::uint64_t expected_revision) {
  std::unique_lock lock(mutex_);
  auto it = entries_.find(id);
  if (it == entries_.end()) return {Outcome::not_found, std::nullopt};
  if (it->second.revision != expected_revision) return {Outcome::conflict, it->second};
  StoredCurriculum next = it->second;
  next.curriculum = std::make_shared<const Curriculum>(std::move(c));
  next.revision += 1;
  next.updated = std::chrono::system_clock::now();
  persist(next);
  it->second = next;
  return {Outcome::ok, next};
}

CurriculumStore::Outcome CurriculumStore::remove(const std::string& id,
                                                 std::optional<std::uint64_t> expected_revision) {
  std::unique_lock lock(mutex_);
  auto it = entries_.find(id);
  if (it == entries_.end()) return Outcome::not_found;
  if (expected_revision && *expected_revision != it->second.revision) return Outcome::conflict;
  if (data_dir_) {
    std::error_code ec;
    fs::remove(*data_dir_ / (id + std::string(kFileSuffix)), ec);
  }
  entries_.erase(it);
  return Outcome::ok;
}

// ---- api ------------------------------------------------------------------

Api::Api(ServiceOptions options) : options_(std::move(options)), store_(options_.data_dir) {}

Response Api::handle(const Request& request) {
  Response r;
  try {
    r = route(request);
  } catch (const FormatError& e) {
    r = error_response(400, e.what(), e.report());
  } catch (const BudgetExceeded& e) {
    r = error_response(413, fmt::format("{}; lower the number of students or the horizon", e.what()));
  } catch (const CurriculumError& e) {
    r = error_response(422, e.what());
  } catch (const std::exception& e) {
    r = error_response(500, e.what());
  }
  r.headers["Access-Control-Allow-Origin"] = options_.cors_origin;
  r.headers["Access-Control-Expose-Headers"] = "ETag, Location";
  return r;
}

Response Api::route(const Request& req) {
  const auto parts = split_path(req.path);
  const std::string& method = req.method;

  if (method == "OPTIONS") {
    Response r;
    r.status = 204;
    r.content_type.clear();
    r.headers["Access-Control-Allow-Methods"] = "GET, POST, PUT, DELETE, OPTIONS";
    r.headers["Access-Control-Allow-Headers"] = "Content-Type, If-Match";
    r.headers["Access-Control-Max-Age"] = "600";
    return r;
  }
  auto not_allowed = [&] { return error_response(405, fmt::format("{} not allowed on {}", method, req.path)); };

  if (parts.empty() || parts[0] != "api") {
    if (method != "GET") return not_allowed();
    std::string rel = parts.empty() ? "index.html" : req.path.substr(1);
    if (options_.static_dir) {
      bool safe = std::none_of(parts.begin(), parts.end(), [](const std::string& p) { return p == ".." || p == "."; });
      fs::path file = *options_.static_dir / rel;
      if (safe && fs::is_regular_file(file)) {
        Response r;
        r.content_type = content_type_for(file);
        r.body = read_text_file(file);
        return r;
      }
    } else if (parts.empty()) {
      Response r;
      r.content_type = "text/html; charset=utf-8";
      r.body = std::string(kPlaceholderPage);
      return r;
    }
    return error_response(404, fmt::format("no such resource '{}'", req.path));
  }

  if (parts.size() == 2 && parts[1] == "health") {
    if (method != "GET") return not_allowed();
    return json_response(200, Json{{"status", "ok"}});
  }
  if (parts.size() < 2 || parts[1] != "curricula")
    return error_response(404, fmt::format("no such resource '{}'", req.path));

  if (parts.size() == 2) {
    if (method == "GET") {
      Json list = Json::array();
      for (const auto& s : store_.list()) list.push_back(summary(s));
      return json_response(200, Json{{"curricula", std::move(list)}});
    }
    if (method == "POST") {
      auto parsed = parse_curriculum(req.body);
      if (!parsed) return rejected_curriculum(parsed.report);
      auto stored = store_.create(std::move(*parsed.value));
      Json body = summary(stored);
      body["warnings"] = Json::array();
      for (const auto& w : stored.curriculum->warnings()) body["warnings"].push_back(to_json(w));
      auto r = json_response(201, body);
      r.headers["Location"] = fmt::format("/api/curricula/{}", stored.id);
      r.headers["ETag"] = etag(stored.revision);
      return r;
    }
    return not_allowed();
  }

  const std::string& id = parts[2];
  auto missing = [&] { return error_response(404, fmt::format("unknown curriculum '{}'", id)); };

  if (parts.size() == 3) {
    if (method == "GET") {
      auto s = store_.get(id);
      if (!s) return missing();
      Response r;
      r.body = serialize_curriculum(*s->curriculum);
      r.headers["ETag"] = etag(s->revision);
      return r;
    }
    if (method == "PUT") {
      auto token = req.header("if-match");
      if (!token) token = req.param("revision");
      if (!token) return error_response(400, "PUT requires the current revision in If-Match");
      auto expected = parse_revision(*token);
      if (!expected) return error_response(400, fmt::format("If-Match: malformed revision '{}'", *token));
      if (!store_.get(id)) return missing();
      auto parsed = parse_curriculum(req.body);
      if (!parsed) return rejected_curriculum(parsed.report);
      auto result = store_.replace(id, std::move(*parsed.value), *expected);
      if (result.outcome == CurriculumStore::Outcome::not_found) return missing();
      if (result.outcome == CurriculumStore::Outcome::conflict) {
        Json body;
        body["error"] = fmt::format("revision conflict: expected {}, current is {}", *expected,
                                    result.current->revision);
        body["current_revision"] = result.current->revision;
        auto r = json_response(409, body);
        r.headers["ETag"] = etag(result.current->revision);
        return r;
      }
      auto r = json_response(200, summary(*result.current));
      r.headers["ETag"] = etag(result.current->revision);
      return r;
    }
    if (method == "DELETE") {
      std::optional<std::uint64_t> expected;
      if (auto token = req.header("if-match")) {
        expected = parse_revision(*token);
        if (!expected) return error_response(400, fmt::format("If-Match: malformed revision '{}'", *token));
      }
      switch (store_.remove(id, expected)) {
        case CurriculumStore::Outcome::not_found:
          return missing();
        case CurriculumStore::Outcome::conflict:
          return error_response(409, "revision conflict");
        case CurriculumStore::Outcome::ok: {
          Response r;
          r.status = 204;
          r.content_type.clear();
          return r;
        }
      }
    }
    return not_allowed();
  }

  auto s = store_.get(id);  // immutable snapshot for the rest
  const std::string& action = parts[3];

  if (parts.size() == 4 && action == "metrics") {
    if (method != "GET") return not_allowed();
    if (!s) return missing();
    Json body;
    body["id"] = s->id;
    body["revision"] = s->revision;
    body["name"] = s->curriculum->name();
    Json extra = to_json(curriculum_metrics(*s->curriculum));
    for (auto& [key, value] : extra.items()) body[key] = value;
    auto r = json_response(200, body);
    r.headers["ETag"] = etag(s->revision);
    return r;
  }

  if (parts.size() == 4 && action == "whatif") {
    if (method != "POST") return not_allowed();
    if (!s) return missing();
    Json doc = parse_json_text(req.body);
    const Json* edits_doc = &doc;
    if (doc.is_object()) {
      if (!doc.contains("edits")) {
        ValidationReport report;
        report.errors.push_back({IssueKind::schema, "edits: missing required field", {}});
        throw FormatError(std::move(report));
      }
      edits_doc = &doc["edits"];
    }
    auto edits = edits_from_json(*edits_doc);
    auto before = curriculum_metrics(*s->curriculum);
    auto edited = apply_edits(*s->curriculum, edits);
    if (!edited) return json_response(422, whatif_body(*s, before, std::nullopt, edited.report));
    auto after = curriculum_metrics(*edited);
    return json_response(200, whatif_body(*s, before, after, edited.report));
  }

  if (parts.size() == 4 && action == "simulate") {
    if (method != "POST") return not_allowed();
    if (!s) return missing();
    Json doc = req.body.empty() ? Json::object() : parse_json_text(req.body);
    auto cfg = simulation_config_from_json(doc, *s->curriculum);
    if (!s->curriculum->find_plan(cfg.plan))
      return error_response(404, fmt::format("unknown plan '{}'", cfg.plan));
    cfg.deadline = std::chrono::steady_clock::now() + options_.simulation_budget;
    auto result = simulate(*s->curriculum, cfg);
    Json body = to_json(result);
    body["revision"] = s->revision;
    return json_response(200, body);
  }

  if (parts.size() == 6 && action == "plans" && parts[5] == "profile") {
    if (method != "GET") return not_allowed();
    if (!s) return missing();
    const DegreePlan* plan = s->curriculum->find_plan(parts[4]);
    if (!plan) return error_response(404, fmt::format("unknown plan '{}'", parts[4]));
    Json body;
    body["plan"] = to_json(*plan);
    Json extra = to_json(plan_profile(*s->curriculum, *plan));
    for (auto& [key, value] : extra.items()) body[key] = value;
    return json_response(200, body);
  }

  if (parts.size() == 4 && action == "dot") {
    if (method != "GET") return not_allowed();
    if (!s) return missing();
    DotOptions opts;
    opts.cluster_by_plan = req.param("plan");
    if (auto h = req.param("highlight")) {
      if (*h != "longest") return error_response(400, fmt::format("highlight: unknown value '{}'", *h));
      opts.highlight_longest_paths = true;
    }
    opts.shade_blocked_by = req.param("blocked_by");
    if (opts.cluster_by_plan && !s->curriculum->find_plan(*opts.cluster_by_plan))
      return error_response(404, fmt::format("unknown plan '{}'", *opts.cluster_by_plan));
    if (opts.shade_blocked_by && !s->curriculum->contains(*opts.shade_blocked_by))
      return error_response(400, fmt::format("blocked_by: unknown course '{}'", *opts.shade_blocked_by));
    Response r;
    r.content_type = "text/vnd.graphviz";
    r.body = export_dot(*s->curriculum, opts);
    return r;
  }

  return error_response(404, fmt::format("no such resource '{}'", req.path));
}

// ---- http binding ---------------------------------------------------------

struct HttpServer::Impl {
  explicit Impl(Api& a) : api(a) {}
  Api& api;
  httplib::Server server;
};

HttpServer::HttpServer(Api& api) : impl_(std::make_unique<Impl>(api)) {
  auto handler = [this](const httplib::Request& in, httplib::Response& out) {
    Request req;
    req.method = in.method;
    req.path = in.path;
    for (const auto& [k, v] : in.params) req.query.emplace(k, v);
    for (const auto& [k, v] : in.headers) req.headers[lower(k)] = v;
    req.body = in.body;
    Response res = impl_->api.handle(req);
    out.status = res.status;
    for (const auto& [k, v] : res.headers) out.set_header(k, v);
    if (!res.content_type.empty()) out.set_content(res.body, res.content_type);
  };
  auto& srv = impl_->server;
  srv.Get(".*", handler);
  srv.Post(".*", handler);
  srv.Put(".*", handler);
  srv.Delete(".*", handler);
  srv.Options(".*", handler);
  srv.Patch(".*", handler);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace curricula::service
