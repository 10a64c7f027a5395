#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <thread>

#include <httplib.h>

#include "curricula/fixtures.hpp"
#include "curricula/io.hpp"
#include "curricula/service.hpp"

using namespace curricula;
using namespace curricula::service;
namespace fs = std::filesystem;

namespace {

Request make(std::string method, std::string path, std::string body = {},
             std::map<std::string, std::string> headers = {}) {
  Request r;
  r.method = std::move(method);
  auto q = path.find('?');
  if (q != std::string::npos) {
    std::string query = path.substr(q + 1);
    path = path.substr(0, q);
    std::size_t start = 0;
    while (start <= query.size()) {
      auto amp = query.find('&', start);
      auto pair = query.substr(start, amp == std::string::npos ? std::string::npos : amp - start);
      auto eq = pair.find('=');
      if (!pair.empty()) r.query.emplace(pair.substr(0, eq), eq == std::string::npos ? "" : pair.substr(eq + 1));
      if (amp == std::string::npos) break;
      start = amp + 1;
    }
  }
  r.path = std::move(path);
  r.headers = std::move(headers);
  r.body = std::move(body);
  return r;
}

Json body_of(const Response& r) { return Json::parse(r.body); }

std::string create(Api& api, const std::string& fixture) {
  auto r = api.handle(make("POST", "/api/curricula", serialize_curriculum(fixtures::get(fixture))));
  REQUIRE(r.status == 201);
  return body_of(r)["id"].get<std::string>();
}

std::string base(const std::string& id) { return "/api/curricula/" + id; }

}  // namespace

TEST_CASE("health, index and CORS") {
  Api api;
  auto h = api.handle(make("GET", "/api/health"));
  CHECK(h.status == 200);
  CHECK(body_of(h)["status"] == "ok");
  CHECK(h.headers["Access-Control-Allow-Origin"] == "*");
  auto idx = api.handle(make("GET", "/"));
  CHECK(idx.status == 200);
  CHECK(idx.content_type.find("text/html") == 0);
  auto pre = api.handle(make("OPTIONS", "/api/curricula"));
  CHECK(pre.status == 204);
  CHECK(api.handle(make("GET", "/api/nothing")).status == 404);
  CHECK(api.handle(make("PATCH", "/api/curricula")).status == 405);
}

TEST_CASE("static directory") {
  auto dir = fs::temp_directory_path() / "curricula_static_test";
  fs::create_directories(dir);
  write_text_file(dir / "index.html", "<html>board</html>");
  write_text_file(dir / "app.js", "console.log(1);");
  ServiceOptions opts;
  opts.static_dir = dir;
  Api api(opts);
  auto idx = api.handle(make("GET", "/"));
  CHECK(idx.body == "<html>board</html>");
  auto js = api.handle(make("GET", "/app.js"));
  CHECK(js.status == 200);
  CHECK(js.content_type.find("javascript") != std::string::npos);
  CHECK(api.handle(make("GET", "/../secret")).status == 404);
  CHECK(api.handle(make("GET", "/missing.css")).status == 404);
  fs::remove_all(dir);
}

TEST_CASE("create, list, fetch and delete") {
  Api api;
  auto post = api.handle(make("POST", "/api/curricula", serialize_curriculum(fixtures::get("CHAIN5"))));
  REQUIRE(post.status == 201);
  auto created = body_of(post);
  std::string id = created["id"];
  CHECK(id.size() == 12);
  CHECK(created["revision"] == 1);
  CHECK(created["courses"] == 5);
  CHECK(post.headers["Location"] == base(id));
  CHECK(post.headers["ETag"] == "\"1\"");

  auto list = body_of(api.handle(make("GET", "/api/curricula")));
  REQUIRE(list["curricula"].size() == 1);
  CHECK(list["curricula"][0]["id"] == id);

  auto got = api.handle(make("GET", base(id)));
  CHECK(got.status == 200);
  CHECK(got.body == serialize_curriculum(fixtures::get("CHAIN5")));
  CHECK(got.headers["ETag"] == "\"1\"");

  CHECK(api.handle(make("DELETE", base(id), "", {{"if-match", "\"7\""}})).status == 409);
  CHECK(api.handle(make("DELETE", base(id))).status == 204);
  CHECK(api.handle(make("GET", base(id))).status == 404);
  CHECK(api.handle(make("DELETE", base(id))).status == 404);
}

TEST_CASE("rejected uploads") {
  Api api;
  auto syntax = api.handle(make("POST", "/api/curricula", "{\"name\": "));
  CHECK(syntax.status == 400);
  CHECK(body_of(syntax)["report"]["errors"][0]["kind"] == "syntax");
  auto schema = api.handle(make("POST", "/api/curricula", R"({"format_version":"1","name":"x","courses":[{"id":1}]})"));
  CHECK(schema.status == 400);
  auto cyc = api.handle(make("POST", "/api/curricula", R"({"format_version":"1","name":"x",
    "courses":[{"id":"a","name":"A"},{"id":"b","name":"B"}],
    "requisites":[{"from":"a","to":"b","type":"prereq"},{"from":"b","to":"a","type":"prereq"}]})"));
  CHECK(cyc.status == 422);
  CHECK(body_of(cyc)["report"]["errors"][0]["kind"] == "cycle");
  auto warned = api.handle(make("POST", "/api/curricula", R"({"format_version":"1","name":"x",
    "courses":[{"id":"a","name":"A"},{"id":"b","name":"B"},{"id":"c","name":"C"}],
    "requisites":[{"from":"a","to":"b","type":"prereq"},{"from":"b","to":"c","type":"prereq"},
                  {"from":"a","to":"c","type":"prereq"}]})"));
  CHECK(warned.status == 201);
  CHECK(body_of(warned)["warnings"].size() == 1);
  CHECK(body_of(api.handle(make("GET", "/api/curricula")))["curricula"].size() == 1);
}

TEST_CASE("metrics") {
  Api api;
  auto id = create(api, "CHAIN5");
  auto m = api.handle(make("GET", base(id) + "/metrics"));
  REQUIRE(m.status == 200);
  auto j = body_of(m);
  CHECK(j["complexity"] == 35);
  CHECK(j["revision"] == 1);
  CHECK(j["id"] == id);
  CHECK(j["courses"].size() == 5);
  CHECK(api.handle(make("GET", "/api/curricula/ffffffffffff/metrics")).status == 404);
  CHECK(api.handle(make("POST", base(id) + "/metrics")).status == 405);
}

TEST_CASE("what-if edits leave the stored curriculum alone") {
  Api api;
  auto id = create(api, "CHAIN5");
  auto r = api.handle(make("POST", base(id) + "/whatif", R"({"edits":[{"op":"remove_course","id":"Precalculus"}]})"));
  REQUIRE(r.status == 200);
  auto j = body_of(r);
  CHECK(j["before"]["complexity"] == 35);
  CHECK(j["after"]["complexity"] == 22);
  CHECK(j["delta"]["complexity"] == -13);
  CHECK(j["revision"] == 1);
  bool saw_removed = false;
  for (const auto& row : j["course_deltas"])
    if (row["id"] == "Precalculus") {
      saw_removed = true;
      CHECK(row["after"].is_null());
    }
  CHECK(saw_removed);

  auto bare = api.handle(make("POST", base(id) + "/whatif", R"([{"op":"add_requisite","from":"Disciplinary","to":"CalcI"}])"));
  CHECK(bare.status == 422);
  auto bj = body_of(bare);
  CHECK(bj["after"].is_null());
  CHECK(bj["report"]["errors"][0]["kind"] == "cycle");
  CHECK(bj["revision"] == 1);

  CHECK(api.handle(make("POST", base(id) + "/whatif", R"({"changes":[]})")).status == 400);
  CHECK(api.handle(make("POST", base(id) + "/whatif", R"([{"op":"explode"}])")).status == 400);
  CHECK(api.handle(make("POST", base(id) + "/whatif", "[")).status == 400);

  auto after = body_of(api.handle(make("GET", base(id) + "/metrics")));
  CHECK(after["complexity"] == 35);
  CHECK(after["revision"] == 1);
}

TEST_CASE("replacing with revisions") {
  Api api;
  auto id = create(api, "CHAIN5");
  auto chain4 = serialize_curriculum(fixtures::get("CHAIN4"));
  CHECK(api.handle(make("PUT", base(id), chain4)).status == 400);
  CHECK(api.handle(make("PUT", base(id), chain4, {{"if-match", "W/abc"}})).status == 400);
  auto ok = api.handle(make("PUT", base(id), chain4, {{"if-match", "\"1\""}}));
  REQUIRE(ok.status == 200);
  CHECK(body_of(ok)["revision"] == 2);
  CHECK(ok.headers["ETag"] == "\"2\"");
  auto stale = api.handle(make("PUT", base(id), chain4, {{"if-match", "1"}}));
  CHECK(stale.status == 409);
  CHECK(body_of(stale)["current_revision"] == 2);
  auto by_param = api.handle(make("PUT", base(id) + "?revision=2", chain4));
  CHECK(by_param.status == 200);
  CHECK(api.handle(make("PUT", base(id), "{", {{"if-match", "3"}})).status == 400);
  CHECK(body_of(api.handle(make("GET", base(id) + "/metrics")))["complexity"] == 22);
  CHECK(api.handle(make("PUT", "/api/curricula/000000000000", chain4, {{"if-match", "1"}})).status == 404);
}

TEST_CASE("concurrent replacements never lose an update") {
  Api api;
  auto id = create(api, "CHAIN4");
  auto text = serialize_curriculum(fixtures::get("CHAIN4"));
  std::atomic<int> succeeded{0}, conflicted{0};
  std::vector<std::thread> workers;
  for (int w = 0; w < 8; ++w) {
    workers.emplace_back([&] {
      for (int k = 0; k < 50; ++k) {
        auto cur = api.handle(make("GET", base(id)));
        auto rev = cur.headers["ETag"];
        auto r = api.handle(make("PUT", base(id), text, {{"if-match", rev}}));
        if (r.status == 200)
          ++succeeded;
        else if (r.status == 409)
          ++conflicted;
      }
    });
  }
  for (auto& t : workers) t.join();
  CHECK(succeeded + conflicted == 400);
  auto final_rev = body_of(api.handle(make("GET", base(id) + "/metrics")))["revision"].get<int>();
  CHECK(final_rev == 1 + succeeded.load());
}

TEST_CASE("simulation") {
  Api api;
  auto id = create(api, "FIG4G");
  auto r = api.handle(make("POST", base(id) + "/simulate", R"({"pass_rates":0.5,"horizon_terms":4})"));
  REQUIRE(r.status == 200);
  auto j = body_of(r);
  CHECK(j["grad_rate"][3].get<double>() == doctest::Approx(0.2704).epsilon(1e-3));
  CHECK(j["revision"] == 1);
  auto ex = body_of(api.handle(make("POST", base(id) + "/simulate", R"({"pass_rates":0.5,"horizon_terms":4,"mode":"exact"})")));
  CHECK(ex["grad_rate"][3].get<double>() == doctest::Approx(0.41797).epsilon(1e-4));
  auto mc = body_of(api.handle(make("POST", base(id) + "/simulate", R"({"pass_rates":0.5,"mode":"mc","students":2000,"seed":4})")));
  CHECK(mc["students"] == 2000);
  CHECK(mc["horizon_terms"] == 4);
  CHECK(api.handle(make("POST", base(id) + "/simulate")).status == 200);
  CHECK(api.handle(make("POST", base(id) + "/simulate", R"({"plan":"other"})")).status == 404);
  CHECK(api.handle(make("POST", base(id) + "/simulate", R"({"mode":"psychic"})")).status == 400);
  CHECK(api.handle(make("POST", base(id) + "/simulate", R"({"horizon_terms":1})")).status == 422);
}

TEST_CASE("simulation budget") {
  ServiceOptions opts;
  opts.simulation_budget = std::chrono::milliseconds(0);
  Api api(opts);
  auto id = create(api, "ENGR5");
  auto r = api.handle(make("POST", base(id) + "/simulate", R"({"mode":"mc","students":5000000})"));
  CHECK(r.status == 413);
  CHECK(body_of(r)["error"].get<std::string>().find("lower") != std::string::npos);
}

TEST_CASE("plan profile and DOT") {
  Api api;
  auto id = create(api, "C1");
  auto p = api.handle(make("GET", base(id) + "/plans/default/profile"));
  REQUIRE(p.status == 200);
  CHECK(body_of(p)["term_complexity"] == Json::array({6, 6, 3}));
  CHECK(body_of(p)["plan"]["name"] == "default");
  CHECK(api.handle(make("GET", base(id) + "/plans/none/profile")).status == 404);

  auto d = api.handle(make("GET", base(id) + "/dot?plan=default&highlight=longest&blocked_by=v1"));
  REQUIRE(d.status == 200);
  CHECK(d.content_type.find("text/vnd.graphviz") == 0);
  CHECK(d.body.find("subgraph term_1") != std::string::npos);
  CHECK(d.body.find("bold") != std::string::npos);
  CHECK(api.handle(make("GET", base(id) + "/dot?highlight=shortest")).status == 400);
  CHECK(api.handle(make("GET", base(id) + "/dot?blocked_by=zz")).status == 400);
  CHECK(api.handle(make("GET", base(id) + "/dot?plan=zz")).status == 404);
}

TEST_CASE("persistence") {
  auto dir = fs::temp_directory_path() / "curricula_store_test";
  fs::remove_all(dir);
  std::string id;
  {
    ServiceOptions opts;
    opts.data_dir = dir;
    Api api(opts);
    id = create(api, "ENGR5");
    auto other = create(api, "C2");
    CHECK(fs::exists(dir / (id + ".curriculum.json")));
    CHECK(api.handle(make("DELETE", base(other))).status == 204);
    CHECK_FALSE(fs::exists(dir / (other + ".curriculum.json")));
  }
  ServiceOptions opts;
  opts.data_dir = dir;
  Api again(opts);
  auto list = body_of(again.handle(make("GET", "/api/curricula")))["curricula"];
  REQUIRE(list.size() == 1);
  CHECK(list[0]["id"] == id);
  CHECK(body_of(again.handle(make("GET", base(id) + "/metrics")))["complexity"] == 25);
  auto fresh = create(again, "C1");
  CHECK(fresh != id);
  fs::remove_all(dir);
}

TEST_CASE("store") {
  CurriculumStore store;
  auto a = store.create(fixtures::get("C1"));
  auto b = store.create(fixtures::get("C2"));
  CHECK(a.id != b.id);
  CHECK(store.list().size() == 2);
  CHECK(store.replace(a.id, fixtures::get("C2"), 2).outcome == CurriculumStore::Outcome::conflict);
  auto ok = store.replace(a.id, fixtures::get("C2"), 1);
  CHECK(ok.outcome == CurriculumStore::Outcome::ok);
  CHECK(ok.current->revision == 2);
  CHECK(store.replace("nope", fixtures::get("C2"), 1).outcome == CurriculumStore::Outcome::not_found);
  CHECK(store.remove(a.id, 1) == CurriculumStore::Outcome::conflict);
  CHECK(store.remove(a.id, 2) == CurriculumStore::Outcome::ok);
  CHECK_FALSE(store.get(a.id).has_value());
}

TEST_CASE("HTTP round trip") {
  Api api;
  HttpServer server(api);
  int port = server.bind("127.0.0.1", 0);
  REQUIRE(port > 0);
  std::thread loop([&] { server.listen(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  auto health = client.Get("/api/health");
  REQUIRE(health);
  CHECK(health->status == 200);
  auto post = client.Post("/api/curricula", serialize_curriculum(fixtures::get("CHAIN5")), "application/json");
  REQUIRE(post);
  CHECK(post->status == 201);
  std::string id = Json::parse(post->body)["id"];
  auto put = client.Put(base(id), httplib::Headers{{"If-Match", "\"1\""}},
                        serialize_curriculum(fixtures::get("CHAIN4")), "application/json");
  REQUIRE(put);
  CHECK(put->status == 200);
  CHECK(put->get_header_value("ETag") == "\"2\"");
  auto metrics = client.Get(base(id) + "/metrics");
  REQUIRE(metrics);
  CHECK(Json::parse(metrics->body)["complexity"] == 22);
  auto dot = client.Get(base(id) + "/dot?highlight=longest");
  REQUIRE(dot);
  CHECK(dot->get_header_value("Content-Type").find("text/vnd.graphviz") == 0);
  auto del = client.Delete(base(id));
  REQUIRE(del);
  CHECK(del->status == 204);

  server.stop();
  loop.join();
}
