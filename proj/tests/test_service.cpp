#include <httplib.h>

#include <future>
#include <thread>

#include "doctest.h"
#include "heapabs/algebra.hpp"
#include "heapabs/fixtures.hpp"
#include "heapabs/http_service.hpp"
#include "heapabs/snapshot.hpp"

#include <json.hpp>

using namespace heapabs;
using nlohmann::json;

namespace {

class Running {
 public:
  explicit Running(SessionStore& store) : service_(store) {
    port_ = service_.bind("127.0.0.1", 0);
    REQUIRE(port_ > 0);
    thread_ = std::thread([this] { service_.listen(); });
    service_.wait_until_ready();
  }
  ~Running() {
    service_.stop();
    thread_.join();
  }
  httplib::Client client() const { return httplib::Client("127.0.0.1", port_); }

 private:
  HttpService service_;
  int port_ = -1;
  std::thread thread_;
};

json get_json(httplib::Client& c, const std::string& path, int expect = 200) {
  auto res = c.Get(path);
  REQUIRE(res);
  CHECK_MESSAGE(res->status == expect, path);
  return json::parse(res->body);
}

AbstractGraph graph_of(const json& j) { return deserialize(j.dump()); }

}  // namespace

TEST_CASE("store registers each content once") {
  SessionStore store;
  const std::string text = write_snapshot(exprtree_fixture());
  auto a = store.add_snapshot(text);
  auto b = store.add_snapshot(text);
  CHECK(a == b);
  CHECK(store.entries().size() == 1);
  CHECK(a->hash == hash_text(fnv1a(text)));
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK_THROWS_AS(store.add_snapshot("{}"), HeapError);

  // Concurrent registration of one document yields one shared entry.
  SessionStore shared;
  const std::string other = write_snapshot(list_fixture(50));
  std::vector<std::future<std::shared_ptr<const SessionEntry>>> futures;
  for (int i = 0; i < 8; ++i) futures.push_back(std::async(std::launch::async, [&] { return shared.add_snapshot(other); }));
  std::set<const SessionEntry*> seen;
  for (auto& f : futures) seen.insert(f.get().get());
  CHECK(shared.entries().size() == 1);
  CHECK(seen.size() == 1);
}

TEST_CASE("http api") {
  SessionStore store;
  const auto entry = store.add_snapshot(write_snapshot(exprtree_fixture()));
  const auto scene = store.add_snapshot(write_snapshot(octree_scene_fixture()));
  Running server(store);
  httplib::Client c = server.client();
  const std::string base = "/api/graph/" + entry->hash;

  const json list = get_json(c, "/api/snapshots");
  REQUIRE(list.size() == 2);
  for (const json& s : list) {
    if (s.at("hash") != entry->hash) continue;
    CHECK(s.at("objectCount") == 9);
    CHECK(s.at("bytes") == entry->total_bytes);
  }

  const json abstract = get_json(c, base + "?view=abstract");
  CHECK(graph_of(abstract) == entry->analysis.graph);
  CHECK(get_json(c, base) == abstract);
  const json reduced = get_json(c, base + "?view=reduced");
  CHECK(reduced.contains("reduced"));
  get_json(c, base + "?view=sideways", 400);

  const json node = get_json(c, base + "/node/1");
  CHECK(node.at("types") == json::array({"Var[]"}));
  CHECK(node.at("memberCount") == 1);
  CHECK(node.contains("metrics"));
  get_json(c, base + "/node/77", 404);
  get_json(c, base + "/node/abc", 404);

  const json diag = get_json(c, base + "/diagnostics");
  CHECK(diag.at("snapshot") == entry->hash);
  CHECK_FALSE(diag.at("findings").empty());

  get_json(c, "/api/graph/0123456789abcdef", 404);
  get_json(c, "/api/graph/0123456789abcdef/diagnostics", 404);

  const json singleton = get_json(c, base + "/expand/1");
  CHECK(singleton.at("nodes").size() == 1);
  CHECK(singleton.at("internal").empty());
  get_json(c, base + "/expand/999", 404);

  // The face structure of the scene expands into three nodes.
  const ReducedGraph& r = scene->analysis.reduced;
  bool found = false;
  for (const auto& [id, rn] : r.nodes) {
    if (!rn.types.contains("Face")) continue;
    const json v = get_json(c, "/api/graph/" + scene->hash + "/expand/" + std::to_string(id));
    CHECK(v.at("nodes").size() == rn.covers.size());
    found = true;
  }
  CHECK(found);
}

TEST_CASE("http zoom") {
  SessionStore store;
  const auto entry = store.add_snapshot(write_snapshot(exprtree_fixture()));
  Running server(store);
  httplib::Client c = server.client();
  const std::string zoom = "/api/graph/" + entry->hash + "/zoom";

  auto none = c.Post(zoom, R"({"interesting":[]})", "application/json");
  REQUIRE(none);
  REQUIRE(none->status == 200);
  CHECK(graph_of(json::parse(none->body).at("graph")) == entry->analysis.graph);

  auto seven = c.Post(zoom, R"({"interesting":[7]})", "application/json");
  REQUIRE(seven);
  REQUIRE(seven->status == 200);
  const json body = json::parse(seven->body);
  const AbstractGraph g = graph_of(body.at("graph"));
  const NodeId n7 = body.at("pins").at("7").get<NodeId>();
  CHECK(g.node(n7).card == Interval(1, 1));
  CHECK(g.node(n7).types == TypeSet{"Var"});
  CHECK(g.content_node_count() == 5);

  const std::size_t cached = store.zoom_cache_size();
  auto again = c.Post(zoom, R"({"interesting":[7, 7]})", "application/json");
  REQUIRE(again);
  CHECK(json::parse(again->body) == body);
  CHECK(store.zoom_cache_size() == cached);

  for (const char* bad : {"not json", R"({"interesting":"7"})", R"({"interesting":[1.5]})", R"({})"}) {
    auto res = c.Post(zoom, bad, "application/json");
    REQUIRE(res);
    CHECK_MESSAGE(res->status == 400, bad);
  }
  json many = {{"interesting", json::array()}};
  for (int i = 1; i <= 65; ++i) many["interesting"].push_back(i);
  auto too_many = c.Post(zoom, many.dump(), "application/json");
  REQUIRE(too_many);
  CHECK(too_many->status == 400);

  auto unknown = c.Post(zoom, R"({"interesting":[12345]})", "application/json");
  REQUIRE(unknown);
  CHECK(unknown->status == 404);
  auto missing = c.Post("/api/graph/0123456789abcdef/zoom", R"({"interesting":[]})", "application/json");
  REQUIRE(missing);
  CHECK(missing->status == 404);
}

TEST_CASE("concurrent reads see identical artifacts") {
  SessionStore store;
  const auto entry = store.add_snapshot(write_snapshot(octree_scene_fixture()));
  Running server(store);
  const std::string path = "/api/graph/" + entry->hash + "?view=reduced";
  httplib::Client first = server.client();
  const std::string expected = first.Get(path)->body;
  std::vector<std::future<bool>> futures;
  for (int i = 0; i < 8; ++i)
    futures.push_back(std::async(std::launch::async, [&] {
      httplib::Client c = server.client();
      for (int k = 0; k < 5; ++k) {
        auto res = c.Get(path);
        if (!res || res->body != expected) return false;
      }
      return true;
    }));
  for (auto& f : futures) CHECK(f.get());
}
