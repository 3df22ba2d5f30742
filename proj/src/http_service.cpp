#include "heapabs/http_service.hpp"

#include <httplib.h>

#include "heapabs/report.hpp"

namespace heapabs {

namespace {

using nlohmann::json;

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  send_json(res, {{"error", message}}, status);
}

std::optional<NodeId> parse_id(const std::string& text) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used != text.size()) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace

struct HttpService::Impl {
  SessionStore& store;
  httplib::Server server;

  explicit Impl(SessionStore& s) : store(s) { routes(); }

  std::shared_ptr<const SessionEntry> entry_or_404(const httplib::Request& req, httplib::Response& res) {
    auto entry = store.find(req.matches[1].str());
    if (!entry) send_error(res, 404, "unknown snapshot " + req.matches[1].str());
    return entry;
  }

  void routes() {
    server.Get("/api/snapshots", [this](const httplib::Request&, httplib::Response& res) {
      json out = json::array();
      for (const auto& e : store.entries())
        out.push_back({{"hash", e->hash}, {"objectCount", e->heap.object_count()}, {"bytes", e->total_bytes}});
      send_json(res, out);
    });

    server.Get(R"(/api/graph/([0-9a-f]+))", [this](const httplib::Request& req, httplib::Response& res) {
      auto entry = entry_or_404(req, res);
      if (!entry) return;
      const std::string view = req.has_param("view") ? req.get_param_value("view") : "abstract";
      if (view == "abstract") {
        send_json(res, graph_json(entry->analysis.graph));
      } else if (view == "reduced") {
        json out = graph_json(entry->analysis.graph);
        out["reduced"] = to_json(entry->analysis.reduced);
        send_json(res, out);
      } else {
        send_error(res, 400, "view must be abstract or reduced");
      }
    });

    server.Get(R"(/api/graph/([0-9a-f]+)/node/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      auto entry = entry_or_404(req, res);
      if (!entry) return;
      const auto id = parse_id(req.matches[2].str());
      if (!id || !entry->analysis.graph.nodes.contains(*id)) {
        send_error(res, 404, "unknown node " + req.matches[2].str());
        return;
      }
      send_json(res, node_detail(entry->analysis, *id));
    });

    server.Get(R"(/api/graph/([0-9a-f]+)/diagnostics)", [this](const httplib::Request& req, httplib::Response& res) {
      auto entry = entry_or_404(req, res);
      if (!entry) return;
      send_json(res, diagnostics_report(entry->analysis, entry->hash));
    });

    server.Get(R"(/api/graph/([0-9a-f]+)/expand/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      auto entry = entry_or_404(req, res);
      if (!entry) return;
      const auto id = parse_id(req.matches[2].str());
      if (!id || !entry->analysis.reduced.nodes.contains(*id)) {
        send_error(res, 404, "unknown reduced node " + req.matches[2].str());
        return;
      }
      send_json(res, to_json(expand(entry->analysis.graph, entry->analysis.reduced, *id)));
    });

    server.Post(R"(/api/graph/([0-9a-f]+)/zoom)", [this](const httplib::Request& req, httplib::Response& res) {
      auto entry = entry_or_404(req, res);
      if (!entry) return;
      std::set<ObjectId> ids;
      try {
        const json body = json::parse(req.body);
        const json& list = body.at("interesting");
        if (!list.is_array()) throw std::invalid_argument("interesting must be an array");
        for (const json& v : list) {
          if (!v.is_number_integer()) throw std::invalid_argument("object ids must be integers");
          ids.insert(v.get<ObjectId>());
        }
      } catch (const std::exception& e) {
        send_error(res, 400, std::string("malformed body: ") + e.what());
        return;
      }
      if (ids.size() > kMaxZoomIds) {
        send_error(res, 400, "at most " + std::to_string(kMaxZoomIds) + " interesting ids");
        return;
      }
      for (ObjectId id : ids)
        if (!entry->heap.contains(id)) {
          send_error(res, 404, "unknown object " + std::to_string(id));
          return;
        }
      try {
        const auto z = store.zoom(*entry, ids);
        json pins = json::object();
        for (ObjectId id : ids) pins[std::to_string(id)] = z->mu.at(id);
        send_json(res, {{"graph", graph_json(z->graph)}, {"pins", pins}});
      } catch (const std::exception& e) {
        send_error(res, 500, std::string("zoom failed: ") + e.what());
      }
    });

    server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      std::string what = "internal error";
      try {
        std::rethrow_exception(ep);
      } catch (const std::exception& e) {
        what = e.what();
      } catch (...) {
      }
      send_error(res, 500, what);
    });
  }
};

HttpService::HttpService(SessionStore& store) : impl_(std::make_unique<Impl>(store)) {}
HttpService::~HttpService() { stop(); }

int HttpService::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpService::listen() { return impl_->server.listen_after_bind(); }
void HttpService::stop() { impl_->server.stop(); }
void HttpService::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace heapabs
