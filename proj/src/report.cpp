#include "heapabs/report.hpp"

#include <algorithm>

namespace heapabs {

namespace {

nlohmann::json card_json(const Interval& c) {
  nlohmann::json hi = c.unbounded() ? nlohmann::json("inf") : nlohmann::json(c.hi());
  return nlohmann::json::array({c.lo(), hi});
}

nlohmann::json edge_json(const AbstractEdge& e) {
  return {{"src", e.source}, {"label", e.label}, {"tgt", e.target}, {"inj", e.injective}};
}

}  // namespace

nlohmann::json to_json(const NodeMetrics& m) {
  return {{"node", m.node},
          {"objectCount", m.object_count},
          {"totalBytes", m.total_bytes},
          {"overheadBytes", m.overhead_bytes},
          {"dataBytes", m.data_bytes},
          {"heapFraction", m.heap_fraction}};
}

nlohmann::json to_json(const Finding& f) {
  return {{"kind", to_string(f.kind)}, {"node", f.node}, {"evidence", f.evidence}};
}

nlohmann::json to_json(const ReducedGraph& r) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& [id, rn] : r.nodes) {
    nlohmann::json n{{"id", id},
                     {"covers", rn.covers},
                     {"types", rn.types},
                     {"card", card_json(rn.card)},
                     {"interesting", rn.interesting},
                     {"unreachable", rn.unreachable},
                     {"group", rn.is_group()}};
    if (rn.bytes) n["bytes"] = *rn.bytes;
    nodes.push_back(std::move(n));
  }
  nlohmann::json edges = nlohmann::json::array();
  for (const ReducedEdge& e : r.edges)
    edges.push_back({{"src", e.source}, {"label", e.label}, {"tgt", e.target}, {"inj", e.injective}});
  return {{"nodes", nodes}, {"edges", edges}};
}

nlohmann::json to_json(const Subview& v) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const AbstractNode& n : v.nodes) nodes.push_back({{"id", n.id}, {"types", n.types}, {"card", card_json(n.card)}});
  nlohmann::json internal = nlohmann::json::array();
  for (const AbstractEdge& e : v.internal) internal.push_back(edge_json(e));
  nlohmann::json boundary = nlohmann::json::array();
  for (const AbstractEdge& e : v.boundary) boundary.push_back(edge_json(e));
  nlohmann::json shapes = nlohmann::json::array();
  for (const ShapeFact& f : v.shapes)
    shapes.push_back({{"node", f.node}, {"labels", f.labels}, {"shape", to_string(f.shape)}});
  return {{"nodes", nodes}, {"internal", internal}, {"boundary", boundary}, {"shapes", shapes}};
}

nlohmann::json graph_json(const AbstractGraph& g) { return nlohmann::json::parse(serialize(g)); }

nlohmann::json diagnostics_report(const Analysis& a, std::string_view snapshot_hash) {
  nlohmann::json metrics = nlohmann::json::array();
  for (const NodeMetrics& m : a.metrics) metrics.push_back(to_json(m));
  nlohmann::json findings = nlohmann::json::array();
  for (const Finding& f : a.findings) findings.push_back(to_json(f));
  return {{"tool", "heapabs"},
          {"version", HEAPABS_VERSION},
          {"snapshot", snapshot_hash},
          {"metrics", metrics},
          {"findings", findings}};
}

nlohmann::json node_detail(const Analysis& a, NodeId id) {
  auto it = a.graph.nodes.find(id);
  if (it == a.graph.nodes.end()) throw UnknownNodeError(id);
  const AbstractNode& node = it->second;
  std::size_t members = 0;
  for (const auto& [obj, n] : a.mu.forward()) members += n == id;
  nlohmann::json out{{"id", id},
                     {"types", node.types},
                     {"card", card_json(node.card)},
                     {"memberCount", members},
                     {"reducedNode", a.reduced.reduced_of.at(id)}};
  auto m = std::find_if(a.metrics.begin(), a.metrics.end(), [&](const NodeMetrics& x) { return x.node == id; });
  if (m != a.metrics.end()) out["metrics"] = to_json(*m);
  nlohmann::json findings = nlohmann::json::array();
  for (const Finding& f : a.findings)
    if (f.node == id) findings.push_back(to_json(f));
  out["findings"] = findings;
  return out;
}

}  // namespace heapabs
