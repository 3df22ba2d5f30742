#include "heapabs/abstract_graph.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "heapabs/oracle_detail.hpp"

namespace heapabs {

// ---------------------------------------------------------------------------
// AbstractGraph

AbstractGraph AbstractGraph::with_root_and_null(NodeId root, NodeId null) {
  AbstractGraph g;
  g.root = root;
  g.null = null;
  g.nodes[root] = {root, {}, Interval::exactly(1)};
  g.nodes[null] = {null, {}, Interval::exactly(1)};
  return g;
}

const AbstractNode& AbstractGraph::node(NodeId id) const {
  auto it = nodes.find(id);
  if (it == nodes.end()) throw std::out_of_range("unknown abstract node " + std::to_string(id));
  return it->second;
}

const AbstractEdge* AbstractGraph::find_edge(const EdgeKey& key) const {
  auto it = std::lower_bound(edges.begin(), edges.end(), key,
                             [](const AbstractEdge& e, const EdgeKey& k) { return key_of(e) < k; });
  if (it == edges.end() || !(key_of(*it) == key)) return nullptr;
  return &*it;
}

std::vector<const AbstractEdge*> AbstractGraph::out_edges(NodeId id) const {
  std::vector<const AbstractEdge*> out;
  auto it = std::lower_bound(edges.begin(), edges.end(), id,
                             [](const AbstractEdge& e, NodeId n) { return e.source < n; });
  for (; it != edges.end() && it->source == id; ++it) out.push_back(&*it);
  return out;
}

std::vector<const AbstractEdge*> AbstractGraph::in_edges(NodeId id) const {
  std::vector<const AbstractEdge*> in;
  for (const AbstractEdge& e : edges)
    if (e.target == id) in.push_back(&e);
  return in;
}

LabelSet AbstractGraph::self_labels(NodeId id) const {
  LabelSet labels;
  for (const AbstractEdge* e : out_edges(id))
    if (e->target == id) labels.insert(e->label);
  return labels;
}

std::vector<const ShapeFact*> AbstractGraph::shapes_of(NodeId id) const {
  std::vector<const ShapeFact*> out;
  for (const ShapeFact& s : shapes)
    if (s.node == id) out.push_back(&s);
  return out;
}

std::size_t AbstractGraph::content_node_count() const {
  return nodes.size() - (nodes.contains(root) ? 1 : 0) - (nodes.contains(null) ? 1 : 0);
}

void AbstractGraph::normalize() {
  std::sort(edges.begin(), edges.end(),
            [](const AbstractEdge& a, const AbstractEdge& b) { return key_of(a) < key_of(b); });
  // Duplicate keys keep the weaker injectivity.
  std::vector<AbstractEdge> unique;
  unique.reserve(edges.size());
  for (AbstractEdge& e : edges) {
    if (!unique.empty() && key_of(unique.back()) == key_of(e))
      unique.back().injective = unique.back().injective && e.injective;
    else
      unique.push_back(std::move(e));
  }
  edges = std::move(unique);
  std::sort(shapes.begin(), shapes.end());
  shapes.erase(std::unique(shapes.begin(), shapes.end()), shapes.end());
}

void AbstractGraph::validate() const {
  if (!nodes.contains(root)) throw std::invalid_argument("root node missing");
  if (!nodes.contains(null)) throw std::invalid_argument("null node missing");
  if (root == null) throw std::invalid_argument("root and null coincide");
  for (const auto& [id, n] : nodes)
    if (n.id != id) throw std::invalid_argument("node id mismatch at " + std::to_string(id));
  for (const AbstractEdge& e : edges) {
    if (!nodes.contains(e.source) || !nodes.contains(e.target))
      throw std::invalid_argument("edge references a missing node");
    if (e.target == root) throw std::invalid_argument("root is never an edge target");
    if (e.source == null) throw std::invalid_argument("null has no out-edges");
  }
  for (const ShapeFact& s : shapes)
    if (!nodes.contains(s.node)) throw std::invalid_argument("shape fact on a missing node");
}

// ---------------------------------------------------------------------------
// EmbeddingMap

void EmbeddingMap::assign(ObjectId object, NodeId node) { forward_[object] = node; }

std::optional<NodeId> EmbeddingMap::find(ObjectId object) const {
  auto it = forward_.find(object);
  if (it == forward_.end()) return std::nullopt;
  return it->second;
}

NodeId EmbeddingMap::at(ObjectId object) const {
  auto it = forward_.find(object);
  if (it == forward_.end())
    throw EmbeddingError("object " + std::to_string(object) + " has no abstract node");
  return it->second;
}

std::map<NodeId, std::vector<ObjectId>> EmbeddingMap::inverse() const {
  std::map<NodeId, std::vector<ObjectId>> inv;
  for (const auto& [o, n] : forward_) inv[n].push_back(o);
  return inv;
}

EmbeddingMap EmbeddingMap::composed(const std::map<NodeId, NodeId>& renumber) const {
  EmbeddingMap out;
  for (const auto& [o, n] : forward_) {
    auto it = renumber.find(n);
    if (it == renumber.end())
      throw EmbeddingError("node " + std::to_string(n) + " missing from the renumbering");
    out.forward_.emplace_hint(out.forward_.end(), o, it->second);
  }
  return out;
}

// ---------------------------------------------------------------------------
// check_embedding

std::string_view to_string(Predicate p) {
  switch (p) {
    case Predicate::Embed: return "Embed";
    case Predicate::Typing: return "Typing";
    case Predicate::Counting: return "Counting";
    case Predicate::Injective: return "Injective";
    case Predicate::Shape: return "Shape";
  }
  return "Embed";
}

bool EmbeddingReport::has(Predicate p) const {
  return std::any_of(failures.begin(), failures.end(),
                     [p](const EmbeddingFailure& f) { return f.predicate == p; });
}

namespace {

std::string describe(const ConcreteHeap& heap, const Pointer& p) {
  auto name = [](ObjectId o) {
    if (o == kRootObject) return std::string("root");
    if (o == kNullObject) return std::string("null");
    return "o" + std::to_string(o);
  };
  return name(p.source) + "-" + heap.label_text(p.label) + "->" + name(p.target);
}

std::string describe(const EdgeKey& k) {
  return "n" + std::to_string(k.source) + "-" + k.label + "->n" + std::to_string(k.target);
}

}  // namespace

EmbeddingReport check_embedding(const ConcreteHeap& heap, const AbstractGraph& graph,
                                const EmbeddingMap& mu) {
  for (const ConcreteObject& o : heap.objects()) {
    const auto n = mu.find(o.id);
    if (!n) throw EmbeddingError("embedding is not total: object " + std::to_string(o.id) + " unmapped");
    if (!graph.nodes.contains(*n))
      throw EmbeddingError("object " + std::to_string(o.id) + " maps to unknown node " +
                           std::to_string(*n));
  }
  for (const auto& [o, n] : mu.forward())
    if (!heap.contains(o))
      throw EmbeddingError("embedding maps unknown object " + std::to_string(o));
  if (!graph.nodes.contains(graph.root) || !graph.nodes.contains(graph.null))
    throw EmbeddingError("graph lacks root or null");

  auto image = [&](ObjectId o) {
    if (o == kRootObject) return graph.root;
    if (o == kNullObject) return graph.null;
    return mu.at(o);
  };

  EmbeddingReport report;

  // Embed: every concrete pointer has an abstract edge whose label covers it.
  std::map<EdgeKey, std::vector<Pointer>> by_edge;
  for (const Pointer& p : heap.pointers()) {
    EdgeKey key{image(p.source), heap.abstract_label(p.label), image(p.target)};
    if (!graph.find_edge(key)) {
      report.failures.push_back({Predicate::Embed, key.source, p,
                                 "pointer " + describe(heap, p) + " has no abstract edge " +
                                     describe(key)});
      continue;
    }
    by_edge[std::move(key)].push_back(p);
  }

  // Typing
  for (const ConcreteObject& o : heap.objects()) {
    const NodeId n = mu.at(o.id);
    const std::string& type = heap.types().at(o.type).name;
    if (!graph.node(n).types.contains(type))
      report.failures.push_back({Predicate::Typing, n, std::nullopt,
                                 "o" + std::to_string(o.id) + " of type " + type +
                                     " not in the types of n" + std::to_string(n)});
  }

  // Counting
  std::map<NodeId, std::uint64_t> counts;
  for (const auto& [o, n] : mu.forward()) ++counts[n];
  ++counts[graph.root];
  ++counts[graph.null];
  for (const auto& [id, node] : graph.nodes) {
    const std::uint64_t c = counts.contains(id) ? counts.at(id) : 0;
    if (!node.card.contains(c)) {
      std::ostringstream msg;
      msg << "n" << id << " represents " << c << " objects, outside " << node.card;
      report.failures.push_back({Predicate::Counting, id, std::nullopt, msg.str()});
    }
  }

  // Injective: per concrete label covered by each injective edge.
  for (const AbstractEdge& e : graph.edges) {
    if (!e.injective) continue;
    auto it = by_edge.find(key_of(e));
    if (it == by_edge.end()) continue;
    std::map<Label, std::vector<Pointer>> by_label;
    for (const Pointer& p : it->second) by_label[p.label].push_back(p);
    for (const auto& [label, ps] : by_label) {
      if (detail::injective_hash_scan(ps)) continue;
      report.failures.push_back({Predicate::Injective, e.source, ps.front(),
                                 "edge " + describe(key_of(e)) + " is marked injective but label " +
                                     heap.label_text(label) + " is shared"});
    }
  }

  // Shape: tree facts hold on the restricted concrete subgraph.
  std::map<NodeId, std::vector<ObjectId>> members = mu.inverse();
  members[graph.root].push_back(kRootObject);
  members[graph.null].push_back(kNullObject);
  for (const ShapeFact& s : graph.shapes) {
    if (s.shape != Shape::Tree) continue;
    std::vector<Pointer> internal;
    for (const std::string& l : s.labels) {
      auto it = by_edge.find({s.node, l, s.node});
      if (it != by_edge.end()) internal.insert(internal.end(), it->second.begin(), it->second.end());
    }
    if (detail::forest_dfs(members[s.node], internal) == Shape::Tree) continue;
    std::string labels;
    for (const std::string& l : s.labels) labels += (labels.empty() ? "" : ",") + l;
    report.failures.push_back({Predicate::Shape, s.node, std::nullopt,
                               "n" + std::to_string(s.node) + " is not a tree over {" + labels + "}"});
  }
  return report;
}

// ---------------------------------------------------------------------------
// Canonical form

Canonical canonicalize_with_map(const AbstractGraph& graph) {
  std::map<NodeId, NodeId> renumber;
  renumber[graph.root] = kRootNode;
  renumber[graph.null] = kNullNode;
  NodeId next = 1;

  auto order_key = [&](const AbstractEdge* e) {
    return std::tie(e->label, graph.node(e->target).types, e->target);
  };
  std::deque<NodeId> queue{graph.root};
  while (!queue.empty()) {
    const NodeId n = queue.front();
    queue.pop_front();
    std::vector<const AbstractEdge*> out = graph.out_edges(n);
    std::sort(out.begin(), out.end(),
              [&](const AbstractEdge* a, const AbstractEdge* b) { return order_key(a) < order_key(b); });
    for (const AbstractEdge* e : out) {
      if (renumber.contains(e->target)) continue;
      renumber[e->target] = next++;
      queue.push_back(e->target);
    }
  }
  std::vector<const AbstractNode*> rest;
  for (const auto& [id, node] : graph.nodes)
    if (!renumber.contains(id)) rest.push_back(&node);
  std::sort(rest.begin(), rest.end(), [](const AbstractNode* a, const AbstractNode* b) {
    return std::tie(a->types, a->id) < std::tie(b->types, b->id);
  });
  for (const AbstractNode* n : rest) renumber[n->id] = next++;

  Canonical out;
  out.graph.root = kRootNode;
  out.graph.null = kNullNode;
  for (const auto& [id, node] : graph.nodes) {
    AbstractNode copy = node;
    copy.id = renumber.at(id);
    out.graph.nodes.emplace(copy.id, std::move(copy));
  }
  for (const AbstractEdge& e : graph.edges)
    out.graph.edges.push_back(
        {renumber.at(e.source), e.label, renumber.at(e.target), e.injective});
  for (const ShapeFact& s : graph.shapes)
    out.graph.shapes.push_back({renumber.at(s.node), s.labels, s.shape});
  out.graph.normalize();
  out.renumber = std::move(renumber);
  return out;
}

AbstractGraph canonicalize(const AbstractGraph& graph) { return canonicalize_with_map(graph).graph; }

// ---------------------------------------------------------------------------
// ahg-1 / mu-1

using ordered_json = nlohmann::ordered_json;
using nlohmann::json;

std::string serialize(const AbstractGraph& graph) {
  ordered_json doc;
  doc["format"] = kGraphFormat;
  ordered_json nodes = ordered_json::array();
  for (const auto& [id, n] : graph.nodes) {
    ordered_json card = ordered_json::array({n.card.lo()});
    if (n.card.unbounded())
      card.push_back("inf");
    else
      card.push_back(n.card.hi());
    nodes.push_back({{"id", id}, {"types", n.types}, {"card", std::move(card)}});
  }
  doc["nodes"] = std::move(nodes);
  ordered_json edges = ordered_json::array();
  for (const AbstractEdge& e : graph.edges)
    edges.push_back({{"src", e.source}, {"label", e.label}, {"tgt", e.target}, {"inj", e.injective}});
  doc["edges"] = std::move(edges);
  ordered_json shapes = ordered_json::array();
  for (const ShapeFact& s : graph.shapes)
    shapes.push_back({{"node", s.node}, {"labels", s.labels}, {"shape", to_string(s.shape)}});
  doc["shapes"] = std::move(shapes);
  doc["root"] = graph.root;
  doc["null"] = graph.null;
  return doc.dump(1) + "\n";
}

namespace {

const json& field(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw SchemaError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(path + "." + key, "required");
  return *it;
}

void only_keys(const json& obj, std::initializer_list<std::string_view> keys, const std::string& path) {
  for (const auto& [k, _] : obj.items())
    if (std::find(keys.begin(), keys.end(), k) == keys.end())
      throw SchemaError(path + "." + k, "unknown key");
}

std::int64_t int_at(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw SchemaError(path, "expected an integer");
  return v.get<std::int64_t>();
}

std::string string_at(const json& v, const std::string& path) {
  if (!v.is_string()) throw SchemaError(path, "expected a string");
  return v.get<std::string>();
}

std::set<std::string> strings_at(const json& v, const std::string& path) {
  if (!v.is_array()) throw SchemaError(path, "expected an array");
  std::set<std::string> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.insert(string_at(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

const json& array_at(const json& doc, const char* key, const std::string& path) {
  const json& v = field(doc, key, path);
  if (!v.is_array()) throw SchemaError(path + "." + key, "expected an array");
  return v;
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("$", std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

AbstractGraph deserialize(std::string_view text) {
  const json doc = parse_json(text);
  if (!doc.is_object()) throw SchemaError("$", "expected an object");
  only_keys(doc, {"format", "nodes", "edges", "shapes", "root", "null"}, "$");
  if (string_at(field(doc, "format", "$"), "$.format") != kGraphFormat)
    throw SchemaError("$.format", "expected " + std::string(kGraphFormat));

  AbstractGraph g;
  g.root = int_at(field(doc, "root", "$"), "$.root");
  g.null = int_at(field(doc, "null", "$"), "$.null");

  const json& nodes = array_at(doc, "nodes", "$");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string path = "$.nodes[" + std::to_string(i) + "]";
    const json& jn = nodes[i];
    AbstractNode n;
    n.id = int_at(field(jn, "id", path), path + ".id");
    only_keys(jn, {"id", "types", "card"}, path);
    n.types = strings_at(field(jn, "types", path), path + ".types");
    const json& card = field(jn, "card", path);
    if (!card.is_array() || card.size() != 2) throw SchemaError(path + ".card", "expected [lo, hi]");
    const std::int64_t lo = int_at(card[0], path + ".card[0]");
    std::uint64_t hi = Interval::kInf;
    if (!(card[1].is_string() && card[1] == "inf")) {
      const std::int64_t h = int_at(card[1], path + ".card[1]");
      if (h < 0) throw SchemaError(path + ".card[1]", "negative bound");
      hi = static_cast<std::uint64_t>(h);
    }
    if (lo < 0 || static_cast<std::uint64_t>(lo) > hi)
      throw SchemaError(path + ".card", "invalid interval");
    n.card = Interval(static_cast<std::uint64_t>(lo), hi);
    if (!g.nodes.emplace(n.id, n).second) throw SchemaError(path + ".id", "duplicate node id");
  }

  const json& edges = array_at(doc, "edges", "$");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string path = "$.edges[" + std::to_string(i) + "]";
    const json& je = edges[i];
    AbstractEdge e;
    e.source = int_at(field(je, "src", path), path + ".src");
    only_keys(je, {"src", "label", "tgt", "inj"}, path);
    e.label = string_at(field(je, "label", path), path + ".label");
    e.target = int_at(field(je, "tgt", path), path + ".tgt");
    const json& inj = field(je, "inj", path);
    if (!inj.is_boolean()) throw SchemaError(path + ".inj", "expected a boolean");
    e.injective = inj.get<bool>();
    if (!g.nodes.contains(e.source)) throw SchemaError(path + ".src", "unknown node");
    if (!g.nodes.contains(e.target)) throw SchemaError(path + ".tgt", "unknown node");
    g.edges.push_back(std::move(e));
  }

  const json& shapes = array_at(doc, "shapes", "$");
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    const std::string path = "$.shapes[" + std::to_string(i) + "]";
    const json& js = shapes[i];
    ShapeFact s;
    s.node = int_at(field(js, "node", path), path + ".node");
    only_keys(js, {"node", "labels", "shape"}, path);
    s.labels = strings_at(field(js, "labels", path), path + ".labels");
    const std::string shape = string_at(field(js, "shape", path), path + ".shape");
    if (shape == "tree")
      s.shape = Shape::Tree;
    else if (shape == "any")
      s.shape = Shape::Any;
    else
      throw SchemaError(path + ".shape", "expected tree or any");
    if (!g.nodes.contains(s.node)) throw SchemaError(path + ".node", "unknown node");
    g.shapes.push_back(std::move(s));
  }
  if (!g.nodes.contains(g.root)) throw SchemaError("$.root", "unknown node");
  if (!g.nodes.contains(g.null)) throw SchemaError("$.null", "unknown node");
  if (g.root == g.null) throw SchemaError("$.null", "root and null coincide");
  g.normalize();
  return g;
}

std::string serialize_embedding(const EmbeddingMap& mu) {
  ordered_json doc;
  doc["format"] = kEmbeddingFormat;
  ordered_json map = ordered_json::object();
  for (const auto& [o, n] : mu.forward()) map[std::to_string(o)] = n;
  doc["map"] = std::move(map);
  return doc.dump(1) + "\n";
}

EmbeddingMap deserialize_embedding(std::string_view text) {
  const json doc = parse_json(text);
  if (!doc.is_object()) throw SchemaError("$", "expected an object");
  only_keys(doc, {"format", "map"}, "$");
  if (string_at(field(doc, "format", "$"), "$.format") != kEmbeddingFormat)
    throw SchemaError("$.format", "expected " + std::string(kEmbeddingFormat));
  const json& map = field(doc, "map", "$");
  if (!map.is_object()) throw SchemaError("$.map", "expected an object");
  EmbeddingMap mu;
  for (const auto& [k, v] : map.items()) {
    ObjectId o = 0;
    try {
      std::size_t used = 0;
      o = std::stoll(k, &used);
      if (used != k.size()) throw std::invalid_argument(k);
    } catch (const std::exception&) {
      throw SchemaError("$.map." + k, "object ids must be integers");
    }
    mu.assign(o, int_at(v, "$.map." + k));
  }
  return mu;
}

}  // namespace heapabs
