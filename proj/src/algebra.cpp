#include "heapabs/algebra.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

#include <json.hpp>

#include "heapabs/congruence.hpp"

namespace heapabs {

std::string_view to_string(DiffKind kind) {
  switch (kind) {
    case DiffKind::UnmatchedEdge: return "unmatched-edge";
    case DiffKind::UnmatchedNode: return "unmatched-node";
    case DiffKind::NodeConflict: return "node-conflict";
    case DiffKind::TypeExcess: return "type-excess";
    case DiffKind::CardinalityExcess: return "cardinality-excess";
    case DiffKind::InjectivityWeakening: return "injectivity-weakening";
    case DiffKind::ShapeWeakening: return "shape-weakening";
  }
  return "unknown";
}

std::string_view to_string(MergeMode mode) { return mode == MergeMode::Join ? "join" : "widen"; }

AmbiguousGraphError::AmbiguousGraphError(int which, NodeId node, std::string label)
    : std::invalid_argument("graph " + std::to_string(which) + ": node " + std::to_string(node) +
                            " has overlapping '" + label + "' edges"),
      which_(which),
      node_(node),
      label_(std::move(label)) {}

namespace {

bool intersects(const TypeSet& a, const TypeSet& b) {
  auto i = a.begin(), j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j)
      ++i;
    else if (*j < *i)
      ++j;
    else
      return true;
  }
  return false;
}

std::string text(const EdgeKey& k) {
  return std::to_string(k.source) + " -" + k.label + "-> " + std::to_string(k.target);
}

std::string text(const Interval& i) {
  std::ostringstream os;
  os << i;
  return os.str();
}

/// Edge matching and property checks for one compare call.
class Matcher {
 public:
  Matcher(const AbstractGraph& g1, const AbstractGraph& g2) : g1_(g1), g2_(g2) {}

  CompareResult run() {
    phi_.nodes[g1_.root] = g2_.root;
    phi_.nodes[g1_.null] = g2_.null;
    propagate({g1_.root}, phi_, diffs_);
    seed_unreachable();
    for (const auto& [id, node] : g1_.nodes)
      if (!phi_.nodes.contains(id))
        diffs_.push_back({DiffKind::UnmatchedNode, id, std::nullopt,
                          "no counterpart for node " + std::to_string(id)});
    check_properties(phi_, false, diffs_);

    CompareResult out;
    std::sort(diffs_.begin(), diffs_.end());
    out.leq = diffs_.empty();
    if (diffs_.size() > kMaxDiffs) {
      diffs_.resize(kMaxDiffs);
      out.truncated = true;
    }
    out.diff = std::move(diffs_);
    out.phi = std::move(phi_);
    return out;
  }

 private:
  /// Extends `phi` breadth-first from `start`, recording structural diffs.
  void propagate(std::deque<NodeId> queue, IsomorphismMap& phi, std::vector<Diff>& diffs) const {
    while (!queue.empty()) {
      const NodeId n1 = queue.front();
      queue.pop_front();
      const NodeId n2 = phi.nodes.at(n1);
      const auto out2 = g2_.out_edges(n2);
      for (const AbstractEdge* e1 : g1_.out_edges(n1)) {
        const bool to_null = e1->target == g1_.null;
        const TypeSet& t1 = g1_.node(e1->target).types;
        std::vector<const AbstractEdge*> candidates;
        for (const AbstractEdge* e2 : out2) {
          if (e2->label != e1->label) continue;
          const bool match = to_null ? e2->target == g2_.null
                                     : e2->target != g2_.null && intersects(t1, g2_.node(e2->target).types);
          if (match) candidates.push_back(e2);
        }
        if (candidates.empty()) {
          diffs.push_back({DiffKind::UnmatchedEdge, n1, key_of(*e1), "no matching edge from node " +
                                                                          std::to_string(n2)});
          continue;
        }
        if (candidates.size() > 1) {
          diffs.push_back({DiffKind::NodeConflict, e1->target, key_of(*e1),
                           "target types overlap several edges of node " + std::to_string(n2)});
          continue;
        }
        const AbstractEdge* e2 = candidates.front();
        phi.edges[key_of(*e1)] = key_of(*e2);
        auto [it, fresh] = phi.nodes.try_emplace(e1->target, e2->target);
        if (fresh) {
          queue.push_back(e1->target);
        } else if (it->second != e2->target) {
          diffs.push_back({DiffKind::NodeConflict, e1->target, key_of(*e1),
                           "maps to both " + std::to_string(it->second) + " and " +
                               std::to_string(e2->target)});
        }
      }
    }
  }

  bool has_outside_in_edge(NodeId n) const {
    for (const AbstractEdge* e : g1_.in_edges(n))
      if (e->source != n) return true;
    return false;
  }

  std::optional<NodeId> next_seed(const IsomorphismMap& phi, const std::set<NodeId>& skipped) const {
    std::optional<NodeId> seed;
    for (const auto& [id, node] : g1_.nodes) {
      if (phi.nodes.contains(id) || skipped.contains(id)) continue;
      if (!seed) seed = id;
      if (!has_outside_in_edge(id)) return id;
    }
    return seed;
  }

  std::vector<NodeId> candidates_for(NodeId seed) const {
    const TypeSet& types = g1_.node(seed).types;
    std::vector<NodeId> out;
    if (types.empty()) return out;
    for (const auto& [id, node] : g2_.nodes)
      if (!g2_.is_special(id) && std::includes(node.types.begin(), node.types.end(), types.begin(), types.end()))
        out.push_back(id);
    return out;
  }

  /// Maps `seed` to `c` and propagates; nullopt when that conflicts.
  std::optional<IsomorphismMap> extend(const IsomorphismMap& phi, NodeId seed, NodeId c) const {
    IsomorphismMap trial = phi;
    std::vector<Diff> local;
    trial.nodes[seed] = c;
    propagate({seed}, trial, local);
    if (local.empty()) check_properties(trial, true, local);
    if (!local.empty()) return std::nullopt;
    return trial;
  }

  // Candidate domains for the nodes the root traversal left unmapped,
  // pruned to arc consistency over g1's edges.
  using Domains = std::map<NodeId, std::vector<NodeId>>;

  /// Target of the single edge of `c` matching `e1`'s label and target types.
  std::optional<NodeId> match_from(NodeId c, const AbstractEdge& e1) const {
    std::optional<NodeId> found;
    const bool to_null = e1.target == g1_.null;
    const TypeSet& t1 = g1_.node(e1.target).types;
    auto it = out2_.find(c);
    if (it == out2_.end()) return std::nullopt;
    for (const AbstractEdge* e2 : it->second) {
      if (e2->label != e1.label) continue;
      const bool match = to_null ? e2->target == g2_.null
                                 : e2->target != g2_.null && intersects(t1, g2_.node(e2->target).types);
      if (!match) continue;
      if (found) return std::nullopt;
      found = e2->target;
    }
    return found;
  }

  bool arc_consistent(Domains& d) const {
    for (bool changed = true; changed;) {
      changed = false;
      for (const AbstractEdge& e1 : g1_.edges) {
        std::vector<NodeId>& ds = d.at(e1.source);
        std::vector<NodeId>& dt = d.at(e1.target);
        if (ds.size() == 1 && dt.size() == 1 && phi_.nodes.contains(e1.source) &&
            phi_.nodes.contains(e1.target))
          continue;
        std::vector<NodeId> keep;
        std::set<NodeId> supported;
        for (NodeId c : ds) {
          const std::optional<NodeId> m = match_from(c, e1);
          if (m && std::binary_search(dt.begin(), dt.end(), *m)) {
            keep.push_back(c);
            supported.insert(*m);
          }
        }
        std::vector<NodeId> targets;
        for (NodeId t : dt)
          if (supported.contains(t)) targets.push_back(t);
        if (keep.empty() || targets.empty()) return false;
        if (keep.size() != ds.size() || targets.size() != dt.size()) changed = true;
        ds = std::move(keep);
        d.at(e1.target) = std::move(targets);
      }
    }
    return true;
  }

  IsomorphismMap assignment(const Domains& d) const {
    IsomorphismMap phi;
    for (const auto& [n, dom] : d)
      if (dom.size() == 1) phi.nodes[n] = dom.front();
    for (const AbstractEdge& e1 : g1_.edges) {
      auto s = phi.nodes.find(e1.source);
      if (s == phi.nodes.end() || !phi.nodes.contains(e1.target)) continue;
      if (const std::optional<NodeId> m = match_from(s->second, e1))
        phi.edges[key_of(e1)] = {s->second, e1.label, *m};
    }
    return phi;
  }

  std::optional<IsomorphismMap> solve(Domains d, std::size_t& budget) const {
    if (!arc_consistent(d)) return std::nullopt;
    IsomorphismMap phi = assignment(d);
    std::vector<Diff> diffs;
    check_properties(phi, true, diffs);
    if (!diffs.empty() || !lower_bounds_reachable(phi)) return std::nullopt;
    std::optional<NodeId> branch;
    for (const auto& [n, dom] : d)
      if (dom.size() > 1 && (!branch || dom.size() < d.at(*branch).size())) branch = n;
    if (!branch) {
      check_properties(phi, false, diffs);
      if (diffs.empty()) return phi;
      return std::nullopt;
    }
    for (NodeId c : d.at(*branch)) {
      if (budget == 0) return std::nullopt;
      --budget;
      Domains next = d;
      next.at(*branch) = {c};
      if (std::optional<IsomorphismMap> found = solve(std::move(next), budget)) return found;
    }
    return std::nullopt;
  }

  /// Every right node below its cardinality lower bound can still collect
  /// enough from unmapped left nodes of fitting type.
  bool lower_bounds_reachable(const IsomorphismMap& phi) const {
    std::map<NodeId, std::uint64_t> have;
    for (const auto& [n1, n2] : phi.nodes) have[n2] = (Interval(0, have[n2]) + g1_.node(n1).card).hi();
    for (const auto& [m, node] : g2_.nodes) {
      if (node.card.lo() == 0) continue;
      std::uint64_t total = have[m];
      for (const auto& [n, left] : g1_.nodes) {
        if (total >= node.card.lo()) break;
        if (phi.nodes.contains(n) || left.types.empty()) continue;
        if (std::includes(node.types.begin(), node.types.end(), left.types.begin(), left.types.end()))
          total = (Interval(0, total) + left.card).hi();
      }
      if (total < node.card.lo()) return false;
    }
    return true;
  }

  /// Nodes the root traversal never reached are matched by a bounded
  /// constraint search; whatever it cannot settle is placed first-fit.
  void seed_unreachable() {
    if (!next_seed(phi_, {})) return;
    std::vector<Diff> base;
    check_properties(phi_, true, base);
    if (base.empty()) {
      for (const AbstractEdge& e : g2_.edges) out2_[e.source].push_back(&e);
      Domains d;
      for (const auto& [n, node] : g1_.nodes) {
        auto it = phi_.nodes.find(n);
        d[n] = it != phi_.nodes.end() ? std::vector<NodeId>{it->second} : candidates_for(n);
      }
      std::size_t budget = kSearchBudget;
      if (std::optional<IsomorphismMap> found = solve(std::move(d), budget)) {
        phi_ = std::move(*found);
        return;
      }
    }
    std::set<NodeId> skipped;
    while (const std::optional<NodeId> seed = next_seed(phi_, skipped)) {
      bool placed = false;
      for (NodeId c : candidates_for(*seed)) {
        if (std::optional<IsomorphismMap> trial = extend(phi_, *seed, c)) {
          phi_ = std::move(*trial);
          placed = true;
          break;
        }
      }
      if (!placed) skipped.insert(*seed);
    }
  }

  static constexpr std::size_t kSearchBudget = 20000;

  /// The four property conjuncts along `phi`. A partial check skips the
  /// cardinality lower bounds, which later preimages may still meet.
  void check_properties(const IsomorphismMap& phi, bool partial, std::vector<Diff>& diffs_) const {
    std::map<NodeId, std::vector<NodeId>> pre;
    for (const auto& [n1, n2] : phi.nodes) pre[n2].push_back(n1);
    std::map<EdgeKey, std::vector<EdgeKey>> pre_edges;
    for (const auto& [e1, e2] : phi.edges) pre_edges[e2].push_back(e1);

    for (const auto& [n1, n2] : phi.nodes) {
      const TypeSet& t1 = g1_.node(n1).types;
      const TypeSet& t2 = g2_.node(n2).types;
      for (const std::string& t : t1)
        if (!t2.contains(t))
          diffs_.push_back({DiffKind::TypeExcess, n1, std::nullopt,
                            "type " + t + " missing from node " + std::to_string(n2)});
    }

    for (const auto& [m, node] : g2_.nodes) {
      Interval sum(0, 0);
      auto it = pre.find(m);
      if (it != pre.end())
        for (NodeId n : it->second) sum = sum + g1_.node(n).card;
      const bool fits = partial ? sum.hi() <= node.card.hi() : node.card.contains(sum);
      if (!fits)
        diffs_.push_back({DiffKind::CardinalityExcess, m, std::nullopt,
                          "represents " + text(sum) + " but allows " + text(node.card)});
    }

    for (const AbstractEdge& e2 : g2_.edges) {
      if (!e2.injective) continue;
      auto it = pre_edges.find(key_of(e2));
      if (it == pre_edges.end()) continue;
      std::set<NodeId> targets;
      for (const EdgeKey& k : it->second) {
        const AbstractEdge* e1 = g1_.find_edge(k);
        if (!e1->injective) {
          diffs_.push_back({DiffKind::InjectivityWeakening, e2.source, k,
                            "non-injective edge maps onto injective " + text(key_of(e2))});
        } else if (!targets.insert(k.target).second) {
          diffs_.push_back({DiffKind::InjectivityWeakening, e2.source, k,
                            "edges sharing a target map onto injective " + text(key_of(e2))});
        }
      }
    }

    for (const ShapeFact& s2 : g2_.shapes) {
      if (s2.shape != Shape::Tree || s2.labels.empty()) continue;
      auto it = pre.find(s2.node);
      if (it == pre.end()) continue;
      if (it->second.size() > 1) {
        diffs_.push_back({DiffKind::ShapeWeakening, s2.node, std::nullopt,
                          "several nodes share a tree-shaped counterpart"});
        continue;
      }
      const NodeId n = it->second.front();
      bool covered = false;
      for (const ShapeFact* s1 : g1_.shapes_of(n))
        covered |= s1->shape == Shape::Tree &&
                   std::includes(s1->labels.begin(), s1->labels.end(), s2.labels.begin(), s2.labels.end());
      if (!covered)
        diffs_.push_back({DiffKind::ShapeWeakening, s2.node, std::nullopt,
                          "node " + std::to_string(n) + " lacks a tree fact covering the labels of node " +
                              std::to_string(s2.node)});
    }
  }

  const AbstractGraph& g1_;
  const AbstractGraph& g2_;
  IsomorphismMap phi_;
  std::vector<Diff> diffs_;
  std::map<NodeId, std::vector<const AbstractEdge*>> out2_;
};

}  // namespace

void require_unambiguous(const AbstractGraph& g, int which) {
  for (const auto& [id, node] : g.nodes) {
    const auto out = g.out_edges(id);
    for (std::size_t a = 0; a < out.size(); ++a)
      for (std::size_t b = a + 1; b < out.size(); ++b) {
        if (out[a]->label != out[b]->label) continue;
        if (intersects(g.node(out[a]->target).types, g.node(out[b]->target).types))
          throw AmbiguousGraphError(which, id, out[a]->label);
      }
  }
}

CompareResult compare(const AbstractGraph& g1, const AbstractGraph& g2) {
  require_unambiguous(g1, 1);
  require_unambiguous(g2, 2);
  return Matcher(g1, g2).run();
}

std::string compare_to_json(const CompareResult& result) {
  nlohmann::ordered_json doc;
  doc["result"] = result.leq ? "leq" : "incomparable";
  doc["truncated"] = result.truncated;
  auto diffs = nlohmann::ordered_json::array();
  for (const Diff& d : result.diff) {
    nlohmann::ordered_json j;
    j["kind"] = std::string(to_string(d.kind));
    if (d.node) j["node"] = *d.node;
    if (d.edge) j["edge"] = {{"src", d.edge->source}, {"label", d.edge->label}, {"tgt", d.edge->target}};
    j["detail"] = d.detail;
    diffs.push_back(std::move(j));
  }
  doc["diff"] = std::move(diffs);
  nlohmann::ordered_json phi = nlohmann::ordered_json::object();
  for (const auto& [a, b] : result.phi.nodes) phi[std::to_string(a)] = b;
  doc["phi"] = std::move(phi);
  return doc.dump(1) + "\n";
}

// ---------------------------------------------------------------------------
// merge

namespace {

/// Type groups implied by the graphs themselves: the types of any node with
/// a self-edge belong together.
class LiftedRelation {
 public:
  LiftedRelation(const AbstractGraph& g1, const AbstractGraph& g2,
                 const std::map<std::string, std::uint32_t>& type_ids)
      : uf_(type_ids.size()), recursive_(type_ids.size(), false) {
    for (const AbstractGraph* g : {&g1, &g2}) {
      for (const AbstractEdge& e : g->edges) {
        if (e.source != e.target || g->is_special(e.source)) continue;
        const TypeSet& types = g->node(e.source).types;
        std::optional<std::uint32_t> first;
        for (const std::string& t : types) {
          const std::uint32_t id = type_ids.at(t);
          recursive_[id] = true;
          if (first) uf_.unite(*first, id);
          first = id;
        }
      }
    }
  }

  bool related(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
    for (std::uint32_t x : a) {
      if (!recursive_[x]) continue;
      for (std::uint32_t y : b)
        if (recursive_[y] && uf_.same(x, y)) return true;
    }
    return false;
  }

 private:
  UnionFind uf_;
  std::vector<bool> recursive_;
};

}  // namespace

MergeResult merge(const AbstractGraph& g1, const AbstractGraph& g2, MergeMode mode) {
  // Dense elements: 0 root, 1 null, then g1's content nodes, then g2's.
  std::map<std::string, std::uint32_t> type_ids;
  std::map<std::string, std::uint32_t> label_ids;
  for (const AbstractGraph* g : {&g1, &g2}) {
    for (const auto& [id, node] : g->nodes)
      for (const std::string& t : node.types) type_ids.emplace(t, 0);
    for (const AbstractEdge& e : g->edges) label_ids.emplace(e.label, 0);
  }
  std::uint32_t next_id = 0;
  for (auto& [name, id] : type_ids) id = next_id++;
  next_id = 0;
  for (auto& [name, id] : label_ids) id = next_id++;

  const AbstractGraph* graphs[2] = {&g1, &g2};
  std::map<NodeId, std::uint32_t> dense[2];
  std::vector<std::pair<int, NodeId>> origin{{-1, kRootNode}, {-1, kNullNode}};
  std::vector<std::vector<std::uint32_t>> types{{}, {}};
  for (int side = 0; side < 2; ++side) {
    const AbstractGraph& g = *graphs[side];
    dense[side][g.root] = 0;
    dense[side][g.null] = 1;
    for (const auto& [id, node] : g.nodes) {
      if (g.is_special(id)) continue;
      dense[side][id] = static_cast<std::uint32_t>(origin.size());
      origin.emplace_back(side, id);
      std::vector<std::uint32_t> ts;
      for (const std::string& t : node.types) ts.push_back(type_ids.at(t));
      types.push_back(std::move(ts));
    }
  }
  std::vector<ClosureEdge> edges;
  for (int side = 0; side < 2; ++side)
    for (const AbstractEdge& e : graphs[side]->edges)
      edges.push_back({dense[side].at(e.source), label_ids.at(e.label), dense[side].at(e.target)});
  std::vector<bool> pinned(origin.size(), false);
  pinned[0] = pinned[1] = true;
  PartitionClosure closure(types, edges, pinned);

  // Same-named variables.
  for (const AbstractEdge* a : g1.out_edges(g1.root))
    for (const AbstractEdge* b : g2.out_edges(g2.root))
      if (a->label == b->label && a->target != g1.null && b->target != g2.null)
        closure.unite(dense[0].at(a->target), dense[1].at(b->target));

  LiftedRelation rel(g1, g2, type_ids);
  for (bool changed = true; changed;) {
    changed = false;
    for (const ClosureEdge& e : edges) {
      if (e.source < 2 || e.target < 2) continue;
      if (closure.find(e.source) == closure.find(e.target)) continue;
      if (rel.related(closure.types_of(e.source), closure.types_of(e.target)))
        changed |= closure.unite(e.source, e.target);
    }
    const std::size_t before = closure.union_count();
    closure.close();
    changed |= closure.union_count() != before;
  }

  // Provisional ids: root -1, null 0, class k -> least member index.
  auto class_id = [&](std::uint32_t d) -> NodeId {
    const std::uint32_t c = closure.least(d);
    if (c == 0) return kRootNode;
    if (c == 1) return kNullNode;
    return static_cast<NodeId>(c);
  };

  AbstractGraph g3 = AbstractGraph::with_root_and_null();
  std::map<NodeId, std::vector<NodeId>> pre[2];
  for (int side = 0; side < 2; ++side)
    for (const auto& [id, d] : dense[side]) pre[side][class_id(d)].push_back(id);

  for (std::uint32_t d = 2; d < origin.size(); ++d) {
    const NodeId m = class_id(d);
    if (g3.nodes.contains(m)) continue;
    AbstractNode node;
    node.id = m;
    Interval sums[2] = {Interval(0, 0), Interval(0, 0)};
    for (int side = 0; side < 2; ++side) {
      auto it = pre[side].find(m);
      if (it == pre[side].end()) continue;
      for (NodeId n : it->second) {
        const AbstractNode& src = graphs[side]->node(n);
        node.types.insert(src.types.begin(), src.types.end());
        sums[side] = sums[side] + src.card;
      }
    }
    node.card = mode == MergeMode::Join ? hull(sums[0], sums[1]) : widen(sums[0], sums[1]);
    g3.nodes.emplace(m, std::move(node));
  }

  // Edges with preimages per side.
  std::map<EdgeKey, std::vector<const AbstractEdge*>> edge_pre[2];
  IsomorphismMap eta[2];
  for (int side = 0; side < 2; ++side) {
    for (const AbstractEdge& e : graphs[side]->edges) {
      const EdgeKey k{class_id(dense[side].at(e.source)), e.label, class_id(dense[side].at(e.target))};
      edge_pre[side][k].push_back(&e);
      eta[side].edges[key_of(e)] = k;
    }
    for (const auto& [id, d] : dense[side]) eta[side].nodes[id] = class_id(d);
  }
  std::set<EdgeKey> keys;
  for (int side = 0; side < 2; ++side)
    for (const auto& [k, v] : edge_pre[side]) keys.insert(k);
  for (const EdgeKey& k : keys) {
    bool injective = true;
    for (int side = 0; side < 2; ++side) {
      auto it = edge_pre[side].find(k);
      if (it == edge_pre[side].end()) continue;
      std::set<NodeId> targets;
      for (const AbstractEdge* e : it->second)
        injective = injective && e->injective && targets.insert(e->target).second;
    }
    g3.edges.push_back({k.source, k.label, k.target, injective});
  }
  g3.normalize();

  // Shape facts.
  for (const auto& [m, node] : g3.nodes) {
    if (g3.is_special(m)) continue;
    const LabelSet self = g3.self_labels(m);
    std::vector<LabelSet> candidates;
    bool single = true;
    std::vector<std::vector<LabelSet>> trees;
    for (int side = 0; side < 2; ++side) {
      auto it = pre[side].find(m);
      if (it == pre[side].end()) continue;
      if (it->second.size() > 1) single = false;
      std::vector<LabelSet> sets;
      for (const ShapeFact* f : graphs[side]->shapes_of(it->second.front()))
        if (f->shape == Shape::Tree) sets.push_back(f->labels);
      trees.push_back(std::move(sets));
    }
    if (single) {
      if (trees.size() == 1) {
        candidates = trees[0];
      } else if (trees.size() == 2) {
        for (const LabelSet& a : trees[0])
          for (const LabelSet& b : trees[1]) {
            LabelSet both;
            std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(both, both.end()));
            candidates.push_back(std::move(both));
          }
      }
    }
    std::set<LabelSet> maximal;
    for (const LabelSet& c : candidates) {
      const bool dominated = std::any_of(candidates.begin(), candidates.end(), [&](const LabelSet& o) {
        return o.size() > c.size() && std::includes(o.begin(), o.end(), c.begin(), c.end());
      });
      if (!dominated) maximal.insert(c);
    }
    if (maximal.empty()) maximal.insert(LabelSet{});
    bool covers_self = false;
    for (const LabelSet& l : maximal) {
      g3.shapes.push_back({m, l, Shape::Tree});
      covers_self |= l == self;
    }
    if (!covers_self) g3.shapes.push_back({m, self, Shape::Any});
  }
  g3.normalize();

  Canonical canon = canonicalize_with_map(g3);
  MergeResult result;
  result.graph = std::move(canon.graph);
  result.mode = mode;
  for (int side = 0; side < 2; ++side) {
    for (auto& [n, m] : eta[side].nodes) m = canon.renumber.at(m);
    for (auto& [k, v] : eta[side].edges) v = {canon.renumber.at(v.source), v.label, canon.renumber.at(v.target)};
  }
  result.eta1 = std::move(eta[0]);
  result.eta2 = std::move(eta[1]);
  return result;
}

}  // namespace heapabs
