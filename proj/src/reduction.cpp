#include "heapabs/reduction.hpp"

#include <algorithm>
#include <deque>
#include <string>

namespace heapabs {

namespace {

std::set<NodeId> reachable_from_root(const AbstractGraph& g) {
  std::set<NodeId> seen{g.root};
  std::deque<NodeId> work{g.root};
  while (!work.empty()) {
    const NodeId n = work.front();
    work.pop_front();
    for (const AbstractEdge* e : g.out_edges(n))
      if (seen.insert(e->target).second) work.push_back(e->target);
  }
  return seen;
}

}  // namespace

std::set<NodeId> interesting_nodes(const AbstractGraph& g, const ReductionOptions& opts) {
  std::set<NodeId> out{g.null};
  std::set<NodeId> vars;
  for (const AbstractEdge* e : g.out_edges(g.root))
    if (e->target != g.null) vars.insert(e->target);
  for (NodeId v : vars) {
    out.insert(v);
    for (const AbstractEdge* e : g.out_edges(v)) out.insert(e->target);
    if (opts.successors_only) continue;
    for (const AbstractEdge* e : g.in_edges(v))
      if (e->source != g.root) out.insert(e->source);
  }
  return out;
}

std::map<NodeId, NodeId> immediate_dominators(const AbstractGraph& g, const std::set<NodeId>& interesting) {
  const std::set<NodeId> reachable = reachable_from_root(g);
  std::map<NodeId, std::vector<NodeId>> succ;
  for (const AbstractEdge& e : g.edges) {
    if (e.target == g.null || e.target == g.root) continue;
    if (e.source != g.root && interesting.contains(e.target)) continue;
    succ[e.source].push_back(e.target);
  }
  for (NodeId n : interesting)
    if (n != g.null && n != g.root && reachable.contains(n)) succ[g.root].push_back(n);
  for (auto& [n, list] : succ) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }

  // Reverse postorder by an explicit depth-first walk.
  std::vector<NodeId> post;
  std::set<NodeId> visited{g.root};
  std::vector<std::pair<NodeId, std::size_t>> stack{{g.root, 0}};
  while (!stack.empty()) {
    auto& [n, next] = stack.back();
    const std::vector<NodeId>& out = succ[n];
    if (next < out.size()) {
      const NodeId m = out[next++];
      if (visited.insert(m).second) stack.push_back({m, 0});
      continue;
    }
    post.push_back(n);
    stack.pop_back();
  }
  std::map<NodeId, std::size_t> order;
  for (std::size_t i = 0; i < post.size(); ++i) order[post[i]] = i;
  std::map<NodeId, std::vector<NodeId>> pred;
  for (const auto& [n, out] : succ)
    if (order.contains(n))
      for (NodeId m : out) pred[m].push_back(n);

  std::map<NodeId, NodeId> idom{{g.root, g.root}};
  auto intersect = [&](NodeId a, NodeId b) {
    while (a != b) {
      while (order[a] < order[b]) a = idom[a];
      while (order[b] < order[a]) b = idom[b];
    }
    return a;
  };
  for (bool changed = true; changed;) {
    changed = false;
    for (auto it = post.rbegin(); it != post.rend(); ++it) {
      const NodeId n = *it;
      if (n == g.root) continue;
      std::optional<NodeId> best;
      for (NodeId p : pred[n]) {
        if (!idom.contains(p)) continue;
        best = best ? intersect(p, *best) : p;
      }
      if (best && (!idom.contains(n) || idom[n] != *best)) {
        idom[n] = *best;
        changed = true;
      }
    }
  }
  return idom;
}

ReducedGraph reduce(const AbstractGraph& g, const ReductionOptions& opts,
                    const std::map<NodeId, std::uint64_t>* node_bytes) {
  const std::set<NodeId> interesting = interesting_nodes(g, opts);
  const std::map<NodeId, NodeId> idom = immediate_dominators(g, interesting);

  ReducedGraph r;
  std::vector<NodeId> unreachable;
  for (const auto& [id, node] : g.nodes) {
    if (g.is_special(id)) {
      r.reduced_of[id] = id;
      continue;
    }
    if (!idom.contains(id)) {
      unreachable.push_back(id);
      continue;
    }
    NodeId head = id;
    while (!interesting.contains(head) && idom.at(head) != g.root) head = idom.at(head);
    r.reduced_of[id] = head;
  }
  if (!unreachable.empty())
    for (NodeId id : unreachable) r.reduced_of[id] = unreachable.front();

  for (const auto& [id, head] : r.reduced_of) {
    const AbstractNode& node = g.node(id);
    auto [it, fresh] = r.nodes.try_emplace(head);
    ReducedNode& rn = it->second;
    if (fresh) {
      rn.id = head;
      rn.card = Interval(0, 0);
      rn.interesting = interesting.contains(head) && !g.is_special(head);
      rn.unreachable = !unreachable.empty() && head == unreachable.front();
      if (node_bytes) rn.bytes = 0;
    }
    rn.covers.push_back(id);
    rn.types.insert(node.types.begin(), node.types.end());
    rn.card = rn.card + node.card;
    if (node_bytes) {
      auto b = node_bytes->find(id);
      if (b != node_bytes->end()) *rn.bytes += b->second;
    }
  }

  std::map<EdgeKey, bool> folded;
  for (const AbstractEdge& e : g.edges) {
    const NodeId s = r.reduced_of.at(e.source);
    const NodeId t = r.reduced_of.at(e.target);
    if (s == t) continue;
    auto [it, fresh] = folded.try_emplace(EdgeKey{s, e.label, t}, e.injective);
    if (!fresh) it->second = it->second && e.injective;
  }
  for (const auto& [k, inj] : folded) r.edges.push_back({k.source, k.label, k.target, inj});
  return r;
}

UnknownNodeError::UnknownNodeError(NodeId id)
    : std::invalid_argument("unknown node " + std::to_string(id)), id_(id) {}

Subview expand(const AbstractGraph& g, const ReducedGraph& r, NodeId reduced_id) {
  auto it = r.nodes.find(reduced_id);
  if (it == r.nodes.end()) throw UnknownNodeError(reduced_id);
  const std::vector<NodeId>& covers = it->second.covers;
  auto inside = [&](NodeId n) { return std::binary_search(covers.begin(), covers.end(), n); };
  Subview v;
  for (NodeId n : covers) v.nodes.push_back(g.node(n));
  for (const AbstractEdge& e : g.edges) {
    const bool s = inside(e.source);
    const bool t = inside(e.target);
    if (s && t)
      v.internal.push_back(e);
    else if (s || t)
      v.boundary.push_back(e);
  }
  for (const ShapeFact& f : g.shapes)
    if (inside(f.node)) v.shapes.push_back(f);
  return v;
}

AbstractionResult zoom(const ConcreteHeap& heap, const std::set<ObjectId>& interesting, AbstractionOptions opts) {
  opts.interesting_objects = interesting;
  return abstract_heap(heap, opts);
}

}  // namespace heapabs
