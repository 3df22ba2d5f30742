#include "heapabs/abstraction.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

namespace heapabs {

bool is_opaque_name(const AbstractionOptions& opts, std::string_view name) {
  return std::any_of(opts.opaque_type_prefixes.begin(), opts.opaque_type_prefixes.end(),
                     [&](const std::string& p) { return !p.empty() && name.starts_with(p); });
}

// ---------------------------------------------------------------------------
// Heap preparation

ConcreteHeap prepare_heap(const ConcreteHeap& heap, const AbstractionOptions& opts) {
  if (opts.opaque_type_prefixes.empty() && opts.transparent_containers.empty()) return heap;

  const TypeTable& types = heap.types();
  auto transparent = [&](TypeId t) {
    return opts.transparent_containers.contains(types.at(t).name);
  };
  auto opaque = [&](TypeId t) {
    const TypeDecl& d = types.at(t);
    return !transparent(t) && (d.kind == TypeKind::Opaque || is_opaque_name(opts, d.name));
  };

  std::vector<TypeDecl> decls(types.decls().begin(), types.decls().end());
  for (TypeDecl& d : decls) {
    if (!opts.transparent_containers.contains(d.name)) continue;
    d.kind = TypeKind::Container;
    d.fields.clear();
    d.element_type.reset();
  }

  auto out_targets = [](const ConcreteObject& o) {
    std::vector<ObjectId> out;
    out.reserve(o.fields.size() + o.elements.size());
    for (const auto& [label, target] : o.fields) out.push_back(target);
    out.insert(out.end(), o.elements.begin(), o.elements.end());
    return out;
  };

  // Internal objects per transparent container, and the container's elements.
  std::unordered_map<ObjectId, std::vector<ObjectId>> contents;
  std::unordered_map<ObjectId, ObjectId> owner;  // internal object -> container, 0 if shared
  std::unordered_map<ObjectId, std::vector<ObjectId>> internals;
  for (const ConcreteObject& o : heap.objects()) {
    if (!transparent(o.type)) continue;
    std::vector<ObjectId>& elements = contents[o.id];
    std::vector<ObjectId>& inner = internals[o.id];
    std::unordered_set<ObjectId> seen;
    std::deque<ObjectId> queue;
    for (ObjectId t : out_targets(o)) queue.push_back(t);
    while (!queue.empty()) {
      const ObjectId t = queue.front();
      queue.pop_front();
      if (t == kNullObject || t == o.id) continue;
      const ConcreteObject& target = heap.at(t);
      if (!opaque(target.type)) {
        elements.push_back(t);
        continue;
      }
      if (!seen.insert(t).second) continue;
      inner.push_back(t);
      auto [it, fresh] = owner.try_emplace(t, o.id);
      if (!fresh && it->second != o.id) it->second = 0;
      for (ObjectId next : out_targets(target)) queue.push_back(next);
    }
  }

  // An internal object is absorbed only when every reference to it comes
  // from its own container or that container's other internals.
  std::unordered_set<ObjectId> absorbed;
  for (const auto& [id, container] : owner)
    if (container != 0) absorbed.insert(id);
  for (const Pointer& p : heap.pointers()) {
    auto it = owner.find(p.target);
    if (it == owner.end() || !absorbed.contains(p.target)) continue;
    const ObjectId container = it->second;
    if (p.source == container) continue;
    auto src = owner.find(p.source);
    if (src != owner.end() && src->second == container) continue;
    absorbed.erase(p.target);
  }

  const ByteEstimator estimator;
  std::vector<ConcreteObject> objects;
  objects.reserve(heap.object_count());
  for (const ConcreteObject& o : heap.objects()) {
    if (absorbed.contains(o.id)) continue;
    ConcreteObject copy = o;
    if (transparent(o.type)) {
      copy.fields.clear();
      copy.elements = contents[o.id];
      std::uint64_t extra = 0;
      bool any = false;
      for (ObjectId inner : internals[o.id]) {
        if (!absorbed.contains(inner)) continue;
        extra += estimator.bytes_of(heap, heap.at(inner));
        any = true;
      }
      if (any) copy.bytes = estimator.bytes_of(heap, o) + extra;
    } else if (opaque(o.type)) {
      copy.fields.clear();
      copy.elements.clear();
    }
    objects.push_back(std::move(copy));
  }
  return ConcreteHeap(TypeTable(std::move(decls), false), std::move(objects), heap.roots());
}

// ---------------------------------------------------------------------------
// PartitionState

std::uint32_t PartitionState::label_id(Label label) {
  return label.kind == LabelKind::Index ? 0 : label.value + 1;
}

PartitionState::PartitionState(const ConcreteHeap& heap, const std::set<ObjectId>& pinned)
    : heap_(&heap) {
  const std::size_t n = heap.object_count() + 2;
  std::vector<std::vector<std::uint32_t>> types(n);
  std::vector<bool> pin(n, false);
  pin[0] = pin[1] = true;
  for (std::size_t i = 0; i < heap.object_count(); ++i) types[i + 2] = {heap.objects()[i].type};
  for (ObjectId o : pinned) {
    if (!heap.contains(o))
      throw HeapError("object " + std::to_string(o), "interesting object not in heap");
    pin[dense(o)] = true;
  }
  edges_.reserve(heap.pointers().size());
  for (const Pointer& p : heap.pointers())
    edges_.push_back({dense(p.source), label_id(p.label), dense(p.target)});
  closure_ = std::make_unique<PartitionClosure>(std::move(types), edges_, std::move(pin));
}

std::uint32_t PartitionState::dense(ObjectId o) const {
  if (o == kRootObject) return 0;
  if (o == kNullObject) return 1;
  return static_cast<std::uint32_t>(heap_->index_of(o) + 2);
}

ObjectId PartitionState::object_at(std::uint32_t d) const {
  if (d == 0) return kRootObject;
  if (d == 1) return kNullObject;
  return heap_->objects()[d - 2].id;
}

ObjectId PartitionState::ecr(ObjectId o) { return object_at(closure_->least(dense(o))); }

bool PartitionState::unite(ObjectId a, ObjectId b) { return closure_->unite(dense(a), dense(b)); }

std::map<ObjectId, std::vector<ObjectId>> PartitionState::partitions() {
  std::map<ObjectId, std::vector<ObjectId>> out;
  for (const ConcreteObject& o : heap_->objects()) out[ecr(o.id)].push_back(o.id);
  return out;
}

void phase1_same_structure(const RecursiveRelation& rel, PartitionState& st) {
  const ConcreteHeap& heap = st.heap();
  for (const Pointer& p : heap.pointers()) {
    if (p.source == kRootObject || p.target == kNullObject) continue;
    if (st.pinned(p.source) || st.pinned(p.target)) continue;
    if (rel.related(heap.at(p.source).type, heap.at(p.target).type)) st.unite(p.source, p.target);
  }
}

void phase2_predecessor_closure(PartitionState& st) { st.close(); }

// ---------------------------------------------------------------------------
// Shape facts

namespace {

/// One region's internal pointers over local member indices.
struct ShapeProblem {
  std::uint32_t size = 0;
  std::vector<std::string> labels;  // sorted
  struct Edge {
    std::uint32_t source, target, label;
  };
  std::vector<Edge> edges;
};

class ForestTester {
 public:
  explicit ForestTester(const ShapeProblem& p) : p_(p), indeg_(p.size), start_(p.size + 1, 0) {
    for (const auto& e : p.edges) ++start_[e.source + 1];
    std::partial_sum(start_.begin(), start_.end(), start_.begin());
    adj_.resize(p.edges.size());
    std::vector<std::uint32_t> fill(start_.begin(), start_.end() - 1);
    for (std::uint32_t i = 0; i < p.edges.size(); ++i) adj_[fill[p.edges[i].source]++] = i;
  }

  /// Kahn's algorithm over edges whose label bit is set in `mask`. Fills
  /// `stuck` with members left over when a cycle blocks the peel.
  bool forest(std::uint64_t mask, std::vector<bool>* stuck = nullptr) {
    std::fill(indeg_.begin(), indeg_.end(), 0);
    bool shared = false;
    for (const auto& e : p_.edges)
      if (mask >> e.label & 1)
        if (++indeg_[e.target] > 1) shared = true;
    if (shared && !stuck) return false;
    queue_.clear();
    for (std::uint32_t v = 0; v < p_.size; ++v)
      if (indeg_[v] == 0) queue_.push_back(v);
    std::size_t head = 0;
    while (head < queue_.size()) {
      const std::uint32_t v = queue_[head++];
      for (std::uint32_t k = start_[v]; k < start_[v + 1]; ++k) {
        const auto& e = p_.edges[adj_[k]];
        if ((mask >> e.label & 1) && --indeg_[e.target] == 0) queue_.push_back(e.target);
      }
    }
    if (stuck) {
      stuck->assign(p_.size, true);
      for (std::uint32_t v : queue_) (*stuck)[v] = false;
    }
    return !shared && queue_.size() == p_.size;
  }

  /// Per-label violation counts under `mask`: every in-edge of a shared
  /// member, and every edge between members a cycle leaves unpeeled.
  std::vector<std::size_t> violations(std::uint64_t mask) {
    std::vector<bool> stuck;
    forest(mask, &stuck);
    std::vector<std::uint32_t> in(p_.size, 0);
    for (const auto& e : p_.edges)
      if (mask >> e.label & 1) ++in[e.target];
    std::vector<std::size_t> count(p_.labels.size(), 0);
    for (const auto& e : p_.edges) {
      if (!(mask >> e.label & 1)) continue;
      if (in[e.target] > 1 || (stuck[e.source] && stuck[e.target])) ++count[e.label];
    }
    return count;
  }

 private:
  const ShapeProblem& p_;
  std::vector<std::uint32_t> indeg_;
  std::vector<std::uint32_t> start_;
  std::vector<std::uint32_t> adj_;
  std::vector<std::uint32_t> queue_;
};

LabelSet labels_of(const ShapeProblem& p, std::uint64_t mask) {
  LabelSet out;
  for (std::size_t i = 0; i < p.labels.size(); ++i)
    if (mask >> i & 1) out.insert(p.labels[i]);
  return out;
}

std::vector<std::pair<LabelSet, Shape>> solve_shape(const ShapeProblem& p, std::size_t limit) {
  const std::size_t k = p.labels.size();
  if (k == 0) return {{LabelSet{}, Shape::Tree}};
  ForestTester tester(p);
  const std::uint64_t full = k >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << k) - 1;
  if (tester.forest(full)) return {{labels_of(p, full), Shape::Tree}};

  std::vector<std::pair<LabelSet, Shape>> out{{labels_of(p, full), Shape::Any}};
  if (k <= limit && k < 64) {
    std::vector<std::uint64_t> trees;
    for (std::uint64_t mask = 0; mask < full; ++mask)
      if (tester.forest(mask)) trees.push_back(mask);
    for (std::uint64_t m : trees) {
      const bool maximal = std::none_of(trees.begin(), trees.end(), [&](std::uint64_t o) {
        return o != m && (o & m) == m;
      });
      if (maximal) out.emplace_back(labels_of(p, m), Shape::Tree);
    }
    return out;
  }
  std::uint64_t mask = full;
  for (std::size_t round = 0; round < k && mask != 0; ++round) {
    const std::vector<std::size_t> count = tester.violations(mask);
    std::size_t drop = 0;
    for (std::size_t i = 0; i < k; ++i)
      if ((mask >> i & 1) && count[i] >= count[drop]) drop = i;
    mask &= ~(std::uint64_t{1} << drop);
    if (tester.forest(mask)) {
      out.emplace_back(labels_of(p, mask), Shape::Tree);
      return out;
    }
  }
  if (mask == 0) out.emplace_back(LabelSet{}, Shape::Tree);
  return out;
}

}  // namespace

std::set<ShapeFact> compute_shape(const ConcreteHeap& heap, const Region& members,
                                  const LabelSet& intra_labels, std::size_t limit) {
  ShapeProblem p;
  p.size = static_cast<std::uint32_t>(members.size());
  p.labels.assign(intra_labels.begin(), intra_labels.end());
  std::unordered_map<ObjectId, std::uint32_t> local;
  for (std::uint32_t i = 0; i < members.size(); ++i) local.emplace(members.members()[i], i);
  for (const Pointer& ptr : heap.pointers()) {
    auto s = local.find(ptr.source);
    auto t = local.find(ptr.target);
    if (s == local.end() || t == local.end()) continue;
    const std::string label = heap.abstract_label(ptr.label);
    auto it = std::lower_bound(p.labels.begin(), p.labels.end(), label);
    if (it == p.labels.end() || *it != label) continue;
    p.edges.push_back({s->second, t->second, static_cast<std::uint32_t>(it - p.labels.begin())});
  }
  const NodeId node = members.empty() ? 0 : members.members().front();
  std::set<ShapeFact> out;
  for (auto& [labels, shape] : solve_shape(p, limit)) out.insert({node, std::move(labels), shape});
  return out;
}

// ---------------------------------------------------------------------------
// Properties

AbstractionResult compute_properties(PartitionState& st, const AbstractionOptions& opts) {
  const ConcreteHeap& heap = st.heap();
  const std::size_t n = heap.object_count() + 2;

  std::vector<std::uint32_t> cls(n);
  for (std::uint32_t d = 0; d < n; ++d) cls[d] = st.dense_class(st.object_at(d));
  std::vector<NodeId> node_of(n);
  for (std::uint32_t d = 0; d < n; ++d) node_of[d] = st.ecr_of_class(cls[d]);

  AbstractionResult result;
  result.graph = AbstractGraph::with_root_and_null();
  AbstractGraph& g = result.graph;

  // Nodes: type names and member counts.
  std::vector<std::uint32_t> local(n, 0);
  std::unordered_map<std::uint32_t, std::uint32_t> class_size;
  for (std::uint32_t d = 2; d < n; ++d) {
    const ConcreteObject& o = heap.objects()[d - 2];
    AbstractNode& node = g.nodes[node_of[d]];
    node.id = node_of[d];
    node.types.insert(heap.types().at(o.type).name);
    local[d] = class_size[cls[d]]++;
    result.mu.assign(o.id, node_of[d]);
  }
  for (auto& [id, node] : g.nodes)
    if (!g.is_special(id)) node.card = Interval::exactly(class_size[cls[st.dense(id)]]);

  // Edges: group pointers by (source node, abstract label, target node).
  struct Rec {
    std::uint32_t src, label, tgt;
    ObjectId target;
  };
  std::vector<Rec> recs;
  recs.reserve(heap.pointers().size());
  std::unordered_map<std::uint32_t, Label> label_rep;
  for (const Pointer& p : heap.pointers()) {
    const std::uint32_t s = st.dense(p.source), t = st.dense(p.target);
    const std::uint32_t l = PartitionState::label_id(p.label);
    label_rep.try_emplace(l, p.label);
    recs.push_back({cls[s], l, cls[t], p.target});
  }
  std::sort(recs.begin(), recs.end(), [](const Rec& a, const Rec& b) {
    return std::tie(a.src, a.label, a.tgt, a.target) < std::tie(b.src, b.label, b.tgt, b.target);
  });
  std::unordered_map<std::uint32_t, std::string> label_text;
  for (const auto& [id, label] : label_rep) label_text.emplace(id, heap.abstract_label(label));
  auto class_node = [&](std::uint32_t c) { return st.ecr_of_class(c); };
  for (std::size_t i = 0; i < recs.size();) {
    std::size_t j = i;
    bool injective = true;
    while (j < recs.size() && recs[j].src == recs[i].src && recs[j].label == recs[i].label &&
           recs[j].tgt == recs[i].tgt) {
      if (j > i && recs[j].target == recs[j - 1].target) injective = false;
      ++j;
    }
    g.edges.push_back(
        {class_node(recs[i].src), label_text.at(recs[i].label), class_node(recs[i].tgt), injective});
    i = j;
  }

  // Shape facts from intra-class pointers.
  std::unordered_map<std::uint32_t, ShapeProblem> problems;
  std::unordered_map<std::uint32_t, std::map<std::string, std::uint32_t>> class_labels;
  for (const Pointer& p : heap.pointers()) {
    const std::uint32_t s = st.dense(p.source), t = st.dense(p.target);
    if (s < 2 || t < 2 || cls[s] != cls[t]) continue;
    class_labels[cls[s]].emplace(label_text.at(PartitionState::label_id(p.label)), 0);
  }
  for (auto& [c, labels] : class_labels) {
    ShapeProblem& prob = problems[c];
    std::uint32_t next = 0;
    for (auto& [text, id] : labels) {
      id = next++;
      prob.labels.push_back(text);
    }
  }
  for (const Pointer& p : heap.pointers()) {
    const std::uint32_t s = st.dense(p.source), t = st.dense(p.target);
    if (s < 2 || t < 2 || cls[s] != cls[t]) continue;
    const std::uint32_t l = class_labels[cls[s]].at(label_text.at(PartitionState::label_id(p.label)));
    problems[cls[s]].edges.push_back({local[s], local[t], l});
  }
  for (const auto& [c, size] : class_size) {
    ShapeProblem empty;
    auto it = problems.find(c);
    ShapeProblem& prob = it == problems.end() ? empty : it->second;
    prob.size = size;
    for (auto& [labels, shape] : solve_shape(prob, opts.shape_subset_limit))
      g.shapes.push_back({class_node(c), std::move(labels), shape});
  }
  g.normalize();
  return result;
}

AbstractionResult abstract_prepared(const ConcreteHeap& heap, const AbstractionOptions& opts) {
  PartitionState st(heap, opts.interesting_objects);
  phase1_same_structure(recursive_relation(heap.types()), st);
  phase2_predecessor_closure(st);
  return compute_properties(st, opts);
}

AbstractionResult abstract_heap(const ConcreteHeap& heap, const AbstractionOptions& opts) {
  if (opts.opaque_type_prefixes.empty() && opts.transparent_containers.empty())
    return abstract_prepared(heap, opts);
  return abstract_prepared(prepare_heap(heap, opts), opts);
}

}  // namespace heapabs
