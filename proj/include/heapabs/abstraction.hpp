#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "heapabs/abstract_graph.hpp"
#include "heapabs/congruence.hpp"
#include "heapabs/heap_model.hpp"

namespace heapabs {

struct AbstractionOptions {
  /// Objects whose type name starts with one of these prefixes (or whose
  /// type kind is opaque) keep no out-pointers.
  std::vector<std::string> opaque_type_prefixes;
  /// Type names rewritten into plain containers of the non-opaque objects
  /// they reach through opaque internals.
  std::set<std::string> transparent_containers;
  /// Label count up to which maximal tree subsets are searched exhaustively.
  std::size_t shape_subset_limit = 4;
  /// Objects kept as singleton nodes.
  std::set<ObjectId> interesting_objects;
};

struct AbstractionResult {
  AbstractGraph graph;
  EmbeddingMap mu;
};

/// True when `name` matches an opaque prefix.
bool is_opaque_name(const AbstractionOptions& opts, std::string_view name);

/// Applies the opaque-type and transparent-container rewrites. Internal
/// objects referenced only from inside one transparent container are
/// absorbed into it (their bytes are added to the container). Returns a copy
/// of `heap` unchanged when neither option is set.
ConcreteHeap prepare_heap(const ConcreteHeap& heap, const AbstractionOptions& opts);

/// Union-find over the objects of one heap (plus root and null), each class
/// carrying its type set. Root, null and pinned objects stay singletons.
class PartitionState {
 public:
  PartitionState(const ConcreteHeap& heap, const std::set<ObjectId>& pinned = {});

  const ConcreteHeap& heap() const { return *heap_; }

  /// Representative of `o`'s class: its smallest object id.
  ObjectId ecr(ObjectId o);
  bool same(ObjectId a, ObjectId b) { return ecr(a) == ecr(b); }
  bool pinned(ObjectId o) const { return closure_->pinned(dense(o)); }
  /// Joins two classes unless either is pinned.
  bool unite(ObjectId a, ObjectId b);
  /// Predecessor-equivalence closure to the least fixpoint.
  void close() { closure_->close(); }

  /// Representative -> sorted members, root and null excluded.
  std::map<ObjectId, std::vector<ObjectId>> partitions();
  std::size_t union_count() const { return closure_->union_count(); }

  /// Dense index: root 0, null 1, object i at i + 2.
  std::uint32_t dense(ObjectId o) const;
  ObjectId object_at(std::uint32_t dense) const;
  std::uint32_t dense_class(ObjectId o) { return closure_->find(dense(o)); }
  /// Representative of a dense class index.
  ObjectId ecr_of_class(std::uint32_t cls) { return object_at(closure_->least(cls)); }
  /// Abstract label id of concrete label (all element indices share id 0).
  static std::uint32_t label_id(Label label);

 private:
  const ConcreteHeap* heap_;
  std::vector<ClosureEdge> edges_;
  std::unique_ptr<PartitionClosure> closure_;
};

/// Unites the endpoints of every pointer whose types are related by the
/// recursive relation, skipping root, null and pinned objects.
void phase1_same_structure(const RecursiveRelation& rel, PartitionState& st);

/// Unites targets reached from one class through the same abstract label
/// when their type sets intersect, until nothing changes.
void phase2_predecessor_closure(PartitionState& st);

/// Builds the graph and embedding from the final partition.
AbstractionResult compute_properties(PartitionState& st, const AbstractionOptions& opts);

/// Shape facts for one region over the given intra-region labels: (L, tree)
/// when the whole set forms a forest, otherwise (L, any) plus the maximal
/// tree subsets (exhaustive up to `limit` labels, greedy elimination above).
std::set<ShapeFact> compute_shape(const ConcreteHeap& heap, const Region& members,
                                  const LabelSet& intra_labels, std::size_t limit);

/// Full pipeline over `prepare_heap(heap, opts)`; `mu` covers that prepared
/// heap. Node ids are the smallest member object ids.
AbstractionResult abstract_heap(const ConcreteHeap& heap, const AbstractionOptions& opts = {});

/// Same, over a heap that is already prepared.
AbstractionResult abstract_prepared(const ConcreteHeap& heap, const AbstractionOptions& opts);

}  // namespace heapabs
