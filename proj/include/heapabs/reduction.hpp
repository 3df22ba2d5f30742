#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "heapabs/abstract_graph.hpp"
#include "heapabs/abstraction.hpp"

namespace heapabs {

struct ReducedNode {
  NodeId id = 0;
  /// Covered abstract nodes, sorted.
  std::vector<NodeId> covers;
  TypeSet types;
  Interval card;
  std::optional<std::uint64_t> bytes;
  bool interesting = false;
  /// Holds the abstract nodes with no path from root.
  bool unreachable = false;

  /// Collapses more than one abstract node.
  bool is_group() const { return covers.size() > 1; }
  bool operator==(const ReducedNode&) const = default;
};

struct ReducedEdge {
  NodeId source = 0;
  std::string label;
  NodeId target = 0;
  /// Every abstract edge folded into this one is injective.
  bool injective = true;

  bool operator==(const ReducedEdge&) const = default;
};

/// Dominator reduction of an abstract graph. Root and null keep their own
/// reduced nodes with their own ids; other reduced nodes are named by the
/// abstract node heading them.
struct ReducedGraph {
  std::map<NodeId, ReducedNode> nodes;
  /// Sorted by (source, label, target), unique on that key.
  std::vector<ReducedEdge> edges;
  /// Abstract node -> reduced node.
  std::map<NodeId, NodeId> reduced_of;

  bool operator==(const ReducedGraph&) const = default;
};

struct ReductionOptions {
  /// Keep only successors of variable targets expanded, not predecessors.
  bool successors_only = false;
};

/// Variable targets, their immediate neighbors, and null.
std::set<NodeId> interesting_nodes(const AbstractGraph& g, const ReductionOptions& opts = {});

/// Immediate dominators from root over `g` with every in-edge of an
/// interesting node deleted unless it leaves root. Nodes unreachable under
/// that restriction are absent.
std::map<NodeId, NodeId> immediate_dominators(const AbstractGraph& g, const std::set<NodeId>& interesting);

/// Interesting nodes stay singletons and head the non-interesting nodes they
/// dominate; a non-interesting node dominated by root alone heads its own
/// group. Aggregate bytes are filled from `node_bytes` when given.
ReducedGraph reduce(const AbstractGraph& g, const ReductionOptions& opts = {},
                    const std::map<NodeId, std::uint64_t>* node_bytes = nullptr);

class UnknownNodeError : public std::invalid_argument {
 public:
  explicit UnknownNodeError(NodeId id);
  NodeId id() const { return id_; }

 private:
  NodeId id_;
};

struct Subview {
  std::vector<AbstractNode> nodes;
  std::vector<AbstractEdge> internal;
  /// Edges with exactly one endpoint inside.
  std::vector<AbstractEdge> boundary;
  std::vector<ShapeFact> shapes;
};

/// The abstract subgraph a reduced node covers. Throws UnknownNodeError.
Subview expand(const AbstractGraph& g, const ReducedGraph& r, NodeId reduced_id);

/// Re-abstracts `heap` with `interesting` objects pinned as singletons.
/// Unknown ids raise HeapError.
AbstractionResult zoom(const ConcreteHeap& heap, const std::set<ObjectId>& interesting,
                       AbstractionOptions opts = {});

}  // namespace heapabs
