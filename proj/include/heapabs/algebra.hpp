#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "heapabs/abstract_graph.hpp"

namespace heapabs {

/// Node and edge correspondence from one graph into another.
struct IsomorphismMap {
  std::map<NodeId, NodeId> nodes;
  std::map<EdgeKey, EdgeKey> edges;
};

enum class DiffKind : std::uint8_t {
  UnmatchedEdge,
  UnmatchedNode,
  NodeConflict,
  TypeExcess,
  CardinalityExcess,
  InjectivityWeakening,
  ShapeWeakening,
};
std::string_view to_string(DiffKind kind);

struct Diff {
  DiffKind kind;
  /// Node of the left graph (or of the right graph for cardinality,
  /// injectivity and shape findings, which are judged per right node).
  std::optional<NodeId> node;
  std::optional<EdgeKey> edge;
  std::string detail;

  auto operator<=>(const Diff&) const = default;
};

struct CompareResult {
  bool leq = false;
  IsomorphismMap phi;
  /// Empty when leq; at most kMaxDiffs entries otherwise.
  std::vector<Diff> diff;
  bool truncated = false;
};

inline constexpr std::size_t kMaxDiffs = 100;

/// An input graph has two same-label out-edges of one node whose target
/// type sets overlap, so edge matching is ambiguous.
class AmbiguousGraphError : public std::invalid_argument {
 public:
  AmbiguousGraphError(int which, NodeId node, std::string label);
  int which() const { return which_; }
  NodeId node() const { return node_; }
  const std::string& label() const { return label_; }

 private:
  int which_;
  NodeId node_;
  std::string label_;
};

/// Throws AmbiguousGraphError (with `which` set) when `g` has overlapping
/// same-label out-edges.
void require_unambiguous(const AbstractGraph& g, int which = 1);

/// Decides g1 below g2 by matching edges from the roots (label plus
/// intersecting target types, null with null) and then checking types,
/// cardinality sums, injectivity and shape facts along the match. Nodes not
/// reachable from root are seeded by type.
CompareResult compare(const AbstractGraph& g1, const AbstractGraph& g2);

/// {"result":"leq"|"incomparable","truncated":bool,"diff":[...],"phi":{...}}
std::string compare_to_json(const CompareResult& result);

enum class MergeMode : std::uint8_t { Join, Widen };
std::string_view to_string(MergeMode mode);

struct MergeResult {
  AbstractGraph graph;  ///< canonical
  IsomorphismMap eta1;
  IsomorphismMap eta2;
  MergeMode mode = MergeMode::Join;
};

/// Upper approximation of two graphs. Widen treats g1 as the prior
/// iterate: a cardinality whose upper bound exceeds g1's becomes unbounded.
MergeResult merge(const AbstractGraph& g1, const AbstractGraph& g2, MergeMode mode = MergeMode::Join);

}  // namespace heapabs
