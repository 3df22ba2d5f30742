#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "heapabs/heap_model.hpp"
#include "heapabs/interval.hpp"

namespace heapabs {

using NodeId = std::int64_t;

inline constexpr NodeId kRootNode = -1;
inline constexpr NodeId kNullNode = 0;

using TypeSet = std::set<std::string>;
using LabelSet = std::set<std::string>;

struct AbstractNode {
  NodeId id = 0;
  TypeSet types;
  Interval card;

  bool operator==(const AbstractNode&) const = default;
};

struct AbstractEdge {
  NodeId source = 0;
  std::string label;
  NodeId target = 0;
  bool injective = true;

  bool operator==(const AbstractEdge&) const = default;
};

/// (source, label, target) identity of an edge.
struct EdgeKey {
  NodeId source = 0;
  std::string label;
  NodeId target = 0;

  auto operator<=>(const EdgeKey&) const = default;
  bool operator==(const EdgeKey&) const = default;
};

inline EdgeKey key_of(const AbstractEdge& e) { return {e.source, e.label, e.target}; }

struct ShapeFact {
  NodeId node = 0;
  LabelSet labels;
  Shape shape = Shape::Any;

  bool operator==(const ShapeFact&) const = default;
  auto operator<=>(const ShapeFact&) const = default;
};

/// Storage-shape graph with per-node type sets and cardinalities, per-edge
/// injectivity, and per-node shape facts. Root and null are ordinary
/// entries of `nodes` named by `root` and `null`.
struct AbstractGraph {
  NodeId root = kRootNode;
  NodeId null = kNullNode;
  std::map<NodeId, AbstractNode> nodes;
  /// Sorted by (source, label, target), unique on that key.
  std::vector<AbstractEdge> edges;
  /// Sorted, unique.
  std::vector<ShapeFact> shapes;

  bool operator==(const AbstractGraph&) const = default;

  /// Adds root and null nodes with cardinality [1,1].
  static AbstractGraph with_root_and_null(NodeId root = kRootNode, NodeId null = kNullNode);

  bool is_special(NodeId id) const { return id == root || id == null; }
  const AbstractNode& node(NodeId id) const;
  const AbstractEdge* find_edge(const EdgeKey& key) const;
  std::vector<const AbstractEdge*> out_edges(NodeId id) const;
  std::vector<const AbstractEdge*> in_edges(NodeId id) const;
  /// Labels of the self-edges of `id`.
  LabelSet self_labels(NodeId id) const;
  std::vector<const ShapeFact*> shapes_of(NodeId id) const;
  /// Content nodes, excluding root and null.
  std::size_t content_node_count() const;

  /// Sorts edges and shape facts and collapses duplicate keys.
  void normalize();
  /// Throws std::invalid_argument when edges or facts reference missing nodes.
  void validate() const;
};

/// Witness map from concrete objects to abstract nodes. Root and null map to
/// the graph's root and null and are not stored.
class EmbeddingMap {
 public:
  EmbeddingMap() = default;

  void assign(ObjectId object, NodeId node);
  std::optional<NodeId> find(ObjectId object) const;
  NodeId at(ObjectId object) const;
  const std::map<ObjectId, NodeId>& forward() const { return forward_; }
  /// node -> sorted member objects.
  std::map<NodeId, std::vector<ObjectId>> inverse() const;
  std::size_t size() const { return forward_.size(); }

  /// Relabels every target node through `renumber` (missing entries throw).
  EmbeddingMap composed(const std::map<NodeId, NodeId>& renumber) const;

  bool operator==(const EmbeddingMap&) const = default;

 private:
  std::map<ObjectId, NodeId> forward_;
};

/// The embedding map is not total on the heap or names unknown nodes.
class EmbeddingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Predicate : std::uint8_t { Embed, Typing, Counting, Injective, Shape };
std::string_view to_string(Predicate p);

struct EmbeddingFailure {
  Predicate predicate;
  /// Offending abstract node, when the failure is about a node or a fact.
  std::optional<NodeId> node;
  /// Witnessing concrete pointer, when one exists.
  std::optional<Pointer> pointer;
  std::string message;
};

struct EmbeddingReport {
  std::vector<EmbeddingFailure> failures;
  bool passed() const { return failures.empty(); }
  bool has(Predicate p) const;
};

/// Decides h in gamma(g) as witnessed by `mu`, evaluating the Embed, Typing,
/// Counting, Injective and Shape predicates literally against the concrete
/// heap. Throws EmbeddingError when `mu` is not total.
EmbeddingReport check_embedding(const ConcreteHeap& heap, const AbstractGraph& graph,
                                const EmbeddingMap& mu);

/// Canonical numbering: root -1, null 0, then content nodes 1.. in
/// breadth-first order from root, out-edges visited by (label, target type
/// names); unreachable nodes follow by (type names, old id).
struct Canonical {
  AbstractGraph graph;
  std::map<NodeId, NodeId> renumber;  ///< old id -> canonical id
};

Canonical canonicalize_with_map(const AbstractGraph& graph);
AbstractGraph canonicalize(const AbstractGraph& graph);

inline constexpr std::string_view kGraphFormat = "ahg-1";

/// Schema violation in an ahg-1 (or mu-1) document; `path` locates it.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

std::string serialize(const AbstractGraph& graph);
AbstractGraph deserialize(std::string_view text);

inline constexpr std::string_view kEmbeddingFormat = "mu-1";

std::string serialize_embedding(const EmbeddingMap& mu);
EmbeddingMap deserialize_embedding(std::string_view text);

}  // namespace heapabs
