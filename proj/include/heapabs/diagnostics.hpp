#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "heapabs/abstract_graph.hpp"
#include "heapabs/heap_model.hpp"

namespace heapabs {

struct NodeMetrics {
  NodeId node = 0;
  std::uint64_t object_count = 0;
  std::uint64_t total_bytes = 0;
  std::uint64_t overhead_bytes = 0;
  std::uint64_t data_bytes = 0;
  /// total_bytes over the heap total (0 for an empty heap).
  double heap_fraction = 0.0;
};

enum class FindingKind : std::uint8_t {
  Hot5,
  Hot15,
  Hot25,
  SmallObjects,
  SmallContainers,
  SparseContainers,
  OverFactored,
};
std::string_view to_string(FindingKind kind);

struct Finding {
  FindingKind kind;
  NodeId node = 0;
  std::map<std::string, double> evidence;

  bool operator==(const Finding&) const = default;
};

/// Per content node: member count and bytes (snapshot bytes, else the
/// estimate), with `estimator.header_bytes` per object counted as overhead.
/// Sorted by node id.
std::vector<NodeMetrics> compute_metrics(const ConcreteHeap& heap, const AbstractGraph& g, const EmbeddingMap& mu,
                                         const ByteEstimator& estimator = {});

/// Hottest bucket a fraction falls in: above 0.25, 0.15 or 0.05.
std::optional<FindingKind> heat_bucket(double fraction);
std::vector<Finding> detect_heat(const std::vector<NodeMetrics>& metrics);

bool is_small_objects(const NodeMetrics& m);
std::vector<Finding> detect_small_objects(const std::vector<NodeMetrics>& metrics);

/// Nodes whose members are all containers: small when every one holds at
/// most 3 non-null elements, sparse when every one has more than half of
/// its slots null.
std::vector<Finding> detect_container_issues(const ConcreteHeap& heap, const AbstractGraph& g, const EmbeddingMap& mu);

/// Small-object nodes with exactly one incoming edge from a node other than
/// root, that edge injective.
std::vector<Finding> detect_overfactored(const AbstractGraph& g, const std::vector<NodeMetrics>& metrics);

/// All detectors, sorted by (node, kind).
std::vector<Finding> diagnose(const ConcreteHeap& heap, const AbstractGraph& g, const EmbeddingMap& mu,
                              const std::vector<NodeMetrics>& metrics);

struct SamplerState {
  std::uint64_t threshold = 1;
  bool active = false;
  std::uint64_t snapshots_taken = 0;

  bool operator==(const SamplerState&) const = default;
};

enum class SampleDecision : std::uint8_t { Skip, Snapshot };
std::string_view to_string(SampleDecision d);

/// Snapshot when reachable bytes moved by a factor of 1.5 either way from
/// the threshold, which then resets to the observed size.
std::pair<SamplerState, SampleDecision> backoff_step(const SamplerState& st, std::uint64_t reachable_bytes);

/// Threshold initialized from the first sample; counts later snapshots.
std::uint64_t count_snapshots(const std::vector<std::uint64_t>& trace);

}  // namespace heapabs
