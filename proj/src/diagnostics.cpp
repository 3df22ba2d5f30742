#include "heapabs/diagnostics.hpp"

#include <algorithm>

namespace heapabs {

std::string_view to_string(FindingKind kind) {
  switch (kind) {
    case FindingKind::Hot5: return "hot5";
    case FindingKind::Hot15: return "hot15";
    case FindingKind::Hot25: return "hot25";
    case FindingKind::SmallObjects: return "smallObjects";
    case FindingKind::SmallContainers: return "smallContainers";
    case FindingKind::SparseContainers: return "sparseContainers";
    case FindingKind::OverFactored: return "overFactored";
  }
  return "?";
}

std::string_view to_string(SampleDecision d) { return d == SampleDecision::Skip ? "skip" : "snapshot"; }

std::vector<NodeMetrics> compute_metrics(const ConcreteHeap& heap, const AbstractGraph& g, const EmbeddingMap& mu,
                                         const ByteEstimator& estimator) {
  std::map<NodeId, NodeMetrics> by_node;
  for (const auto& [id, node] : g.nodes)
    if (!g.is_special(id)) by_node[id].node = id;
  std::uint64_t total = 0;
  for (const ConcreteObject& o : heap.objects()) {
    NodeMetrics& m = by_node.at(mu.at(o.id));
    const std::uint64_t bytes = estimator.bytes_of(heap, o);
    ++m.object_count;
    m.total_bytes += bytes;
    m.overhead_bytes += std::min(bytes, estimator.header_bytes);
    total += bytes;
  }
  std::vector<NodeMetrics> out;
  for (auto& [id, m] : by_node) {
    m.data_bytes = m.total_bytes - m.overhead_bytes;
    m.heap_fraction = total == 0 ? 0.0 : static_cast<double>(m.total_bytes) / static_cast<double>(total);
    out.push_back(m);
  }
  return out;
}

std::optional<FindingKind> heat_bucket(double fraction) {
  if (fraction > 0.25) return FindingKind::Hot25;
  if (fraction > 0.15) return FindingKind::Hot15;
  if (fraction > 0.05) return FindingKind::Hot5;
  return std::nullopt;
}

std::vector<Finding> detect_heat(const std::vector<NodeMetrics>& metrics) {
  std::vector<Finding> out;
  for (const NodeMetrics& m : metrics)
    if (const auto bucket = heat_bucket(m.heap_fraction))
      out.push_back({*bucket, m.node, {{"fraction", m.heap_fraction}, {"bytes", double(m.total_bytes)}}});
  return out;
}

bool is_small_objects(const NodeMetrics& m) { return m.object_count > 0 && 2 * m.overhead_bytes > m.data_bytes; }

std::vector<Finding> detect_small_objects(const std::vector<NodeMetrics>& metrics) {
  std::vector<Finding> out;
  for (const NodeMetrics& m : metrics)
    if (is_small_objects(m))
      out.push_back({FindingKind::SmallObjects, m.node,
                     {{"overheadBytes", double(m.overhead_bytes)}, {"dataBytes", double(m.data_bytes)}}});
  return out;
}

std::vector<Finding> detect_container_issues(const ConcreteHeap& heap, const AbstractGraph& g,
                                             const EmbeddingMap& mu) {
  std::vector<Finding> out;
  for (const auto& [node, members] : mu.inverse()) {
    if (g.is_special(node) || members.empty()) continue;
    bool all_containers = true;
    bool all_small = true;
    bool all_sparse = true;
    std::size_t max_elements = 0;
    double min_null_fraction = 1.0;
    for (ObjectId id : members) {
      if (!heap.type_of(id).is_container()) {
        all_containers = false;
        break;
      }
      const std::vector<ObjectId>& slots = heap.at(id).elements;
      const auto nulls = static_cast<std::size_t>(std::count(slots.begin(), slots.end(), kNullObject));
      const std::size_t filled = slots.size() - nulls;
      max_elements = std::max(max_elements, filled);
      all_small = all_small && filled <= 3;
      const bool sparse = 2 * nulls > slots.size();
      all_sparse = all_sparse && sparse;
      min_null_fraction = std::min(min_null_fraction, slots.empty() ? 0.0 : double(nulls) / double(slots.size()));
    }
    if (!all_containers) continue;
    if (all_small)
      out.push_back({FindingKind::SmallContainers, node,
                     {{"containers", double(members.size())}, {"maxElements", double(max_elements)}}});
    if (all_sparse)
      out.push_back({FindingKind::SparseContainers, node,
                     {{"containers", double(members.size())}, {"minNullFraction", min_null_fraction}}});
  }
  return out;
}

std::vector<Finding> detect_overfactored(const AbstractGraph& g, const std::vector<NodeMetrics>& metrics) {
  std::vector<Finding> out;
  for (const NodeMetrics& m : metrics) {
    if (g.is_special(m.node) || !is_small_objects(m)) continue;
    std::vector<const AbstractEdge*> incoming;
    for (const AbstractEdge* e : g.in_edges(m.node))
      if (e->source != g.root) incoming.push_back(e);
    if (incoming.size() != 1 || !incoming.front()->injective) continue;
    out.push_back({FindingKind::OverFactored, m.node,
                   {{"source", double(incoming.front()->source)},
                    {"overheadBytes", double(m.overhead_bytes)},
                    {"dataBytes", double(m.data_bytes)}}});
  }
  return out;
}

std::vector<Finding> diagnose(const ConcreteHeap& heap, const AbstractGraph& g, const EmbeddingMap& mu,
                              const std::vector<NodeMetrics>& metrics) {
  std::vector<Finding> out = detect_heat(metrics);
  for (auto&& part : {detect_small_objects(metrics), detect_container_issues(heap, g, mu),
                      detect_overfactored(g, metrics)})
    out.insert(out.end(), part.begin(), part.end());
  std::stable_sort(out.begin(), out.end(), [](const Finding& a, const Finding& b) {
    return std::pair(a.node, a.kind) < std::pair(b.node, b.kind);
  });
  return out;
}

std::pair<SamplerState, SampleDecision> backoff_step(const SamplerState& st, std::uint64_t reachable_bytes) {
  const unsigned __int128 s = reachable_bytes;
  const unsigned __int128 t = st.threshold;
  if (2 * s >= 3 * t || 3 * s <= 2 * t) {
    SamplerState next{std::max<std::uint64_t>(reachable_bytes, 1), true, st.snapshots_taken + 1};
    return {next, SampleDecision::Snapshot};
  }
  return {st, SampleDecision::Skip};
}

std::uint64_t count_snapshots(const std::vector<std::uint64_t>& trace) {
  if (trace.empty()) return 0;
  SamplerState st{std::max<std::uint64_t>(trace.front(), 1), false, 0};
  for (std::size_t i = 1; i < trace.size(); ++i) st = backoff_step(st, trace[i]).first;
  return st.snapshots_taken;
}

}  // namespace heapabs
