#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "heapabs/abstraction.hpp"
#include "heapabs/diagnostics.hpp"
#include "heapabs/reduction.hpp"

namespace heapabs {

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);
/// 16 lowercase hex digits.
std::string hash_text(std::uint64_t h);

/// Abstraction of one heap with its canonical graph and derived views.
struct Analysis {
  AbstractGraph graph;  ///< canonical
  EmbeddingMap mu;      ///< into `graph`
  ReducedGraph reduced;
  std::vector<NodeMetrics> metrics;
  std::vector<Finding> findings;
  std::map<NodeId, std::uint64_t> container_lengths;
};

/// Runs abstraction, canonicalization, metrics, detectors and reduction.
/// `heap` must already be prepared when `opts` rewrites types.
Analysis analyze(const ConcreteHeap& heap, const AbstractionOptions& opts = {});

struct SessionEntry {
  std::string hash;
  ConcreteHeap heap;  ///< prepared
  AbstractionOptions options;
  Analysis analysis;
  std::uint64_t total_bytes = 0;
};

struct ZoomResult {
  AbstractGraph graph;  ///< canonical
  EmbeddingMap mu;
};

/// Registry of analyzed snapshots keyed by content hash. Entries never change
/// once registered; lookups hand out shared ownership.
class SessionStore {
 public:
  explicit SessionStore(AbstractionOptions options = {}) : options_(std::move(options)) {}

  /// Parses and analyzes a heapsnap-1 document unless one with the same
  /// content is already registered. Throws HeapError on invalid input.
  std::shared_ptr<const SessionEntry> add_snapshot(std::string_view text);
  std::shared_ptr<const SessionEntry> find(std::string_view hash) const;
  std::vector<std::shared_ptr<const SessionEntry>> entries() const;

  /// Re-abstraction of `entry` with `interesting` pinned, cached per
  /// (snapshot, id set). Throws HeapError for unknown object ids.
  std::shared_ptr<const ZoomResult> zoom(const SessionEntry& entry, const std::set<ObjectId>& interesting);
  std::size_t zoom_cache_size() const;

 private:
  AbstractionOptions options_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const SessionEntry>, std::less<>> entries_;
  std::map<std::pair<std::string, std::uint64_t>, std::shared_ptr<const ZoomResult>> zooms_;
};

}  // namespace heapabs
