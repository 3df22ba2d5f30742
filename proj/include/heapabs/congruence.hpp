#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "heapabs/union_find.hpp"

namespace heapabs {

/// Labeled edge between dense element indices.
struct ClosureEdge {
  std::uint32_t source = 0;
  std::uint32_t label = 0;
  std::uint32_t target = 0;
};

/// Partition of graph elements that carries a type set per class and closes
/// under predecessor equivalence: two targets reached from one class via the
/// same label are joined when their type sets intersect. Shared by heap
/// abstraction (over objects) and graph merge (over abstract nodes).
///
/// Each class keeps its incident edge lists; on a union the smaller side's
/// edges re-enter the worklist, as do the larger side's in-edges when its
/// type set grew.
class PartitionClosure {
 public:
  /// `types[i]` is the sorted type set of element i; pinned elements are
  /// never joined with anything.
  PartitionClosure(std::vector<std::vector<std::uint32_t>> types, std::span<const ClosureEdge> edges,
                   std::vector<bool> pinned);

  std::uint32_t find(std::uint32_t x) { return uf_.find(x); }
  bool pinned(std::uint32_t x) const { return pinned_[x]; }
  /// Joins two unpinned classes. Returns false when nothing changed.
  bool unite(std::uint32_t a, std::uint32_t b);
  /// Runs the worklist to the least fixpoint.
  void close();

  const std::vector<std::uint32_t>& types_of(std::uint32_t x) { return types_[find(x)]; }
  /// Smallest element index in the class of `x`.
  std::uint32_t least(std::uint32_t x) { return least_[find(x)]; }
  std::size_t union_count() const { return unions_; }

 private:
  void push(std::uint32_t edge);
  void process(std::uint32_t edge);

  UnionFind uf_;
  std::vector<std::vector<std::uint32_t>> types_;
  std::span<const ClosureEdge> edges_;
  std::vector<bool> pinned_;
  std::vector<std::uint32_t> least_;
  std::vector<std::vector<std::uint32_t>> in_;
  std::vector<std::vector<std::uint32_t>> out_;
  std::vector<std::uint32_t> worklist_;
  std::vector<bool> queued_;
  std::size_t unions_ = 0;

  struct Slot {
    std::uint32_t source, label, type;
    bool operator==(const Slot&) const = default;
  };
  struct SlotHash {
    std::size_t operator()(const Slot& s) const noexcept {
      std::uint64_t h = std::uint64_t{s.source} * 0x9e3779b97f4a7c15ULL;
      h = (h ^ s.label) * 0xc2b2ae3d27d4eb4fULL;
      h ^= s.type;
      h ^= h >> 33;
      h *= 0xff51afd7ed558ccdULL;
      h ^= h >> 33;
      return static_cast<std::size_t>(h);
    }
  };
  /// (source class, label, type) -> a target class holding that type.
  std::unordered_map<Slot, std::uint32_t, SlotHash> slots_;
};

}  // namespace heapabs
