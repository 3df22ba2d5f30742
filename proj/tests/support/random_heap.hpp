#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "heapabs/abstract_graph.hpp"
#include "heapabs/heap_model.hpp"

namespace testing_support {

struct RandomHeapParams {
  int max_objects = 50;
  int max_types = 8;
  double null_probability = 0.2;
  /// Adds variables until every object is reachable from root.
  bool all_reachable = false;
};

/// Random well-typed heap: object and array types, supertype links, field
/// targets drawn from the declared type's subtypes, cycles allowed.
heapabs::ConcreteHeap random_heap(std::mt19937_64& rng, const RandomHeapParams& params = {});

/// Independent fixpoint computation of the abstraction partition by
/// repeated full scans (quadratic in the pointer count).
std::map<heapabs::ObjectId, std::set<heapabs::ObjectId>> naive_partition(
    const heapabs::ConcreteHeap& heap, const std::set<heapabs::ObjectId>& pinned = {});

/// Partition of `mu`: node -> member set.
std::map<heapabs::NodeId, std::set<heapabs::ObjectId>> partition_of(const heapabs::EmbeddingMap& mu);

/// Set-of-sets view for comparing partitions regardless of node naming.
std::set<std::set<heapabs::ObjectId>> blocks(
    const std::map<std::int64_t, std::set<heapabs::ObjectId>>& partition);

}  // namespace testing_support
