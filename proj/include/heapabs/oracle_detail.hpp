#pragma once

// Oracle kernels over pre-grouped pointer sets. The region-level oracles in
// heap_model.hpp and the embedding checker share them.

#include <span>

#include "heapabs/heap_model.hpp"

namespace heapabs::detail {

/// Distinct sources imply distinct targets, by an all-pairs scan.
bool injective_pair_scan(std::span<const Pointer> pointers);
/// Same predicate via a target -> source table.
bool injective_hash_scan(std::span<const Pointer> pointers);
/// Forest test over `members` using only `pointers` (all internal).
Shape forest_dfs(std::span<const ObjectId> members, std::span<const Pointer> pointers);

}  // namespace heapabs::detail
