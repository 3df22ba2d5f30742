#pragma once

#include <string>
#include <string_view>

#include "heapabs/heap_model.hpp"

namespace heapabs {

inline constexpr std::string_view kSnapshotFormat = "heapsnap-1";

/// Parses and validates a heapsnap-1 JSON document. Throws HeapError with a
/// JSON-path location on any violation.
ConcreteHeap parse_snapshot(std::string_view text);

/// Writes a heapsnap-1 document (stable key and object order).
std::string write_snapshot(const ConcreteHeap& heap);

}  // namespace heapabs
