#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

#include "heapabs/heap_model.hpp"

namespace heapabs {

class FixtureError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using FixtureParams = std::map<std::string, std::int64_t, std::less<>>;

/// Expression tree with a shared variable environment: o1..o8 form the tree,
/// o9 is a Var[3] environment with one null slot; roots exp -> o1, env -> o9.
ConcreteHeap exprtree_fixture();

/// Singly linked list of `n` Node objects reached from `head`.
ConcreteHeap list_fixture(std::int64_t n);
/// Doubly linked list (next/prev) of `n` nodes.
ConcreteHeap dlist_fixture(std::int64_t n);
/// Complete binary tree of `n` nodes in heap order (children 2i, 2i+1).
ConcreteHeap btree_fixture(std::int64_t n);
/// `faces` Face objects, each owning a Point[4] of four distinct Points.
/// Points weigh `point_bytes` (header included).
ConcreteHeap facegrid_fixture(std::int64_t faces, std::uint64_t point_bytes = 16);
/// Octree-style scene: a recursive quadrant structure with ObjNode lists of
/// spheres and triangles, triangle faces shared with meshes of facegrids,
/// lights, and a ray argument.
ConcreteHeap octree_scene_fixture(std::int64_t depth = 2, std::int64_t objs_per_leaf = 3,
                                  std::int64_t meshes = 2, std::int64_t faces_per_mesh = 8);

/// Dispatches by name: exprtree, list, dlist, btree (param "n"), facegrid
/// ("faces", "point_bytes"), octree-scene ("depth", "objs_per_leaf",
/// "meshes", "faces_per_mesh").
ConcreteHeap build_fixture(std::string_view name, const FixtureParams& params = {});

}  // namespace heapabs
