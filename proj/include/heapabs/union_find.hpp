#pragma once

#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

namespace heapabs {

/// Disjoint sets with path halving and union by rank.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n = 0) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), std::uint32_t{0});
  }

  std::size_t size() const { return parent_.size(); }

  std::uint32_t find(std::uint32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool same(std::uint32_t a, std::uint32_t b) { return find(a) == find(b); }

  /// Makes representative `child` point at representative `parent`.
  void attach(std::uint32_t child, std::uint32_t parent) {
    parent_[child] = parent;
    if (rank_[child] >= rank_[parent]) rank_[parent] = rank_[child] + 1;
  }

  /// Joins the sets of `a` and `b`; returns the surviving representative.
  std::uint32_t unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return a;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return a;
  }

 private:
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint8_t> rank_;
};

}  // namespace heapabs
