#include "heapabs/congruence.hpp"

#include <algorithm>
#include <iterator>
#include <numeric>

namespace heapabs {

PartitionClosure::PartitionClosure(std::vector<std::vector<std::uint32_t>> types,
                                   std::span<const ClosureEdge> edges, std::vector<bool> pinned)
    : uf_(types.size()),
      types_(std::move(types)),
      edges_(edges),
      pinned_(std::move(pinned)),
      least_(types_.size()),
      in_(types_.size()),
      out_(types_.size()),
      queued_(edges.size(), false) {
  std::iota(least_.begin(), least_.end(), std::uint32_t{0});
  for (std::uint32_t e = 0; e < edges_.size(); ++e) {
    out_[edges_[e].source].push_back(e);
    in_[edges_[e].target].push_back(e);
  }
}

void PartitionClosure::push(std::uint32_t edge) {
  if (queued_[edge]) return;
  queued_[edge] = true;
  worklist_.push_back(edge);
}

bool PartitionClosure::unite(std::uint32_t a, std::uint32_t b) {
  a = uf_.find(a);
  b = uf_.find(b);
  if (a == b || pinned_[a] || pinned_[b]) return false;
  ++unions_;

  // `small` is the side with fewer incident edges.
  const std::size_t deg_a = in_[a].size() + out_[a].size();
  const std::size_t deg_b = in_[b].size() + out_[b].size();
  const std::uint32_t small = deg_a < deg_b ? a : b;
  const std::uint32_t large = small == a ? b : a;

  const bool grew = !std::includes(types_[large].begin(), types_[large].end(),
                                   types_[small].begin(), types_[small].end());
  for (std::uint32_t e : in_[small]) push(e);
  for (std::uint32_t e : out_[small]) push(e);
  if (grew)
    for (std::uint32_t e : in_[large]) push(e);

  std::vector<std::uint32_t> merged;
  merged.reserve(types_[a].size() + types_[b].size());
  std::set_union(types_[a].begin(), types_[a].end(), types_[b].begin(), types_[b].end(),
                 std::back_inserter(merged));

  // The larger side survives so its slot entries stay keyed correctly.
  uf_.attach(small, large);
  const std::uint32_t root = large;
  const std::uint32_t gone = small;
  in_[root].insert(in_[root].end(), in_[gone].begin(), in_[gone].end());
  out_[root].insert(out_[root].end(), out_[gone].begin(), out_[gone].end());
  std::vector<std::uint32_t>().swap(in_[gone]);
  std::vector<std::uint32_t>().swap(out_[gone]);
  types_[root] = std::move(merged);
  least_[root] = std::min(least_[a], least_[b]);
  std::vector<std::uint32_t>().swap(types_[gone]);
  return true;
}

void PartitionClosure::process(std::uint32_t edge) {
  const ClosureEdge& e = edges_[edge];
  std::uint32_t target = uf_.find(e.target);
  if (pinned_[target]) return;
  const std::uint32_t source = uf_.find(e.source);
  // Copy: unions below replace the type vector.
  const std::vector<std::uint32_t> types = types_[target];
  for (std::uint32_t t : types) {
    auto [it, inserted] = slots_.try_emplace(Slot{source, e.label, t}, target);
    if (!inserted) {
      const std::uint32_t other = uf_.find(it->second);
      if (other != target && unite(other, target)) target = uf_.find(target);
    }
    it->second = target;
  }
}

void PartitionClosure::close() {
  for (std::uint32_t e = 0; e < edges_.size(); ++e) push(e);
  while (!worklist_.empty()) {
    const std::uint32_t e = worklist_.back();
    worklist_.pop_back();
    queued_[e] = false;
    process(e);
  }
}

}  // namespace heapabs
