#include "heapabs/session.hpp"

#include <cstdio>

#include "heapabs/export.hpp"
#include "heapabs/snapshot.hpp"

namespace heapabs {

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_text(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Analysis analyze(const ConcreteHeap& heap, const AbstractionOptions& opts) {
  AbstractionResult raw = abstract_prepared(heap, opts);
  Canonical canon = canonicalize_with_map(raw.graph);
  Analysis a;
  a.graph = std::move(canon.graph);
  a.mu = raw.mu.composed(canon.renumber);
  a.metrics = compute_metrics(heap, a.graph, a.mu);
  a.findings = diagnose(heap, a.graph, a.mu, a.metrics);
  a.container_lengths = uniform_container_lengths(heap, a.graph, a.mu);
  std::map<NodeId, std::uint64_t> bytes;
  for (const NodeMetrics& m : a.metrics) bytes[m.node] = m.total_bytes;
  a.reduced = heapabs::reduce(a.graph, {}, &bytes);
  return a;
}

std::shared_ptr<const SessionEntry> SessionStore::add_snapshot(std::string_view text) {
  const std::string hash = hash_text(fnv1a(text));
  if (auto existing = find(hash)) return existing;

  auto entry = std::make_shared<SessionEntry>();
  entry->hash = hash;
  entry->options = options_;
  entry->heap = prepare_heap(parse_snapshot(text), options_);
  entry->analysis = analyze(entry->heap, options_);
  for (const NodeMetrics& m : entry->analysis.metrics) entry->total_bytes += m.total_bytes;

  std::lock_guard lock(mutex_);
  auto [it, fresh] = entries_.try_emplace(hash, std::move(entry));
  return it->second;
}

std::shared_ptr<const SessionEntry> SessionStore::find(std::string_view hash) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(hash);
  return it == entries_.end() ? nullptr : it->second;
}

std::vector<std::shared_ptr<const SessionEntry>> SessionStore::entries() const {
  std::lock_guard lock(mutex_);
  std::vector<std::shared_ptr<const SessionEntry>> out;
  for (const auto& [hash, e] : entries_) out.push_back(e);
  return out;
}

std::shared_ptr<const ZoomResult> SessionStore::zoom(const SessionEntry& entry, const std::set<ObjectId>& interesting) {
  std::string key_text;
  for (ObjectId id : interesting) key_text += std::to_string(id) + ",";
  const auto key = std::make_pair(entry.hash, fnv1a(key_text));
  {
    std::lock_guard lock(mutex_);
    if (auto it = zooms_.find(key); it != zooms_.end()) return it->second;
  }
  AbstractionOptions opts = entry.options;
  opts.interesting_objects = interesting;
  AbstractionResult raw = abstract_prepared(entry.heap, opts);
  Canonical canon = canonicalize_with_map(raw.graph);
  auto result = std::make_shared<const ZoomResult>(ZoomResult{std::move(canon.graph), raw.mu.composed(canon.renumber)});
  std::lock_guard lock(mutex_);
  return zooms_.try_emplace(key, std::move(result)).first->second;
}

std::size_t SessionStore::zoom_cache_size() const {
  std::lock_guard lock(mutex_);
  return zooms_.size();
}

}  // namespace heapabs
