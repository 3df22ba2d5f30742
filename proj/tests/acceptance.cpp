// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <sys/resource.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "heapabs/abstraction.hpp"
#include "heapabs/algebra.hpp"
#include "heapabs/cli.hpp"
#include "heapabs/diagnostics.hpp"
#include "heapabs/export.hpp"
#include "heapabs/fixtures.hpp"
#include "heapabs/reduction.hpp"
#include "heapabs/session.hpp"
#include "heapabs/snapshot.hpp"
#include "support/dgml_check.hpp"
#include "support/random_heap.hpp"
#include "support/traces.hpp"

using namespace heapabs;
namespace fs = std::filesystem;

namespace {

constexpr double kExprtreeSeconds = 1.0;
constexpr int kSoundnessHeaps = 1000;
constexpr double kSoundnessSeconds = 60.0;
constexpr int kMergePairs = 500;
constexpr std::int64_t kPerfObjects = 200'000;
constexpr double kPerfSeconds = 10.0;
constexpr long kPerfMaxRssKiB = 1024L * 1024L;
constexpr double kDoublingRatio = 2.5;
constexpr std::uint64_t kMinSnapshots = 2;
constexpr std::uint64_t kMaxSnapshots = 10;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (ok) return;
    if (!pass) detail << "; ";
    pass = false;
    detail << what;
  }
};

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::vector<std::pair<std::string, ConcreteHeap>> fixtures() {
  return {{"exprtree", exprtree_fixture()},   {"list", list_fixture(6)},         {"dlist", dlist_fixture(5)},
          {"btree", btree_fixture(15)},       {"facegrid", facegrid_fixture(6)}, {"octree-scene", octree_scene_fixture()}};
}

EmbeddingMap through(const EmbeddingMap& mu, const IsomorphismMap& eta) {
  EmbeddingMap out;
  for (const auto& [o, n] : mu.forward()) out.assign(o, eta.nodes.at(n));
  return out;
}

bool has_kind(const CompareResult& r, DiffKind kind) {
  return std::any_of(r.diff.begin(), r.diff.end(), [&](const Diff& d) { return d.kind == kind; });
}

bool has_container(const ConcreteHeap& h) {
  return std::any_of(h.objects().begin(), h.objects().end(),
                     [&](const ConcreteObject& o) { return h.type_of(o.id).is_container(); });
}

bool has_cycle(const ConcreteHeap& h) {
  std::map<ObjectId, std::vector<ObjectId>> succ;
  for (const Pointer& p : h.pointers())
    if (p.source > 0 && p.target > 0) succ[p.source].push_back(p.target);
  std::map<ObjectId, int> color;
  std::function<bool(ObjectId)> visit = [&](ObjectId u) {
    color[u] = 1;
    for (ObjectId v : succ[u]) {
      if (color[v] == 1) return true;
      if (color[v] == 0 && visit(v)) return true;
    }
    color[u] = 2;
    return false;
  };
  for (const ConcreteObject& o : h.objects())
    if (color[o.id] == 0 && visit(o.id)) return true;
  return false;
}

Region region_of(const ConcreteHeap& h, const AbstractGraph& g, const std::map<NodeId, std::vector<ObjectId>>& inv,
                 NodeId n) {
  if (n == g.root) return Region::any({kRootObject});
  if (n == g.null) return Region::any({kNullObject});
  return Region::of(h, inv.at(n));
}

/// Object-graph heap with `per_object` pointers per object: a few record
/// types and an array type, all fields declared at a common supertype,
/// targets drawn uniformly.
ConcreteHeap synthetic_heap(std::int64_t objects, int per_object, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<TypeDecl> types;
  types.push_back({1, "Base", TypeKind::Object, std::nullopt, {}, std::nullopt});
  constexpr int kRecordTypes = 6;
  for (int t = 0; t < kRecordTypes; ++t) {
    std::vector<FieldDecl> fields;
    for (int f = 0; f < per_object; ++f) fields.push_back({"f" + std::to_string(f), 1});
    types.push_back({static_cast<TypeId>(t + 2), "T" + std::to_string(t), TypeKind::Object, 1, std::move(fields),
                     std::nullopt});
  }
  const TypeId array = static_cast<TypeId>(kRecordTypes + 2);
  types.push_back({array, "Base[]", TypeKind::Array, 1, {}, 1});

  std::uniform_int_distribution<std::int64_t> any_object(1, objects);
  std::uniform_int_distribution<int> any_type(0, kRecordTypes);
  std::bernoulli_distribution null_slot(0.05);
  std::vector<ConcreteObject> objs;
  objs.reserve(static_cast<std::size_t>(objects));
  for (ObjectId id = 1; id <= objects; ++id) {
    const int t = any_type(rng);
    ConcreteObject o{id, t == kRecordTypes ? array : static_cast<TypeId>(t + 2), std::nullopt, {}, {}};
    for (int f = 0; f < per_object; ++f) {
      const ObjectId target = null_slot(rng) ? kNullObject : any_object(rng);
      if (t == kRecordTypes)
        o.elements.push_back(target);
      else
        o.fields["f" + std::to_string(f)] = target;
    }
    objs.push_back(std::move(o));
  }
  std::map<std::string, ObjectId> roots;
  for (int v = 0; v < 16; ++v) roots["v" + std::to_string(v)] = any_object(rng);
  return ConcreteHeap(TypeTable(std::move(types)), std::move(objs), std::move(roots));
}

long peak_rss_kib() {
  rusage u{};
  getrusage(RUSAGE_SELF, &u);
  return u.ru_maxrss;
}

int run_cli_args(std::vector<std::string> args) {
  args.insert(args.begin(), "heapabs");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

// ---------------------------------------------------------------------------

void exprtree_reproduction(Outcome& o) {
  const auto t0 = Clock::now();
  const ConcreteHeap h = exprtree_fixture();
  const auto [g, mu] = abstract_heap(h);
  const double elapsed = seconds_since(t0);

  const std::map<NodeId, std::vector<ObjectId>> expected{{1, {1, 2, 4, 5}}, {3, {3, 6}}, {7, {7, 8}}, {9, {9}}};
  o.require(mu.inverse() == expected, "partition differs");
  const AbstractEdge* l = g.find_edge({1, "l", 7});
  const AbstractEdge* r = g.find_edge({1, "r", 3});
  o.require(l && !l->injective, "n1-l->n7 should be non-injective");
  o.require(r && r->injective, "n1-r->n3 should be injective");
  bool tree = false;
  for (const ShapeFact* f : g.shapes_of(1)) tree |= f->shape == Shape::Tree && f->labels == LabelSet{"l", "r"};
  o.require(tree, "missing tree{l,r} on n1");
  o.require(g.find_edge({9, "[]", 0}) != nullptr && g.find_edge({9, "[]", 7}) != nullptr,
            "n9 lacks a maybe-null element edge");
  const std::map<NodeId, Interval> card{{1, {4, 4}}, {3, {2, 2}}, {7, {2, 2}}, {9, {1, 1}}};
  for (const auto& [n, c] : card) o.require(g.nodes.contains(n) && g.node(n).card == c, "Cd of n" + std::to_string(n));
  o.require(g.content_node_count() == 4, "extra nodes");
  o.require(elapsed < kExprtreeSeconds, "too slow");
  o.detail << (o.pass ? "" : "; ") << std::fixed << std::setprecision(4) << elapsed << "s";
}

struct RandomSuite {
  int heaps = 0, with_arrays = 0, with_cycles = 0, sound = 0, injective_checks = 0, injective_violations = 0,
      tree_checks = 0, tree_violations = 0;
  double seconds = 0;
};

RandomSuite run_random_suite() {
  RandomSuite s;
  std::mt19937_64 rng(1001);
  const auto t0 = Clock::now();
  for (int i = 0; i < kSoundnessHeaps; ++i) {
    const ConcreteHeap h = testing_support::random_heap(rng, {.max_objects = 50, .max_types = 8});
    ++s.heaps;
    s.with_arrays += has_container(h);
    s.with_cycles += has_cycle(h);
    const auto [g, mu] = abstract_heap(h);
    s.sound += check_embedding(h, g, mu).passed();

    const auto inv = mu.inverse();
    for (const AbstractEdge& e : g.edges) {
      if (!e.injective) continue;
      const Region src = region_of(h, g, inv, e.source);
      const Region tgt = region_of(h, g, inv, e.target);
      std::set<Label> labels;
      for (const Pointer& p : pointers_between(h, src, tgt))
        if (h.abstract_label(p.label) == e.label) labels.insert(p.label);
      for (Label p : labels) {
        ++s.injective_checks;
        s.injective_violations += !oracle_injective(h, src, tgt, p);
      }
    }
    for (const ShapeFact& f : g.shapes) {
      if (f.shape != Shape::Tree || g.is_special(f.node)) continue;
      ++s.tree_checks;
      s.tree_violations +=
          oracle_shape(h, Region::of(h, inv.at(f.node)), LabelSelection::from_abstract(f.labels)) != Shape::Tree;
    }
  }
  s.seconds = seconds_since(t0);
  return s;
}

void soundness(const RandomSuite& s, Outcome& o) {
  o.require(s.heaps >= kSoundnessHeaps, "too few heaps");
  o.require(s.with_arrays > 0 && s.with_cycles > 0, "suite lacks arrays or cycles");
  o.require(s.sound == s.heaps, std::to_string(s.heaps - s.sound) + " heaps fail the embedding check");
  o.require(s.seconds < kSoundnessSeconds, "too slow");
  o.detail << (o.pass ? "" : "; ") << s.sound << "/" << s.heaps << " sound, " << s.with_arrays << " with arrays, "
           << s.with_cycles << " with cycles, " << std::fixed << std::setprecision(2) << s.seconds << "s";
}

void oracle_agreement(const RandomSuite& s, Outcome& o) {
  o.require(s.injective_violations == 0, std::to_string(s.injective_violations) + " injectivity violations");
  o.require(s.tree_violations == 0, std::to_string(s.tree_violations) + " shape violations");
  o.require(s.injective_checks > 0 && s.tree_checks > 0, "no facts checked");
  o.detail << (o.pass ? "" : "; ") << s.injective_checks << " injective labels, " << s.tree_checks << " tree facts";
}

struct PairSuite {
  int pairs = 0, sound = 0, below = 0;
};

PairSuite run_pairs() {
  PairSuite s;
  std::mt19937_64 rng(2002);
  for (int i = 0; i < kMergePairs; ++i) {
    const ConcreteHeap h1 = testing_support::random_heap(rng);
    const ConcreteHeap h2 = testing_support::random_heap(rng);
    const auto a1 = abstract_heap(h1);
    const auto a2 = abstract_heap(h2);
    for (MergeMode mode : {MergeMode::Join, MergeMode::Widen}) {
      const MergeResult m = merge(a1.graph, a2.graph, mode);
      ++s.pairs;
      s.sound += check_embedding(h1, m.graph, through(a1.mu, m.eta1)).passed() &&
                 check_embedding(h2, m.graph, through(a2.mu, m.eta2)).passed();
      s.below += compare(a1.graph, m.graph).leq && compare(a2.graph, m.graph).leq;
    }
  }
  return s;
}

void merge_soundness(const PairSuite& s, Outcome& o) {
  o.require(s.sound == s.pairs, std::to_string(s.pairs - s.sound) + " merges unsound");
  o.detail << (o.pass ? "" : "; ") << s.sound << "/" << s.pairs << " (" << kMergePairs << " pairs x join, widen)";
}

void compare_properties(const PairSuite& s, Outcome& o) {
  int reflexive = 0, fixtures_seen = 0, dropped = 0, narrowed = 0, trees = 0, weakened = 0;
  for (const auto& [name, h] : fixtures()) {
    const AbstractGraph g = abstract_heap(h).graph;
    ++fixtures_seen;
    reflexive += compare(g, g).leq;

    for (std::size_t i = 0; i < g.edges.size(); ++i) {
      if (g.edges[i].target == g.null) continue;
      AbstractGraph w = g;
      w.edges.erase(w.edges.begin() + static_cast<std::ptrdiff_t>(i));
      ++weakened;
      dropped += has_kind(compare(g, w), DiffKind::UnmatchedEdge);
    }
    for (const auto& [id, node] : g.nodes) {
      if (g.is_special(id)) continue;
      AbstractGraph w = g;
      const std::uint64_t lo = node.card.lo() + 1;
      w.nodes.at(id).card = Interval(lo, std::max(lo, node.card.hi()));
      ++weakened;
      narrowed += has_kind(compare(g, w), DiffKind::CardinalityExcess);

      const LabelSet self = g.self_labels(id);
      if (self.empty()) continue;
      const auto facts = g.shapes_of(id);
      const bool covered = std::any_of(facts.begin(), facts.end(), [&](const ShapeFact* f) {
        return f->shape == Shape::Tree && std::includes(f->labels.begin(), f->labels.end(), self.begin(), self.end());
      });
      if (covered) continue;
      AbstractGraph t = g;
      t.shapes.push_back({id, self, Shape::Tree});
      t.normalize();
      ++weakened;
      trees += has_kind(compare(g, t), DiffKind::ShapeWeakening);
    }
  }
  o.require(reflexive == fixtures_seen, "compare(g,g) fails on a fixture");
  o.require(s.below == s.pairs, std::to_string(s.pairs - s.below) + " inputs not below their merge");
  o.require(dropped + narrowed + trees == weakened, "undetected weakening");
  o.require(trees > 0 && dropped > 0 && narrowed > 0, "a weakening kind was never exercised");
  o.detail << (o.pass ? "" : "; ") << reflexive << "/" << fixtures_seen << " reflexive, " << s.below << "/" << s.pairs
           << " below merge, " << dropped + narrowed + trees << "/" << weakened << " weakenings detected";
}

void scale_invariance(Outcome& o) {
  std::optional<AbstractGraph> reference;
  std::size_t nodes = 0;
  for (std::int64_t n : {2, 100, 100000}) {
    AbstractGraph g = canonicalize(abstract_heap(list_fixture(n)).graph);
    bool card_ok = true;
    for (auto& [id, node] : g.nodes) {
      if (g.is_special(id)) continue;
      card_ok &= node.card == Interval(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(n));
      node.card = Interval(1, 1);
    }
    o.require(card_ok, "Cd of list(" + std::to_string(n) + ") is not [N,N]");
    if (!reference) {
      reference = g;
      nodes = g.content_node_count();
    } else {
      o.require(g == *reference, "graph of list(" + std::to_string(n) + ") differs");
    }
  }
  o.detail << (o.pass ? "" : "; ") << nodes << " content node(s) for N = 2, 100, 100000";
}

void performance(Outcome& o) {
  auto time_abstract = [](const ConcreteHeap& h) {
    double best = 1e9;
    for (int rep = 0; rep < 3; ++rep) {
      const auto t0 = Clock::now();
      const auto r = abstract_heap(h);
      best = std::min(best, seconds_since(t0));
    }
    return best;
  };
  double base = 0, doubled = 0;
  std::size_t pointers = 0, doubled_pointers = 0;
  {
    const ConcreteHeap h = synthetic_heap(kPerfObjects, 2, 77);
    pointers = h.pointers().size();
    base = time_abstract(h);
  }
  {
    const ConcreteHeap h = synthetic_heap(kPerfObjects, 4, 78);
    doubled_pointers = h.pointers().size();
    doubled = time_abstract(h);
  }
  const long rss = peak_rss_kib();
  o.require(pointers >= 400'000, "too few pointers");
  o.require(base < kPerfSeconds, "abstraction too slow");
  o.require(rss < kPerfMaxRssKiB, "peak memory over budget");
  o.require(doubled < kDoublingRatio * base, "doubling ratio too high");
  o.detail << (o.pass ? "" : "; ") << std::fixed << std::setprecision(3) << kPerfObjects << " objects / " << pointers
           << " pointers in " << base << "s; " << doubled_pointers << " pointers in " << doubled << "s (ratio "
           << std::setprecision(2) << doubled / base << "); peak RSS " << rss / 1024 << " MiB";
}

void reduction(Outcome& o) {
  const AbstractGraph g = canonicalize(abstract_heap(octree_scene_fixture()).graph);
  const ReducedGraph r = heapabs::reduce(g);
  std::size_t reduced = 0;
  for (const auto& [id, rn] : r.nodes) reduced += !g.is_special(id);
  const std::size_t content = g.content_node_count();
  o.require(2 * reduced <= content, "reduced graph larger than half");

  for (const AbstractEdge* e : g.out_edges(g.root)) {
    if (e->target == g.null) continue;
    const ReducedNode& rn = r.nodes.at(r.reduced_of.at(e->target));
    o.require(rn.id == e->target && rn.interesting, "variable target collapsed into another node");
  }

  std::multiset<NodeId> covered;
  for (const auto& [id, rn] : r.nodes) {
    const Subview v = expand(g, r, id);
    std::vector<NodeId> ids;
    for (const AbstractNode& n : v.nodes) ids.push_back(n.id);
    std::vector<NodeId> covers = rn.covers;
    std::sort(ids.begin(), ids.end());
    std::sort(covers.begin(), covers.end());
    o.require(ids == covers, "expand of r" + std::to_string(id) + " differs from its cover");
    for (NodeId n : covers)
      if (!g.is_special(n)) covered.insert(n);
    for (NodeId n : covers) o.require(r.reduced_of.at(n) == id, "reduced_of disagrees with covers");
  }
  std::multiset<NodeId> expected;
  for (const auto& [id, node] : g.nodes)
    if (!g.is_special(id)) expected.insert(id);
  o.require(covered == expected, "covers do not partition the graph");
  o.detail << (o.pass ? "" : "; ") << content << " -> " << reduced << " nodes";
}

std::set<FindingKind> kinds_on(const Analysis& a, NodeId n) {
  std::set<FindingKind> out;
  for (const Finding& f : a.findings)
    if (f.node == n) out.insert(f.kind);
  return out;
}

NodeId node_with_types(const AbstractGraph& g, const TypeSet& types) {
  for (const auto& [id, node] : g.nodes)
    if (node.types == types) return id;
  return g.null;
}

void diagnostics(Outcome& o) {
  const Analysis face = analyze(prepare_heap(facegrid_fixture(180), {}), {});
  const NodeId point = node_with_types(face.graph, {"Point"});
  const auto on_point = kinds_on(face, point);
  double share = 0;
  for (const NodeMetrics& m : face.metrics)
    if (m.node == point) share = m.heap_fraction;
  o.require(on_point.contains(FindingKind::OverFactored), "overFactored not flagged on Point");
  o.require(on_point.contains(FindingKind::Hot25), "Point not hot25");

  const Analysis expr = analyze(prepare_heap(exprtree_fixture(), {}), {});
  const NodeId env = node_with_types(expr.graph, {"Var[]"});
  o.require(kinds_on(expr, env).contains(FindingKind::SmallContainers), "env array not flagged smallContainers");

  int special = 0;
  for (const auto& [name, h] : fixtures()) {
    const Analysis a = analyze(prepare_heap(h, {}), {});
    for (const Finding& f : a.findings) special += a.graph.is_special(f.node);
  }
  for (const Analysis* a : {&face, &expr})
    for (const Finding& f : a->findings) special += a->graph.is_special(f.node);
  o.require(special == 0, std::to_string(special) + " findings on root/null");
  o.detail << (o.pass ? "" : "; ") << "Point share " << std::fixed << std::setprecision(3) << share
           << ", Point findings {";
  bool first = true;
  for (FindingKind k : on_point) {
    o.detail << (first ? "" : ", ") << to_string(k);
    first = false;
  }
  o.detail << "}";
}

void backoff(Outcome& o) {
  const std::uint64_t ramp = count_snapshots(testing_support::ramp_decay_trace());
  std::uint64_t constant_total = 0;
  for (std::uint64_t level : {1ULL, 4'000'000ULL, 1ULL << 40})
    constant_total += count_snapshots(std::vector<std::uint64_t>(200, level));
  o.require(ramp >= kMinSnapshots && ramp <= kMaxSnapshots, "ramp-and-decay count out of range");
  o.require(constant_total == 0, "constant trace snapshots");
  o.detail << (o.pass ? "" : "; ") << ramp << " snapshots on ramp-and-decay, " << constant_total << " on constant";
}

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("heapabs-accept-" + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

void formats(Outcome& o) {
  int graphs = 0, round_trips = 0, dgml = 0, dgml_valid = 0;
  auto check = [&](const AbstractGraph& raw) {
    const AbstractGraph g = canonicalize(raw);
    ++graphs;
    round_trips += deserialize(serialize(g)) == g && serialize(deserialize(serialize(g))) == serialize(g);
    for (const std::string& xml : {export_dgml(g), export_dgml(g, heapabs::reduce(g))}) {
      ++dgml;
      dgml_valid += testing_support::dgml_violations(xml).empty();
    }
  };
  for (const auto& [name, h] : fixtures()) {
    check(abstract_heap(h).graph);
    const Analysis a = analyze(prepare_heap(h, {}), {});
    ++dgml;
    dgml_valid +=
        testing_support::dgml_violations(export_dgml(a.graph, {}, {a.metrics, a.findings, a.container_lengths})).empty();
  }
  std::mt19937_64 rng(3003);
  for (int i = 0; i < 200; ++i) check(abstract_heap(testing_support::random_heap(rng)).graph);
  o.require(round_trips == graphs, "ahg-1 round trip not identity");
  o.require(dgml_valid == dgml, "invalid DGML");

  TempDir dir;
  std::ofstream(dir / "e.json") << write_snapshot(exprtree_fixture());
  std::ofstream(dir / "l.json") << write_snapshot(list_fixture(4));
  std::ofstream(dir / "bad.json") << "{\"format\":\"heapsnap-0\"}";
  const std::vector<std::pair<std::vector<std::string>, int>> cases{
      {{"abstract", dir / "e.json", "-o", dir / "e.ahg", "--mu", dir / "e.mu"}, kExitOk},
      {{"abstract", dir / "l.json", "-o", dir / "l.ahg"}, kExitOk},
      {{"compare", dir / "e.ahg", dir / "e.ahg"}, kExitOk},
      {{"compare", dir / "l.ahg", dir / "e.ahg"}, kExitNegative},
      {{"check", dir / "e.json", dir / "e.ahg", dir / "e.mu"}, kExitOk},
      {{"merge", dir / "l.ahg", dir / "e.ahg", "-o", dir / "m.ahg"}, kExitOk},
      {{"compare", dir / "l.ahg", dir / "m.ahg"}, kExitOk},
      {{"frobnicate"}, kExitUsage},
      {{"compare", dir / "e.ahg"}, kExitUsage},
      {{"compare", dir / "missing.ahg", dir / "e.ahg"}, kExitInput},
      {{"abstract", dir / "bad.json"}, kExitInput},
  };
  int exits = 0;
  for (const auto& [args, want] : cases) {
    const int got = run_cli_args(args);
    exits += got == want;
    o.require(got == want, args.front() + " exited " + std::to_string(got) + ", expected " + std::to_string(want));
  }
  o.detail << (o.pass ? "" : "; ") << round_trips << "/" << graphs << " round trips, " << dgml_valid << "/" << dgml
           << " DGML valid, " << exits << "/" << cases.size() << " exit codes";
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int number, const std::string& title, const std::function<void(Outcome&)>& body) {
    Outcome o;
    try {
      body(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << std::setw(2) << number << "  " << title << "  ("
              << o.detail.str() << ")" << std::endl;
  };

  RandomSuite random_suite;
  PairSuite pairs;
  report(1, "exprtree reproduction", exprtree_reproduction);
  report(2, "soundness on random heaps", [&](Outcome& o) {
    random_suite = run_random_suite();
    soundness(random_suite, o);
  });
  report(3, "oracle agreement", [&](Outcome& o) { oracle_agreement(random_suite, o); });
  report(4, "merge soundness", [&](Outcome& o) {
    pairs = run_pairs();
    merge_soundness(pairs, o);
  });
  report(5, "compare properties", [&](Outcome& o) { compare_properties(pairs, o); });
  report(6, "scale invariance", scale_invariance);
  report(7, "performance", performance);
  report(8, "reduction", reduction);
  report(9, "diagnostics", diagnostics);
  report(10, "backoff policy", backoff);
  report(11, "formats and exit codes", formats);
  std::cout << (11 - failed) << "/11 criteria pass" << std::endl;
  return failed;
}
