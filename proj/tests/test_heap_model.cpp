#include <algorithm>
#include <random>

#include "doctest.h"
#include "heapabs/fixtures.hpp"
#include "heapabs/heap_model.hpp"
#include "support/random_heap.hpp"

using namespace heapabs;

namespace {

Label field(const ConcreteHeap& h, const char* name) { return *h.field_label(name); }

TypeId type_named(const ConcreteHeap& h, const char* name) {
  return h.types().find_by_name(name)->id;
}

ConcreteHeap two_cycle() {
  TypeTable types({{1, "Node", TypeKind::Object, std::nullopt, {{"next", 1}}, std::nullopt}});
  return ConcreteHeap(types, {{1, 1, std::nullopt, {{"next", 2}}, {}}, {2, 1, std::nullopt, {{"next", 1}}, {}}},
                      {{"x", 1}});
}

ConcreteHeap diamond() {
  TypeTable types({{1, "N", TypeKind::Object, std::nullopt, {{"l", 1}}, std::nullopt}});
  return ConcreteHeap(types,
                      {{1, 1, std::nullopt, {{"l", 3}}, {}},
                       {2, 1, std::nullopt, {{"l", 3}}, {}},
                       {3, 1, std::nullopt, {}, {}}},
                      {});
}

}  // namespace

TEST_CASE("exprtree fixture wiring") {
  const ConcreteHeap h = exprtree_fixture();
  CHECK(h.object_count() == 9);
  CHECK(h.roots().size() == 2);
  CHECK(h.pointers().size() == 13);
  const auto& ptrs = h.pointers();
  const Label l = field(h, "l");
  CHECK(std::count(ptrs.begin(), ptrs.end(), Pointer{4, l, 7}) == 1);
  CHECK(std::count(ptrs.begin(), ptrs.end(), Pointer{5, l, 7}) == 1);
  CHECK(h.at(9).elements == std::vector<ObjectId>{7, 8, kNullObject});
}

TEST_CASE("pointer count equals fields plus slots plus roots") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const ConcreteHeap h = testing_support::random_heap(rng);
    std::size_t expected = h.roots().size();
    for (const ConcreteObject& o : h.objects()) expected += o.fields.size() + o.elements.size();
    CHECK(h.pointers().size() == expected);
  }
}

TEST_CASE("heap validation errors") {
  TypeTable types({{1, "Node", TypeKind::Object, std::nullopt, {{"next", 1}}, std::nullopt}});
  SUBCASE("dangling target") {
    CHECK_THROWS_AS(ConcreteHeap(types, {{1, 1, std::nullopt, {{"next", 42}}, {}}}, {}), HeapError);
  }
  SUBCASE("duplicate id") {
    CHECK_THROWS_AS(ConcreteHeap(types, {{1, 1, std::nullopt, {}, {}}, {1, 1, std::nullopt, {}, {}}}, {}),
                    HeapError);
  }
  SUBCASE("undeclared field") {
    CHECK_THROWS_AS(ConcreteHeap(types, {{1, 1, std::nullopt, {{"prev", 0}}, {}}}, {}), HeapError);
  }
  SUBCASE("object id zero") {
    CHECK_THROWS_AS(ConcreteHeap(types, {{0, 1, std::nullopt, {}, {}}}, {}), HeapError);
  }
  SUBCASE("elements on an object") {
    CHECK_THROWS_AS(ConcreteHeap(types, {{1, 1, std::nullopt, {}, {0}}}, {}), HeapError);
  }
  SUBCASE("root to a missing object") {
    CHECK_THROWS_AS(ConcreteHeap(types, {}, {{"x", 3}}), HeapError);
  }
}

TEST_CASE("type table validation") {
  CHECK_THROWS_AS(TypeTable({{1, "A", TypeKind::Object, 1, {}, std::nullopt}}), HeapError);
  CHECK_THROWS_AS(TypeTable({{1, "A", TypeKind::Object, 2, {}, std::nullopt},
                             {2, "B", TypeKind::Object, 1, {}, std::nullopt}}),
                  HeapError);
  CHECK_THROWS_AS(TypeTable({{1, "A", TypeKind::Array, std::nullopt, {}, std::nullopt}}), HeapError);
  CHECK_NOTHROW(TypeTable({{1, "A", TypeKind::Array, std::nullopt, {}, std::nullopt}}, false));
  CHECK_THROWS_AS(TypeTable({{1, "A", TypeKind::Object, std::nullopt, {}, 1}}), HeapError);
  CHECK_THROWS_AS(TypeTable({{1, "A", TypeKind::Object, std::nullopt, {{"x", 9}}, std::nullopt}}), HeapError);
  CHECK_THROWS_AS(TypeTable({{1, "A", TypeKind::Object, std::nullopt, {}, std::nullopt},
                             {1, "B", TypeKind::Object, std::nullopt, {}, std::nullopt}}),
                  HeapError);
  CHECK_THROWS_AS(TypeTable({{1, "A", TypeKind::Array, std::nullopt, {{"x", 1}}, 1}}), HeapError);
}

TEST_CASE("recursive relation on exprtree") {
  const ConcreteHeap h = exprtree_fixture();
  const RecursiveRelation rel = recursive_relation(h.types());
  const char* group[] = {"Expr", "Add", "Sub", "Mult"};
  for (const char* a : group)
    for (const char* b : group) CHECK(rel.related(type_named(h, a), type_named(h, b)));
  for (const char* leaf : {"Const", "Var", "Var[]"}) {
    for (const char* b : {"Expr", "Add", "Const", "Var", "Var[]"})
      CHECK_FALSE(rel.related(type_named(h, leaf), type_named(h, b)));
  }
}

TEST_CASE("recursive relation: self loop and acyclic tables") {
  const ConcreteHeap list = list_fixture(3);
  const TypeId node = list.types().decls()[0].id;
  CHECK(recursive_relation(list.types()).related(node, node));

  TypeTable flat({{1, "A", TypeKind::Object, std::nullopt, {{"b", 2}}, std::nullopt},
                  {2, "B", TypeKind::Object, std::nullopt, {}, std::nullopt}});
  const RecursiveRelation rel = recursive_relation(flat);
  for (TypeId a : {1u, 2u})
    for (TypeId b : {1u, 2u}) CHECK_FALSE(rel.related(a, b));
}

TEST_CASE("recursive relation is transitive on random tables") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 300; ++i) {
    const ConcreteHeap h = testing_support::random_heap(rng);
    const RecursiveRelation rel = recursive_relation(h.types());
    for (const TypeDecl& a : h.types().decls())
      for (const TypeDecl& b : h.types().decls())
        for (const TypeDecl& c : h.types().decls())
          if (rel.related(a.id, b.id) && rel.related(b.id, c.id)) CHECK(rel.related(a.id, c.id));
  }
}

TEST_CASE("pointers_between examples") {
  const ConcreteHeap h = exprtree_fixture();
  const Label l = field(h, "l");
  CHECK(pointers_between(h, Region::of(h, {4, 5}), Region::of(h, {7})) ==
        std::vector<Pointer>{{4, l, 7}, {5, l, 7}});
  CHECK(pointers_between(h, Region::of(h, {}), Region::of(h, {7})).empty());
  CHECK(pointers_between(h, Region::of(h, {9}), Region::of(h, {7, 8})) ==
        std::vector<Pointer>{{9, Label::index(0), 7}, {9, Label::index(1), 8}});
  CHECK_THROWS_AS(Region::of(h, {0}), HeapError);
  CHECK_THROWS_AS(Region::of(h, {77}), HeapError);
}

TEST_CASE("pointers_between is monotone in both regions") {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 200; ++i) {
    const ConcreteHeap h = testing_support::random_heap(rng);
    std::vector<ObjectId> ids;
    for (const ConcreteObject& o : h.objects()) ids.push_back(o.id);
    std::vector<ObjectId> c1, c2, c1big, c2big;
    for (ObjectId id : ids) {
      const int r = static_cast<int>(rng() % 4);
      if (r == 0) c1.push_back(id);
      if (r <= 1) c1big.push_back(id);
      if (r == 2) c2.push_back(id);
      if (r >= 2 || r == 0) c2big.push_back(id);
    }
    const auto small = pointers_between(h, Region::of(h, c1), Region::of(h, c2));
    const auto big = pointers_between(h, Region::of(h, c1big), Region::of(h, c2big));
    CHECK(std::includes(big.begin(), big.end(), small.begin(), small.end()));
  }
}

TEST_CASE("oracle_injective examples") {
  const ConcreteHeap h = exprtree_fixture();
  const Region interior = Region::of(h, {1, 2, 4, 5});
  CHECK_FALSE(oracle_injective(h, interior, Region::of(h, {7, 8}), field(h, "l")));
  CHECK(oracle_injective(h, interior, Region::of(h, {3, 6}), field(h, "r")));
  CHECK(oracle_injective(h, Region::of(h, {3}), Region::of(h, {6}), field(h, "l")));
}

TEST_CASE("pair scan and hash scan agree on random heaps") {
  std::mt19937_64 rng(7);
  int disagreements = 0;
  for (int i = 0; i < 1000; ++i) {
    const ConcreteHeap h = testing_support::random_heap(rng);
    std::vector<ObjectId> a, b;
    for (const ConcreteObject& o : h.objects()) {
      if (rng() % 2) a.push_back(o.id);
      if (rng() % 2) b.push_back(o.id);
    }
    const Region c1 = Region::of(h, a), c2 = Region::of(h, b);
    std::set<Label> labels;
    for (const Pointer& p : h.pointers()) labels.insert(p.label);
    for (Label l : labels)
      if (oracle_injective(h, c1, c2, l) != injective_by_hash(h, c1, c2, l)) ++disagreements;
  }
  CHECK(disagreements == 0);
}

TEST_CASE("oracle_shape examples") {
  const ConcreteHeap h = exprtree_fixture();
  CHECK(oracle_shape(h, Region::of(h, {1, 2, 4, 5}), LabelSelection::from_abstract({"l", "r"})) ==
        Shape::Tree);
  const ConcreteHeap cyc = two_cycle();
  CHECK(oracle_shape(cyc, Region::of(cyc, {1, 2}), LabelSelection::from_abstract({"next"})) ==
        Shape::Any);
  const ConcreteHeap dia = diamond();
  CHECK(oracle_shape(dia, Region::of(dia, {1, 2, 3}), LabelSelection::from_abstract({"l"})) ==
        Shape::Any);
  CHECK(oracle_shape(dia, Region::of(dia, {1, 2, 3}), LabelSelection::from_abstract({})) ==
        Shape::Tree);
}

TEST_CASE("oracle_shape is monotone under label restriction") {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 300; ++i) {
    const ConcreteHeap h = testing_support::random_heap(rng);
    std::vector<ObjectId> ids;
    for (const ConcreteObject& o : h.objects()) ids.push_back(o.id);
    const Region all = Region::of(h, ids);
    const std::set<std::string> full{"a", "b", "c", "next", "[]"};
    if (oracle_shape(h, all, LabelSelection::from_abstract(full)) != Shape::Tree) continue;
    for (const std::string& drop : full) {
      std::set<std::string> fewer = full;
      fewer.erase(drop);
      CHECK(oracle_shape(h, all, LabelSelection::from_abstract(fewer)) == Shape::Tree);
    }
  }
}

TEST_CASE("fixtures") {
  SUBCASE("list of one") {
    const ConcreteHeap h = list_fixture(1);
    CHECK(h.object_count() == 1);
    CHECK(h.roots().at("head") == 1);
    CHECK(h.at(1).fields.at("next") == kNullObject);
  }
  SUBCASE("facegrid ownership") {
    const ConcreteHeap h = facegrid_fixture(180);
    std::map<std::string, int> counts;
    for (const ConcreteObject& o : h.objects()) ++counts[h.types().at(o.type).name];
    CHECK(counts["Face"] == 180);
    CHECK(counts["Point[]"] == 180);
    CHECK(counts["Point"] == 720);
    std::vector<ObjectId> arrays, points;
    for (const ConcreteObject& o : h.objects()) {
      const std::string& name = h.types().at(o.type).name;
      if (name == "Point[]") arrays.push_back(o.id);
      if (name == "Point") points.push_back(o.id);
    }
    const Region ra = Region::of(h, arrays), rp = Region::of(h, points);
    for (std::uint32_t i = 0; i < 4; ++i) CHECK(oracle_injective(h, ra, rp, Label::index(i)));
    std::set<ObjectId> targets;
    for (const Pointer& p : pointers_between(h, ra, rp)) CHECK(targets.insert(p.target).second);
  }
  SUBCASE("dispatch and parameter errors") {
    CHECK(build_fixture("list", {{"n", 4}}).object_count() == 4);
    CHECK(build_fixture("btree", {{"n", 15}}).object_count() == 15);
    CHECK_THROWS_AS(build_fixture("nope"), FixtureError);
    CHECK_THROWS_AS(build_fixture("list", {{"n", 0}}), FixtureError);
  }
}

TEST_CASE("byte estimator") {
  const ConcreteHeap h = exprtree_fixture();
  ByteEstimator est;
  CHECK(est.estimate(h, h.at(1)) == 4 + 2 * 4);
  CHECK(est.estimate(h, h.at(3)) == 4);
  CHECK(est.estimate(h, h.at(9)) == 4 + 3 * 4);
  est.primitive_bytes["Const"] = 8;
  CHECK(est.estimate(h, h.at(3)) == 12);
  const ConcreteHeap f = facegrid_fixture(2);
  for (const ConcreteObject& o : f.objects()) CHECK(est.bytes_of(f, o) == *o.bytes);
}
