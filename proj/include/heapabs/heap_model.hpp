#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace heapabs {

using TypeId = std::uint32_t;
using ObjectId = std::int64_t;

inline constexpr ObjectId kNullObject = 0;
inline constexpr ObjectId kRootObject = -1;

/// Raised for any structural problem in a concrete heap; `where` locates it.
class HeapError : public std::runtime_error {
 public:
  HeapError(std::string where, const std::string& what)
      : std::runtime_error(where.empty() ? what : where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

enum class TypeKind : std::uint8_t { Object, Array, Container, Opaque };

std::string_view to_string(TypeKind kind);
std::optional<TypeKind> parse_type_kind(std::string_view text);

struct FieldDecl {
  std::string label;
  TypeId declared_type = 0;
};

struct TypeDecl {
  TypeId id = 0;
  std::string name;
  TypeKind kind = TypeKind::Object;
  std::optional<TypeId> supertype;
  std::vector<FieldDecl> fields;
  std::optional<TypeId> element_type;

  bool is_container() const { return kind == TypeKind::Array || kind == TypeKind::Container; }
};

/// Validated, reference-closed set of type declarations.
class TypeTable {
 public:
  TypeTable() = default;
  /// Containers without an element type are rejected unless
  /// `require_element_types` is false (used for rewritten heaps).
  explicit TypeTable(std::vector<TypeDecl> decls, bool require_element_types = true);

  std::span<const TypeDecl> decls() const { return decls_; }
  std::size_t size() const { return decls_.size(); }

  const TypeDecl* find(TypeId id) const;
  const TypeDecl& at(TypeId id) const;
  const TypeDecl* find_by_name(std::string_view name) const;

  /// True when `label` is declared on `type` or any of its supertypes.
  bool declares_field(TypeId type, std::string_view label) const;
  std::size_t index_of(TypeId id) const { return index_.at(id); }

 private:
  std::vector<TypeDecl> decls_;
  std::unordered_map<TypeId, std::size_t> index_;
};

enum class LabelKind : std::uint8_t { Variable, Field, Index };

/// Concrete pointer label. `value` is an interned name id (variables and
/// fields, see ConcreteHeap::label_name) or the element index.
struct Label {
  LabelKind kind = LabelKind::Field;
  std::uint32_t value = 0;

  static constexpr Label index(std::uint32_t i) { return {LabelKind::Index, i}; }
  bool operator==(const Label&) const = default;
  auto operator<=>(const Label&) const = default;
};

struct Pointer {
  ObjectId source = 0;
  Label label;
  ObjectId target = 0;

  bool operator==(const Pointer&) const = default;
  auto operator<=>(const Pointer&) const = default;
};

struct ConcreteObject {
  ObjectId id = 0;
  TypeId type = 0;
  std::optional<std::uint64_t> bytes;
  std::map<std::string, ObjectId> fields;
  std::vector<ObjectId> elements;
};

/// Immutable concrete heap: objects, variable roots, and the derived pointer
/// set. Root and null are implicit (ids -1 and 0).
class ConcreteHeap {
 public:
  ConcreteHeap() = default;
  ConcreteHeap(TypeTable types, std::vector<ConcreteObject> objects,
               std::map<std::string, ObjectId> roots);

  const TypeTable& types() const { return types_; }
  /// Objects sorted by id.
  std::span<const ConcreteObject> objects() const { return objects_; }
  const std::map<std::string, ObjectId>& roots() const { return roots_; }
  std::span<const Pointer> pointers() const { return pointers_; }

  std::size_t object_count() const { return objects_.size(); }
  bool contains(ObjectId id) const { return index_.contains(id); }
  const ConcreteObject* find(ObjectId id) const;
  const ConcreteObject& at(ObjectId id) const;
  /// Dense position of `id` in objects().
  std::size_t index_of(ObjectId id) const { return index_.at(id); }
  const TypeDecl& type_of(ObjectId id) const { return types_.at(at(id).type); }

  std::string_view label_name(std::uint32_t name_id) const { return label_names_.at(name_id); }
  std::optional<Label> field_label(std::string_view name) const;
  std::optional<Label> variable_label(std::string_view name) const;
  /// Field or variable name, or the decimal element index.
  std::string label_text(Label label) const;
  /// Field or variable name, or "[]" for every element index.
  std::string abstract_label(Label label) const;

 private:
  std::uint32_t intern(const std::string& name);

  TypeTable types_;
  std::vector<ConcreteObject> objects_;
  std::map<std::string, ObjectId> roots_;
  std::unordered_map<ObjectId, std::size_t> index_;
  std::vector<std::string> label_names_;
  std::unordered_map<std::string, std::uint32_t> label_ids_;
  std::vector<Pointer> pointers_;
};

/// Abstract label used for every array/container element slot.
inline constexpr std::string_view kElementLabel = "[]";

/// Sorted set of object ids. `of` enforces the region rules (existing heap
/// objects only); `any` admits root and null as well.
class Region {
 public:
  Region() = default;
  static Region of(const ConcreteHeap& heap, std::vector<ObjectId> members);
  static Region any(std::vector<ObjectId> members);

  std::span<const ObjectId> members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  bool contains(ObjectId id) const;

 private:
  std::vector<ObjectId> members_;
};

/// A selection of concrete labels, possibly "every element index".
struct LabelSelection {
  std::set<std::string> names;
  std::set<std::uint32_t> indices;
  bool all_indices = false;

  /// Concretizes abstract labels: names stand for themselves, "[]" for
  /// every index.
  static LabelSelection from_abstract(const std::set<std::string>& labels);
  bool matches(const ConcreteHeap& heap, Label label) const;
};

/// Partition of types into strongly connected groups of the type-reference
/// graph (field/element declarations plus supertype -> subtype edges).
class RecursiveRelation {
 public:
  RecursiveRelation() = default;
  RecursiveRelation(std::vector<std::vector<TypeId>> groups, std::vector<bool> recursive);

  /// True iff both types sit in one group whose subgraph has a cycle.
  bool related(TypeId a, TypeId b) const;
  std::span<const std::vector<TypeId>> groups() const { return groups_; }
  bool is_recursive(std::size_t group) const { return recursive_.at(group); }
  std::optional<std::size_t> group_of(TypeId type) const;

 private:
  std::vector<std::vector<TypeId>> groups_;
  std::vector<bool> recursive_;
  std::unordered_map<TypeId, std::size_t> group_of_;
};

RecursiveRelation recursive_relation(const TypeTable& types);

/// P(c1, c2): pointers whose source is in c1 and target in c2, sorted.
std::vector<Pointer> pointers_between(const ConcreteHeap& heap, const Region& c1, const Region& c2);

/// inj(c1, c2, p) by scanning every pair of p-labeled pointers.
bool oracle_injective(const ConcreteHeap& heap, const Region& c1, const Region& c2, Label p);

/// inj(c1, c2, p) via a target -> source table; must agree with the pair scan.
bool injective_by_hash(const ConcreteHeap& heap, const Region& c1, const Region& c2, Label p);

enum class Shape : std::uint8_t { Tree, Any };
std::string_view to_string(Shape shape);

/// Tree iff P(c, c) restricted to `labels` is a forest: acyclic and every
/// member has at most one incoming edge. Depth-first search over the
/// restricted subgraph.
Shape oracle_shape(const ConcreteHeap& heap, const Region& c, const LabelSelection& labels);

/// Shallow size model used when a snapshot omits `bytes`.
struct ByteEstimator {
  std::uint64_t header_bytes = 4;
  std::uint64_t pointer_bytes = 4;
  /// Extra primitive payload per type name.
  std::map<std::string, std::uint64_t, std::less<>> primitive_bytes;

  std::uint64_t estimate(const ConcreteHeap& heap, const ConcreteObject& object) const;
  std::uint64_t bytes_of(const ConcreteHeap& heap, const ConcreteObject& object) const {
    return object.bytes ? *object.bytes : estimate(heap, object);
  }
};

}  // namespace heapabs
