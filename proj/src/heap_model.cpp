#include "heapabs/heap_model.hpp"

#include <algorithm>
#include <functional>
#include <unordered_set>

#include "heapabs/oracle_detail.hpp"

namespace heapabs {

std::string_view to_string(TypeKind kind) {
  switch (kind) {
    case TypeKind::Object: return "object";
    case TypeKind::Array: return "array";
    case TypeKind::Container: return "container";
    case TypeKind::Opaque: return "opaque";
  }
  return "object";
}

std::optional<TypeKind> parse_type_kind(std::string_view text) {
  if (text == "object") return TypeKind::Object;
  if (text == "array") return TypeKind::Array;
  if (text == "container") return TypeKind::Container;
  if (text == "opaque") return TypeKind::Opaque;
  return std::nullopt;
}

std::string_view to_string(Shape shape) { return shape == Shape::Tree ? "tree" : "any"; }

// ---------------------------------------------------------------------------
// TypeTable

TypeTable::TypeTable(std::vector<TypeDecl> decls, bool require_element_types)
    : decls_(std::move(decls)) {
  std::sort(decls_.begin(), decls_.end(),
            [](const TypeDecl& a, const TypeDecl& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < decls_.size(); ++i) {
    const TypeDecl& t = decls_[i];
    const std::string where = "type " + std::to_string(t.id);
    if (t.id == 0) throw HeapError(where, "type ids must be positive");
    if (!index_.emplace(t.id, i).second) throw HeapError(where, "duplicate type id");
  }
  auto resolves = [&](TypeId id) { return index_.contains(id); };
  for (const TypeDecl& t : decls_) {
    const std::string where = "type " + std::to_string(t.id) + " (" + t.name + ")";
    if (t.name.empty()) throw HeapError(where, "empty type name");
    if (t.supertype && !resolves(*t.supertype))
      throw HeapError(where, "unknown supertype " + std::to_string(*t.supertype));
    if (t.element_type && !resolves(*t.element_type))
      throw HeapError(where, "unknown element type " + std::to_string(*t.element_type));
    std::set<std::string_view> seen;
    for (const FieldDecl& f : t.fields) {
      if (!resolves(f.declared_type))
        throw HeapError(where, "field '" + f.label + "' has unknown type " +
                                   std::to_string(f.declared_type));
      if (f.label.empty() || f.label == kElementLabel)
        throw HeapError(where, "invalid field label '" + f.label + "'");
      if (!seen.insert(f.label).second) throw HeapError(where, "duplicate field '" + f.label + "'");
    }
    switch (t.kind) {
      case TypeKind::Object:
        if (t.element_type) throw HeapError(where, "object type with an element type");
        break;
      case TypeKind::Array:
      case TypeKind::Container:
        if (!t.fields.empty()) throw HeapError(where, "container type with named fields");
        if (require_element_types && !t.element_type)
          throw HeapError(where, "container type without an element type");
        break;
      case TypeKind::Opaque:
        if (!t.fields.empty() || t.element_type)
          throw HeapError(where, "opaque type with fields or elements");
        break;
    }
  }
  // Supertype chains must terminate.
  for (const TypeDecl& t : decls_) {
    std::size_t steps = 0;
    for (const TypeDecl* cur = &t; cur->supertype; cur = &at(*cur->supertype)) {
      if (++steps > decls_.size())
        throw HeapError("type " + std::to_string(t.id), "cyclic supertype chain");
    }
  }
}

const TypeDecl* TypeTable::find(TypeId id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &decls_[it->second];
}

const TypeDecl& TypeTable::at(TypeId id) const {
  if (const TypeDecl* t = find(id)) return *t;
  throw HeapError("type " + std::to_string(id), "unknown type");
}

const TypeDecl* TypeTable::find_by_name(std::string_view name) const {
  for (const TypeDecl& t : decls_)
    if (t.name == name) return &t;
  return nullptr;
}

bool TypeTable::declares_field(TypeId type, std::string_view label) const {
  for (const TypeDecl* cur = find(type); cur;
       cur = cur->supertype ? find(*cur->supertype) : nullptr) {
    for (const FieldDecl& f : cur->fields)
      if (f.label == label) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// ConcreteHeap

ConcreteHeap::ConcreteHeap(TypeTable types, std::vector<ConcreteObject> objects,
                           std::map<std::string, ObjectId> roots)
    : types_(std::move(types)), objects_(std::move(objects)), roots_(std::move(roots)) {
  std::sort(objects_.begin(), objects_.end(),
            [](const ConcreteObject& a, const ConcreteObject& b) { return a.id < b.id; });
  index_.reserve(objects_.size());
  for (std::size_t i = 0; i < objects_.size(); ++i) {
    const ObjectId id = objects_[i].id;
    if (id <= 0) throw HeapError("object " + std::to_string(id), "object ids must be positive");
    if (!index_.emplace(id, i).second)
      throw HeapError("object " + std::to_string(id), "duplicate object id");
  }
  auto check_target = [&](const std::string& where, ObjectId target) {
    if (target != kNullObject && !index_.contains(target))
      throw HeapError(where, "dangling reference to object " + std::to_string(target));
  };

  std::size_t pointer_count = roots_.size();
  for (const ConcreteObject& o : objects_) pointer_count += o.fields.size() + o.elements.size();
  pointers_.reserve(pointer_count);

  for (const auto& [name, target] : roots_) {
    const std::string where = "root '" + name + "'";
    if (name.empty()) throw HeapError(where, "empty variable name");
    check_target(where, target);
    pointers_.push_back({kRootObject, {LabelKind::Variable, intern(name)}, target});
  }
  for (const ConcreteObject& o : objects_) {
    const std::string where = "object " + std::to_string(o.id);
    const TypeDecl* t = types_.find(o.type);
    if (!t) throw HeapError(where, "unknown type " + std::to_string(o.type));
    if (!o.fields.empty() && t->kind != TypeKind::Object)
      throw HeapError(where, "named fields on a " + std::string(to_string(t->kind)) + " object");
    if (!o.elements.empty() && !t->is_container())
      throw HeapError(where, "elements on a " + std::string(to_string(t->kind)) + " object");
    for (const auto& [label, target] : o.fields) {
      if (!types_.declares_field(o.type, label))
        throw HeapError(where, "field '" + label + "' not declared on type " + t->name);
      check_target(where + " field '" + label + "'", target);
      pointers_.push_back({o.id, {LabelKind::Field, intern(label)}, target});
    }
    for (std::size_t i = 0; i < o.elements.size(); ++i) {
      check_target(where + " element " + std::to_string(i), o.elements[i]);
      pointers_.push_back({o.id, Label::index(static_cast<std::uint32_t>(i)), o.elements[i]});
    }
  }
}

std::uint32_t ConcreteHeap::intern(const std::string& name) {
  auto [it, inserted] = label_ids_.try_emplace(name, static_cast<std::uint32_t>(label_names_.size()));
  if (inserted) label_names_.push_back(name);
  return it->second;
}

const ConcreteObject* ConcreteHeap::find(ObjectId id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &objects_[it->second];
}

const ConcreteObject& ConcreteHeap::at(ObjectId id) const {
  if (const ConcreteObject* o = find(id)) return *o;
  throw HeapError("object " + std::to_string(id), "unknown object");
}

std::optional<Label> ConcreteHeap::field_label(std::string_view name) const {
  auto it = label_ids_.find(std::string(name));
  if (it == label_ids_.end()) return std::nullopt;
  return Label{LabelKind::Field, it->second};
}

std::optional<Label> ConcreteHeap::variable_label(std::string_view name) const {
  auto it = label_ids_.find(std::string(name));
  if (it == label_ids_.end()) return std::nullopt;
  return Label{LabelKind::Variable, it->second};
}

std::string ConcreteHeap::label_text(Label label) const {
  if (label.kind == LabelKind::Index) return std::to_string(label.value);
  return std::string(label_name(label.value));
}

std::string ConcreteHeap::abstract_label(Label label) const {
  if (label.kind == LabelKind::Index) return std::string(kElementLabel);
  return std::string(label_name(label.value));
}

// ---------------------------------------------------------------------------
// Regions and label selections

Region Region::of(const ConcreteHeap& heap, std::vector<ObjectId> members) {
  for (ObjectId id : members) {
    if (id == kNullObject || id == kRootObject)
      throw HeapError("region", "regions exclude root and null");
    if (!heap.contains(id)) throw HeapError("region", "unknown object " + std::to_string(id));
  }
  return any(std::move(members));
}

Region Region::any(std::vector<ObjectId> members) {
  Region r;
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  r.members_ = std::move(members);
  return r;
}

bool Region::contains(ObjectId id) const {
  return std::binary_search(members_.begin(), members_.end(), id);
}

LabelSelection LabelSelection::from_abstract(const std::set<std::string>& labels) {
  LabelSelection sel;
  for (const std::string& l : labels) {
    if (l == kElementLabel)
      sel.all_indices = true;
    else
      sel.names.insert(l);
  }
  return sel;
}

bool LabelSelection::matches(const ConcreteHeap& heap, Label label) const {
  if (label.kind == LabelKind::Index) return all_indices || indices.contains(label.value);
  return names.contains(std::string(heap.label_name(label.value)));
}

// ---------------------------------------------------------------------------
// Recursive type relation

RecursiveRelation::RecursiveRelation(std::vector<std::vector<TypeId>> groups,
                                     std::vector<bool> recursive)
    : groups_(std::move(groups)), recursive_(std::move(recursive)) {
  for (std::size_t g = 0; g < groups_.size(); ++g)
    for (TypeId t : groups_[g]) group_of_[t] = g;
}

bool RecursiveRelation::related(TypeId a, TypeId b) const {
  auto ga = group_of_.find(a);
  auto gb = group_of_.find(b);
  if (ga == group_of_.end() || gb == group_of_.end()) return false;
  return ga->second == gb->second && recursive_[ga->second];
}

std::optional<std::size_t> RecursiveRelation::group_of(TypeId type) const {
  auto it = group_of_.find(type);
  if (it == group_of_.end()) return std::nullopt;
  return it->second;
}

RecursiveRelation recursive_relation(const TypeTable& types) {
  const std::size_t n = types.size();
  std::vector<std::vector<std::size_t>> succ(n);
  auto decls = types.decls();
  for (std::size_t i = 0; i < n; ++i) {
    const TypeDecl& t = decls[i];
    for (const FieldDecl& f : t.fields) succ[i].push_back(types.index_of(f.declared_type));
    if (t.element_type) succ[i].push_back(types.index_of(*t.element_type));
    if (t.supertype) succ[types.index_of(*t.supertype)].push_back(i);
  }

  // Tarjan's SCC, iterative.
  constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);
  std::vector<std::size_t> order(n, kUnvisited), low(n, 0), comp(n, kUnvisited);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::pair<std::size_t, std::size_t>> frames;
  std::size_t counter = 0, comps = 0;
  for (std::size_t start = 0; start < n; ++start) {
    if (order[start] != kUnvisited) continue;
    frames.push_back({start, 0});
    order[start] = low[start] = counter++;
    stack.push_back(start);
    on_stack[start] = true;
    while (!frames.empty()) {
      auto& [v, next] = frames.back();
      if (next < succ[v].size()) {
        const std::size_t w = succ[v][next++];
        if (order[w] == kUnvisited) {
          order[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], order[w]);
        }
        continue;
      }
      if (low[v] == order[v]) {
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = comps;
        } while (w != v);
        ++comps;
      }
      const std::size_t done = v;
      frames.pop_back();
      if (!frames.empty()) low[frames.back().first] = std::min(low[frames.back().first], low[done]);
    }
  }

  std::vector<std::vector<TypeId>> groups(comps);
  std::vector<bool> recursive(comps, false);
  for (std::size_t i = 0; i < n; ++i) groups[comp[i]].push_back(decls[i].id);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j : succ[i])
      if (comp[i] == comp[j]) recursive[comp[i]] = true;
  for (auto& g : groups) std::sort(g.begin(), g.end());
  return RecursiveRelation(std::move(groups), std::move(recursive));
}

// ---------------------------------------------------------------------------
// Oracles

std::vector<Pointer> pointers_between(const ConcreteHeap& heap, const Region& c1,
                                      const Region& c2) {
  std::vector<Pointer> out;
  if (c1.empty() || c2.empty()) return out;
  for (const Pointer& p : heap.pointers())
    if (c1.contains(p.source) && c2.contains(p.target)) out.push_back(p);
  std::sort(out.begin(), out.end());
  return out;
}

namespace detail {

bool injective_pair_scan(std::span<const Pointer> pointers) {
  for (std::size_t i = 0; i < pointers.size(); ++i)
    for (std::size_t j = i + 1; j < pointers.size(); ++j)
      if (pointers[i].source != pointers[j].source && pointers[i].target == pointers[j].target)
        return false;
  return true;
}

bool injective_hash_scan(std::span<const Pointer> pointers) {
  std::unordered_map<ObjectId, ObjectId> source_of;
  source_of.reserve(pointers.size());
  for (const Pointer& p : pointers) {
    auto [it, inserted] = source_of.try_emplace(p.target, p.source);
    if (!inserted && it->second != p.source) return false;
  }
  return true;
}

Shape forest_dfs(std::span<const ObjectId> members, std::span<const Pointer> pointers) {
  std::unordered_map<ObjectId, std::vector<ObjectId>> succ;
  std::unordered_map<ObjectId, std::size_t> indegree;
  for (const Pointer& p : pointers) {
    succ[p.source].push_back(p.target);
    if (++indegree[p.target] > 1) return Shape::Any;
  }
  enum class Mark : std::uint8_t { White, Grey, Black };
  std::unordered_map<ObjectId, Mark> mark;
  for (ObjectId m : members) mark[m] = Mark::White;
  std::vector<std::pair<ObjectId, std::size_t>> frames;
  for (ObjectId start : members) {
    if (mark[start] != Mark::White) continue;
    mark[start] = Mark::Grey;
    frames.push_back({start, 0});
    while (!frames.empty()) {
      auto& [v, next] = frames.back();
      auto it = succ.find(v);
      if (it != succ.end() && next < it->second.size()) {
        const ObjectId w = it->second[next++];
        Mark& mw = mark[w];
        if (mw == Mark::Grey) return Shape::Any;  // back edge
        if (mw == Mark::White) {
          mw = Mark::Grey;
          frames.push_back({w, 0});
        }
        continue;
      }
      mark[v] = Mark::Black;
      frames.pop_back();
    }
  }
  return Shape::Tree;
}

}  // namespace detail

namespace {
std::vector<Pointer> labeled_between(const ConcreteHeap& heap, const Region& c1, const Region& c2,
                                     Label p) {
  std::vector<Pointer> ps = pointers_between(heap, c1, c2);
  std::erase_if(ps, [&](const Pointer& x) { return !(x.label == p); });
  return ps;
}
}  // namespace

bool oracle_injective(const ConcreteHeap& heap, const Region& c1, const Region& c2, Label p) {
  return detail::injective_pair_scan(labeled_between(heap, c1, c2, p));
}

bool injective_by_hash(const ConcreteHeap& heap, const Region& c1, const Region& c2, Label p) {
  return detail::injective_hash_scan(labeled_between(heap, c1, c2, p));
}

Shape oracle_shape(const ConcreteHeap& heap, const Region& c, const LabelSelection& labels) {
  std::vector<Pointer> ps = pointers_between(heap, c, c);
  std::erase_if(ps, [&](const Pointer& x) { return !labels.matches(heap, x.label); });
  return detail::forest_dfs(c.members(), ps);
}

// ---------------------------------------------------------------------------

std::uint64_t ByteEstimator::estimate(const ConcreteHeap& heap, const ConcreteObject& object) const {
  const TypeDecl& t = heap.types().at(object.type);
  std::uint64_t slots = 0;
  if (t.kind == TypeKind::Object) {
    for (const TypeDecl* cur = &t; cur;
         cur = cur->supertype ? heap.types().find(*cur->supertype) : nullptr)
      slots += cur->fields.size();
  } else {
    slots = object.elements.size();
  }
  std::uint64_t bytes = header_bytes + pointer_bytes * slots;
  if (auto it = primitive_bytes.find(t.name); it != primitive_bytes.end()) bytes += it->second;
  return bytes;
}

}  // namespace heapabs
