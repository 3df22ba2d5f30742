#include "heapabs/snapshot.hpp"

#include <json.hpp>

namespace heapabs {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

void reject_unknown_keys(const json& obj, std::initializer_list<std::string_view> known,
                         const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (std::string_view k : known) ok = ok || key == k;
    if (!ok) throw HeapError(where, "unknown key '" + key + "'");
  }
}

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw HeapError(where, std::string("missing '") + key + "'");
  return *it;
}

std::int64_t as_int(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw HeapError(where, "expected an integer");
  return v.get<std::int64_t>();
}

TypeId as_type_id(const json& v, const std::string& where) {
  const std::int64_t id = as_int(v, where);
  if (id <= 0 || id > std::numeric_limits<TypeId>::max())
    throw HeapError(where, "type ids must be positive");
  return static_cast<TypeId>(id);
}

std::string as_string(const json& v, const std::string& where) {
  if (!v.is_string()) throw HeapError(where, "expected a string");
  return v.get<std::string>();
}

TypeDecl parse_type(const json& t, const std::string& where) {
  if (!t.is_object()) throw HeapError(where, "expected an object");
  reject_unknown_keys(t, {"id", "name", "kind", "supertype", "fields", "elementType"}, where);
  TypeDecl decl;
  decl.id = as_type_id(require(t, "id", where), where + ".id");
  decl.name = as_string(require(t, "name", where), where + ".name");
  const std::string kind = as_string(require(t, "kind", where), where + ".kind");
  auto parsed = parse_type_kind(kind);
  if (!parsed) throw HeapError(where + ".kind", "unknown kind '" + kind + "'");
  decl.kind = *parsed;
  if (auto it = t.find("supertype"); it != t.end() && !it->is_null())
    decl.supertype = as_type_id(*it, where + ".supertype");
  if (auto it = t.find("elementType"); it != t.end() && !it->is_null())
    decl.element_type = as_type_id(*it, where + ".elementType");
  if (auto it = t.find("fields"); it != t.end()) {
    if (!it->is_array()) throw HeapError(where + ".fields", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string fw = where + ".fields[" + std::to_string(i) + "]";
      const json& f = (*it)[i];
      if (!f.is_object()) throw HeapError(fw, "expected an object");
      reject_unknown_keys(f, {"name", "type"}, fw);
      decl.fields.push_back({as_string(require(f, "name", fw), fw + ".name"),
                             as_type_id(require(f, "type", fw), fw + ".type")});
    }
  }
  return decl;
}

ConcreteObject parse_object(const json& o, const std::string& where) {
  if (!o.is_object()) throw HeapError(where, "expected an object");
  reject_unknown_keys(o, {"id", "type", "bytes", "fields", "elements"}, where);
  ConcreteObject obj;
  obj.id = as_int(require(o, "id", where), where + ".id");
  if (obj.id <= 0) throw HeapError(where + ".id", "object ids must be positive");
  obj.type = as_type_id(require(o, "type", where), where + ".type");
  if (auto it = o.find("bytes"); it != o.end() && !it->is_null()) {
    const std::int64_t b = as_int(*it, where + ".bytes");
    if (b < 0) throw HeapError(where + ".bytes", "negative size");
    obj.bytes = static_cast<std::uint64_t>(b);
  }
  if (auto it = o.find("fields"); it != o.end() && !it->is_null()) {
    if (!it->is_object()) throw HeapError(where + ".fields", "expected an object");
    for (const auto& [label, target] : it->items())
      obj.fields.emplace(label, as_int(target, where + ".fields." + label));
  }
  if (auto it = o.find("elements"); it != o.end() && !it->is_null()) {
    if (!it->is_array()) throw HeapError(where + ".elements", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i)
      obj.elements.push_back(as_int((*it)[i], where + ".elements[" + std::to_string(i) + "]"));
  }
  return obj;
}

}  // namespace

ConcreteHeap parse_snapshot(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw HeapError("$", std::string("malformed document: ") + e.what());
  }
  if (!doc.is_object()) throw HeapError("$", "expected a JSON object");
  reject_unknown_keys(doc, {"format", "types", "objects", "roots"}, "$");
  const std::string format = as_string(require(doc, "format", "$"), "$.format");
  if (format != kSnapshotFormat) throw HeapError("$.format", "unknown format version '" + format + "'");

  std::vector<TypeDecl> types;
  if (auto it = doc.find("types"); it != doc.end()) {
    if (!it->is_array()) throw HeapError("$.types", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i)
      types.push_back(parse_type((*it)[i], "$.types[" + std::to_string(i) + "]"));
  }
  std::vector<ConcreteObject> objects;
  if (auto it = doc.find("objects"); it != doc.end()) {
    if (!it->is_array()) throw HeapError("$.objects", "expected an array");
    objects.reserve(it->size());
    for (std::size_t i = 0; i < it->size(); ++i)
      objects.push_back(parse_object((*it)[i], "$.objects[" + std::to_string(i) + "]"));
  }
  std::map<std::string, ObjectId> roots;
  if (auto it = doc.find("roots"); it != doc.end()) {
    if (!it->is_object()) throw HeapError("$.roots", "expected an object");
    for (const auto& [name, target] : it->items())
      roots.emplace(name, as_int(target, "$.roots." + name));
  }
  return ConcreteHeap(TypeTable(std::move(types)), std::move(objects), std::move(roots));
}

std::string write_snapshot(const ConcreteHeap& heap) {
  ordered_json doc;
  doc["format"] = kSnapshotFormat;
  ordered_json types = ordered_json::array();
  for (const TypeDecl& t : heap.types().decls()) {
    ordered_json jt;
    jt["id"] = t.id;
    jt["name"] = t.name;
    jt["kind"] = to_string(t.kind);
    if (t.supertype) jt["supertype"] = *t.supertype;
    if (!t.fields.empty()) {
      ordered_json fs = ordered_json::array();
      for (const FieldDecl& f : t.fields) fs.push_back({{"name", f.label}, {"type", f.declared_type}});
      jt["fields"] = std::move(fs);
    }
    if (t.element_type) jt["elementType"] = *t.element_type;
    types.push_back(std::move(jt));
  }
  doc["types"] = std::move(types);
  ordered_json objects = ordered_json::array();
  for (const ConcreteObject& o : heap.objects()) {
    ordered_json jo;
    jo["id"] = o.id;
    jo["type"] = o.type;
    if (o.bytes) jo["bytes"] = *o.bytes;
    if (!o.fields.empty()) {
      ordered_json fs = ordered_json::object();
      for (const auto& [label, target] : o.fields) fs[label] = target;
      jo["fields"] = std::move(fs);
    }
    if (!o.elements.empty()) jo["elements"] = o.elements;
    objects.push_back(std::move(jo));
  }
  doc["objects"] = std::move(objects);
  ordered_json roots = ordered_json::object();
  for (const auto& [name, target] : heap.roots()) roots[name] = target;
  doc["roots"] = std::move(roots);
  return doc.dump(1) + "\n";
}

}  // namespace heapabs
