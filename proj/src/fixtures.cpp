#include "heapabs/fixtures.hpp"

#include <vector>

namespace heapabs {

namespace {

class HeapBuilder {
 public:
  TypeId type(std::string name, TypeKind kind, std::vector<FieldDecl> fields = {},
              std::optional<TypeId> super = std::nullopt, std::optional<TypeId> element = std::nullopt) {
    const TypeId id = static_cast<TypeId>(types_.size() + 1);
    types_.push_back({id, std::move(name), kind, super, std::move(fields), element});
    return id;
  }
  /// Declares a field after the fact (for mutually recursive types).
  void add_field(TypeId owner, std::string label, TypeId declared) {
    types_.at(owner - 1).fields.push_back({std::move(label), declared});
  }
  ObjectId object(TypeId type, std::optional<std::uint64_t> bytes = std::nullopt) {
    const ObjectId id = static_cast<ObjectId>(objects_.size() + 1);
    objects_.push_back({id, type, bytes, {}, {}});
    return id;
  }
  ConcreteObject& at(ObjectId id) { return objects_.at(static_cast<std::size_t>(id - 1)); }
  void set(ObjectId src, const std::string& label, ObjectId tgt) { at(src).fields[label] = tgt; }
  void push(ObjectId src, ObjectId tgt) { at(src).elements.push_back(tgt); }
  void root(const std::string& name, ObjectId tgt) { roots_[name] = tgt; }

  ConcreteHeap build() {
    return ConcreteHeap(TypeTable(std::move(types_)), std::move(objects_), std::move(roots_));
  }

 private:
  std::vector<TypeDecl> types_;
  std::vector<ConcreteObject> objects_;
  std::map<std::string, ObjectId> roots_;
};

void require_positive(std::int64_t n, const char* what) {
  if (n < 1) throw FixtureError(std::string(what) + " must be at least 1");
}

std::int64_t param(const FixtureParams& params, std::string_view key, std::int64_t fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

}  // namespace

ConcreteHeap exprtree_fixture() {
  HeapBuilder b;
  const TypeId expr = b.type("Expr", TypeKind::Object);
  const TypeId add = b.type("Add", TypeKind::Object, {{"l", expr}, {"r", expr}}, expr);
  const TypeId sub = b.type("Sub", TypeKind::Object, {{"l", expr}, {"r", expr}}, expr);
  const TypeId mult = b.type("Mult", TypeKind::Object, {{"l", expr}, {"r", expr}}, expr);
  const TypeId cnst = b.type("Const", TypeKind::Object, {}, expr);
  const TypeId var = b.type("Var", TypeKind::Object, {}, expr);
  const TypeId vars = b.type("Var[]", TypeKind::Array, {}, std::nullopt, var);

  const ObjectId o1 = b.object(add), o2 = b.object(sub), o3 = b.object(cnst), o4 = b.object(mult),
                 o5 = b.object(mult), o6 = b.object(cnst), o7 = b.object(var), o8 = b.object(var),
                 o9 = b.object(vars);
  b.set(o1, "l", o2);
  b.set(o1, "r", o5);
  b.set(o2, "l", o4);
  b.set(o2, "r", o3);
  b.set(o4, "l", o7);
  b.set(o4, "r", o6);
  b.set(o5, "l", o7);
  b.set(o5, "r", o8);
  b.push(o9, o7);
  b.push(o9, o8);
  b.push(o9, kNullObject);
  b.root("exp", o1);
  b.root("env", o9);
  return b.build();
}

ConcreteHeap list_fixture(std::int64_t n) {
  require_positive(n, "list length");
  HeapBuilder b;
  const TypeId node = b.type("Node", TypeKind::Object);
  b.add_field(node, "next", node);
  ObjectId prev = kNullObject;
  for (std::int64_t i = 0; i < n; ++i) {
    const ObjectId o = b.object(node);
    if (prev != kNullObject) b.set(prev, "next", o);
    prev = o;
  }
  b.set(prev, "next", kNullObject);
  b.root("head", 1);
  return b.build();
}

ConcreteHeap dlist_fixture(std::int64_t n) {
  require_positive(n, "list length");
  HeapBuilder b;
  const TypeId node = b.type("Node", TypeKind::Object);
  b.add_field(node, "next", node);
  b.add_field(node, "prev", node);
  for (std::int64_t i = 1; i <= n; ++i) b.object(node);
  for (ObjectId i = 1; i <= n; ++i) {
    b.set(i, "next", i < n ? i + 1 : kNullObject);
    b.set(i, "prev", i > 1 ? i - 1 : kNullObject);
  }
  b.root("head", 1);
  return b.build();
}

ConcreteHeap btree_fixture(std::int64_t n) {
  require_positive(n, "tree size");
  HeapBuilder b;
  const TypeId node = b.type("Node", TypeKind::Object);
  b.add_field(node, "l", node);
  b.add_field(node, "r", node);
  for (std::int64_t i = 1; i <= n; ++i) b.object(node);
  for (ObjectId i = 1; i <= n; ++i) {
    b.set(i, "l", 2 * i <= n ? 2 * i : kNullObject);
    b.set(i, "r", 2 * i + 1 <= n ? 2 * i + 1 : kNullObject);
  }
  b.root("root", 1);
  return b.build();
}

ConcreteHeap facegrid_fixture(std::int64_t faces, std::uint64_t point_bytes) {
  require_positive(faces, "face count");
  if (point_bytes < 4) throw FixtureError("point_bytes must cover the 4-byte header");
  HeapBuilder b;
  const TypeId point = b.type("Point", TypeKind::Object);
  const TypeId points = b.type("Point[]", TypeKind::Array, {}, std::nullopt, point);
  const TypeId face = b.type("Face", TypeKind::Object, {{"pts", points}});
  const TypeId face_array = b.type("Face[]", TypeKind::Array, {}, std::nullopt, face);

  const ObjectId all = b.object(face_array, 4 + 4 * static_cast<std::uint64_t>(faces));
  for (std::int64_t f = 0; f < faces; ++f) {
    const ObjectId fo = b.object(face, 8);
    const ObjectId arr = b.object(points, 20);
    b.set(fo, "pts", arr);
    for (int k = 0; k < 4; ++k) b.push(arr, b.object(point, point_bytes));
    b.push(all, fo);
  }
  b.root("faces", all);
  return b.build();
}

ConcreteHeap octree_scene_fixture(std::int64_t depth, std::int64_t objs_per_leaf,
                                  std::int64_t meshes, std::int64_t faces_per_mesh) {
  require_positive(depth, "depth");
  require_positive(objs_per_leaf, "objs_per_leaf");
  require_positive(meshes, "meshes");
  require_positive(faces_per_mesh, "faces_per_mesh");
  HeapBuilder b;
  const TypeId vec = b.type("Vec", TypeKind::Object);
  const TypeId color = b.type("Color", TypeKind::Object);
  const TypeId material = b.type("Material", TypeKind::Object, {{"color", color}});
  const TypeId point = b.type("Point", TypeKind::Object);
  const TypeId points = b.type("Point[]", TypeKind::Array, {}, std::nullopt, point);
  const TypeId face = b.type("Face", TypeKind::Object, {{"pts", points}});
  const TypeId faces = b.type("Face[]", TypeKind::Array, {}, std::nullopt, face);
  const TypeId mesh = b.type("Mesh", TypeKind::Object, {{"faces", faces}});
  const TypeId mesh_array = b.type("Mesh[]", TypeKind::Array, {}, std::nullopt, mesh);
  const TypeId shape = b.type("ShapeObj", TypeKind::Object);
  const TypeId sphere =
      b.type("SphereObj", TypeKind::Object, {{"center", vec}, {"mat", material}}, shape);
  const TypeId triangle =
      b.type("TriangleObj", TypeKind::Object, {{"face", face}, {"mat", material}}, shape);
  const TypeId objnode = b.type("ObjNode", TypeKind::Object, {{"obj", shape}});
  b.add_field(objnode, "next", objnode);
  const TypeId octnode = b.type("OctNode", TypeKind::Object);
  const TypeId octnodes = b.type("OctNode[]", TypeKind::Array, {}, std::nullopt, octnode);
  b.add_field(octnode, "child", octnodes);
  b.add_field(octnode, "objs", objnode);
  const TypeId light = b.type("Light", TypeKind::Object, {{"pos", vec}, {"color", color}});
  const TypeId light_array = b.type("Light[]", TypeKind::Array, {}, std::nullopt, light);
  const TypeId scene = b.type("Scene", TypeKind::Object,
                              {{"octree", octnode}, {"lights", light_array}, {"meshes", mesh_array}});
  const TypeId ray = b.type("Ray", TypeKind::Object, {{"origin", vec}, {"dir", vec}});

  // Meshes own the faces; triangles reference them round-robin.
  std::vector<ObjectId> all_faces;
  const ObjectId mesh_list = b.object(mesh_array);
  for (std::int64_t m = 0; m < meshes; ++m) {
    const ObjectId mo = b.object(mesh);
    const ObjectId fa = b.object(faces);
    b.set(mo, "faces", fa);
    b.push(mesh_list, mo);
    for (std::int64_t f = 0; f < faces_per_mesh; ++f) {
      const ObjectId fo = b.object(face, 8);
      const ObjectId arr = b.object(points, 20);
      b.set(fo, "pts", arr);
      for (int k = 0; k < 4; ++k) b.push(arr, b.object(point, 16));
      b.push(fa, fo);
      all_faces.push_back(fo);
    }
  }

  std::size_t next_face = 0;
  std::int64_t shape_count = 0;
  auto make_material = [&] {
    const ObjectId mat = b.object(material);
    b.set(mat, "color", b.object(color));
    return mat;
  };
  auto make_shape = [&]() -> ObjectId {
    if (shape_count++ % 2 == 0) {
      const ObjectId s = b.object(sphere);
      b.set(s, "center", b.object(vec));
      b.set(s, "mat", make_material());
      return s;
    }
    const ObjectId t = b.object(triangle);
    b.set(t, "face", all_faces[next_face++ % all_faces.size()]);
    b.set(t, "mat", make_material());
    return t;
  };
  auto build_octree = [&](auto&& self, std::int64_t level) -> ObjectId {
    const ObjectId node = b.object(octnode);
    if (level == depth) {
      b.set(node, "child", kNullObject);
      ObjectId prev = kNullObject;
      for (std::int64_t k = 0; k < objs_per_leaf; ++k) {
        const ObjectId on = b.object(objnode);
        b.set(on, "obj", make_shape());
        if (prev == kNullObject)
          b.set(node, "objs", on);
        else
          b.set(prev, "next", on);
        prev = on;
      }
      b.set(prev, "next", kNullObject);
      return node;
    }
    const ObjectId kids = b.object(octnodes);
    b.set(node, "child", kids);
    b.set(node, "objs", kNullObject);
    for (int q = 0; q < 4; ++q) b.push(kids, self(self, level + 1));
    return node;
  };
  const ObjectId octree = build_octree(build_octree, 1);

  const ObjectId lights = b.object(light_array);
  for (int i = 0; i < 3; ++i) {
    const ObjectId l = b.object(light);
    b.set(l, "pos", b.object(vec));
    b.set(l, "color", b.object(color));
    b.push(lights, l);
  }
  const ObjectId sc = b.object(scene);
  b.set(sc, "octree", octree);
  b.set(sc, "lights", lights);
  b.set(sc, "meshes", mesh_list);
  const ObjectId r = b.object(ray);
  b.set(r, "origin", b.object(vec));
  b.set(r, "dir", b.object(vec));
  b.root("this", sc);
  b.root("tree", octree);
  b.root("eyeRay", r);
  return b.build();
}

ConcreteHeap build_fixture(std::string_view name, const FixtureParams& params) {
  if (name == "exprtree") return exprtree_fixture();
  if (name == "list") return list_fixture(param(params, "n", 10));
  if (name == "dlist") return dlist_fixture(param(params, "n", 10));
  if (name == "btree") return btree_fixture(param(params, "n", 15));
  if (name == "facegrid") {
    const std::int64_t pb = param(params, "point_bytes", 16);
    if (pb < 0) throw FixtureError("point_bytes must be non-negative");
    return facegrid_fixture(param(params, "faces", 180), static_cast<std::uint64_t>(pb));
  }
  if (name == "octree-scene")
    return octree_scene_fixture(param(params, "depth", 2), param(params, "objs_per_leaf", 3),
                                param(params, "meshes", 2), param(params, "faces_per_mesh", 8));
  throw FixtureError("unknown fixture '" + std::string(name) + "'");
}

}  // namespace heapabs
