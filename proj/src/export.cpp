#include "heapabs/export.hpp"

#include <algorithm>
#include <sstream>

namespace heapabs {

namespace {

std::string escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (const std::string& p : parts) {
    if (!out.empty()) out += sep;
    out += p;
  }
  return out;
}

std::string card_text(const Interval& card) {
  std::ostringstream os;
  os << card;
  return os.str();
}

std::string node_ref(NodeId id) { return "n" + std::to_string(id); }

struct Attr {
  std::string name;
  std::string value;
};

void element(std::ostringstream& os, std::string_view tag, const std::vector<Attr>& attrs) {
  os << "    <" << tag;
  for (const Attr& a : attrs) os << ' ' << a.name << "=\"" << escape(a.value) << '"';
  os << " />\n";
}

struct Link {
  NodeId source;
  NodeId target;
  std::vector<std::string> labels;
  bool injective = true;
  bool maybe_null = false;
};

class DgmlWriter {
 public:
  DgmlWriter(const AbstractGraph& g, const StyleConfig& styles, const ExportAnnotations& notes)
      : g_(g), styles_(styles), notes_(notes) {
    for (const NodeMetrics& m : notes.metrics) metrics_[m.node] = &m;
    for (const Finding& f : notes.findings) findings_[f.node].push_back(&f);
  }

  std::vector<Attr> node_attrs(const AbstractNode& node) const {
    std::optional<std::uint64_t> length;
    if (auto it = notes_.container_lengths.find(node.id); it != notes_.container_lengths.end()) length = it->second;
    std::vector<Attr> attrs{{"Id", node_ref(node.id)},
                            {"Label", node_label(node, length)},
                            {"Cardinality", card_text(node.card)}};
    std::string background = node.card == Interval(1, 1) ? styles_.single_background : styles_.summary_background;
    if (auto m = metrics_.find(node.id); m != metrics_.end()) {
      attrs.push_back({"Bytes", std::to_string(m->second->total_bytes)});
      attrs.push_back({"HeapFraction", fraction_text(m->second->heap_fraction)});
      if (styles_.heat_coloring)
        if (const auto bucket = heat_bucket(m->second->heap_fraction)) background = heat_color(*bucket);
    }
    attrs.push_back({"Background", background});
    const std::string shape = shape_text(node.id);
    if (!shape.empty()) attrs.push_back({"Shape", shape});
    if (auto f = findings_.find(node.id); f != findings_.end()) {
      std::vector<std::string> kinds;
      for (const Finding* x : f->second) kinds.emplace_back(to_string(x->kind));
      attrs.push_back({"Findings", join(kinds, " ")});
      if (styles_.highlight_findings && has_detector_finding(f->second)) {
        attrs.push_back({"Stroke", styles_.finding_stroke});
        attrs.push_back({"StrokeThickness", std::to_string(styles_.finding_thickness)});
      }
    }
    return attrs;
  }

  void write_nodes(std::ostringstream& os, const std::vector<NodeId>& ids) const {
    for (const AbstractEdge* e : g_.out_edges(g_.root))
      if (e->target != g_.null) element(os, "Node", {{"Id", "var:" + e->label}, {"Label", e->label}, {"Variable", "True"}});
    for (NodeId id : ids) element(os, "Node", node_attrs(g_.node(id)));
  }

  void write_links(std::ostringstream& os) const {
    for (const Link& l : links()) {
      const bool from_var = l.source == g_.root;
      std::vector<Attr> attrs{{"Source", from_var ? "var:" + l.labels.front() : node_ref(l.source)},
                              {"Target", node_ref(l.target)}};
      if (!from_var) {
        std::string label = join(l.labels, ", ");
        if (l.source == l.target) {
          const std::string shape = shape_text(l.source, std::set<std::string>(l.labels.begin(), l.labels.end()));
          if (!shape.empty()) label = shape;
        }
        attrs.push_back({"Label", label});
      }
      attrs.push_back({"Injective", l.injective ? "True" : "False"});
      attrs.push_back({"MaybeNull", l.maybe_null ? "True" : "False"});
      if (!l.injective) {
        attrs.push_back({"Stroke", styles_.shared_stroke});
        attrs.push_back({"StrokeThickness", std::to_string(styles_.shared_thickness)});
      }
      if (l.maybe_null) attrs.push_back({"StrokeDashArray", styles_.dash_pattern});
      element(os, "Link", attrs);
    }
  }

  void write_styles(std::ostringstream& os) const {
    os << "  <Styles>\n";
    style(os, "Link", "Shared targets", "Injective = 'False'",
          {{"Stroke", styles_.shared_stroke}, {"StrokeThickness", std::to_string(styles_.shared_thickness)}});
    style(os, "Link", "Maybe null", "MaybeNull = 'True'", {{"StrokeDashArray", styles_.dash_pattern}});
    style(os, "Node", "Single object", "Cardinality = '[1,1]'", {{"Background", styles_.single_background}});
    if (styles_.heat_coloring) {
      style(os, "Node", "Over 25% of heap", "HeapFraction > 0.25", {{"Background", styles_.hot25_background}});
      style(os, "Node", "Over 15% of heap", "HeapFraction > 0.15", {{"Background", styles_.hot15_background}});
      style(os, "Node", "Over 5% of heap", "HeapFraction > 0.05", {{"Background", styles_.hot5_background}});
    }
    os << "  </Styles>\n";
  }

 private:
  static void style(std::ostringstream& os, std::string_view target, std::string_view group,
                    std::string_view condition, const std::vector<Attr>& setters) {
    os << "    <Style TargetType=\"" << target << "\" GroupLabel=\"" << escape(group)
       << "\" ValueLabel=\"True\">\n";
    os << "      <Condition Expression=\"" << escape(condition) << "\" />\n";
    for (const Attr& s : setters)
      os << "      <Setter Property=\"" << s.name << "\" Value=\"" << escape(s.value) << "\" />\n";
    os << "    </Style>\n";
  }

  static std::string fraction_text(double f) {
    std::ostringstream os;
    os.precision(6);
    os << std::fixed << f;
    return os.str();
  }

  std::string heat_color(FindingKind bucket) const {
    if (bucket == FindingKind::Hot25) return styles_.hot25_background;
    if (bucket == FindingKind::Hot15) return styles_.hot15_background;
    return styles_.hot5_background;
  }

  static bool has_detector_finding(const std::vector<const Finding*>& fs) {
    return std::any_of(fs.begin(), fs.end(), [](const Finding* f) {
      return f->kind != FindingKind::Hot5 && f->kind != FindingKind::Hot15 && f->kind != FindingKind::Hot25;
    });
  }

  /// "tree{l, r}" for the node's tree fact, restricted to `labels` when given.
  std::string shape_text(NodeId node, const std::optional<std::set<std::string>>& labels = std::nullopt) const {
    for (const ShapeFact* f : g_.shapes_of(node)) {
      if (f->shape != Shape::Tree || f->labels.empty()) continue;
      if (labels && f->labels != *labels) continue;
      return "tree{" + join({f->labels.begin(), f->labels.end()}, ", ") + "}";
    }
    return {};
  }

  std::vector<Link> links() const {
    std::set<std::pair<NodeId, std::string>> to_null;
    for (const AbstractEdge& e : g_.edges)
      if (e.target == g_.null) to_null.insert({e.source, e.label});
    std::vector<Link> out;
    std::map<std::pair<NodeId, NodeId>, std::size_t> pair_index;
    for (const AbstractEdge& e : g_.edges) {
      if (e.target == g_.null) continue;
      const bool maybe_null = to_null.contains({e.source, e.label});
      const bool collapse = styles_.collapse_multi_edges && e.source != g_.root;
      if (collapse) {
        auto [it, fresh] = pair_index.try_emplace({e.source, e.target}, out.size());
        if (!fresh) {
          Link& l = out[it->second];
          l.labels.push_back(e.label);
          l.injective = l.injective && e.injective;
          l.maybe_null = l.maybe_null || maybe_null;
          continue;
        }
      }
      out.push_back({e.source, e.target, {e.label}, e.injective, maybe_null});
    }
    return out;
  }

  const AbstractGraph& g_;
  const StyleConfig& styles_;
  const ExportAnnotations& notes_;
  std::map<NodeId, const NodeMetrics*> metrics_;
  std::map<NodeId, std::vector<const Finding*>> findings_;
};

std::string open_document() {
  return std::string("<?xml version=\"1.0\" encoding=\"utf-8\"?>\n<DirectedGraph xmlns=\"") +
         std::string(kDgmlNamespace) + "\">\n";
}

std::vector<NodeId> content_ids(const AbstractGraph& g) {
  std::vector<NodeId> ids;
  for (const auto& [id, node] : g.nodes)
    if (!g.is_special(id)) ids.push_back(id);
  return ids;
}

}  // namespace

std::map<NodeId, std::uint64_t> uniform_container_lengths(const ConcreteHeap& heap, const AbstractGraph& g,
                                                          const EmbeddingMap& mu) {
  std::map<NodeId, std::uint64_t> out;
  for (const auto& [node, members] : mu.inverse()) {
    if (g.is_special(node) || members.empty()) continue;
    std::optional<std::uint64_t> length;
    bool uniform = true;
    for (ObjectId id : members) {
      if (!heap.type_of(id).is_container()) {
        uniform = false;
        break;
      }
      const std::uint64_t n = heap.at(id).elements.size();
      if (length && *length != n) {
        uniform = false;
        break;
      }
      length = n;
    }
    if (uniform && length) out[node] = *length;
  }
  return out;
}

std::string node_label(const AbstractNode& node, std::optional<std::uint64_t> length) {
  std::vector<std::string> names;
  for (std::string name : node.types) {
    if (length && name.size() >= 2 && name.ends_with("[]"))
      name = name.substr(0, name.size() - 2) + "[" + std::to_string(*length) + "]";
    names.push_back(std::move(name));
  }
  return join(names, ", ");
}

std::string export_dgml(const AbstractGraph& g, const StyleConfig& styles, const ExportAnnotations& notes) {
  const DgmlWriter w(g, styles, notes);
  std::ostringstream os;
  os << open_document() << "  <Nodes>\n";
  w.write_nodes(os, content_ids(g));
  os << "  </Nodes>\n  <Links>\n";
  w.write_links(os);
  os << "  </Links>\n";
  w.write_styles(os);
  os << "</DirectedGraph>\n";
  return os.str();
}

std::string export_dgml(const AbstractGraph& g, const ReducedGraph& r, const StyleConfig& styles,
                        const ExportAnnotations& notes) {
  const DgmlWriter w(g, styles, notes);
  std::ostringstream os;
  os << open_document() << "  <Nodes>\n";
  for (const auto& [id, rn] : r.nodes) {
    if (!rn.is_group() || g.is_special(id)) continue;
    element(os, "Node",
            {{"Id", "r" + std::to_string(id)},
             {"Label", (rn.unreachable ? std::string("unreachable: ") : std::string()) +
                           join({rn.types.begin(), rn.types.end()}, ", ")},
             {"Group", "Collapsed"},
             {"Cardinality", card_text(rn.card)},
             {"Background", rn.card == Interval(1, 1) ? styles.single_background : styles.summary_background}});
  }
  w.write_nodes(os, content_ids(g));
  os << "  </Nodes>\n  <Links>\n";
  for (const auto& [id, rn] : r.nodes) {
    if (!rn.is_group() || g.is_special(id)) continue;
    for (NodeId n : rn.covers)
      element(os, "Link", {{"Source", "r" + std::to_string(id)}, {"Target", node_ref(n)}, {"Category", "Contains"}});
  }
  w.write_links(os);
  os << "  </Links>\n";
  w.write_styles(os);
  os << "</DirectedGraph>\n";
  return os.str();
}

std::string export_graphml(const AbstractGraph& g) {
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n"
        "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
        "  <key id=\"types\" for=\"node\" attr.name=\"types\" attr.type=\"string\" />\n"
        "  <key id=\"card\" for=\"node\" attr.name=\"cardinality\" attr.type=\"string\" />\n"
        "  <key id=\"label\" for=\"edge\" attr.name=\"label\" attr.type=\"string\" />\n"
        "  <key id=\"inj\" for=\"edge\" attr.name=\"injective\" attr.type=\"boolean\" />\n"
        "  <graph id=\"heap\" edgedefault=\"directed\">\n";
  for (const auto& [id, node] : g.nodes) {
    os << "    <node id=\"" << node_ref(id) << "\"><data key=\"types\">"
       << escape(join({node.types.begin(), node.types.end()}, ", ")) << "</data><data key=\"card\">"
       << card_text(node.card) << "</data></node>\n";
  }
  for (const AbstractEdge& e : g.edges) {
    os << "    <edge source=\"" << node_ref(e.source) << "\" target=\"" << node_ref(e.target)
       << "\"><data key=\"label\">" << escape(e.label) << "</data><data key=\"inj\">"
       << (e.injective ? "true" : "false") << "</data></edge>\n";
  }
  os << "  </graph>\n</graphml>\n";
  return os.str();
}

}  // namespace heapabs
