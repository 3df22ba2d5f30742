#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "heapabs/abstract_graph.hpp"
#include "heapabs/diagnostics.hpp"
#include "heapabs/reduction.hpp"

namespace heapabs {

struct StyleConfig {
  bool heat_coloring = true;
  bool highlight_findings = true;
  bool collapse_multi_edges = true;

  std::string single_background = "#FFFFFFFF";
  std::string summary_background = "#FFC0C0C0";
  std::string hot5_background = "#FFFFD0D0";
  std::string hot15_background = "#FFFF9090";
  std::string hot25_background = "#FFFF4040";
  std::string shared_stroke = "#FFFFA500";
  int shared_thickness = 3;
  std::string dash_pattern = "4,2";
  std::string finding_stroke = "#FF0000FF";
  int finding_thickness = 2;
};

/// Optional per-node data the exporters fold into labels and colors.
struct ExportAnnotations {
  std::vector<NodeMetrics> metrics;
  std::vector<Finding> findings;
  /// Container nodes whose members all have this many slots.
  std::map<NodeId, std::uint64_t> container_lengths;
};

/// Length shared by every member of each all-container node.
std::map<NodeId, std::uint64_t> uniform_container_lengths(const ConcreteHeap& heap, const AbstractGraph& g,
                                                          const EmbeddingMap& mu);

/// Sorted type names joined by ", ", with "[]" suffixes replaced by "[k]"
/// when `length` is given.
std::string node_label(const AbstractNode& node, std::optional<std::uint64_t> length = std::nullopt);

inline constexpr std::string_view kDgmlNamespace = "http://schemas.microsoft.com/vs/2009/dgml";

std::string export_dgml(const AbstractGraph& g, const StyleConfig& styles = {},
                        const ExportAnnotations& notes = {});
/// Reduced nodes become collapsed groups containing their abstract nodes.
std::string export_dgml(const AbstractGraph& g, const ReducedGraph& r, const StyleConfig& styles = {},
                        const ExportAnnotations& notes = {});

std::string export_graphml(const AbstractGraph& g);

}  // namespace heapabs
