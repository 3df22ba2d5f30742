#pragma once

#include <json.hpp>

#include "heapabs/algebra.hpp"
#include "heapabs/diagnostics.hpp"
#include "heapabs/reduction.hpp"
#include "heapabs/session.hpp"

namespace heapabs {

nlohmann::json to_json(const NodeMetrics& m);
nlohmann::json to_json(const Finding& f);
nlohmann::json to_json(const ReducedGraph& r);
nlohmann::json to_json(const Subview& v);
nlohmann::json graph_json(const AbstractGraph& g);

/// {"tool","version","snapshot","metrics":[...],"findings":[...]}
nlohmann::json diagnostics_report(const Analysis& a, std::string_view snapshot_hash);

/// Types, cardinality, member count, metrics and findings of one node.
/// Throws UnknownNodeError.
nlohmann::json node_detail(const Analysis& a, NodeId id);

}  // namespace heapabs
