#include "heapabs/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "heapabs/export.hpp"
#include "heapabs/fixtures.hpp"
#include "heapabs/http_service.hpp"
#include "heapabs/report.hpp"
#include "heapabs/snapshot.hpp"

namespace heapabs {

namespace {

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
  if (!out) throw InputError("failed writing " + path);
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty())
    out << text;
  else
    write_file(path, text);
}

AbstractGraph load_graph(const std::string& path) {
  try {
    return deserialize(read_file(path));
  } catch (const SchemaError& e) {
    throw InputError(path + ": " + e.what());
  }
}

ConcreteHeap load_snapshot(const std::string& path) {
  try {
    return parse_snapshot(read_file(path));
  } catch (const HeapError& e) {
    throw InputError(path + ": " + e.what());
  }
}

struct AbstractionFlags {
  std::vector<ObjectId> interesting;
  std::vector<std::string> opaque;
  std::vector<std::string> transparent;
  std::size_t shape_limit = 4;

  void attach(CLI::App* cmd, bool with_interesting) {
    if (with_interesting)
      cmd->add_option("--interesting", interesting, "Object ids kept as singleton nodes")->delimiter(',');
    cmd->add_option("--opaque", opaque, "Type name prefixes treated as opaque")->delimiter(',');
    cmd->add_option("--transparent", transparent, "Container type names treated as plain containers")->delimiter(',');
    cmd->add_option("--shape-limit", shape_limit, "Label count searched exhaustively for tree subsets");
  }

  AbstractionOptions options() const {
    AbstractionOptions o;
    o.opaque_type_prefixes = opaque;
    o.transparent_containers = {transparent.begin(), transparent.end()};
    o.shape_subset_limit = shape_limit;
    o.interesting_objects = {interesting.begin(), interesting.end()};
    return o;
  }
};

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Heap graph abstraction, comparison and diagnostics", "heapabs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", HEAPABS_VERSION);
  int code = kExitOk;

  AbstractionFlags aflags;
  std::string snap, out_path, mu_path, dgml_path, format = "dgml";
  auto* abstract = app.add_subcommand("abstract", "Abstract a heap snapshot");
  abstract->add_option("snapshot", snap, "heapsnap-1 file")->required();
  abstract->add_option("-o,--output", out_path, "Write the ahg-1 graph here (default: standard output)");
  abstract->add_option("--mu", mu_path, "Write the mu-1 embedding here");
  abstract->add_option("--dgml", dgml_path, "Write a rendering here");
  abstract->add_option("--format", format, "Rendering format")->check(CLI::IsMember({"dgml", "graphml"}));
  aflags.attach(abstract, true);
  abstract->callback([&] {
    const AbstractionOptions opts = aflags.options();
    const ConcreteHeap heap = prepare_heap(load_snapshot(snap), opts);
    const Analysis a = analyze(heap, opts);
    emit(out_path, serialize(a.graph), out);
    if (!mu_path.empty()) write_file(mu_path, serialize_embedding(a.mu));
    if (!dgml_path.empty())
      write_file(dgml_path, format == "graphml"
                                ? export_graphml(a.graph)
                                : export_dgml(a.graph, {}, {a.metrics, a.findings, a.container_lengths}));
  });

  std::string graph_path;
  bool successors_only = false;
  auto* reduce_cmd = app.add_subcommand("reduce", "Dominator-reduce an abstract graph");
  reduce_cmd->add_option("graph", graph_path, "ahg-1 file")->required();
  reduce_cmd->add_option("-o,--output", out_path, "Write the reduced graph JSON here");
  reduce_cmd->add_option("--dgml", dgml_path, "Write a grouped DGML rendering here");
  reduce_cmd->add_flag("--successors-only", successors_only, "Keep only successors of variable targets expanded");
  reduce_cmd->callback([&] {
    const AbstractGraph g = load_graph(graph_path);
    const ReducedGraph r = heapabs::reduce(g, {.successors_only = successors_only});
    emit(out_path, dump(to_json(r)), out);
    if (!dgml_path.empty()) write_file(dgml_path, export_dgml(g, r));
  });

  std::string left, right;
  auto* compare_cmd = app.add_subcommand("compare", "Decide whether the first graph is below the second");
  compare_cmd->add_option("left", left, "ahg-1 file")->required();
  compare_cmd->add_option("right", right, "ahg-1 file")->required();
  compare_cmd->callback([&] {
    const CompareResult r = compare(load_graph(left), load_graph(right));
    out << compare_to_json(r) << "\n";
    code = r.leq ? kExitOk : kExitNegative;
  });

  bool widen = false;
  auto* merge_cmd = app.add_subcommand("merge", "Upper approximation of two graphs");
  merge_cmd->add_option("left", left, "ahg-1 file")->required();
  merge_cmd->add_option("right", right, "ahg-1 file")->required();
  merge_cmd->add_option("-o,--output", out_path, "Write the merged ahg-1 graph here")->required();
  merge_cmd->add_flag("--widen", widen, "Treat the first graph as the prior iterate");
  merge_cmd->callback([&] {
    const MergeResult m = merge(load_graph(left), load_graph(right), widen ? MergeMode::Widen : MergeMode::Join);
    write_file(out_path, serialize(m.graph));
  });

  std::string report_path;
  auto* diagnose_cmd = app.add_subcommand("diagnose", "Memory metrics and bloat findings");
  diagnose_cmd->add_option("snapshot", snap, "heapsnap-1 file")->required();
  diagnose_cmd->add_option("--report", report_path, "Write the report JSON here (default: standard output)");
  aflags.attach(diagnose_cmd, false);
  diagnose_cmd->callback([&] {
    const std::string text = read_file(snap);
    const AbstractionOptions opts = aflags.options();
    ConcreteHeap heap;
    try {
      heap = prepare_heap(parse_snapshot(text), opts);
    } catch (const HeapError& e) {
      throw InputError(snap + ": " + e.what());
    }
    emit(report_path, dump(diagnostics_report(analyze(heap, opts), hash_text(fnv1a(text)))), out);
  });

  std::string check_mu;
  auto* check_cmd = app.add_subcommand("check", "Check that a snapshot embeds in a graph through an embedding");
  check_cmd->add_option("snapshot", snap, "heapsnap-1 file")->required();
  check_cmd->add_option("graph", graph_path, "ahg-1 file")->required();
  check_cmd->add_option("mu", check_mu, "mu-1 file")->required();
  aflags.attach(check_cmd, false);
  check_cmd->callback([&] {
    const ConcreteHeap heap = prepare_heap(load_snapshot(snap), aflags.options());
    const AbstractGraph g = load_graph(graph_path);
    EmbeddingMap mu;
    try {
      mu = deserialize_embedding(read_file(check_mu));
    } catch (const SchemaError& e) {
      throw InputError(check_mu + ": " + e.what());
    }
    const EmbeddingReport report = check_embedding(heap, g, mu);
    nlohmann::json failures = nlohmann::json::array();
    for (const EmbeddingFailure& f : report.failures) {
      nlohmann::json j{{"predicate", to_string(f.predicate)}, {"message", f.message}};
      if (f.node) j["node"] = *f.node;
      if (f.pointer)
        j["pointer"] = {{"src", f.pointer->source}, {"label", heap.label_text(f.pointer->label)}, {"tgt", f.pointer->target}};
      failures.push_back(std::move(j));
    }
    out << dump({{"result", report.passed() ? "pass" : "fail"}, {"failures", failures}});
    code = report.passed() ? kExitOk : kExitNegative;
  });

  std::vector<std::string> snaps;
  std::string host = "127.0.0.1";
  int port = 8080;
  auto* serve_cmd = app.add_subcommand("serve", "Serve snapshots over the JSON API");
  serve_cmd->add_option("snapshots", snaps, "heapsnap-1 files")->required();
  serve_cmd->add_option("--port", port, "Port (0 picks a free one)")->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--host", host, "Address to bind");
  aflags.attach(serve_cmd, false);
  serve_cmd->callback([&] {
    SessionStore store(aflags.options());
    for (const std::string& path : snaps) {
      const std::string text = read_file(path);
      try {
        out << store.add_snapshot(text)->hash << "  " << path << "\n";
      } catch (const HeapError& e) {
        throw InputError(path + ": " + e.what());
      }
    }
    HttpService service(store);
    const int bound = service.bind(host, port);
    if (bound < 0) throw InputError("cannot bind " + host + ":" + std::to_string(port));
    out << "listening on http://" << host << ":" << bound << std::endl;
    service.listen();
  });

  std::string fixture_name;
  std::vector<std::string> params;
  auto* fixture_cmd = app.add_subcommand("fixture", "Write a built-in example heap as a snapshot");
  fixture_cmd->add_option("name", fixture_name, "exprtree, list, dlist, btree, facegrid or octree-scene")->required();
  fixture_cmd->add_option("-p,--param", params, "Parameter as key=value");
  fixture_cmd->add_option("-o,--output", out_path, "Write the snapshot here (default: standard output)");
  fixture_cmd->callback([&] {
    FixtureParams fp;
    for (const std::string& p : params) {
      const auto eq = p.find('=');
      if (eq == std::string::npos) throw CLI::ValidationError("--param", "expected key=value, got " + p);
      try {
        fp[p.substr(0, eq)] = std::stoll(p.substr(eq + 1));
      } catch (const std::exception&) {
        throw CLI::ValidationError("--param", "value of " + p.substr(0, eq) + " is not an integer");
      }
    }
    try {
      emit(out_path, write_snapshot(build_fixture(fixture_name, fp)), out);
    } catch (const FixtureError& e) {
      throw CLI::ValidationError("fixture", e.what());
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << HEAPABS_VERSION << "\n";
    return kExitOk;
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const AmbiguousGraphError& e) {
    err << "error: graph " << e.which() << ": " << e.what() << "\n";
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const HeapError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const EmbeddingError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return code;
}

}  // namespace heapabs
