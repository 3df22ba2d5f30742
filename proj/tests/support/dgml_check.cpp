#include "support/dgml_check.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <set>
#include <sstream>

namespace testing_support {

namespace pt = boost::property_tree;

std::vector<std::string> dgml_violations(const std::string& xml) {
  std::vector<std::string> out;
  pt::ptree doc;
  try {
    std::istringstream in(xml);
    pt::read_xml(in, doc);
  } catch (const pt::xml_parser_error& e) {
    return {std::string("not well-formed: ") + e.what()};
  }
  if (doc.size() != 1 || doc.front().first != "DirectedGraph") return {"root element is not DirectedGraph"};
  const pt::ptree& root = doc.front().second;
  if (root.get<std::string>("<xmlattr>.xmlns", "") != "http://schemas.microsoft.com/vs/2009/dgml")
    out.push_back("missing DGML namespace");

  std::set<std::string> ids;
  std::vector<std::pair<std::string, std::string>> links;
  for (const auto& [tag, child] : root) {
    if (tag == "<xmlattr>") continue;
    if (tag == "Nodes") {
      for (const auto& [ntag, node] : child) {
        if (ntag != "Node") {
          out.push_back("unexpected element in Nodes: " + ntag);
          continue;
        }
        const std::string id = node.get<std::string>("<xmlattr>.Id", "");
        if (id.empty()) out.push_back("node without Id");
        if (!ids.insert(id).second) out.push_back("duplicate node id " + id);
      }
    } else if (tag == "Links") {
      for (const auto& [ltag, link] : child) {
        if (ltag != "Link") {
          out.push_back("unexpected element in Links: " + ltag);
          continue;
        }
        links.push_back({link.get<std::string>("<xmlattr>.Source", ""), link.get<std::string>("<xmlattr>.Target", "")});
      }
    } else if (tag == "Styles") {
      for (const auto& [stag, style] : child) {
        if (stag != "Style") {
          out.push_back("unexpected element in Styles: " + stag);
          continue;
        }
        if (style.get<std::string>("<xmlattr>.TargetType", "").empty()) out.push_back("style without TargetType");
        for (const auto& [ctag, c] : style) {
          if (ctag == "<xmlattr>") continue;
          if (ctag == "Condition" && c.get_optional<std::string>("<xmlattr>.Expression")) continue;
          if (ctag == "Setter" && c.get_optional<std::string>("<xmlattr>.Property") &&
              c.get_optional<std::string>("<xmlattr>.Value"))
            continue;
          out.push_back("malformed style child " + ctag);
        }
      }
    } else {
      out.push_back("unexpected element " + tag);
    }
  }
  for (const auto& [s, t] : links) {
    if (!ids.contains(s)) out.push_back("link from unknown node " + s);
    if (!ids.contains(t)) out.push_back("link to unknown node " + t);
  }
  return out;
}

}  // namespace testing_support
