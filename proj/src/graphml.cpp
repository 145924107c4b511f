#include "chronoscope/graphml.hpp"

#include <sstream>

namespace chronoscope {
namespace {

std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string to_graphml(const YearSnapshot& snapshot, const SuffixPolicy& policy, const Partition* partition) {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
      << "  <key id=\"sld\" for=\"node\" attr.name=\"sld\" attr.type=\"string\"/>\n";
  if (partition) out << "  <key id=\"group\" for=\"node\" attr.name=\"group\" attr.type=\"string\"/>\n";
  out << "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"long\"/>\n"
      << "  <graph id=\"y" << snapshot.year() << "\" edgedefault=\"directed\">\n";
  for (const auto& node : snapshot.nodes()) {
    out << "    <node id=\"" << xml_escape(node) << "\"><data key=\"sld\">"
        << xml_escape(sld_of_domain(node, policy)) << "</data>";
    if (partition) out << "<data key=\"group\">" << xml_escape(partition->group_of(node)) << "</data>";
    out << "</node>\n";
  }
  for (const auto& e : snapshot.edges()) {
    out << "    <edge source=\"" << xml_escape(e.source) << "\" target=\"" << xml_escape(e.target)
        << "\"><data key=\"weight\">" << e.weight << "</data></edge>\n";
  }
  out << "  </graph>\n</graphml>\n";
  return out.str();
}

}  // namespace chronoscope
