#include "findhccs/graphml.hpp"

#include <set>

#include <fmt/format.h>

#include "findhccs/csv.hpp"

namespace findhccs {

std::string xml_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default:
        // Control characters other than tab/newline are not legal XML 1.0.
        if (static_cast<unsigned char>(c) < 0x20 && c != '\t' && c != '\n' && c != '\r')
          out += ' ';
        else
          out += c;
    }
  }
  return out;
}

namespace {

struct Key {
  std::string id;
  std::string domain;  // node, edge, graph
  std::string name;
  std::string type;    // string, double, int
};

void open_document(std::ostream& out, const std::vector<Key>& keys) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\"\n"
         "         xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\"\n"
         "         xsi:schemaLocation=\"http://graphml.graphdrawing.org/xmlns "
         "http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd\">\n";
  for (const auto& k : keys)
    out << fmt::format("  <key id=\"{}\" for=\"{}\" attr.name=\"{}\" attr.type=\"{}\"/>\n", k.id, k.domain,
                       xml_escape(k.name), k.type);
}

void close_document(std::ostream& out) { out << "</graphml>\n"; }

std::string data(std::string_view key, std::string_view value) {
  return fmt::format("<data key=\"{}\">{}</data>", key, xml_escape(value));
}

std::string num(double v) { return csv::format_number(v); }

void write_nodes(std::ostream& out, const std::set<std::string>& nodes, std::string_view indent) {
  for (const auto& n : nodes) out << fmt::format("{}<node id=\"{}\"/>\n", indent, xml_escape(n));
}

}  // namespace

void write_lcn_graphml(std::ostream& out, const Lcn& lcn) {
  std::set<std::string> criteria;
  for (const auto& [pair, weights] : lcn.edges)
    for (const auto& [c, w] : weights) criteria.insert(c);
  std::vector<Key> keys{{"weight", "edge", "weight", "double"}};
  std::map<std::string, std::string> key_of;
  int k = 0;
  for (const auto& c : criteria) {
    key_of[c] = fmt::format("c{}", k++);
    keys.push_back({key_of[c], "edge", c, "double"});
  }
  open_document(out, keys);
  out << "  <graph id=\"lcn\" edgedefault=\"undirected\">\n";
  write_nodes(out, lcn.nodes, "    ");
  const CollapsedGraph collapsed = collapse_edges(lcn);
  for (const auto& [pair, weights] : lcn.edges) {
    auto total = collapsed.edges.find(pair);
    out << fmt::format("    <edge source=\"{}\" target=\"{}\">", xml_escape(pair.first), xml_escape(pair.second));
    out << data("weight", num(total == collapsed.edges.end() ? 0.0 : total->second));
    for (const auto& [c, w] : weights) out << data(key_of[c], num(w));
    out << "</edge>\n";
  }
  out << "  </graph>\n";
  close_document(out);
}

void write_collapsed_graphml(std::ostream& out, const CollapsedGraph& g) {
  open_document(out, {{"weight", "edge", "weight", "double"}});
  out << "  <graph id=\"G\" edgedefault=\"undirected\">\n";
  write_nodes(out, g.nodes, "    ");
  for (const auto& [pair, w] : g.edges)
    out << fmt::format("    <edge source=\"{}\" target=\"{}\">{}</edge>\n", xml_escape(pair.first),
                       xml_escape(pair.second), data("weight", num(w)));
  out << "  </graph>\n";
  close_document(out);
}

void write_hccs_graphml(std::ostream& out, const std::vector<Hcc>& hccs) {
  open_document(out, {{"mew", "graph", "mew", "double"}, {"weight", "edge", "weight", "double"}});
  for (const auto& h : hccs) {
    out << fmt::format("  <graph id=\"hcc{}\" edgedefault=\"undirected\">\n", h.id);
    out << "    " << data("mew", num(h.mew)) << "\n";
    // Node ids are document-wide in GraphML, so prefix with the HCC.
    for (const auto& m : h.members)
      out << fmt::format("    <node id=\"hcc{}:{}\"/>\n", h.id, xml_escape(m));
    for (const auto& [pair, w] : h.edges)
      out << fmt::format("    <edge source=\"hcc{0}:{1}\" target=\"hcc{0}:{2}\">{3}</edge>\n", h.id,
                         xml_escape(pair.first), xml_escape(pair.second), data("weight", num(w)));
    out << "  </graph>\n";
  }
  close_document(out);
}

void write_reason_graphml(std::ostream& out, const ReasonNetwork& net) {
  open_document(out, {{"node_type", "node", "node_type", "string"},
                      {"label", "node", "label", "string"},
                      {"hcc_id", "node", "hcc_id", "int"},
                      {"criterion", "node", "criterion", "string"},
                      {"edge_type", "edge", "edge_type", "string"},
                      {"weight", "edge", "weight", "double"}});
  out << "  <graph id=\"reasons\" edgedefault=\"undirected\">\n";
  for (const auto& n : net.nodes) {
    out << fmt::format("    <node id=\"{}\">", xml_escape(n.id)) << data("node_type", n.type) << data("label", n.label);
    if (n.hcc_id >= 0) out << data("hcc_id", std::to_string(n.hcc_id));
    if (!n.criterion.empty()) out << data("criterion", n.criterion);
    out << "</node>\n";
  }
  for (const auto& e : net.edges)
    out << fmt::format("    <edge source=\"{}\" target=\"{}\">{}{}</edge>\n", xml_escape(e.source),
                       xml_escape(e.target), data("edge_type", e.type), data("weight", num(e.weight)));
  out << "  </graph>\n";
  close_document(out);
}

}  // namespace findhccs
