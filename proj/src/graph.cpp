#include "qpool/graph.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "text_util.hpp"

namespace qpool {

Graph::Graph(unsigned vertices, std::vector<Edge> edge_list) : num_vertices(vertices), edges(std::move(edge_list)) {
  std::set<Edge> seen;
  for (const auto& [u, v] : edges) {
    if (u >= num_vertices || v >= num_vertices) {
      throw DomainError("edge (" + std::to_string(u) + "," + std::to_string(v) + ") outside vertex range " +
                        std::to_string(num_vertices));
    }
    if (u == v) throw DomainError("self-loop on vertex " + std::to_string(u));
    if (!seen.insert(std::minmax(u, v)).second) {
      throw DomainError("duplicate edge (" + std::to_string(u) + "," + std::to_string(v) + ")");
    }
  }
}

std::vector<unsigned> Graph::degrees() const {
  std::vector<unsigned> deg(num_vertices, 0);
  for (const auto& [u, v] : edges) {
    ++deg[u];
    ++deg[v];
  }
  return deg;
}

Graph parse_graph(std::string_view text) {
  std::optional<unsigned> vertices;
  std::vector<Graph::Edge> edges;
  std::set<Graph::Edge> seen;
  std::size_t line_no = 0;
  for (const auto& line : detail::split_lines(text)) {
    ++line_no;
    const auto tokens = detail::tokenize(line);
    if (tokens.empty()) continue;
    if (tokens[0] == "vertices") {
      if (tokens.size() != 2) throw ParseError(line_no, "expected `vertices <n>`");
      if (vertices) throw ParseError(line_no, "duplicate `vertices` header");
      vertices = detail::parse_unsigned(tokens[1], line_no);
    } else if (tokens[0] == "edge") {
      if (!vertices) throw ParseError(line_no, "`edge` before `vertices` header");
      if (tokens.size() != 3) throw ParseError(line_no, "expected `edge <u> <v>`");
      const unsigned u = detail::parse_unsigned(tokens[1], line_no);
      const unsigned v = detail::parse_unsigned(tokens[2], line_no);
      if (u >= *vertices || v >= *vertices) throw ParseError(line_no, "edge endpoint out of range");
      if (u == v) throw ParseError(line_no, "self-loop");
      if (!seen.insert(std::minmax(u, v)).second) throw ParseError(line_no, "duplicate edge");
      edges.emplace_back(u, v);
    } else {
      throw ParseError(line_no, "unknown keyword `" + tokens[0] + "`");
    }
  }
  if (!vertices) throw ParseError(0, "missing `vertices` header");
  return Graph(*vertices, std::move(edges));
}

std::string serialize_graph(const Graph& graph) {
  std::ostringstream out;
  out << "vertices " << graph.num_vertices << '\n';
  for (const auto& [u, v] : graph.edges) out << "edge " << u << ' ' << v << '\n';
  return out.str();
}

Graph load_graph(const std::filesystem::path& path) {
  return parse_graph(detail::read_file(path));
}

void save_graph(const Graph& graph, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << serialize_graph(graph);
}

}  // namespace qpool
