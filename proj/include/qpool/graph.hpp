#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qpool/types.hpp"

namespace qpool {

/// Undirected simple graph on vertices [0, num_vertices).
struct Graph {
  using Edge = std::pair<unsigned, unsigned>;

  unsigned num_vertices = 0;
  std::vector<Edge> edges;

  /// Validates endpoints and rejects self-loops and duplicate edges.
  Graph(unsigned vertices, std::vector<Edge> edge_list);
  Graph() = default;

  /// Number of edges whose endpoints fall on different sides of the
  /// bipartition encoded by the bits of `assignment`.
  unsigned cut(Index assignment) const noexcept {
    unsigned count = 0;
    for (const auto& [u, v] : edges) count += static_cast<unsigned>(((assignment >> u) ^ (assignment >> v)) & 1U);
    return count;
  }

  std::vector<unsigned> degrees() const;

  bool operator==(const Graph&) const = default;
};

/// Text format: `vertices <n>` followed by one `edge <u> <v>` per line.
/// `#` starts a comment; blank lines are ignored.
Graph parse_graph(std::string_view text);
std::string serialize_graph(const Graph& graph);
Graph load_graph(const std::filesystem::path& path);
void save_graph(const Graph& graph, const std::filesystem::path& path);

}  // namespace qpool
