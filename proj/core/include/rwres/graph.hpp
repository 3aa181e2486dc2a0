#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "rwres/rng.hpp"

namespace rwres {

using NodeId = std::int32_t;

enum class GraphFamily { complete, random_regular, erdos_renyi, power_law };

std::string_view to_string(GraphFamily family);
GraphFamily parse_graph_family(std::string_view name);

struct GraphSpec {
  GraphFamily family = GraphFamily::random_regular;
  int n = 100;
  int degree = 8;          // random_regular
  double edge_prob = 0.1;  // erdos_renyi
  int attachment = 4;      // power_law: edges added per new node
  std::uint64_t seed = 1;

  /// Throws ConfigError when a family parameter is out of range.
  void validate() const;
};

/// Immutable undirected simple connected graph with sorted adjacency lists.
class Graph {
 public:
  /// Builds from an edge list; edges are symmetrized, sorted and
  /// deduplicated. Self-loops are rejected.
  static Graph from_edges(int n, std::span<const std::pair<NodeId, NodeId>> edges);

  int size() const { return static_cast<int>(adjacency_.size()); }
  std::size_t edge_count() const { return edge_count_; }
  int degree(NodeId node) const {
    return static_cast<int>(adjacency_[static_cast<std::size_t>(node)].size());
  }
  std::span<const NodeId> neighbors(NodeId node) const {
    return adjacency_[static_cast<std::size_t>(node)];
  }

  bool is_connected() const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::vector<std::vector<NodeId>> adjacency_;
  std::size_t edge_count_ = 0;
};

inline constexpr int kGraphRetryCap = 1000;

/// Samples a graph of the requested family. Disconnected samples are
/// discarded and redrawn from a derived seed, up to kGraphRetryCap times.
Graph generate(const GraphSpec& spec);

/// One step of a simple random walk.
inline NodeId uniform_neighbor(const Graph& g, NodeId node, Rng& rng) {
  const auto adj = g.neighbors(node);
  return adj[rng.index(adj.size())];
}

/// Writes `src,dst` rows, one per undirected edge with src < dst.
void write_edge_list_csv(const Graph& g, std::ostream& out);

}  // namespace rwres
