#include "rwres/graph.hpp"

#include <algorithm>
#include <ostream>
#include <queue>
#include <string>

#include "rwres/errors.hpp"

namespace rwres {

std::string_view to_string(GraphFamily family) {
  switch (family) {
    case GraphFamily::complete: return "complete";
    case GraphFamily::random_regular: return "random_regular";
    case GraphFamily::erdos_renyi: return "erdos_renyi";
    case GraphFamily::power_law: return "power_law";
  }
  return "unknown";
}

GraphFamily parse_graph_family(std::string_view name) {
  if (name == "complete") return GraphFamily::complete;
  if (name == "random_regular") return GraphFamily::random_regular;
  if (name == "erdos_renyi") return GraphFamily::erdos_renyi;
  if (name == "power_law") return GraphFamily::power_law;
  throw ConfigError("unknown graph family '" + std::string(name) + "'");
}

void GraphSpec::validate() const {
  if (n < 2) throw ConfigError("graph: n must be >= 2");
  switch (family) {
    case GraphFamily::complete:
      break;
    case GraphFamily::random_regular:
      if (degree < 1 || degree >= n)
        throw ConfigError("graph: random_regular requires 1 <= degree < n");
      if ((static_cast<long long>(n) * degree) % 2 != 0)
        throw ConfigError("graph: random_regular requires n*degree even");
      break;
    case GraphFamily::erdos_renyi:
      if (!(edge_prob > 0.0 && edge_prob <= 1.0))
        throw ConfigError("graph: edge_prob must lie in (0, 1]");
      break;
    case GraphFamily::power_law:
      if (attachment < 1 || attachment >= n)
        throw ConfigError("graph: power_law requires 1 <= attachment < n");
      break;
  }
}

Graph Graph::from_edges(int n, std::span<const std::pair<NodeId, NodeId>> edges) {
  Graph g;
  g.adjacency_.assign(static_cast<std::size_t>(n), {});
  for (const auto& [a, b] : edges) {
    if (a == b) throw ConfigError("graph: self-loop at node " + std::to_string(a));
    if (a < 0 || b < 0 || a >= n || b >= n) throw ConfigError("graph: node id out of range");
    g.adjacency_[static_cast<std::size_t>(a)].push_back(b);
    g.adjacency_[static_cast<std::size_t>(b)].push_back(a);
  }
  std::size_t half_edges = 0;
  for (auto& adj : g.adjacency_) {
    std::sort(adj.begin(), adj.end());
    adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
    half_edges += adj.size();
  }
  g.edge_count_ = half_edges / 2;
  return g;
}

bool Graph::is_connected() const {
  if (adjacency_.empty()) return false;
  std::vector<char> seen(adjacency_.size(), 0);
  std::queue<NodeId> frontier;
  frontier.push(0);
  seen[0] = 1;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const NodeId u = frontier.front();
    frontier.pop();
    for (NodeId v : neighbors(u)) {
      if (!seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = 1;
        ++reached;
        frontier.push(v);
      }
    }
  }
  return reached == adjacency_.size();
}

namespace {

using EdgeList = std::vector<std::pair<NodeId, NodeId>>;

EdgeList complete_edges(int n) {
  EdgeList edges;
  for (NodeId a = 0; a < n; ++a)
    for (NodeId b = a + 1; b < n; ++b) edges.emplace_back(a, b);
  return edges;
}

// Pairing model with on-the-fly rejection of loops and multi-edges; restarts
// when the remaining stubs admit no valid pair.
EdgeList random_regular_edges(int n, int degree, Rng& rng) {
  const std::size_t nodes = static_cast<std::size_t>(n);
  for (int attempt = 0; attempt < kGraphRetryCap; ++attempt) {
    std::vector<NodeId> stubs;
    stubs.reserve(nodes * static_cast<std::size_t>(degree));
    for (NodeId v = 0; v < n; ++v)
      for (int k = 0; k < degree; ++k) stubs.push_back(v);

    std::vector<std::vector<NodeId>> adj(nodes);
    auto adjacent = [&](NodeId a, NodeId b) {
      const auto& row = adj[static_cast<std::size_t>(a)];
      return std::find(row.begin(), row.end(), b) != row.end();
    };

    EdgeList edges;
    bool stuck = false;
    while (!stubs.empty() && !stuck) {
      bool paired = false;
      for (int tries = 0; tries < 100; ++tries) {
        const std::size_t i = rng.index(stubs.size());
        const std::size_t j = rng.index(stubs.size());
        const NodeId a = stubs[i];
        const NodeId b = stubs[j];
        if (i == j || a == b || adjacent(a, b)) continue;
        edges.emplace_back(a, b);
        adj[static_cast<std::size_t>(a)].push_back(b);
        adj[static_cast<std::size_t>(b)].push_back(a);
        // Remove both stubs (larger index first).
        const std::size_t hi = std::max(i, j);
        const std::size_t lo = std::min(i, j);
        stubs[hi] = stubs.back();
        stubs.pop_back();
        stubs[lo] = stubs.back();
        stubs.pop_back();
        paired = true;
        break;
      }
      if (!paired) {
        // Exhaustive check before giving up on this attempt.
        stuck = true;
        for (std::size_t i = 0; i < stubs.size() && stuck; ++i)
          for (std::size_t j = i + 1; j < stubs.size(); ++j)
            if (stubs[i] != stubs[j] && !adjacent(stubs[i], stubs[j])) {
              stuck = false;
              break;
            }
      }
    }
    if (!stuck) return edges;
  }
  throw ConnectivityError("graph: random_regular pairing failed repeatedly");
}

EdgeList erdos_renyi_edges(int n, double p, Rng& rng) {
  EdgeList edges;
  for (NodeId a = 0; a < n; ++a)
    for (NodeId b = a + 1; b < n; ++b)
      if (rng.bernoulli(p)) edges.emplace_back(a, b);
  return edges;
}

// Barabasi-Albert preferential attachment seeded with a clique on
// attachment+1 nodes.
EdgeList preferential_attachment_edges(int n, int attachment, Rng& rng) {
  EdgeList edges = complete_edges(attachment + 1);
  std::vector<NodeId> endpoints;
  for (const auto& [a, b] : edges) {
    endpoints.push_back(a);
    endpoints.push_back(b);
  }
  std::vector<NodeId> targets;
  for (NodeId v = attachment + 1; v < n; ++v) {
    targets.clear();
    while (static_cast<int>(targets.size()) < attachment) {
      const NodeId u = endpoints[rng.index(endpoints.size())];
      if (std::find(targets.begin(), targets.end(), u) == targets.end()) targets.push_back(u);
    }
    for (NodeId u : targets) {
      edges.emplace_back(v, u);
      endpoints.push_back(v);
      endpoints.push_back(u);
    }
  }
  return edges;
}

}  // namespace

Graph generate(const GraphSpec& spec) {
  spec.validate();
  if (spec.family == GraphFamily::complete) {
    const auto edges = complete_edges(spec.n);
    return Graph::from_edges(spec.n, edges);
  }
  for (int attempt = 0; attempt < kGraphRetryCap; ++attempt) {
    Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(attempt)));
    EdgeList edges;
    switch (spec.family) {
      case GraphFamily::random_regular:
        edges = random_regular_edges(spec.n, spec.degree, rng);
        break;
      case GraphFamily::erdos_renyi:
        edges = erdos_renyi_edges(spec.n, spec.edge_prob, rng);
        break;
      case GraphFamily::power_law:
        edges = preferential_attachment_edges(spec.n, spec.attachment, rng);
        break;
      case GraphFamily::complete:
        break;
    }
    Graph g = Graph::from_edges(spec.n, edges);
    if (g.is_connected()) return g;
  }
  throw ConnectivityError("graph: no connected sample of family " +
                          std::string(to_string(spec.family)) + " within " +
                          std::to_string(kGraphRetryCap) + " attempts");
}

void write_edge_list_csv(const Graph& g, std::ostream& out) {
  out << "src,dst\n";
  for (NodeId a = 0; a < g.size(); ++a)
    for (NodeId b : g.neighbors(a))
      if (a < b) out << a << ',' << b << '\n';
}

}  // namespace rwres
