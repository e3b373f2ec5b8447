#include "consensus_lab/graph.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <utility>

#include "consensus_lab/error.hpp"
#include "consensus_lab/rng.hpp"

namespace consensus_lab {

namespace {

bool connected(int n, const std::vector<int>& offsets, const std::vector<Neighbor>& adj) {
  if (n <= 1) return true;
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    for (int k = offsets[i]; k < offsets[i + 1]; ++k) {
      const int j = adj[k].node;
      if (!seen[j]) {
        seen[j] = 1;
        ++count;
        stack.push_back(j);
      }
    }
  }
  return count == n;
}

}  // namespace

Graph::Graph(int n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
  if (n < 1) throw ValidationError("graph needs at least one node");
  std::set<std::pair<int, int>> seen;
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    auto& [u, v] = edges_[e];
    if (u > v) std::swap(u, v);
    if (u < 0 || v >= n) {
      throw ValidationError("edge " + std::to_string(e) + " has an endpoint out of range");
    }
    if (u == v) throw ValidationError("edge " + std::to_string(e) + " is a self-loop");
    if (!seen.emplace(u, v).second) {
      throw ValidationError("edge " + std::to_string(e) + " (" + std::to_string(u) + "," +
                            std::to_string(v) + ") is a duplicate");
    }
  }

  std::vector<int> deg(n, 0);
  for (const auto& [u, v] : edges_) {
    ++deg[u];
    ++deg[v];
  }
  offsets_.assign(n + 1, 0);
  for (int i = 0; i < n; ++i) offsets_[i + 1] = offsets_[i] + deg[i];
  adjacency_.resize(offsets_[n]);
  std::vector<int> fill(offsets_.begin(), offsets_.end() - 1);
  for (int e = 0; e < num_edges(); ++e) {
    const auto [u, v] = edges_[e];
    adjacency_[fill[u]++] = {v, e};
    adjacency_[fill[v]++] = {u, e};
  }
  for (int i = 0; i < n; ++i) {
    std::sort(adjacency_.begin() + offsets_[i], adjacency_.begin() + offsets_[i + 1],
              [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });
  }
  if (!connected(n, offsets_, adjacency_)) throw ValidationError("graph is not connected");
}

std::span<const Neighbor> Graph::neighbors(int i) const {
  return {adjacency_.data() + offsets_[i], static_cast<std::size_t>(degree(i))};
}

int Graph::max_degree() const {
  int d = 0;
  for (int i = 0; i < n_; ++i) d = std::max(d, degree(i));
  return d;
}

int Graph::min_degree() const {
  int d = degree(0);
  for (int i = 1; i < n_; ++i) d = std::min(d, degree(i));
  return d;
}

int Graph::side_of(int e, int node) const {
  if (edges_[e].u == node) return 0;
  if (edges_[e].v == node) return 1;
  return -1;
}

int Graph::find_edge(int i, int j) const {
  for (const auto& nb : neighbors(i)) {
    if (nb.node == j) return nb.edge;
  }
  return -1;
}

std::vector<ExtendedEdge> Graph::extended_edges() const {
  std::vector<ExtendedEdge> out;
  out.reserve(2 * edges_.size());
  for (int e = 0; e < num_edges(); ++e) {
    out.push_back({e, edges_[e].u});
    out.push_back({e, edges_[e].v});
  }
  return out;
}

std::uint64_t Graph::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t x) {
    for (int b = 0; b < 8; ++b) {
      h ^= (x >> (8 * b)) & 0xffU;
      h *= 1099511628211ULL;
    }
  };
  mix(static_cast<std::uint64_t>(n_));
  for (const auto& [u, v] : edges_) {
    mix(static_cast<std::uint64_t>(u));
    mix(static_cast<std::uint64_t>(v));
  }
  return h;
}

std::string to_string(CycleClass c) {
  switch (c) {
    case CycleClass::Acyclic:
      return "acyclic";
    case CycleClass::OddCyclesOnly:
      return "odd-cycles-only";
    case CycleClass::HasEvenCycle:
      return "has-even-cycle";
  }
  return "?";
}

Graph gen_ring(int n) {
  if (n < 3) throw ValidationError("ring requires n >= 3");
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
  edges.push_back({0, n - 1});
  return Graph(n, std::move(edges));
}

Graph gen_khop(int n, int k) {
  if (n < 3) throw ValidationError("k-hop lattice requires n >= 3");
  if (k < 1 || k >= n) throw ValidationError("k-hop lattice requires 1 <= k < n");
  std::vector<Edge> edges;
  std::set<std::pair<int, int>> have;
  auto add = [&](int a, int b) {
    if (a > b) std::swap(a, b);
    if (a != b && have.emplace(a, b).second) edges.push_back({a, b});
  };
  for (int i = 0; i < n; ++i) add(i, (i + 1) % n);
  for (int i = 0; i < n; ++i) add(i, (i + k) % n);
  return Graph(n, std::move(edges));
}

Graph gen_grid(int rows, int cols, bool periodic) {
  if (rows < 1 || cols < 1) throw ValidationError("grid dimensions must be positive");
  if (periodic && (rows < 3 || cols < 3)) {
    throw ValidationError("periodic grid requires both dimensions >= 3");
  }
  std::vector<Edge> edges;
  auto id = [cols](int r, int c) { return r * cols + c; };
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) {
        edges.push_back({id(r, c), id(r, c + 1)});
      } else if (periodic) {
        edges.push_back({id(r, 0), id(r, c)});
      }
      if (r + 1 < rows) {
        edges.push_back({id(r, c), id(r + 1, c)});
      } else if (periodic) {
        edges.push_back({id(0, c), id(r, c)});
      }
    }
  }
  return Graph(rows * cols, std::move(edges));
}

Graph gen_er(int n, double p, std::uint64_t seed) {
  if (n < 1) throw ValidationError("Erdos-Renyi graph requires n >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("edge probability must lie in [0, 1]");
  constexpr int kAttempts = 1000;
  Rng rng(seed);
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (rng.uniform() < p) edges.push_back({i, j});
      }
    }
    try {
      return Graph(n, std::move(edges));
    } catch (const ValidationError&) {
      // disconnected: resample the whole graph
    }
  }
  throw ValidationError("no connected Erdos-Renyi sample within 1000 attempts");
}

Graph gen_path(int n) {
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
  return Graph(n, std::move(edges));
}

Graph gen_star(int leaves) {
  std::vector<Edge> edges;
  for (int i = 1; i <= leaves; ++i) edges.push_back({0, i});
  return Graph(leaves + 1, std::move(edges));
}

Graph gen_complete(int n) {
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) edges.push_back({i, j});
  }
  return Graph(n, std::move(edges));
}

CycleClass classify_cycles(const Graph& g) {
  const int n = g.num_nodes();
  const int m = g.num_edges();
  if (m == n - 1) return CycleClass::Acyclic;

  // Iterative Hopcroft-Tarjan; blocks are collected as edge sets.
  std::vector<int> disc(n, -1), low(n, 0);
  std::vector<int> edge_stack;
  bool odd_cycle_seen = false;
  int timer = 0;

  struct Frame {
    int node;
    int parent_edge;
    std::size_t next;
  };

  auto close_block = [&](int edge_of_child) -> bool {
    // Pops the block ending at edge_of_child; returns true if it holds an even cycle.
    std::set<int> nodes;
    int edges = 0;
    while (true) {
      const int e = edge_stack.back();
      edge_stack.pop_back();
      ++edges;
      nodes.insert(g.edge(e).u);
      nodes.insert(g.edge(e).v);
      if (e == edge_of_child) break;
    }
    const int vertices = static_cast<int>(nodes.size());
    if (edges == 1) return false;
    if (edges > vertices) return true;  // 2-connected, not a cycle: contains a theta
    if (edges % 2 == 0) return true;
    odd_cycle_seen = true;
    return false;
  };

  std::vector<Frame> stack;
  stack.push_back({0, -1, 0});
  disc[0] = low[0] = timer++;
  while (!stack.empty()) {
    Frame& f = stack.back();
    const auto nbrs = g.neighbors(f.node);
    if (f.next < nbrs.size()) {
      const Neighbor nb = nbrs[f.next++];
      if (nb.edge == f.parent_edge) continue;
      if (disc[nb.node] < 0) {
        edge_stack.push_back(nb.edge);
        disc[nb.node] = low[nb.node] = timer++;
        stack.push_back({nb.node, nb.edge, 0});
      } else if (disc[nb.node] < disc[f.node]) {
        edge_stack.push_back(nb.edge);
        low[f.node] = std::min(low[f.node], disc[nb.node]);
      }
    } else {
      const Frame done = f;
      stack.pop_back();
      if (stack.empty()) break;
      Frame& parent = stack.back();
      low[parent.node] = std::min(low[parent.node], low[done.node]);
      if (low[done.node] >= disc[parent.node]) {
        if (close_block(done.parent_edge)) return CycleClass::HasEvenCycle;
      }
    }
  }
  return odd_cycle_seen ? CycleClass::OddCyclesOnly : CycleClass::Acyclic;
}

bool is_bipartite(const Graph& g) {
  std::vector<int> color(g.num_nodes(), -1);
  std::vector<int> stack{0};
  color[0] = 0;
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    for (const auto& nb : g.neighbors(i)) {
      if (color[nb.node] < 0) {
        color[nb.node] = 1 - color[i];
        stack.push_back(nb.node);
      } else if (color[nb.node] == color[i]) {
        return false;
      }
    }
  }
  return true;
}

int unsigned_cycle_rank(const Graph& g) {
  return g.num_edges() - g.num_nodes() + (is_bipartite(g) ? 1 : 0);
}

Graph line_graph(const Graph& g) {
  if (g.num_edges() < 1) throw ValidationError("line graph of an edgeless graph is empty");
  std::set<std::pair<int, int>> pairs;
  for (int i = 0; i < g.num_nodes(); ++i) {
    const auto nbrs = g.neighbors(i);
    for (std::size_t a = 0; a < nbrs.size(); ++a) {
      for (std::size_t b = a + 1; b < nbrs.size(); ++b) {
        pairs.emplace(std::min(nbrs[a].edge, nbrs[b].edge), std::max(nbrs[a].edge, nbrs[b].edge));
      }
    }
  }
  std::vector<Edge> edges;
  edges.reserve(pairs.size());
  for (const auto& [a, b] : pairs) edges.push_back({a, b});
  return Graph(g.num_edges(), std::move(edges));
}

Rational conductance(const Graph& g) {
  const int n = g.num_nodes();
  if (n > 20) throw ValidationError("conductance is brute force; n must be <= 20");
  if (n < 2) throw ValidationError("conductance needs at least two nodes");
  long long total_volume = 0;
  for (int i = 0; i < n; ++i) total_volume += g.degree(i);

  Rational best{1, 1};
  bool found = false;
  const std::uint32_t full = (1U << n) - 1U;
  for (std::uint32_t mask = 1; mask < full; ++mask) {
    long long volume = 0;
    for (int i = 0; i < n; ++i) {
      if (mask & (1U << i)) volume += g.degree(i);
    }
    if (2 * volume > total_volume) continue;
    long long boundary = 0;
    for (const auto& [u, v] : g.edges()) {
      if (((mask >> u) & 1U) != ((mask >> v) & 1U)) ++boundary;
    }
    // boundary / volume < best.num / best.den
    if (!found || boundary * best.den < best.num * volume) {
      best = {boundary, volume};
      found = true;
    }
  }
  const long long d = std::gcd(best.num, best.den);
  if (d > 1) best = {best.num / d, best.den / d};
  return best;
}

Graph read_graph(std::istream& in) {
  std::string line;
  int line_no = 0;
  auto next_line = [&](std::string& out) {
    while (std::getline(in, out)) {
      ++line_no;
      if (out.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };
  if (!next_line(line)) throw ValidationError("graph file: missing header line");
  std::istringstream header(line);
  long long n = 0, m = 0;
  std::string extra;
  if (!(header >> n >> m) || (header >> extra) || n < 1 || m < 0) {
    throw ValidationError("graph file line " + std::to_string(line_no) +
                          ": expected header \"n m\"");
  }
  std::vector<Edge> edges;
  std::set<std::pair<long long, long long>> seen;
  for (long long k = 0; k < m; ++k) {
    if (!next_line(line)) {
      throw ValidationError("graph file: expected " + std::to_string(m) + " edges, found " +
                            std::to_string(k));
    }
    std::istringstream row(line);
    long long i = 0, j = 0;
    const std::string where = "graph file line " + std::to_string(line_no) + ": ";
    if (!(row >> i >> j) || (row >> extra)) throw ValidationError(where + "expected \"i j\"");
    if (i < 0 || j < 0 || i >= n || j >= n) throw ValidationError(where + "node index out of range");
    if (i == j) throw ValidationError(where + "self-loop");
    if (i > j) std::swap(i, j);
    if (!seen.emplace(i, j).second) throw ValidationError(where + "duplicate edge");
    edges.push_back({static_cast<int>(i), static_cast<int>(j)});
  }
  if (next_line(line)) {
    throw ValidationError("graph file line " + std::to_string(line_no) + ": trailing content");
  }
  return Graph(static_cast<int>(n), std::move(edges));
}

Graph read_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open graph file " + path);
  return read_graph(in);
}

void write_graph(std::ostream& out, const Graph& g) {
  out << g.num_nodes() << ' ' << g.num_edges() << '\n';
  for (const auto& [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

}  // namespace consensus_lab
