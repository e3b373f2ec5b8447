#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace consensus_lab {

struct Edge {
  int u = 0;  // u < v
  int v = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Neighbor {
  int node = 0;
  int edge = 0;
};

// One endpoint of an edge. Extended edge (e, side) has index 2 * e + side,
// side 0 being the lower-numbered endpoint.
struct ExtendedEdge {
  int edge = 0;
  int node = 0;
};

inline int extended_index(int edge, int side) { return 2 * edge + side; }

/// Simple, connected, undirected graph with nodes 0..n-1.
///
/// Edges keep the order they were given in (after normalising each pair to
/// u < v). Neighbor lists are sorted by neighbor index; every reduction over a
/// neighborhood in this library walks them in that order.
class Graph {
 public:
  Graph() = default;
  /// Throws ValidationError on self-loops, duplicates, out-of-range endpoints
  /// or a disconnected edge set.
  Graph(int n, std::vector<Edge> edges);

  int num_nodes() const { return n_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  std::span<const Edge> edges() const { return edges_; }
  const Edge& edge(int e) const { return edges_[e]; }
  std::span<const Neighbor> neighbors(int i) const;
  int degree(int i) const { return offsets_[i + 1] - offsets_[i]; }
  int max_degree() const;
  int min_degree() const;

  /// Side (0 or 1) of `node` on edge `e`; -1 if not an endpoint.
  int side_of(int e, int node) const;
  /// Edge index joining i and j, or -1.
  int find_edge(int i, int j) const;

  std::vector<ExtendedEdge> extended_edges() const;
  std::uint64_t hash() const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<int> offsets_{0};
  std::vector<Neighbor> adjacency_;
};

enum class CycleClass { Acyclic, OddCyclesOnly, HasEvenCycle };

std::string to_string(CycleClass c);

// Generators for the experiment families.
Graph gen_ring(int n);
Graph gen_khop(int n, int k);
Graph gen_grid(int rows, int cols, bool periodic);
Graph gen_er(int n, double p, std::uint64_t seed);
Graph gen_path(int n);
Graph gen_star(int leaves);
Graph gen_complete(int n);

/// Biconnected-block decision: no even cycle iff every block is a bridge or
/// an odd cycle.
CycleClass classify_cycles(const Graph& g);

bool is_bipartite(const Graph& g);

/// Dimension of the kernel of the unsigned incidence matrix,
/// m - n + [g bipartite]. This is the multiplicity of the eigenvalue
/// 1 - gamma of the relaxed ADMM operator.
int unsigned_cycle_rank(const Graph& g);

Graph line_graph(const Graph& g);

struct Rational {
  long long num = 0;
  long long den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Rational&, const Rational&) = default;
};

/// Brute-force conductance min |dS| / vol(S) over vol(S) <= vol(V)/2.
/// Exponential; rejects n > 20.
Rational conductance(const Graph& g);

/// Text format: "n m" then m lines "i j". Diagnostics name the line.
Graph read_graph(std::istream& in);
Graph read_graph_file(const std::string& path);
void write_graph(std::ostream& out, const Graph& g);

}  // namespace consensus_lab
