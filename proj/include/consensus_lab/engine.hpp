#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "consensus_lab/graph.hpp"
#include "consensus_lab/problems.hpp"

namespace consensus_lab {

enum class AgentKind { Node, Edge };

/// Link channels. Every channel has one slot per extended edge (e, side):
///   NodeToEdge  node at `side` of e -> edge agent e
///   EdgeToNode  edge agent e -> node at `side`
///   NodeToPeer  node at `side` of e -> the other endpoint
enum class Channel { NodeToEdge, EdgeToNode, NodeToPeer };

struct Access {
  AgentKind kind;
  int agent;
  bool write;
  Channel channel;
  int slot;
};

/// Every state vector the engine owns, one per agent.
struct AgentStates {
  std::vector<std::vector<double>> node;
  std::vector<std::vector<double>> edge;
};

class Mailbox;

/// The only window a node agent has on the network.
class NodeContext {
 public:
  NodeContext(const Graph& g, Mailbox& box, int node, std::vector<Access>* log)
      : g_(g), box_(box), node_(node), log_(log) {}

  int id() const { return node_; }
  int degree() const { return g_.degree(node_); }
  std::span<const Neighbor> neighbors() const { return g_.neighbors(node_); }

  std::span<const double> from_edge(int e) const;
  std::span<const double> from_peer(int j) const;
  std::span<double> to_edge(int e, std::size_t size);
  std::span<double> to_peer(int j, std::size_t size);

 private:
  int own_slot(int e) const;
  const Graph& g_;
  Mailbox& box_;
  int node_;
  std::vector<Access>* log_;
};

class EdgeContext {
 public:
  EdgeContext(const Graph& g, Mailbox& box, int edge, std::vector<Access>* log)
      : g_(g), box_(box), edge_(edge), log_(log) {}

  int id() const { return edge_; }
  const Edge& endpoints() const { return g_.edge(edge_); }
  std::span<const double> from_node(int side) const;
  std::span<double> to_node(int side, std::size_t size);

 private:
  const Graph& g_;
  Mailbox& box_;
  int edge_;
  std::vector<Access>* log_;
};

/// What the central probe sees: the current estimate of the solution and,
/// for full-copy algorithms, every agent's copy.
struct Estimate {
  std::vector<double> z;
  std::vector<Eigen::VectorXd> copies;
};

/// A synchronous distributed algorithm. The program itself only holds
/// parameters; all mutable state lives in the engine and every step sees the
/// state of one agent plus its incident links.
class AgentProgram {
 public:
  virtual ~AgentProgram() = default;

  virtual std::string name() const = 0;
  virtual const Problem& problem() const = 0;
  /// Numeric parameters, recorded in trace metadata.
  virtual std::map<std::string, double> parameters() const = 0;

  /// Phase layout of one round: which kind of agent runs in each phase.
  virtual std::vector<AgentKind> phases() const = 0;

  /// Initial state and the messages visible to the first phase.
  virtual void init_node(NodeContext& ctx, std::vector<double>& state) const = 0;
  virtual void init_edge(EdgeContext&, std::vector<double>&) const {}

  virtual void node_step(int phase, int round, NodeContext& ctx, std::vector<double>& state) const;
  virtual void edge_step(int phase, int round, EdgeContext& ctx, std::vector<double>& state) const;

  /// Central read-out, outside the locality constraint.
  virtual Estimate estimate(const AgentStates& states, int round) const = 0;
};

struct StopRule {
  int max_rounds = 1000;
  double tolerance = 0.0;  // stop once error <= tolerance; 0 runs all rounds
};

struct ProbeValue {
  double error = 0;
  double objective = 0;
};
using Probe = std::function<ProbeValue(const Estimate&)>;

/// Error from Problem::error (or copies_error when copies are present) and
/// the objective at the estimate.
Probe problem_probe(const Problem& problem);

struct RunOptions {
  int threads = 1;
  /// Serial only: evaluate agents in a seeded random order inside each phase.
  std::optional<std::uint64_t> shuffle_seed;
  bool audit = false;
  std::vector<int> snapshot_rounds;
  std::uint64_t seed = 0;  // recorded in metadata
};

struct TraceRow {
  int t = 0;
  double error = 0;
  double objective = 0;
};

struct TraceMeta {
  std::string algorithm;
  std::map<std::string, double> parameters;
  std::uint64_t graph_hash = 0;
  std::uint64_t seed = 0;
};

struct Trace {
  std::vector<TraceRow> rows;
  std::map<int, std::vector<double>> snapshots;
  std::vector<Access> access_log;
  AgentStates final_states;
  TraceMeta meta;
  bool converged = false;
};

/// Runs rounds until the stop rule fires. Throws DivergenceError when any
/// state or the probe turns non-finite, LocalityError on a non-incident link.
Trace run_sync(const AgentProgram& prog, const Graph& g, const StopRule& stop, const Probe& probe,
               const RunOptions& options = {});
Trace run_sync(const AgentProgram& prog, const Graph& g, const StopRule& stop,
               const RunOptions& options = {});

/// Independent check of an access log: every entry must name a slot whose
/// extended edge is incident to the agent, on the correct side.
bool audit_access_log(const Graph& g, std::span<const Access> log, std::string* why = nullptr);

/// Thread count from CONSENSUS_LAB_THREADS, or `fallback` if unset.
int threads_from_env(int fallback = 1);

/// "t,error,objective" then one row per round, 17 significant digits.
void write_trace_csv(std::ostream& out, const Trace& trace);
std::vector<TraceRow> read_trace_csv(std::istream& in);

}  // namespace consensus_lab
