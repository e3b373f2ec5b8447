#include "consensus_lab/engine.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <barrier>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "consensus_lab/error.hpp"

namespace consensus_lab {

namespace {

const char* channel_name(Channel c) {
  switch (c) {
    case Channel::NodeToEdge: return "node->edge";
    case Channel::EdgeToNode: return "edge->node";
    case Channel::NodeToPeer: return "node->peer";
  }
  return "?";
}

}  // namespace

// Two buffers per channel: agents read what was delivered at the last barrier
// and write into the other one.
class Mailbox {
 public:
  explicit Mailbox(int slots) {
    for (auto& buf : bufs_) {
      for (auto& ch : buf.data) ch.assign(slots, {});
      for (auto& ch : buf.present) ch.assign(slots, 0);
    }
  }

  std::span<const double> read(Channel c, int slot) const {
    const Buffer& b = bufs_[cur_];
    const auto ci = static_cast<std::size_t>(c);
    if (!b.present[ci][slot]) {
      throw std::logic_error(std::string("no message on ") + channel_name(c) + " slot " +
                             std::to_string(slot));
    }
    return b.data[ci][slot];
  }

  std::span<double> write(Channel c, int slot, std::size_t size) {
    Buffer& b = bufs_[1 - cur_];
    const auto ci = static_cast<std::size_t>(c);
    b.present[ci][slot] = 1;
    b.data[ci][slot].resize(size);
    return b.data[ci][slot];
  }

  void barrier() {
    cur_ = 1 - cur_;
    for (auto& ch : bufs_[1 - cur_].present) std::fill(ch.begin(), ch.end(), 0);
  }

 private:
  struct Buffer {
    std::array<std::vector<std::vector<double>>, 3> data;
    std::array<std::vector<char>, 3> present;  // char, not bool: written concurrently
  };
  std::array<Buffer, 2> bufs_;
  int cur_ = 0;
};

// ---------------------------------------------------------------- contexts

int NodeContext::own_slot(int e) const {
  if (e < 0 || e >= g_.num_edges()) throw LocalityError("edge index out of range");
  const int side = g_.side_of(e, node_);
  if (side < 0) {
    throw LocalityError("node " + std::to_string(node_) + " is not an endpoint of edge " +
                        std::to_string(e));
  }
  return extended_index(e, side);
}

std::span<const double> NodeContext::from_edge(int e) const {
  const int slot = own_slot(e);
  if (log_) log_->push_back({AgentKind::Node, node_, false, Channel::EdgeToNode, slot});
  return box_.read(Channel::EdgeToNode, slot);
}

std::span<const double> NodeContext::from_peer(int j) const {
  const int e = g_.find_edge(node_, j);
  if (e < 0) {
    throw LocalityError("node " + std::to_string(node_) + " is not adjacent to " + std::to_string(j));
  }
  // The sender's slot: j's side of the shared edge.
  const int slot = extended_index(e, 1 - g_.side_of(e, node_));
  if (log_) log_->push_back({AgentKind::Node, node_, false, Channel::NodeToPeer, slot});
  return box_.read(Channel::NodeToPeer, slot);
}

std::span<double> NodeContext::to_edge(int e, std::size_t size) {
  const int slot = own_slot(e);
  if (log_) log_->push_back({AgentKind::Node, node_, true, Channel::NodeToEdge, slot});
  return box_.write(Channel::NodeToEdge, slot, size);
}

std::span<double> NodeContext::to_peer(int j, std::size_t size) {
  const int e = g_.find_edge(node_, j);
  if (e < 0) {
    throw LocalityError("node " + std::to_string(node_) + " is not adjacent to " + std::to_string(j));
  }
  const int slot = own_slot(e);
  if (log_) log_->push_back({AgentKind::Node, node_, true, Channel::NodeToPeer, slot});
  return box_.write(Channel::NodeToPeer, slot, size);
}

std::span<const double> EdgeContext::from_node(int side) const {
  if (side != 0 && side != 1) throw LocalityError("edge side must be 0 or 1");
  const int slot = extended_index(edge_, side);
  if (log_) log_->push_back({AgentKind::Edge, edge_, false, Channel::NodeToEdge, slot});
  return box_.read(Channel::NodeToEdge, slot);
}

std::span<double> EdgeContext::to_node(int side, std::size_t size) {
  if (side != 0 && side != 1) throw LocalityError("edge side must be 0 or 1");
  const int slot = extended_index(edge_, side);
  if (log_) log_->push_back({AgentKind::Edge, edge_, true, Channel::EdgeToNode, slot});
  return box_.write(Channel::EdgeToNode, slot, size);
}

void AgentProgram::node_step(int, int, NodeContext&, std::vector<double>&) const {
  throw std::logic_error(name() + " has no node phase");
}

void AgentProgram::edge_step(int, int, EdgeContext&, std::vector<double>&) const {
  throw std::logic_error(name() + " has no edge phase");
}

// ---------------------------------------------------------------- audit

bool audit_access_log(const Graph& g, std::span<const Access> log, std::string* why) {
  auto fail = [&](const Access& a, const std::string& msg) {
    if (why) {
      *why = std::string(a.kind == AgentKind::Node ? "node " : "edge ") + std::to_string(a.agent) +
             " " + (a.write ? "wrote " : "read ") + channel_name(a.channel) + " slot " +
             std::to_string(a.slot) + ": " + msg;
    }
    return false;
  };
  const int slots = 2 * g.num_edges();
  for (const Access& a : log) {
    if (a.slot < 0 || a.slot >= slots) return fail(a, "slot out of range");
    const int e = a.slot / 2;
    const int side = a.slot % 2;
    const Edge& ed = g.edge(e);
    const int owner = side == 0 ? ed.u : ed.v;
    const int other = side == 0 ? ed.v : ed.u;
    if (a.kind == AgentKind::Edge) {
      if (a.agent != e) return fail(a, "edge agent outside its own link");
      const bool ok = a.write ? a.channel == Channel::EdgeToNode : a.channel == Channel::NodeToEdge;
      if (!ok) return fail(a, "wrong direction");
      continue;
    }
    switch (a.channel) {
      case Channel::NodeToEdge:
        if (!a.write || a.agent != owner) return fail(a, "not the sending endpoint");
        break;
      case Channel::EdgeToNode:
        if (a.write || a.agent != owner) return fail(a, "not the receiving endpoint");
        break;
      case Channel::NodeToPeer:
        if (a.write ? a.agent != owner : a.agent != other) return fail(a, "not a link endpoint");
        break;
    }
  }
  return true;
}

// ---------------------------------------------------------------- workers

namespace {

// Persistent workers that split an index range into contiguous chunks. The
// calling thread takes chunk 0.
class Workers {
 public:
  explicit Workers(int threads)
      : n_(threads), start_(threads), done_(threads), errors_(static_cast<std::size_t>(threads)) {
    for (int w = 1; w < n_; ++w) pool_.emplace_back([this, w] { loop(w); });
  }

  ~Workers() {
    stop_ = true;
    if (n_ > 1) start_.arrive_and_wait();
  }

  void run(int count, const std::function<void(int)>& fn) {
    job_ = &fn;
    count_ = count;
    if (n_ > 1) start_.arrive_and_wait();
    work(0);
    if (n_ > 1) done_.arrive_and_wait();
    for (auto& err : errors_) {
      if (err) {
        std::exception_ptr e = err;
        for (auto& x : errors_) x = nullptr;
        std::rethrow_exception(e);
      }
    }
  }

 private:
  void loop(int w) {
    for (;;) {
      start_.arrive_and_wait();
      if (stop_) return;
      work(w);
      done_.arrive_and_wait();
    }
  }

  void work(int w) {
    const long lo = static_cast<long>(count_) * w / n_;
    const long hi = static_cast<long>(count_) * (w + 1) / n_;
    try {
      for (long i = lo; i < hi; ++i) (*job_)(static_cast<int>(i));
    } catch (...) {
      errors_[static_cast<std::size_t>(w)] = std::current_exception();
    }
  }

  int n_;
  std::barrier<> start_;
  std::barrier<> done_;
  std::vector<std::exception_ptr> errors_;
  std::atomic<bool> stop_{false};
  const std::function<void(int)>* job_ = nullptr;
  int count_ = 0;
  std::vector<std::jthread> pool_;  // last: joined before the barriers die
};

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

// ---------------------------------------------------------------- run

Probe problem_probe(const Problem& problem) {
  return [&problem](const Estimate& est) {
    ProbeValue pv;
    pv.error = est.copies.empty() ? problem.error(est.z) : problem.copies_error(est.copies);
    pv.objective = problem.objective(est.z);
    return pv;
  };
}

Trace run_sync(const AgentProgram& prog, const Graph& g, const StopRule& stop,
               const RunOptions& options) {
  return run_sync(prog, g, stop, problem_probe(prog.problem()), options);
}

Trace run_sync(const AgentProgram& prog, const Graph& g, const StopRule& stop, const Probe& probe,
               const RunOptions& options) {
  if (!(prog.problem().graph() == g)) throw ValidationError("program was built for a different graph");
  if (stop.max_rounds < 0) throw ValidationError("max rounds must be nonnegative");
  if (options.threads < 1) throw ValidationError("thread count must be at least 1");
  if (options.shuffle_seed && options.threads > 1) {
    throw ValidationError("shuffled evaluation order is a serial-only option");
  }

  const int n = g.num_nodes();
  const int m = g.num_edges();
  Mailbox box(2 * m);
  AgentStates st;
  st.node.assign(n, {});
  st.edge.assign(m, {});

  // Per-agent logs so parallel phases never share a vector.
  std::vector<std::vector<Access>> node_log(options.audit ? n : 0);
  std::vector<std::vector<Access>> edge_log(options.audit ? m : 0);
  Trace trace;
  auto flush_logs = [&] {
    for (auto& l : node_log) {
      trace.access_log.insert(trace.access_log.end(), l.begin(), l.end());
      l.clear();
    }
    for (auto& l : edge_log) {
      trace.access_log.insert(trace.access_log.end(), l.begin(), l.end());
      l.clear();
    }
  };

  Workers workers(options.threads);
  std::mt19937_64 shuffler(options.shuffle_seed.value_or(0));
  std::vector<int> order;
  auto for_agents = [&](int count, const std::function<void(int)>& fn) {
    if (options.shuffle_seed) {
      order.resize(static_cast<std::size_t>(count));
      std::iota(order.begin(), order.end(), 0);
      std::shuffle(order.begin(), order.end(), shuffler);
      for (int a : order) fn(a);
      return;
    }
    workers.run(count, fn);
  };

  for_agents(n, [&](int i) {
    NodeContext ctx(g, box, i, options.audit ? &node_log[i] : nullptr);
    prog.init_node(ctx, st.node[i]);
  });
  for_agents(m, [&](int e) {
    EdgeContext ctx(g, box, e, options.audit ? &edge_log[e] : nullptr);
    prog.init_edge(ctx, st.edge[e]);
  });
  box.barrier();
  flush_logs();

  trace.meta.algorithm = prog.name();
  trace.meta.parameters = prog.parameters();
  trace.meta.graph_hash = g.hash();
  trace.meta.seed = options.seed;

  auto wants_snapshot = [&](int t) {
    return std::find(options.snapshot_rounds.begin(), options.snapshot_rounds.end(), t) !=
           options.snapshot_rounds.end();
  };
  auto record = [&](int t) {
    const Estimate est = prog.estimate(st, t);
    const ProbeValue pv = probe(est);
    if (!std::isfinite(pv.error) || !std::isfinite(pv.objective)) {
      throw DivergenceError("non-finite error or objective", t);
    }
    trace.rows.push_back({t, pv.error, pv.objective});
    if (wants_snapshot(t)) trace.snapshots[t] = est.z;
    return pv.error;
  };

  const std::vector<AgentKind> phases = prog.phases();
  double err = record(0);
  trace.converged = stop.tolerance > 0 && err <= stop.tolerance;
  for (int t = 1; t <= stop.max_rounds && !trace.converged; ++t) {
    for (int p = 0; p < static_cast<int>(phases.size()); ++p) {
      if (phases[p] == AgentKind::Node) {
        for_agents(n, [&](int i) {
          NodeContext ctx(g, box, i, options.audit ? &node_log[i] : nullptr);
          prog.node_step(p, t, ctx, st.node[i]);
        });
      } else {
        for_agents(m, [&](int e) {
          EdgeContext ctx(g, box, e, options.audit ? &edge_log[e] : nullptr);
          prog.edge_step(p, t, ctx, st.edge[e]);
        });
      }
      box.barrier();
      flush_logs();
    }
    for (int i = 0; i < n; ++i) {
      if (!all_finite(st.node[i])) throw DivergenceError("non-finite state at node " + std::to_string(i), t);
    }
    for (int e = 0; e < m; ++e) {
      if (!all_finite(st.edge[e])) throw DivergenceError("non-finite state at edge " + std::to_string(e), t);
    }
    err = record(t);
    trace.converged = stop.tolerance > 0 && err <= stop.tolerance;
  }
  trace.final_states = std::move(st);
  return trace;
}

int threads_from_env(int fallback) {
  const char* v = std::getenv("CONSENSUS_LAB_THREADS");
  if (!v || !*v) return fallback;
  char* end = nullptr;
  const long k = std::strtol(v, &end, 10);
  if (*end != '\0' || k < 1 || k > 1024) {
    throw ValidationError(std::string("CONSENSUS_LAB_THREADS must be a positive integer, got '") + v + "'");
  }
  return static_cast<int>(k);
}

// ---------------------------------------------------------------- CSV

void write_trace_csv(std::ostream& out, const Trace& trace) {
  out << "t,error,objective\n";
  char buf[96];
  for (const TraceRow& r : trace.rows) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", r.t, r.error, r.objective);
    out << buf;
  }
}

std::vector<TraceRow> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("trace is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t,error,objective") throw ValidationError("line 1: expected header t,error,objective");
  std::vector<TraceRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string a, b, c, extra;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c, ',') ||
        std::getline(ss, extra, ',')) {
      throw ValidationError("line " + std::to_string(lineno) + ": expected three fields");
    }
    TraceRow r;
    try {
      std::size_t used = 0;
      r.t = std::stoi(a, &used);
      if (used != a.size()) throw std::invalid_argument(a);
      r.error = std::stod(b, &used);
      if (used != b.size()) throw std::invalid_argument(b);
      r.objective = std::stod(c, &used);
      if (used != c.size()) throw std::invalid_argument(c);
    } catch (const std::exception&) {
      throw ValidationError("line " + std::to_string(lineno) + ": malformed number");
    }
    if (!rows.empty() && r.t <= rows.back().t) {
      throw ValidationError("line " + std::to_string(lineno) + ": rounds must increase");
    }
    if (r.error < 0) throw ValidationError("line " + std::to_string(lineno) + ": negative error");
    rows.push_back(r);
  }
  return rows;
}

}  // namespace consensus_lab
