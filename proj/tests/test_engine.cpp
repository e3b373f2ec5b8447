#include <gtest/gtest.h>

#include <cstdlib>
#include <cstring>
#include <sstream>

#include "consensus_lab/algorithms.hpp"
#include "consensus_lab/engine.hpp"
#include "consensus_lab/error.hpp"
#include "consensus_lab/rng.hpp"
#include "oracles/dense.hpp"

using namespace consensus_lab;

namespace {

std::vector<double> random_vector(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

// Keeps z fixed; still exchanges messages so the round has real traffic.
class IdleProgram : public AgentProgram {
 public:
  IdleProgram(const Problem& p, std::vector<double> z0) : p_(p), z0_(std::move(z0)) {}
  std::string name() const override { return "idle"; }
  const Problem& problem() const override { return p_; }
  std::map<std::string, double> parameters() const override { return {}; }
  std::vector<AgentKind> phases() const override { return {AgentKind::Node}; }
  void init_node(NodeContext& ctx, std::vector<double>& s) const override {
    s = {z0_[ctx.id()]};
    for (const auto& nb : ctx.neighbors()) ctx.to_peer(nb.node, 1)[0] = s[0];
  }
  void node_step(int, int, NodeContext& ctx, std::vector<double>& s) const override {
    for (const auto& nb : ctx.neighbors()) {
      (void)ctx.from_peer(nb.node);
      ctx.to_peer(nb.node, 1)[0] = s[0];
    }
  }
  Estimate estimate(const AgentStates& st, int) const override {
    std::vector<double> z;
    for (const auto& s : st.node) z.push_back(s[0]);
    return {z, {}};
  }

 private:
  const Problem& p_;
  std::vector<double> z0_;
};

// Node 0 tries to read from a node it is not adjacent to.
class NosyProgram : public IdleProgram {
 public:
  using IdleProgram::IdleProgram;
  void node_step(int p, int t, NodeContext& ctx, std::vector<double>& s) const override {
    if (ctx.id() == 0) (void)ctx.from_peer(2);
    IdleProgram::node_step(p, t, ctx, s);
  }
};

bool bitwise_equal(const Trace& a, const Trace& b) {
  if (a.rows.size() != b.rows.size()) return false;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    if (a.rows[i].t != b.rows[i].t) return false;
    if (std::memcmp(&a.rows[i].error, &b.rows[i].error, sizeof(double)) != 0) return false;
    if (std::memcmp(&a.rows[i].objective, &b.rows[i].objective, sizeof(double)) != 0) return false;
  }
  return a.final_states.node == b.final_states.node && a.final_states.edge == b.final_states.edge;
}

}  // namespace

TEST(Engine, IdleProgramKeepsErrorConstant) {
  const CanonicalProblem prob(gen_ring(6), 0.0);
  const IdleProgram prog(prob, random_vector(6, 1));
  const Trace tr = run_sync(prog, prob.graph(), {10, 0.0});
  ASSERT_EQ(tr.rows.size(), 11u);
  for (const auto& r : tr.rows) EXPECT_EQ(r.error, tr.rows[0].error);
  EXPECT_EQ(tr.rows.front().t, 0);
  EXPECT_EQ(tr.rows.back().t, 10);
}

TEST(Engine, GdMatchesDensePowerIteration) {
  const Graph g = gen_ring(4);
  const CanonicalProblem prob(g, 0.0);
  const std::vector<double> z0{1.0, -0.5, 2.0, 0.25};
  const double alpha = 0.3;
  auto prog = make_gd(prob, alpha, z0);
  RunOptions opt;
  for (int t = 0; t <= 25; ++t) opt.snapshot_rounds.push_back(t);
  const Trace tr = run_sync(*prog, g, {25, 0.0}, opt);

  const Eigen::MatrixXd T = Eigen::MatrixXd::Identity(4, 4) - alpha * oracle::laplacian(g);
  const auto ref = oracle::power_iterates(T, Eigen::Map<const Eigen::VectorXd>(z0.data(), 4), 25);
  for (int t = 0; t <= 25; ++t) {
    const auto& z = tr.snapshots.at(t);
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(z[i], ref[t](i), 1e-12) << "round " << t;
    EXPECT_NEAR(tr.rows[t].error, (ref[t].array() - ref[t].mean()).matrix().norm(), 1e-12);
  }
}

TEST(Engine, DeterministicAcrossRunsThreadsAndOrder) {
  const Graph g = gen_er(14, 0.35, 3);
  Eigen::VectorXd c = Eigen::VectorXd::LinSpaced(14, -1, 1);
  const CanonicalProblem prob(g, 1e-3, c);
  const auto z0 = random_vector(14, 8);
  auto admm = make_admm_edge(prob, 1.3, 1.4, z0);
  auto pdmm = make_pdmm(prob, 0.8, 0.5, z0);
  for (const AgentProgram* prog : {admm.get(), pdmm.get()}) {
    const Trace a = run_sync(*prog, g, {60, 0.0});
    const Trace b = run_sync(*prog, g, {60, 0.0});
    RunOptions par;
    par.threads = 3;
    const Trace c3 = run_sync(*prog, g, {60, 0.0}, par);
    RunOptions shuf;
    shuf.shuffle_seed = 77;
    const Trace s = run_sync(*prog, g, {60, 0.0}, shuf);
    EXPECT_TRUE(bitwise_equal(a, b)) << prog->name();
    EXPECT_TRUE(bitwise_equal(a, c3)) << prog->name();
    EXPECT_TRUE(bitwise_equal(a, s)) << prog->name();
  }
}

TEST(Engine, StopsAtTolerance) {
  const CanonicalProblem prob(gen_ring(5), 0.0);
  auto prog = make_gd(prob, 0.3, random_vector(5, 4));
  const Trace tr = run_sync(*prog, prob.graph(), {1000, 1e-6});
  EXPECT_TRUE(tr.converged);
  EXPECT_LE(tr.rows.back().error, 1e-6);
  EXPECT_GT(tr.rows[tr.rows.size() - 2].error, 1e-6);
}

TEST(Engine, DivergenceReportsRound) {
  const CanonicalProblem prob(gen_ring(5), 0.0);
  auto prog = make_gd(prob, 5.0, random_vector(5, 4));
  try {
    run_sync(*prog, prob.graph(), {5000, 0.0});
    FAIL() << "expected divergence";
  } catch (const DivergenceError& e) {
    EXPECT_GT(e.round(), 10);
  }
}

TEST(Engine, LocalityViolationIsCaught) {
  const CanonicalProblem prob(gen_ring(5), 0.0);
  const NosyProgram prog(prob, random_vector(5, 1));
  EXPECT_THROW(run_sync(prog, prob.graph(), {3, 0.0}), LocalityError);
  RunOptions par;
  par.threads = 2;
  EXPECT_THROW(run_sync(prog, prob.graph(), {3, 0.0}, par), LocalityError);
}

TEST(Engine, AuditAcceptsEveryProgram) {
  const Graph g = gen_khop(8, 2);
  const CanonicalProblem prob(g, 1e-2, Eigen::VectorXd::LinSpaced(8, 0, 1));
  const auto z0 = random_vector(8, 2);
  std::vector<std::unique_ptr<AgentProgram>> progs;
  progs.push_back(make_gd(prob, 0.1, z0));
  progs.push_back(make_admm_edge(prob, 1.0, 1.2, z0));
  progs.push_back(make_admm_consensus(prob, 1.0, 1.2, z0));
  progs.push_back(make_pdmm(prob, 1.0, 0.5, z0));
  progs.push_back(make_msda(prob, 3, 0.5, 0.1));
  RunOptions opt;
  opt.audit = true;
  for (const auto& p : progs) {
    const Trace tr = run_sync(*p, g, {5, 0.0}, opt);
    std::string why;
    EXPECT_FALSE(tr.access_log.empty()) << p->name();
    EXPECT_TRUE(audit_access_log(g, tr.access_log, &why)) << p->name() << ": " << why;
  }
}

TEST(Engine, AuditRejectsForeignAccess) {
  const Graph g = gen_ring(5);
  // Node 3 reading the edge between 0 and 1.
  const std::vector<Access> log{{AgentKind::Node, 3, false, Channel::EdgeToNode, 0}};
  std::string why;
  EXPECT_FALSE(audit_access_log(g, log, &why));
  EXPECT_NE(why.find("node 3"), std::string::npos);
  const std::vector<Access> edge_log{{AgentKind::Edge, 1, true, Channel::EdgeToNode, 0}};
  EXPECT_FALSE(audit_access_log(g, edge_log));
}

TEST(Engine, RejectsMismatchedGraph) {
  const CanonicalProblem prob(gen_ring(5), 0.0);
  auto prog = make_gd(prob, 0.1, random_vector(5, 1));
  EXPECT_THROW(run_sync(*prog, gen_path(5), {3, 0.0}), ValidationError);
}

TEST(TraceCsv, HeaderDigitsAndRoundTrip) {
  Trace tr;
  tr.rows = {{0, 1.0 / 3.0, 2.0}, {1, 0.1, 1e-300}, {2, 0.0, -0.5}};
  std::ostringstream out;
  write_trace_csv(out, tr);
  const std::string text = out.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "t,error,objective");
  EXPECT_NE(text.find("0.33333333333333331"), std::string::npos);
  std::istringstream in(text);
  const auto back = read_trace_csv(in);
  ASSERT_EQ(back.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(back[i].t, tr.rows[i].t);
    EXPECT_EQ(back[i].error, tr.rows[i].error);
    EXPECT_EQ(back[i].objective, tr.rows[i].objective);
  }
}

TEST(TraceCsv, Malformed) {
  std::istringstream bad_header("round,error\n");
  EXPECT_THROW(read_trace_csv(bad_header), ValidationError);
  std::istringstream bad_row("t,error,objective\n0,1,2\n1,abc,2\n");
  try {
    read_trace_csv(bad_row);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  std::istringstream backwards("t,error,objective\n1,1,2\n1,0.5,2\n");
  EXPECT_THROW(read_trace_csv(backwards), ValidationError);
}

TEST(Engine, ThreadsFromEnvironment) {
  ::unsetenv("CONSENSUS_LAB_THREADS");
  EXPECT_EQ(threads_from_env(2), 2);
  ::setenv("CONSENSUS_LAB_THREADS", "4", 1);
  EXPECT_EQ(threads_from_env(), 4);
  ::setenv("CONSENSUS_LAB_THREADS", "zero", 1);
  EXPECT_THROW(threads_from_env(), ValidationError);
  ::unsetenv("CONSENSUS_LAB_THREADS");
}
