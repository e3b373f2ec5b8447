#include "consensus_lab/algorithms.hpp"

#include <cmath>
#include <string>

#include "consensus_lab/error.hpp"
#include "consensus_lab/spectral.hpp"

namespace consensus_lab {

namespace {

using Eigen::VectorXd;
using ConstMap = Eigen::Map<const VectorXd>;
using Map = Eigen::Map<VectorXd>;

void check_initial(const Problem& problem, std::span<const double> z0) {
  if (static_cast<int>(z0.size()) != problem.size()) {
    throw ValidationError("initial point has " + std::to_string(z0.size()) + " entries, expected " +
                          std::to_string(problem.size()));
  }
  for (double v : z0) {
    if (!std::isfinite(v)) throw ValidationError("initial point is not finite");
  }
}

std::vector<QuadraticShard> shards_or_throw(const Problem& problem, const std::string& alg) {
  auto shards = problem.node_shards();
  if (!shards) throw ValidationError(alg + " needs a quadratic objective; " + problem.name() + " is not");
  return std::move(*shards);
}

// Node i's own entries copied into every block of a full-length vector.
VectorXd broadcast_own(std::span<const double> z0, int i, int n, int k) {
  VectorXd x(n * k);
  for (int j = 0; j < n; ++j) {
    for (int c = 0; c < k; ++c) x(j * k + c) = z0[static_cast<std::size_t>(i * k + c)];
  }
  return x;
}

// Node i's estimate of its own coordinates, taken from its full copy.
std::vector<double> own_blocks(const std::vector<VectorXd>& copies, int k) {
  const int n = static_cast<int>(copies.size());
  std::vector<double> z(static_cast<std::size_t>(n * k));
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < k; ++c) z[static_cast<std::size_t>(i * k + c)] = copies[i](i * k + c);
  }
  return z;
}

std::vector<double> concat_states(const AgentStates& st, int width) {
  std::vector<double> z;
  z.reserve(st.node.size() * static_cast<std::size_t>(width));
  for (const auto& s : st.node) z.insert(z.end(), s.begin(), s.begin() + width);
  return z;
}

// ---------------------------------------------------------------- GD

class GdProgram : public AgentProgram {
 public:
  GdProgram(const Problem& p, double alpha, std::span<const double> z0)
      : problem_(p), alpha_(alpha), z0_(z0.begin(), z0.end()) {}

  std::string name() const override { return "gd"; }
  const Problem& problem() const override { return problem_; }
  std::map<std::string, double> parameters() const override { return {{"alpha", alpha_}}; }
  std::vector<AgentKind> phases() const override { return {AgentKind::Edge, AgentKind::Node}; }

  void init_node(NodeContext& ctx, std::vector<double>& s) const override {
    const int k = problem_.dim();
    s.assign(z0_.begin() + ctx.id() * k, z0_.begin() + (ctx.id() + 1) * k);
    broadcast(ctx, s);
  }

  void edge_step(int, int, EdgeContext& ctx, std::vector<double>&) const override {
    const int k = problem_.dim();
    const auto zi = ctx.from_node(0);
    const auto zj = ctx.from_node(1);
    std::span<double> gi = ctx.to_node(0, k);
    std::span<double> gj = ctx.to_node(1, k);
    problem_.edge_gradient(ctx.id(), zi, zj, gi, gj);
  }

  void node_step(int, int, NodeContext& ctx, std::vector<double>& s) const override {
    const int k = problem_.dim();
    std::vector<double> sum(k, 0.0);
    for (const Neighbor& nb : ctx.neighbors()) {
      const auto g = ctx.from_edge(nb.edge);
      for (int c = 0; c < k; ++c) sum[c] += g[c];
    }
    for (int c = 0; c < k; ++c) s[c] -= alpha_ * sum[c];
    broadcast(ctx, s);
  }

  Estimate estimate(const AgentStates& st, int) const override {
    return {concat_states(st, problem_.dim()), {}};
  }

 private:
  void broadcast(NodeContext& ctx, const std::vector<double>& s) const {
    for (const Neighbor& nb : ctx.neighbors()) {
      auto out = ctx.to_edge(nb.edge, s.size());
      std::copy(s.begin(), s.end(), out.begin());
    }
  }

  const Problem& problem_;
  double alpha_;
  std::vector<double> z0_;
};

// ---------------------------------------------------------------- ADMM, edge agents

class AdmmEdgeProgram : public AgentProgram {
 public:
  AdmmEdgeProgram(const Problem& p, double rho, double gamma, std::span<const double> z0)
      : problem_(p), rho_(rho), gamma_(gamma), z0_(z0.begin(), z0.end()) {}

  std::string name() const override { return "admm"; }
  const Problem& problem() const override { return problem_; }
  std::map<std::string, double> parameters() const override {
    return {{"rho", rho_}, {"gamma", gamma_}};
  }
  std::vector<AgentKind> phases() const override { return {AgentKind::Edge, AgentKind::Node}; }

  void init_node(NodeContext& ctx, std::vector<double>& s) const override {
    const int k = problem_.dim();
    s.resize(2 * k);
    for (int c = 0; c < k; ++c) s[c] = s[k + c] = z0_[ctx.id() * k + c];
    broadcast(ctx, s);
  }

  void init_edge(EdgeContext&, std::vector<double>& s) const override {
    s.assign(4 * problem_.dim(), 0.0);
  }

  void edge_step(int, int round, EdgeContext& ctx, std::vector<double>& s) const override {
    const int k = problem_.dim();
    double* x = s.data();
    double* u = s.data() + 2 * k;
    std::span<const double> msg[2] = {ctx.from_node(0), ctx.from_node(1)};
    if (round == 1) {
      for (int side = 0; side < 2; ++side) {
        for (int c = 0; c < k; ++c) x[side * k + c] = msg[side][c];
      }
    }
    std::vector<double> ref(2 * k);
    for (int side = 0; side < 2; ++side) {
      for (int c = 0; c < k; ++c) {
        const int a = side * k + c;
        const double z = msg[side][c];
        const double zprev = msg[side][k + c];
        u[a] = u[a] + gamma_ * x[a] - z + (1.0 - gamma_) * zprev;
        ref[a] = z - u[a];
      }
    }
    problem_.edge_prox(ctx.id(), std::span<const double>(ref.data(), k),
                       std::span<const double>(ref.data() + k, k), rho_, std::span<double>(x, k),
                       std::span<double>(x + k, k));
    for (int side = 0; side < 2; ++side) {
      auto out = ctx.to_node(side, k);
      for (int c = 0; c < k; ++c) out[c] = gamma_ * x[side * k + c] + u[side * k + c];
    }
  }

  void node_step(int, int, NodeContext& ctx, std::vector<double>& s) const override {
    const int k = problem_.dim();
    std::vector<double> sum(k, 0.0);
    for (const Neighbor& nb : ctx.neighbors()) {
      const auto m = ctx.from_edge(nb.edge);
      for (int c = 0; c < k; ++c) sum[c] += m[c];
    }
    const double inv_deg = 1.0 / ctx.degree();
    for (int c = 0; c < k; ++c) {
      const double z = s[c];
      s[c] = (1.0 - gamma_) * z + inv_deg * sum[c];
      s[k + c] = z;
    }
    broadcast(ctx, s);
  }

  Estimate estimate(const AgentStates& st, int) const override {
    return {concat_states(st, problem_.dim()), {}};
  }

 private:
  void broadcast(NodeContext& ctx, const std::vector<double>& s) const {
    for (const Neighbor& nb : ctx.neighbors()) {
      auto out = ctx.to_edge(nb.edge, s.size());
      std::copy(s.begin(), s.end(), out.begin());
    }
  }

  const Problem& problem_;
  double rho_, gamma_;
  std::vector<double> z0_;
};

// ---------------------------------------------------------------- full-copy programs

class FullCopyBase : public AgentProgram {
 public:
  FullCopyBase(const Problem& p, std::vector<QuadraticShard> shards)
      : problem_(p), shards_(std::move(shards)), N_(p.size()) {}
  const Problem& problem() const override { return problem_; }

 protected:
  const Problem& problem_;
  std::vector<QuadraticShard> shards_;
  int N_;
  std::vector<Eigen::LDLT<Eigen::MatrixXd>> solvers_;
};

class AdmmConsensusProgram : public FullCopyBase {
 public:
  AdmmConsensusProgram(const Problem& p, double rho, double gamma, std::span<const double> z0)
      : FullCopyBase(p, shards_or_throw(p, "consensus ADMM")), rho_(rho), gamma_(gamma),
        z0_(z0.begin(), z0.end()) {
    const Graph& g = p.graph();
    for (int i = 0; i < g.num_nodes(); ++i) {
      const Eigen::MatrixXd lhs =
          shards_[i].H + rho_ * g.degree(i) * Eigen::MatrixXd::Identity(N_, N_);
      solvers_.emplace_back(lhs);
    }
  }

  std::string name() const override { return "admm-consensus"; }
  std::map<std::string, double> parameters() const override {
    return {{"rho", rho_}, {"gamma", gamma_}};
  }
  std::vector<AgentKind> phases() const override { return {AgentKind::Node, AgentKind::Node}; }

  // Layout: x | per neighbor q: z_q, u_q, xhat_q.
  void init_node(NodeContext& ctx, std::vector<double>& s) const override {
    s.assign(static_cast<std::size_t>(N_) * (1 + 3 * ctx.degree()), 0.0);
    Map x(s.data(), N_);
    x = broadcast_own(z0_, ctx.id(), problem_.graph().num_nodes(), problem_.dim());
    for (const Neighbor& nb : ctx.neighbors()) {
      Map(ctx.to_peer(nb.node, N_).data(), N_) = x;
    }
  }

  // Phase 0: x-update and relaxed copies. Phase 1: consensus variable and
  // dual per edge. The first round seeds z_e with the average of the two
  // initial copies and u = 0.
  void node_step(int phase, int round, NodeContext& ctx, std::vector<double>& s) const override {
    const int i = ctx.id();
    const auto nbs = ctx.neighbors();
    const int d = static_cast<int>(nbs.size());
    Map x(s.data(), N_);
    if (phase == 0) {
      if (round == 1) {
        for (int q = 0; q < d; ++q) {
          Map(block(s, q, 0), N_) = ordered_mean(i, x, nbs[q].node, ConstMap(ctx.from_peer(nbs[q].node).data(), N_));
        }
      }
      VectorXd rhs = shards_[i].b;
      for (int q = 0; q < d; ++q) {
        rhs += rho_ * (ConstMap(block(s, q, 0), N_) - ConstMap(block(s, q, 1), N_));
      }
      x = solvers_[i].solve(rhs);
      for (int q = 0; q < d; ++q) {
        Map xhat(block(s, q, 2), N_);
        xhat = gamma_ * x + (1.0 - gamma_) * ConstMap(block(s, q, 0), N_);
        Map(ctx.to_peer(nbs[q].node, N_).data(), N_) = xhat + ConstMap(block(s, q, 1), N_);
      }
      return;
    }
    for (int q = 0; q < d; ++q) {
      const ConstMap xhat(block(s, q, 2), N_);
      Map z(block(s, q, 0), N_), u(block(s, q, 1), N_);
      const VectorXd wi = xhat + u;
      z = ordered_mean(i, wi, nbs[q].node, ConstMap(ctx.from_peer(nbs[q].node).data(), N_));
      u += xhat - z;
    }
  }

  // A node's copy is the mean of the consensus variables on its edges.
  Estimate estimate(const AgentStates& st, int round) const override {
    std::vector<VectorXd> copies;
    for (const auto& s : st.node) {
      if (round == 0) {
        copies.emplace_back(ConstMap(s.data(), N_));
        continue;
      }
      const int d = static_cast<int>((s.size() / N_ - 1) / 3);
      VectorXd c = VectorXd::Zero(N_);
      for (int q = 0; q < d; ++q) c += ConstMap(block(s, q, 0), N_);
      copies.push_back(c / d);
    }
    return {own_blocks(copies, problem_.dim()), copies};
  }

 private:
  // Both endpoints add in the same order so they agree bitwise.
  static VectorXd ordered_mean(int i, const VectorXd& own, int j, const ConstMap& theirs) {
    return i < j ? VectorXd(0.5 * (own + theirs)) : VectorXd(0.5 * (theirs + own));
  }
  double* block(std::vector<double>& s, int q, int which) const {
    return s.data() + static_cast<std::size_t>(N_) * (1 + 3 * q + which);
  }
  const double* block(const std::vector<double>& s, int q, int which) const {
    return s.data() + static_cast<std::size_t>(N_) * (1 + 3 * q + which);
  }

  double rho_, gamma_;
  std::vector<double> z0_;
};

class PdmmProgram : public FullCopyBase {
 public:
  PdmmProgram(const Problem& p, double rho, double alpha, std::span<const double> z0)
      : FullCopyBase(p, shards_or_throw(p, "PDMM")), rho_(rho), alpha_(alpha),
        z0_(z0.begin(), z0.end()) {
    const Graph& g = p.graph();
    for (int i = 0; i < g.num_nodes(); ++i) {
      const Eigen::MatrixXd lhs =
          shards_[i].H + rho_ * g.degree(i) * Eigen::MatrixXd::Identity(N_, N_);
      solvers_.emplace_back(lhs);
    }
  }

  std::string name() const override { return "pdmm"; }
  std::map<std::string, double> parameters() const override {
    return {{"rho", rho_}, {"alpha", alpha_}};
  }
  std::vector<AgentKind> phases() const override { return {AgentKind::Node}; }

  // Layout: x | u_{i,j} per neighbor j (ascending).
  void init_node(NodeContext& ctx, std::vector<double>& s) const override {
    s.assign(static_cast<std::size_t>(N_) * (1 + ctx.degree()), 0.0);
    Map(s.data(), N_) = broadcast_own(z0_, ctx.id(), problem_.graph().num_nodes(), problem_.dim());
    send(ctx, s);
  }

  void node_step(int, int, NodeContext& ctx, std::vector<double>& s) const override {
    const int i = ctx.id();
    const auto nbs = ctx.neighbors();
    const int d = static_cast<int>(nbs.size());
    VectorXd avg = VectorXd::Zero(N_);
    for (const Neighbor& nb : nbs) {
      const auto msg = ctx.from_peer(nb.node);
      avg += ConstMap(msg.data(), N_) - ConstMap(msg.data() + N_, N_);
    }
    avg /= d;
    const VectorXd x_new = solvers_[i].solve(shards_[i].b + rho_ * d * avg);
    for (int q = 0; q < d; ++q) {
      const auto msg = ctx.from_peer(nbs[q].node);
      const ConstMap xj(msg.data(), N_), uji(msg.data() + N_, N_);
      Map u(s.data() + static_cast<std::size_t>(N_) * (1 + q), N_);
      u = (1.0 - alpha_) * u - alpha_ * (uji + x_new - xj);
    }
    Map(s.data(), N_) = x_new;
    send(ctx, s);
  }

  Estimate estimate(const AgentStates& st, int) const override {
    std::vector<VectorXd> copies;
    for (const auto& s : st.node) copies.emplace_back(ConstMap(s.data(), N_));
    return {own_blocks(copies, problem_.dim()), copies};
  }

 private:
  void send(NodeContext& ctx, const std::vector<double>& s) const {
    const auto nbs = ctx.neighbors();
    for (int q = 0; q < static_cast<int>(nbs.size()); ++q) {
      auto out = ctx.to_peer(nbs[q].node, 2 * static_cast<std::size_t>(N_));
      std::copy(s.begin(), s.begin() + N_, out.begin());
      std::copy(s.begin() + static_cast<std::ptrdiff_t>(N_) * (1 + q),
                s.begin() + static_cast<std::ptrdiff_t>(N_) * (2 + q), out.begin() + N_);
    }
  }

  double rho_, alpha_;
  std::vector<double> z0_;
};

class MsdaProgram : public FullCopyBase {
 public:
  MsdaProgram(const Problem& p, int K, double eta, double sigma, MsdaOutput output)
      : FullCopyBase(p, shards_or_throw(p, "MSDA")), eta_(eta), sigma_(sigma), output_(output),
        cheb_(make_filter(p.graph(), K)) {
    for (int i = 0; i < p.graph().num_nodes(); ++i) {
      const Eigen::MatrixXd lhs = shards_[i].H + (1.0 / eta_) * Eigen::MatrixXd::Identity(N_, N_);
      solvers_.emplace_back(lhs);
    }
  }

  std::string name() const override { return "msda"; }
  std::map<std::string, double> parameters() const override {
    return {{"K", cheb_.degree()}, {"eta", eta_}, {"sigma", sigma_}};
  }
  std::vector<AgentKind> phases() const override {
    return std::vector<AgentKind>(static_cast<std::size_t>(cheb_.degree()), AgentKind::Node);
  }

  enum Slot { Theta, ThetaPrev, Y, V, BPrev, BCur, Acc, Slots };

  void init_node(NodeContext& ctx, std::vector<double>& s) const override {
    s.assign(static_cast<std::size_t>(N_) * Slots, 0.0);
    send(ctx, s);
  }

  // Phase p holds b_p and the neighbors' b_p; the last phase also takes the
  // dual and primal steps and starts the next filter.
  void node_step(int p, int, NodeContext& ctx, std::vector<double>& s) const override {
    const int i = ctx.id();
    Map bprev(at(s, BPrev), N_), bcur(at(s, BCur), N_);
    VectorXd wb = static_cast<double>(ctx.degree()) * bcur;
    for (const Neighbor& nb : ctx.neighbors()) wb -= ConstMap(ctx.from_peer(nb.node).data(), N_);
    VectorXd next;
    if (cheb_.degenerate()) {
      next = p == 0 ? VectorXd(bcur - wb * cheb_.shift()) : VectorXd(bcur);
    } else {
      const auto [a, r] = cheb_.step(p);
      next = a * (cheb_.center() * bcur - cheb_.shift() * wb) - r * bprev;
    }
    bprev = bcur;
    bcur = next;
    if (p + 1 < cheb_.degree()) {
      send(ctx, s);
      return;
    }
    Map theta(at(s, Theta), N_), theta_prev(at(s, ThetaPrev), N_), y(at(s, Y), N_), v(at(s, V), N_),
        acc(at(s, Acc), N_);
    y -= sigma_ * (v - bcur);
    const VectorXd theta_new = solvers_[i].solve(shards_[i].b + y + theta / eta_);
    theta_prev = theta;
    theta = theta_new;
    acc += theta;
    v = 2.0 * theta - theta_prev;
    bprev.setZero();
    bcur = v;
    send(ctx, s);
  }

  Estimate estimate(const AgentStates& st, int round) const override {
    const int n = static_cast<int>(st.node.size());
    Estimate est;
    if (output_ == MsdaOutput::Average) {
      // theta^1 = 0 is part of the average, so after `round` rounds it spans
      // round + 1 iterates.
      VectorXd sum = VectorXd::Zero(N_);
      for (const auto& s : st.node) sum += ConstMap(s.data() + static_cast<std::size_t>(N_) * Acc, N_);
      sum /= static_cast<double>(round + 1) * n;
      est.z.assign(sum.data(), sum.data() + N_);
      return est;
    }
    VectorXd mean = VectorXd::Zero(N_);
    for (const auto& s : st.node) {
      est.copies.emplace_back(ConstMap(s.data(), N_));
      mean += est.copies.back();
    }
    mean /= n;
    est.z.assign(mean.data(), mean.data() + N_);
    return est;
  }

 private:
  static ChebyshevGossip make_filter(const Graph& g, int K) {
    const SpectralSummary s = spectral_summary(g);
    return ChebyshevGossip(K, s.omega_L, s.lambda1_L);
  }
  double* at(std::vector<double>& s, Slot k) const { return s.data() + static_cast<std::size_t>(N_) * k; }

  void send(NodeContext& ctx, const std::vector<double>& s) const {
    const double* b = s.data() + static_cast<std::size_t>(N_) * BCur;
    for (const Neighbor& nb : ctx.neighbors()) {
      auto out = ctx.to_peer(nb.node, N_);
      std::copy(b, b + N_, out.begin());
    }
  }

  double eta_, sigma_;
  MsdaOutput output_;
  ChebyshevGossip cheb_;
};

}  // namespace

// ---------------------------------------------------------------- Chebyshev

ChebyshevGossip::ChebyshevGossip(int K, double lo, double hi) : K_(K), lo_(lo), hi_(hi) {
  if (K < 1) throw ValidationError("Chebyshev degree must be at least 1");
  if (!(lo > 0) || !(hi >= lo) || !std::isfinite(hi)) {
    throw ValidationError("Chebyshev interval must satisfy 0 < lo <= hi");
  }
  if (hi - lo <= 1e-9 * hi) {
    degenerate_ = true;
    c0_ = 1.0;
    s_ = 1.0 / hi;
    return;
  }
  c0_ = (hi + lo) / (hi - lo);
  s_ = 2.0 / (hi - lo);
  // q_k = T_k(c0) / T_{k+1}(c0), kept as ratios so large K does not overflow.
  std::vector<double> q(static_cast<std::size_t>(K));
  q[0] = 1.0 / c0_;
  for (int k = 1; k < K; ++k) q[k] = 1.0 / (2.0 * c0_ - q[k - 1]);
  a_.resize(K);
  r_.resize(K);
  a_[0] = q[0];
  r_[0] = 0.0;
  for (int k = 1; k < K; ++k) {
    a_[k] = 2.0 * q[k];
    r_[k] = q[k - 1] * q[k];
  }
}

double ChebyshevGossip::value(double lambda) const {
  if (degenerate_) return lambda / hi_;
  double prev = 0.0, cur = 1.0;
  for (int k = 0; k < K_; ++k) {
    const double next = a_[k] * (c0_ - s_ * lambda) * cur - r_[k] * prev;
    prev = cur;
    cur = next;
  }
  return 1.0 - cur;
}

Eigen::MatrixXd ChebyshevGossip::apply(const Eigen::MatrixXd& W, const Eigen::MatrixXd& X) const {
  if (W.rows() != W.cols() || W.cols() != X.rows()) throw ValidationError("gossip dimension mismatch");
  if (degenerate_) return W * X / hi_;
  Eigen::MatrixXd prev = Eigen::MatrixXd::Zero(X.rows(), X.cols());
  Eigen::MatrixXd cur = X;
  for (int k = 0; k < K_; ++k) {
    Eigen::MatrixXd next = a_[k] * (c0_ * cur - s_ * (W * cur)) - r_[k] * prev;
    prev = std::move(cur);
    cur = std::move(next);
  }
  return X - cur;
}

Eigen::MatrixXd chebyshev_gossip(const Eigen::MatrixXd& W, int K, double lo, double hi,
                                 const Eigen::MatrixXd& states) {
  return ChebyshevGossip(K, lo, hi).apply(W, states);
}

// ---------------------------------------------------------------- factories

std::unique_ptr<AgentProgram> make_gd(const Problem& problem, double alpha,
                                      std::span<const double> z0) {
  if (!(alpha > 0) || !std::isfinite(alpha)) throw ValidationError("GD step size must be positive");
  check_initial(problem, z0);
  // Surface unsupported objectives now rather than in the first round.
  const int k = problem.dim();
  const Edge& e = problem.graph().edge(0);
  std::vector<double> gi(k), gj(k);
  problem.edge_gradient(0, z0.subspan(e.u * k, k), z0.subspan(e.v * k, k), gi, gj);
  return std::make_unique<GdProgram>(problem, alpha, z0);
}

std::unique_ptr<AgentProgram> make_admm_edge(const Problem& problem, double rho, double gamma,
                                             std::span<const double> z0) {
  if (!(rho > 0) || !std::isfinite(rho)) throw ValidationError("ADMM penalty rho must be positive");
  if (!(gamma > 0 && gamma <= 2)) throw ValidationError("ADMM relaxation gamma must lie in (0, 2]");
  check_initial(problem, z0);
  return std::make_unique<AdmmEdgeProgram>(problem, rho, gamma, z0);
}

std::unique_ptr<AgentProgram> make_admm_consensus(const Problem& problem, double rho, double gamma,
                                                  std::span<const double> z0) {
  if (!(rho > 0) || !std::isfinite(rho)) throw ValidationError("ADMM penalty rho must be positive");
  if (!(gamma > 0 && gamma < 2)) throw ValidationError("ADMM relaxation gamma must lie in (0, 2)");
  check_initial(problem, z0);
  return std::make_unique<AdmmConsensusProgram>(problem, rho, gamma, z0);
}

std::unique_ptr<AgentProgram> make_pdmm(const Problem& problem, double rho, double alpha,
                                        std::span<const double> z0) {
  if (!(rho > 0) || !std::isfinite(rho)) throw ValidationError("PDMM penalty rho must be positive");
  if (!(alpha > 0 && alpha <= 1)) throw ValidationError("PDMM averaging alpha must lie in (0, 1]");
  check_initial(problem, z0);
  return std::make_unique<PdmmProgram>(problem, rho, alpha, z0);
}

std::unique_ptr<AgentProgram> make_msda(const Problem& problem, int K, double eta, double sigma,
                                        MsdaOutput output) {
  if (K < 1) throw ValidationError("MSDA gossip degree K must be at least 1");
  if (!(eta > 0) || !(sigma > 0) || !std::isfinite(eta) || !std::isfinite(sigma)) {
    throw ValidationError("MSDA step sizes eta and sigma must be positive");
  }
  return std::make_unique<MsdaProgram>(problem, K, eta, sigma, output);
}

}  // namespace consensus_lab
