#include "consensus_lab/problems.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "consensus_lab/error.hpp"

namespace consensus_lab {

namespace {

double sq(double x) { return x * x; }

double ipow(double x, int p) { return p == 1 ? x : x * x; }

double norm_diff(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t c = 0; c < a.size(); ++c) s += sq(a[c] - b[c]);
  return std::sqrt(s);
}

std::span<const double> node_view(std::span<const double> z, int i, int k) {
  return z.subspan(static_cast<std::size_t>(i) * k, k);
}

}  // namespace

// ---------------------------------------------------------------- Problem

double Problem::copies_error(std::span<const Eigen::VectorXd>) const {
  throw ValidationError(name() + " problem does not support full-copy algorithms");
}

Eigen::VectorXd Problem::gradient(std::span<const double> z) const {
  const int k = dim();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(size());
  std::vector<double> gi(k), gj(k);
  for (int e = 0; e < graph_.num_edges(); ++e) {
    const Edge& ed = graph_.edge(e);
    edge_gradient(e, node_view(z, ed.u, k), node_view(z, ed.v, k), gi, gj);
    for (int c = 0; c < k; ++c) {
      g(ed.u * k + c) += gi[c];
      g(ed.v * k + c) += gj[c];
    }
  }
  return g;
}

// ---------------------------------------------------------------- canonical

CanonicalProblem::CanonicalProblem(Graph g, double delta, Eigen::VectorXd anchor)
    : Problem(std::move(g), 1), delta_(delta), anchor_(std::move(anchor)) {
  if (!(delta >= 0) || !std::isfinite(delta)) throw ValidationError("delta must be >= 0");
  const int n = graph().num_nodes();
  if (anchor_.size() != n) throw ValidationError("anchor length must equal the node count");
  kappa_ = delta_ * n / graph().num_edges();
  if (delta_ > 0) {
    Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
    for (const auto& [u, v] : graph().edges()) {
      lap(u, u) += 1;
      lap(v, v) += 1;
      lap(u, v) -= 1;
      lap(v, u) -= 1;
    }
    lap.diagonal().array() += kappa_;
    solution_ = lap.ldlt().solve(kappa_ * anchor_);
  }
}

CanonicalProblem::CanonicalProblem(Graph g, double delta)
    : CanonicalProblem(g, delta, Eigen::VectorXd::Ones(g.num_nodes())) {}

double CanonicalProblem::objective(std::span<const double> z) const {
  if (static_cast<int>(z.size()) != size()) throw ValidationError("iterate has the wrong length");
  double f = 0;
  for (const auto& [u, v] : graph().edges()) f += 0.5 * sq(z[u] - z[v]);
  double r = 0;
  for (int i = 0; i < graph().num_nodes(); ++i) r += sq(z[i] - anchor_(i));
  return f + 0.5 * kappa_ * r;
}

void CanonicalProblem::edge_gradient(int e, std::span<const double> zi, std::span<const double> zj,
                                     std::span<double> gi, std::span<double> gj) const {
  const Edge& ed = graph().edge(e);
  const double ki = kappa_ / graph().degree(ed.u);
  const double kj = kappa_ / graph().degree(ed.v);
  const double diff = zi[0] - zj[0];
  gi[0] = diff + ki * (zi[0] - anchor_(ed.u));
  gj[0] = -diff + kj * (zj[0] - anchor_(ed.v));
}

void CanonicalProblem::edge_prox(int e, std::span<const double> ni, std::span<const double> nj,
                                 double rho, std::span<double> xi, std::span<double> xj) const {
  const Edge& ed = graph().edge(e);
  const double ki = kappa_ / graph().degree(ed.u);
  const double kj = kappa_ / graph().degree(ed.v);
  // [[1 + ki + rho, -1], [-1, 1 + kj + rho]] x = r
  const double a = 1 + ki + rho;
  const double d = 1 + kj + rho;
  const double ri = ki * anchor_(ed.u) + rho * ni[0];
  const double rj = kj * anchor_(ed.v) + rho * nj[0];
  const double det = a * d - 1.0;
  xi[0] = (d * ri + rj) / det;
  xj[0] = (ri + a * rj) / det;
}

std::optional<std::vector<QuadraticShard>> CanonicalProblem::node_shards() const {
  const int n = graph().num_nodes();
  std::vector<QuadraticShard> shards(n, {Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd::Zero(n)});
  for (const auto& [u, v] : graph().edges()) {
    Eigen::MatrixXd& h = shards[u].H;  // u < v owns the edge
    h(u, u) += 1;
    h(v, v) += 1;
    h(u, v) -= 1;
    h(v, u) -= 1;
  }
  for (int i = 0; i < n; ++i) {
    shards[i].H(i, i) += kappa_;
    shards[i].b(i) = kappa_ * anchor_(i);
  }
  return shards;
}

double CanonicalProblem::error(std::span<const double> z) const {
  const Eigen::Map<const Eigen::VectorXd> v(z.data(), static_cast<Eigen::Index>(z.size()));
  if (solution_) return (v - *solution_).norm();
  return (v.array() - v.mean()).matrix().norm();
}

double CanonicalProblem::copies_error(std::span<const Eigen::VectorXd> copies) const {
  double worst = 0;
  if (solution_) {
    for (const auto& x : copies) worst = std::max(worst, (x - *solution_).norm());
    return worst;
  }
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(size());
  for (const auto& x : copies) mean += x;
  const double level = mean.sum() / (static_cast<double>(copies.size()) * size());
  for (const auto& x : copies) worst = std::max(worst, (x.array() - level).matrix().norm());
  return worst;
}

// ---------------------------------------------------------------- localization

LocalizationProblem::LocalizationProblem(Graph g, int k, int p, int q, std::vector<double> distances,
                                         double delta, std::vector<double> anchors)
    : Problem(std::move(g), k),
      p_(p),
      q_(q),
      delta_(delta),
      distances_(std::move(distances)),
      anchors_(std::move(anchors)) {
  if (k < 1) throw ValidationError("embedding dimension k must be >= 1");
  if ((p != 1 && p != 2) || (q != 1 && q != 2)) throw ValidationError("p and q must be 1 or 2");
  if (!(delta >= 0) || !std::isfinite(delta)) throw ValidationError("delta must be >= 0");
  if (static_cast<int>(distances_.size()) != graph().num_edges()) {
    throw ValidationError("need one distance per edge");
  }
  for (double d : distances_) {
    if (!(d >= 0) || !std::isfinite(d)) throw ValidationError("distances must be >= 0");
  }
  if (static_cast<int>(anchors_.size()) != size()) throw ValidationError("need n * k anchor values");
}

LocalizationProblem LocalizationProblem::with_defaults(Graph g, int p, int q, double delta) {
  const int m = g.num_edges();
  const int n = g.num_nodes();
  return LocalizationProblem(std::move(g), 2, p, q, std::vector<double>(m, 1.0), delta,
                             std::vector<double>(2 * n, 1.0));
}

double LocalizationProblem::edge_value(int e, std::span<const double> zi,
                                       std::span<const double> zj) const {
  const double s = ipow(norm_diff(zi, zj), p_) - ipow(distances_[e], p_);
  return ipow(std::abs(s), q_);
}

double LocalizationProblem::objective(std::span<const double> z) const {
  if (static_cast<int>(z.size()) != size()) throw ValidationError("iterate has the wrong length");
  const int k = dim();
  double f = 0;
  for (int e = 0; e < graph().num_edges(); ++e) {
    const Edge& ed = graph().edge(e);
    f += edge_value(e, node_view(z, ed.u, k), node_view(z, ed.v, k));
  }
  double r = 0;
  for (std::size_t c = 0; c < z.size(); ++c) r += sq(z[c] - anchors_[c]);
  return f + 0.5 * delta_ * graph().num_nodes() / graph().num_edges() * r;
}

void LocalizationProblem::edge_gradient(int e, std::span<const double> zi,
                                        std::span<const double> zj, std::span<double> gi,
                                        std::span<double> gj) const {
  if (p_ != 2 || q_ != 2) throw ValidationError("gradients need p = q = 2");
  const Edge& ed = graph().edge(e);
  const int k = dim();
  const double base = delta_ * graph().num_nodes() / graph().num_edges();
  const double ki = base / graph().degree(ed.u);
  const double kj = base / graph().degree(ed.v);
  double r2 = 0;
  for (int c = 0; c < k; ++c) r2 += sq(zi[c] - zj[c]);
  const double w = 4.0 * (r2 - sq(distances_[e]));
  for (int c = 0; c < k; ++c) {
    const double r = zi[c] - zj[c];
    gi[c] = w * r + ki * (zi[c] - anchors_[ed.u * k + c]);
    gj[c] = -w * r + kj * (zj[c] - anchors_[ed.v * k + c]);
  }
}

void LocalizationProblem::edge_prox(int e, std::span<const double> ni, std::span<const double> nj,
                                    double rho, std::span<double> xi, std::span<double> xj) const {
  const Edge& ed = graph().edge(e);
  const int k = dim();
  const double base = delta_ * graph().num_nodes() / graph().num_edges();
  const double ki = base / graph().degree(ed.u);
  const double kj = base / graph().degree(ed.v);
  const double ai = ki + rho;
  const double aj = kj + rho;
  std::vector<double> pi(k), pj(k);
  for (int c = 0; c < k; ++c) {
    pi[c] = (ki * anchors_[ed.u * k + c] + rho * ni[c]) / ai;
    pj[c] = (kj * anchors_[ed.v * k + c] + rho * nj[c]) / aj;
  }
  weighted_pair_prox(p_, q_, ipow(distances_[e], p_), pi, ai, pj, aj, xi, xj);
}

double LocalizationProblem::error(std::span<const double> z) const {
  if (p_ == 2 && q_ == 2) return gradient(z).norm();
  return objective(z);
}

// ---------------------------------------------------------------- 1-D prox

std::vector<double> real_cubic_roots(double a, double b, double c, double d) {
  if (a == 0) throw ValidationError("leading cubic coefficient is zero");
  b /= a;
  c /= a;
  d /= a;
  // x = t - b/3 gives t^3 + p t + q.
  const double shift = b / 3.0;
  const double p = c - b * b / 3.0;
  const double q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
  std::vector<double> roots;
  const double disc = sq(q / 2.0) + p * p * p / 27.0;
  const double scale = std::max({1.0, std::abs(p), std::abs(q)});
  if (std::abs(disc) <= 1e-14 * scale * scale) {
    // Repeated root.
    if (std::abs(p) <= 1e-14 * scale) {
      roots = {0.0};
    } else {
      const double u = std::cbrt(-q / 2.0);
      roots = {2.0 * u, -u};
    }
  } else if (disc > 0) {
    const double s = std::sqrt(disc);
    roots = {std::cbrt(-q / 2.0 + s) + std::cbrt(-q / 2.0 - s)};
  } else {
    const double r = 2.0 * std::sqrt(-p / 3.0);
    const double phi = std::acos(std::clamp(3.0 * q / (p * r), -1.0, 1.0));
    for (int j = 0; j < 3; ++j) roots.push_back(r * std::cos((phi - 2.0 * std::numbers::pi * j) / 3.0));
  }
  for (double& t : roots) {
    double x = t - shift;
    const double f = ((x + b) * x + c) * x + d;
    const double df = (3.0 * x + 2.0 * b) * x + c;
    if (df != 0) x -= f / df;
    t = x;
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

double prox1d_objective(int p, int q, double d, double n, double rho, double x) {
  return ipow(std::abs(ipow(std::abs(x), p) - d), q) + 0.5 * rho * sq(x - n);
}

double prox1d(int p, int q, double d, double n, double rho) {
  if ((p != 1 && p != 2) || (q != 1 && q != 2)) throw ValidationError("p and q must be 1 or 2");
  if (!(d >= 0)) throw ValidationError("d must be >= 0");
  if (!(rho > 0)) throw ValidationError("rho must be positive");

  std::vector<double> cand{0.0};
  if (p == 2 && q == 2) {
    for (double r : real_cubic_roots(4.0, 0.0, rho - 4.0 * d, -rho * n)) cand.push_back(r);
  } else if (p == 2 && q == 1) {
    const double s = std::sqrt(d);
    cand.insert(cand.end(), {s, -s, rho * n / (2.0 + rho)});
    if (rho != 2.0) cand.push_back(rho * n / (rho - 2.0));
  } else if (p == 1 && q == 2) {
    const double pos = (2.0 * d + rho * n) / (2.0 + rho);
    const double neg = (rho * n - 2.0 * d) / (2.0 + rho);
    if (pos >= 0) cand.push_back(pos);
    if (neg <= 0) cand.push_back(neg);
  } else {
    cand.insert(cand.end(), {d, -d, n - 1.0 / rho, n + 1.0 / rho});
  }

  double best = cand[0];
  double best_val = prox1d_objective(p, q, d, n, rho, best);
  for (std::size_t k = 1; k < cand.size(); ++k) {
    const double x = cand[k];
    const double v = prox1d_objective(p, q, d, n, rho, x);
    const double tol = 1e-14 * std::max(1.0, std::abs(best_val));
    if (v < best_val - tol) {
      best = x;
      best_val = v;
    } else if (std::abs(v - best_val) <= tol) {
      const double dx = std::abs(x - n);
      const double db = std::abs(best - n);
      if (dx < db - 1e-15 || (std::abs(dx - db) <= 1e-15 && x >= 0 && best < 0)) {
        best = x;
        best_val = std::min(best_val, v);
      }
    }
  }
  return best;
}

void weighted_pair_prox(int p, int q, double dp, std::span<const double> pi, double ai,
                        std::span<const double> pj, double aj, std::span<double> xi,
                        std::span<double> xj) {
  const std::size_t k = pi.size();
  const double mu = ai * aj / (ai + aj);
  const double len = norm_diff(pi, pj);
  const double s = std::abs(prox1d(p, q, dp, len, mu));
  for (std::size_t c = 0; c < k; ++c) {
    const double dir = len > 0 ? (pi[c] - pj[c]) / len : (c == 0 ? 1.0 : 0.0);
    const double r = s * dir;
    xj[c] = (ai * (pi[c] - r) + aj * pj[c]) / (ai + aj);
    xi[c] = xj[c] + r;
  }
}

// ---------------------------------------------------------------- file format

LocalizationProblem read_localization(std::istream& in) {
  int n = 0, m = 0, k = 0, p = 0, q = 0;
  double delta = 0;
  std::string line;
  int line_no = 0;
  auto next = [&](std::istringstream& row) {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      row = std::istringstream(line);
      return true;
    }
    return false;
  };
  auto where = [&] { return "instance file line " + std::to_string(line_no) + ": "; };
  std::istringstream row;
  if (!next(row) || !(row >> n >> m >> k >> p >> q >> delta)) {
    throw ValidationError(where() + "expected header \"n m k p q delta\"");
  }
  if (n < 1 || m < 0 || k < 1) throw ValidationError(where() + "invalid sizes in header");
  std::vector<Edge> edges;
  std::vector<double> dist;
  for (int e = 0; e < m; ++e) {
    int i = 0, j = 0;
    double d = 0;
    if (!next(row) || !(row >> i >> j >> d)) throw ValidationError(where() + "expected \"i j d_ij\"");
    edges.push_back({i, j});
    dist.push_back(d);
  }
  std::vector<double> anchors;
  for (int i = 0; i < n; ++i) {
    if (!next(row)) throw ValidationError(where() + "missing anchor rows");
    for (int c = 0; c < k; ++c) {
      double v = 0;
      if (!(row >> v)) throw ValidationError(where() + "expected " + std::to_string(k) + " anchor values");
      anchors.push_back(v);
    }
  }
  try {
    return LocalizationProblem(Graph(n, std::move(edges)), k, p, q, std::move(dist), delta,
                               std::move(anchors));
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("instance file: ") + e.what());
  }
}

LocalizationProblem read_localization_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open instance file " + path);
  return read_localization(in);
}

void write_localization(std::ostream& out, const LocalizationProblem& prob) {
  const Graph& g = prob.graph();
  const int k = prob.dim();
  out.precision(17);
  out << g.num_nodes() << ' ' << g.num_edges() << ' ' << k << ' ' << prob.p() << ' ' << prob.q()
      << ' ' << prob.delta() << '\n';
  for (int e = 0; e < g.num_edges(); ++e) {
    out << g.edge(e).u << ' ' << g.edge(e).v << ' ' << prob.distances()[e] << '\n';
  }
  for (int i = 0; i < g.num_nodes(); ++i) {
    for (int c = 0; c < k; ++c) out << (c ? " " : "") << prob.anchors()[i * k + c];
    out << '\n';
  }
}

}  // namespace consensus_lab
