#include "consensus_lab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <istream>
#include <limits>
#include <ostream>
#include <thread>

#include "consensus_lab/error.hpp"
#include "consensus_lab/rng.hpp"
#include "consensus_lab/spectral.hpp"
#include "consensus_lab/tuning.hpp"

namespace consensus_lab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw ValidationError("invalid value for " + key + ": \"" + value + "\"");
}

double parse_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    bad_value(key, v);
  }
  if (used != v.size() || !std::isfinite(x)) bad_value(key, v);
  return x;
}

long long parse_integer(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long x = 0;
  try {
    x = std::stoll(v, &used);
  } catch (const std::exception&) {
    bad_value(key, v);
  }
  if (used != v.size()) bad_value(key, v);
  return x;
}

int parse_int(const std::string& key, const std::string& v) {
  const long long x = parse_integer(key, v);
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) bad_value(key, v);
  return static_cast<int>(x);
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad_value(key, v);
}

std::string parse_choice(const std::string& key, const std::string& v,
                         std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (v == a) return v;
  bad_value(key, v);
}

// A parameter slot: a number, "auto", "grid" or "default".
std::string parse_param(const std::string& key, const std::string& v) {
  if (v == "auto" || v == "grid" || v == "default") return v;
  parse_double(key, v);
  return v;
}

struct Field {
  const char* key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  bool hashed = true;
};

#define STR_FIELD(k, m) \
  Field{k, [](const ExperimentConfig& c) { return c.m; }, \
        [](ExperimentConfig& c, const std::string& v) { c.m = v; }}
#define CHOICE_FIELD(k, m, ...) \
  Field{k, [](const ExperimentConfig& c) { return c.m; }, \
        [](ExperimentConfig& c, const std::string& v) { c.m = parse_choice(k, v, {__VA_ARGS__}); }}
#define INT_FIELD(k, m) \
  Field{k, [](const ExperimentConfig& c) { return std::to_string(c.m); }, \
        [](ExperimentConfig& c, const std::string& v) { c.m = parse_int(k, v); }}
#define DOUBLE_FIELD(k, m) \
  Field{k, [](const ExperimentConfig& c) { return fmt17(c.m); }, \
        [](ExperimentConfig& c, const std::string& v) { c.m = parse_double(k, v); }}
#define PARAM_FIELD(k, m) \
  Field{k, [](const ExperimentConfig& c) { return c.m; }, \
        [](ExperimentConfig& c, const std::string& v) { c.m = parse_param(k, v); }}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f{
        STR_FIELD("graph", graph),
        CHOICE_FIELD("family", family, "ring", "khop", "grid", "er", "path", "star", "complete"),
        INT_FIELD("n", n),
        INT_FIELD("hops", hops),
        INT_FIELD("rows", rows),
        INT_FIELD("cols", cols),
        Field{"periodic", [](const ExperimentConfig& c) { return std::string(c.periodic ? "true" : "false"); },
              [](ExperimentConfig& c, const std::string& v) { c.periodic = parse_bool("periodic", v); }},
        DOUBLE_FIELD("edge-prob", edge_prob),
        CHOICE_FIELD("problem", problem, "canonical", "localization"),
        DOUBLE_FIELD("delta", delta),
        CHOICE_FIELD("anchor", anchor, "ones", "random"),
        INT_FIELD("p", loc_p),
        INT_FIELD("q", loc_q),
        STR_FIELD("instance", instance),
        CHOICE_FIELD("alg", alg, "gd", "admm", "admm-consensus", "pdmm", "msda"),
        PARAM_FIELD("alpha", alpha),
        PARAM_FIELD("rho", rho),
        PARAM_FIELD("gamma", gamma),
        PARAM_FIELD("msda-k", msda_k),
        PARAM_FIELD("msda-eta", msda_eta),
        PARAM_FIELD("msda-sigma", msda_sigma),
        CHOICE_FIELD("msda-output", msda_output, "average", "last"),
        INT_FIELD("max-iters", max_iters),
        DOUBLE_FIELD("tol", tol),
        Field{"seed", [](const ExperimentConfig& c) { return std::to_string(c.seed); },
              [](ExperimentConfig& c, const std::string& v) {
                const long long s = parse_integer("seed", v);
                if (s < 0) bad_value("seed", v);
                c.seed = static_cast<std::uint64_t>(s);
              }},
        INT_FIELD("grid-budget", grid_budget),
    };
    // Threads never change results, so they stay out of the hash.
    Field threads = INT_FIELD("threads", threads);
    threads.hashed = false;
    f.push_back(threads);
    std::sort(f.begin(), f.end(), [](const Field& a, const Field& b) {
      return std::string(a.key) < std::string(b.key);
    });
    return f;
  }();
  return table;
}

#undef STR_FIELD
#undef CHOICE_FIELD
#undef INT_FIELD
#undef DOUBLE_FIELD
#undef PARAM_FIELD

std::vector<double> decades(double lo_exp, double step, int count) {
  std::vector<double> v;
  for (int i = 0; i < count; ++i) v.push_back(std::pow(10.0, lo_exp + step * i));
  return v;
}

// Cartesian product over named axes; a fixed value pins its axis.
std::vector<ParamSet> product(const std::vector<std::pair<std::string, std::vector<double>>>& axes,
                              const ParamSet& fixed) {
  std::vector<ParamSet> out{ParamSet{}};
  for (const auto& [name, values] : axes) {
    std::vector<double> use = values;
    if (auto it = fixed.find(name); it != fixed.end()) use = {it->second};
    std::vector<ParamSet> next;
    for (const auto& p : out) {
      for (double v : use) {
        ParamSet q = p;
        q[name] = v;
        next.push_back(std::move(q));
      }
    }
    out = std::move(next);
  }
  return out;
}

double param(const ParamSet& p, const char* name) {
  const auto it = p.find(name);
  if (it == p.end()) throw ValidationError(std::string("missing parameter ") + name);
  return it->second;
}

MsdaOutput msda_output_mode(const std::string& s) {
  if (s == "average") return MsdaOutput::Average;
  if (s == "last") return MsdaOutput::Last;
  throw ValidationError("unknown msda output \"" + s + "\"");
}

// Config key and parameter name of each algorithm axis.
std::vector<std::pair<std::string, std::string>> axes_of(const ExperimentConfig& c) {
  if (c.alg == "gd") return {{"alpha", c.alpha}};
  if (c.alg == "admm" || c.alg == "admm-consensus") return {{"rho", c.rho}, {"gamma", c.gamma}};
  if (c.alg == "pdmm") return {{"rho", c.rho}, {"alpha", c.alpha}};
  if (c.alg == "msda") return {{"K", c.msda_k}, {"eta", c.msda_eta}, {"sigma", c.msda_sigma}};
  throw ValidationError("unknown algorithm \"" + c.alg + "\"");
}

}  // namespace

std::string ExperimentConfig::to_text() const {
  std::string out;
  for (const auto& f : fields()) {
    if (!f.hashed) continue;
    out += f.key;
    out += " = ";
    out += f.get(*this);
    out += '\n';
  }
  return out;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& f : fields()) keys.emplace_back(f.key);
  return keys;
}

void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  for (const auto& f : fields()) {
    if (key == f.key) {
      f.set(cfg, value);
      return;
    }
  }
  throw ValidationError("unknown config key \"" + key + "\"");
}

void apply_config_text(ExperimentConfig& cfg, std::istream& in) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "config line " + std::to_string(line_no) + ": ";
    if (eq == std::string::npos) throw ValidationError(where + "expected \"key = value\"");
    try {
      set_config_value(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ValidationError& e) {
      throw ValidationError(where + e.what());
    }
  }
}

std::string config_hash(const ExperimentConfig& cfg, const std::string& extra) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : cfg.to_text() + extra) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Graph build_graph(const ExperimentConfig& c) {
  if (!c.instance.empty()) return read_localization_file(c.instance).graph();
  if (!c.graph.empty()) return read_graph_file(c.graph);
  if (c.family == "ring") return gen_ring(c.n);
  if (c.family == "khop") return gen_khop(c.n, c.hops);
  if (c.family == "grid") return gen_grid(c.rows, c.cols, c.periodic);
  if (c.family == "er") return gen_er(c.n, c.edge_prob, c.seed);
  if (c.family == "path") return gen_path(c.n);
  if (c.family == "star") {
    if (c.n < 2) throw ValidationError("star requires n >= 2");
    return gen_star(c.n - 1);
  }
  if (c.family == "complete") return gen_complete(c.n);
  throw ValidationError("unknown graph family \"" + c.family + "\"");
}

std::unique_ptr<Problem> build_problem(const ExperimentConfig& c, const Graph& g) {
  if (c.problem == "canonical") {
    if (c.anchor == "ones") return std::make_unique<CanonicalProblem>(g, c.delta);
    Rng rng(c.seed ^ 0x9e3779b97f4a7c15ull);
    Eigen::VectorXd anchor(g.num_nodes());
    for (int i = 0; i < g.num_nodes(); ++i) anchor(i) = rng.normal();
    return std::make_unique<CanonicalProblem>(g, c.delta, anchor);
  }
  if (c.problem == "localization") {
    if (!c.instance.empty()) {
      auto prob = read_localization_file(c.instance);
      if (prob.graph().hash() != g.hash()) throw ValidationError("instance graph differs from the graph");
      return std::make_unique<LocalizationProblem>(std::move(prob));
    }
    return std::make_unique<LocalizationProblem>(
        LocalizationProblem::with_defaults(g, c.loc_p, c.loc_q, c.delta));
  }
  throw ValidationError("unknown problem \"" + c.problem + "\"");
}

std::vector<double> initial_point(const ExperimentConfig& c, const Problem& problem) {
  Rng rng(c.seed);
  std::vector<double> z(problem.size());
  for (auto& v : z) v = rng.normal();
  return z;
}

std::unique_ptr<AgentProgram> build_program(const std::string& alg, const ParamSet& p,
                                            const Problem& problem, std::span<const double> z0,
                                            const std::string& msda_output) {
  if (alg == "gd") return make_gd(problem, param(p, "alpha"), z0);
  if (alg == "admm") return make_admm_edge(problem, param(p, "rho"), param(p, "gamma"), z0);
  if (alg == "admm-consensus")
    return make_admm_consensus(problem, param(p, "rho"), param(p, "gamma"), z0);
  if (alg == "pdmm") return make_pdmm(problem, param(p, "rho"), param(p, "alpha"), z0);
  if (alg == "msda") {
    const double K = param(p, "K");
    if (K != std::floor(K) || K < 1 || K > 1e6) throw ValidationError("msda K must be a positive integer");
    // MSDA starts from zero duals; z0 does not enter.
    return make_msda(problem, static_cast<int>(K), param(p, "eta"), param(p, "sigma"),
                     msda_output_mode(msda_output));
  }
  throw ValidationError("unknown algorithm \"" + alg + "\"");
}

std::vector<ParamSet> grid_lattice(const std::string& alg, const ParamSet& fixed) {
  const auto rho = decades(-3, 0.25, 17);
  if (alg == "gd") return product({{"alpha", decades(-3, 1.0 / 6, 19)}}, fixed);
  if (alg == "admm" || alg == "admm-consensus")
    return product({{"rho", rho}, {"gamma", {1.0, 1.25, 1.5, 1.75, 1.9}}}, fixed);
  if (alg == "pdmm") return product({{"rho", rho}, {"alpha", {0.25, 0.5, 0.75, 1.0}}}, fixed);
  if (alg == "msda")
    return product({{"K", {1, 2, 4, 8}}, {"eta", decades(-2, 0.5, 7)}, {"sigma", decades(-2, 0.5, 7)}},
                   fixed);
  throw ValidationError("unknown algorithm \"" + alg + "\"");
}

GridResult grid_tune(const std::string& alg, const Problem& problem, std::span<const double> z0,
                     const ParamSet& fixed, double tol, int max_iters, int budget,
                     std::uint64_t seed, const std::string& msda_output) {
  if (budget < 1) throw ValidationError("grid budget must be positive");
  if (max_iters < 1) throw ValidationError("max-iters must be positive");
  std::vector<ParamSet> lattice = grid_lattice(alg, fixed);
  if (static_cast<int>(lattice.size()) > budget) {
    // Seeded partial shuffle, then lattice order for evaluation.
    std::vector<int> idx(lattice.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
    Rng rng(seed ^ 0xd1b54a32d192ed03ull);
    for (int i = 0; i < budget; ++i) std::swap(idx[i], idx[rng.uniform_int(i, static_cast<int>(idx.size()) - 1)]);
    idx.resize(budget);
    std::sort(idx.begin(), idx.end());
    std::vector<ParamSet> picked;
    for (int i : idx) picked.push_back(lattice[i]);
    lattice = std::move(picked);
  }

  GridResult best;
  double best_error = std::numeric_limits<double>::infinity();
  bool have_any = false;
  for (const auto& point : lattice) {
    ++best.evaluated;
    // Nothing can beat the current winner after its round count.
    const int cap = best.rounds ? *best.rounds : max_iters;
    Trace tr;
    try {
      auto prog = build_program(alg, point, problem, z0, msda_output);
      tr = run_sync(*prog, problem.graph(), {cap, tol});
    } catch (const DivergenceError&) {
      continue;
    } catch (const ValidationError&) {
      continue;
    }
    const int t = tr.rows.back().t;
    const double err = tr.rows.back().error;
    if (tr.converged) {
      if (!best.rounds || t < *best.rounds) {
        best.rounds = t;
        best.best = point;
        best.final_error = err;
      }
    } else if (!best.rounds && err < best_error) {
      best_error = err;
      best.best = point;
      best.final_error = err;
      have_any = true;
    }
  }
  if (!best.rounds && !have_any) {
    throw DivergenceError("every " + alg + " grid point diverged or was rejected", 0);
  }
  return best;
}

ParamSet resolve_parameters(const ExperimentConfig& c, const Problem& problem,
                            std::span<const double> z0) {
  const bool closed_form = c.alg == "gd" || c.alg == "admm";
  ParamSet fixed;
  bool want_auto = false, want_grid = false;
  for (auto [name, value] : axes_of(c)) {
    if (value == "default") value = closed_form ? "auto" : "grid";
    if (value == "auto") {
      if (!closed_form) {
        throw ValidationError("auto tuning is only available for gd and admm; use grid or a number");
      }
      want_auto = true;
    } else if (value == "grid") {
      want_grid = true;
    } else {
      fixed[name] = parse_double(name, value);
    }
  }
  const Graph& g = problem.graph();
  if (want_auto) {
    const SpectralSummary s = spectral_summary(g);
    if (c.alg == "gd") {
      fixed.emplace("alpha", tune_gd(s).alpha_star);
    } else {
      const TuningResult t = tune_graph(g, s);
      if (c.rho == "auto" || c.rho == "default") fixed.emplace("rho", t.rho_star);
      if (c.gamma == "auto" || c.gamma == "default") fixed.emplace("gamma", t.gamma_star);
    }
  }
  if (want_grid) {
    return grid_tune(c.alg, problem, z0, fixed, c.tol, c.max_iters, c.grid_budget, c.seed,
                     c.msda_output)
        .best;
  }
  return fixed;
}

RunResult run_configured(const ExperimentConfig& c) {
  if (c.max_iters < 0) throw ValidationError("max-iters must be nonnegative");
  if (c.threads < 1) throw ValidationError("threads must be positive");
  const Graph g = build_graph(c);
  const auto problem = build_problem(c, g);
  const auto z0 = initial_point(c, *problem);
  RunResult out;
  out.params = resolve_parameters(c, *problem, z0);
  const auto prog = build_program(c.alg, out.params, *problem, z0, c.msda_output);
  RunOptions opt;
  opt.threads = c.threads;
  opt.seed = c.seed;
  out.trace = run_sync(*prog, g, {c.max_iters, c.tol}, opt);
  return out;
}

int settling_time(std::span<const TraceRow> rows, double eps) {
  if (rows.empty()) throw ValidationError("empty trace");
  if (!(eps > 0)) throw ValidationError("settling tolerance must be positive");
  const double f_final = rows.back().objective;
  for (std::size_t i = rows.size(); i-- > 0;) {
    if (std::abs(rows[i].objective - f_final) > eps) return rows[i + 1].t;
  }
  return rows.front().t;
}

ExperimentConfig with_tuning(ExperimentConfig c, const std::string& tuning) {
  if (tuning != "grid" && tuning != "default") throw ValidationError("tuning must be grid or default");
  for (auto* slot : {&c.alpha, &c.rho, &c.gamma, &c.msda_k, &c.msda_eta, &c.msda_sigma}) *slot = tuning;
  c.threads = 1;
  return c;
}

std::vector<RunResult> run_compare(const ExperimentConfig& base,
                                   const std::vector<std::string>& algs,
                                   const std::string& tuning, int workers) {
  std::vector<RunResult> results(algs.size());
  parallel_tasks(static_cast<int>(algs.size()), workers, [&](int i) {
    ExperimentConfig c = with_tuning(base, tuning);
    set_config_value(c, "alg", algs[i]);
    results[i] = run_configured(c);
  });
  return results;
}

ScalingResult run_scaling(const ScalingSpec& spec) {
  if (!spec.base.graph.empty() || !spec.base.instance.empty()) {
    throw ValidationError("scaling generates its graphs; drop graph and instance");
  }
  if (spec.measure != "error" && spec.measure != "objective") {
    throw ValidationError("measure must be error or objective");
  }
  if (spec.algs.empty() || spec.sizes.empty()) throw ValidationError("scaling needs algorithms and sizes");
  if (spec.replicates < 1) throw ValidationError("replicates must be positive");
  const int na = static_cast<int>(spec.algs.size()), ns = static_cast<int>(spec.sizes.size());
  const int nr = spec.replicates;
  ScalingResult out;
  out.points.resize(static_cast<std::size_t>(na) * ns * nr);
  parallel_tasks(na * ns * nr, spec.workers, [&](int k) {
    const int a = k / (ns * nr), j = (k / nr) % ns, r = k % nr;
    ExperimentConfig c = with_tuning(spec.base, spec.tuning);
    set_config_value(c, "alg", spec.algs[a]);
    c.n = spec.sizes[j];
    c.seed = spec.base.seed + static_cast<std::uint64_t>(r);
    ScalingPoint& pt = out.points[k];
    RunResult run = run_configured(c);
    pt.alg = c.alg;
    pt.n = c.n;
    pt.seed = c.seed;
    pt.params = std::move(run.params);
    pt.trace = std::move(run.trace);
    pt.time = spec.measure == "error" ? convergence_time(pt.trace, c.tol)
                                      : std::optional<int>(settling_time(pt.trace.rows, spec.eps));
  });
  for (int a = 0; a < na; ++a) {
    std::vector<double> lx, ly;
    for (int j = 0; j < ns; ++j) {
      double sum = 0;
      bool complete = true;
      for (int r = 0; r < nr; ++r) {
        const auto& t = out.points[(a * ns + j) * nr + r].time;
        if (!t || *t <= 0) {
          complete = false;
          break;
        }
        sum += std::log(*t);
      }
      if (!complete) continue;
      lx.push_back(std::log(spec.sizes[j]));
      ly.push_back(sum / nr);
    }
    ScalingFit f{spec.algs[a], std::nullopt, static_cast<int>(lx.size())};
    if (lx.size() >= 2) f.fit = fit_line(lx, ly);
    out.fits.push_back(std::move(f));
  }
  return out;
}

std::string format_params(const ParamSet& p) {
  std::string out;
  for (const auto& [k, v] : p) {
    if (!out.empty()) out += ';';
    out += k + "=" + fmt17(v);
  }
  return out;
}

void parallel_tasks(int count, int threads, const std::function<void(int)>& fn) {
  if (count <= 0) return;
  const int workers = std::clamp(threads, 1, count);
  std::vector<std::exception_ptr> errors(count);
  if (workers == 1) {
    for (int i = 0; i < count; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<int> next{0};
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  // Lowest failing index wins, so the reported error does not depend on timing.
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace

void write_svg(std::ostream& out, const std::vector<Series>& series, const std::string& title,
               const std::string& xlabel, const std::string& ylabel, bool log_y) {
  constexpr double W = 720, H = 440, left = 70, right = 170, top = 40, bottom = 50;
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  auto ty = [&](double y) { return log_y ? std::log10(y) : y; };
  auto usable = [&](double y) { return std::isfinite(y) && (!log_y || y > 0); };
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!usable(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  }
  if (!(x0 <= x1)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  const double pw = W - left - right, ph = H - top - bottom;
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return top + (1 - (y - y0) / (y1 - y0)) * ph; };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << left + pw / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
      << xml_escape(title) << "</text>\n";
  out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4, yv = y0 + (y1 - y0) * k / 4;
    out << "<text x=\"" << px(xv) << "\" y=\"" << top + ph + 16 << "\" text-anchor=\"middle\">"
        << num(xv) << "</text>\n";
    out << "<text x=\"" << left - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">"
        << (log_y ? "1e" + num(yv) : num(yv)) << "</text>\n";
    out << "<line x1=\"" << left << "\" x2=\"" << left + pw << "\" y1=\"" << py(yv) << "\" y2=\""
        << py(yv) << "\" stroke=\"#ddd\"/>\n";
  }
  out << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">"
      << xml_escape(xlabel) << "</text>\n";
  out << "<text transform=\"translate(16," << top + ph / 2
      << ") rotate(-90)\" text-anchor=\"middle\">" << xml_escape(ylabel) << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = palette[s % std::size(palette)];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < series[s].x.size() && i < series[s].y.size(); ++i) {
      if (!usable(series[s].y[i])) continue;
      out << num(px(series[s].x[i])) << ',' << num(py(ty(series[s].y[i]))) << ' ';
    }
    out << "\"/>\n";
    const double ly = top + 14 + 18.0 * static_cast<double>(s);
    out << "<line x1=\"" << left + pw + 12 << "\" x2=\"" << left + pw + 32 << "\" y1=\"" << ly
        << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << left + pw + 38 << "\" y=\"" << ly + 4 << "\">"
        << xml_escape(series[s].name) << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace consensus_lab
