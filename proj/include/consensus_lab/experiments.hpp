#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "consensus_lab/algorithms.hpp"
#include "consensus_lab/engine.hpp"
#include "consensus_lab/graph.hpp"
#include "consensus_lab/metrics.hpp"
#include "consensus_lab/problems.hpp"

namespace consensus_lab {

/// Everything a run depends on. Field names match the command-line flags
/// (underscores become dashes) and the config file keys.
struct ExperimentConfig {
  // graph: a file, or a generated family
  std::string graph;  // path; empty means generate
  std::string family = "ring";  // ring khop grid er path star complete
  int n = 10;
  int hops = 2;  // khop
  int rows = 3, cols = 3;
  bool periodic = false;
  double edge_prob = 0.3;  // er

  // problem
  std::string problem = "canonical";  // canonical, localization
  double delta = 0.0;
  std::string anchor = "ones";  // canonical anchor c: ones, random
  int loc_p = 2, loc_q = 2;  // keys p and q
  std::string instance;  // localization instance file; overrides the graph

  // algorithm; parameters are numbers, "auto" (closed form, gd and admm
  // only), "grid" (seeded lattice search) or "default" (auto where a closed
  // form exists, grid otherwise)
  std::string alg = "gd";
  std::string alpha = "default";
  std::string rho = "default";
  std::string gamma = "default";
  std::string msda_k = "default";
  std::string msda_eta = "default";
  std::string msda_sigma = "default";
  std::string msda_output = "average";

  int max_iters = 1000;
  double tol = 1e-8;
  std::uint64_t seed = 1;
  int threads = 1;
  int grid_budget = 96;

  /// Canonical "key = value" text, keys sorted; the config hash covers it.
  std::string to_text() const;
};

/// Applies "key = value" lines ('#' starts a comment). Unknown keys and bad
/// values throw ValidationError naming the line.
void apply_config_text(ExperimentConfig& cfg, std::istream& in);
/// Sets one key; the same parser the config file uses.
void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value);
std::vector<std::string> config_keys();

/// FNV-1a of to_text() followed by `extra` (sweep settings), 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg, const std::string& extra = "");

Graph build_graph(const ExperimentConfig& cfg);
std::unique_ptr<Problem> build_problem(const ExperimentConfig& cfg, const Graph& g);
/// Seeded standard normal start of problem.size() entries.
std::vector<double> initial_point(const ExperimentConfig& cfg, const Problem& problem);

/// Concrete algorithm parameters after resolving auto and grid.
using ParamSet = std::map<std::string, double>;

std::unique_ptr<AgentProgram> build_program(const std::string& alg, const ParamSet& params,
                                            const Problem& problem, std::span<const double> z0,
                                            const std::string& msda_output = "average");

/// Search lattice per algorithm; documented in the CLI help.
///   gd              alpha = 10^(-3 + i/6), i = 0..18
///   admm            rho = 10^(-3 + i/4), i = 0..16; gamma in {1, 1.25, 1.5, 1.75, 1.9}
///   admm-consensus  same as admm
///   pdmm            rho as admm; alpha in {0.25, 0.5, 0.75, 1}
///   msda            K in {1, 2, 4, 8}; eta, sigma = 10^(-2 + i/2), i = 0..6
/// Fixed parameters (already numeric in the config) pin their axis.
std::vector<ParamSet> grid_lattice(const std::string& alg, const ParamSet& fixed);

struct GridResult {
  ParamSet best;
  std::optional<int> rounds;  // rounds to tolerance for the winner
  double final_error = 0;
  int evaluated = 0;
};

/// Runs every lattice point (a seeded sample of `budget` points if the lattice
/// is larger) and keeps the one reaching `tol` in the fewest rounds; if none
/// does, the smallest final error. Divergent points lose.
GridResult grid_tune(const std::string& alg, const Problem& problem, std::span<const double> z0,
                     const ParamSet& fixed, double tol, int max_iters, int budget,
                     std::uint64_t seed, const std::string& msda_output = "average");

/// Resolves the config's algorithm parameters: numbers stay, "auto" uses the
/// closed-form tuning, "grid" runs grid_tune.
ParamSet resolve_parameters(const ExperimentConfig& cfg, const Problem& problem,
                            std::span<const double> z0);

struct RunResult {
  ParamSet params;
  Trace trace;
};

/// Build, resolve and run one configured simulation.
RunResult run_configured(const ExperimentConfig& cfg);

/// Smallest t after which |objective_s - objective_final| <= eps for every
/// later s (0 when the trace is flat from the start).
int settling_time(std::span<const TraceRow> rows, double eps);

/// Parameters of every algorithm slot set to `tuning` ("grid" or "default"),
/// one engine thread.
ExperimentConfig with_tuning(ExperimentConfig c, const std::string& tuning);

/// One configured run per algorithm, `workers` at a time; results in order.
std::vector<RunResult> run_compare(const ExperimentConfig& base,
                                   const std::vector<std::string>& algs,
                                   const std::string& tuning, int workers);

struct ScalingSpec {
  ExperimentConfig base;  // generated family; n is overridden
  std::vector<std::string> algs;
  std::vector<int> sizes;
  int replicates = 1;  // seeds base.seed, base.seed + 1, ...
  std::string tuning = "grid";
  std::string measure = "error";  // error: first round at tol; objective: settling_time(eps)
  double eps = 1e-10;
  int workers = 1;
};

struct ScalingPoint {
  std::string alg;
  int n = 0;
  std::uint64_t seed = 0;
  ParamSet params;
  std::optional<int> time;
  Trace trace;
};

struct ScalingFit {
  std::string alg;
  std::optional<LineFit> fit;  // log mean-log-time against log n
  int points = 0;  // sizes where every replicate has a positive time
};

struct ScalingResult {
  std::vector<ScalingPoint> points;  // alg-major, then size, then seed
  std::vector<ScalingFit> fits;
};

ScalingResult run_scaling(const ScalingSpec& spec);

struct Series {
  std::string name;
  std::vector<double> x, y;
};

/// Minimal SVG line chart; with log_y the y axis shows log10 of positive values.
void write_svg(std::ostream& out, const std::vector<Series>& series, const std::string& title,
               const std::string& xlabel, const std::string& ylabel, bool log_y);

/// "alpha=0.5;gamma=1.2" with 17 significant digits.
std::string format_params(const ParamSet& p);

/// Runs fn(0..count-1) on up to `threads` threads; results must be written
/// by index so the outcome does not depend on scheduling.
void parallel_tasks(int count, int threads, const std::function<void(int)>& fn);

}  // namespace consensus_lab
