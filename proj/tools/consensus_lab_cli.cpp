// consensus-lab: command-line front end.
//
// Exit codes: 0 success, 1 usage, 2 invalid input, 3 divergence,
// 4 unreadable or unwritable file, 5 internal error.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "consensus_lab/engine.hpp"
#include "consensus_lab/error.hpp"
#include "consensus_lab/experiments.hpp"
#include "consensus_lab/metrics.hpp"
#include "consensus_lab/operators.hpp"
#include "consensus_lab/spectral.hpp"
#include "consensus_lab/tuning.hpp"

using namespace consensus_lab;

namespace {

constexpr const char* kLatticeHelp = R"(Parameters accept a number, "auto" (closed-form tuning, gd and admm only),
"grid" (seeded search) or "default" (auto where available, otherwise grid).

Grid search lattice (at most --grid-budget points, sampled with --seed when
the lattice is larger; a point wins by reaching --tol in the fewest rounds):
  gd              alpha = 10^(-3 + i/6), i = 0..18
  admm            rho = 10^(-3 + i/4), i = 0..16; gamma in {1, 1.25, 1.5, 1.75, 1.9}
  admm-consensus  as admm
  pdmm            rho as admm; alpha in {0.25, 0.5, 0.75, 1}
  msda            K in {1, 2, 4, 8}; eta, sigma = 10^(-2 + i/2), i = 0..6
Numeric parameters pin their axis.

--config FILE reads "key = value" lines (keys are the long flag names
without dashes in front, '#' starts a comment). Flags given on the command
line override the file.)";

std::string fmt(double v, int digits) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

// Writes to `path`, or stdout when it is empty or "-".
template <class F>
void emit(const std::string& path, F&& body) {
  if (path.empty() || path == "-") {
    body(std::cout);
    return;
  }
  auto out = open_out(path);
  body(out);
  if (!out) throw IoError("cannot write " + path);
}

// Experiment flags, one per config key.
struct ConfigFlags {
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  std::string file;
  bool periodic = false;

  void add(CLI::App* app, const std::vector<std::string>& keys) {
    for (const auto& k : keys) {
      if (k == "periodic") {
        options[k] = app->add_flag("--periodic", periodic, "Periodic grid (torus)");
        continue;
      }
      options[k] = app->add_option("--" + k, values[k], describe(k))
                       ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    }
    app->add_option("--config", file, "Config file of \"key = value\" lines");
  }

  ExperimentConfig resolve() const {
    ExperimentConfig cfg;
    if (!file.empty()) {
      std::ifstream in(file);
      if (!in) throw IoError("cannot open config file " + file);
      apply_config_text(cfg, in);
    }
    for (const auto& [k, opt] : options) {
      if (opt->count() == 0) continue;
      if (k == "periodic") {
        cfg.periodic = periodic;
      } else {
        set_config_value(cfg, k, values.at(k));
      }
    }
    return cfg;
  }

  static std::string describe(const std::string& k) {
    static const std::map<std::string, std::string> text{
        {"graph", "Graph file (\"n m\" header, then one \"i j\" edge per line)"},
        {"family", "Generated family: ring khop grid er path star complete"},
        {"n", "Node count for generated families"},
        {"hops", "Neighbors on each side for khop"},
        {"rows", "Grid rows"},
        {"cols", "Grid columns"},
        {"edge-prob", "Edge probability for er"},
        {"problem", "canonical or localization"},
        {"delta", "Regularization weight"},
        {"anchor", "Canonical anchor: ones or random (seeded)"},
        {"p", "Localization distance exponent"},
        {"q", "Localization loss exponent"},
        {"instance", "Localization instance file (includes its graph)"},
        {"alg", "gd admm admm-consensus pdmm msda"},
        {"alpha", "GD step size, or PDMM averaging weight"},
        {"rho", "Penalty parameter (admm, admm-consensus, pdmm)"},
        {"gamma", "Relaxation parameter (admm, admm-consensus)"},
        {"msda-k", "MSDA Chebyshev degree"},
        {"msda-eta", "MSDA step size"},
        {"msda-sigma", "MSDA momentum parameter"},
        {"msda-output", "MSDA estimate: average (running mean) or last"},
        {"max-iters", "Round limit"},
        {"tol", "Stop when the error reaches this value (0 runs all rounds)"},
        {"seed", "Seed for the start point, random graphs, anchors and grid sampling"},
        {"threads", "Engine worker threads (results do not depend on it)"},
        {"grid-budget", "Largest number of grid points evaluated"},
    };
    const auto it = text.find(k);
    return it == text.end() ? k : it->second;
  }
};

const std::vector<std::string> kGraphKeys{"graph", "family", "n", "hops", "rows",
                                          "cols", "periodic", "edge-prob", "seed"};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  if (out.empty()) throw ValidationError("empty list \"" + s + "\"");
  return out;
}

// Sweeps use one engine thread per run and run configurations side by side.
int sweep_workers() {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  return threads_from_env(static_cast<int>(hw));
}

std::string trace_name(const std::string& alg, const std::string& hash, std::uint64_t seed,
                       const std::string& suffix = "") {
  return "trace-" + alg + suffix + "-" + hash + "-s" + std::to_string(seed) + ".csv";
}

void cmd_graph_gen(const ExperimentConfig& cfg, const std::string& out) {
  const Graph g = build_graph(cfg);
  emit(out, [&](std::ostream& os) { write_graph(os, g); });
}

void cmd_spectrum(const ExperimentConfig& cfg, int digits) {
  const Graph g = build_graph(cfg);
  const SpectralSummary s = spectral_summary(g);
  std::cout << "n,m,omega_star,omega_bar,omega_hat,omega_hat_delta,omega_n,omega_L,lambda1_L\n";
  std::cout << s.n << ',' << s.m << ',' << fmt(s.omega_star, digits) << ','
            << (s.omega_bar ? fmt(*s.omega_bar, digits) : "") << ',' << fmt(s.omega_hat, digits)
            << ',' << fmt(s.omega_hat_delta, digits) << ',' << fmt(s.omega_n, digits) << ','
            << fmt(s.omega_L, digits) << ',' << fmt(s.lambda1_L, digits) << '\n';
}

void cmd_tune(const ExperimentConfig& cfg, int digits) {
  const Graph g = build_graph(cfg);
  const SpectralSummary s = spectral_summary(g);
  const TuningResult t = tune_graph(g, s);
  const GdTuning gd = tune_gd(s);
  std::cout << "case_id,omega_star,omega_bar,rho_star,gamma_star,tau_star,alpha_gd,tau_gd\n";
  std::cout << to_string(t.case_id) << ',' << fmt(s.omega_star, digits) << ','
            << (s.omega_bar ? fmt(*s.omega_bar, digits) : "") << ',' << fmt(t.rho_star, digits)
            << ',' << fmt(t.gamma_star, digits) << ',' << fmt(t.tau_star, digits) << ','
            << fmt(gd.alpha_star, digits) << ',' << fmt(gd.tau_G_star, digits) << '\n';
}

void cmd_simulate(const ExperimentConfig& cfg, const std::string& out, const std::string& svg) {
  const RunResult r = run_configured(cfg);
  emit(out, [&](std::ostream& os) { write_trace_csv(os, r.trace); });
  if (!svg.empty()) {
    Series s{cfg.alg, {}, {}};
    for (const auto& row : r.trace.rows) {
      s.x.push_back(row.t);
      s.y.push_back(row.error);
    }
    auto os = open_out(svg);
    write_svg(os, {s}, cfg.alg + " " + format_params(r.params), "round", "error", true);
  }
  std::cerr << cfg.alg << ' ' << format_params(r.params) << " rounds=" << r.trace.rows.back().t
            << " error=" << fmt(r.trace.rows.back().error, 6)
            << (r.trace.converged ? " converged" : "") << '\n';
}

void cmd_rate(const std::string& path, int digits) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trace file " + path);
  const RateEstimate r = estimate_rate(read_trace_csv(in));
  std::cout << "tau_hat,window_start,window_end,residual\n";
  std::cout << fmt(r.tau_hat, digits) << ',' << r.window_start << ',' << r.window_end << ','
            << fmt(r.residual, digits) << '\n';
  if (!r.reliable) {
    std::cerr << "warning: fit residual " << fmt(r.residual, 3) << " exceeds "
              << kRateResidualThreshold << "; the tail is not geometric\n";
  }
}

void cmd_lift_check(const ExperimentConfig& cfg, double rho, double gamma,
                    std::optional<double> beta, const std::string& relation, int digits) {
  const Graph g = build_graph(cfg);
  const double b = beta.value_or(1.0 / (2.0 * g.num_edges()));
  LiftingRelation rel = LiftingRelation::Stated;
  if (relation == "consistent") {
    rel = LiftingRelation::Consistent;
  } else if (relation != "stated") {
    throw ValidationError("relation must be stated or consistent");
  }
  const LiftingResiduals r = verify_lifting(build_lifting(g, rho, gamma, b, rel), g);
  std::cout << "projection,flow,stationarity_G,stationarity_A,min_entry_A\n";
  std::cout << fmt(r.projection, digits) << ',' << fmt(r.flow, digits) << ','
            << fmt(r.stationarity_G, digits) << ',' << fmt(r.stationarity_A, digits) << ','
            << fmt(r.min_entry_A, digits) << '\n';
}

void cmd_compare(const ExperimentConfig& base, const std::string& algs_text,
                 const std::string& tuning, const std::string& dir, const std::string& svg) {
  const auto algs = split_list(algs_text);
  const std::string hash = config_hash(base, "algs = " + algs_text + "\ntuning = " + tuning + "\n");
  std::filesystem::create_directories(dir);
  const auto results = run_compare(base, algs, tuning, sweep_workers());

  auto summary = open_out(dir + "/compare-" + hash + ".csv");
  summary << "config_hash,seed,algorithm,params,rounds,converged,final_error,tau_hat,trace\n";
  std::vector<Series> series;
  for (std::size_t i = 0; i < algs.size(); ++i) {
    const Trace& tr = results[i].trace;
    const std::string file = trace_name(algs[i], hash, base.seed);
    auto os = open_out(dir + "/" + file);
    write_trace_csv(os, tr);
    std::string tau;
    try {
      tau = fmt(estimate_rate(tr).tau_hat, 17);
    } catch (const ValidationError&) {
      // too few rounds above the floor; leave the column empty
    }
    summary << hash << ',' << base.seed << ',' << algs[i] << ',' << format_params(results[i].params)
            << ',' << tr.rows.back().t << ',' << (tr.converged ? 1 : 0) << ','
            << fmt(tr.rows.back().error, 17) << ',' << tau << ',' << file << '\n';
    Series s{algs[i], {}, {}};
    for (const auto& row : tr.rows) {
      s.x.push_back(row.t);
      s.y.push_back(row.error);
    }
    series.push_back(std::move(s));
  }
  if (!svg.empty()) {
    auto os = open_out(svg);
    write_svg(os, series, "error per round (" + hash + ")", "round", "error", true);
  }
  std::cout << dir << "/compare-" << hash << ".csv\n";
}

void cmd_scaling(ScalingSpec spec, const std::string& algs_text, const std::string& sizes_text,
                 const std::string& dir, const std::string& svg) {
  spec.algs = split_list(algs_text);
  for (const auto& s : split_list(sizes_text)) {
    ExperimentConfig probe;
    set_config_value(probe, "n", s);
    spec.sizes.push_back(probe.n);
  }
  spec.workers = sweep_workers();
  char eps_text[32];
  std::snprintf(eps_text, sizeof eps_text, "%.17g", spec.eps);
  const std::string hash = config_hash(
      spec.base, "algs = " + algs_text + "\nsizes = " + sizes_text + "\ntuning = " + spec.tuning +
                     "\nmeasure = " + spec.measure + "\neps = " + eps_text +
                     "\nreplicates = " + std::to_string(spec.replicates) + "\n");
  std::filesystem::create_directories(dir);
  const ScalingResult res = run_scaling(spec);

  auto table = open_out(dir + "/scaling-" + hash + ".csv");
  table << "config_hash,seed,algorithm,n,params,time,trace\n";
  for (const auto& pt : res.points) {
    const std::string file = trace_name(pt.alg, hash, pt.seed, "-n" + std::to_string(pt.n));
    auto os = open_out(dir + "/" + file);
    write_trace_csv(os, pt.trace);
    table << hash << ',' << pt.seed << ',' << pt.alg << ',' << pt.n << ','
          << format_params(pt.params) << ',' << (pt.time ? std::to_string(*pt.time) : "") << ','
          << file << '\n';
  }
  auto fits = open_out(dir + "/scaling-fit-" + hash + ".csv");
  fits << "config_hash,seed,algorithm,slope,intercept,residual,points\n";
  std::vector<Series> series;
  for (const auto& f : res.fits) {
    fits << hash << ',' << spec.base.seed << ',' << f.alg << ',';
    if (f.fit) {
      fits << fmt(f.fit->slope, 17) << ',' << fmt(f.fit->intercept, 17) << ','
           << fmt(f.fit->residual, 17);
    } else {
      fits << ",,";
    }
    fits << ',' << f.points << '\n';
    Series s{f.alg, {}, {}};
    for (const auto& pt : res.points) {
      if (pt.alg == f.alg && pt.time && *pt.time > 0) {
        s.x.push_back(pt.n);
        s.y.push_back(*pt.time);
      }
    }
    series.push_back(std::move(s));
  }
  if (!svg.empty()) {
    auto os = open_out(svg);
    write_svg(os, series, "convergence time (" + hash + ")", "n", "rounds", true);
  }
  std::cout << dir << "/scaling-fit-" << hash << ".csv\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed consensus and optimization laboratory"};
  app.require_subcommand(1);
  app.footer("Exit codes: 0 ok, 1 usage, 2 invalid input, 3 divergence, 4 file error, 5 internal error.");

  std::function<void()> action;

  // graph gen
  auto* graph = app.add_subcommand("graph", "Graph utilities");
  graph->require_subcommand(1);
  auto* gen = graph->add_subcommand("gen", "Write a generated graph file");
  ConfigFlags gen_flags;
  gen_flags.add(gen, {"family", "n", "hops", "rows", "cols", "periodic", "edge-prob", "seed"});
  std::string gen_out;
  gen->add_option("--out,-o", gen_out, "Output file (default stdout)");
  gen->callback([&] { action = [&] { cmd_graph_gen(gen_flags.resolve(), gen_out); }; });

  auto add_graph_source = [](CLI::App* sub, ConfigFlags& flags, std::string& positional) {
    flags.add(sub, kGraphKeys);
    sub->add_option("graph_file", positional, "Graph file (same as --graph)");
  };
  auto graph_config = [](const ConfigFlags& flags, const std::string& positional) {
    ExperimentConfig c = flags.resolve();
    if (!positional.empty()) c.graph = positional;
    return c;
  };

  int digits = 5;
  auto* spectrum = app.add_subcommand("spectrum", "Spectral summary of a graph as one CSV row");
  ConfigFlags spec_flags;
  std::string spec_pos;
  add_graph_source(spectrum, spec_flags, spec_pos);
  spectrum->add_option("--digits", digits, "Significant digits")->check(CLI::Range(1, 17));
  spectrum->callback([&] { action = [&] { cmd_spectrum(graph_config(spec_flags, spec_pos), digits); }; });

  auto* tune = app.add_subcommand("tune", "Closed-form ADMM and GD tuning for a graph");
  ConfigFlags tune_flags;
  std::string tune_pos;
  add_graph_source(tune, tune_flags, tune_pos);
  tune->add_option("--digits", digits, "Significant digits")->check(CLI::Range(1, 17));
  tune->callback([&] { action = [&] { cmd_tune(graph_config(tune_flags, tune_pos), digits); }; });

  const auto all_keys = config_keys();

  auto* simulate = app.add_subcommand("simulate", "Run one algorithm and write its trace CSV");
  simulate->footer(kLatticeHelp);
  ConfigFlags sim_flags;
  sim_flags.add(simulate, all_keys);
  std::string sim_out, sim_svg;
  simulate->add_option("--out,-o", sim_out, "Trace CSV (default stdout)");
  simulate->add_option("--svg", sim_svg, "Error plot");
  simulate->callback([&] {
    action = [&] {
      ExperimentConfig c = sim_flags.resolve();
      if (sim_flags.options.at("threads")->count() == 0) c.threads = threads_from_env(c.threads);
      cmd_simulate(c, sim_out, sim_svg);
    };
  });

  auto* rate = app.add_subcommand("rate", "Fit the asymptotic rate of a trace CSV");
  std::string rate_path;
  rate->add_option("trace", rate_path, "Trace CSV")->required();
  rate->add_option("--digits", digits, "Significant digits")->check(CLI::Range(1, 17));
  rate->callback([&] { action = [&] { cmd_rate(rate_path, digits); }; });

  auto* lift = app.add_subcommand("lift-check", "Residuals of the lifted chain pair");
  ConfigFlags lift_flags;
  std::string lift_pos, relation = "stated";
  double lift_rho = 1, lift_gamma = 1;
  std::optional<double> lift_beta;
  lift_flags.add(lift, kGraphKeys);
  lift->add_option("graph_file", lift_pos, "Graph file (same as --graph)");
  lift->add_option("--rho", lift_rho, "Penalty parameter");
  lift->add_option("--gamma", lift_gamma, "Relaxation parameter");
  lift->add_option("--beta", lift_beta, "Laziness, default 1/(2m)");
  lift->add_option("--relation", relation, "stated or consistent");
  lift->add_option("--digits", digits, "Significant digits")->check(CLI::Range(1, 17));
  lift->callback([&] {
    action = [&] {
      cmd_lift_check(graph_config(lift_flags, lift_pos), lift_rho, lift_gamma, lift_beta, relation,
                     digits);
    };
  });

  auto* compare = app.add_subcommand("compare", "Run several algorithms on one configuration");
  compare->footer(kLatticeHelp);
  ConfigFlags cmp_flags;
  cmp_flags.add(compare, all_keys);
  std::string cmp_algs = "gd,admm,admm-consensus,pdmm,msda", cmp_tuning = "grid", cmp_dir = ".",
              cmp_svg;
  compare->add_option("--algs", cmp_algs, "Comma separated algorithms");
  compare->add_option("--tuning", cmp_tuning, "grid or default, applied to every parameter")
      ->check(CLI::IsMember({"grid", "default"}));
  compare->add_option("--out-dir", cmp_dir, "Directory for the summary and traces");
  compare->add_option("--svg", cmp_svg, "Error plot of all algorithms");
  compare->callback([&] {
    action = [&] { cmd_compare(cmp_flags.resolve(), cmp_algs, cmp_tuning, cmp_dir, cmp_svg); };
  });

  auto* scaling = app.add_subcommand("scaling", "Convergence time against graph size, with log-log fits");
  scaling->footer(kLatticeHelp);
  ConfigFlags sc_flags;
  sc_flags.add(scaling, all_keys);
  std::string sc_algs = "gd,admm", sc_sizes = "8,16,32", sc_dir = ".", sc_svg;
  ScalingSpec sc_spec;
  sc_spec.tuning = "grid";
  scaling->add_option("--algs", sc_algs, "Comma separated algorithms");
  scaling->add_option("--sizes", sc_sizes, "Comma separated node counts");
  scaling->add_option("--replicates", sc_spec.replicates,
                      "Runs per size with seeds seed, seed+1, ...; the fit uses the mean log time")
      ->check(CLI::Range(1, 1000));
  scaling->add_option("--tuning", sc_spec.tuning, "grid or default, applied to every parameter")
      ->check(CLI::IsMember({"grid", "default"}));
  scaling->add_option("--measure", sc_spec.measure,
                      "error: first round with error <= tol; objective: round after which the "
                      "objective stays within eps of its final value")
      ->check(CLI::IsMember({"error", "objective"}));
  scaling->add_option("--eps", sc_spec.eps, "Objective tolerance for --measure objective");
  scaling->add_option("--out-dir", sc_dir, "Directory for tables and traces");
  scaling->add_option("--svg", sc_svg, "Log-log plot");
  scaling->callback([&] {
    action = [&] {
      sc_spec.base = sc_flags.resolve();
      cmd_scaling(sc_spec, sc_algs, sc_sizes, sc_dir, sc_svg);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    action();
    return 0;
  } catch (const IoError& e) {
    std::cerr << "consensus-lab: " << e.what() << '\n';
    return 4;
  } catch (const DivergenceError& e) {
    std::cerr << "consensus-lab: diverged at round " << e.round() << ": " << e.what() << '\n';
    return 3;
  } catch (const ValidationError& e) {
    std::cerr << "consensus-lab: " << e.what() << '\n';
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "consensus-lab: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "consensus-lab: internal error: " << e.what() << '\n';
    return 5;
  }
}
