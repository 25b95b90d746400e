#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "adi/attacker.hpp"
#include "adi/experiment.hpp"
#include "adi/graph.hpp"
#include "adi/kernel.hpp"
#include "adi/lp_format.hpp"
#include "adi/preprocess.hpp"
#include "adi/rl_env.hpp"
#include "adi/solvers.hpp"
#include "adi/tdcycle.hpp"
#include "adi/treedecomp.hpp"
#include "json.hpp"

using namespace adi;
using nlohmann::ordered_json;

namespace {

constexpr int kInputError = 2;
constexpr int kSolverError = 3;

// Bad files or arguments found after CLI parsing.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_text(const std::string& path) {
  if (path == "-") {
    std::stringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& out, std::string text) {
  if (text.empty() || text.back() != '\n') text += '\n';
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw InputError("cannot write " + out);
  f << text;
}

AttackGraph read_graph(const std::string& path) {
  std::vector<std::string> warnings;
  AttackGraph g = load_graph(read_text(path), &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  return g;
}

ordered_json policy_json(const AttackGraph& g, const BlockingPolicy& p) {
  ordered_json arr = ordered_json::array();
  for (EdgeId e : p.blocked()) {
    ordered_json ej;
    ej["src"] = g.label(g.edge(e).src);
    ej["dst"] = g.label(g.edge(e).dst);
    ej["probability"] = p.probability[static_cast<std::size_t>(e)];
    arr.push_back(ej);
  }
  return arr;
}

struct SolveArgs {
  std::string input;
  std::string algo = "tdcycle";
  double budget = 0;
  int regions = kDefaultRegions;
  double eps = kDefaultEps;
  std::string export_lp;
  int iterations = 500;
  int episode_limit = 0;
  std::string obs_mode = "full";
  std::uint64_t seed = 0;
  int width_cap = 8;
};

int as_int_budget(double b) {
  if (b != std::floor(b) || b < 0) throw InputError("pure strategies need a nonnegative integer budget");
  return static_cast<int>(b);
}

LinearProgram lp_for(const std::string& model, const KernelGraph& k, double budget, int regions, double eps) {
  if (model == "ip") return pure_ip_model(k, as_int_budget(budget));
  if (model == "iterlp") return iterlp_model(k, budget, eps);
  if (model == "mipf") return mixed_mip_model(k, budget, MipKind::Feasible, regions, eps);
  if (model == "miplb") return mixed_mip_model(k, budget, MipKind::LowerBound, regions, eps);
  throw InputError("no LP model for '" + model + "'");
}

std::string run_solve(const SolveArgs& a) {
  const AttackGraph g = read_graph(a.input);
  if (a.budget < 0) throw InputError("budget must be nonnegative");
  const AttackGraph pruned = prune(g).graph;

  ordered_json out;
  out["algorithm"] = a.algo;
  out["budget"] = a.budget;
  BlockingPolicy policy;
  const AttackGraph* on = &pruned;
  bool optimal = false;
  std::optional<double> bound;
  ordered_json stats = ordered_json::object();
  std::optional<KernelGraph> kernel;

  const bool lp_algo = a.algo == "ip" || a.algo == "iterlp" || a.algo == "mipf" || a.algo == "miplb";
  if (lp_algo) {
    kernel = kernelize(pruned);
    stats["nsp"] = kernel->nsp_count();
    if (!a.export_lp.empty()) write_text(a.export_lp, write_lp(lp_for(a.algo, *kernel, a.budget, a.regions, a.eps)));
  } else if (!a.export_lp.empty()) {
    throw InputError("--export-lp applies to ip, iterlp, mipf and miplb");
  }

  if (a.algo == "tdcycle") {
    TdcycleOptions opt;
    opt.width_cap = a.width_cap;
    TdcycleStats st;
    DefenseSolution s;
    try {
      s = solve_pure(pruned, as_int_budget(a.budget), opt, &st);
    } catch (const WidthExceeded& e) {
      throw WidthExceeded(std::string(e.what()) + "; try --algo ip or --algo anytime");
    }
    policy = s.policy;
    optimal = s.optimal;
    stats["max_tuple_set"] = st.max_tuple_set;
    stats["peak_live_tuples"] = st.peak_live_tuples;
    stats["nodes"] = st.nodes;
  } else if (a.algo == "ip") {
    DefenseSolution s = solve_pure_ip(*kernel, as_int_budget(a.budget));
    policy = s.policy;
    on = &kernel->graph;
    optimal = s.optimal;
  } else if (a.algo == "iterlp" || a.algo == "mipf" || a.algo == "miplb") {
    MixedDefense m = a.algo == "iterlp" ? solve_mixed_iterlp(*kernel, a.budget, a.eps)
                                        : solve_mixed_mip(*kernel, a.budget,
                                                          a.algo == "mipf" ? MipKind::Feasible : MipKind::LowerBound,
                                                          a.regions, a.eps);
    policy = m.policy;
    on = &kernel->graph;
    bound = m.bound;
    stats["lp_solves"] = m.lp_solves;
  } else if (a.algo == "greedy") {
    policy = greedy_defense(pruned, as_int_budget(a.budget)).policy;
  } else if (a.algo == "brute") {
    BruteForceResult r = brute_force_defense(pruned, as_int_budget(a.budget));
    policy = r.policy;
    optimal = true;
    stats["evaluated"] = r.evaluated;
  } else if (a.algo == "anytime") {
    EnvOptions opt;
    if (a.episode_limit > 0) opt.episode_limit = a.episode_limit;
    if (a.obs_mode == "full") opt.obs_mode = ObsMode::Full;
    else if (a.obs_mode == "zero") opt.obs_mode = ObsMode::Zero;
    else if (a.obs_mode == "random") opt.obs_mode = ObsMode::Random;
    else throw InputError("unknown observation mode '" + a.obs_mode + "'");
    opt.obs_seed = a.seed;
    Environment env = build_env(pruned, as_int_budget(a.budget), opt);
    SearchResult r = anytime_search(env, a.iterations, a.seed);
    policy = translate_policy(r.best_policy, env.graph(), pruned);
    stats["evaluations"] = r.evaluations;
    stats["decisions"] = env.schedule().size();
  } else {
    throw InputError("unknown algorithm '" + a.algo + "'");
  }

  BlockingPolicy original = translate_policy(policy, *on, g);
  const AttackResult attack = best_attack(g, original);
  out["mode"] = original.mode == PolicyMode::Pure ? "pure" : "mixed";
  out["value"] = attack.success_rate;
  if (bound) out["lower_bound"] = *bound;
  out["optimal"] = optimal;
  out["blocked"] = policy_json(g, original);
  ordered_json path = ordered_json::array();
  if (!attack.path.empty()) path.push_back(g.label(g.edge(attack.path.front()).src));
  for (EdgeId e : attack.path) path.push_back(g.label(g.edge(e).dst));
  out["attack_path"] = path;
  out["stats"] = stats;
  return out.dump(2);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Edge-blocking defenses for Active Directory attack graphs"};
  app.require_subcommand(1);
  std::string out;

  // generate
  auto* gen = app.add_subcommand("generate", "Generate a synthetic attack graph");
  GeneratorParams gp;
  gen->add_option("--n", gp.n_vertices, "Number of vertices")->capture_default_str();
  gen->add_option("--extra-edges", gp.extra_edge_fraction, "Extra edges as a fraction of n")->capture_default_str();
  gen->add_option("--entries", gp.n_entries, "Number of entry vertices")->capture_default_str();
  gen->add_option("--high-rate", gp.high_failure_rate, "High failure rate")->capture_default_str();
  gen->add_option("--low-rate", gp.low_failure_rate, "Low failure rate")->capture_default_str();
  gen->add_option("--high-fraction", gp.high_rate_fraction, "Fraction of edges with the high rate")
      ->capture_default_str();
  gen->add_option("--entry-pool", gp.entry_pool_size, "Entry pool size (0 = twice the entries)")
      ->capture_default_str();
  gen->add_option("--seed", gp.seed, "Random seed")->capture_default_str();
  gen->add_option("--out", out, "Output path (default stdout)");

  std::string input;
  auto add_input = [&](CLI::App* sub) { sub->add_option("graph", input, "Graph JSON file ('-' for stdin)")->required(); };

  auto* val = app.add_subcommand("validate", "Check a graph and print diagnostics");
  add_input(val);
  val->add_option("--out", out, "Output path (default stdout)");

  auto* pre = app.add_subcommand("preprocess", "Merge admin vertices and prune; prints report and graph");
  add_input(pre);
  std::vector<std::string> admins;
  pre->add_option("--admins", admins, "Labels of admin vertices to merge into DA")->delimiter(',');
  pre->add_option("--out", out, "Output path (default stdout)");

  auto* tw = app.add_subcommand("treewidth", "Tree decomposition width and nice-form node counts");
  add_input(tw);
  tw->add_option("--out", out, "Output path (default stdout)");

  auto* ker = app.add_subcommand("kernelize", "Non-splitting-path kernel");
  add_input(ker);
  ker->add_option("--out", out, "Output path (default stdout)");

  auto* sol = app.add_subcommand("solve", "Compute a defense");
  SolveArgs sa;
  sol->add_option("graph", sa.input, "Graph JSON file ('-' for stdin)")->required();
  sol->add_option("--algo", sa.algo, "Algorithm")
      ->check(CLI::IsMember({"tdcycle", "ip", "iterlp", "mipf", "miplb", "greedy", "anytime", "brute"}))
      ->capture_default_str();
  sol->add_option("--budget", sa.budget, "Defense budget")->required();
  sol->add_option("--regions", sa.regions, "Piecewise regions for mipf/miplb")->capture_default_str();
  sol->add_option("--eps", sa.eps, "Block probabilities are capped at 1 - eps")->capture_default_str();
  sol->add_option("--export-lp", sa.export_lp, "Also write the LP/MIP model to this path");
  sol->add_option("--iterations", sa.iterations, "Anytime search episodes")->capture_default_str();
  sol->add_option("--episode-limit", sa.episode_limit, "Limit anytime decisions to about this many edges (0 = off)")
      ->capture_default_str();
  sol->add_option("--obs-mode", sa.obs_mode, "Anytime observations")
      ->check(CLI::IsMember({"full", "zero", "random"}))
      ->capture_default_str();
  sol->add_option("--seed", sa.seed, "Anytime search seed")->capture_default_str();
  sol->add_option("--width-cap", sa.width_cap, "Largest tree width tdcycle accepts")->capture_default_str();
  sol->add_option("--out", out, "Output path (default stdout)");

  auto* exp = app.add_subcommand("experiment", "Run an experiment from a JSON config");
  std::string config;
  std::string format = "json";
  exp->add_option("config", config, "Experiment config JSON")->required();
  exp->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "text"}))->capture_default_str();
  exp->add_option("--out", out, "Output path (default stdout)");

  auto* exl = app.add_subcommand("export-lp", "Write a solver model in LP format");
  std::string model = "ip";
  double budget = 0;
  int regions = kDefaultRegions;
  double eps = kDefaultEps;
  add_input(exl);
  exl->add_option("--model", model, "Model; for iterlp the budget is the log-domain budget")
      ->check(CLI::IsMember({"ip", "iterlp", "mipf", "miplb"}))
      ->capture_default_str();
  exl->add_option("--budget", budget, "Budget")->required();
  exl->add_option("--regions", regions, "Piecewise regions")->capture_default_str();
  exl->add_option("--eps", eps, "Block probability cap offset")->capture_default_str();
  exl->add_option("--out", out, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kInputError;
  }

  try {
    if (*gen) {
      write_text(out, serialize_graph(generate_synthetic(gp)));
    } else if (*val) {
      const AttackGraph g = read_graph(input);
      write_text(out, diagnostics_json(validate(g), g));
    } else if (*pre) {
      const AttackGraph g = read_graph(input);
      PreprocessReport report;
      std::vector<VertexId> ids;
      for (const auto& l : admins) {
        auto v = g.find_vertex(l);
        if (!v) throw InputError("unknown admin vertex '" + l + "'");
        ids.push_back(*v);
      }
      AttackGraph merged = ids.empty() ? g : merge_admins(g, ids, &report);
      PruneResult pr = prune(merged);
      pr.report.merged_admin_count = report.merged_admin_count;
      for (auto& w : report.warnings) pr.report.warnings.insert(pr.report.warnings.begin(), w);
      ordered_json j;
      j["report"] = ordered_json::parse(report_json(pr.report));
      j["graph"] = ordered_json::parse(serialize_graph(pr.graph));
      write_text(out, j.dump(2));
    } else if (*tw) {
      const AttackGraph g = read_graph(input);
      const TreeDecomposition td = best_decomposition(g);
      write_text(out, treewidth_json(td, to_nice(td, g)));
    } else if (*ker) {
      const AttackGraph g = read_graph(input);
      write_text(out, kernel_json(kernelize(prune(g).graph)));
    } else if (*sol) {
      write_text(out, run_solve(sa));
    } else if (*exp) {
      std::string dir = ".";
      if (auto pos = config.rfind('/'); pos != std::string::npos) dir = config.substr(0, pos);
      ExperimentSpec spec;
      try {
        spec = parse_experiment_spec(read_text(config), dir);
      } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
      }
      ReportTable table = run_experiment(spec);
      write_text(out, format == "json" ? experiment_json(table) : experiment_text(table));
    } else if (*exl) {
      const AttackGraph g = read_graph(input);
      write_text(out, write_lp(lp_for(model, kernelize(prune(g).graph), budget, regions, eps)));
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const GraphError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const WidthExceeded& e) {
    std::cerr << "solver failed: " << e.what() << "\n";
    return kSolverError;
  } catch (const TupleLimitExceeded& e) {
    std::cerr << "solver failed: " << e.what() << "; try --algo ip or --algo anytime\n";
    return kSolverError;
  } catch (const std::exception& e) {
    std::cerr << "solver failed: " << e.what() << "\n";
    return kSolverError;
  }
  return 0;
}
