#include "adi/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "adi/attacker.hpp"
#include "adi/kernel.hpp"
#include "adi/preprocess.hpp"
#include "adi/rl_env.hpp"
#include "adi/solvers.hpp"
#include "adi/tdcycle.hpp"
#include "json.hpp"

namespace adi {

namespace {

const std::pair<Algorithm, const char*> kNames[] = {
    {Algorithm::Greedy, "greedy"}, {Algorithm::Ip, "ip"},     {Algorithm::Tdcycle, "tdcycle"},
    {Algorithm::IterLp, "iterlp"}, {Algorithm::MipF, "mipf"}, {Algorithm::MipLb, "miplb"},
    {Algorithm::Anytime, "anytime"},
};

bool pure(Algorithm a) {
  return a == Algorithm::Greedy || a == Algorithm::Ip || a == Algorithm::Tdcycle || a == Algorithm::Anytime;
}

}  // namespace

const char* algorithm_name(Algorithm a) {
  for (auto [k, n] : kNames)
    if (k == a) return n;
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  for (auto [k, n] : kNames)
    if (name == n) return k;
  throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
}

ExperimentSpec parse_experiment_spec(std::string_view text, const std::string& base_dir) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("experiment config: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("experiment config must be an object");
  ExperimentSpec s;
  try {
    if (j.contains("graph")) {
      std::string path = j.at("graph").get<std::string>();
      if (!path.empty() && path[0] != '/') path = base_dir + "/" + path;
      std::ifstream in(path);
      if (!in) throw std::invalid_argument("cannot read graph file " + path);
      std::stringstream ss;
      ss << in.rdbuf();
      s.graph_document = ss.str();
    }
    if (j.contains("generator")) {
      const auto& gj = j.at("generator");
      GeneratorParams p;
      p.n_vertices = gj.value("n_vertices", p.n_vertices);
      p.extra_edge_fraction = gj.value("extra_edge_fraction", p.extra_edge_fraction);
      p.n_entries = gj.value("n_entries", p.n_entries);
      p.high_failure_rate = gj.value("high_failure_rate", p.high_failure_rate);
      p.low_failure_rate = gj.value("low_failure_rate", p.low_failure_rate);
      p.high_rate_fraction = gj.value("high_rate_fraction", p.high_rate_fraction);
      p.entry_pool_size = gj.value("entry_pool_size", p.entry_pool_size);
      p.seed = gj.value("seed", p.seed);
      s.generator = p;
    }
    if (s.graph_document.has_value() == s.generator.has_value())
      throw std::invalid_argument("experiment config needs exactly one of \"graph\" and \"generator\"");
    for (const auto& b : j.at("budgets")) s.budgets.push_back(b.get<double>());
    for (const auto& a : j.at("algorithms")) s.algorithms.push_back(parse_algorithm(a.get<std::string>()));
    s.trials = j.value("trials", s.trials);
    s.base_seed = j.value("base_seed", s.base_seed);
    s.entry_count = j.value("entry_count", s.entry_count);
    s.entry_pool = j.value("entry_pool", s.entry_pool);
    s.regions = j.value("regions", s.regions);
    s.eps = j.value("eps", s.eps);
    s.anytime_iterations = j.value("iterations", s.anytime_iterations);
    s.width_cap = j.value("width_cap", s.width_cap);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("experiment config: ") + e.what());
  }
  if (s.trials < 1) throw std::invalid_argument("trials must be at least 1");
  if (s.algorithms.empty()) throw std::invalid_argument("algorithms must be nonempty");
  if (s.budgets.empty()) throw std::invalid_argument("budgets must be nonempty");
  for (double b : s.budgets)
    if (!(b >= 0.0)) throw std::invalid_argument("budgets must be nonnegative");
  return s;
}

ReportTable run_experiment(const ExperimentSpec& spec) {
  if (spec.trials < 1) throw std::invalid_argument("trials must be at least 1");
  if (spec.algorithms.empty()) throw std::invalid_argument("algorithms must be nonempty");

  AttackGraph base = spec.graph_document ? load_graph(*spec.graph_document) : generate_synthetic(*spec.generator);
  const std::size_t entries =
      spec.entry_count ? spec.entry_count : (spec.generator ? spec.generator->n_entries : 0);
  const std::size_t pool = spec.entry_pool ? spec.entry_pool : (spec.generator ? spec.generator->entry_pool_size : 0);

  struct Acc {
    double value = 0.0, seconds = 0.0;
    int ok = 0;
    std::string note;
  };
  std::map<std::pair<std::size_t, std::size_t>, Acc> acc;  // (algorithm index, budget index)

  for (int t = 0; t < spec.trials; ++t) {
    const std::uint64_t seed = spec.base_seed + static_cast<std::uint64_t>(t);
    const AttackGraph g = entries ? redraw_entries_and_blockable(base, entries, pool, seed) : base;
    const AttackGraph pruned = prune(g).graph;
    std::optional<KernelGraph> kernel;
    std::optional<NiceTreeDecomposition> ntd;
    for (std::size_t ai = 0; ai < spec.algorithms.size(); ++ai) {
      const Algorithm algo = spec.algorithms[ai];
      for (std::size_t bi = 0; bi < spec.budgets.size(); ++bi) {
        const double b = spec.budgets[bi];
        Acc& cell = acc[{ai, bi}];
        if (pure(algo) && b != std::floor(b)) {
          cell.note = "integer budget required";
          continue;
        }
        const int ib = static_cast<int>(b);
        const auto start = std::chrono::steady_clock::now();
        try {
          double value = 0.0;
          auto need_kernel = [&]() -> const KernelGraph& {
            if (!kernel) kernel = kernelize(pruned);
            return *kernel;
          };
          auto need_ntd = [&]() -> const NiceTreeDecomposition& {
            if (!ntd) ntd = to_nice(best_decomposition(pruned), pruned);
            return *ntd;
          };
          switch (algo) {
            case Algorithm::Greedy: value = greedy_defense(pruned, ib).value; break;
            case Algorithm::Ip: value = solve_pure_ip(need_kernel(), ib).value; break;
            case Algorithm::Tdcycle: {
              TdcycleOptions opt;
              opt.width_cap = spec.width_cap;
              value = solve_pure(pruned, need_ntd(), ib, opt).value;
              break;
            }
            case Algorithm::IterLp: value = solve_mixed_iterlp(need_kernel(), b, spec.eps).value; break;
            case Algorithm::MipF:
              value = solve_mixed_mip(need_kernel(), b, MipKind::Feasible, spec.regions, spec.eps).value;
              break;
            case Algorithm::MipLb:
              value = *solve_mixed_mip(need_kernel(), b, MipKind::LowerBound, spec.regions, spec.eps).bound;
              break;
            case Algorithm::Anytime: {
              const NiceTreeDecomposition& nice = need_ntd();
              if (nice.width() + 1 > 16) throw WidthExceeded("tree width too large for the environment");
              Environment env = build_env(pruned, nice, ib);
              value = anytime_search(env, spec.anytime_iterations, seed).best_value;
              break;
            }
          }
          cell.value += value;
          ++cell.ok;
        } catch (const std::exception& e) {
          if (cell.note.empty()) cell.note = e.what();
        }
        cell.seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      }
    }
  }

  ReportTable table;
  table.trials = spec.trials;
  table.base_seed = spec.base_seed;
  for (std::size_t ai = 0; ai < spec.algorithms.size(); ++ai)
    for (std::size_t bi = 0; bi < spec.budgets.size(); ++bi) {
      const Acc& a = acc[{ai, bi}];
      ReportCell c;
      c.algorithm = spec.algorithms[ai];
      c.budget = spec.budgets[bi];
      c.trials_ok = a.ok;
      c.mean_seconds = a.seconds / spec.trials;
      if (a.ok == spec.trials) c.mean_success = a.value / spec.trials;
      c.note = a.note;
      table.cells.push_back(c);
    }
  return table;
}

std::string experiment_json(const ReportTable& table) {
  nlohmann::ordered_json j;
  j["version"] = kReportVersion;
  j["trials"] = table.trials;
  j["base_seed"] = table.base_seed;
  j["cells"] = nlohmann::json::array();
  for (const auto& c : table.cells) {
    nlohmann::ordered_json cj;
    cj["algorithm"] = algorithm_name(c.algorithm);
    cj["budget"] = c.budget;
    cj["mean_success_rate"] = c.mean_success ? nlohmann::json(*c.mean_success) : nlohmann::json(nullptr);
    cj["mean_seconds"] = c.mean_seconds;
    cj["trials_ok"] = c.trials_ok;
    if (!c.note.empty()) cj["note"] = c.note;
    j["cells"].push_back(cj);
  }
  return j.dump(2);
}

std::string experiment_text(const ReportTable& table) {
  std::vector<double> budgets;
  std::vector<Algorithm> algos;
  for (const auto& c : table.cells) {
    if (std::find(budgets.begin(), budgets.end(), c.budget) == budgets.end()) budgets.push_back(c.budget);
    if (std::find(algos.begin(), algos.end(), c.algorithm) == algos.end()) algos.push_back(c.algorithm);
  }
  std::string out;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-10s", "algorithm");
  out += buf;
  for (double b : budgets) {
    std::snprintf(buf, sizeof buf, " %10s", ("b=" + nlohmann::json(b).dump()).c_str());
    out += buf;
  }
  out += "\n";
  for (Algorithm a : algos) {
    std::snprintf(buf, sizeof buf, "%-10s", algorithm_name(a));
    out += buf;
    for (double b : budgets) {
      std::string v = "-";
      for (const auto& c : table.cells)
        if (c.algorithm == a && c.budget == b && c.mean_success) {
          std::snprintf(buf, sizeof buf, "%.3f", *c.mean_success);
          v = buf;
        }
      std::snprintf(buf, sizeof buf, " %10s", v.c_str());
      out += buf;
    }
    out += "\n";
  }
  return out;
}

}  // namespace adi
