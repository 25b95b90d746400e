#include "adi/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <unordered_map>

namespace adi {

namespace {

double neg_log1m(double x) { return -std::log1p(-x); }

// Unblocked success rate from every vertex to DA.
std::vector<double> success_to_da(const AttackGraph& g) {
  std::vector<double> dist(g.num_vertices(), kInf);
  using Item = std::pair<double, VertexId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[g.da()] = 0.0;
  heap.push({0.0, g.da()});
  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (d > dist[v]) continue;
    for (EdgeId e : g.in_edges(v)) {
      const VertexId u = g.edge(e).src;
      const double nd = d + neg_log1m(g.edge(e).failure_rate);
      if (nd < dist[u]) {
        dist[u] = nd;
        heap.push({nd, u});
      }
    }
  }
  std::vector<double> out(dist.size());
  for (std::size_t v = 0; v < dist.size(); ++v) out[v] = std::exp(-dist[v]);
  return out;
}

struct VarMap {
  std::unordered_map<VertexId, int> r;
  std::unordered_map<EdgeId, int> b;
  int star = -1;
};

std::string vname(const char* prefix, int id) { return prefix + std::to_string(id); }

// Shared part of the log-domain models: r'* <= r'_u on entries, r'_DA = 0.
VarMap log_domain_vertices(LinearProgram& lp, const KernelGraph& k) {
  VarMap vm;
  lp.sense = Sense::Maximize;
  vm.star = lp.add_variable("rstar", -kInf, kInf);
  lp.objective = {{vm.star, 1.0}};
  for (VertexId v : k.vertices) {
    const bool da = v == k.graph.da();
    vm.r[v] = lp.add_variable(vname("r", v), da ? 0.0 : -kInf, da ? 0.0 : kInf);
  }
  for (VertexId u : k.graph.entries())
    lp.add_constraint(vname("entry", u), {{vm.star, 1.0}, {vm.r.at(u), -1.0}}, Relation::LessEqual, 0.0);
  return vm;
}

bool trivial(const KernelGraph& k, double budget) {
  return budget <= 0.0 || k.bw_edges.empty() || k.graph.entries().empty();
}

MixedDefense unblocked(const KernelGraph& k) {
  MixedDefense out;
  out.policy = BlockingPolicy::none(k.graph, PolicyMode::Mixed);
  out.value = best_attack(k.graph, out.policy).success_rate;
  return out;
}

}  // namespace

LinearProgram pure_ip_model(const KernelGraph& k, int budget) {
  const AttackGraph& g = k.graph;
  const auto reach = success_to_da(g);
  LinearProgram lp;
  lp.sense = Sense::Minimize;
  const int star = lp.add_variable("rstar", 0.0, 1.0);
  lp.objective = {{star, 1.0}};
  std::unordered_map<VertexId, int> r;
  for (VertexId v : k.vertices) {
    const bool da = v == g.da();
    r[v] = lp.add_variable(vname("r", v), da ? 1.0 : 0.0, 1.0);
  }
  std::unordered_map<EdgeId, int> b;
  for (EdgeId e : k.bw_edges) b[e] = lp.add_variable(vname("B", e), 0.0, 1.0, VarType::Binary);
  for (VertexId u : g.entries())
    lp.add_constraint(vname("entry", u), {{star, 1.0}, {r.at(u), -1.0}}, Relation::GreaterEqual, 0.0);
  for (std::size_t i = 0; i < k.meta_edges.size(); ++i) {
    const auto& p = k.meta_edges[i];
    Terms t{{r.at(p.origin), 1.0}, {r.at(p.dest), -p.c}};
    if (p.bw) t.push_back({b.at(*p.bw), p.c * reach[p.dest]});
    lp.add_constraint(vname("path", static_cast<int>(i)), std::move(t), Relation::GreaterEqual, 0.0);
  }
  if (!k.bw_edges.empty()) {
    Terms t;
    for (EdgeId e : k.bw_edges) t.push_back({b.at(e), 1.0});
    lp.add_constraint("budget", std::move(t), Relation::LessEqual, budget);
  }
  return lp;
}

DefenseSolution solve_pure_ip(const KernelGraph& k, int budget, double gap_tol) {
  if (budget < 0) throw std::invalid_argument("budget must be nonnegative");
  const LinearProgram lp = pure_ip_model(k, budget);
  const MipSolution mip = bb_solve(lp, gap_tol);
  if (mip.x.empty()) throw SolverError(std::string("pure IP failed: ") + status_name(mip.status));
  std::vector<EdgeId> blocked;
  for (std::size_t j = 0; j < lp.variables.size(); ++j)
    if (lp.variables[j].type == VarType::Binary && mip.x[j] > 0.5)
      blocked.push_back(std::stoi(lp.variables[j].name.substr(1)));
  std::sort(blocked.begin(), blocked.end());
  DefenseSolution sol;
  sol.policy = BlockingPolicy::pure(k.graph, blocked);
  sol.value = best_attack(k.graph, sol.policy).success_rate;
  sol.optimal = mip.status == LpStatus::Optimal;
  return sol;
}

LinearProgram iterlp_model(const KernelGraph& k, double linear_budget, double eps) {
  LinearProgram lp;
  VarMap vm = log_domain_vertices(lp, k);
  const double cap = neg_log1m(1.0 - eps);
  for (EdgeId e : k.bw_edges) vm.b[e] = lp.add_variable(vname("Bp", e), 0.0, cap);
  for (std::size_t i = 0; i < k.meta_edges.size(); ++i) {
    const auto& p = k.meta_edges[i];
    Terms t{{vm.r.at(p.origin), 1.0}, {vm.r.at(p.dest), -1.0}};
    if (p.bw) t.push_back({vm.b.at(*p.bw), -1.0});
    lp.add_constraint(vname("path", static_cast<int>(i)), std::move(t), Relation::LessEqual, -std::log(p.c));
  }
  if (!k.bw_edges.empty()) {
    Terms t;
    for (EdgeId e : k.bw_edges) t.push_back({vm.b.at(e), 1.0});
    lp.add_constraint("budget", std::move(t), Relation::LessEqual, linear_budget);
  }
  return lp;
}

MixedDefense solve_mixed_iterlp(const KernelGraph& k, double budget, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0,1)");
  if (trivial(k, budget)) return unblocked(k);
  MixedDefense out;
  struct Guess {
    std::vector<double> bprime;
    double spend = 0.0;
  };
  auto solve = [&](double guess) {
    const LinearProgram lp = iterlp_model(k, guess, eps);
    const LpSolution sol = lp_solve(lp);
    ++out.lp_solves;
    if (sol.status != LpStatus::Optimal) throw SolverError(std::string("IterLP: LP ") + status_name(sol.status));
    Guess gs;
    for (std::size_t j = 0; j < lp.variables.size(); ++j)
      if (lp.variables[j].name.rfind("Bp", 0) == 0) {
        const double v = std::max(0.0, sol.x[j]);
        gs.bprime.push_back(v);
        gs.spend += 1.0 - std::exp(-v);
      }
    return gs;
  };
  double lo = 0.0, hi = static_cast<double>(k.bw_edges.size()) * neg_log1m(1.0 - eps);
  Guess accepted = solve(hi);
  if (accepted.spend > budget + 1e-9) {
    accepted = solve(lo);
    while (hi - lo >= 1e-6) {
      const double mid = 0.5 * (lo + hi);
      Guess gs = solve(mid);
      if (gs.spend <= budget + 1e-9) {
        lo = mid;
        accepted = std::move(gs);
      } else {
        hi = mid;
      }
    }
  }
  out.policy = BlockingPolicy::none(k.graph, PolicyMode::Mixed);
  for (std::size_t i = 0; i < k.bw_edges.size(); ++i)
    out.policy.probability[k.bw_edges[i]] = std::min(1.0 - eps, 1.0 - std::exp(-accepted.bprime[i]));
  out.value = best_attack(k.graph, out.policy).success_rate;
  return out;
}

double PiecewiseLinear::operator()(double x) const {
  std::size_t r = 0;
  while (r + 1 < regions() && x > breakpoints[r + 1]) ++r;
  return slopes[r] * x + intercepts[r];
}

std::pair<PiecewiseLinear, PiecewiseLinear> piecewise_bounds(int n_regions, double eps) {
  if (n_regions < 1) throw std::invalid_argument("need at least one region");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0,1)");
  const double top = 1.0 - eps;
  std::vector<double> bp;
  for (int i = 0; i < n_regions; ++i) {
    const double x = static_cast<double>(i) / n_regions;
    if (x < top - 1e-12) bp.push_back(x);
  }
  bp.push_back(top);
  PiecewiseLinear up{BoundKind::Upper, bp, {}, {}}, low{BoundKind::Lower, bp, {}, {}};
  for (std::size_t r = 0; r + 1 < bp.size(); ++r) {
    const double a = bp[r], b = bp[r + 1];
    const double s = (neg_log1m(b) - neg_log1m(a)) / (b - a);
    up.slopes.push_back(s);
    up.intercepts.push_back(neg_log1m(a) - s * a);
    const double m = 0.5 * (a + b);
    const double t = 1.0 / (1.0 - m);
    low.slopes.push_back(t);
    low.intercepts.push_back(neg_log1m(m) - t * m);
  }
  return {up, low};
}

LinearProgram mixed_mip_model(const KernelGraph& k, double budget, MipKind kind, int n_regions, double eps) {
  const auto [upper, lower] = piecewise_bounds(n_regions, eps);
  const PiecewiseLinear& pw = kind == MipKind::Feasible ? lower : upper;
  LinearProgram lp;
  VarMap vm = log_domain_vertices(lp, k);
  std::unordered_map<EdgeId, std::vector<std::pair<int, int>>> pieces;  // (z, w) per region
  Terms spend;
  for (EdgeId e : k.bw_edges) {
    Terms choose;
    for (std::size_t r = 0; r < pw.regions(); ++r) {
      const std::string suffix = std::to_string(e) + "_" + std::to_string(r);
      const int z = lp.add_variable("z" + suffix, 0.0, 1.0, VarType::Binary);
      const int w = lp.add_variable("w" + suffix, 0.0, pw.breakpoints[r + 1]);
      pieces[e].push_back({z, w});
      choose.push_back({z, 1.0});
      spend.push_back({w, 1.0});
      lp.add_constraint("lo" + suffix, {{w, 1.0}, {z, -pw.breakpoints[r]}}, Relation::GreaterEqual, 0.0);
      lp.add_constraint("hi" + suffix, {{w, 1.0}, {z, -pw.breakpoints[r + 1]}}, Relation::LessEqual, 0.0);
    }
    lp.add_constraint(vname("one", e), std::move(choose), Relation::Equal, 1.0);
  }
  for (std::size_t i = 0; i < k.meta_edges.size(); ++i) {
    const auto& p = k.meta_edges[i];
    Terms t{{vm.r.at(p.origin), 1.0}, {vm.r.at(p.dest), -1.0}};
    if (p.bw)
      for (std::size_t r = 0; r < pw.regions(); ++r) {
        auto [z, w] = pieces.at(*p.bw)[r];
        t.push_back({w, -pw.slopes[r]});
        t.push_back({z, -pw.intercepts[r]});
      }
    lp.add_constraint(vname("path", static_cast<int>(i)), std::move(t), Relation::LessEqual, -std::log(p.c));
  }
  if (!spend.empty()) lp.add_constraint("budget", std::move(spend), Relation::LessEqual, budget);
  return lp;
}

MixedDefense solve_mixed_mip(const KernelGraph& k, double budget, MipKind kind, int n_regions, double eps,
                             double gap_tol) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0,1)");
  if (trivial(k, budget)) {
    MixedDefense out = unblocked(k);
    if (kind == MipKind::LowerBound) out.bound = out.value;
    return out;
  }
  const LinearProgram lp = mixed_mip_model(k, budget, kind, n_regions, eps);
  const MipSolution mip = bb_solve(lp, gap_tol);
  if (mip.x.empty()) throw SolverError(std::string("mixed MIP failed: ") + status_name(mip.status));
  MixedDefense out;
  out.lp_solves = mip.nodes;
  out.policy = BlockingPolicy::none(k.graph, PolicyMode::Mixed);
  for (std::size_t j = 0; j < lp.variables.size(); ++j) {
    const std::string& name = lp.variables[j].name;
    if (name[0] != 'w') continue;
    const EdgeId e = std::stoi(name.substr(1, name.find('_') - 1));
    out.policy.probability[e] += std::max(0.0, mip.x[j]);
  }
  for (EdgeId e : k.bw_edges) out.policy.probability[e] = std::min(out.policy.probability[e], 1.0 - eps);
  out.value = best_attack(k.graph, out.policy).success_rate;
  if (kind == MipKind::LowerBound) out.bound = std::exp(-mip.best_bound);
  return out;
}

DefenseSolution greedy_defense(const AttackGraph& g, int budget) {
  if (budget < 0) throw std::invalid_argument("budget must be nonnegative");
  DefenseSolution sol;
  sol.policy = BlockingPolicy::none(g);
  sol.value = best_attack(g, sol.policy).success_rate;
  for (int round = 0; round < budget; ++round) {
    EdgeId pick = -1;
    double best = kInf;
    for (std::size_t e = 0; e < g.num_edges(); ++e) {
      if (!g.edges()[e].blockable || sol.policy.probability[e] == 1.0) continue;
      sol.policy.probability[e] = 1.0;
      const double v = best_attack(g, sol.policy).success_rate;
      sol.policy.probability[e] = 0.0;
      if (v < best - 1e-12) {
        best = v;
        pick = static_cast<EdgeId>(e);
      }
    }
    if (pick < 0) break;
    sol.policy.probability[pick] = 1.0;
    sol.value = best;
  }
  return sol;
}

}  // namespace adi
