#include "adi/attacker.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace adi {

BlockingPolicy BlockingPolicy::none(const AttackGraph& g, PolicyMode mode) {
  return {mode, std::vector<double>(g.num_edges(), 0.0)};
}

BlockingPolicy BlockingPolicy::pure(const AttackGraph& g, std::span<const EdgeId> blocked) {
  BlockingPolicy p = none(g);
  for (EdgeId e : blocked) p.probability.at(static_cast<std::size_t>(e)) = 1.0;
  return p;
}

double BlockingPolicy::total() const {
  double s = 0.0;
  for (double x : probability) s += x;
  return s;
}

std::vector<EdgeId> BlockingPolicy::blocked() const {
  std::vector<EdgeId> out;
  for (std::size_t i = 0; i < probability.size(); ++i)
    if (probability[i] > 0.0) out.push_back(static_cast<EdgeId>(i));
  return out;
}

void BlockingPolicy::check(const AttackGraph& g) const {
  if (probability.size() != g.num_edges()) throw GraphError("policy size does not match graph");
  for (std::size_t i = 0; i < probability.size(); ++i) {
    const double p = probability[i];
    if (!(p >= 0.0 && p <= 1.0)) throw GraphError("block probability outside [0,1]");
    if (p > 0.0 && !g.edges()[i].blockable)
      throw GraphError("policy blocks unblockable edge " + g.edge_label(static_cast<EdgeId>(i)));
    if (mode == PolicyMode::Pure && p != 0.0 && p != 1.0)
      throw GraphError("pure policy has fractional probability");
  }
}

double edge_distance(double f, double b) {
  if (!(f >= 0.0 && f < 1.0)) throw std::domain_error("failure rate must lie in [0,1)");
  if (!(b >= 0.0 && b <= 1.0)) throw std::domain_error("block probability must lie in [0,1]");
  if (b == 1.0) return kInf;
  return -std::log1p(-f) - std::log1p(-b);
}

namespace {

bool near(double a, double b) {
  if (a == kInf || b == kInf) return a == b;
  return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b));
}

std::vector<VertexId> vertex_path(const AttackGraph& g, const std::vector<EdgeId>& pred, VertexId v) {
  std::vector<VertexId> seq{v};
  while (pred[v] >= 0) {
    v = g.edge(pred[v]).src;
    seq.push_back(v);
    if (seq.size() > g.num_vertices()) break;  // cycle guard
  }
  std::reverse(seq.begin(), seq.end());
  return seq;
}

}  // namespace

AttackResult best_attack(const AttackGraph& g, const BlockingPolicy& policy) {
  if (policy.probability.size() != g.num_edges()) throw GraphError("policy size does not match graph");
  const std::size_t n = g.num_vertices();
  std::vector<double> dist(n, kInf);
  std::vector<EdgeId> pred(n, -1);
  std::vector<bool> done(n, false);
  using Item = std::pair<double, VertexId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (VertexId s : g.entries()) {
    dist[s] = 0.0;
    heap.push({0.0, s});
  }
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (done[u] || d > dist[u]) continue;
    done[u] = true;
    if (u == g.da()) continue;
    for (EdgeId e : g.out_edges(u)) {
      const Edge& edge = g.edge(e);
      const double w = edge_distance(edge.failure_rate, policy.probability[e]);
      if (w == kInf) continue;
      const VertexId v = edge.dst;
      const double nd = d + w;
      if (g.is_entry(v) && dist[v] == 0.0) continue;
      if (nd < dist[v] && !near(nd, dist[v])) {
        dist[v] = nd;
        pred[v] = e;
        heap.push({nd, v});
      } else if (near(nd, dist[v]) && pred[v] != e) {
        auto via_u = vertex_path(g, pred, u);
        if (std::find(via_u.begin(), via_u.end(), v) != via_u.end()) continue;
        via_u.push_back(v);
        if (via_u < vertex_path(g, pred, v)) {
          pred[v] = e;
          if (nd < dist[v]) {
            dist[v] = nd;
            heap.push({nd, v});
          }
        }
      }
    }
  }
  AttackResult r;
  const VertexId da = g.da();
  if (dist[da] == kInf) return r;
  r.distance = dist[da];
  for (VertexId v = da; pred[v] >= 0; v = g.edge(pred[v]).src) r.path.push_back(pred[v]);
  std::reverse(r.path.begin(), r.path.end());
  r.success_rate = std::exp(-r.distance);
  return r;
}

AttackResult best_attack(const AttackGraph& g) { return best_attack(g, BlockingPolicy::none(g)); }

double path_success(const AttackGraph& g, const BlockingPolicy& policy, std::span<const EdgeId> path) {
  double s = 1.0;
  for (EdgeId e : path) s *= (1.0 - g.edge(e).failure_rate) * (1.0 - policy.probability[e]);
  return s;
}

namespace {

// Sum of C(m, j) for j <= k, saturating at cap + 1.
std::size_t subsets_up_to(std::size_t m, std::size_t k, std::size_t cap) {
  std::size_t total = 0;
  double c = 1.0;
  for (std::size_t j = 0; j <= k; ++j) {
    if (j > 0) c = c * static_cast<double>(m - j + 1) / static_cast<double>(j);
    if (static_cast<double>(total) + c > static_cast<double>(cap)) return cap + 1;
    total += static_cast<std::size_t>(std::llround(c));
  }
  return total;
}

}  // namespace

BruteForceResult brute_force_defense(const AttackGraph& g, int budget, std::span<const EdgeId> candidates,
                                     std::size_t cap) {
  if (budget < 0) throw std::invalid_argument("budget must be nonnegative");
  std::vector<EdgeId> cand(candidates.begin(), candidates.end());
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  for (EdgeId e : cand)
    if (!g.edge(e).blockable) throw GraphError("brute force candidate is not blockable");
  const std::size_t m = cand.size();
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(budget), m);
  if (subsets_up_to(m, k, cap) > cap)
    throw CapExceeded("brute force would enumerate more than " + std::to_string(cap) + " blocking sets");

  BruteForceResult best;
  best.policy = BlockingPolicy::none(g);
  best.value = best_attack(g, best.policy).success_rate;
  best.evaluated = 1;
  std::vector<EdgeId> best_set;
  BlockingPolicy trial = BlockingPolicy::none(g);
  std::vector<std::size_t> idx;
  for (std::size_t size = 1; size <= k; ++size) {
    idx.resize(size);
    for (std::size_t i = 0; i < size; ++i) idx[i] = i;
    while (true) {
      std::vector<EdgeId> set(size);
      for (std::size_t i = 0; i < size; ++i) set[i] = cand[idx[i]];
      for (EdgeId e : set) trial.probability[e] = 1.0;
      const double v = best_attack(g, trial).success_rate;
      ++best.evaluated;
      if ((v < best.value && !near(v, best.value)) || (near(v, best.value) && set < best_set)) {
        best.value = v;
        best_set = set;
      }
      for (EdgeId e : set) trial.probability[e] = 0.0;
      // Next combination in lexicographic order.
      std::size_t i = size;
      while (i > 0 && idx[i - 1] == m - size + i - 1) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (std::size_t j = i; j < size; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  best.policy = BlockingPolicy::pure(g, best_set);
  return best;
}

BruteForceResult brute_force_defense(const AttackGraph& g, int budget, std::size_t cap) {
  std::vector<EdgeId> cand;
  for (std::size_t i = 0; i < g.num_edges(); ++i)
    if (g.edges()[i].blockable) cand.push_back(static_cast<EdgeId>(i));
  return brute_force_defense(g, budget, cand, cap);
}

BlockingPolicy translate_policy(const BlockingPolicy& policy, const AttackGraph& from, const AttackGraph& to) {
  BlockingPolicy out = BlockingPolicy::none(to, policy.mode);
  for (EdgeId e : policy.blocked()) {
    const Edge& edge = from.edge(e);
    auto target = to.find_edge(from.label(edge.src), from.label(edge.dst));
    if (!target) throw GraphError("edge " + from.edge_label(e) + " has no counterpart");
    if (!to.edge(*target).blockable) throw GraphError("edge " + from.edge_label(e) + " is not blockable in target graph");
    out.probability[*target] = policy.probability[e];
  }
  return out;
}

}  // namespace adi
