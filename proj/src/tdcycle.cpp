#include "adi/tdcycle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <unordered_map>

namespace adi {

namespace {

constexpr double kTol = 1e-9;

int index_in(const std::vector<VertexId>& bag, VertexId v) {
  auto it = std::lower_bound(bag.begin(), bag.end(), v);
  if (it == bag.end() || *it != v) throw GraphError("vertex not in bag");
  return static_cast<int>(it - bag.begin());
}

std::int64_t quantize(double x) {
  if (std::isinf(x)) return std::numeric_limits<std::int64_t>::max();
  return std::llround(x / kTol);
}

struct KeyHash {
  std::size_t operator()(const std::vector<std::int64_t>& key) const {
    std::size_t h = 0;
    for (auto v : key) h ^= std::hash<std::int64_t>{}(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

bool dominates(const DPTuple& a, const DPTuple& b) {
  for (std::size_t i = 0; i < a.m.size(); ++i)
    if (a.m[i] < b.m[i] - kTol) return false;
  return true;
}

std::shared_ptr<const Provenance> joined(const std::shared_ptr<const Provenance>& l,
                                         const std::shared_ptr<const Provenance>& r) {
  if (!l) return r;
  if (!r) return l;
  return std::make_shared<const Provenance>(Provenance{{}, l, r});
}

}  // namespace

TupleSet prune_dominated(TupleSet set) {
  // exact duplicates after quantisation: keep the first
  std::unordered_map<std::vector<std::int64_t>, std::size_t, KeyHash> seen;
  TupleSet unique;
  unique.reserve(set.size());
  for (auto& t : set) {
    std::vector<std::int64_t> key;
    key.reserve(t.m.size() + 1);
    key.push_back(t.spent);
    for (double x : t.m) key.push_back(quantize(x));
    if (seen.emplace(std::move(key), unique.size()).second) unique.push_back(std::move(t));
  }

  std::vector<std::size_t> order(unique.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return unique[a].spent < unique[b].spent; });
  std::vector<std::size_t> kept;
  for (std::size_t i : order) {
    const DPTuple& t = unique[i];
    bool dominated = false;
    for (std::size_t j : kept)
      if (dominates(unique[j], t)) {
        dominated = true;
        break;
      }
    if (dominated) continue;
    std::erase_if(kept, [&](std::size_t j) { return unique[j].spent == t.spent && dominates(t, unique[j]); });
    kept.push_back(i);
  }
  std::sort(kept.begin(), kept.end());
  TupleSet out;
  out.reserve(kept.size());
  for (std::size_t i : kept) out.push_back(std::move(unique[i]));
  return out;
}

TupleSet dp_leaf(bool is_entry) {
  DPTuple t;
  t.k = 1;
  t.m = {is_entry ? 0.0 : kInf};
  return {t};
}

TupleSet dp_introduce(const TupleSet& child, const std::vector<VertexId>& child_bag, VertexId introduced,
                      bool is_entry) {
  const int k = static_cast<int>(child_bag.size());
  const int p = static_cast<int>(std::lower_bound(child_bag.begin(), child_bag.end(), introduced) - child_bag.begin());
  TupleSet out;
  out.reserve(child.size());
  for (const DPTuple& c : child) {
    DPTuple t;
    t.k = k + 1;
    t.m.assign(static_cast<std::size_t>(t.k * t.k), kInf);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) t.at(i + (i >= p), j + (j >= p)) = c.at(i, j);
    t.at(p, p) = is_entry ? 0.0 : kInf;
    t.spent = c.spent;
    t.prov = c.prov;
    out.push_back(std::move(t));
  }
  return out;
}

namespace {

// All-pairs closure of d (k x k, diagonal = entry distances), then the
// diagonal is relaxed through the closed distances.
void close(std::vector<double>& d, int k) {
  std::vector<double> diag(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    diag[i] = d[i * k + i];
    d[i * k + i] = 0.0;
  }
  for (int t = 0; t < k; ++t)
    for (int i = 0; i < k; ++i) {
      const double dit = d[i * k + t];
      if (dit == kInf) continue;
      for (int j = 0; j < k; ++j) d[i * k + j] = std::min(d[i * k + j], dit + d[t * k + j]);
    }
  for (int j = 0; j < k; ++j) {
    double best = kInf;
    for (int i = 0; i < k; ++i) best = std::min(best, diag[i] + (i == j ? 0.0 : d[i * k + j]));
    diag[j] = best;
  }
  for (int i = 0; i < k; ++i) d[i * k + i] = diag[i];
}

std::vector<double> drop(const std::vector<double>& d, int k, int p) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>((k - 1) * (k - 1)));
  for (int i = 0; i < k; ++i) {
    if (i == p) continue;
    for (int j = 0; j < k; ++j)
      if (j != p) out.push_back(d[i * k + j]);
  }
  return out;
}

struct Arc {
  EdgeId id;
  int u, v;
  double w;
  bool blockable;
};

std::vector<Arc> arcs(const std::vector<VertexId>& bag, const AttackGraph& g, std::span<const EdgeId> assigned) {
  std::vector<Arc> out;
  for (EdgeId e : assigned) {
    const Edge& edge = g.edge(e);
    out.push_back({e, index_in(bag, edge.src), index_in(bag, edge.dst), edge_distance(edge.failure_rate, 0.0),
                   edge.blockable});
  }
  return out;
}

void put_back(std::vector<double>& d, int k, const Arc& a) {
  d[a.u * k + a.v] = std::min(d[a.u * k + a.v], a.w);
}

}  // namespace

DPTuple forget_tuple(const DPTuple& child, const std::vector<VertexId>& child_bag, VertexId forgotten,
                     const AttackGraph& g, std::span<const EdgeId> assigned, std::span<const EdgeId> blocked,
                     bool drop_forgotten) {
  const int k = static_cast<int>(child_bag.size());
  const int p = index_in(child_bag, forgotten);
  std::vector<double> d = child.m;
  for (const Arc& a : arcs(child_bag, g, assigned))
    if (std::find(blocked.begin(), blocked.end(), a.id) == blocked.end()) put_back(d, k, a);
  close(d, k);
  DPTuple t;
  t.spent = child.spent + static_cast<int>(blocked.size());
  t.prov = child.prov;
  if (drop_forgotten) {
    t.k = k - 1;
    t.m = drop(d, k, p);
  } else {
    t.k = k;
    t.m = std::move(d);
  }
  return t;
}

TupleSet dp_forget(const TupleSet& child, const std::vector<VertexId>& child_bag, VertexId forgotten,
                   const AttackGraph& g, std::span<const EdgeId> assigned, int budget, bool prune) {
  const int k = static_cast<int>(child_bag.size());
  const int p = index_in(child_bag, forgotten);
  std::vector<Arc> fixed, optional;
  for (const Arc& a : arcs(child_bag, g, assigned)) (a.blockable ? optional : fixed).push_back(a);
  if (optional.size() >= 31) throw WidthExceeded("too many blockable edges at one forget node");

  TupleSet out;
  const std::uint32_t masks = 1u << optional.size();
  for (std::uint32_t mask = 0; mask < masks; ++mask) {
    const int cost = std::popcount(mask);
    std::vector<EdgeId> blocked;
    for (std::size_t b = 0; b < optional.size(); ++b)
      if (mask >> b & 1u) blocked.push_back(optional[b].id);
    for (const DPTuple& c : child) {
      if (c.spent + cost > budget) continue;
      std::vector<double> d = c.m;
      for (const Arc& a : fixed) put_back(d, k, a);
      for (std::size_t b = 0; b < optional.size(); ++b)
        if (!(mask >> b & 1u)) put_back(d, k, optional[b]);
      close(d, k);
      DPTuple t;
      t.k = k - 1;
      t.m = drop(d, k, p);
      t.spent = c.spent + cost;
      if (blocked.empty()) {
        t.prov = c.prov;
      } else {
        t.prov = std::make_shared<const Provenance>(Provenance{blocked, c.prov, nullptr});
      }
      out.push_back(std::move(t));
    }
  }
  return prune ? prune_dominated(std::move(out)) : out;
}

TupleSet dp_join(const TupleSet& left, const TupleSet& right, int budget, bool prune) {
  TupleSet out;
  for (const DPTuple& l : left)
    for (const DPTuple& r : right) {
      if (l.spent + r.spent > budget) continue;
      DPTuple t;
      t.k = l.k;
      t.m.resize(l.m.size());
      for (std::size_t i = 0; i < l.m.size(); ++i) t.m[i] = std::min(l.m[i], r.m[i]);
      t.spent = l.spent + r.spent;
      t.prov = joined(l.prov, r.prov);
      out.push_back(std::move(t));
    }
  return prune ? prune_dominated(std::move(out)) : out;
}

std::vector<EdgeId> reconstruct(const DPTuple& t) {
  std::vector<EdgeId> out;
  std::vector<const Provenance*> stack;
  if (t.prov) stack.push_back(t.prov.get());
  while (!stack.empty()) {
    const Provenance* p = stack.back();
    stack.pop_back();
    out.insert(out.end(), p->blocked.begin(), p->blocked.end());
    if (p->left) stack.push_back(p->left.get());
    if (p->right) stack.push_back(p->right.get());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

DefenseSolution solve_pure(const AttackGraph& g, const NiceTreeDecomposition& ntd, int budget,
                           const TdcycleOptions& options, TdcycleStats* stats) {
  if (budget < 0) throw std::invalid_argument("budget must be nonnegative");
  if (ntd.width() > options.width_cap)
    throw WidthExceeded("tree width " + std::to_string(ntd.width()) + " exceeds cap " +
                        std::to_string(options.width_cap));
  TdcycleStats local;
  std::vector<TupleSet> sets(ntd.nodes.size());
  std::size_t live = 0;
  for (int x : ntd.post_order()) {
    const NiceNode& nd = ntd.nodes[x];
    auto child = [&](std::size_t i) -> TupleSet& { return sets[nd.children[i]]; };
    auto child_bag = [&](std::size_t i) -> const std::vector<VertexId>& { return ntd.nodes[nd.children[i]].bag; };
    switch (nd.kind) {
      case NodeKind::Leaf:
        sets[x] = dp_leaf(g.is_entry(nd.vertex));
        break;
      case NodeKind::Introduce:
        sets[x] = dp_introduce(child(0), child_bag(0), nd.vertex, g.is_entry(nd.vertex));
        break;
      case NodeKind::Forget:
        sets[x] = dp_forget(child(0), child_bag(0), nd.vertex, g, nd.assigned, budget, options.prune);
        break;
      case NodeKind::Join:
        sets[x] = dp_join(child(0), child(1), budget, options.prune);
        break;
    }
    live += sets[x].size();
    local.peak_live_tuples = std::max(local.peak_live_tuples, live);
    for (int c : nd.children) {
      live -= sets[c].size();
      TupleSet().swap(sets[c]);
    }
    local.max_tuple_set = std::max(local.max_tuple_set, sets[x].size());
    ++local.nodes;
    if (sets[x].size() > options.max_tuples)
      throw TupleLimitExceeded("tuple set grew past " + std::to_string(options.max_tuples));
  }
  if (stats) *stats = local;

  const TupleSet& root = sets[ntd.root];
  const DPTuple* best = nullptr;
  for (const DPTuple& t : root) {
    if (!best || t.m[0] > best->m[0] + 1e-12 ||
        (std::abs(t.m[0] - best->m[0]) <= 1e-12 && t.spent < best->spent))
      best = &t;
  }
  DefenseSolution sol;
  sol.optimal = true;
  if (!best) {
    sol.policy = BlockingPolicy::none(g);
    sol.value = best_attack(g).success_rate;
    return sol;
  }
  sol.policy = BlockingPolicy::pure(g, reconstruct(*best));
  sol.value = std::exp(-best->m[0]);
  return sol;
}

DefenseSolution solve_pure(const AttackGraph& g, int budget, const TdcycleOptions& options, TdcycleStats* stats) {
  const NiceTreeDecomposition ntd = to_nice(best_decomposition(g), g);
  return solve_pure(g, ntd, budget, options, stats);
}

}  // namespace adi
