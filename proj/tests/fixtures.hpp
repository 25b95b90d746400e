#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "adi/graph.hpp"
#include "adi/rng.hpp"

namespace fx {

using adi::AttackGraph;
using adi::Edge;

inline std::vector<std::string> numbered(int n) {
  std::vector<std::string> l;
  for (int i = 0; i < n; ++i) l.push_back(std::to_string(i));
  return l;
}

// Figure 1: DA = 0, entries 3, 4, 5.
inline AttackGraph fig1() {
  return AttackGraph(numbered(6),
                     {{1, 0, 0.05, false}, {2, 1, 0.05, true}, {3, 2, 0.05, true}, {4, 1, 0.2, true},
                      {5, 1, 0.05, true}},
                     {3, 4, 5}, 0);
}

// Figure 3: every rate 0.05, entries 1 and 2.
inline AttackGraph fig3() {
  return AttackGraph(numbered(5),
                     {{1, 0, 0.05, true}, {1, 2, 0.05, false}, {1, 3, 0.05, false}, {2, 0, 0.05, true},
                      {3, 4, 0.05, true}, {4, 0, 0.05, true}},
                     {1, 2}, 0);
}

// Edges i -> 0 for i = 1..n; odd i fail with i/(n+1), even with n/(n+1).
inline AttackGraph toy(int n = 40) {
  std::vector<Edge> edges;
  std::vector<adi::VertexId> entries;
  for (int i = 1; i <= n; ++i) {
    const double f = (i % 2 == 1 ? i : n) / static_cast<double>(n + 1);
    edges.push_back({i, 0, f, true});
    entries.push_back(i);
  }
  return AttackGraph(numbered(n + 1), edges, entries, 0);
}

// Small random digraph: cycles and antiparallel pairs allowed, no DA
// out-edges, at most max_blockable blockable edges.
inline AttackGraph random_small(std::uint64_t seed, int max_n = 12, int max_blockable = 10) {
  adi::Rng rng(seed);
  const int n = 3 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_n - 2)));
  const double p = 0.15 + 0.25 * rng.unit();
  static const double rates[] = {0.0, 0.05, 0.1, 0.2, 0.3, 0.5, 0.7};
  std::vector<Edge> edges;
  for (int u = 1; u < n; ++u)
    for (int v = 0; v < n; ++v)
      if (u != v && rng.bernoulli(p)) edges.push_back({u, v, rates[rng.below(7)], false});
  // keep some direct route so instances are rarely trivial
  const int hub = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - 1)));
  bool has = false;
  for (const auto& e : edges) has |= e.src == hub && e.dst == 0;
  if (!has) edges.push_back({hub, 0, rates[rng.below(7)], false});
  std::vector<std::size_t> order = rng.sample(edges.size(), edges.size());
  int marked = 0;
  for (std::size_t i : order)
    if (marked < max_blockable && rng.bernoulli(0.6)) {
      edges[i].blockable = true;
      ++marked;
    }
  const int n_entries = 1 + static_cast<int>(rng.below(3));
  std::vector<adi::VertexId> entries;
  for (std::size_t i : rng.sample(static_cast<std::size_t>(n - 1), static_cast<std::size_t>(std::min(n_entries, n - 1))))
    entries.push_back(static_cast<adi::VertexId>(i) + 1);
  return AttackGraph(numbered(n), edges, entries, 0);
}

inline const double kDelta = -std::log(0.95);

}  // namespace fx
