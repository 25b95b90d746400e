#include "adi/maxflow.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace adi {

namespace {
constexpr double kEps = 1e-12;
}

MaxFlow::MaxFlow(int n) : adj_(static_cast<std::size_t>(n)) {}

int MaxFlow::add_edge(int u, int v, double cap) {
  adj_[u].push_back({v, cap, static_cast<int>(adj_[v].size()) + (u == v ? 1 : 0)});
  adj_[v].push_back({u, 0.0, static_cast<int>(adj_[u].size()) - 1});
  arcs_.push_back({u, static_cast<int>(adj_[u].size()) - 1});
  original_.push_back(cap);
  return static_cast<int>(arcs_.size()) - 1;
}

bool MaxFlow::bfs(int s, int t) {
  level_.assign(adj_.size(), -1);
  std::queue<int> q;
  level_[s] = 0;
  q.push(s);
  while (!q.empty()) {
    const int v = q.front();
    q.pop();
    for (const Arc& a : adj_[v])
      if (a.cap > kEps && level_[a.to] < 0) {
        level_[a.to] = level_[v] + 1;
        q.push(a.to);
      }
  }
  return level_[t] >= 0;
}

double MaxFlow::dfs(int v, int t, double pushed) {
  if (v == t) return pushed;
  for (std::size_t& i = it_[v]; i < adj_[v].size(); ++i) {
    Arc& a = adj_[v][i];
    if (a.cap <= kEps || level_[a.to] != level_[v] + 1) continue;
    const double got = dfs(a.to, t, std::min(pushed, a.cap));
    if (got > kEps) {
      a.cap -= got;
      adj_[a.to][a.rev].cap += got;
      return got;
    }
  }
  return 0.0;
}

double MaxFlow::solve(int s, int t) {
  double total = 0.0;
  while (bfs(s, t)) {
    it_.assign(adj_.size(), 0);
    while (double f = dfs(s, t, std::numeric_limits<double>::infinity())) total += f;
  }
  return total;
}

double MaxFlow::flow(int arc) const {
  auto [v, i] = arcs_[arc];
  return original_[arc] - adj_[v][i].cap;
}

std::vector<bool> MaxFlow::reaches_sink(int t) const {
  std::vector<bool> seen(adj_.size(), false);
  std::vector<int> stack{t};
  seen[t] = true;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    // u reaches v when the arc u->v has residual capacity; that arc is the
    // reverse partner of v's arc to u.
    for (const Arc& a : adj_[v]) {
      const Arc& back = adj_[a.to][a.rev];
      if (back.cap > kEps && !seen[a.to]) {
        seen[a.to] = true;
        stack.push_back(a.to);
      }
    }
  }
  return seen;
}

}  // namespace adi
