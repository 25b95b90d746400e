#pragma once

#include <vector>

namespace adi {

// Dinic's algorithm on real capacities.
class MaxFlow {
 public:
  explicit MaxFlow(int n);

  // Returns the arc id.
  int add_edge(int u, int v, double cap);
  double solve(int s, int t);
  double flow(int arc) const;
  // Vertices that still reach t in the residual graph after solve().
  std::vector<bool> reaches_sink(int t) const;

 private:
  struct Arc {
    int to;
    double cap;
    int rev;
  };
  bool bfs(int s, int t);
  double dfs(int v, int t, double pushed);

  std::vector<std::vector<Arc>> adj_;
  std::vector<std::pair<int, int>> arcs_;  // (vertex, index in adj_)
  std::vector<double> original_;
  std::vector<int> level_;
  std::vector<std::size_t> it_;
};

}  // namespace adi
