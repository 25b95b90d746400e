#pragma once

#include <string>
#include <utility>
#include <vector>

#include "adi/graph.hpp"

namespace adi {

// Bags are sorted vertex lists. Edges of the graph are taken as undirected.
struct TreeDecomposition {
  std::vector<std::vector<VertexId>> bags;
  std::vector<std::pair<int, int>> tree_edges;
  int root = -1;  // bag to root the nice form at; -1 picks the first bag holding DA

  int width() const;
};

enum class Heuristic { MinDegree, MinFillIn };

// Vertex elimination: T_i = {i} + N(i), N(i) made a clique, i removed. Ties go
// to the smallest vertex id. Each bag links to the bag of its neighbour that is
// eliminated first after i; bags of components without DA hang off DA's bag.
TreeDecomposition eliminate(const AttackGraph& g, Heuristic h);
std::vector<VertexId> elimination_order(const AttackGraph& g, Heuristic h);

// Runs both heuristics and keeps the narrower (min-degree on ties).
TreeDecomposition best_decomposition(const AttackGraph& g);

enum class NodeKind { Leaf, Introduce, Forget, Join };

const char* kind_name(NodeKind k);

struct NiceNode {
  std::vector<VertexId> bag;
  NodeKind kind = NodeKind::Leaf;
  std::vector<int> children;
  VertexId vertex = -1;           // introduced, forgotten or leaf vertex
  std::vector<EdgeId> assigned;   // forget nodes only, ascending
};

struct NiceTreeDecomposition {
  std::vector<NiceNode> nodes;
  int root = -1;
  std::vector<int> forget_edge_assignment;  // EdgeId -> node index

  int width() const;
  // Children before parents; ties follow child order.
  std::vector<int> post_order() const;
  std::size_t count(NodeKind k) const;
};

// Rooted at {DA}. Throws GraphError when td is not a decomposition of g.
NiceTreeDecomposition to_nice(const TreeDecomposition& td, const AttackGraph& g);

struct TdDiagnostics {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

TdDiagnostics verify(const TreeDecomposition& td, const AttackGraph& g);
TdDiagnostics verify(const NiceTreeDecomposition& ntd, const AttackGraph& g);

std::string treewidth_json(const TreeDecomposition& td, const NiceTreeDecomposition& ntd);

}  // namespace adi
