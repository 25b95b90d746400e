#pragma once

#include <optional>
#include <string>
#include <vector>

#include "adi/graph.hpp"

namespace adi {

// Path from a splitting or entry vertex through single-successor vertices to
// the next splitting vertex or DA.
struct NonSplittingPath {
  VertexId origin = -1;
  VertexId first_hop = -1;
  VertexId dest = -1;
  std::vector<EdgeId> edges;
  double c = 1.0;             // product of (1 - f) along the path
  std::optional<EdgeId> bw;   // blockable edge furthest from origin

  bool blockable() const { return bw.has_value(); }
};

// Vertices with out-degree >= 2, ascending.
std::vector<VertexId> split_nodes(const AttackGraph& g);

// One path per (u, successor) with u a splitting or entry vertex, ordered by
// (origin, first_hop). Throws GraphError if a walk never reaches a splitting
// vertex or DA.
std::vector<NonSplittingPath> nsp_decompose(const AttackGraph& g);

struct DominanceReport {
  std::size_t rounds = 0;
  std::size_t unmarked_edges = 0;  // blockable edges made unblockable
  std::size_t deleted_edges = 0;   // dominated first hops removed
};

// To a fixed point: prune, mark blockable edges that are no path's bw as
// unblockable, then for each splitting vertex delete the first hop of every
// path dominated by an unblockable path to the same destination.
AttackGraph delete_dominated(const AttackGraph& g, DominanceReport* report = nullptr);

struct KernelGraph {
  AttackGraph graph;                  // the graph the paths live in
  std::vector<VertexId> vertices;     // SPLIT + ENTRY + DA, ascending
  std::vector<NonSplittingPath> meta_edges;
  std::vector<EdgeId> bw_edges;       // distinct bw edges, ascending

  std::size_t nsp_count() const { return meta_edges.size(); }
};

KernelGraph build_kernel(const AttackGraph& g);

// prune, delete_dominated, build_kernel.
KernelGraph kernelize(const AttackGraph& g, DominanceReport* report = nullptr);

std::string kernel_json(const KernelGraph& k);

}  // namespace adi
