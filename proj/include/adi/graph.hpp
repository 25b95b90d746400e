#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace adi {

using VertexId = int;
using EdgeId = int;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Input documents or graph construction arguments that break the model's rules.
class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Edge {
  VertexId src = 0;
  VertexId dst = 0;
  double failure_rate = 0.0;  // in [0, 1)
  bool blockable = false;
};

// Directed attack graph with one destination (DA) and a set of entry vertices.
// Immutable once built; every transformation returns a new graph.
class AttackGraph {
 public:
  AttackGraph(std::vector<std::string> labels, std::vector<Edge> edges,
              std::vector<VertexId> entries, VertexId da);

  std::size_t num_vertices() const { return labels_.size(); }
  std::size_t num_edges() const { return edges_.size(); }
  std::size_t num_blockable() const;

  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(EdgeId e) const { return edges_[static_cast<std::size_t>(e)]; }
  std::span<const EdgeId> out_edges(VertexId v) const { return out_[static_cast<std::size_t>(v)]; }
  std::span<const EdgeId> in_edges(VertexId v) const { return in_[static_cast<std::size_t>(v)]; }

  VertexId da() const { return da_; }
  const std::vector<VertexId>& entries() const { return entries_; }
  bool is_entry(VertexId v) const { return is_entry_[static_cast<std::size_t>(v)]; }

  const std::string& label(VertexId v) const { return labels_[static_cast<std::size_t>(v)]; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::string edge_label(EdgeId e) const;

  std::optional<EdgeId> find_edge(VertexId src, VertexId dst) const;
  std::optional<VertexId> find_vertex(std::string_view label) const;
  // Looks up an edge by its endpoint labels.
  std::optional<EdgeId> find_edge(std::string_view src, std::string_view dst) const;

  // Same topology with replaced blockable flags (one per edge).
  AttackGraph with_blockable(const std::vector<bool>& flags) const;

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, VertexId> index_;
  std::vector<Edge> edges_;
  std::vector<VertexId> entries_;
  std::vector<bool> is_entry_;
  VertexId da_;
  std::vector<std::vector<EdgeId>> out_;
  std::vector<std::vector<EdgeId>> in_;
};

// Keeps the vertices and edges flagged true. DA must be kept. Vertex and edge
// ids are compacted preserving relative order.
AttackGraph induced_subgraph(const AttackGraph& g, const std::vector<bool>& keep_vertex,
                             const std::vector<bool>& keep_edge);

// Parses the graph JSON schema. Vertices are renumbered so DA = 0 and the
// remaining ids follow label order; edges follow (src, dst) label order.
// Edges with failure_rate == 1 are dropped with a warning. When both u->v and
// v->u are present, v->u becomes v->x->u through an auxiliary vertex x.
AttackGraph load_graph(std::string_view document, std::vector<std::string>* warnings = nullptr);

// Canonical JSON: vertices sorted by label, edges by (src, dst) label, floats
// with 17 significant digits.
std::string serialize_graph(const AttackGraph& g);

struct Diagnostics {
  std::vector<std::string> violations;
  std::vector<VertexId> cannot_reach_da;
  bool has_cycle = false;
  std::size_t n_vertices = 0;
  std::size_t n_edges = 0;
  std::size_t n_blockable = 0;
  std::size_t n_entries = 0;

  bool ok() const { return violations.empty(); }
};

Diagnostics validate(const AttackGraph& g);
std::string diagnostics_json(const Diagnostics& d, const AttackGraph& g);

// Minimum hop count from each vertex to DA following edge direction; -1 when
// DA is unreachable.
std::vector<int> hops_to_da(const AttackGraph& g);

// Hop(e) = 1 + hops_to_da(dst): an edge entering DA has Hop 1. -1 when the
// edge cannot reach DA.
std::vector<int> edge_hops(const AttackGraph& g);

struct GeneratorParams {
  std::size_t n_vertices = 100;
  double extra_edge_fraction = 0.1;
  std::size_t n_entries = 5;
  double high_failure_rate = 0.2;
  double low_failure_rate = 0.05;
  double high_rate_fraction = 0.3;
  std::size_t entry_pool_size = 0;  // 0 means 2 * n_entries
  std::uint64_t seed = 0;

  std::size_t pool() const { return entry_pool_size == 0 ? 2 * n_entries : entry_pool_size; }
};

// Random shallow in-tree toward DA (vertex 0) plus extra edges pointing at
// older vertices. Blockable flags drawn with probability Hop(e)/MaxHop; entries
// drawn uniformly from the pool of vertices furthest from DA.
AttackGraph generate_synthetic(const GeneratorParams& params);

// Re-draws entries and blockable flags on a fixed topology, as done per trial
// in experiments. Existing entries and flags are ignored.
AttackGraph redraw_entries_and_blockable(const AttackGraph& topology, std::size_t n_entries,
                                         std::size_t entry_pool_size, std::uint64_t seed);

}  // namespace adi
