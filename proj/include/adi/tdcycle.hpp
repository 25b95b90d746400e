#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "adi/attacker.hpp"
#include "adi/graph.hpp"
#include "adi/treedecomp.hpp"

namespace adi {

// Blocked edges chosen at one forget node plus links to the child choices.
struct Provenance {
  std::vector<EdgeId> blocked;
  std::shared_ptr<const Provenance> left, right;
};

// Row/column i refers to the i-th vertex of the (sorted) bag. Off-diagonal
// entries are directed distances using put-back edges; the diagonal holds the
// distance from the nearest entry.
struct DPTuple {
  int k = 0;
  std::vector<double> m;
  int spent = 0;
  std::shared_ptr<const Provenance> prov;

  double at(int i, int j) const { return m[static_cast<std::size_t>(i * k + j)]; }
  double& at(int i, int j) { return m[static_cast<std::size_t>(i * k + j)]; }
};

using TupleSet = std::vector<DPTuple>;

class WidthExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TupleLimitExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TdcycleOptions {
  int width_cap = 8;
  std::size_t max_tuples = 2'000'000;  // per tuple set
  bool prune = true;
};

struct TdcycleStats {
  std::size_t max_tuple_set = 0;
  std::size_t peak_live_tuples = 0;
  std::size_t nodes = 0;
};

TupleSet dp_leaf(bool is_entry);
TupleSet dp_introduce(const TupleSet& child, const std::vector<VertexId>& child_bag, VertexId introduced,
                      bool is_entry);
// Tries every blocking subset of the blockable assigned edges that fits the
// budget; unblocked edges are put back and distances closed before dropping
// the forgotten vertex.
TupleSet dp_forget(const TupleSet& child, const std::vector<VertexId>& child_bag, VertexId forgotten,
                   const AttackGraph& g, std::span<const EdgeId> assigned, int budget, bool prune = true);
// One fixed decision: every assigned edge not in `blocked` is put back. With
// drop_forgotten false the closed matrix keeps the forgotten vertex.
DPTuple forget_tuple(const DPTuple& child, const std::vector<VertexId>& child_bag, VertexId forgotten,
                     const AttackGraph& g, std::span<const EdgeId> assigned, std::span<const EdgeId> blocked,
                     bool drop_forgotten = true);
TupleSet dp_join(const TupleSet& left, const TupleSet& right, int budget, bool prune = true);

// Drops tuples dominated by another with no more spend and no smaller
// distances, and merges tuples whose matrices agree to 1e-9.
TupleSet prune_dominated(TupleSet set);

// Edges blocked along a tuple's provenance, ascending.
std::vector<EdgeId> reconstruct(const DPTuple& t);

DefenseSolution solve_pure(const AttackGraph& g, const NiceTreeDecomposition& ntd, int budget,
                           const TdcycleOptions& options = {}, TdcycleStats* stats = nullptr);

// Decomposes g (best of both heuristics) and runs the DP.
DefenseSolution solve_pure(const AttackGraph& g, int budget, const TdcycleOptions& options = {},
                           TdcycleStats* stats = nullptr);

}  // namespace adi
