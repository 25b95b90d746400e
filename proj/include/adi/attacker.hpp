#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "adi/graph.hpp"

namespace adi {

enum class PolicyMode { Pure, Mixed };

// Block probability per edge id of one specific graph.
struct BlockingPolicy {
  PolicyMode mode = PolicyMode::Pure;
  std::vector<double> probability;

  static BlockingPolicy none(const AttackGraph& g, PolicyMode mode = PolicyMode::Pure);
  static BlockingPolicy pure(const AttackGraph& g, std::span<const EdgeId> blocked);

  double total() const;
  // Edges with positive probability, ascending.
  std::vector<EdgeId> blocked() const;
  // Throws GraphError when the policy does not fit g: wrong size, probability
  // outside [0,1], positive probability on an unblockable edge, or a
  // fractional value in pure mode.
  void check(const AttackGraph& g) const;
};

struct AttackResult {
  double success_rate = 0.0;
  std::vector<EdgeId> path;  // empty when DA is unreachable
  double distance = kInf;
};

// Pure or mixed defense with the attacker's success rate against it.
struct DefenseSolution {
  BlockingPolicy policy;
  double value = 0.0;
  bool optimal = false;
};

// -ln(1 - f) - ln(1 - b); +inf when b == 1. Throws std::domain_error for f >= 1.
double edge_distance(double failure_rate, double block_probability);

// Attacker best response: multi-source Dijkstra from every entry over the
// transformed distances. Among equal-distance paths the lexicographically
// smallest vertex sequence wins.
AttackResult best_attack(const AttackGraph& g, const BlockingPolicy& policy);
AttackResult best_attack(const AttackGraph& g);

// Product of (1 - f)(1 - B) along a path.
double path_success(const AttackGraph& g, const BlockingPolicy& policy, std::span<const EdgeId> path);

struct BruteForceResult {
  BlockingPolicy policy;
  double value = 0.0;
  std::size_t evaluated = 0;
};

// Thrown when an enumeration would exceed its configured size.
class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kDefaultBruteForceCap = 10'000'000;

// Enumerates every pure blocking set of size <= budget among the blockable
// edges (or among `candidates`) and returns a minimiser of the attacker's
// success rate; ties go to the lexicographically smallest edge set.
BruteForceResult brute_force_defense(const AttackGraph& g, int budget,
                                     std::size_t cap = kDefaultBruteForceCap);
BruteForceResult brute_force_defense(const AttackGraph& g, int budget,
                                     std::span<const EdgeId> candidates,
                                     std::size_t cap = kDefaultBruteForceCap);

// Moves a policy between graphs that share vertex labels (e.g. before and
// after preprocessing). Throws GraphError when a blocked edge has no
// counterpart or is not blockable in `to`.
BlockingPolicy translate_policy(const BlockingPolicy& policy, const AttackGraph& from,
                                const AttackGraph& to);

}  // namespace adi
