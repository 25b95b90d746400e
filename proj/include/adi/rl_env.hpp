#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "adi/attacker.hpp"
#include "adi/rng.hpp"
#include "adi/tdcycle.hpp"
#include "adi/treedecomp.hpp"

namespace adi {

enum class ObsMode { Full, Zero, Random };

struct EnvOptions {
  std::optional<int> episode_limit;
  ObsMode obs_mode = ObsMode::Full;
  std::uint64_t obs_seed = 0;  // random observation mode
  int max_bag_cap = 16;
};

// One block/keep decision on a blockable edge at a forget node.
struct Decision {
  int node = -1;
  EdgeId edge = -1;
};

struct StepResult {
  std::vector<double> observation;
  double reward = 0.0;
  bool done = false;
  bool coerced = false;  // block requested with no budget left
};

// The tree-decomposition DP run as a sequential decision process with a
// single propagated tuple. Introduce and join nodes, and forget nodes without
// blockable edges, are processed between decisions.
class Environment {
 public:
  Environment(AttackGraph g, NiceTreeDecomposition ntd, int budget, ObsMode mode, std::uint64_t obs_seed,
              int max_bag_cap);

  const AttackGraph& graph() const { return g_; }
  const NiceTreeDecomposition& decomposition() const { return ntd_; }
  const std::vector<Decision>& schedule() const { return schedule_; }
  int budget() const { return budget_; }
  std::size_t max_bag() const { return max_bag_; }
  std::size_t observation_size() const;

  std::vector<double> reset();
  StepResult step(bool block);

  bool done() const { return step_ == schedule_.size(); }
  std::size_t step_index() const { return step_; }
  int spent() const { return spent_; }
  // Success rate of the finished episode's policy.
  double final_value() const;
  BlockingPolicy policy() const;
  std::vector<double> observation() const;

 private:
  void advance();
  const DPTuple& tuple(int node) const { return tuples_[node]; }
  std::vector<EdgeId> pending_blocks() const;

  AttackGraph g_;
  NiceTreeDecomposition ntd_;
  int budget_;
  ObsMode mode_;
  std::uint64_t obs_seed_;
  std::size_t max_bag_ = 1;
  std::vector<int> order_;
  std::vector<Decision> schedule_;
  std::vector<std::size_t> first_step_;  // per node, index of its first decision

  std::vector<DPTuple> tuples_;
  std::vector<bool> blocked_;  // per schedule step
  std::size_t cursor_ = 0;     // position in order_
  std::size_t step_ = 0;
  int spent_ = 0;
  mutable Rng obs_rng_;
};

// Applies limit_episode first when options.episode_limit is set.
Environment build_env(const AttackGraph& g, int budget, const EnvOptions& options = {});
Environment build_env(const AttackGraph& g, const NiceTreeDecomposition& ntd, int budget,
                      const EnvOptions& options = {});

// Keeps the blockable edges of a minimum entry-to-DA cut (blockable capacity
// 1, unblockable 1e6, sink side of the residual graph); when fewer than
// target, adds the blockable edges nearest DA (by hop, then label). All other
// edges become unblockable. Unchanged if target >= |E_b| or DA is unreachable.
AttackGraph limit_episode(const AttackGraph& g, int target);

struct SearchResult {
  BlockingPolicy best_policy;
  double best_value = 1.0;
  std::size_t evaluations = 0;
  std::vector<double> trace;  // best value after each episode
};

// Epsilon-greedy Monte Carlo search: a table of mean returns per
// (step, budget left, action) plus a linear bonus for blocking learned from
// observation features. Keeps the best complete episode.
SearchResult anytime_search(Environment& env, int iterations, std::uint64_t seed);

}  // namespace adi
