#include "adi/rl_env.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

#include "adi/maxflow.hpp"

namespace adi {

Environment::Environment(AttackGraph g, NiceTreeDecomposition ntd, int budget, ObsMode mode,
                         std::uint64_t obs_seed, int max_bag_cap)
    : g_(std::move(g)), ntd_(std::move(ntd)), budget_(budget), mode_(mode), obs_seed_(obs_seed),
      obs_rng_(obs_seed) {
  if (budget_ < 0) throw std::invalid_argument("budget must be nonnegative");
  max_bag_ = static_cast<std::size_t>(std::max(ntd_.width() + 1, 1));
  if (max_bag_ > static_cast<std::size_t>(max_bag_cap))
    throw WidthExceeded("bag size " + std::to_string(max_bag_) + " exceeds observation cap " +
                        std::to_string(max_bag_cap));
  order_ = ntd_.post_order();
  first_step_.assign(ntd_.nodes.size(), 0);
  for (int x : order_) {
    first_step_[x] = schedule_.size();
    if (ntd_.nodes[x].kind != NodeKind::Forget) continue;
    for (EdgeId e : ntd_.nodes[x].assigned)
      if (g_.edge(e).blockable) schedule_.push_back({x, e});
  }
  reset();
}

std::size_t Environment::observation_size() const {
  return 2 * max_bag_ * max_bag_ + static_cast<std::size_t>(budget_) + schedule_.size();
}

std::vector<double> Environment::reset() {
  tuples_.assign(ntd_.nodes.size(), DPTuple{});
  blocked_.assign(schedule_.size(), false);
  cursor_ = 0;
  step_ = 0;
  spent_ = 0;
  obs_rng_ = Rng(obs_seed_);
  advance();
  return observation();
}

std::vector<EdgeId> Environment::pending_blocks() const {
  std::vector<EdgeId> out;
  if (step_ >= schedule_.size()) return out;
  const int x = schedule_[step_].node;
  for (std::size_t s = first_step_[x]; s < step_; ++s)
    if (blocked_[s]) out.push_back(schedule_[s].edge);
  return out;
}

void Environment::advance() {
  while (cursor_ < order_.size()) {
    const int x = order_[cursor_];
    const NiceNode& nd = ntd_.nodes[x];
    DPTuple t;
    switch (nd.kind) {
      case NodeKind::Leaf:
        t = dp_leaf(g_.is_entry(nd.vertex))[0];
        break;
      case NodeKind::Introduce:
        t = dp_introduce({tuples_[nd.children[0]]}, ntd_.nodes[nd.children[0]].bag, nd.vertex,
                         g_.is_entry(nd.vertex))[0];
        break;
      case NodeKind::Join: {
        const DPTuple& l = tuples_[nd.children[0]];
        const DPTuple& r = tuples_[nd.children[1]];
        t = l;
        for (std::size_t i = 0; i < t.m.size(); ++i) t.m[i] = std::min(l.m[i], r.m[i]);
        break;
      }
      case NodeKind::Forget: {
        std::size_t last = first_step_[x];
        while (last < schedule_.size() && schedule_[last].node == x) ++last;
        if (step_ < last) return;  // decisions still open here
        std::vector<EdgeId> blocked;
        for (std::size_t s = first_step_[x]; s < last; ++s)
          if (blocked_[s]) blocked.push_back(schedule_[s].edge);
        t = forget_tuple(tuples_[nd.children[0]], ntd_.nodes[nd.children[0]].bag, nd.vertex, g_, nd.assigned,
                         blocked);
        break;
      }
    }
    tuples_[x] = std::move(t);
    for (int c : nd.children) tuples_[c] = DPTuple{};
    ++cursor_;
  }
}

StepResult Environment::step(bool block) {
  if (done()) throw std::logic_error("step after episode end");
  StepResult r;
  if (block && spent_ >= budget_) {
    block = false;
    r.coerced = true;
  }
  blocked_[step_] = block;
  spent_ += block ? 1 : 0;
  ++step_;
  advance();
  r.done = done();
  r.reward = r.done ? -final_value() : 0.0;
  r.observation = observation();
  return r;
}

double Environment::final_value() const {
  if (cursor_ != order_.size()) throw std::logic_error("episode not finished");
  return std::exp(-tuples_[ntd_.root].m[0]);
}

BlockingPolicy Environment::policy() const {
  std::vector<EdgeId> blocked;
  for (std::size_t s = 0; s < step_; ++s)
    if (blocked_[s]) blocked.push_back(schedule_[s].edge);
  return BlockingPolicy::pure(g_, blocked);
}

std::vector<double> Environment::observation() const {
  std::vector<double> obs(observation_size(), 0.0);
  const std::size_t cells = max_bag_ * max_bag_;
  auto fill = [&](const DPTuple& t, std::size_t offset) {
    for (int i = 0; i < t.k; ++i)
      for (int j = 0; j < t.k; ++j) obs[offset + i * max_bag_ + j] = std::exp(-t.at(i, j));
  };
  if (mode_ == ObsMode::Full) {
    if (done()) {
      fill(tuples_[ntd_.root], 0);
      fill(tuples_[ntd_.root], cells);
    } else {
      const NiceNode& nd = ntd_.nodes[schedule_[step_].node];
      const DPTuple& before = tuples_[nd.children[0]];
      fill(before, 0);
      fill(forget_tuple(before, ntd_.nodes[nd.children[0]].bag, nd.vertex, g_, nd.assigned, pending_blocks(), false),
           cells);
    }
  } else if (mode_ == ObsMode::Random) {
    for (std::size_t i = 0; i < 2 * cells; ++i) obs[i] = obs_rng_.unit();
  }
  const int left = budget_ - spent_;
  for (int i = 0; i < left; ++i) obs[2 * cells + i] = 1.0;
  for (std::size_t i = 0; i < step_; ++i) obs[2 * cells + budget_ + i] = 1.0;
  return obs;
}

Environment build_env(const AttackGraph& g, const NiceTreeDecomposition& ntd, int budget, const EnvOptions& options) {
  AttackGraph h = options.episode_limit ? limit_episode(g, *options.episode_limit) : g;
  return Environment(std::move(h), ntd, budget, options.obs_mode, options.obs_seed, options.max_bag_cap);
}

Environment build_env(const AttackGraph& g, int budget, const EnvOptions& options) {
  return build_env(g, to_nice(best_decomposition(g), g), budget, options);
}

AttackGraph limit_episode(const AttackGraph& g, int target) {
  if (target < 1) throw std::invalid_argument("episode limit must be at least 1");
  if (static_cast<std::size_t>(target) >= g.num_blockable()) return g;
  const int n = static_cast<int>(g.num_vertices());
  MaxFlow mf(n + 1);
  for (VertexId s : g.entries()) mf.add_edge(n, s, kInf);
  for (const Edge& e : g.edges()) mf.add_edge(e.src, e.dst, e.blockable ? 1.0 : 1e6);
  if (mf.solve(n, g.da()) <= 0.0) return g;
  const auto sink = mf.reaches_sink(g.da());

  std::vector<bool> flags(g.num_edges(), false);
  std::size_t kept = 0;
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    const Edge& edge = g.edges()[e];
    if (edge.blockable && !sink[edge.src] && sink[edge.dst]) {
      flags[e] = true;
      ++kept;
    }
  }
  if (kept < static_cast<std::size_t>(target)) {
    const auto hops = edge_hops(g);
    std::vector<EdgeId> rest;
    for (std::size_t e = 0; e < g.num_edges(); ++e)
      if (g.edges()[e].blockable && !flags[e]) rest.push_back(static_cast<EdgeId>(e));
    auto key = [&](EdgeId e) {
      const int h = hops[e] < 0 ? std::numeric_limits<int>::max() : hops[e];
      return std::make_tuple(h, g.edge_label(e));
    };
    std::stable_sort(rest.begin(), rest.end(), [&](EdgeId a, EdgeId b) { return key(a) < key(b); });
    for (std::size_t i = 0; i < rest.size() && kept < static_cast<std::size_t>(target); ++i, ++kept)
      flags[rest[i]] = true;
  }
  return g.with_blockable(flags);
}

namespace {

// max and mean of (after - before) over the two matrix blocks
std::pair<double, double> features(const std::vector<double>& obs, std::size_t cells) {
  double mx = 0.0, sum = 0.0;
  for (std::size_t i = 0; i < cells; ++i) {
    const double d = obs[cells + i] - obs[i];
    mx = std::max(mx, d);
    sum += d;
  }
  return {mx, cells ? sum / static_cast<double>(cells) : 0.0};
}

}  // namespace

SearchResult anytime_search(Environment& env, int iterations, std::uint64_t seed) {
  if (iterations < 1) throw std::invalid_argument("iterations must be at least 1");
  Rng rng(seed);
  struct Mean {
    double sum = 0.0;
    int n = 0;
    double value() const { return n ? sum / n : 0.0; }  // unseen actions look best
  };
  std::map<std::tuple<std::size_t, int, int>, Mean> table;
  double w[2] = {0.0, 0.0};
  double baseline = 0.0;
  const std::size_t cells = env.max_bag() * env.max_bag();
  SearchResult out;
  struct Visit {
    std::size_t step;
    int left;
    int action;
    std::pair<double, double> phi;
  };
  for (int it = 0; it < iterations; ++it) {
    const double eps = 0.02 + 0.2 * (1.0 - static_cast<double>(it) / iterations);
    std::vector<double> obs = env.reset();
    std::vector<Visit> visits;
    while (!env.done()) {
      const std::size_t step = env.step_index();
      const int left = env.budget() - env.spent();
      int action = 0;
      const auto phi = features(obs, cells);
      if (left > 0) {
        if (rng.unit() < eps) {
          action = rng.bernoulli(0.5) ? 1 : 0;
        } else {
          const double keep = table[{step, left, 0}].value();
          const double block = table[{step, left, 1}].value() + w[0] * phi.first + w[1] * phi.second;
          if (std::abs(block - keep) <= 1e-12)
            action = rng.bernoulli(0.5) ? 1 : 0;
          else
            action = block > keep ? 1 : 0;
        }
        visits.push_back({step, left, action, phi});
      }
      obs = env.step(action == 1).observation;
    }
    const double value = env.final_value();
    const double ret = -value;
    for (const Visit& v : visits) {
      Mean& m = table[{v.step, v.left, v.action}];
      m.sum += ret;
      ++m.n;
    }
    if (it == 0) baseline = ret;
    const double adv = ret - baseline;
    for (const Visit& v : visits) {
      const double sign = v.action ? 1.0 : -1.0;
      w[0] += 0.5 * adv * sign * v.phi.first;
      w[1] += 0.5 * adv * sign * v.phi.second;
    }
    baseline += 0.1 * (ret - baseline);

    if (it == 0 || value < out.best_value) {
      out.best_value = value;
      out.best_policy = env.policy();
    }
    out.trace.push_back(out.best_value);
    ++out.evaluations;
  }
  return out;
}

}  // namespace adi
