#include <algorithm>
#include <cmath>

#include "adi/maxflow.hpp"
#include "adi/rl_env.hpp"
#include "adi/tdcycle.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace adi;

namespace {

// Plays the env with a fixed blocking set.
double replay(Environment& env, const std::vector<EdgeId>& blocked) {
  env.reset();
  double reward = 0.0;
  while (!env.done()) {
    const EdgeId e = env.schedule()[env.step_index()].edge;
    StepResult r = env.step(std::find(blocked.begin(), blocked.end(), e) != blocked.end());
    reward = r.reward;
    if (r.done) CHECK(env.done());
  }
  return reward;
}

}  // namespace

TEST_CASE("maxflow") {
  MaxFlow mf(4);
  mf.add_edge(0, 1, 3);
  mf.add_edge(0, 2, 2);
  mf.add_edge(1, 2, 1);
  mf.add_edge(1, 3, 2);
  mf.add_edge(2, 3, 3);
  CHECK(mf.solve(0, 3) == doctest::Approx(5));
}

TEST_CASE("schedule covers the blockable edges") {
  AttackGraph g = fx::fig3();
  Environment env = build_env(g, 2);
  CHECK(env.schedule().size() == g.num_blockable());
  std::vector<EdgeId> seen;
  for (const auto& d : env.schedule()) {
    CHECK(env.decomposition().nodes[d.node].kind == NodeKind::Forget);
    seen.push_back(d.edge);
  }
  std::sort(seen.begin(), seen.end());
  CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
}

TEST_CASE("all-keep and replayed optimal episodes") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    AttackGraph g = fx::random_small(seed);
    NiceTreeDecomposition ntd = to_nice(best_decomposition(g), g);
    for (int b = 0; b <= 3; ++b) {
      Environment env = build_env(g, ntd, b);
      CHECK(replay(env, {}) == doctest::Approx(-best_attack(g).success_rate).epsilon(1e-12));
      DefenseSolution s = solve_pure(g, ntd, b);
      CHECK(std::abs(replay(env, s.policy.blocked()) + s.value) <= 1e-9);
      CHECK(env.policy().blocked() == s.policy.blocked());
      CHECK(env.final_value() == doctest::Approx(best_attack(g, env.policy()).success_rate).epsilon(1e-12));
    }
  }
}

TEST_CASE("no blockable edges") {
  AttackGraph g(fx::numbered(2), {{1, 0, 0.3, false}}, {1}, 0);
  Environment env = build_env(g, 2);
  CHECK(env.schedule().empty());
  CHECK(env.done());
  CHECK(env.final_value() == doctest::Approx(0.7));
}

TEST_CASE("blocking without budget is coerced") {
  AttackGraph g = fx::fig1();
  Environment env = build_env(g, 1);
  env.reset();
  StepResult a = env.step(true);
  CHECK_FALSE(a.coerced);
  StepResult b = env.step(true);
  CHECK(b.coerced);
  CHECK(env.spent() == 1);
}

TEST_CASE("observations") {
  AttackGraph g = fx::fig1();
  EnvOptions zero;
  zero.obs_mode = ObsMode::Zero;
  Environment z = build_env(g, 2, zero);
  const std::size_t cells = z.max_bag() * z.max_bag();
  std::vector<double> o = z.reset();
  CHECK(o.size() == z.observation_size());
  CHECK(o.size() == 2 * cells + 2 + z.schedule().size());
  for (std::size_t i = 0; i < 2 * cells; ++i) CHECK(o[i] == 0.0);
  // budget thermometer: 2 of 2 left, no steps yet
  CHECK(o[2 * cells] == 1.0);
  CHECK(o[2 * cells + 1] == 1.0);
  for (std::size_t i = 0; i < z.schedule().size(); ++i) CHECK(o[2 * cells + 2 + i] == 0.0);
  StepResult r = z.step(true);
  CHECK(r.observation[2 * cells] == 1.0);
  CHECK(r.observation[2 * cells + 1] == 0.0);
  CHECK(r.observation[2 * cells + 2] == 1.0);

  Environment full = build_env(g, 2);
  std::vector<double> f = full.reset();
  double mass = 0;
  for (std::size_t i = 0; i < 2 * cells; ++i) {
    CHECK(f[i] >= 0.0);
    CHECK(f[i] <= 1.0);
    mass += f[i];
  }
  CHECK(mass > 0);

  EnvOptions rnd;
  rnd.obs_mode = ObsMode::Random;
  rnd.obs_seed = 4;
  Environment ra = build_env(g, 2, rnd), rb = build_env(g, 2, rnd);
  CHECK(ra.reset() == rb.reset());
}

TEST_CASE("limit_episode") {
  AttackGraph g = fx::fig1();
  AttackGraph h = limit_episode(g, 3);
  std::vector<std::string> kept;
  for (EdgeId e = 0; e < static_cast<EdgeId>(h.num_edges()); ++e)
    if (h.edge(e).blockable) kept.push_back(h.edge_label(e));
  std::sort(kept.begin(), kept.end());
  std::vector<std::string> want = {g.edge_label(*g.find_edge(2, 1)), g.edge_label(*g.find_edge(4, 1)),
                                   g.edge_label(*g.find_edge(5, 1))};
  std::sort(want.begin(), want.end());
  CHECK(kept == want);
  CHECK(serialize_graph(limit_episode(g, 4)) == serialize_graph(g));
  CHECK(serialize_graph(limit_episode(g, 10)) == serialize_graph(g));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    AttackGraph r = fx::random_small(seed);
    for (int t = 1; t <= 4; ++t) {
      AttackGraph l = limit_episode(r, t);
      CHECK(l.num_blockable() <= r.num_blockable());
      if (static_cast<std::size_t>(t) < r.num_blockable() && best_attack(r).success_rate > 0)
        CHECK(l.num_blockable() >= std::min<std::size_t>(t, r.num_blockable()));
    }
  }
}

TEST_CASE("anytime_search") {
  AttackGraph g = fx::fig1();
  Environment env = build_env(g, 2);
  SearchResult one = anytime_search(env, 1, 3);
  CHECK(one.best_value >= 0.76 - 1e-12);
  CHECK(one.trace.size() == 1);
  SearchResult r = anytime_search(env, 500, 0);
  CHECK(r.best_value == doctest::Approx(0.76).epsilon(1e-12));
  for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] <= r.trace[i - 1]);
  CHECK(best_attack(g, r.best_policy).success_rate == doctest::Approx(r.best_value));
  // same seed, same run
  SearchResult again = anytime_search(env, 500, 0);
  CHECK(again.trace == r.trace);
}
