#include "adi/preprocess.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include "json.hpp"

namespace adi {

AttackGraph merge_admins(const AttackGraph& g, const std::vector<VertexId>& admin_ids,
                         PreprocessReport* report) {
  if (admin_ids.empty()) throw GraphError("merge_admins: no admin vertices given");
  std::vector<bool> merged(g.num_vertices(), false);
  merged[g.da()] = true;
  for (VertexId a : admin_ids) {
    if (a < 0 || static_cast<std::size_t>(a) >= g.num_vertices())
      throw GraphError("merge_admins: admin id out of range");
    if (g.is_entry(a)) throw GraphError("merge_admins: admin '" + g.label(a) + "' is an entry vertex");
    merged[a] = true;
  }

  std::vector<VertexId> remap(g.num_vertices(), -1);
  std::vector<std::string> labels;
  for (std::size_t v = 0; v < g.num_vertices(); ++v) {
    if (merged[v] && static_cast<VertexId>(v) != g.da()) continue;
    remap[v] = static_cast<VertexId>(labels.size());
    labels.push_back(g.label(static_cast<VertexId>(v)));
  }
  const VertexId da = remap[g.da()];
  for (std::size_t v = 0; v < g.num_vertices(); ++v)
    if (merged[v]) remap[v] = da;

  // Ordered map keeps edge order deterministic.
  std::map<std::pair<VertexId, VertexId>, Edge> collapsed;
  std::size_t dropped = 0;
  for (const Edge& e : g.edges()) {
    if (merged[e.src]) {
      ++dropped;
      continue;
    }
    Edge ne{remap[e.src], remap[e.dst], e.failure_rate, e.blockable};
    auto [it, fresh] = collapsed.try_emplace({ne.src, ne.dst}, ne);
    if (fresh) continue;
    ++dropped;
    Edge& kept = it->second;
    if (ne.failure_rate < kept.failure_rate) {
      kept = ne;
    } else if (ne.failure_rate == kept.failure_rate) {
      kept.blockable = kept.blockable || ne.blockable;
    }
  }
  std::vector<Edge> edges;
  for (auto& [key, e] : collapsed) edges.push_back(e);
  std::vector<VertexId> entries;
  for (VertexId v : g.entries()) entries.push_back(remap[v]);

  if (report) {
    std::set<VertexId> distinct(admin_ids.begin(), admin_ids.end());
    distinct.erase(g.da());
    report->merged_admin_count = distinct.size();
    report->removed_vertices += distinct.size();
    report->removed_edges += dropped;
    report->steps_applied.push_back("merge_admins");
  }
  return AttackGraph(std::move(labels), std::move(edges), std::move(entries), da);
}

PruneResult prune(const AttackGraph& g) {
  PreprocessReport report;
  const std::size_t n = g.num_vertices();
  std::vector<bool> alive_v(n, true);
  std::vector<bool> alive_e(g.num_edges(), true);
  auto kill_vertex = [&](VertexId v) {
    alive_v[v] = false;
    for (EdgeId e : g.out_edges(v)) alive_e[e] = false;
    for (EdgeId e : g.in_edges(v)) alive_e[e] = false;
  };

  bool changed = false;
  for (EdgeId e : g.out_edges(g.da())) {
    alive_e[e] = false;
    changed = true;
  }
  if (changed) report.steps_applied.push_back("drop_da_out_edges");

  do {
    changed = false;

    std::vector<bool> reaches(n, false);
    std::deque<VertexId> queue{g.da()};
    reaches[g.da()] = true;
    while (!queue.empty()) {
      const VertexId v = queue.front();
      queue.pop_front();
      for (EdgeId e : g.in_edges(v)) {
        if (!alive_e[e]) continue;
        const VertexId u = g.edge(e).src;
        if (reaches[u] || !alive_v[u]) continue;
        reaches[u] = true;
        queue.push_back(u);
      }
    }
    bool step = false;
    for (std::size_t v = 0; v < n; ++v)
      if (alive_v[v] && !reaches[v]) {
        kill_vertex(static_cast<VertexId>(v));
        step = true;
      }
    if (step) report.steps_applied.push_back("delete_cannot_reach_da");
    changed |= step;

    step = false;
    for (VertexId v : g.entries()) {
      if (!alive_v[v]) continue;
      for (EdgeId e : g.in_edges(v))
        if (alive_e[e]) {
          alive_e[e] = false;
          step = true;
        }
    }
    if (step) report.steps_applied.push_back("delete_edges_into_entries");
    changed |= step;

    step = false;
    for (std::size_t v = 0; v < n; ++v) {
      const auto vid = static_cast<VertexId>(v);
      if (!alive_v[v] || g.is_entry(vid) || vid == g.da()) continue;
      const auto in = g.in_edges(vid);
      if (std::none_of(in.begin(), in.end(), [&](EdgeId e) { return static_cast<bool>(alive_e[e]); })) {
        kill_vertex(vid);
        step = true;
      }
    }
    if (step) report.steps_applied.push_back("delete_unreachable_non_entries");
    changed |= step;
  } while (changed);

  report.removed_vertices = static_cast<std::size_t>(std::count(alive_v.begin(), alive_v.end(), false));
  report.removed_edges = static_cast<std::size_t>(std::count(alive_e.begin(), alive_e.end(), false));
  AttackGraph out = induced_subgraph(g, alive_v, alive_e);
  if (out.entries().empty())
    report.warnings.push_back("DA is unreachable from every entry; attacker success rate is 0");
  return {std::move(out), std::move(report)};
}

std::string report_json(const PreprocessReport& r) {
  nlohmann::json out;
  out["merged_admin_count"] = r.merged_admin_count;
  out["removed_vertices"] = r.removed_vertices;
  out["removed_edges"] = r.removed_edges;
  out["steps_applied"] = r.steps_applied;
  out["warnings"] = r.warnings;
  return out.dump(2) + "\n";
}

}  // namespace adi
