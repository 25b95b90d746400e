#include "adi/kernel.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "adi/preprocess.hpp"
#include "json.hpp"

namespace adi {

std::vector<VertexId> split_nodes(const AttackGraph& g) {
  std::vector<VertexId> out;
  for (std::size_t v = 0; v < g.num_vertices(); ++v)
    if (g.out_edges(static_cast<VertexId>(v)).size() >= 2) out.push_back(static_cast<VertexId>(v));
  return out;
}

std::vector<NonSplittingPath> nsp_decompose(const AttackGraph& g) {
  const std::size_t n = g.num_vertices();
  std::vector<bool> origin(n, false);
  for (VertexId v : split_nodes(g)) origin[v] = true;
  for (VertexId v : g.entries()) origin[v] = true;

  std::vector<NonSplittingPath> out;
  for (std::size_t u = 0; u < n; ++u) {
    if (!origin[u]) continue;
    std::vector<EdgeId> first(g.out_edges(static_cast<VertexId>(u)).begin(),
                              g.out_edges(static_cast<VertexId>(u)).end());
    std::sort(first.begin(), first.end(), [&](EdgeId a, EdgeId b) { return g.edge(a).dst < g.edge(b).dst; });
    for (EdgeId e : first) {
      NonSplittingPath p;
      p.origin = static_cast<VertexId>(u);
      p.first_hop = g.edge(e).dst;
      EdgeId cur = e;
      while (true) {
        p.edges.push_back(cur);
        const Edge& edge = g.edge(cur);
        p.c *= 1.0 - edge.failure_rate;
        if (edge.blockable) p.bw = cur;
        const VertexId v = edge.dst;
        const auto outs = g.out_edges(v);
        if (v == g.da() || outs.size() >= 2) {
          p.dest = v;
          break;
        }
        if (outs.empty())
          throw GraphError("path from " + g.label(p.origin) + " ends at " + g.label(v) + " without reaching DA");
        if (p.edges.size() > n) throw GraphError("cycle of single-successor vertices at " + g.label(v));
        cur = outs[0];
      }
      out.push_back(std::move(p));
    }
  }
  return out;
}

AttackGraph delete_dominated(const AttackGraph& input, DominanceReport* report) {
  DominanceReport rep;
  AttackGraph g = prune(input).graph;
  while (true) {
    ++rep.rounds;
    const auto paths = nsp_decompose(g);
    std::set<EdgeId> worthy;
    for (const auto& p : paths)
      if (p.bw) worthy.insert(*p.bw);
    std::vector<bool> flags(g.num_edges());
    bool changed = false;
    for (std::size_t e = 0; e < g.num_edges(); ++e) {
      flags[e] = g.edges()[e].blockable && worthy.count(static_cast<EdgeId>(e));
      if (flags[e] != g.edges()[e].blockable) {
        ++rep.unmarked_edges;
        changed = true;
      }
    }

    // Paths are grouped by (origin, dest); only splitting origins compete.
    std::map<std::pair<VertexId, VertexId>, std::vector<const NonSplittingPath*>> groups;
    for (const auto& p : paths)
      if (g.out_edges(p.origin).size() >= 2) groups[{p.origin, p.dest}].push_back(&p);
    std::vector<bool> keep_edge(g.num_edges(), true);
    for (const auto& [key, group] : groups) {
      const NonSplittingPath* best = nullptr;
      for (const auto* p : group)
        if (!p->bw && (!best || p->c > best->c)) best = p;  // ascending first_hop keeps ties small
      if (!best) continue;
      for (const auto* p : group) {
        if (p == best || p->c > best->c) continue;
        keep_edge[p->edges.front()] = false;
        ++rep.deleted_edges;
        changed = true;
      }
    }
    if (!changed) break;
    AttackGraph marked = g.with_blockable(flags);
    g = prune(induced_subgraph(marked, std::vector<bool>(g.num_vertices(), true), keep_edge)).graph;
  }
  if (report) *report = rep;
  return g;
}

KernelGraph build_kernel(const AttackGraph& g) {
  KernelGraph k{g, {}, nsp_decompose(g), {}};
  std::set<VertexId> vs(g.entries().begin(), g.entries().end());
  for (VertexId v : split_nodes(g)) vs.insert(v);
  vs.insert(g.da());
  k.vertices.assign(vs.begin(), vs.end());
  std::set<EdgeId> bw;
  for (const auto& p : k.meta_edges)
    if (p.bw) bw.insert(*p.bw);
  k.bw_edges.assign(bw.begin(), bw.end());
  return k;
}

KernelGraph kernelize(const AttackGraph& g, DominanceReport* report) {
  return build_kernel(delete_dominated(g, report));
}

std::string kernel_json(const KernelGraph& k) {
  const AttackGraph& g = k.graph;
  nlohmann::ordered_json j;
  j["vertices"] = nlohmann::json::array();
  for (VertexId v : k.vertices) j["vertices"].push_back(g.label(v));
  j["nsp_count"] = k.nsp_count();
  j["bw_edges"] = nlohmann::json::array();
  for (EdgeId e : k.bw_edges) j["bw_edges"].push_back(g.edge_label(e));
  j["meta_edges"] = nlohmann::json::array();
  for (const auto& p : k.meta_edges) {
    nlohmann::ordered_json m;
    m["origin"] = g.label(p.origin);
    m["first_hop"] = g.label(p.first_hop);
    m["dest"] = g.label(p.dest);
    m["c"] = p.c;
    m["blockable"] = p.blockable();
    m["bw"] = p.bw ? nlohmann::json(g.edge_label(*p.bw)) : nlohmann::json(nullptr);
    m["length"] = p.edges.size();
    j["meta_edges"].push_back(m);
  }
  return j.dump(2);
}

}  // namespace adi
