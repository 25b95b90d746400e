#pragma once

#include <string>
#include <vector>

#include "adi/graph.hpp"

namespace adi {

struct PreprocessReport {
  std::size_t merged_admin_count = 0;
  std::size_t removed_vertices = 0;
  std::size_t removed_edges = 0;
  std::vector<std::string> steps_applied;
  std::vector<std::string> warnings;
};

// Collapses the admin vertices (and the current DA) into the DA vertex. Edges
// into any admin are redirected to DA; parallel copies keep the minimum
// failure rate and that copy's blockable flag. DA out-edges are dropped.
AttackGraph merge_admins(const AttackGraph& g, const std::vector<VertexId>& admin_ids,
                         PreprocessReport* report = nullptr);

struct PruneResult {
  AttackGraph graph;
  PreprocessReport report;
};

// Drops DA out-edges, then repeats until nothing changes: delete vertices that
// cannot reach DA, delete edges into entries, delete non-entry vertices with
// no in-edges.
PruneResult prune(const AttackGraph& g);

std::string report_json(const PreprocessReport& report);

}  // namespace adi
