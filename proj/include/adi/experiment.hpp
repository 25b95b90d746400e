#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adi/graph.hpp"

namespace adi {

enum class Algorithm { Greedy, Ip, Tdcycle, IterLp, MipF, MipLb, Anytime };

const char* algorithm_name(Algorithm a);
// Throws std::invalid_argument for unknown names.
Algorithm parse_algorithm(std::string_view name);

struct ExperimentSpec {
  std::optional<std::string> graph_document;   // fixed graph (JSON text)
  std::optional<GeneratorParams> generator;    // or a generated topology
  std::vector<double> budgets;
  std::vector<Algorithm> algorithms;
  int trials = 1;
  std::uint64_t base_seed = 0;
  // When > 0, trial t redraws entries and blockable flags with seed
  // base_seed + t. Generated graphs always redraw (with the generator's counts
  // unless these are set).
  std::size_t entry_count = 0;
  std::size_t entry_pool = 0;
  int regions = 10;
  double eps = 0.01;
  int anytime_iterations = 500;
  int width_cap = 8;
};

// Throws std::invalid_argument on malformed configs. A relative "graph" path
// is resolved against base_dir.
ExperimentSpec parse_experiment_spec(std::string_view json, const std::string& base_dir = ".");

struct ReportCell {
  Algorithm algorithm{};
  double budget = 0.0;
  std::optional<double> mean_success;  // empty when any trial was inapplicable
  double mean_seconds = 0.0;
  int trials_ok = 0;
  std::string note;
};

struct ReportTable {
  int trials = 0;
  std::uint64_t base_seed = 0;
  std::vector<ReportCell> cells;  // algorithm-major, budgets in config order
};

inline constexpr int kReportVersion = 1;

ReportTable run_experiment(const ExperimentSpec& spec);
std::string experiment_json(const ReportTable& table);
std::string experiment_text(const ReportTable& table);

}  // namespace adi
