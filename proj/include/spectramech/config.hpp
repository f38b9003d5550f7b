#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "spectramech/fd_mechanism.hpp"
#include "spectramech/ss_mechanism.hpp"

namespace spectramech {

inline constexpr std::string_view kConfigSchema = "spectramech/config-1";

enum class Model { fd, ss };

struct SolverConfig {
  std::size_t grid_m = kDefaultTaxGrid;
  std::size_t mc_samples = 4096;
  std::size_t restarts = 16;
  std::size_t regularity_grid = kDefaultRegularityGrid;
  std::size_t quadrature_order = kDefaultQuadratureOrder;
  std::size_t verify_grid = 17;
};

/// A parsed and validated scenario file.
struct ScenarioConfig {
  Model model = Model::fd;
  double bandwidth = 0.0;
  /// Spread spectrum only.
  double total_power = 0.0;
  double noise_density = 1.0;
  std::uint64_t seed = 0;
  std::vector<TypeDistribution> types;
  /// Frequency division only.
  std::vector<GainDistribution> gains;
  std::vector<double> transmit_power;
  /// Spread spectrum only, row-major N x N, entry (j, i) is the gain from
  /// transmitter j to receiver i.
  std::vector<double> gain_matrix;
  SolverConfig solver;
  bool override_regularity = false;
  /// Informational remarks, e.g. the probability mass cut off by truncating
  /// an unbounded gain law.
  std::vector<std::string> notes;
  /// The input document with defaults filled in; its digest identifies runs.
  nlohmann::json canonical;

  std::size_t users() const noexcept { return types.size(); }
  FdScenario fd_scenario() const;
  SsScenario ss_scenario() const;
  SsSolverOptions ss_options() const;
  /// Seed of the spread-spectrum solver starts, kept apart from the Monte
  /// Carlo streams.
  std::uint64_t solver_seed() const;
};

/// Parses a config document. Malformed text and schema violations throw
/// ParseError (with line and column where known); model invariants throw
/// ConfigError.
ScenarioConfig parse_config(std::string_view text);
std::string read_config_text(const std::string& path);
ScenarioConfig load_config(const std::string& path);

/// One issue per failed invariant, without stopping at the first; empty when
/// the document is valid. Regularity is not checked here.
std::vector<std::string> config_issues(std::string_view text);

std::string config_digest(const nlohmann::json& canonical);

}  // namespace spectramech
