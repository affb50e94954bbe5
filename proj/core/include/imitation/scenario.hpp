#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "imitation/gridworld.hpp"

namespace imitation {

struct MentorSpec {
  GridMap map;
  ActionSet actions;
  NoiseModel noise;
};

/// Learner parameters a scenario ships with; the CLI and config files
/// override them field by field.
struct ScenarioDefaults {
  int backups = 0;
  double epsilon0 = 0.25;
  double epsilon_decay = 1.0;
  double c = 0.0;
  int horizon = 50000;
  int runs = 10;
  bool feasibility = false;
  bool repair = false;
  int k = 3;
  int n_attempts = 20;
  double alpha = 0.05;
  /// Dirichlet pseudo-count on each neighbour-or-self successor.
  double prior = 1.0;
};

struct Scenario {
  std::string name;
  std::string summary;
  GridMap map;
  ActionSet actions;
  NoiseModel noise;
  double gamma = 0.9;
  RewardSpec rewards;
  std::vector<MentorSpec> mentors;
  ScenarioDefaults defaults;
};

/// Names accepted by `load_scenario`, in catalogue order.
std::vector<std::string> scenario_names();

/// Builds a shipped scenario. Throws std::invalid_argument for unknown names
/// and std::logic_error if a shipped map fails its structural checks.
Scenario load_scenario(std::string_view name);

/// Raw text of a shipped map file (without the .map suffix).
const std::string& embedded_map(std::string_view name);
std::vector<std::string> embedded_map_names();

}  // namespace imitation
