#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "imitation/gridworld.hpp"
#include "imitation/learner.hpp"
#include "imitation/mdp.hpp"
#include "imitation/rng.hpp"
#include "imitation/scenario.hpp"

namespace imitation {

/// A mentor: the greedy optimal policy of its own world, followed
/// epsilon-greedily in an independent copy of that world.
class Mentor {
 public:
  Mentor(MentorSpec spec, double gamma, double epsilon);

  StateId state() const { return state_; }
  const Policy& policy() const { return policy_; }
  const MentorSpec& spec() const { return spec_; }
  void reset() { state_ = spec_.map.start(); }
  /// Advances one step; returns the transition's landing state.
  StateId step(CounterRng& rng);

 private:
  MentorSpec spec_;
  Policy policy_;
  double epsilon_;
  StateId state_;
};

Mentor make_mentor(const MentorSpec& spec, double gamma, double epsilon);

struct AgentSpec {
  std::string name;
  LearnerConfig learner;
};

struct ExperimentConfig {
  std::string scenario;
  int runs = 10;
  int horizon = 50000;
  std::uint64_t seed = 1;
  int window = 1000;
  double mentor_epsilon = 0.01;
  /// Number of scenario mentors to use; -1 uses all of them.
  int mentors = -1;
  /// Agents simulated side by side in every run. The first is reported as the
  /// observer and the second as the control in the series CSV.
  std::vector<AgentSpec> agents;
  /// Worker threads; results do not depend on this.
  int threads = 1;
  bool per_run_columns = false;
  /// Write every `stride`-th step of the series.
  int stride = 1;

  void validate() const;
};

struct RunRecord {
  std::string agent;
  int run = 0;
  std::vector<StateId> states;
  std::vector<ActionId> actions;
  std::vector<double> rewards;
  std::vector<std::uint8_t> goals;
  /// Greedy action at every state once the horizon is reached.
  std::vector<ActionId> final_greedy;
  std::uint64_t backups = 0;
  std::uint64_t random_actions = 0;
};

struct AgentSummary {
  std::string agent;
  double optimal_rate = 0.0;
  int convergence_step = -1;
  double final_rate = 0.0;
  std::vector<double> mean_series;
};

struct ExperimentResult {
  ExperimentConfig config;
  Scenario scenario;
  double optimal_rate = 0.0;
  /// Fracture of the observer against the first mentor; 0 without mentors.
  double phi = 0.0;
  /// records[run * agents + agent]
  std::vector<RunRecord> records;
  std::vector<AgentSummary> summaries;

  const RunRecord& record(int run, int agent) const;
  int agent_count() const { return static_cast<int>(config.agents.size()); }
};

/// Observer and control agents from the scenario defaults: imitation on for
/// the first, off for the second.
std::vector<AgentSpec> default_agents(const Scenario& scenario);
LearnerConfig default_learner(const Scenario& scenario);

/// Sliding-window goal counts: entry t counts goals in steps (t-W, t]; the
/// first W-1 entries count the partial prefix.
std::vector<int> goal_rate_series(const std::vector<std::uint8_t>& goals, int window);
std::vector<double> average_series(const std::vector<std::vector<int>>& series);
/// Pointwise observer minus control. Throws std::invalid_argument on a length
/// mismatch.
std::vector<double> delta_curve(const std::vector<double>& observer,
                                const std::vector<double>& control);
/// 1-based step from which the series stays at or above `threshold`, or -1.
int convergence_step(const std::vector<double>& series, double threshold);

/// Goals per `window` steps of the greedy optimal policy, from its stationary
/// distribution.
double optimal_goal_rate(const GridMap& map, const ActionSet& actions, const NoiseModel& noise,
                         double gamma, int window = 1000);

/// Decides whether two actions, one from each model, count as the same policy choice.
using ActionMatch = std::function<bool(ActionId observer_action, ActionId mentor_action)>;

struct FractureReport {
  double phi = 0.0;
  int disputed = 0;
  int undisputed = 0;
  int excluded = 0;
  int diameter = 0;
};

/// Mean over disputed states of the breadth-first distance, along nonzero
/// observer transitions, to the nearest undisputed state. A state is disputed
/// when no optimal observer action matches an optimal mentor action; states
/// where every observer action has the same row are excluded. Unreachable
/// undisputed sets contribute the graph diameter.
FractureReport fracture(const MdpModel& observer, const MdpModel& mentor,
                        const ActionMatch& match);
/// Gridworld form: actions match when their displacements agree.
FractureReport fracture(const Scenario& scenario, int mentor = 0);
FractureReport fracture(const GridMap& observer_map, const ActionSet& observer_actions,
                        const GridMap& mentor_map, const ActionSet& mentor_actions,
                        const NoiseModel& noise, double gamma);

/// Whether following `policy` without noise from the start reaches a goal in
/// the shortest-path number of steps, never entering a negative-reward cell.
bool greedy_path_optimal(const GridMap& map, const ActionSet& actions,
                         const std::vector<ActionId>& policy);

/// Simulates every (run, agent) pair. Runs are independent; results are in
/// run order whatever the thread count.
ExperimentResult run_experiment(const ExperimentConfig& config, const Scenario& scenario);

/// Single simulation of one agent, seeded from (seed, run, agent index).
RunRecord simulate(const Scenario& scenario, const ExperimentConfig& config, int run,
                   int agent_index);

std::string series_csv(const ExperimentResult& result);
std::string summary_csv(const ExperimentResult& result);
/// Writes series.csv and summary.csv into `directory` (created if needed).
void write_results(const ExperimentResult& result, const std::string& directory);

}  // namespace imitation
