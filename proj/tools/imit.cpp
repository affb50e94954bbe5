// imit: run imitation experiments, compute fracture, solve maps.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "imitation/gridworld.hpp"
#include "imitation/harness.hpp"
#include "imitation/mdp.hpp"
#include "imitation/scenario.hpp"

namespace {

using namespace imitation;

struct RunOptions {
  std::string scenario;
  std::optional<int> runs;
  std::optional<int> steps;
  std::uint64_t seed = 1;
  std::string out = "results";
  std::optional<int> k;
  std::optional<int> n;
  std::optional<double> c;
  std::optional<double> alpha;
  std::optional<int> backups;
  std::optional<double> epsilon0;
  std::optional<double> decay;
  std::optional<double> prior;
  bool no_imitation = false;
  bool no_feasibility = false;
  bool no_repair = false;
  bool feasibility = false;
  bool repair = false;
  std::optional<int> mentors;
  int window = 1000;
  double mentor_epsilon = 0.01;
  int threads = 1;
  int stride = 1;
  bool per_run = false;
  bool beta_variance = false;
};

int run_command(const RunOptions& o) {
  const Scenario scenario = load_scenario(o.scenario);
  ExperimentConfig cfg;
  cfg.scenario = scenario.name;
  cfg.runs = o.runs.value_or(scenario.defaults.runs);
  cfg.horizon = o.steps.value_or(scenario.defaults.horizon);
  cfg.seed = o.seed;
  if (const char* env = std::getenv("IMIT_SEED")) {
    try {
      cfg.seed = std::stoull(env);
    } catch (const std::exception&) {
      throw CLI::ValidationError("IMIT_SEED", std::string("not an unsigned integer: ") + env);
    }
  }
  cfg.window = o.window;
  cfg.mentor_epsilon = o.mentor_epsilon;
  cfg.mentors = o.mentors.value_or(-1);
  cfg.threads = o.threads;
  cfg.stride = o.stride;
  cfg.per_run_columns = o.per_run;

  LearnerConfig observer = default_learner(scenario);
  if (o.k) observer.feasibility.k = *o.k;
  if (o.n) observer.feasibility.n_attempts = *o.n;
  if (o.c) observer.confidence.c = *o.c;
  if (o.alpha) observer.feasibility.alpha = *o.alpha;
  if (o.backups) observer.backups = *o.backups;
  if (o.epsilon0) observer.epsilon0 = *o.epsilon0;
  if (o.decay) observer.epsilon_decay = *o.decay;
  if (o.prior) observer.prior_count = *o.prior;
  if (o.beta_variance) observer.variance = VarianceMode::Beta;
  if (o.feasibility) observer.feasibility_enabled = true;
  if (o.repair) observer.repair_enabled = observer.feasibility_enabled = true;
  if (o.no_imitation) observer.imitation_enabled = false;
  if (o.no_feasibility) observer.feasibility_enabled = false;
  if (o.no_repair) observer.repair_enabled = false;
  if (!observer.feasibility_enabled) observer.repair_enabled = false;
  LearnerConfig control = observer;
  control.imitation_enabled = false;
  control.feasibility_enabled = false;
  control.repair_enabled = false;
  cfg.agents = {{"obs", observer}, {"ctrl", control}};

  const ExperimentResult result = run_experiment(cfg, scenario);
  write_results(result, o.out);
  std::cout << summary_csv(result);
  return 0;
}

int fracture_command(const std::string& scenario_name, const std::vector<std::string>& maps,
                     const std::string& observer_actions, const std::string& mentor_actions,
                     double eta, double gamma) {
  FractureReport report;
  if (!scenario_name.empty()) {
    report = fracture(load_scenario(scenario_name));
  } else {
    report = fracture(GridMap::load(maps.at(0)), ActionSet::from_name(observer_actions),
                      GridMap::load(maps.at(1)), ActionSet::from_name(mentor_actions),
                      NoiseModel{eta}, gamma);
  }
  std::printf("phi %.6f\ndisputed %d\nundisputed %d\nexcluded %d\ndiameter %d\n", report.phi,
              report.disputed, report.undisputed, report.excluded, report.diameter);
  return 0;
}

int solve_command(const std::string& path, const std::string& actions_name, double eta,
                  double gamma, double epsilon) {
  const GridMap map = GridMap::load(path);
  const ActionSet actions = ActionSet::from_name(actions_name);
  const SolveResult solved = value_iteration(true_model(map, actions, NoiseModel{eta}, gamma), epsilon);
  std::printf("iterations %d\n", solved.iterations);
  std::printf("start_value %.10g\n", solved.values[map.start()]);
  std::printf("optimal_rate %.6f\n", optimal_goal_rate(map, actions, NoiseModel{eta}, gamma));
  std::printf("shortest_path %d\n", shortest_path_length(map, actions));
  std::printf("values\n");
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      std::printf("%s%9.4f", x ? " " : "", solved.values[map.index({x, y})]);
    }
    std::printf("\n");
  }
  std::printf("policy\n");
  for (int y = 0; y < map.height(); ++y) {
    std::string row;
    for (int x = 0; x < map.width(); ++x) {
      const StateId s = map.index({x, y});
      if (map.is_obstacle(s)) {
        row += '#';
        continue;
      }
      const Displacement d = actions.moves[static_cast<std::size_t>(solved.policy[s])];
      static const char* arrows[3][3] = {{"7", "^", "9"}, {"<", "o", ">"}, {"1", "v", "3"}};
      row += arrows[d.dy + 1][d.dx + 1];
    }
    std::printf("%s\n", row.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Model-based reinforcement learning with implicit imitation"};
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key=value file mirroring the flags; flags win");

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "simulate observer and control agents, write CSV");
  run_cmd->add_option("--scenario", run.scenario, "scenario name")->required();
  run_cmd->add_option("--runs", run.runs, "independent runs");
  run_cmd->add_option("--steps", run.steps, "steps per run");
  run_cmd->add_option("--seed", run.seed, "base seed (IMIT_SEED overrides)");
  run_cmd->add_option("--out", run.out, "output directory")->capture_default_str();
  run_cmd->add_option("--k", run.k, "repair bridge length");
  run_cmd->add_option("--n", run.n, "repair attempts before giving up");
  run_cmd->add_option("--c", run.c, "confidence multiplier on sigma");
  run_cmd->add_option("--alpha", run.alpha, "feasibility test significance");
  run_cmd->add_option("--backups", run.backups, "prioritized backups per sample");
  run_cmd->add_option("--epsilon0", run.epsilon0, "initial exploration rate");
  run_cmd->add_option("--decay", run.decay, "per-step exploration decay");
  run_cmd->add_option("--prior", run.prior, "Dirichlet pseudo-count per neighbour cell");
  run_cmd->add_flag("--no-imitation", run.no_imitation, "ignore mentors in the observer");
  run_cmd->add_flag("--feasibility", run.feasibility, "enable feasibility testing");
  run_cmd->add_flag("--no-feasibility", run.no_feasibility, "disable feasibility testing");
  run_cmd->add_flag("--repair", run.repair, "enable k-step repair (implies feasibility)");
  run_cmd->add_flag("--no-repair", run.no_repair, "disable k-step repair");
  run_cmd->add_option("--mentors", run.mentors, "number of scenario mentors to observe");
  run_cmd->add_option("--window", run.window, "goal-rate window")->capture_default_str();
  run_cmd->add_option("--mentor-epsilon", run.mentor_epsilon, "mentor exploration")
      ->capture_default_str();
  run_cmd->add_option("--threads", run.threads, "worker threads")->capture_default_str();
  run_cmd->add_option("--stride", run.stride, "write every n-th step")->capture_default_str();
  run_cmd->add_flag("--per-run", run.per_run, "add per-run goal-rate columns");
  run_cmd->add_flag("--beta-variance", run.beta_variance, "use the Beta marginal variance");

  std::string fracture_scenario;
  std::vector<std::string> fracture_maps;
  std::string observer_actions = "NEWS";
  std::string mentor_actions = "NEWS";
  double fracture_eta = 0.0;
  double fracture_gamma = 0.9;
  auto* fracture_cmd = app.add_subcommand("fracture", "fracture between observer and mentor");
  auto* fs = fracture_cmd->add_option("--scenario", fracture_scenario, "scenario name");
  auto* fm = fracture_cmd->add_option("--maps", fracture_maps, "observer and mentor map files")
                 ->expected(2);
  fs->excludes(fm);
  fracture_cmd->add_option("--observer-actions", observer_actions)->capture_default_str();
  fracture_cmd->add_option("--mentor-actions", mentor_actions)->capture_default_str();
  fracture_cmd->add_option("--eta", fracture_eta)->capture_default_str();
  fracture_cmd->add_option("--gamma", fracture_gamma)->capture_default_str();

  std::string solve_map;
  std::string solve_actions = "NEWS";
  double solve_eta = 0.1;
  double solve_gamma = 0.9;
  double solve_epsilon = 1e-6;
  auto* solve_cmd = app.add_subcommand("solve", "value iteration on a map file");
  solve_cmd->add_option("--map", solve_map, "map file")->required();
  solve_cmd->add_option("--actions", solve_actions)->capture_default_str();
  solve_cmd->add_option("--eta", solve_eta)->capture_default_str();
  solve_cmd->add_option("--gamma", solve_gamma)->capture_default_str();
  solve_cmd->add_option("--epsilon", solve_epsilon)->capture_default_str();

  auto* list_cmd = app.add_subcommand("scenarios", "list shipped scenarios");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run_cmd) return run_command(run);
    if (*fracture_cmd) {
      if (fracture_scenario.empty() && fracture_maps.empty()) {
        throw CLI::ValidationError("fracture", "give --scenario or --maps OBSERVER MENTOR");
      }
      return fracture_command(fracture_scenario, fracture_maps, observer_actions, mentor_actions,
                              fracture_eta, fracture_gamma);
    }
    if (*solve_cmd) return solve_command(solve_map, solve_actions, solve_eta, solve_gamma, solve_epsilon);
    if (*list_cmd) {
      for (const auto& name : scenario_names()) {
        std::printf("%-18s %s\n", name.c_str(), load_scenario(name).summary.c_str());
      }
      return 0;
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "imit: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "imit: %s\n", e.what());
    return 1;
  }
  return 0;
}
