#include "imitation/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <deque>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace imitation {

namespace {

constexpr std::uint64_t kPolicyStream = 1;
constexpr std::uint64_t kEnvironmentStream = 2;
constexpr std::uint64_t kMentorStream = 100;

CounterRng run_stream(std::uint64_t seed, int run) {
  return CounterRng(seed).derive(static_cast<std::uint64_t>(run));
}

}  // namespace

Mentor::Mentor(MentorSpec spec, double gamma, double epsilon)
    : spec_(std::move(spec)), epsilon_(epsilon), state_(spec_.map.start()) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument("mentor epsilon must lie in [0, 1]");
  }
  policy_ = value_iteration(true_model(spec_.map, spec_.actions, spec_.noise, gamma)).policy;
}

StateId Mentor::step(CounterRng& rng) {
  ActionId a = policy_[state_];
  if (epsilon_ > 0.0 && rng.bernoulli(epsilon_)) {
    a = static_cast<ActionId>(rng.below(static_cast<std::uint64_t>(spec_.actions.size())));
  }
  state_ = imitation::step(spec_.map, spec_.actions, spec_.noise, state_, a, rng).next;
  return state_;
}

Mentor make_mentor(const MentorSpec& spec, double gamma, double epsilon) {
  return Mentor(spec, gamma, epsilon);
}

void ExperimentConfig::validate() const {
  if (runs < 1) throw std::invalid_argument("runs must be >= 1");
  if (horizon < 0) throw std::invalid_argument("horizon must be >= 0");
  if (window < 1) throw std::invalid_argument("window must be >= 1");
  if (stride < 1) throw std::invalid_argument("stride must be >= 1");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
  if (!(mentor_epsilon >= 0.0 && mentor_epsilon <= 1.0)) {
    throw std::invalid_argument("mentor epsilon must lie in [0, 1]");
  }
  if (agents.empty()) throw std::invalid_argument("at least one agent is required");
  for (const auto& a : agents) {
    if (a.name.empty() || a.name.find_first_of(",\n\" ") != std::string::npos) {
      throw std::invalid_argument("agent names must be non-empty and CSV-safe");
    }
    a.learner.validate();
  }
}

const RunRecord& ExperimentResult::record(int run, int agent) const {
  return records.at(static_cast<std::size_t>(run) * config.agents.size() +
                    static_cast<std::size_t>(agent));
}

LearnerConfig default_learner(const Scenario& scenario) {
  const auto& d = scenario.defaults;
  LearnerConfig cfg;
  cfg.gamma = scenario.gamma;
  cfg.backups = d.backups;
  cfg.epsilon0 = d.epsilon0;
  cfg.epsilon_decay = d.epsilon_decay;
  cfg.confidence.c = d.c;
  cfg.feasibility.alpha = d.alpha;
  cfg.feasibility.k = d.k;
  cfg.feasibility.n_attempts = d.n_attempts;
  cfg.feasibility_enabled = d.feasibility;
  cfg.repair_enabled = d.repair;
  cfg.prior_count = d.prior;
  return cfg;
}

std::vector<AgentSpec> default_agents(const Scenario& scenario) {
  LearnerConfig observer = default_learner(scenario);
  LearnerConfig control = observer;
  control.imitation_enabled = false;
  control.feasibility_enabled = false;
  control.repair_enabled = false;
  return {{"obs", observer}, {"ctrl", control}};
}

std::vector<int> goal_rate_series(const std::vector<std::uint8_t>& goals, int window) {
  if (window < 1) throw std::invalid_argument("window must be >= 1");
  std::vector<int> series(goals.size());
  int count = 0;
  for (std::size_t t = 0; t < goals.size(); ++t) {
    count += goals[t] ? 1 : 0;
    if (t >= static_cast<std::size_t>(window) && goals[t - static_cast<std::size_t>(window)]) {
      --count;
    }
    series[t] = count;
  }
  return series;
}

std::vector<double> average_series(const std::vector<std::vector<int>>& series) {
  if (series.empty()) return {};
  const std::size_t n = series.front().size();
  std::vector<double> mean(n, 0.0);
  for (const auto& s : series) {
    if (s.size() != n) throw std::invalid_argument("average_series: length mismatch");
    for (std::size_t t = 0; t < n; ++t) mean[t] += s[t];
  }
  for (double& m : mean) m /= static_cast<double>(series.size());
  return mean;
}

std::vector<double> delta_curve(const std::vector<double>& observer,
                                const std::vector<double>& control) {
  if (observer.size() != control.size()) {
    throw std::invalid_argument("delta_curve: series lengths differ (" +
                                std::to_string(observer.size()) + " vs " +
                                std::to_string(control.size()) + ")");
  }
  std::vector<double> delta(observer.size());
  for (std::size_t t = 0; t < observer.size(); ++t) delta[t] = observer[t] - control[t];
  return delta;
}

int convergence_step(const std::vector<double>& series, double threshold) {
  int step = -1;
  for (std::size_t t = series.size(); t-- > 0;) {
    if (series[t] < threshold) break;
    step = static_cast<int>(t) + 1;
  }
  return step;
}

double optimal_goal_rate(const GridMap& map, const ActionSet& actions, const NoiseModel& noise,
                         double gamma, int window) {
  const MdpModel model = true_model(map, actions, noise, gamma);
  const SolveResult solved = value_iteration(model, 1e-10);
  const auto dist = stationary_distribution(model, solved.policy, map.start());
  double mass = 0.0;
  for (StateId s : map.cells_of(CellKind::Goal)) mass += dist[static_cast<std::size_t>(s)];
  return mass * window;
}

FractureReport fracture(const MdpModel& observer, const MdpModel& mentor,
                        const ActionMatch& match) {
  if (observer.state_count() != mentor.state_count()) {
    throw std::invalid_argument("fracture: models must share a state space");
  }
  const int n = observer.state_count();
  constexpr double kTolerance = 1e-7;
  const auto optimal_actions = [&](const MdpModel& model) {
    const SolveResult solved = value_iteration(model, 1e-10);
    std::vector<std::vector<ActionId>> best(static_cast<std::size_t>(n));
    for (StateId s = 0; s < n; ++s) {
      const double top = bellman_backup(model, solved.values, s).value;
      const double tol = kTolerance * std::max(1.0, std::abs(top));
      for (ActionId a = 0; a < model.action_count(); ++a) {
        if (q_value(model, solved.values, s, a) >= top - tol) {
          best[static_cast<std::size_t>(s)].push_back(a);
        }
      }
    }
    return best;
  };
  const auto undefined = [](const MdpModel& model, StateId s) {
    const auto first = model.row(s, 0);
    for (ActionId a = 1; a < model.action_count(); ++a) {
      const auto row = model.row(s, a);
      if (row.size() != first.size() ||
          !std::equal(row.begin(), row.end(), first.begin(), [](const auto& x, const auto& y) {
            return x.state == y.state && x.prob == y.prob;
          })) {
        return false;
      }
    }
    return true;
  };

  const auto obs_best = optimal_actions(observer);
  const auto men_best = optimal_actions(mentor);

  enum Kind : char { Excluded, Disputed, Undisputed };
  std::vector<Kind> kind(static_cast<std::size_t>(n), Excluded);
  FractureReport report;
  for (StateId s = 0; s < n; ++s) {
    if (undefined(observer, s) || undefined(mentor, s)) {
      ++report.excluded;
      continue;
    }
    bool agree = false;
    for (ActionId a : obs_best[static_cast<std::size_t>(s)]) {
      for (ActionId b : men_best[static_cast<std::size_t>(s)]) agree = agree || match(a, b);
    }
    kind[static_cast<std::size_t>(s)] = agree ? Undisputed : Disputed;
    ++(agree ? report.undisputed : report.disputed);
  }

  std::vector<std::vector<StateId>> forward(static_cast<std::size_t>(n));
  std::vector<std::vector<StateId>> reverse(static_cast<std::size_t>(n));
  for (StateId s = 0; s < n; ++s) {
    auto& out = forward[static_cast<std::size_t>(s)];
    for (ActionId a = 0; a < observer.action_count(); ++a) {
      for (const auto& succ : observer.row(s, a)) {
        if (succ.prob > 0.0 && succ.state != s &&
            std::find(out.begin(), out.end(), succ.state) == out.end()) {
          out.push_back(succ.state);
          reverse[static_cast<std::size_t>(succ.state)].push_back(s);
        }
      }
    }
  }
  const auto bfs = [&](const std::vector<std::vector<StateId>>& edges,
                       const std::vector<StateId>& sources) {
    std::vector<int> dist(static_cast<std::size_t>(n), -1);
    std::deque<StateId> frontier;
    for (StateId s : sources) {
      dist[static_cast<std::size_t>(s)] = 0;
      frontier.push_back(s);
    }
    while (!frontier.empty()) {
      const StateId u = frontier.front();
      frontier.pop_front();
      for (StateId v : edges[static_cast<std::size_t>(u)]) {
        if (dist[static_cast<std::size_t>(v)] >= 0) continue;
        dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
        frontier.push_back(v);
      }
    }
    return dist;
  };

  if (report.disputed == 0) return report;
  for (StateId s = 0; s < n; ++s) {
    if (kind[static_cast<std::size_t>(s)] == Excluded) continue;
    for (int d : bfs(forward, {s})) report.diameter = std::max(report.diameter, d);
  }
  std::vector<StateId> undisputed;
  for (StateId s = 0; s < n; ++s) {
    if (kind[static_cast<std::size_t>(s)] == Undisputed) undisputed.push_back(s);
  }
  const auto to_undisputed = bfs(reverse, undisputed);
  double total = 0.0;
  for (StateId s = 0; s < n; ++s) {
    if (kind[static_cast<std::size_t>(s)] != Disputed) continue;
    const int d = to_undisputed[static_cast<std::size_t>(s)];
    total += d >= 0 ? d : report.diameter;
  }
  report.phi = total / report.disputed;
  return report;
}

FractureReport fracture(const GridMap& observer_map, const ActionSet& observer_actions,
                        const GridMap& mentor_map, const ActionSet& mentor_actions,
                        const NoiseModel& noise, double gamma) {
  const MdpModel observer = true_model(observer_map, observer_actions, noise, gamma);
  const MdpModel mentor = true_model(mentor_map, mentor_actions, noise, gamma);
  return fracture(observer, mentor, [&](ActionId a, ActionId b) {
    return observer_actions.moves[static_cast<std::size_t>(a)] ==
           mentor_actions.moves[static_cast<std::size_t>(b)];
  });
}

FractureReport fracture(const Scenario& scenario, int mentor) {
  const auto& m = scenario.mentors.at(static_cast<std::size_t>(mentor));
  return fracture(scenario.map, scenario.actions, m.map, m.actions, scenario.noise,
                  scenario.gamma);
}

bool greedy_path_optimal(const GridMap& map, const ActionSet& actions,
                         const std::vector<ActionId>& policy) {
  const int shortest = shortest_path_length(map, actions);
  if (shortest < 0) return false;
  StateId s = map.start();
  for (int t = 0; t < shortest; ++t) {
    s = apply_move(map, s, actions.moves.at(static_cast<std::size_t>(policy.at(static_cast<std::size_t>(s)))));
    if (map.reward(s) < 0.0) return false;
    if (map.is_goal(s)) return true;
  }
  return false;
}

RunRecord simulate(const Scenario& scenario, const ExperimentConfig& config, int run,
                   int agent_index) {
  const AgentSpec& agent = config.agents.at(static_cast<std::size_t>(agent_index));
  const int mentor_count = config.mentors < 0
                               ? static_cast<int>(scenario.mentors.size())
                               : std::min(config.mentors, static_cast<int>(scenario.mentors.size()));
  const CounterRng root = run_stream(config.seed, run);
  CounterRng policy_rng = root.derive(kPolicyStream);
  CounterRng env_rng = root.derive(kEnvironmentStream);

  std::vector<Mentor> mentors;
  std::vector<CounterRng> mentor_rngs;
  if (agent.learner.imitation_enabled) {
    for (int m = 0; m < mentor_count; ++m) {
      mentors.emplace_back(scenario.mentors[static_cast<std::size_t>(m)], scenario.gamma,
                           config.mentor_epsilon);
      mentor_rngs.push_back(root.derive(kMentorStream + static_cast<std::uint64_t>(m)));
    }
  }

  Learner learner(grid_setup(scenario.map, scenario.actions.size(), mentor_count), agent.learner);
  RunRecord rec;
  rec.agent = agent.name;
  rec.run = run;
  const auto h = static_cast<std::size_t>(config.horizon);
  rec.states.reserve(h);
  rec.actions.reserve(h);
  rec.rewards.reserve(h);
  rec.goals.reserve(h);

  StateId s = scenario.map.start();
  for (int t = 0; t < config.horizon; ++t) {
    const ActionId a = learner.select_action(s, policy_rng);
    if (learner.last_action_random()) ++rec.random_actions;
    const StepResult r = step(scenario.map, scenario.actions, scenario.noise, s, a, env_rng);
    learner.observe_own(s, a, r.next);
    rec.states.push_back(r.next);
    rec.actions.push_back(a);
    rec.rewards.push_back(r.reward);
    rec.goals.push_back(r.goal ? 1 : 0);
    s = r.next;
    for (std::size_t m = 0; m < mentors.size(); ++m) {
      const StateId from = mentors[m].state();
      const StateId to = mentors[m].step(mentor_rngs[m]);
      learner.observe_mentor(static_cast<int>(m), from, to);
    }
  }
  rec.final_greedy.reserve(static_cast<std::size_t>(scenario.map.state_count()));
  for (StateId x = 0; x < scenario.map.state_count(); ++x) {
    rec.final_greedy.push_back(learner.greedy_action(x));
  }
  rec.backups = learner.backups_performed();
  return rec;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const Scenario& scenario) {
  config.validate();
  ExperimentResult result;
  result.config = config;
  result.scenario = scenario;
  result.optimal_rate = optimal_goal_rate(scenario.map, scenario.actions, scenario.noise,
                                          scenario.gamma, config.window);
  if (!scenario.mentors.empty()) result.phi = fracture(scenario).phi;

  const int agents = static_cast<int>(config.agents.size());
  const int jobs = config.runs * agents;
  result.records.resize(static_cast<std::size_t>(jobs));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (int job = next++; job < jobs; job = next++) {
      try {
        result.records[static_cast<std::size_t>(job)] =
            simulate(scenario, config, job / agents, job % agents);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int threads = std::min(config.threads, jobs);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  for (int a = 0; a < agents; ++a) {
    std::vector<std::vector<int>> per_run;
    for (int r = 0; r < config.runs; ++r) {
      per_run.push_back(goal_rate_series(result.record(r, a).goals, config.window));
    }
    AgentSummary summary;
    summary.agent = config.agents[static_cast<std::size_t>(a)].name;
    summary.optimal_rate = result.optimal_rate;
    summary.mean_series = average_series(per_run);
    summary.convergence_step = convergence_step(summary.mean_series, 0.8 * result.optimal_rate);
    summary.final_rate = summary.mean_series.empty() ? 0.0 : summary.mean_series.back();
    result.summaries.push_back(std::move(summary));
  }
  return result;
}

namespace {

void append_number(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  out += buf;
}

}  // namespace

std::string series_csv(const ExperimentResult& result) {
  const auto& cfg = result.config;
  const int agents = result.agent_count();
  std::string out = "step";
  for (const auto& s : result.summaries) out += "," + s.agent + "_mean";
  if (agents >= 2) out += ",delta";
  if (cfg.per_run_columns) {
    for (int a = 0; a < agents; ++a) {
      for (int r = 0; r < cfg.runs; ++r) {
        out += "," + result.summaries[static_cast<std::size_t>(a)].agent + "_run" +
               std::to_string(r);
      }
    }
  }
  out += '\n';

  std::vector<std::vector<int>> per_run;
  if (cfg.per_run_columns) {
    for (int a = 0; a < agents; ++a) {
      for (int r = 0; r < cfg.runs; ++r) {
        per_run.push_back(goal_rate_series(result.record(r, a).goals, cfg.window));
      }
    }
  }
  std::vector<double> delta;
  if (agents >= 2) {
    delta = delta_curve(result.summaries[0].mean_series, result.summaries[1].mean_series);
  }
  for (int t = 0; t < cfg.horizon; ++t) {
    if ((t + 1) % cfg.stride != 0 && t + 1 != cfg.horizon) continue;
    out += std::to_string(t + 1);
    for (const auto& s : result.summaries) {
      out += ',';
      append_number(out, s.mean_series[static_cast<std::size_t>(t)]);
    }
    if (agents >= 2) {
      out += ',';
      append_number(out, delta[static_cast<std::size_t>(t)]);
    }
    for (const auto& series : per_run) out += "," + std::to_string(series[static_cast<std::size_t>(t)]);
    out += '\n';
  }
  return out;
}

std::string summary_csv(const ExperimentResult& result) {
  std::string out = "scenario,agent,optimal_rate,convergence_step,final_rate,phi\n";
  for (const auto& s : result.summaries) {
    out += result.scenario.name + "," + s.agent + ",";
    append_number(out, s.optimal_rate);
    out += "," + std::to_string(s.convergence_step) + ",";
    append_number(out, s.final_rate);
    out += ',';
    append_number(out, result.phi);
    out += '\n';
  }
  return out;
}

void write_results(const ExperimentResult& result, const std::string& directory) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + directory + "': " + ec.message());
  const auto write = [&](const std::string& name, const std::string& text) {
    const std::string path = (fs::path(directory) / name).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << text;
    if (!out.flush()) throw std::runtime_error("failed writing '" + path + "'");
  };
  write("series.csv", series_csv(result));
  write("summary.csv", summary_csv(result));
}

}  // namespace imitation
