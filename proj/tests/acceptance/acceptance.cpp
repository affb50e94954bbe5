// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
// Usage: imitation_acceptance [criterion numbers...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "imitation/augmented.hpp"
#include "imitation/feasibility.hpp"
#include "imitation/harness.hpp"
#include "imitation/mdp.hpp"
#include "imitation/rng.hpp"
#include "imitation/scenario.hpp"
#include "oracles.hpp"

namespace {

using namespace imitation;

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
  std::function<Verdict()> check;
};

int threads() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

ExperimentConfig config_for(const Scenario& s, std::vector<AgentSpec> agents) {
  ExperimentConfig cfg;
  cfg.scenario = s.name;
  cfg.runs = s.defaults.runs;
  cfg.horizon = s.defaults.horizon;
  cfg.threads = threads();
  cfg.agents = std::move(agents);
  return cfg;
}

ExperimentResult run_default(const std::string& name) {
  const Scenario s = load_scenario(name);
  return run_experiment(config_for(s, default_agents(s)), s);
}

// Never converging counts as converging at the horizon.
int steps_to_converge(const AgentSummary& a, int horizon) {
  return a.convergence_step < 0 ? horizon : a.convergence_step;
}

std::vector<int> run_series(const ExperimentResult& r, int run, int agent) {
  return goal_rate_series(r.record(run, agent).goals, r.config.window);
}

int final_window(const ExperimentResult& r, int run, int agent) {
  return run_series(r, run, agent).back();
}

int total_goals(const ExperimentResult& r, int run, int agent) {
  const auto& g = r.record(run, agent).goals;
  return static_cast<int>(std::count(g.begin(), g.end(), std::uint8_t{1}));
}

double mean_from(const std::vector<double>& xs, std::size_t from) {
  if (from >= xs.size()) return 0.0;
  return std::accumulate(xs.begin() + static_cast<std::ptrdiff_t>(from), xs.end(), 0.0) /
         static_cast<double>(xs.size() - from);
}

int first_at_least(const std::vector<double>& xs, double level) {
  for (std::size_t t = 0; t < xs.size(); ++t) {
    if (xs[t] >= level) return static_cast<int>(t) + 1;
  }
  return -1;
}

Verdict check_oracle_equivalence() {
  CounterRng rng(2024);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const int states = 2 + static_cast<int>(rng.below(5));
    const int actions = 1 + static_cast<int>(rng.below(3));
    const MdpModel m = oracle::random_mdp(rng, states, actions, 0.9);
    const auto exact = oracle::enumerate_optimal(m);
    const SolveResult vi = value_iteration(m, 1e-6);
    for (StateId s = 0; s < states; ++s) {
      worst = std::max(worst, std::abs(vi.values[s] - exact[static_cast<std::size_t>(s)]));
    }
  }
  return {worst <= 1e-4, fmt("50 MDPs, max |VI - enumeration| = %.2e", worst)};
}

Verdict check_redundancy() {
  const Scenario s = load_scenario("exp1_basic");
  const MdpModel m = true_model(s.map, s.actions, s.noise, s.gamma);
  const SolveResult opt = value_iteration(m, 1e-10);
  DirichletCountTable observer(m.state_count(), m.action_count());
  DirichletCountTable chain(m.state_count(), 1);
  for (StateId st = 0; st < m.state_count(); ++st) {
    for (ActionId a = 0; a < m.action_count(); ++a) {
      for (const Successor& e : m.row(st, a)) observer.set_prior(st, a, e.state, e.prob * 1e6);
    }
    for (const Successor& e : m.row(st, opt.policy[st])) chain.set_prior(st, 0, e.state, e.prob * 1e6);
  }
  const DirichletCountTable* mentors[] = {&chain};
  std::vector<double> v(static_cast<std::size_t>(m.state_count()), 0.0);
  int iterations = 0;
  for (double change = 1.0; change > 1e-10 && iterations < 5000; ++iterations) {
    std::vector<double> next(v.size());
    const BackupInputs in{v, observer, mentors, m.rewards(), s.gamma, {}};
    change = 0.0;
    for (StateId st = 0; st < m.state_count(); ++st) {
      next[static_cast<std::size_t>(st)] = augmented_backup(in, st).value;
      change = std::max(change, std::abs(next[static_cast<std::size_t>(st)] - v[static_cast<std::size_t>(st)]));
    }
    v = std::move(next);
  }
  double worst = 0.0;
  for (StateId st = 0; st < m.state_count(); ++st) {
    worst = std::max(worst, std::abs(v[static_cast<std::size_t>(st)] - opt.values[st]));
  }
  return {worst <= 1e-4, fmt("exp1_basic, %d sweeps, max |augmented - VI| = %.2e", iterations, worst)};
}

Verdict check_exp1() {
  const ExperimentResult r = run_default("exp1_basic");
  const int h = r.config.horizon;
  const int obs = steps_to_converge(r.summaries[0], h);
  const int ctrl = steps_to_converge(r.summaries[1], h);
  int positive = 0;
  for (int run = 0; run < r.config.runs; ++run) {
    const auto o = run_series(r, run, 0);
    const auto c = run_series(r, run, 1);
    std::vector<double> d(o.size());
    for (std::size_t t = 0; t < d.size(); ++t) d[t] = o[t] - c[t];
    if (mean_from(d, 5000) >= 0.0) ++positive;
  }
  const bool pass = obs <= 0.5 * ctrl && positive >= 8;
  return {pass, fmt("convergence obs %d vs ctrl %d (ratio %.2f), delta >= 0 after 5000 in %d/10 runs",
                    obs, ctrl, static_cast<double>(obs) / ctrl, positive)};
}

Verdict check_exp2() {
  const auto area = [](const ExperimentResult& r) {
    const auto d = delta_curve(r.summaries[0].mean_series, r.summaries[1].mean_series);
    return std::accumulate(d.begin(), d.end(), 0.0);
  };
  const double small = area(run_default("exp1_basic"));
  const double large = area(run_default("exp2_scale"));
  const ExperimentResult noisy = run_default("exp2_stoch");
  const double noisy_delta =
      mean_from(delta_curve(noisy.summaries[0].mean_series, noisy.summaries[1].mean_series), 5000);
  const bool pass = large > small && noisy_delta >= 0.0;
  return {pass, fmt("delta area 13x13 %.0f vs 10x10 %.0f, eta=0.4 mean delta after 5000 = %.2f", large,
                    small, noisy_delta)};
}

Verdict check_exp3() {
  const Scenario s = load_scenario("exp3_islands");
  LearnerConfig careful = default_learner(s);
  careful.confidence.c = 5.0;
  LearnerConfig reckless = careful;
  reckless.confidence.c = 0.0;
  const ExperimentResult r =
      run_experiment(config_for(s, {{"c5", careful}, {"c0", reckless}}), s);
  int reached = 0;
  int locked = 0;
  for (int run = 0; run < r.config.runs; ++run) {
    if (final_window(r, run, 0) > 0) ++reached;
    if (final_window(r, run, 1) < 0.25 * r.optimal_rate) ++locked;
  }
  return {reached == 10 && locked >= 8,
          fmt("c=5 reaches the goal in %d/10 runs, c=0 below 25%% of optimal (%.1f) in %d/10", reached,
              r.optimal_rate, locked)};
}

Verdict check_exp4() {
  const ExperimentResult r = run_default("exp4_maze");
  const int h = r.config.horizon;
  const int obs = r.summaries[0].convergence_step;
  const int ctrl_first = first_at_least(r.summaries[1].mean_series, 4.0);
  const int ctrl = ctrl_first < 0 ? h : ctrl_first;
  const bool rate_ok = std::abs(r.optimal_rate - 6.0) <= 1.0;
  const bool pass = rate_ok && obs > 0 && obs <= 40000 && ctrl >= 5 * obs;
  return {pass, fmt("optimal %.2f/1000, imitator converges at %d, control first reaches 4/1000 at %d%s",
                    r.optimal_rate, obs, ctrl, ctrl_first < 0 ? " (never, horizon)" : "")};
}

std::vector<AgentSpec> three_agents(const Scenario& s, const char* first) {
  LearnerConfig feas = default_learner(s);
  feas.feasibility_enabled = true;
  LearnerConfig plain = feas;
  plain.feasibility_enabled = false;
  plain.repair_enabled = false;
  LearnerConfig ctrl = plain;
  ctrl.imitation_enabled = false;
  return {{first, feas}, {"nofeas", plain}, {"ctrl", ctrl}};
}

Verdict check_het1() {
  const Scenario s = load_scenario("het1_skew");
  const ExperimentResult r = run_experiment(config_for(s, three_agents(s, "feas")), s);
  const int h = r.config.horizon;
  const int feas = steps_to_converge(r.summaries[0], h);
  const int plain = steps_to_converge(r.summaries[1], h);
  const int ctrl = steps_to_converge(r.summaries[2], h);
  const bool fastest = r.summaries[0].convergence_step > 0 && feas < plain && feas < ctrl;
  const bool pass = fastest && r.summaries[1].final_rate < r.summaries[2].final_rate;
  return {pass, fmt("convergence feas %d, nofeas %d, ctrl %d; final nofeas %.1f vs ctrl %.1f (optimal %.1f)",
                    feas, plain, ctrl, r.summaries[1].final_rate, r.summaries[2].final_rate,
                    r.optimal_rate)};
}

Verdict check_river() {
  const Scenario s = load_scenario("river");
  auto agents = three_agents(s, "repair");
  agents[0].learner.repair_enabled = true;
  agents[1].learner.feasibility_enabled = true;
  agents[1].learner.imitation_enabled = true;
  agents[1].name = "norepair";
  const ExperimentResult r = run_experiment(config_for(s, agents), s);
  int crossed = 0;
  int crossed_without = 0;
  int ctrl_found = 0;
  for (int run = 0; run < r.config.runs; ++run) {
    if (final_window(r, run, 0) > 0) ++crossed;
    if (final_window(r, run, 1) > 0) ++crossed_without;
    if (total_goals(r, run, 2) > 0) ++ctrl_found;
  }
  const bool pass = crossed >= 8 && crossed_without == 0 && ctrl_found <= 2;
  return {pass, fmt("sustained crossings with repair %d/10, without repair %d/10; control found the goal in %d/10",
                    crossed, crossed_without, ctrl_found)};
}

Verdict check_fracture_trend() {
  const char* names[] = {"fracture_a", "fracture_b", "fracture_c", "fracture_d"};
  const double targets[] = {0.5, 1.7, 3.5, 6.0};
  const double rates[] = {0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.5};
  bool phi_ok = true;
  bool all_found = true;
  std::string detail = "phi";
  std::vector<double> minimal;
  for (int i = 0; i < 4; ++i) {
    const Scenario s = load_scenario(names[i]);
    const double phi = fracture(s).phi;
    phi_ok = phi_ok && std::abs(phi - targets[i]) <= 0.3;
    detail += fmt(" %.2f", phi);
    double found = -1.0;
    for (double e : rates) {
      LearnerConfig l = default_learner(s);
      l.epsilon0 = e;
      const ExperimentResult r = run_experiment(config_for(s, {{"obs", l}}), s);
      int optimal = 0;
      for (int run = 0; run < r.config.runs; ++run) {
        optimal += greedy_path_optimal(s.map, s.actions, r.record(run, 0).final_greedy) ? 1 : 0;
      }
      if (optimal >= 9) {
        found = e;
        break;
      }
    }
    all_found = all_found && found > 0.0;
    minimal.push_back(found);
  }
  detail += " (targets 0.5 1.7 3.5 6.0); minimal epsilon0";
  for (double m : minimal) detail += m > 0.0 ? fmt(" %.2f", m) : std::string(" none");
  bool trend = all_found;
  for (std::size_t i = 1; trend && i < minimal.size(); ++i) trend = minimal[i] >= minimal[i - 1];
  return {phi_ok && trend, detail};
}

Verdict check_feasibility_stats() {
  CounterRng rng(77);
  const FeasibilityParams p;
  const auto trial = [&](double p_obs, double p_mentor, int n) {
    DirichletCountTable observer(3, 1);
    DirichletCountTable mentor(3, 1);
    for (int i = 0; i < n; ++i) {
      observer.record(0, 0, rng.bernoulli(p_obs) ? 1 : 2);
      mentor.record(0, 0, rng.bernoulli(p_mentor) ? 1 : 2);
    }
    return !action_similar(observer, mentor, 0, 0, p);
  };
  int false_rejections = 0;
  for (int i = 0; i < 1000; ++i) {
    const double q = 0.1 + 0.8 * rng.uniform();
    false_rejections += trial(q, q, 5 + static_cast<int>(rng.below(496))) ? 1 : 0;
  }
  int disjoint = 0;
  for (int i = 0; i < 100; ++i) disjoint += trial(1.0, 0.0, 50 + static_cast<int>(rng.below(200))) ? 1 : 0;
  const bool pass = false_rejections <= 50 && disjoint == 100;
  return {pass, fmt("false rejections %d/1000 at alpha=%.2f, disjoint outcomes rejected %d/100",
                    false_rejections, p.alpha, disjoint)};
}

Verdict check_determinism() {
  const Scenario s = load_scenario("exp1_basic");
  ExperimentConfig cfg = config_for(s, default_agents(s));
  cfg.per_run_columns = true;
  cfg.threads = 1;
  const ExperimentResult a = run_experiment(cfg, s);
  cfg.threads = 4;
  const ExperimentResult b = run_experiment(cfg, s);
  const std::string series = series_csv(a);
  const bool pass = series == series_csv(b) && summary_csv(a) == summary_csv(b);
  return {pass, fmt("exp1_basic rerun with 1 and %d threads, %zu series bytes %s", cfg.threads,
                    series.size(), pass ? "identical" : "differ")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "oracle equivalence", 5, check_oracle_equivalence},
      {2, "augmented backup redundancy", 10, check_redundancy},
      {3, "exp1 convergence and delta", 120, check_exp1},
      {4, "exp2 scale and noise", 300, check_exp2},
      {5, "exp3 confidence and traps", 180, check_exp3},
      {6, "exp4 maze", 900, check_exp4},
      {7, "het1 feasibility testing", 300, check_het1},
      {8, "river repair", 300, check_river},
      {9, "fracture trend", 1200, check_fracture_trend},
      {10, "feasibility test statistics", 30, check_feasibility_stats},
      {11, "determinism", 120, check_determinism},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::stoi(argv[i]));
  int failed = 0;
  for (const auto& c : criteria) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v = c.check();
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds <= c.budget_seconds;
    const bool pass = v.pass && in_time;
    if (!pass) ++failed;
    std::printf("%s %2d %s: %s [%.1fs of %.0fs%s]\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                v.detail.c_str(), seconds, c.budget_seconds, in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
