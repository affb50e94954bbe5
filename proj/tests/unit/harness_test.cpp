#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "imitation/harness.hpp"

using namespace imitation;

TEST_CASE("sliding goal-rate window") {
  const std::vector<std::uint8_t> goals{1, 0, 1, 1, 0, 0, 1};
  CHECK(goal_rate_series(goals, 3) == std::vector<int>{1, 1, 2, 2, 2, 1, 1});
  CHECK(goal_rate_series(goals, 1) == std::vector<int>{1, 0, 1, 1, 0, 0, 1});
  CHECK_THROWS_AS(goal_rate_series(goals, 0), std::invalid_argument);
}

TEST_CASE("window sums match a brute-force count") {
  CounterRng rng(3);
  std::vector<std::uint8_t> goals(500);
  for (auto& g : goals) g = rng.bernoulli(0.2) ? 1 : 0;
  const auto series = goal_rate_series(goals, 37);
  for (std::size_t t = 0; t < goals.size(); ++t) {
    int n = 0;
    for (std::size_t u = t >= 36 ? t - 36 : 0; u <= t; ++u) n += goals[u];
    REQUIRE(series[t] == n);
  }
}

TEST_CASE("averages, deltas and convergence steps") {
  CHECK(average_series({{1, 2}, {3, 6}}) == std::vector<double>{2.0, 4.0});
  CHECK_THROWS(average_series({{1}, {1, 2}}));
  CHECK(delta_curve({1.0, 2.0}, {0.5, 3.0}) == std::vector<double>{0.5, -1.0});
  CHECK_THROWS_AS(delta_curve({1.0}, {1.0, 2.0}), std::invalid_argument);
  CHECK(convergence_step({0, 5, 1, 5, 6, 7}, 5.0) == 4);
  CHECK(convergence_step({6, 7}, 5.0) == 1);
  CHECK(convergence_step({6, 4}, 5.0) == -1);
  CHECK(convergence_step({}, 5.0) == -1);
}

TEST_CASE("optimal goal rate on a two-cell loop") {
  // Start -> goal -> start: every second step reaches the goal.
  const GridMap m = GridMap::parse("SX\n");
  CHECK(optimal_goal_rate(m, ActionSet::news(), {}, 0.9) == doctest::Approx(500.0));
}

TEST_CASE("fracture counts disputed states and distances") {
  // Chain 0 - 1 - 2 - 3 with actions Left/Right. The observer wants state 0
  // and the mentor state 3, so every state is disputed and none is reachable
  // from an undisputed one; each contributes the diameter.
  auto chain = [](int good) {
    MdpModel m(4, 2, 0.9);
    for (StateId s = 0; s < 4; ++s) {
      m.set_reward(s, s == good ? 1.0 : 0.0);
      m.set_row(s, 0, {{std::max(s - 1, 0), 1.0}});
      m.set_row(s, 1, {{std::min(s + 1, 3), 1.0}});
    }
    return m;
  };
  const FractureReport r = fracture(chain(0), chain(3), [](ActionId a, ActionId b) { return a == b; });
  CHECK(r.disputed == 4);
  CHECK(r.undisputed == 0);
  CHECK(r.diameter == 3);
  CHECK(r.phi == doctest::Approx(3.0));
  const FractureReport same = fracture(chain(3), chain(3), [](ActionId a, ActionId b) { return a == b; });
  CHECK(same.disputed == 0);
  CHECK(same.phi == 0.0);
}

TEST_CASE("fracture excludes states where every action has the same outcome") {
  const GridMap obs = GridMap::parse("S.X\n");
  const FractureReport r = fracture(obs, ActionSet::news(), obs, ActionSet::news(), {}, 0.9);
  CHECK(r.excluded == 1);
  CHECK(r.disputed == 0);
}

TEST_CASE("shipped fracture scenarios") {
  const double expected[] = {1.0, 1.75, 3.5, 6.116};
  int i = 0;
  for (const char* name : {"fracture_a", "fracture_b", "fracture_c", "fracture_d"}) {
    CHECK(fracture(load_scenario(name)).phi == doctest::Approx(expected[i++]).epsilon(1e-3));
  }
}

namespace {

ExperimentResult small_run(int threads, std::uint64_t seed = 1) {
  const Scenario sc = load_scenario("exp1_basic");
  ExperimentConfig cfg;
  cfg.scenario = sc.name;
  cfg.runs = 3;
  cfg.horizon = 3000;
  cfg.threads = threads;
  cfg.seed = seed;
  cfg.agents = default_agents(sc);
  cfg.per_run_columns = true;
  return run_experiment(cfg, sc);
}

}  // namespace

TEST_CASE("experiments are deterministic and thread-count independent") {
  const auto a = small_run(1);
  const auto b = small_run(4);
  CHECK(series_csv(a) == series_csv(b));
  CHECK(summary_csv(a) == summary_csv(b));
  CHECK(series_csv(a) != series_csv(small_run(1, 2)));
}

TEST_CASE("paired agents share environment and policy streams") {
  const auto r = small_run(1);
  // Until the observer's first mentor-driven choice the two agents act alike.
  CHECK(r.record(0, 0).actions[0] == r.record(0, 1).actions[0]);
  CHECK(r.record(0, 0).states[0] == r.record(0, 1).states[0]);
  CHECK(r.agent_count() == 2);
  CHECK(r.summaries[0].agent == "obs");
  CHECK(r.summaries[1].agent == "ctrl");
}

TEST_CASE("series and summary CSV layout") {
  const auto r = small_run(1);
  std::istringstream series(series_csv(r));
  std::string header;
  std::getline(series, header);
  CHECK(header.rfind("step,obs_mean,ctrl_mean,delta,obs_run0", 0) == 0);
  int lines = 0;
  for (std::string line; std::getline(series, line);) ++lines;
  CHECK(lines == 3000);
  std::istringstream summary(summary_csv(r));
  std::getline(summary, header);
  CHECK(header == "scenario,agent,optimal_rate,convergence_step,final_rate,phi");

  const auto dir = std::filesystem::temp_directory_path() / "imitation_harness_test";
  std::filesystem::remove_all(dir);
  write_results(r, dir.string());
  std::ifstream in(dir / "series.csv", std::ios::binary);
  std::stringstream text;
  text << in.rdbuf();
  CHECK(text.str() == series_csv(r));
  std::filesystem::remove_all(dir);
}

TEST_CASE("stride thins the series but keeps the last step") {
  const Scenario sc = load_scenario("exp1_basic");
  ExperimentConfig cfg;
  cfg.runs = 1;
  cfg.horizon = 1050;
  cfg.stride = 100;
  cfg.agents = default_agents(sc);
  const std::string csv = series_csv(run_experiment(cfg, sc));
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 10 + 1);
  CHECK(csv.find("\n1050,") != std::string::npos);
}

TEST_CASE("experiment configuration is validated") {
  const Scenario sc = load_scenario("exp1_basic");
  ExperimentConfig cfg;
  cfg.agents = default_agents(sc);
  cfg.runs = 0;
  CHECK_THROWS(run_experiment(cfg, sc));
}

TEST_CASE("mentors follow their optimal policy") {
  const Scenario sc = load_scenario("exp1_basic");
  Mentor m = make_mentor(sc.mentors[0], sc.gamma, 0.0);
  CounterRng rng(1);
  int goals = 0;
  for (int t = 0; t < 1000; ++t) goals += sc.map.is_goal(m.step(rng)) ? 1 : 0;
  CHECK(goals >= 30);
}
