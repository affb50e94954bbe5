#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "imitation/gridworld.hpp"
#include "imitation/learner.hpp"

using namespace imitation;

namespace {

const char* kCorridor = "S....X\n";

LearnerConfig quiet(int backups = 50) {
  LearnerConfig c;
  c.backups = backups;
  c.epsilon0 = 0.0;
  return c;
}

}  // namespace

TEST_CASE("priority queue pops by priority then state index") {
  PriorityQueue q(8);
  q.push(3, 0.5);
  q.push(5, 2.0);
  q.push(1, 0.5);
  q.push(6, 0.1);
  q.push(6, 0.05);
  CHECK(q.priority(6) == doctest::Approx(0.1));
  q.push(6, 3.0);
  CHECK(q.size() == 4);
  CHECK(q.pop() == 6);
  CHECK(q.pop() == 5);
  CHECK(q.pop() == 1);
  q.erase(3);
  CHECK(q.empty());
  CHECK_THROWS_AS(q.pop(), std::logic_error);
  CHECK_THROWS_AS(q.push(0, -1.0), std::invalid_argument);
}

TEST_CASE("priority queue agrees with a sorted reference") {
  PriorityQueue q(64);
  CounterRng rng(12);
  std::vector<double> ref(64, -1.0);
  for (int i = 0; i < 2000; ++i) {
    const auto s = static_cast<StateId>(rng.below(64));
    if (rng.bernoulli(0.2)) {
      q.erase(s);
      ref[static_cast<std::size_t>(s)] = -1.0;
    } else {
      const double p = std::floor(rng.uniform() * 8.0);
      q.push(s, p);
      ref[static_cast<std::size_t>(s)] = std::max(ref[static_cast<std::size_t>(s)], p);
    }
  }
  while (!q.empty()) {
    const auto it = std::max_element(ref.begin(), ref.end());
    const auto expect = static_cast<StateId>(it - ref.begin());
    CHECK(q.pop() == expect);
    *it = -1.0;
  }
  CHECK(*std::max_element(ref.begin(), ref.end()) == -1.0);
}

TEST_CASE("configuration is validated") {
  LearnerConfig c;
  c.gamma = 1.0;
  CHECK_THROWS(c.validate());
  c = {};
  c.epsilon_decay = 0.0;
  CHECK_THROWS(c.validate());
  c = {};
  c.prior_count = 0.0;
  CHECK_THROWS(c.validate());
  LearnerSetup bad{2, 1, {0.0}, {{0}, {1}}, 0};
  CHECK_THROWS_AS(Learner(bad, LearnerConfig{}), std::invalid_argument);
}

TEST_CASE("grid setup gives king-move prior support") {
  const GridMap m = GridMap::parse("S..\n...\n..X\n");
  const LearnerSetup s = grid_setup(m, 4, 1);
  const Learner l(s, LearnerConfig{});
  CHECK(l.observer_model().row(4, 2).size() == 9);
  CHECK(l.observer_model().total(0, 0) == doctest::Approx(4.0));
  CHECK(l.mentor_model(0).total(8) == doctest::Approx(4.0));
}

TEST_CASE("values converge to the expected model's fixed point") {
  const GridMap m = GridMap::parse(kCorridor);
  const auto news = ActionSet::news();
  Learner l(grid_setup(m, news.size(), 0), quiet(200));
  CounterRng rng(4);
  for (int i = 0; i < 3000; ++i) {
    const StateId s = static_cast<StateId>(rng.below(6));
    const ActionId a = static_cast<ActionId>(rng.below(4));
    l.observe_own(s, a, step(m, news, {0.1}, s, a, rng).next);
  }
  for (int i = 0; i < 200; ++i) l.observe_own(0, 0, 0);
  const MdpModel model = expected_model(l.observer_model(), m.rewards(), 0.9);
  const SolveResult vi = value_iteration(model, 1e-9);
  for (StateId s = 0; s < 6; ++s) CHECK(l.values()[s] == doctest::Approx(vi.values[s]).epsilon(1e-3));
}

TEST_CASE("mentor observations are ignored without imitation") {
  const GridMap m = GridMap::parse(kCorridor);
  LearnerConfig c = quiet();
  c.imitation_enabled = false;
  Learner l(grid_setup(m, 4, 1), c);
  l.observe_mentor(0, 4, 5);
  CHECK(l.mentor_model(0).experience_total(4) == 0);
  CHECK(l.backups_performed() == 0);
  CHECK_FALSE(l.evaluate(4).from_mentor());
}

TEST_CASE("a mentor pulls value and the greedy action along its chain") {
  const GridMap m = GridMap::parse(kCorridor);
  const auto news = ActionSet::news();
  Learner l(grid_setup(m, news.size(), 1), quiet());
  // The observer has tried every action at state 4 except East.
  for (int i = 0; i < 20; ++i) {
    l.observe_own(4, 0, 4);
    l.observe_own(4, 2, 3);
    l.observe_own(4, 3, 4);
    l.observe_own(5, 0, 0);
  }
  for (int i = 0; i < 20; ++i) l.observe_mentor(0, 4, 5);
  const BackupResult r = l.evaluate(4);
  CHECK(r.from_mentor());
  CHECK(r.value > r.v_o);
  CHECK(l.values()[4] == doctest::Approx(r.value));
  // East's row is still the uniform prior, which puts mass on 5; the tried
  // actions never reached 5, so East is the closest action.
  CHECK(l.greedy_action(4) == 1);
}

TEST_CASE("epsilon decays multiplicatively per selection") {
  const GridMap m = GridMap::parse(kCorridor);
  LearnerConfig c;
  c.epsilon0 = 0.5;
  c.epsilon_decay = 0.5;
  Learner l(grid_setup(m, 4, 0), c);
  CounterRng rng(1);
  l.select_action(0, rng);
  l.select_action(0, rng);
  CHECK(l.epsilon() == doctest::Approx(0.125));
}

TEST_CASE("full exploration picks every action uniformly") {
  const GridMap m = GridMap::parse(kCorridor);
  LearnerConfig c;
  c.epsilon0 = 1.0;
  Learner l(grid_setup(m, 4, 0), c);
  CounterRng rng(2);
  std::vector<int> hist(4);
  for (int i = 0; i < 40000; ++i) ++hist[static_cast<std::size_t>(l.select_action(0, rng))];
  CHECK(l.last_action_random());
  for (int h : hist) CHECK(h == doctest::Approx(10000).epsilon(0.05));
}

TEST_CASE("feasibility blocks a mentor move the observer cannot make") {
  const GridMap m = GridMap::parse(kCorridor);
  LearnerConfig c = quiet();
  c.feasibility_enabled = true;
  Learner l(grid_setup(m, 2, 1), c);
  // Both observer actions stay put at state 2; the mentor jumps to 3.
  for (int i = 0; i < 150; ++i) {
    l.observe_own(2, 0, 2);
    l.observe_own(2, 1, 2);
    l.observe_mentor(0, 2, 3);
  }
  l.observe_own(3, 0, 4);
  l.observe_own(4, 0, 5);
  l.observe_own(5, 0, 0);
  CHECK(l.ledger().at(2, 0).infeasible);
  CHECK_FALSE(l.evaluate(2).from_mentor());
}

TEST_CASE("repair walks are started for infeasible mentor states") {
  const GridMap m = GridMap::parse(kCorridor);
  LearnerConfig c = quiet();
  c.feasibility_enabled = true;
  c.repair_enabled = true;
  c.feasibility.n_attempts = 1;
  c.feasibility.k = 1;
  Learner l(grid_setup(m, 2, 1), c);
  for (int i = 0; i < 150; ++i) {
    l.observe_own(2, 0, 2);
    l.observe_own(2, 1, 2);
    l.observe_mentor(0, 2, 3);
  }
  l.observe_own(3, 0, 5);
  REQUIRE(l.ledger().at(2, 0).searching);
  CounterRng rng(6);
  l.select_action(2, rng);
  CHECK(l.walker().active());
  CHECK(l.last_action_random());
  l.observe_own(2, 0, 2);
  CHECK_FALSE(l.walker().active());
  CHECK_FALSE(l.ledger().at(2, 0).repairable);
}

TEST_CASE("learners replay identically from the same stream") {
  const GridMap m = GridMap::parse("S...\n....\n...X\n");
  const auto news = ActionSet::news();
  auto run = [&] {
    LearnerConfig c;
    c.backups = 10;
    c.epsilon0 = 0.3;
    Learner l(grid_setup(m, news.size(), 0), c);
    CounterRng policy(1);
    CounterRng env(2);
    std::vector<ActionId> trace;
    StateId s = m.start();
    for (int t = 0; t < 3000; ++t) {
      const ActionId a = l.select_action(s, policy);
      const StateId next = step(m, news, {0.1}, s, a, env).next;
      l.observe_own(s, a, next);
      trace.push_back(a);
      s = next;
    }
    return trace;
  };
  CHECK(run() == run());
}
