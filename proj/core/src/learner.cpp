#include "imitation/learner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "imitation/gridworld.hpp"

namespace imitation {

void LearnerConfig::validate() const {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in [0, 1)");
  if (backups < 0) throw std::invalid_argument("backup budget must be >= 0");
  if (!(epsilon0 >= 0.0 && epsilon0 <= 1.0)) {
    throw std::invalid_argument("epsilon0 must lie in [0, 1]");
  }
  if (!(epsilon_decay > 0.0 && epsilon_decay <= 1.0)) {
    throw std::invalid_argument("epsilon decay must lie in (0, 1]");
  }
  if (!(prior_count > 0.0)) throw std::invalid_argument("prior pseudo-count must be positive");
  confidence.validate();
  feasibility.validate();
}

PriorityQueue::PriorityQueue(int state_count)
    : position_(static_cast<std::size_t>(state_count), -1) {}

double PriorityQueue::priority(StateId s) const {
  const auto pos = position_[static_cast<std::size_t>(s)];
  return pos < 0 ? 0.0 : heap_[static_cast<std::size_t>(pos)].priority;
}

void PriorityQueue::place(std::size_t i, Item item) {
  heap_[i] = item;
  position_[static_cast<std::size_t>(item.state)] = static_cast<std::ptrdiff_t>(i);
}

void PriorityQueue::sift_up(std::size_t i) {
  const Item item = heap_[i];
  while (i > 0) {
    const std::size_t parent = (i - 1) / 2;
    if (!before(item, heap_[parent])) break;
    place(i, heap_[parent]);
    i = parent;
  }
  place(i, item);
}

void PriorityQueue::sift_down(std::size_t i) {
  const Item item = heap_[i];
  const std::size_t n = heap_.size();
  for (;;) {
    std::size_t child = 2 * i + 1;
    if (child >= n) break;
    if (child + 1 < n && before(heap_[child + 1], heap_[child])) ++child;
    if (!before(heap_[child], item)) break;
    place(i, heap_[child]);
    i = child;
  }
  place(i, item);
}

void PriorityQueue::push(StateId s, double priority) {
  if (priority < 0.0) throw std::invalid_argument("priorities must be non-negative");
  const auto pos = position_[static_cast<std::size_t>(s)];
  if (pos >= 0) {
    auto& item = heap_[static_cast<std::size_t>(pos)];
    if (priority > item.priority) {
      item.priority = priority;
      sift_up(static_cast<std::size_t>(pos));
    }
    return;
  }
  heap_.push_back({s, priority});
  sift_up(heap_.size() - 1);
}

StateId PriorityQueue::pop() {
  if (heap_.empty()) throw std::logic_error("pop from empty priority queue");
  const StateId top = heap_.front().state;
  erase(top);
  return top;
}

void PriorityQueue::erase(StateId s) {
  const auto pos = position_[static_cast<std::size_t>(s)];
  if (pos < 0) return;
  const auto i = static_cast<std::size_t>(pos);
  position_[static_cast<std::size_t>(s)] = -1;
  const Item last = heap_.back();
  heap_.pop_back();
  if (i == heap_.size()) return;
  place(i, last);
  sift_up(i);
  sift_down(static_cast<std::size_t>(position_[static_cast<std::size_t>(last.state)]));
}

Learner::Learner(LearnerSetup setup, LearnerConfig config)
    : setup_(std::move(setup)),
      config_(config),
      observer_(setup_.state_count, setup_.action_count),
      values_(static_cast<std::size_t>(setup_.state_count)),
      queue_(setup_.state_count),
      predecessors_(static_cast<std::size_t>(setup_.state_count)),
      ledger_(setup_.state_count, setup_.mentor_count),
      epsilon_(config.epsilon0) {
  config_.validate();
  if (setup_.rewards.size() != static_cast<std::size_t>(setup_.state_count) ||
      setup_.prior_support.size() != static_cast<std::size_t>(setup_.state_count)) {
    throw std::invalid_argument("LearnerSetup: rewards and prior support must cover every state");
  }
  mentors_.reserve(static_cast<std::size_t>(setup_.mentor_count));
  for (int m = 0; m < setup_.mentor_count; ++m) mentors_.emplace_back(setup_.state_count, 1);

  for (StateId s = 0; s < setup_.state_count; ++s) {
    for (StateId t : setup_.prior_support[static_cast<std::size_t>(s)]) {
      for (ActionId a = 0; a < setup_.action_count; ++a) {
        observer_.set_prior(s, a, t, config_.prior_count);
      }
      for (auto& chain : mentors_) chain.set_prior(s, 0, t, config_.prior_count);
      note_edge(s, t);
    }
  }
  if (config_.imitation_enabled) {
    for (const auto& chain : mentors_) mentor_ptrs_.push_back(&chain);
  }
}

void Learner::note_edge(StateId from, StateId to) {
  auto& preds = predecessors_[static_cast<std::size_t>(to)];
  if (std::find(preds.begin(), preds.end(), from) == preds.end()) preds.push_back(from);
}

bool Learner::gate(StateId s, const MentorCandidate& candidate) {
  if (!config_.feasibility_enabled) return true;
  const auto& chain = mentors_[static_cast<std::size_t>(candidate.mentor)];
  const auto& fp = config_.feasibility;
  return use_augmented(
      ledger_, s, candidate.mentor, fp, config_.repair_enabled,
      GateQuery{supersedes(candidate.v_o, candidate.sigma_o, candidate.v_m, candidate.sigma_m,
                           config_.confidence),
                [&] { return feasible(observer_, chain, s, candidate.mentor, fp, ledger_); },
                [&] { return reachable(observer_, chain, s, fp); }});
}

BackupResult Learner::backup(StateId s) {
  const BackupInputs in{values_.view(), observer_,          mentor_ptrs_,       setup_.rewards,
                        config_.gamma,  config_.confidence, config_.variance};
  return augmented_backup(in, s, [&](const MentorCandidate& c) { return gate(s, c); });
}

BackupResult Learner::evaluate(StateId s) { return backup(s); }

void Learner::seed_predecessors(StateId s, double delta) {
  for (StateId w : predecessors_[static_cast<std::size_t>(s)]) {
    double weight = 0.0;
    for (ActionId a = 0; a < setup_.action_count; ++a) {
      const double total = observer_.total(w, a);
      if (!(total > 0.0)) continue;
      for (const auto& e : observer_.row(w, a)) {
        if (e.successor == s) {
          weight = std::max(weight, e.count() / total);
          break;
        }
      }
    }
    for (const auto* chain : mentor_ptrs_) {
      const double total = chain->total(w);
      if (!(total > 0.0)) continue;
      for (const auto& e : chain->row(w)) {
        if (e.successor == s) {
          weight = std::max(weight, e.count() / total);
          break;
        }
      }
    }
    const double priority = weight * delta;
    if (priority >= kMinPriority) queue_.push(w, priority);
  }
}

void Learner::update_value(StateId s) {
  queue_.erase(s);
  const double old = values_[s];
  const BackupResult r = backup(s);
  values_[s] = r.value;
  ++backups_;
  const double delta = std::abs(r.value - old);
  if (delta > 0.0) seed_predecessors(s, delta);
}

void Learner::sweep() {
  for (int i = 0; i < config_.backups && !queue_.empty(); ++i) update_value(queue_.pop());
}

void Learner::observe_own(StateId s, ActionId a, StateId t) {
  observer_.check_state(s);
  if (observer_.record(s, a, t)) note_edge(s, t);
  walker_.observe(t, ledger_, config_.feasibility);
  update_value(s);
  sweep();
}

void Learner::observe_mentor(int mentor, StateId s, StateId t) {
  if (!config_.imitation_enabled) return;
  auto& chain = mentors_.at(static_cast<std::size_t>(mentor));
  if (chain.record(s, 0, t)) note_edge(s, t);
  update_value(s);
  sweep();
}

ActionId Learner::greedy_action(StateId s) { return greedy_choice(s); }

ActionId Learner::greedy_choice(StateId s) {
  const BackupResult r = backup(s);
  if (r.from_mentor() && supersedes(r.v_m, r.sigma_m, r.v_o, r.sigma_o, config_.confidence)) {
    return closest_action(observer_, mentors_[static_cast<std::size_t>(*r.mentor)], s);
  }
  return r.best_action;
}

ActionId Learner::select_action(StateId s, CounterRng& rng) {
  ActionId action = -1;
  last_random_ = true;
  if (config_.feasibility_enabled && config_.repair_enabled && !walker_.active()) {
    for (int m = 0; m < setup_.mentor_count; ++m) {
      if (!ledger_.at(s, m).searching) continue;
      if (walker_.begin(ledger_, s, m,
                        downstream_states(mentors_[static_cast<std::size_t>(m)], s,
                                          config_.feasibility.k, config_.feasibility.theta))) {
        break;
      }
    }
  }
  if (walker_.active()) {
    action = walker_.step(rng, setup_.action_count, ledger_);
  } else if (rng.bernoulli(epsilon_)) {
    action = static_cast<ActionId>(rng.below(static_cast<std::uint64_t>(setup_.action_count)));
  } else {
    action = greedy_choice(s);
    last_random_ = false;
  }
  epsilon_ *= config_.epsilon_decay;
  return action;
}

LearnerSetup grid_setup(const GridMap& map, int action_count, int mentor_count) {
  LearnerSetup setup;
  setup.state_count = map.state_count();
  setup.action_count = action_count;
  setup.rewards = map.rewards();
  setup.mentor_count = mentor_count;
  setup.prior_support.reserve(static_cast<std::size_t>(map.state_count()));
  for (StateId s = 0; s < map.state_count(); ++s) setup.prior_support.push_back(neighborhood(map, s));
  return setup;
}

}  // namespace imitation
