#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "imitation/augmented.hpp"
#include "imitation/dirichlet.hpp"
#include "imitation/feasibility.hpp"
#include "imitation/mdp.hpp"
#include "imitation/rng.hpp"

namespace imitation {

struct LearnerConfig {
  double gamma = 0.9;
  /// Prioritized backups drained from the queue after each sample.
  int backups = 0;
  double epsilon0 = 0.25;
  /// Per-step multiplicative decay: epsilon_t = epsilon0 * decay^t.
  double epsilon_decay = 1.0;
  ConfidenceParams confidence;
  FeasibilityParams feasibility;
  VarianceMode variance = VarianceMode::AsPrinted;
  /// Pseudo-count given to every successor in a state's prior support.
  double prior_count = 1.0;
  bool imitation_enabled = true;
  bool feasibility_enabled = false;
  bool repair_enabled = false;

  void validate() const;
};

/// What a learner knows before acting: its reward function and the prior
/// support of every state's successor distribution.
struct LearnerSetup {
  int state_count = 0;
  int action_count = 0;
  std::vector<double> rewards;
  /// prior_support[s]: successors given prior pseudo-counts, for every action
  /// at s and for every mentor chain at s.
  std::vector<std::vector<StateId>> prior_support;
  int mentor_count = 0;
};

/// Indexed max-heap over states holding at most one entry per state.
/// Re-inserting a state keeps the larger priority; equal priorities pop the
/// lower state index first.
class PriorityQueue {
 public:
  explicit PriorityQueue(int state_count = 0);

  void push(StateId s, double priority);
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  /// Removes and returns the state with the highest priority.
  StateId pop();
  void erase(StateId s);
  bool contains(StateId s) const { return position_[static_cast<std::size_t>(s)] >= 0; }
  double priority(StateId s) const;

 private:
  struct Item {
    StateId state;
    double priority;
  };
  bool before(const Item& a, const Item& b) const {
    return a.priority > b.priority || (a.priority == b.priority && a.state < b.state);
  }
  void sift_up(std::size_t i);
  void sift_down(std::size_t i);
  void place(std::size_t i, Item item);

  std::vector<Item> heap_;
  std::vector<std::ptrdiff_t> position_;
};

/// Model-based learner: prioritized sweeping with confidence-tested augmented
/// backups, focusing on mentor transitions, and epsilon-greedy selection whose
/// greedy step follows the closest action to a mentor whose value strictly
/// supersedes the observer's.
class Learner {
 public:
  /// Priorities below this are not queued.
  static constexpr double kMinPriority = 1e-6;

  Learner(LearnerSetup setup, LearnerConfig config);

  /// Own transition (s, a) -> t: update the model, back up s, then run the
  /// configured number of prioritized backups.
  void observe_own(StateId s, ActionId a, StateId t);
  /// Mentor transition s -> t: update that mentor's chain, back up s, then run
  /// the prioritized backups. Ignored when imitation is disabled.
  void observe_mentor(int mentor, StateId s, StateId t);

  /// Next action at s. A running repair walk takes precedence, then
  /// epsilon-exploration, then `greedy_action`. Decays epsilon.
  ActionId select_action(StateId s, CounterRng& rng);

  /// Greedy action at s without exploration or repair walks: the closest
  /// action to a mentor whose value the observer cannot supersede, otherwise
  /// the observer's best action (lowest index on ties).
  ActionId greedy_action(StateId s);

  /// One augmented backup at s under this learner's gate, without writing V.
  BackupResult evaluate(StateId s);

  const ValueTable& values() const { return values_; }
  const DirichletCountTable& observer_model() const { return observer_; }
  const DirichletCountTable& mentor_model(int mentor) const {
    return mentors_.at(static_cast<std::size_t>(mentor));
  }
  const FeasibilityLedger& ledger() const { return ledger_; }
  const RepairWalker& walker() const { return walker_; }
  const LearnerConfig& config() const { return config_; }
  const PriorityQueue& queue() const { return queue_; }
  int state_count() const { return setup_.state_count; }
  int action_count() const { return setup_.action_count; }
  int mentor_count() const { return setup_.mentor_count; }
  double epsilon() const { return epsilon_; }
  std::uint64_t backups_performed() const { return backups_; }
  /// Whether the last selected action was random (exploration or repair walk).
  bool last_action_random() const { return last_random_; }

 private:
  BackupResult backup(StateId s);
  void update_value(StateId s);
  void sweep();
  void seed_predecessors(StateId s, double delta);
  void note_edge(StateId from, StateId to);
  bool gate(StateId s, const MentorCandidate& candidate);
  ActionId greedy_choice(StateId s);

  LearnerSetup setup_;
  LearnerConfig config_;
  DirichletCountTable observer_;
  std::vector<DirichletCountTable> mentors_;
  std::vector<const DirichletCountTable*> mentor_ptrs_;
  ValueTable values_;
  PriorityQueue queue_;
  std::vector<std::vector<StateId>> predecessors_;
  FeasibilityLedger ledger_;
  RepairWalker walker_;
  double epsilon_;
  std::uint64_t backups_ = 0;
  bool last_random_ = false;
};

/// Gridworld prior support: the king-move neighbourhood of each cell.
class GridMap;
LearnerSetup grid_setup(const GridMap& map, int action_count, int mentor_count);

}  // namespace imitation
