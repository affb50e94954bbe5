#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace imitation {

using StateId = std::int32_t;
using ActionId = std::int32_t;

struct Successor {
  StateId state;
  double prob;
};

/// Finite MDP with state-based rewards and sparse successor rows.
class MdpModel {
 public:
  MdpModel(int state_count, int action_count, double discount);

  int state_count() const { return state_count_; }
  int action_count() const { return action_count_; }
  double discount() const { return discount_; }

  /// Replaces the successor distribution of (s, a). Entries with zero
  /// probability are dropped; duplicate successors are merged.
  void set_row(StateId s, ActionId a, std::vector<Successor> row);
  std::span<const Successor> row(StateId s, ActionId a) const;

  void set_reward(StateId s, double r);
  double reward(StateId s) const { return rewards_.at(static_cast<std::size_t>(s)); }
  std::span<const double> rewards() const { return rewards_; }

  /// Throws std::invalid_argument unless every row sums to 1 within 1e-9.
  void validate() const;

  void check_state(StateId s) const;
  void check_action(ActionId a) const;

 private:
  int state_count_;
  int action_count_;
  double discount_;
  std::vector<std::vector<Successor>> rows_;
  std::vector<double> rewards_;
};

class ValueTable {
 public:
  ValueTable() = default;
  explicit ValueTable(std::size_t states, double init = 0.0) : values_(states, init) {}
  explicit ValueTable(std::vector<double> values) : values_(std::move(values)) {}

  double operator[](StateId s) const { return values_[static_cast<std::size_t>(s)]; }
  double& operator[](StateId s) { return values_[static_cast<std::size_t>(s)]; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> view() const { return values_; }
  const std::vector<double>& values() const { return values_; }

  /// Largest absolute entrywise difference.
  double sup_distance(const ValueTable& other) const;

 private:
  std::vector<double> values_;
};

struct Policy {
  std::vector<ActionId> action_of;

  ActionId operator[](StateId s) const { return action_of[static_cast<std::size_t>(s)]; }
  std::size_t size() const { return action_of.size(); }
};

struct Backup {
  double value;
  ActionId best;
};

struct SolveResult {
  ValueTable values;
  Policy policy;
  int iterations;
};

/// R(s) + gamma * sum_t Pr(s, a, t) V(t).
double q_value(const MdpModel& model, const ValueTable& v, StateId s, ActionId a);

/// Max over actions of q_value; ties go to the lowest action index.
Backup bellman_backup(const MdpModel& model, const ValueTable& v, StateId s);

/// Synchronous value iteration from V = 0. Stops once the sup-norm change is
/// at most epsilon (1 - gamma) / (2 gamma); a single sweep when gamma = 0.
SolveResult value_iteration(const MdpModel& model, double epsilon = 1e-6);

/// Greedy policy with respect to v (lowest-index tie-break).
Policy greedy_policy(const MdpModel& model, const ValueTable& v);

/// Stationary distribution of the chain induced by `policy`, computed by power
/// iteration on the lazy chain (P + I) / 2 from a point mass at `start`.
std::vector<double> stationary_distribution(const MdpModel& model, const Policy& policy,
                                            StateId start, double tolerance = 1e-13,
                                            int max_iterations = 2'000'000);

}  // namespace imitation
