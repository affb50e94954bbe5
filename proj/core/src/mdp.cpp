#include "imitation/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace imitation {

MdpModel::MdpModel(int state_count, int action_count, double discount)
    : state_count_(state_count), action_count_(action_count), discount_(discount) {
  if (state_count <= 0 || action_count <= 0) {
    throw std::invalid_argument("MdpModel: state and action counts must be positive");
  }
  if (!(discount >= 0.0 && discount < 1.0)) {
    throw std::invalid_argument("MdpModel: discount must lie in [0, 1)");
  }
  rows_.resize(static_cast<std::size_t>(state_count) * static_cast<std::size_t>(action_count));
  rewards_.assign(static_cast<std::size_t>(state_count), 0.0);
}

void MdpModel::check_state(StateId s) const {
  if (s < 0 || s >= state_count_) {
    throw std::out_of_range("state " + std::to_string(s) + " out of range");
  }
}

void MdpModel::check_action(ActionId a) const {
  if (a < 0 || a >= action_count_) {
    throw std::out_of_range("action " + std::to_string(a) + " out of range");
  }
}

void MdpModel::set_row(StateId s, ActionId a, std::vector<Successor> row) {
  check_state(s);
  check_action(a);
  std::vector<Successor> merged;
  merged.reserve(row.size());
  for (const auto& e : row) {
    check_state(e.state);
    if (e.prob < 0.0 || e.prob > 1.0) {
      throw std::invalid_argument("MdpModel: probability outside [0, 1]");
    }
    if (e.prob == 0.0) continue;
    auto it = std::find_if(merged.begin(), merged.end(),
                           [&](const Successor& m) { return m.state == e.state; });
    if (it == merged.end()) {
      merged.push_back(e);
    } else {
      it->prob += e.prob;
    }
  }
  rows_[static_cast<std::size_t>(s) * static_cast<std::size_t>(action_count_) +
        static_cast<std::size_t>(a)] = std::move(merged);
}

std::span<const Successor> MdpModel::row(StateId s, ActionId a) const {
  return rows_[static_cast<std::size_t>(s) * static_cast<std::size_t>(action_count_) +
               static_cast<std::size_t>(a)];
}

void MdpModel::set_reward(StateId s, double r) {
  check_state(s);
  rewards_[static_cast<std::size_t>(s)] = r;
}

void MdpModel::validate() const {
  for (StateId s = 0; s < state_count_; ++s) {
    for (ActionId a = 0; a < action_count_; ++a) {
      double total = 0.0;
      for (const auto& e : row(s, a)) total += e.prob;
      if (std::abs(total - 1.0) > 1e-9) {
        throw std::invalid_argument("MdpModel: row (" + std::to_string(s) + ", " +
                                    std::to_string(a) + ") sums to " + std::to_string(total));
      }
    }
  }
}

double ValueTable::sup_distance(const ValueTable& other) const {
  if (other.size() != size()) throw std::invalid_argument("ValueTable size mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    d = std::max(d, std::abs(values_[i] - other.values_[i]));
  }
  return d;
}

namespace {

double expected_next(const MdpModel& model, const ValueTable& v, StateId s, ActionId a) {
  double sum = 0.0;
  for (const auto& e : model.row(s, a)) sum += e.prob * v[e.state];
  return sum;
}

}  // namespace

double q_value(const MdpModel& model, const ValueTable& v, StateId s, ActionId a) {
  model.check_state(s);
  model.check_action(a);
  return model.reward(s) + model.discount() * expected_next(model, v, s, a);
}

Backup bellman_backup(const MdpModel& model, const ValueTable& v, StateId s) {
  model.check_state(s);
  Backup best{q_value(model, v, s, 0), 0};
  for (ActionId a = 1; a < model.action_count(); ++a) {
    const double q = q_value(model, v, s, a);
    if (q > best.value) best = {q, a};
  }
  return best;
}

SolveResult value_iteration(const MdpModel& model, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("value_iteration: epsilon must be positive");
  const auto n = static_cast<std::size_t>(model.state_count());
  const double gamma = model.discount();
  const double threshold = gamma > 0.0 ? epsilon * (1.0 - gamma) / (2.0 * gamma) : 0.0;
  constexpr int kIterationCap = 1'000'000;

  ValueTable current(n);
  ValueTable next(n);
  for (int iteration = 1; iteration <= kIterationCap; ++iteration) {
    for (StateId s = 0; s < model.state_count(); ++s) {
      next[s] = bellman_backup(model, current, s).value;
    }
    const double change = next.sup_distance(current);
    std::swap(current, next);
    if (gamma == 0.0 || change <= threshold) {
      Policy greedy = greedy_policy(model, current);
      return {std::move(current), std::move(greedy), iteration};
    }
  }
  throw std::runtime_error("value_iteration: iteration cap reached");
}

Policy greedy_policy(const MdpModel& model, const ValueTable& v) {
  Policy policy{std::vector<ActionId>(static_cast<std::size_t>(model.state_count()), 0)};
  for (StateId s = 0; s < model.state_count(); ++s) {
    policy.action_of[static_cast<std::size_t>(s)] = bellman_backup(model, v, s).best;
  }
  return policy;
}

std::vector<double> stationary_distribution(const MdpModel& model, const Policy& policy,
                                            StateId start, double tolerance,
                                            int max_iterations) {
  model.check_state(start);
  const auto n = static_cast<std::size_t>(model.state_count());
  std::vector<double> dist(n, 0.0);
  std::vector<double> next(n, 0.0);
  dist[static_cast<std::size_t>(start)] = 1.0;
  for (int it = 0; it < max_iterations; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (StateId s = 0; s < model.state_count(); ++s) {
      const double mass = dist[static_cast<std::size_t>(s)];
      if (mass == 0.0) continue;
      next[static_cast<std::size_t>(s)] += 0.5 * mass;
      for (const auto& e : model.row(s, policy[s])) {
        next[static_cast<std::size_t>(e.state)] += 0.5 * mass * e.prob;
      }
    }
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) change = std::max(change, std::abs(next[i] - dist[i]));
    std::swap(dist, next);
    if (change <= tolerance) return dist;
  }
  throw std::runtime_error("stationary_distribution: did not converge");
}

}  // namespace imitation
