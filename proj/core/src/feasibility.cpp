#include "imitation/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace imitation {

void FeasibilityParams::validate() const {
  if (!(alpha > 0.0 && alpha < 0.5)) throw std::invalid_argument("alpha must lie in (0, 0.5)");
  if (n_min < 1) throw std::invalid_argument("n_min must be >= 1");
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (n_attempts < 1) throw std::invalid_argument("n_attempts must be >= 1");
  if (!(theta > 0.0 && theta <= 1.0)) throw std::invalid_argument("theta must lie in (0, 1]");
}

FeasibilityLedger::FeasibilityLedger(int state_count, int mentor_count)
    : states_(state_count), mentors_(mentor_count) {
  flags_.resize(static_cast<std::size_t>(state_count) *
                static_cast<std::size_t>(std::max(mentor_count, 0)));
}

FeasibilityFlags& FeasibilityLedger::at(StateId s, int mentor) {
  if (s < 0 || s >= states_ || mentor < 0 || mentor >= mentors_) {
    throw std::out_of_range("FeasibilityLedger: index out of range");
  }
  return flags_[static_cast<std::size_t>(s) * static_cast<std::size_t>(mentors_) +
                static_cast<std::size_t>(mentor)];
}

const FeasibilityFlags& FeasibilityLedger::at(StateId s, int mentor) const {
  return const_cast<FeasibilityLedger*>(this)->at(s, mentor);
}

void write_snapshot(std::ostream& out, const FeasibilityLedger& ledger) {
  char buf[160];
  for (StateId s = 0; s < ledger.state_count(); ++s) {
    for (int m = 0; m < ledger.mentor_count(); ++m) {
      const FeasibilityFlags& f = ledger.at(s, m);
      if (!f.infeasible && !f.bridged && f.repairable && f.attempts == 0 && !f.searching &&
          f.search_steps == 0) {
        continue;
      }
      std::snprintf(buf, sizeof buf, "%d %d %d %d %d %u %u %d\n", s, m, f.infeasible ? 1 : 0,
                    f.bridged ? 1 : 0, f.repairable ? 1 : 0, f.attempts, f.search_steps,
                    f.searching ? 1 : 0);
      out << buf;
    }
  }
}

double chebychev_z(double q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw std::invalid_argument("chebychev_z: q must lie in (0, 1), got " + std::to_string(q));
  }
  return std::sqrt(1.0 / q);
}

std::optional<double> successor_z(const DirichletCountTable& observer,
                                  const DirichletCountTable& mentor, StateId s, ActionId a,
                                  StateId t, const FeasibilityParams& params) {
  const auto n_min = static_cast<std::uint64_t>(params.n_min);
  if (observer.experience_total(s, a) < n_min || mentor.experience_total(s) < n_min) {
    return std::nullopt;
  }
  const double p_o = observer.expected_prob(s, a, t);
  const double p_m = mentor.expected_prob(s, 0, t);
  const double diff = std::abs(p_o - p_m);
  const double n_o = observer.count(s, a, t);
  const double n_m = mentor.count(s, 0, t);
  if (n_o + n_m == 0.0) return diff > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  const double pooled = (n_o * observer.model_variance(s, a, t, params.variance) +
                         n_m * mentor.model_variance(s, 0, t, params.variance)) /
                        (n_o + n_m);
  if (!(pooled > 0.0)) return diff > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  return diff / std::sqrt(pooled);
}

namespace {

std::vector<StateId> successor_set(const DirichletCountTable& observer,
                                   const DirichletCountTable& mentor, StateId s, ActionId a) {
  std::vector<StateId> set;
  for (const auto& e : observer.row(s, a)) {
    if (e.count() > 0.0) set.push_back(e.successor);
  }
  for (const auto& e : mentor.row(s)) {
    if (e.experience > 0 && std::find(set.begin(), set.end(), e.successor) == set.end()) {
      set.push_back(e.successor);
    }
  }
  return set;
}

}  // namespace

bool action_similar(const DirichletCountTable& observer, const DirichletCountTable& mentor,
                    StateId s, ActionId a, const FeasibilityParams& params) {
  const auto n_min = static_cast<std::uint64_t>(params.n_min);
  if (observer.experience_total(s, a) < n_min || mentor.experience_total(s) < n_min) {
    return true;
  }
  const auto successors = successor_set(observer, mentor, s, a);
  if (successors.empty()) return true;
  const double critical = chebychev_z(params.alpha / static_cast<double>(successors.size()));
  for (StateId t : successors) {
    const auto z = successor_z(observer, mentor, s, a, t, params);
    if (z && *z > critical) return false;
  }
  return true;
}

bool feasible(const DirichletCountTable& observer, const DirichletCountTable& mentor, StateId s,
              int mentor_id, const FeasibilityParams& params, FeasibilityLedger& ledger) {
  FeasibilityFlags& f = ledger.at(s, mentor_id);
  if (f.infeasible) return false;
  for (ActionId a = 0; a < observer.actions_per_state(); ++a) {
    if (action_similar(observer, mentor, s, a, params)) return true;
  }
  f.infeasible = true;
  return false;
}

std::vector<StateId> downstream_states(const DirichletCountTable& mentor, StateId s, int k,
                                       double min_prob) {
  std::vector<StateId> found;
  std::vector<int> depth(static_cast<std::size_t>(mentor.state_count()), -1);
  std::deque<StateId> frontier{s};
  depth[static_cast<std::size_t>(s)] = 0;
  while (!frontier.empty()) {
    const StateId u = frontier.front();
    frontier.pop_front();
    const int d = depth[static_cast<std::size_t>(u)];
    if (d == k) continue;
    const double total = mentor.total(u);
    for (const auto& e : mentor.row(u)) {
      if (e.experience == 0 || e.count() < min_prob * total) continue;
      auto& dv = depth[static_cast<std::size_t>(e.successor)];
      if (dv >= 0) continue;
      dv = d + 1;
      found.push_back(e.successor);
      frontier.push_back(e.successor);
    }
  }
  return found;
}

bool reachable(const DirichletCountTable& observer, const DirichletCountTable& mentor, StateId s,
               const FeasibilityParams& params) {
  const auto targets = downstream_states(mentor, s, params.k, params.theta);
  if (targets.empty()) return false;
  std::vector<char> is_target(static_cast<std::size_t>(observer.state_count()), 0);
  for (StateId t : targets) is_target[static_cast<std::size_t>(t)] = 1;

  std::vector<int> depth(static_cast<std::size_t>(observer.state_count()), -1);
  std::deque<StateId> frontier{s};
  depth[static_cast<std::size_t>(s)] = 0;
  while (!frontier.empty()) {
    const StateId u = frontier.front();
    frontier.pop_front();
    const int d = depth[static_cast<std::size_t>(u)];
    if (d == params.k) continue;
    for (ActionId a = 0; a < observer.actions_per_state(); ++a) {
      const double total = observer.total(u, a);
      if (!(total > 0.0)) continue;
      for (const auto& e : observer.row(u, a)) {
        if (e.count() / total < params.theta) continue;
        if (is_target[static_cast<std::size_t>(e.successor)]) return true;
        auto& dv = depth[static_cast<std::size_t>(e.successor)];
        if (dv >= 0) continue;
        dv = d + 1;
        frontier.push_back(e.successor);
      }
    }
  }
  return false;
}

bool RepairWalker::begin(FeasibilityLedger& ledger, StateId s, int mentor,
                         std::vector<StateId> downstream) {
  if (active_) return false;
  FeasibilityFlags& f = ledger.at(s, mentor);
  if (!f.searching || f.bridged || !f.repairable) return false;
  f.search_steps = 0;
  active_ = Walk{s, mentor, std::move(downstream)};
  return true;
}

ActionId RepairWalker::step(CounterRng& rng, int action_count, FeasibilityLedger& ledger) {
  if (!active_) throw std::logic_error("RepairWalker::step without an active walk");
  ++ledger.at(active_->origin, active_->mentor).search_steps;
  ++total_steps_;
  return static_cast<ActionId>(rng.below(static_cast<std::uint64_t>(action_count)));
}

void RepairWalker::observe(StateId reached, FeasibilityLedger& ledger,
                           const FeasibilityParams& params) {
  if (!active_) return;
  FeasibilityFlags& f = ledger.at(active_->origin, active_->mentor);
  const auto& targets = active_->downstream;
  if (std::find(targets.begin(), targets.end(), reached) != targets.end()) {
    f.bridged = true;
    f.searching = false;
    active_.reset();
    return;
  }
  if (f.search_steps >= static_cast<std::uint32_t>(params.walk_length())) {
    ++f.attempts;
    f.searching = false;
    if (f.attempts >= static_cast<std::uint32_t>(params.n_attempts)) f.repairable = false;
    active_.reset();
  }
}

}  // namespace imitation
