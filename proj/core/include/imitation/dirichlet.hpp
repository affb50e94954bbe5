#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "imitation/mdp.hpp"

namespace imitation {

/// Raised when a probability or variance is requested from a row whose total
/// pseudo-count is zero.
class UndefinedModelError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Which Dirichlet marginal variance formula `model_variance` uses.
enum class VarianceMode {
  /// (a + b) / ((a + b)^2 + (a + b + 1)), the form used by the imitation
  /// confidence test. It depends only on the row total.
  AsPrinted,
  /// The Beta(a, b) marginal variance a b / ((a + b)^2 (a + b + 1)).
  Beta,
};

/// Sparse Dirichlet counts over successor states, one row per key.
///
/// Keys are (state, action) pairs laid out as `state * actions + action`.
/// Observer models use one key per action; mentor Markov chains are the
/// single-action case. The count of a successor is its real-valued prior
/// pseudo-count plus an integer experience count.
class DirichletCountTable {
 public:
  struct Entry {
    StateId successor;
    double prior;
    std::uint32_t experience;

    double count() const { return prior + static_cast<double>(experience); }
  };

  DirichletCountTable(int state_count, int actions_per_state);

  int state_count() const { return state_count_; }
  int actions_per_state() const { return actions_; }

  /// Sets the prior pseudo-count of t in row (s, a), creating the entry.
  void set_prior(StateId s, ActionId a, StateId t, double pseudo_count);

  /// Adds one observed transition. Returns true if t was not yet present in
  /// the row (callers keep predecessor indexes in sync with this).
  bool record(StateId s, ActionId a, StateId t);

  std::span<const Entry> row(StateId s, ActionId a = 0) const { return rows_[key(s, a)].entries; }
  double total(StateId s, ActionId a = 0) const { return rows_[key(s, a)].total; }
  std::uint64_t experience_total(StateId s, ActionId a = 0) const {
    return rows_[key(s, a)].experience;
  }

  double count(StateId s, ActionId a, StateId t) const;
  double prior(StateId s, ActionId a, StateId t) const;
  std::uint32_t experience(StateId s, ActionId a, StateId t) const;

  /// n(key, t) / sum_t' n(key, t').
  double expected_prob(StateId s, ActionId a, StateId t) const;

  /// Marginal variance of the probability of t under the row's Dirichlet.
  double model_variance(StateId s, ActionId a, StateId t,
                        VarianceMode mode = VarianceMode::AsPrinted) const;

  /// Successor-state expectation of `values` under the expected model.
  double expected_value(StateId s, ActionId a, std::span<const double> values) const {
    const Row& r = rows_[key(s, a)];
    double sum = 0.0;
    for (const Entry& e : r.entries) {
      sum += (e.count() / r.total) * values[static_cast<std::size_t>(e.successor)];
    }
    return sum;
  }

  void check_state(StateId s) const;

 private:
  struct Row {
    std::vector<Entry> entries;
    double total = 0.0;
    std::uint64_t experience = 0;
  };

  std::size_t key(StateId s, ActionId a) const {
    return static_cast<std::size_t>(s) * static_cast<std::size_t>(actions_) +
           static_cast<std::size_t>(a);
  }
  const Entry* find(StateId s, ActionId a, StateId t) const;
  void check_key(StateId s, ActionId a) const;

  int state_count_;
  int actions_;
  std::vector<Row> rows_;
};

struct MentorObservation {
  int mentor_id;
  StateId from;
  StateId to;
};

inline void record_observer(DirichletCountTable& table, StateId s, ActionId a, StateId t) {
  table.record(s, a, t);
}

inline void record_mentor(DirichletCountTable& table, const MentorObservation& obs) {
  table.record(obs.from, 0, obs.to);
}

/// Variance formula on raw Dirichlet parameters: alpha is the successor's
/// count and beta the summed count of every other successor.
double dirichlet_variance(double alpha, double beta, VarianceMode mode);

/// Expected-probability MDP over the table's keys, with the given rewards.
/// Rows with zero total become self-loops.
MdpModel expected_model(const DirichletCountTable& table, std::span<const double> rewards,
                        double discount);

/// Line-oriented dump, one line per stored entry:
///   <state> <action> <successor> <prior> <experience>
/// Chain tables (one action per state) print '-' for the action column.
void write_snapshot(std::ostream& out, const DirichletCountTable& table);

}  // namespace imitation
