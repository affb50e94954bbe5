#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "imitation/dirichlet.hpp"
#include "imitation/rng.hpp"

namespace imitation {

struct FeasibilityParams {
  /// Significance of the Bonferroni action-similarity test.
  double alpha = 0.05;
  /// Samples required on each side before the test is run.
  int n_min = 5;
  /// Bridge length bound; a repair walk lasts k * k steps.
  int k = 3;
  /// Repair walks tried before a state is declared irreparable.
  int n_attempts = 20;
  /// Minimum expected transition probability for an edge to count as a bridge.
  double theta = 0.3;
  VarianceMode variance = VarianceMode::AsPrinted;

  void validate() const;
  int walk_length() const { return k * k; }
};

/// Per-(state, mentor) bookkeeping for the elaborated augmented-backup test.
struct FeasibilityFlags {
  bool infeasible = false;
  bool bridged = false;
  bool repairable = true;
  /// A repair walk is requested or running for this pair.
  bool searching = false;
  std::uint32_t attempts = 0;
  std::uint32_t search_steps = 0;
};

class FeasibilityLedger {
 public:
  FeasibilityLedger() = default;
  FeasibilityLedger(int state_count, int mentor_count);

  FeasibilityFlags& at(StateId s, int mentor);
  const FeasibilityFlags& at(StateId s, int mentor) const;

  int state_count() const { return states_; }
  int mentor_count() const { return mentors_; }

 private:
  int states_ = 0;
  int mentors_ = 0;
  std::vector<FeasibilityFlags> flags_;
};

/// Line-oriented dump, one line per (state, mentor) pair that left the default:
///   <state> <mentor> <infeasible> <bridged> <repairable> <attempts> <search_steps> <searching>
void write_snapshot(std::ostream& out, const FeasibilityLedger& ledger);

/// Critical value from Chebychev's inequality: P(|X - mu| >= Z sigma) <= q
/// holds for Z = sqrt(1 / q). Requires 0 < q < 1.
double chebychev_z(double q);

/// Pooled-variance z statistic comparing Pr_o(s, a, t) with Pr_m(s, t).
/// Empty when either side has fewer than n_min observed samples. Returns
/// +infinity when the pooled variance is zero but the means differ.
std::optional<double> successor_z(const DirichletCountTable& observer,
                                  const DirichletCountTable& mentor, StateId s, ActionId a,
                                  StateId t, const FeasibilityParams& params);

/// Bonferroni test over the successor set at s: true unless some successor's
/// z exceeds chebychev_z(alpha / r). Untestable pairs count as similar.
bool action_similar(const DirichletCountTable& observer, const DirichletCountTable& mentor,
                    StateId s, ActionId a, const FeasibilityParams& params);

/// True iff some observer action is similar to the mentor's behaviour at s.
/// A negative answer is cached in the ledger and returned from then on.
bool feasible(const DirichletCountTable& observer, const DirichletCountTable& mentor, StateId s,
              int mentor_id, const FeasibilityParams& params, FeasibilityLedger& ledger);

/// States reachable from s in at most k observed mentor transitions, s excluded.
/// Edges whose expected probability is below `min_prob` are not followed.
std::vector<StateId> downstream_states(const DirichletCountTable& mentor, StateId s, int k,
                                       double min_prob = 0.0);

/// Whether the observer's own model reaches a downstream mentor state from s
/// within k steps using edges of expected probability at least theta.
bool reachable(const DirichletCountTable& observer, const DirichletCountTable& mentor, StateId s,
               const FeasibilityParams& params);

/// Lazily evaluated facts for `use_augmented`.
template <class Feasible, class Reachable>
struct GateQuery {
  bool supersedes;
  Feasible feasible;
  Reachable reachable;
};

/// Elaborated augmented-backup decision for (s, mentor).
///
/// Order of checks: observer supersedes -> false; feasible -> true; bridged ->
/// false; a bridge already exists -> mark bridged, false; repair disabled or
/// irreparable -> false. Otherwise the pair is under repair: it stays admitted
/// while fewer than n_attempts walks have failed and is flagged irreparable
/// after that.
template <class Feasible, class Reachable>
bool use_augmented(FeasibilityLedger& ledger, StateId s, int mentor,
                   const FeasibilityParams& params, bool repair_enabled,
                   GateQuery<Feasible, Reachable> query) {
  if (query.supersedes) return false;
  if (query.feasible()) return true;
  FeasibilityFlags& f = ledger.at(s, mentor);
  if (f.bridged) return false;
  if (query.reachable()) {
    f.bridged = true;
    f.searching = false;
    return false;
  }
  if (!repair_enabled || !f.repairable) return false;
  if (f.attempts >= static_cast<std::uint32_t>(params.n_attempts)) {
    f.repairable = false;
    f.searching = false;
    return false;
  }
  f.searching = true;
  return true;
}

/// Random-walk bridge search. At most one walk is active per learner; a walk
/// lasts k^2 steps and succeeds when it enters a downstream mentor state.
class RepairWalker {
 public:
  bool active() const { return active_.has_value(); }
  StateId origin() const { return active_ ? active_->origin : -1; }
  int mentor() const { return active_ ? active_->mentor : -1; }

  /// Starts a walk for (s, mentor) if that pair has a pending repair.
  bool begin(FeasibilityLedger& ledger, StateId s, int mentor, std::vector<StateId> downstream);

  /// Uniformly random action for the next walk step.
  ActionId step(CounterRng& rng, int action_count, FeasibilityLedger& ledger);

  /// Feeds the state reached by the last walk step. Ends the walk on success
  /// (marks the pair bridged) or after k^2 steps (counts a failed attempt and
  /// retires the pair once n_attempts walks have failed).
  void observe(StateId reached, FeasibilityLedger& ledger, const FeasibilityParams& params);

  std::uint64_t total_steps() const { return total_steps_; }

 private:
  struct Walk {
    StateId origin;
    int mentor;
    std::vector<StateId> downstream;
  };
  std::optional<Walk> active_;
  std::uint64_t total_steps_ = 0;
};

}  // namespace imitation
