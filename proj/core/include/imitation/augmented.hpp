#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>

#include "imitation/dirichlet.hpp"
#include "imitation/mdp.hpp"

namespace imitation {

struct ConfidenceParams {
  /// Width of the confidence interval in standard deviations.
  double c = 0.0;

  void validate() const {
    if (!std::isfinite(c) || c < 0.0) {
      throw std::invalid_argument("confidence multiplier c must be finite and non-negative");
    }
  }
};

/// Outcome of one (possibly augmented) backup at a state.
struct BackupResult {
  double value = 0.0;
  /// Mentor whose chain supplied `value`; empty when the observer's own model won.
  std::optional<int> mentor;
  ActionId best_action = 0;
  double v_o = 0.0;
  double v_m = 0.0;
  double sigma_o = 0.0;
  double sigma_m = 0.0;

  bool from_mentor() const { return mentor.has_value(); }
};

/// Everything an augmented backup reads. All references are borrowed.
struct BackupInputs {
  std::span<const double> values;
  const DirichletCountTable& observer;
  std::span<const DirichletCountTable* const> mentors;
  std::span<const double> rewards;
  double gamma;
  ConfidenceParams confidence;
  VarianceMode variance = VarianceMode::AsPrinted;
};

/// Value of following mentor `mentor_table`'s chain at s, scored with the
/// observer's own reward. Empty when the chain has no counts at s.
std::optional<double> mentor_value(std::span<const double> values,
                                   const DirichletCountTable& mentor_table,
                                   std::span<const double> rewards, double gamma, StateId s);

/// Standard deviation of the Q-value of key (s, a) induced by model
/// uncertainty: sqrt(gamma^2 sum_t var(s, a, t) V(t)^2) over the row's support.
double q_sigma(std::span<const double> values, const DirichletCountTable& table, StateId s,
               ActionId a, double gamma, VarianceMode mode = VarianceMode::AsPrinted);

/// True iff the observer's lower bound strictly exceeds the mentor's.
inline bool supersedes(double v_o, double sigma_o, double v_m, double sigma_m,
                       const ConfidenceParams& params) {
  return v_o - params.c * sigma_o > v_m - params.c * sigma_m;
}

/// Argmax over the observer's expected models of sum_t Pr(s, a, t) V(t),
/// lowest index on ties, together with R(s) + gamma times that sum.
Backup observer_backup(std::span<const double> values, const DirichletCountTable& observer,
                       std::span<const double> rewards, double gamma, StateId s);

/// Candidate mentor handed to an admission gate.
struct MentorCandidate {
  int mentor;
  double v_o;
  double sigma_o;
  double v_m;
  double sigma_m;
};

/// Admits every mentor.
struct AdmitAll {
  constexpr bool operator()(const MentorCandidate&) const { return true; }
};

/// Confidence-tested augmented backup over any number of mentor chains.
///
/// The observer branch uses the best action a* under expected models. Among
/// mentors with counts at s that `gate` admits, the one with the highest mean
/// chain value is compared against the observer using lower bounds. The
/// winner's mean value is returned. With no admitted mentors the result is
/// exactly the observer's standard backup.
template <class Gate = AdmitAll>
BackupResult augmented_backup(const BackupInputs& in, StateId s, Gate&& gate = Gate{}) {
  const Backup own = observer_backup(in.values, in.observer, in.rewards, in.gamma, s);
  BackupResult result;
  result.value = own.value;
  result.best_action = own.best;
  result.v_o = own.value;
  if (in.mentors.empty()) return result;

  bool sigma_o_ready = false;
  std::optional<int> chosen;
  double best_vm = 0.0;
  double best_sigma_m = 0.0;
  for (std::size_t m = 0; m < in.mentors.size(); ++m) {
    const auto vm = mentor_value(in.values, *in.mentors[m], in.rewards, in.gamma, s);
    if (!vm) continue;
    if (!sigma_o_ready) {
      result.sigma_o = q_sigma(in.values, in.observer, s, own.best, in.gamma, in.variance);
      sigma_o_ready = true;
    }
    const double sigma_m = q_sigma(in.values, *in.mentors[m], s, 0, in.gamma, in.variance);
    const MentorCandidate candidate{static_cast<int>(m), own.value, result.sigma_o, *vm, sigma_m};
    if (!gate(candidate)) continue;
    if (!chosen || *vm > best_vm) {
      chosen = static_cast<int>(m);
      best_vm = *vm;
      best_sigma_m = sigma_m;
    }
  }
  if (!chosen) return result;

  result.v_m = best_vm;
  result.sigma_m = best_sigma_m;
  if (!supersedes(result.v_o, result.sigma_o, best_vm, best_sigma_m, in.confidence)) {
    result.value = best_vm;
    result.mentor = chosen;
  }
  return result;
}

/// Observer action whose expected outcome distribution has the smallest cross
/// entropy against the mentor's chain at s (minimum KL divergence). Mentor
/// probabilities of zero are floored at 1e-12. Ties go to the lowest index.
ActionId closest_action(const DirichletCountTable& observer, const DirichletCountTable& mentor,
                        StateId s);

/// Augmented backup for action-dependent rewards R(s, a), laid out as
/// `s * actions + a`. The mentor branch is charged R(s, kappa(s)).
template <class Gate = AdmitAll>
BackupResult generalized_reward_backup(const BackupInputs& in,
                                       std::span<const double> action_rewards, StateId s,
                                       Gate&& gate = Gate{}) {
  const int actions = in.observer.actions_per_state();
  const auto base = static_cast<std::size_t>(s) * static_cast<std::size_t>(actions);
  BackupResult result;
  for (ActionId a = 0; a < actions; ++a) {
    const double q = action_rewards[base + static_cast<std::size_t>(a)] +
                     in.gamma * in.observer.expected_value(s, a, in.values);
    if (a == 0 || q > result.v_o) {
      result.v_o = q;
      result.best_action = a;
    }
  }
  result.value = result.v_o;
  if (in.mentors.empty()) return result;

  bool sigma_o_ready = false;
  std::optional<int> chosen;
  double best_vm = 0.0;
  double best_sigma_m = 0.0;
  for (std::size_t m = 0; m < in.mentors.size(); ++m) {
    const DirichletCountTable& chain = *in.mentors[m];
    if (!(chain.total(s) > 0.0)) continue;
    const ActionId kappa = closest_action(in.observer, chain, s);
    const double vm = action_rewards[base + static_cast<std::size_t>(kappa)] +
                      in.gamma * chain.expected_value(s, 0, in.values);
    if (!sigma_o_ready) {
      result.sigma_o = q_sigma(in.values, in.observer, s, result.best_action, in.gamma,
                               in.variance);
      sigma_o_ready = true;
    }
    const double sigma_m = q_sigma(in.values, chain, s, 0, in.gamma, in.variance);
    if (!gate(MentorCandidate{static_cast<int>(m), result.v_o, result.sigma_o, vm, sigma_m})) {
      continue;
    }
    if (!chosen || vm > best_vm) {
      chosen = static_cast<int>(m);
      best_vm = vm;
      best_sigma_m = sigma_m;
    }
  }
  if (!chosen) return result;

  result.v_m = best_vm;
  result.sigma_m = best_sigma_m;
  if (!supersedes(result.v_o, result.sigma_o, best_vm, best_sigma_m, in.confidence)) {
    result.value = best_vm;
    result.mentor = chosen;
  }
  return result;
}

}  // namespace imitation
