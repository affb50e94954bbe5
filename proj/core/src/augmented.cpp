#include "imitation/augmented.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace imitation {

std::optional<double> mentor_value(std::span<const double> values,
                                   const DirichletCountTable& mentor_table,
                                   std::span<const double> rewards, double gamma, StateId s) {
  mentor_table.check_state(s);
  if (!(mentor_table.total(s) > 0.0)) return std::nullopt;
  return rewards[static_cast<std::size_t>(s)] + gamma * mentor_table.expected_value(s, 0, values);
}

double q_sigma(std::span<const double> values, const DirichletCountTable& table, StateId s,
               ActionId a, double gamma, VarianceMode mode) {
  const double total = table.total(s, a);
  if (!(total > 0.0)) {
    throw UndefinedModelError("q_sigma: no counts at state " + std::to_string(s));
  }
  double acc = 0.0;
  for (const auto& e : table.row(s, a)) {
    const double n = e.count();
    if (n == 0.0) continue;
    const double v = values[static_cast<std::size_t>(e.successor)];
    acc += dirichlet_variance(n, total - n, mode) * v * v;
  }
  return std::sqrt(gamma * gamma * acc);
}

Backup observer_backup(std::span<const double> values, const DirichletCountTable& observer,
                       std::span<const double> rewards, double gamma, StateId s) {
  observer.check_state(s);
  double best_sum = observer.expected_value(s, 0, values);
  ActionId best = 0;
  for (ActionId a = 1; a < observer.actions_per_state(); ++a) {
    const double sum = observer.expected_value(s, a, values);
    if (sum > best_sum) {
      best_sum = sum;
      best = a;
    }
  }
  return {rewards[static_cast<std::size_t>(s)] + gamma * best_sum, best};
}

ActionId closest_action(const DirichletCountTable& observer, const DirichletCountTable& mentor,
                        StateId s) {
  constexpr double kFloor = 1e-12;
  const double mentor_total = mentor.total(s);
  if (!(mentor_total > 0.0)) {
    throw UndefinedModelError("closest_action: no mentor counts at state " + std::to_string(s));
  }
  const auto mentor_log = [&](StateId t) {
    double n = 0.0;
    for (const auto& e : mentor.row(s)) {
      if (e.successor == t) {
        n = e.count();
        break;
      }
    }
    return std::log(std::max(n / mentor_total, kFloor));
  };

  ActionId best = 0;
  double best_score = std::numeric_limits<double>::infinity();
  for (ActionId a = 0; a < observer.actions_per_state(); ++a) {
    const double total = observer.total(s, a);
    if (!(total > 0.0)) continue;
    double score = 0.0;
    for (const auto& e : observer.row(s, a)) {
      const double p = e.count() / total;
      if (p > 0.0) score -= p * mentor_log(e.successor);
    }
    if (score < best_score) {
      best_score = score;
      best = a;
    }
  }
  return best;
}

}  // namespace imitation
