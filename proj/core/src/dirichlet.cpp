#include "imitation/dirichlet.hpp"

#include <cstdio>
#include <ostream>
#include <string>

namespace imitation {

DirichletCountTable::DirichletCountTable(int state_count, int actions_per_state)
    : state_count_(state_count), actions_(actions_per_state) {
  if (state_count <= 0 || actions_per_state <= 0) {
    throw std::invalid_argument("DirichletCountTable: dimensions must be positive");
  }
  rows_.resize(static_cast<std::size_t>(state_count) * static_cast<std::size_t>(actions_per_state));
}

void DirichletCountTable::check_state(StateId s) const {
  if (s < 0 || s >= state_count_) {
    throw std::out_of_range("DirichletCountTable: state " + std::to_string(s) + " out of range");
  }
}

void DirichletCountTable::check_key(StateId s, ActionId a) const {
  check_state(s);
  if (a < 0 || a >= actions_) {
    throw std::out_of_range("DirichletCountTable: action " + std::to_string(a) + " out of range");
  }
}

const DirichletCountTable::Entry* DirichletCountTable::find(StateId s, ActionId a,
                                                            StateId t) const {
  for (const Entry& e : rows_[key(s, a)].entries) {
    if (e.successor == t) return &e;
  }
  return nullptr;
}

void DirichletCountTable::set_prior(StateId s, ActionId a, StateId t, double pseudo_count) {
  check_key(s, a);
  check_state(t);
  if (!(pseudo_count >= 0.0)) throw std::invalid_argument("prior pseudo-count must be >= 0");
  Row& r = rows_[key(s, a)];
  for (Entry& e : r.entries) {
    if (e.successor == t) {
      r.total += pseudo_count - e.prior;
      e.prior = pseudo_count;
      return;
    }
  }
  r.entries.push_back({t, pseudo_count, 0});
  r.total += pseudo_count;
}

bool DirichletCountTable::record(StateId s, ActionId a, StateId t) {
  check_key(s, a);
  check_state(t);
  Row& r = rows_[key(s, a)];
  r.total += 1.0;
  ++r.experience;
  for (Entry& e : r.entries) {
    if (e.successor == t) {
      const bool fresh = e.count() == 0.0;
      ++e.experience;
      return fresh;
    }
  }
  r.entries.push_back({t, 0.0, 1});
  return true;
}

double DirichletCountTable::count(StateId s, ActionId a, StateId t) const {
  check_key(s, a);
  const Entry* e = find(s, a, t);
  return e ? e->count() : 0.0;
}

double DirichletCountTable::prior(StateId s, ActionId a, StateId t) const {
  check_key(s, a);
  const Entry* e = find(s, a, t);
  return e ? e->prior : 0.0;
}

std::uint32_t DirichletCountTable::experience(StateId s, ActionId a, StateId t) const {
  check_key(s, a);
  const Entry* e = find(s, a, t);
  return e ? e->experience : 0U;
}

double DirichletCountTable::expected_prob(StateId s, ActionId a, StateId t) const {
  check_key(s, a);
  const double total = rows_[key(s, a)].total;
  if (!(total > 0.0)) {
    throw UndefinedModelError("no counts at state " + std::to_string(s) + ", action " +
                              std::to_string(a));
  }
  const Entry* e = find(s, a, t);
  return e ? e->count() / total : 0.0;
}

double dirichlet_variance(double alpha, double beta, VarianceMode mode) {
  const double n = alpha + beta;
  if (!(n > 0.0)) throw UndefinedModelError("Dirichlet variance with zero total count");
  if (mode == VarianceMode::AsPrinted) return n / (n * n + (n + 1.0));
  return alpha * beta / (n * n * (n + 1.0));
}

double DirichletCountTable::model_variance(StateId s, ActionId a, StateId t,
                                           VarianceMode mode) const {
  check_key(s, a);
  const double total = rows_[key(s, a)].total;
  if (!(total > 0.0)) {
    throw UndefinedModelError("no counts at state " + std::to_string(s) + ", action " +
                              std::to_string(a));
  }
  const Entry* e = find(s, a, t);
  const double alpha = e ? e->count() : 0.0;
  return dirichlet_variance(alpha, total - alpha, mode);
}

MdpModel expected_model(const DirichletCountTable& table, std::span<const double> rewards,
                        double discount) {
  MdpModel model(table.state_count(), table.actions_per_state(), discount);
  for (StateId s = 0; s < table.state_count(); ++s) {
    model.set_reward(s, rewards[static_cast<std::size_t>(s)]);
    for (ActionId a = 0; a < table.actions_per_state(); ++a) {
      const double total = table.total(s, a);
      std::vector<Successor> row;
      if (total > 0.0) {
        for (const auto& e : table.row(s, a)) row.push_back({e.successor, e.count() / total});
      } else {
        row.push_back({s, 1.0});
      }
      model.set_row(s, a, std::move(row));
    }
  }
  return model;
}

void write_snapshot(std::ostream& out, const DirichletCountTable& table) {
  const bool chain = table.actions_per_state() == 1;
  char buf[128];
  for (StateId s = 0; s < table.state_count(); ++s) {
    for (ActionId a = 0; a < table.actions_per_state(); ++a) {
      for (const auto& e : table.row(s, a)) {
        if (chain) {
          std::snprintf(buf, sizeof buf, "%d - %d %.17g %u\n", s, e.successor, e.prior,
                        e.experience);
        } else {
          std::snprintf(buf, sizeof buf, "%d %d %d %.17g %u\n", s, a, e.successor, e.prior,
                        e.experience);
        }
        out << buf;
      }
    }
  }
}

}  // namespace imitation
