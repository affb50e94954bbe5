#include "imitation/gridworld.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace imitation {

GridMap GridMap::parse(std::string_view text, const RewardSpec& rewards) {
  std::vector<std::string> lines;
  std::string current;
  for (char ch : text) {
    if (ch == '\r') continue;
    if (ch == '\n') {
      if (!current.empty()) lines.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  if (!current.empty()) lines.push_back(std::move(current));
  if (lines.empty()) throw std::invalid_argument("map: empty");

  GridMap map;
  map.width_ = static_cast<int>(lines.front().size());
  map.height_ = static_cast<int>(lines.size());
  map.cells_.reserve(static_cast<std::size_t>(map.width_) * lines.size());
  int starts = 0;
  for (int y = 0; y < map.height_; ++y) {
    const auto& line = lines[static_cast<std::size_t>(y)];
    if (static_cast<int>(line.size()) != map.width_) {
      throw std::invalid_argument("map: line " + std::to_string(y + 1) + " has length " +
                                  std::to_string(line.size()) + ", expected " +
                                  std::to_string(map.width_));
    }
    for (int x = 0; x < map.width_; ++x) {
      Cell cell;
      switch (line[static_cast<std::size_t>(x)]) {
        case '.': cell.kind = CellKind::Empty; break;
        case '#': cell.kind = CellKind::Obstacle; break;
        case 'S':
          cell.kind = CellKind::Start;
          map.start_ = y * map.width_ + x;
          ++starts;
          break;
        case 'X': cell = {CellKind::Goal, rewards.goal}; break;
        case '*': cell = {CellKind::ResetPenalty, rewards.reset_penalty}; break;
        case 'R': cell = {CellKind::RiverPenalty, rewards.river_penalty}; break;
        case 'I': cell = {CellKind::Island, rewards.island}; break;
        default:
          throw std::invalid_argument(std::string("map: unknown cell character '") +
                                      line[static_cast<std::size_t>(x)] + "' at line " +
                                      std::to_string(y + 1));
      }
      map.cells_.push_back(cell);
    }
  }
  if (starts != 1) {
    throw std::invalid_argument("map: expected exactly one start cell, found " +
                                std::to_string(starts));
  }
  return map;
}

GridMap GridMap::load(const std::string& path, const RewardSpec& rewards) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open map file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse(buffer.str(), rewards);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

std::vector<double> GridMap::rewards() const {
  std::vector<double> r;
  r.reserve(cells_.size());
  for (const auto& c : cells_) r.push_back(c.reward);
  return r;
}

int GridMap::count(CellKind kind) const {
  return static_cast<int>(
      std::count_if(cells_.begin(), cells_.end(), [&](const Cell& c) { return c.kind == kind; }));
}

std::vector<StateId> GridMap::cells_of(CellKind kind) const {
  std::vector<StateId> out;
  for (StateId s = 0; s < state_count(); ++s) {
    if (cell(s).kind == kind) out.push_back(s);
  }
  return out;
}

std::string GridMap::to_string() const {
  std::string out;
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) out.push_back(static_cast<char>(cell(index({x, y})).kind));
    out.push_back('\n');
  }
  return out;
}

ActionSet ActionSet::news() { return {"NEWS", {{0, -1}, {1, 0}, {-1, 0}, {0, 1}}}; }

ActionSet ActionSet::skew() { return {"Skew", {{0, -1}, {0, 1}, {1, -1}, {-1, 1}}}; }

ActionSet ActionSet::from_name(std::string_view name) {
  if (name == "NEWS" || name == "news") return news();
  if (name == "Skew" || name == "skew") return skew();
  throw std::invalid_argument("unknown action set '" + std::string(name) + "'");
}

void ActionSet::validate() const {
  if (moves.empty() || moves.size() > 8) {
    throw std::invalid_argument("action set must hold between 1 and 8 moves");
  }
  for (const auto& m : moves) {
    if (m.dx < -1 || m.dx > 1 || m.dy < -1 || m.dy > 1) {
      throw std::invalid_argument("action displacement exceeds one cell per axis");
    }
  }
}

StateId apply_move(const GridMap& map, StateId s, Displacement move) {
  const Coord from = map.coord(s);
  const Coord to{from.x + move.dx, from.y + move.dy};
  if (!map.in_bounds(to)) return s;
  const StateId t = map.index(to);
  return map.is_obstacle(t) ? s : t;
}

StepResult step(const GridMap& map, const ActionSet& actions, const NoiseModel& noise, StateId s,
                ActionId a, CounterRng& rng) {
  StateId next;
  if (map.resets(s)) {
    next = map.start();
  } else {
    ActionId realized = a;
    const int n = actions.size();
    if (n > 1 && noise.eta > 0.0 && rng.bernoulli(noise.eta)) {
      realized = static_cast<ActionId>(rng.below(static_cast<std::uint64_t>(n - 1)));
      if (realized >= a) ++realized;
    }
    next = apply_move(map, s, actions.moves[static_cast<std::size_t>(realized)]);
  }
  return {next, map.reward(next), map.resets(next), map.is_goal(next)};
}

MdpModel true_model(const GridMap& map, const ActionSet& actions, const NoiseModel& noise,
                    double gamma) {
  MdpModel model(map.state_count(), actions.size(), gamma);
  const int n = actions.size();
  for (StateId s = 0; s < map.state_count(); ++s) {
    model.set_reward(s, map.reward(s));
    for (ActionId a = 0; a < n; ++a) {
      std::vector<Successor> row;
      if (map.resets(s)) {
        row.push_back({map.start(), 1.0});
      } else if (map.is_obstacle(s)) {
        row.push_back({s, 1.0});
      } else {
        const double other = n > 1 ? noise.eta / (n - 1) : 0.0;
        const double intended = n > 1 ? 1.0 - noise.eta : 1.0;
        for (ActionId b = 0; b < n; ++b) {
          const double p = b == a ? intended : other;
          row.push_back({apply_move(map, s, actions.moves[static_cast<std::size_t>(b)]), p});
        }
      }
      model.set_row(s, a, std::move(row));
    }
  }
  return model;
}

std::vector<StateId> neighborhood(const GridMap& map, StateId s) {
  std::vector<StateId> out;
  const Coord c = map.coord(s);
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      const Coord n{c.x + dx, c.y + dy};
      if (map.in_bounds(n)) out.push_back(map.index(n));
    }
  }
  return out;
}

int shortest_path_length(const GridMap& map, const ActionSet& actions) {
  std::vector<int> dist(static_cast<std::size_t>(map.state_count()), -1);
  std::deque<StateId> frontier{map.start()};
  dist[static_cast<std::size_t>(map.start())] = 0;
  while (!frontier.empty()) {
    const StateId u = frontier.front();
    frontier.pop_front();
    if (map.is_goal(u)) return dist[static_cast<std::size_t>(u)];
    if (map.resets(u)) continue;
    for (const auto& mv : actions.moves) {
      const StateId v = apply_move(map, u, mv);
      if (dist[static_cast<std::size_t>(v)] >= 0) continue;
      dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
      frontier.push_back(v);
    }
  }
  return -1;
}

}  // namespace imitation
