#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "imitation/mdp.hpp"
#include "imitation/rng.hpp"

namespace imitation {

enum class CellKind : char {
  Empty = '.',
  Obstacle = '#',
  Start = 'S',
  Goal = 'X',
  ResetPenalty = '*',
  RiverPenalty = 'R',
  Island = 'I',
};

struct Cell {
  CellKind kind = CellKind::Empty;
  double reward = 0.0;
};

/// Rewards attached to the reward-bearing map characters.
struct RewardSpec {
  double goal = 1.0;
  double reset_penalty = -1.0;
  double river_penalty = -0.2;
  double island = 5.0;
};

struct Coord {
  int x;
  int y;
  friend bool operator==(Coord, Coord) = default;
};

/// Rectangular grid; state = y * width + x, with y growing southwards.
class GridMap {
 public:
  /// Parses equal-length lines of 'S' 'X' '#' '*' 'R' 'I' '.'. Exactly one
  /// 'S' is required. Throws std::invalid_argument on malformed input.
  static GridMap parse(std::string_view text, const RewardSpec& rewards = {});
  static GridMap load(const std::string& path, const RewardSpec& rewards = {});

  int width() const { return width_; }
  int height() const { return height_; }
  int state_count() const { return width_ * height_; }
  StateId start() const { return start_; }

  StateId index(Coord c) const { return c.y * width_ + c.x; }
  Coord coord(StateId s) const { return {s % width_, s / width_}; }
  bool in_bounds(Coord c) const { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }

  const Cell& cell(StateId s) const { return cells_[static_cast<std::size_t>(s)]; }
  bool is_obstacle(StateId s) const { return cell(s).kind == CellKind::Obstacle; }
  bool is_goal(StateId s) const { return cell(s).kind == CellKind::Goal; }
  /// Goal and reset-penalty cells send the agent back to start on its next move.
  bool resets(StateId s) const {
    return cell(s).kind == CellKind::Goal || cell(s).kind == CellKind::ResetPenalty;
  }
  double reward(StateId s) const { return cell(s).reward; }
  std::vector<double> rewards() const;

  int count(CellKind kind) const;
  std::vector<StateId> cells_of(CellKind kind) const;

  /// Same characters `parse` accepts, one line per row.
  std::string to_string() const;

 private:
  int width_ = 0;
  int height_ = 0;
  StateId start_ = 0;
  std::vector<Cell> cells_;
};

struct Displacement {
  int dx;
  int dy;
  friend bool operator==(Displacement, Displacement) = default;
};

struct ActionSet {
  std::string name;
  std::vector<Displacement> moves;

  int size() const { return static_cast<int>(moves.size()); }
  /// North, East, West, South.
  static ActionSet news();
  /// North, South, North-East, South-West.
  static ActionSet skew();
  static ActionSet from_name(std::string_view name);
  void validate() const;
};

struct NoiseModel {
  /// Probability that the intended move is replaced by another action's move.
  double eta = 0.0;
};

struct StepResult {
  StateId next;
  double reward;
  /// The agent landed on a goal or reset cell; its next move returns it to start.
  bool episode_reset;
  bool goal;
};

/// Cell reached by applying `move` at s; obstacles and the border block.
StateId apply_move(const GridMap& map, StateId s, Displacement move);

/// One environment transition. Reset cells (goal, '*') send the agent to
/// start whatever the action; otherwise the intended move happens with
/// probability 1 - eta and a uniformly chosen other action's move otherwise.
StepResult step(const GridMap& map, const ActionSet& actions, const NoiseModel& noise, StateId s,
                ActionId a, CounterRng& rng);

/// Exact model of `step`, with the map's rewards and the given discount.
MdpModel true_model(const GridMap& map, const ActionSet& actions, const NoiseModel& noise,
                    double gamma);

/// Cells within one king move of s (s included) that lie inside the grid.
std::vector<StateId> neighborhood(const GridMap& map, StateId s);

/// Length of the shortest noise-free path from start to the nearest goal, or
/// -1 if no goal is reachable.
int shortest_path_length(const GridMap& map, const ActionSet& actions);

}  // namespace imitation
