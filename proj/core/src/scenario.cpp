#include "imitation/scenario.hpp"

#include <functional>
#include <map>
#include <stdexcept>

namespace imitation {

namespace detail {
const std::map<std::string, std::string>& embedded_maps();
}

const std::string& embedded_map(std::string_view name) {
  const auto& maps = detail::embedded_maps();
  const auto it = maps.find(std::string(name));
  if (it == maps.end()) throw std::invalid_argument("no embedded map named '" + std::string(name) + "'");
  return it->second;
}

std::vector<std::string> embedded_map_names() {
  std::vector<std::string> names;
  for (const auto& [name, text] : detail::embedded_maps()) names.push_back(name);
  return names;
}

namespace {

struct MentorEntry {
  std::string map;
  std::string actions;
  double eta;
};

struct Entry {
  std::string name;
  std::string summary;
  std::string map;
  std::string actions;
  double eta;
  double gamma;
  RewardSpec rewards;
  std::vector<MentorEntry> mentors;
  ScenarioDefaults defaults;
  std::function<void(const Scenario&)> check;
};

void require(bool ok, const std::string& scenario, const std::string& what) {
  if (!ok) throw std::logic_error("scenario " + scenario + ": " + what);
}

void check_maze(const Scenario& s) {
  require(s.map.width() == 25 && s.map.height() == 25, s.name, "maze must be 25x25");
  require(s.map.count(CellKind::Obstacle) == 286, s.name,
          "maze must hold 286 obstacles, found " + std::to_string(s.map.count(CellKind::Obstacle)));
  const int path = shortest_path_length(s.map, s.actions);
  require(path == 133, s.name, "maze shortest path must be 133, found " + std::to_string(path));
}

void check_islands(const Scenario& s) {
  const auto islands = s.map.cells_of(CellKind::Island);
  require(islands.size() == 4, s.name, "expected four islands");
  for (StateId i : islands) {
    const Coord c = s.map.coord(i);
    for (const Displacement d : {Displacement{0, -1}, {1, 0}, {-1, 0}, {0, 1}}) {
      const Coord n{c.x + d.dx, c.y + d.dy};
      require(s.map.in_bounds(n) && s.map.is_obstacle(s.map.index(n)), s.name,
              "island cells must be walled on all four sides");
    }
  }
}

void check_river(const Scenario& s) {
  require(s.map.count(CellKind::RiverPenalty) > 0, s.name, "river cells missing");
  for (int y = 0; y < s.map.height(); ++y) {
    int run = 0;
    for (int x = 0; x < s.map.width(); ++x) {
      if (s.map.cell(s.map.index({x, y})).kind == CellKind::RiverPenalty) ++run;
    }
    require(run == 3, s.name, "river must be three cells wide on every row");
  }
}

const std::vector<Entry>& catalogue() {
  static const std::vector<Entry> entries = [] {
    const RewardSpec basic{};
    std::vector<Entry> e;
    e.push_back({"exp1_basic", "10x10 open grid, start and goal in opposite corners",
                 "exp1_basic", "NEWS", 0.1, 0.9, basic, {{"exp1_basic", "NEWS", 0.1}},
                 ScenarioDefaults{18, 1.0, 0.9998, 0.0, 50000, 10}, nullptr});
    e.push_back({"exp2_scale", "13x13 open grid, start and goal in opposite corners",
                 "exp2_scale", "NEWS", 0.1, 0.9, basic, {{"exp2_scale", "NEWS", 0.1}},
                 ScenarioDefaults{24, 1.0, 0.9998, 0.0, 50000, 10}, nullptr});
    e.push_back({"exp2_stoch", "10x10 open grid with 40% action noise", "exp1_basic", "NEWS", 0.4,
                 0.9, basic, {{"exp1_basic", "NEWS", 0.4}},
                 ScenarioDefaults{18, 1.0, 0.9998, 0.0, 50000, 10}, nullptr});
    e.push_back({"exp3_islands", "10x10 grid with four walled +5 islands in the centre",
                 "exp3_islands", "NEWS", 0.1, 0.9, basic, {{"exp3_islands", "NEWS", 0.1}},
                 ScenarioDefaults{18, 1.0, 0.9998, 5.0, 20000, 10}, check_islands});
    e.push_back({"exp4_maze", "25x25 maze, 286 obstacles, 133-step solution", "exp4_maze", "NEWS",
                 0.1, 0.98, basic, {{"exp4_maze", "NEWS", 0.1}},
                 ScenarioDefaults{133, 0.1, 0.99999, 1.0, 200000, 10}, check_maze});
    e.push_back({"exp5_shortcut", "scenic route versus a shortcut lined with reset cells",
                 "exp5_shortcut", "NEWS", 0.1, 0.9, basic, {{"exp5_shortcut_mentor", "NEWS", 0.1}},
                 ScenarioDefaults{20, 1.0, 0.99995, 0.0, 100000, 10}, nullptr});
    e.push_back({"exp6_two_mentors", "two mentors covering different legs of the route",
                 "exp6_two_mentors", "NEWS", 0.1, 0.9, basic,
                 {{"exp6_mentor_a", "NEWS", 0.1}, {"exp6_mentor_b", "NEWS", 0.1}},
                 ScenarioDefaults{28, 0.1, 0.9999, 1.0, 50000, 10}, nullptr});
    e.push_back({"het1_skew", "NEWS mentor, Skew learners on an open 10x10 grid", "exp1_basic",
                 "Skew", 0.05, 0.9, basic, {{"exp1_basic", "NEWS", 0.05}},
                 ScenarioDefaults{27, 1.0, 0.99995, 5.0, 60000, 10, true, false, 3, 20, 0.05},
                 nullptr});
    e.push_back({"het2_obstacles", "learner-only obstacles across the mentor's path",
                 "het2_obstacles", "NEWS", 0.05, 0.9, basic, {{"exp1_basic", "NEWS", 0.05}},
                 ScenarioDefaults{18, 0.1, 0.9999, 1.0, 50000, 10, true, false, 3, 20, 0.05},
                 nullptr});
    e.push_back({"het3_parallel", "all but two mentor states blocked for the learner",
                 "het3_parallel", "NEWS", 0.05, 0.9, basic, {{"exp1_basic", "NEWS", 0.05}},
                 ScenarioDefaults{20, 0.1, 0.9999, 1.0, 50000, 10, true, false, 3, 20, 0.05},
                 nullptr});
    e.push_back({"river", "three-wide penalty river crossed by a NEWS mentor, Skew learners",
                 "river", "Skew", 0.05, 0.9, basic, {{"river", "NEWS", 0.05}},
                 ScenarioDefaults{20, 0.1, 0.9995, 1.0, 20000, 10, true, true, 3, 20, 0.05},
                 check_river});
    for (const std::string name : {"fracture_a", "fracture_b", "fracture_c", "fracture_d"}) {
      RewardSpec r = basic;
      r.river_penalty = -1.0;
      e.push_back({name, "loop corridors: mentor penalised below, observer above",
                   name + "_observer", "NEWS", 0.0, 0.9, r, {{name + "_mentor", "NEWS", 0.0}},
                   ScenarioDefaults{40, 0.01, 0.9995, 1.0, 20000, 10}, nullptr});
    }
    return e;
  }();
  return entries;
}

}  // namespace

std::vector<std::string> scenario_names() {
  std::vector<std::string> names;
  for (const auto& e : catalogue()) names.emplace_back(e.name);
  return names;
}

Scenario load_scenario(std::string_view name) {
  for (const auto& e : catalogue()) {
    if (name != e.name) continue;
    Scenario s;
    s.name = e.name;
    s.summary = e.summary;
    s.rewards = e.rewards;
    s.map = GridMap::parse(embedded_map(e.map), e.rewards);
    s.actions = ActionSet::from_name(e.actions);
    s.noise = NoiseModel{e.eta};
    s.gamma = e.gamma;
    s.defaults = e.defaults;
    for (const auto& m : e.mentors) {
      MentorSpec spec{GridMap::parse(embedded_map(m.map), e.rewards),
                      ActionSet::from_name(m.actions), NoiseModel{m.eta}};
      require(spec.map.width() == s.map.width() && spec.map.height() == s.map.height(), s.name,
              "mentor map dimensions differ from the observer's");
      s.mentors.push_back(std::move(spec));
    }
    require(s.map.count(CellKind::Goal) >= 1, s.name, "no goal cell");
    if (e.check) e.check(s);
    return s;
  }
  std::string known;
  for (const auto& n : scenario_names()) known += (known.empty() ? "" : ", ") + n;
  throw std::invalid_argument("unknown scenario '" + std::string(name) + "' (known: " + known + ")");
}

}  // namespace imitation
