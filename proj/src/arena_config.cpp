#include <fstream>
#include <sstream>
#include <stdexcept>

#include "dre/arena.hpp"
#include "dre/config.hpp"

namespace dre::arena {

namespace {

constexpr std::string_view kDefaultMap =
    "####################\n"
    "#........H.........#\n"
    "#..................#\n"
    "#..##..........##..#\n"
    "#..##....A.....##..#\n"
    "#....S........S....#\n"
    "#.......#..#.......#\n"
    "#..D....#..#....A..#\n"
    "#.......#..#.......#\n"
    "#..................#\n"
    "#..................#\n"
    "#.......#..#.......#\n"
    "#..A....#..#....D..#\n"
    "#.......#..#.......#\n"
    "#....S........S....#\n"
    "#..##....H.....##..#\n"
    "#..##..........##..#\n"
    "#..................#\n"
    "#.........H........#\n"
    "####################\n";

std::array<double, 3> parse_hit(std::string_view value, std::string_view key) {
  const auto v = config::parse_double_list(value, key);
  if (v.size() != 3) throw std::invalid_argument(std::string(key) + " needs 3 values");
  for (double p : v) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument(std::string(key) + " out of [0,1]");
  }
  return {v[0], v[1], v[2]};
}

int parse_positive(std::string_view value, std::string_view key, int min = 1) {
  const auto v = config::parse_int(value, key);
  if (v < min || v > 1'000'000) throw std::invalid_argument(std::string(key) + " out of range");
  return static_cast<int>(v);
}

double parse_fraction(std::string_view value, std::string_view key) {
  const double v = config::parse_double(value, key);
  if (v < 0.0 || v > 1.0) throw std::invalid_argument(std::string(key) + " out of [0,1]");
  return v;
}

}  // namespace

std::string default_map() { return std::string(kDefaultMap); }

void load_map(ArenaConfig& cfg, std::string_view ascii) {
  std::vector<std::string_view> rows;
  for (auto row : config::split(ascii, '\n')) {
    if (!row.empty() && row.back() == '\r') row.remove_suffix(1);
    if (!row.empty()) rows.push_back(row);
  }
  if (rows.empty()) throw std::invalid_argument("map: empty layout");
  const int width = static_cast<int>(rows.front().size());
  const int height = static_cast<int>(rows.size());
  cfg.width = width;
  cfg.height = height;
  cfg.walls.assign(static_cast<std::size_t>(width * height), 0);
  cfg.pickups.clear();
  cfg.spawn_points.clear();
  for (int y = 0; y < height; ++y) {
    if (static_cast<int>(rows[y].size()) != width) {
      throw std::invalid_argument("map: row " + std::to_string(y) + " has a different width");
    }
    for (int x = 0; x < width; ++x) {
      const Cell c{x, y};
      switch (rows[y][x]) {
        case '#': cfg.walls[cfg.cell_index(c)] = 1; break;
        case '.': break;
        case 'H': cfg.pickups.push_back({c, PickupKind::Health}); break;
        case 'A': cfg.pickups.push_back({c, PickupKind::Ammo}); break;
        case 'D': cfg.pickups.push_back({c, PickupKind::Adrenaline}); break;
        case 'S': cfg.spawn_points.push_back(c); break;
        default:
          throw std::invalid_argument("map: unknown cell '" + std::string(1, rows[y][x]) +
                                      "' at " + std::to_string(x) + "," + std::to_string(y));
      }
    }
  }
}

ArenaConfig default_config() {
  ArenaConfig cfg;
  load_map(cfg, kDefaultMap);
  cfg.patrol_route = {{2, 2}, {17, 2}, {17, 17}, {2, 17}};
  cfg.script_accuracy = 0.35;
  cfg.weapons[0].primary = {10, {0.7, 0.4, 0.15}};
  cfg.weapons[0].secondary = {25, {0.5, 0.25, 0.05}};
  cfg.weapons[1].primary = {18, {0.45, 0.35, 0.2}};
  cfg.weapons[1].secondary = {40, {0.35, 0.2, 0.08}};
  return cfg;
}

void ArenaConfig::validate() const {
  if (width <= 0 || height <= 0) throw std::invalid_argument("arena: empty map");
  if (walls.size() != static_cast<std::size_t>(width * height)) {
    throw std::invalid_argument("arena: wall mask size mismatch");
  }
  if (spawn_points.empty()) throw std::invalid_argument("arena: no spawn points");
  for (const auto& s : spawn_points) {
    if (is_wall(s)) throw std::invalid_argument("arena: spawn point on a wall");
  }
  for (const auto& p : pickups) {
    if (is_wall(p.cell)) throw std::invalid_argument("arena: pickup on a wall");
  }
  for (const auto& w : patrol_route) {
    if (is_wall(w)) throw std::invalid_argument("arena: patrol waypoint on a wall");
  }
  if (!(short_range > 0.0 && short_range < medium_range)) {
    throw std::invalid_argument("arena: distance buckets must be strictly ordered");
  }
  if (max_health <= 0 || max_ammo <= 0) throw std::invalid_argument("arena: bad maxima");
  if (respawn_delay < 1) throw std::invalid_argument("arena: respawn_delay must be >= 1");
  if (hearing_radius < 0.0) throw std::invalid_argument("arena: negative hearing radius");
}

bool apply_arena_key(ArenaConfig& cfg, std::string_view key, std::string_view value,
                     const std::string& base_dir) {
  if (key == "map") {
    std::string path(value);
    if (!path.empty() && path.front() != '/') path = base_dir + "/" + path;
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read map file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    load_map(cfg, ss.str());
    return true;
  }
  if (key == "respawn_delay") cfg.respawn_delay = parse_positive(value, key);
  else if (key == "pickup_respawn_delay") cfg.pickup_respawn_delay = parse_positive(value, key);
  else if (key == "tick_limit") cfg.tick_limit = parse_positive(value, key);
  else if (key == "max_health") cfg.max_health = parse_positive(value, key);
  else if (key == "max_ammo") cfg.max_ammo = parse_positive(value, key);
  else if (key == "health_pickup_amount") cfg.health_pickup_amount = parse_positive(value, key);
  else if (key == "ammo_pickup_amount") cfg.ammo_pickup_amount = parse_positive(value, key);
  else if (key == "spree_kills") cfg.spree_kills = parse_positive(value, key);
  else if (key == "short_range") cfg.short_range = config::parse_double(value, key);
  else if (key == "medium_range") cfg.medium_range = config::parse_double(value, key);
  else if (key == "hearing_radius") cfg.hearing_radius = config::parse_double(value, key);
  else if (key == "jump_evasion") cfg.jump_evasion = parse_fraction(value, key);
  else if (key == "dodge_evasion") cfg.dodge_evasion = parse_fraction(value, key);
  else if (key == "crouch_evasion") cfg.crouch_evasion = parse_fraction(value, key);
  else if (key == "script_accuracy") cfg.script_accuracy = parse_fraction(value, key);
  else if (key == "patrol_route") cfg.patrol_route = config::parse_cell_list(value, key);
  else if (key.starts_with("weapon")) {
    // weapon<slot>_<primary|secondary>_<damage|hit>
    const auto parts = config::split(key, '_');
    if (parts.size() != 3 || (parts[0] != "weapon0" && parts[0] != "weapon1")) return false;
    auto& weapon = cfg.weapons[parts[0] == "weapon0" ? 0 : 1];
    FireMode* mode = nullptr;
    if (parts[1] == "primary") mode = &weapon.primary;
    else if (parts[1] == "secondary") mode = &weapon.secondary;
    else return false;
    if (parts[2] == "damage") mode->damage = parse_positive(value, key);
    else if (parts[2] == "hit") mode->hit = parse_hit(value, key);
    else return false;
  } else {
    return false;
  }
  return true;
}

std::string_view controller_name(Controller c) {
  switch (c) {
    case Controller::Learner: return "dre";
    case Controller::Patroller: return "patroller";
    case Controller::Hunter: return "hunter";
  }
  return "?";
}

Controller parse_controller(std::string_view name) {
  if (name == "patroller") return Controller::Patroller;
  if (name == "hunter") return Controller::Hunter;
  if (name == "dre") return Controller::Learner;
  throw std::invalid_argument("unknown opponent strategy: " + std::string(name));
}

}  // namespace dre::arena
