#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dre/geometry.hpp"
#include "dre/modes.hpp"
#include "dre/rng.hpp"

namespace dre::arena {

using modes::Movement;
using modes::OpponentDistance;

enum class PickupKind { Health, Ammo, Adrenaline };

struct FireMode {
  int damage = 10;
  // Hit probability for the short, medium and far distance buckets.
  std::array<double, 3> hit = {0.7, 0.4, 0.15};
};

struct WeaponProfile {
  FireMode primary;
  FireMode secondary;
};

struct PickupSpawn {
  Cell cell;
  PickupKind kind = PickupKind::Health;
};

struct ArenaConfig {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> walls;  // row-major, 1 = wall
  std::vector<PickupSpawn> pickups;
  std::vector<Cell> spawn_points;
  std::vector<Cell> patrol_route;

  int respawn_delay = 5;
  int pickup_respawn_delay = 20;
  std::optional<std::int64_t> tick_limit;
  int max_health = 100;
  int max_ammo = 100;
  int health_pickup_amount = 25;
  int ammo_pickup_amount = 40;
  int spree_kills = 3;

  // Distance buckets: short <= short_range, medium <= medium_range, far beyond.
  double short_range = 5.0;
  double medium_range = 15.0;
  double hearing_radius = 8.0;

  // Multipliers on incoming hit probability.
  double jump_evasion = 0.5;
  double dodge_evasion = 0.5;
  double crouch_evasion = 0.75;
  // Multiplier on the scripted opponents' own hit probability.
  double script_accuracy = 1.0;

  // Slot 0 is the fast/weak profile, slot 1 the slow/strong one.
  std::array<WeaponProfile, 2> weapons;

  bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width && c.y < height; }
  bool is_wall(Cell c) const {
    return !in_bounds(c) || walls[static_cast<std::size_t>(c.y * width + c.x)] != 0;
  }
  std::size_t cell_index(Cell c) const { return static_cast<std::size_t>(c.y * width + c.x); }

  // Throws std::invalid_argument describing the first violated constraint.
  void validate() const;
};

// ASCII layout: '#' wall, '.' floor, 'H'/'A'/'D' health/ammo/adrenaline
// pickups, 'S' player spawns. Rows must have equal length.
void load_map(ArenaConfig& cfg, std::string_view ascii);
std::string default_map();
ArenaConfig default_config();

// Applies one `key = value` setting. Returns false for keys that are not
// arena settings; throws std::invalid_argument on bad values. Relative
// `map` paths resolve against `base_dir`.
bool apply_arena_key(ArenaConfig& cfg, std::string_view key, std::string_view value,
                     const std::string& base_dir = ".");

enum class Controller { Learner, Patroller, Hunter };

std::string_view controller_name(Controller c);
Controller parse_controller(std::string_view name);

struct EntityState {
  int id = 0;
  Controller controller = Controller::Learner;
  Cell position;
  Direction facing = Direction::N;
  int health = 0;
  int ammo = 0;
  Movement movement = Movement::Stop;
  bool crouched = false;
  bool alive = false;
  int weapon = 0;
  int kills = 0;
  int deaths = 0;
  int adrenaline = 0;
  int kills_this_life = 0;
  std::int64_t respawn_at = 0;
};

struct EntityEvents {
  bool dealt_damage = false;
  bool took_damage = false;
  bool killed = false;
  bool died = false;
  bool picked_item = false;
  bool gained_adrenaline = false;
  bool collided = false;
  bool moved = false;
  bool saw_enemy = false;
  bool heard_noise = false;
  bool heard_pickup = false;
  bool fired = false;
  bool respawned = false;
  friend bool operator==(const EntityEvents&, const EntityEvents&) = default;
};

struct ArenaEvents {
  std::int64_t tick = 0;
  std::vector<EntityEvents> entities;
  friend bool operator==(const ArenaEvents&, const ArenaEvents&) = default;
};

enum class Fire { None, Primary, Secondary };

// What an entity tries to do during one tick. Unset fields leave the
// persistent state (facing, movement mode, crouch) unchanged.
struct Intent {
  std::optional<Direction> face;
  std::optional<Movement> movement;
  std::optional<bool> crouch;
  std::optional<Cell> path_target;     // one shortest-path step towards
  std::optional<Direction> side_step;  // one-cell move, facing kept
  bool hold = false;                   // skip the persistent heading move
  bool evade = false;
  bool toggle_weapon = false;
  Fire fire = Fire::None;
  int target = -1;
  friend bool operator==(const Intent&, const Intent&) = default;
};

struct PickupState {
  PickupSpawn spawn;
  bool available = true;
  std::int64_t respawn_at = 0;
};

// Shortest-path distances between every pair of floor cells
// (8-connected, no cutting past wall corners).
class Navigation {
 public:
  explicit Navigation(const ArenaConfig& cfg);

  static constexpr int kUnreachable = 0xFFFF;

  int distance(Cell from, Cell to) const;
  // Neighbour of `from` one step closer to `to`; nullopt when already there
  // or unreachable. Ties go to the lowest direction index.
  std::optional<Cell> next_step(Cell from, Cell to) const;
  bool can_step(Cell from, Direction d) const;

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> walls_;
  bool is_wall(Cell c) const;
  std::size_t cells_;
  std::vector<std::uint16_t> dist_;  // [to * cells + from]
};

// Cells strictly between a and b on the discrete line joining them.
std::vector<Cell> line_between(Cell a, Cell b);

// Deterministic deathmatch arena on a grid.
class Arena {
 public:
  Arena(ArenaConfig cfg, std::vector<Controller> controllers, std::uint64_t seed);

  const ArenaConfig& config() const { return *cfg_; }
  const Navigation& navigation() const { return *nav_; }
  std::int64_t tick() const { return tick_; }
  const std::vector<EntityState>& entities() const { return entities_; }
  const EntityState& entity(int id) const;
  EntityState& mutable_entity(int id);
  const std::vector<PickupState>& pickups() const { return pickups_; }
  std::vector<PickupState>& mutable_pickups() { return pickups_; }
  Rng& rng() { return rng_; }

  bool line_of_sight(Cell a, Cell b) const;
  // Line of sight plus the target lying in the viewer's facing half-plane.
  bool can_see(const EntityState& viewer, Cell target) const;
  OpponentDistance bucket(double dist) const;
  std::optional<int> nearest_visible_enemy(int id) const;

  modes::Perception perceive(int id) const;

  // Translates a mode action into an intent. `p` must be the perception the
  // decision was made on. Throws std::invalid_argument("illegal action")
  // when the action is not legal for that perception and memory.
  Intent apply_action(int id, modes::ActionId action, const modes::Perception& p,
                      const modes::BotMemory& memory, Rng& rng) const;

  // Intent for a scripted opponent; updates that script's own memory.
  Intent scripted_intent(int id, Rng& rng);

  // Advances one tick. Entities without an intent keep their persistent
  // movement. Throws std::out_of_range for an unknown entity id.
  ArenaEvents step(const std::map<int, Intent>& intents);

  void respawn(int id);

 private:
  struct ScriptMemory {
    std::size_t waypoint = 0;
    std::optional<Cell> last_seen_enemy;
    std::optional<Cell> wander_target;
  };
  struct Noise {
    int source;
    Cell cell;
  };

  bool occupied(Cell c, int except) const;
  bool heard(int id, const std::vector<Noise>& noises) const;
  std::optional<Cell> nearest_pickup(Cell from, PickupKind kind) const;
  void move_entity(EntityState& e, const Intent* intent, EntityEvents& ev);
  Intent patroller_intent(int id);
  Intent hunter_intent(int id, Rng& rng);

  std::shared_ptr<const ArenaConfig> cfg_;
  std::shared_ptr<const Navigation> nav_;
  Rng rng_;
  std::int64_t tick_ = 0;
  std::vector<EntityState> entities_;
  std::vector<PickupState> pickups_;
  std::vector<ScriptMemory> scripts_;
  std::vector<EntityEvents> last_events_;
  std::vector<int> last_attacker_;
  std::vector<Noise> last_shots_;
  std::vector<Noise> last_pickups_;
};

}  // namespace dre::arena
