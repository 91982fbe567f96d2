#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dre/geometry.hpp"

namespace dre::modes {

enum class Mode { Danger = 0, Replenish = 1, Explore = 2 };
inline constexpr std::array<Mode, 3> kAllModes = {Mode::Danger, Mode::Replenish, Mode::Explore};

enum class OpponentDistance { Short = 0, Medium = 1, Far = 2, None = 3 };
enum class Movement { Walk = 0, Run = 1, Stop = 2 };

// Joint low/critical resource code, in the order the Replenish table lists it.
enum class Levels { LA = 0, LH, LA_LH, CA, CH, CA_CH, CA_LH, LA_CH };

enum class DangerAction {
  ShootPrimary = 0,
  ShootSecondary,
  LastSeenOpponent,
  StopMovement,
  Dodge,
  Jump,
  FacePlayerOrTurn,
  ChangeWeapon,
};

enum class ReplenishAction {
  ShootPrimary = 0,
  ShootSecondary,
  Move,
  GoToPickup,
  RecordItem,
  GoToKnownItem,
  EscapeOpponent,
};

enum class ExploreAction { RunAround = 0, WalkAround, TurnLeft, TurnRight, StopMovement, Crouch };

inline constexpr std::size_t kDangerStates = 32;
inline constexpr std::size_t kReplenishStates = 64;
inline constexpr std::size_t kExploreStates = 6;
inline constexpr std::size_t kDangerActions = 8;
inline constexpr std::size_t kReplenishActions = 7;
inline constexpr std::size_t kExploreActions = 6;

// Percent thresholds; both are inclusive.
inline constexpr double kLowLevelPct = 40.0;
inline constexpr double kCriticalLevelPct = 20.0;

inline constexpr int kPrimaryAmmoCost = 1;
inline constexpr int kSecondaryAmmoCost = 3;

std::size_t state_count(Mode mode);
std::size_t action_count(Mode mode);

std::string_view mode_name(Mode mode);
std::string_view distance_name(OpponentDistance d);
std::string_view movement_name(Movement m);
std::string_view levels_name(Levels l);
std::string_view action_name(Mode mode, std::size_t index);

struct ActionId {
  Mode mode = Mode::Explore;
  std::size_t index = 0;

  std::string_view name() const { return action_name(mode, index); }
  bool is(DangerAction a) const {
    return mode == Mode::Danger && index == static_cast<std::size_t>(a);
  }
  bool is(ReplenishAction a) const {
    return mode == Mode::Replenish && index == static_cast<std::size_t>(a);
  }
  bool is(ExploreAction a) const {
    return mode == Mode::Explore && index == static_cast<std::size_t>(a);
  }
  friend bool operator==(const ActionId&, const ActionId&) = default;
};

// One tick of decoded world checks for a single bot.
struct Perception {
  bool being_hit = false;
  bool bumping = false;
  bool hearing_noise = false;
  OpponentDistance opponent_distance = OpponentDistance::None;
  bool see_enemy = false;
  bool see_pickup = false;
  bool hear_pickup = false;
  double health_pct = 100.0;
  double ammo_pct = 100.0;
  int ammo_rounds = 100;
  Movement movement = Movement::Stop;
  bool crouched = false;
  std::optional<int> visible_opponent;
  std::optional<Cell> opponent_cell;
  std::optional<int> visible_pickup;
  std::optional<Cell> pickup_cell;
};

// Throws std::invalid_argument when the distance/visibility pairing or the
// percentage ranges are inconsistent.
void validate(const Perception& p);

// Locations remembered across lives within one game.
struct BotMemory {
  static constexpr std::size_t kMaxKnownItems = 8;

  std::optional<Cell> last_seen_opponent;
  std::vector<Cell> known_items;

  void record_item(Cell c);
};

Mode select_mode(const Perception& p);

std::optional<Levels> try_derive_levels(double ammo_pct, double health_pct);
Levels derive_levels(double ammo_pct, double health_pct);

std::size_t encode_danger(const Perception& p);
std::size_t encode_replenish(const Perception& p);
std::size_t encode_explore(const Perception& p);
std::size_t encode_state(Mode mode, const Perception& p);

// Human-readable state label built from the check names, e.g.
// "SeeEnemy=True;SeePickup=False;HearPickup=False;Levels=LA&CH".
std::string describe_state(Mode mode, std::size_t index);

// Action indices allowed for `mode`, ascending. Never empty.
std::vector<std::size_t> legal_actions(Mode mode, const Perception& p, const BotMemory& memory);

// Reward checks, in reward-table order.
enum class RewardCheck {
  IsHealthy = 0,
  IsNotHealthy,
  IsNotColliding,
  IsColliding,
  IsMoving,
  IsNotMoving,
  SeeOpposingPlayer,
  IsCausingDamage,
  IsBeingDamaged,
  KilledOpponent,
  KilledByOpponent,
  PickedUpItem,
  GainedAdrenaline,
};
inline constexpr std::size_t kRewardCheckCount = 13;

// Reward values in units of 1e-5 so sums are exact.
inline constexpr std::int64_t kRewardScale = 100000;
inline constexpr std::array<std::int64_t, kRewardCheckCount> kRewardScaled = {
    10, -10, 1, -1, 1, -1, 10, 10000, -10000, 100000, -100000, 10000, 20000};

std::string_view reward_check_name(RewardCheck c);

inline double scaled_to_real(std::int64_t scaled) {
  return static_cast<double>(scaled) / static_cast<double>(kRewardScale);
}

// Raw per-tick observations; the mutually exclusive reward pairs are derived
// from the first three fields.
struct RewardInputs {
  bool healthy = true;
  bool colliding = false;
  bool moving = false;
  bool see_opponent = false;
  bool causing_damage = false;
  bool being_damaged = false;
  bool killed_opponent = false;
  bool killed_by_opponent = false;
  bool picked_up_item = false;
  bool gained_adrenaline = false;
};

struct RewardBreakdown {
  std::array<bool, kRewardCheckCount> flags{};
  std::int64_t total_scaled = 0;

  bool has(RewardCheck c) const { return flags[static_cast<std::size_t>(c)]; }
  double total() const { return scaled_to_real(total_scaled); }
};

RewardBreakdown compute_reward(const RewardInputs& in);

}  // namespace dre::modes
