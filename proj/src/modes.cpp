#include "dre/modes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dre::modes {

namespace {

constexpr std::array<std::string_view, kDangerActions> kDangerNames = {
    "ShootPrimary", "ShootSecondary", "LastSeenOpponent", "StopMovement",
    "Dodge",        "Jump",           "FacePlayerOrTurn", "ChangeWeapon"};
constexpr std::array<std::string_view, kReplenishActions> kReplenishNames = {
    "ShootPrimary", "ShootSecondary", "Move",          "GoToPickup",
    "RecordItem",   "GoToKnownItem",  "EscapeOpponent"};
constexpr std::array<std::string_view, kExploreActions> kExploreNames = {
    "RunAround", "WalkAround", "TurnLeft", "TurnRight", "StopMovement", "Crouch"};
constexpr std::array<std::string_view, 8> kLevelNames = {"LA", "LH",    "LA&LH", "CA",
                                                         "CH", "CA&CH", "CA&LH", "LA&CH"};
constexpr std::array<std::string_view, kRewardCheckCount> kRewardNames = {
    "isHealthy",       "isNotHealthy",   "isNotColliding",   "isColliding",   "isMoving",
    "isNotMoving",     "seeOpposingPlayer", "isCausingDamage", "isBeingDamaged",
    "killedOpponent",  "killedByOpponent",  "pickedUpItem",    "gainedAdrenaline"};

std::string_view bool_name(bool b) { return b ? "True" : "False"; }

std::size_t bit(bool b) { return b ? 1 : 0; }

// 0 = none, 1 = low, 2 = critical
int level_class(double pct) {
  if (pct <= kCriticalLevelPct) return 2;
  if (pct <= kLowLevelPct) return 1;
  return 0;
}

}  // namespace

std::size_t state_count(Mode mode) {
  switch (mode) {
    case Mode::Danger: return kDangerStates;
    case Mode::Replenish: return kReplenishStates;
    case Mode::Explore: return kExploreStates;
  }
  throw std::invalid_argument("bad mode");
}

std::size_t action_count(Mode mode) {
  switch (mode) {
    case Mode::Danger: return kDangerActions;
    case Mode::Replenish: return kReplenishActions;
    case Mode::Explore: return kExploreActions;
  }
  throw std::invalid_argument("bad mode");
}

std::string_view mode_name(Mode mode) {
  switch (mode) {
    case Mode::Danger: return "Danger";
    case Mode::Replenish: return "Replenish";
    case Mode::Explore: return "Explore";
  }
  return "?";
}

std::string_view distance_name(OpponentDistance d) {
  switch (d) {
    case OpponentDistance::Short: return "short";
    case OpponentDistance::Medium: return "medium";
    case OpponentDistance::Far: return "far";
    case OpponentDistance::None: return "no";
  }
  return "?";
}

std::string_view movement_name(Movement m) {
  switch (m) {
    case Movement::Walk: return "Walk";
    case Movement::Run: return "Run";
    case Movement::Stop: return "Stop";
  }
  return "?";
}

std::string_view levels_name(Levels l) { return kLevelNames.at(static_cast<std::size_t>(l)); }

std::string_view action_name(Mode mode, std::size_t index) {
  switch (mode) {
    case Mode::Danger: return kDangerNames.at(index);
    case Mode::Replenish: return kReplenishNames.at(index);
    case Mode::Explore: return kExploreNames.at(index);
  }
  throw std::invalid_argument("bad mode");
}

std::string_view reward_check_name(RewardCheck c) {
  return kRewardNames.at(static_cast<std::size_t>(c));
}

void validate(const Perception& p) {
  if ((p.opponent_distance == OpponentDistance::None) == p.see_enemy) {
    throw std::invalid_argument("perception: distance 'no' must match see_enemy=false");
  }
  auto pct_ok = [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 100.0; };
  if (!pct_ok(p.health_pct) || !pct_ok(p.ammo_pct)) {
    throw std::invalid_argument("perception: percentage out of range");
  }
}

void BotMemory::record_item(Cell c) {
  if (std::find(known_items.begin(), known_items.end(), c) != known_items.end()) return;
  if (known_items.size() == kMaxKnownItems) known_items.erase(known_items.begin());
  known_items.push_back(c);
}

Mode select_mode(const Perception& p) {
  if (p.ammo_pct <= kLowLevelPct || p.health_pct <= kLowLevelPct) return Mode::Replenish;
  if (p.see_enemy || p.being_hit) return Mode::Danger;
  return Mode::Explore;
}

std::optional<Levels> try_derive_levels(double ammo_pct, double health_pct) {
  const int ammo = level_class(ammo_pct);
  const int health = level_class(health_pct);
  // Indexed [ammo][health]; (0,0) has no code.
  static constexpr std::optional<Levels> kTable[3][3] = {
      {std::nullopt, Levels::LH, Levels::CH},
      {Levels::LA, Levels::LA_LH, Levels::LA_CH},
      {Levels::CA, Levels::CA_LH, Levels::CA_CH},
  };
  return kTable[ammo][health];
}

Levels derive_levels(double ammo_pct, double health_pct) {
  auto levels = try_derive_levels(ammo_pct, health_pct);
  if (!levels) throw std::invalid_argument("no replenish level");
  return *levels;
}

std::size_t encode_danger(const Perception& p) {
  return bit(p.being_hit) * 16 + bit(p.bumping) * 8 + bit(p.hearing_noise) * 4 +
         static_cast<std::size_t>(p.opponent_distance);
}

std::size_t encode_replenish(const Perception& p) {
  const Levels levels = derive_levels(p.ammo_pct, p.health_pct);
  return bit(p.see_enemy) * 32 + bit(p.see_pickup) * 16 + bit(p.hear_pickup) * 8 +
         static_cast<std::size_t>(levels);
}

std::size_t encode_explore(const Perception& p) {
  return static_cast<std::size_t>(p.movement) * 2 + bit(p.crouched);
}

std::size_t encode_state(Mode mode, const Perception& p) {
  switch (mode) {
    case Mode::Danger: return encode_danger(p);
    case Mode::Replenish: return encode_replenish(p);
    case Mode::Explore: return encode_explore(p);
  }
  throw std::invalid_argument("bad mode");
}

std::string describe_state(Mode mode, std::size_t index) {
  if (index >= state_count(mode)) throw std::out_of_range("bad state index");
  std::string out;
  auto add = [&out](std::string_view key, std::string_view value) {
    if (!out.empty()) out += ';';
    out += key;
    out += '=';
    out += value;
  };
  switch (mode) {
    case Mode::Danger:
      add("BeingHit", bool_name(index & 16));
      add("Bumping", bool_name(index & 8));
      add("HearingNoise", bool_name(index & 4));
      add("Distance", distance_name(static_cast<OpponentDistance>(index % 4)));
      break;
    case Mode::Replenish:
      add("SeeEnemy", bool_name(index & 32));
      add("SeePickup", bool_name(index & 16));
      add("HearPickup", bool_name(index & 8));
      add("Levels", levels_name(static_cast<Levels>(index % 8)));
      break;
    case Mode::Explore:
      add("Movement", movement_name(static_cast<Movement>(index / 2)));
      add("Crouched", bool_name(index % 2));
      break;
  }
  return out;
}

std::vector<std::size_t> legal_actions(Mode mode, const Perception& p, const BotMemory& memory) {
  const bool opponent = p.visible_opponent.has_value();
  const bool can_primary = opponent && p.ammo_rounds >= kPrimaryAmmoCost;
  const bool can_secondary = opponent && p.ammo_rounds >= kSecondaryAmmoCost;
  const bool pickup = p.visible_pickup.has_value();

  std::vector<std::size_t> legal;
  legal.reserve(action_count(mode));
  auto allow = [&legal](auto action, bool ok) {
    if (ok) legal.push_back(static_cast<std::size_t>(action));
  };
  switch (mode) {
    case Mode::Danger:
      allow(DangerAction::ShootPrimary, can_primary);
      allow(DangerAction::ShootSecondary, can_secondary);
      allow(DangerAction::LastSeenOpponent, memory.last_seen_opponent.has_value());
      allow(DangerAction::StopMovement, true);
      allow(DangerAction::Dodge, true);
      allow(DangerAction::Jump, true);
      allow(DangerAction::FacePlayerOrTurn, true);
      allow(DangerAction::ChangeWeapon, true);
      break;
    case Mode::Replenish:
      allow(ReplenishAction::ShootPrimary, can_primary);
      allow(ReplenishAction::ShootSecondary, can_secondary);
      allow(ReplenishAction::Move, true);
      allow(ReplenishAction::GoToPickup, pickup);
      allow(ReplenishAction::RecordItem, pickup);
      allow(ReplenishAction::GoToKnownItem, !memory.known_items.empty());
      allow(ReplenishAction::EscapeOpponent, true);
      break;
    case Mode::Explore:
      for (std::size_t i = 0; i < kExploreActions; ++i) legal.push_back(i);
      break;
  }
  return legal;
}

RewardBreakdown compute_reward(const RewardInputs& in) {
  RewardBreakdown out;
  auto set = [&out](RewardCheck c, bool v) { out.flags[static_cast<std::size_t>(c)] = v; };
  set(RewardCheck::IsHealthy, in.healthy);
  set(RewardCheck::IsNotHealthy, !in.healthy);
  set(RewardCheck::IsNotColliding, !in.colliding);
  set(RewardCheck::IsColliding, in.colliding);
  set(RewardCheck::IsMoving, in.moving);
  set(RewardCheck::IsNotMoving, !in.moving);
  set(RewardCheck::SeeOpposingPlayer, in.see_opponent);
  set(RewardCheck::IsCausingDamage, in.causing_damage);
  set(RewardCheck::IsBeingDamaged, in.being_damaged);
  set(RewardCheck::KilledOpponent, in.killed_opponent);
  set(RewardCheck::KilledByOpponent, in.killed_by_opponent);
  set(RewardCheck::PickedUpItem, in.picked_up_item);
  set(RewardCheck::GainedAdrenaline, in.gained_adrenaline);
  for (std::size_t i = 0; i < kRewardCheckCount; ++i) {
    if (out.flags[i]) out.total_scaled += kRewardScaled[i];
  }
  return out;
}

}  // namespace dre::modes
