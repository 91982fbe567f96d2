#include "dre/arena.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <stdexcept>

namespace dre::arena {

namespace {

std::optional<Direction> direction_of(int dx, int dy) {
  for (int i = 0; i < 8; ++i) {
    if (kDirectionDelta[i].x == dx && kDirectionDelta[i].y == dy) return static_cast<Direction>(i);
  }
  return std::nullopt;
}

bool contains(const std::vector<std::size_t>& v, std::size_t x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

const FireMode& fire_mode(const ArenaConfig& cfg, const EntityState& e, Fire fire) {
  const auto& weapon = cfg.weapons[static_cast<std::size_t>(e.weapon)];
  return fire == Fire::Secondary ? weapon.secondary : weapon.primary;
}

int ammo_cost(Fire fire) {
  return fire == Fire::Secondary ? modes::kSecondaryAmmoCost : modes::kPrimaryAmmoCost;
}

}  // namespace

// --- Navigation ------------------------------------------------------------

Navigation::Navigation(const ArenaConfig& cfg)
    : width_(cfg.width),
      height_(cfg.height),
      walls_(cfg.walls),
      cells_(static_cast<std::size_t>(cfg.width * cfg.height)),
      dist_(cells_ * cells_, kUnreachable) {
  std::vector<int> queue;
  queue.reserve(cells_);
  for (std::size_t t = 0; t < cells_; ++t) {
    const Cell target{static_cast<int>(t) % width_, static_cast<int>(t) / width_};
    if (is_wall(target)) continue;
    std::uint16_t* row = &dist_[t * cells_];
    row[t] = 0;
    queue.clear();
    queue.push_back(static_cast<int>(t));
    // Moves are symmetric, so a BFS outward from the target yields distances
    // from every cell to it.
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const Cell c{queue[head] % width_, queue[head] / width_};
      const std::uint16_t d = row[queue[head]];
      for (int i = 0; i < 8; ++i) {
        const auto dir = static_cast<Direction>(i);
        if (!can_step(c, dir)) continue;
        const Cell n = step(c, dir);
        const std::size_t ni = static_cast<std::size_t>(n.y * width_ + n.x);
        if (row[ni] != kUnreachable) continue;
        row[ni] = static_cast<std::uint16_t>(d + 1);
        queue.push_back(static_cast<int>(ni));
      }
    }
  }
}

bool Navigation::is_wall(Cell c) const {
  if (c.x < 0 || c.y < 0 || c.x >= width_ || c.y >= height_) return true;
  return walls_[static_cast<std::size_t>(c.y * width_ + c.x)] != 0;
}

bool Navigation::can_step(Cell from, Direction d) const {
  const Cell dd = delta(d);
  const Cell to{from.x + dd.x, from.y + dd.y};
  if (is_wall(to)) return false;
  if (dd.x != 0 && dd.y != 0) {
    return !is_wall({from.x + dd.x, from.y}) && !is_wall({from.x, from.y + dd.y});
  }
  return true;
}

int Navigation::distance(Cell from, Cell to) const {
  if (is_wall(from) || is_wall(to)) return kUnreachable;
  const auto fi = static_cast<std::size_t>(from.y * width_ + from.x);
  const auto ti = static_cast<std::size_t>(to.y * width_ + to.x);
  return dist_[ti * cells_ + fi];
}

std::optional<Cell> Navigation::next_step(Cell from, Cell to) const {
  const int d = distance(from, to);
  if (d == 0 || d == kUnreachable) return std::nullopt;
  for (int i = 0; i < 8; ++i) {
    const auto dir = static_cast<Direction>(i);
    if (!can_step(from, dir)) continue;
    const Cell n = step(from, dir);
    if (distance(n, to) == d - 1) return n;
  }
  return std::nullopt;
}

std::vector<Cell> line_between(Cell a, Cell b) {
  // Walk from the smaller endpoint so the line is the same in both directions.
  if (b < a) std::swap(a, b);
  std::vector<Cell> cells;
  const int dx = std::abs(b.x - a.x);
  const int dy = -std::abs(b.y - a.y);
  const int sx = a.x < b.x ? 1 : -1;
  const int sy = a.y < b.y ? 1 : -1;
  int err = dx + dy;
  Cell c = a;
  while (!(c == b)) {
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      c.x += sx;
    }
    if (e2 <= dx) {
      err += dx;
      c.y += sy;
    }
    if (!(c == b)) cells.push_back(c);
  }
  return cells;
}

// --- Arena -----------------------------------------------------------------

Arena::Arena(ArenaConfig cfg, std::vector<Controller> controllers, std::uint64_t seed)
    : rng_(seed) {
  cfg.validate();
  if (controllers.empty()) throw std::invalid_argument("arena: no entities");
  if (cfg.patrol_route.empty()) cfg.patrol_route = cfg.spawn_points;
  cfg_ = std::make_shared<const ArenaConfig>(std::move(cfg));
  nav_ = std::make_shared<const Navigation>(*cfg_);
  for (std::size_t i = 0; i < controllers.size(); ++i) {
    EntityState e;
    e.id = static_cast<int>(i);
    e.controller = controllers[i];
    entities_.push_back(e);
  }
  for (const auto& spawn : cfg_->pickups) pickups_.push_back({spawn, true, 0});
  scripts_.resize(entities_.size());
  last_events_.resize(entities_.size());
  last_attacker_.assign(entities_.size(), -1);
  for (auto& e : entities_) respawn(e.id);
}

const EntityState& Arena::entity(int id) const {
  if (id < 0 || id >= static_cast<int>(entities_.size())) throw std::out_of_range("unknown entity");
  return entities_[static_cast<std::size_t>(id)];
}

EntityState& Arena::mutable_entity(int id) {
  if (id < 0 || id >= static_cast<int>(entities_.size())) throw std::out_of_range("unknown entity");
  return entities_[static_cast<std::size_t>(id)];
}

bool Arena::line_of_sight(Cell a, Cell b) const {
  for (const Cell c : line_between(a, b)) {
    if (cfg_->is_wall(c)) return false;
  }
  return true;
}

bool Arena::can_see(const EntityState& viewer, Cell target) const {
  const Cell f = delta(viewer.facing);
  const int dot = f.x * (target.x - viewer.position.x) + f.y * (target.y - viewer.position.y);
  return dot >= 0 && line_of_sight(viewer.position, target);
}

OpponentDistance Arena::bucket(double dist) const {
  if (dist <= cfg_->short_range) return OpponentDistance::Short;
  if (dist <= cfg_->medium_range) return OpponentDistance::Medium;
  return OpponentDistance::Far;
}

std::optional<int> Arena::nearest_visible_enemy(int id) const {
  const auto& self = entity(id);
  std::optional<int> best;
  int best_d = std::numeric_limits<int>::max();
  for (const auto& other : entities_) {
    if (other.id == id || !other.alive) continue;
    const int d = distance_sq(self.position, other.position);
    if (d < best_d && can_see(self, other.position)) {
      best = other.id;
      best_d = d;
    }
  }
  return best;
}

bool Arena::heard(int id, const std::vector<Noise>& noises) const {
  const auto& self = entity(id);
  for (const auto& n : noises) {
    if (n.source != id && distance(n.cell, self.position) <= cfg_->hearing_radius) return true;
  }
  return false;
}

bool Arena::occupied(Cell c, int except) const {
  for (const auto& e : entities_) {
    if (e.id != except && e.alive && e.position == c) return true;
  }
  return false;
}

std::optional<Cell> Arena::nearest_pickup(Cell from, PickupKind kind) const {
  std::optional<Cell> best;
  int best_d = Navigation::kUnreachable;
  for (const auto& p : pickups_) {
    if (!p.available || p.spawn.kind != kind) continue;
    const int d = nav_->distance(from, p.spawn.cell);
    if (d < best_d) {
      best = p.spawn.cell;
      best_d = d;
    }
  }
  return best;
}

modes::Perception Arena::perceive(int id) const {
  const auto& e = entity(id);
  if (!e.alive) throw std::logic_error("no perception while dead");
  const auto idx = static_cast<std::size_t>(id);
  modes::Perception p;
  p.being_hit = last_events_[idx].took_damage;
  p.bumping = last_events_[idx].collided;
  p.hearing_noise = heard(id, last_shots_);
  p.hear_pickup = heard(id, last_pickups_);
  if (auto opp = nearest_visible_enemy(id)) {
    const Cell c = entity(*opp).position;
    p.see_enemy = true;
    p.visible_opponent = *opp;
    p.opponent_cell = c;
    p.opponent_distance = bucket(distance(e.position, c));
  }
  int best_d = std::numeric_limits<int>::max();
  for (std::size_t i = 0; i < pickups_.size(); ++i) {
    const auto& pk = pickups_[i];
    if (!pk.available) continue;
    const int d = distance_sq(e.position, pk.spawn.cell);
    if (d < best_d && can_see(e, pk.spawn.cell)) {
      best_d = d;
      p.visible_pickup = static_cast<int>(i);
      p.pickup_cell = pk.spawn.cell;
    }
  }
  p.see_pickup = p.visible_pickup.has_value();
  p.health_pct = 100.0 * e.health / cfg_->max_health;
  p.ammo_pct = 100.0 * e.ammo / cfg_->max_ammo;
  p.ammo_rounds = e.ammo;
  p.movement = e.movement;
  p.crouched = e.crouched;
  return p;
}

Intent Arena::apply_action(int id, modes::ActionId action, const modes::Perception& p,
                           const modes::BotMemory& memory, Rng& rng) const {
  using modes::DangerAction;
  using modes::ExploreAction;
  using modes::ReplenishAction;
  const auto& e = entity(id);
  if (!e.alive) throw std::logic_error("dead entity cannot act");
  if (!contains(modes::legal_actions(action.mode, p, memory), action.index)) {
    throw std::invalid_argument("illegal action");
  }

  Intent in;
  auto shoot = [&](Fire fire) {
    in.fire = fire;
    in.target = *p.visible_opponent;
    in.hold = true;
    in.face = heading_towards(e.position, entity(in.target).position);
  };
  auto path_to = [&](Cell target) {
    in.path_target = target;
    in.movement = Movement::Run;
  };

  if (action.is(DangerAction::ShootPrimary) || action.is(ReplenishAction::ShootPrimary)) {
    shoot(Fire::Primary);
  } else if (action.is(DangerAction::ShootSecondary) ||
             action.is(ReplenishAction::ShootSecondary)) {
    shoot(Fire::Secondary);
  } else if (action.is(DangerAction::LastSeenOpponent)) {
    path_to(*memory.last_seen_opponent);
  } else if (action.is(DangerAction::StopMovement) || action.is(ExploreAction::StopMovement)) {
    in.movement = Movement::Stop;
    in.hold = true;
  } else if (action.is(DangerAction::Dodge)) {
    in.side_step = rotate(e.facing, rng.bernoulli(0.5) ? 2 : -2);
    in.evade = true;
  } else if (action.is(DangerAction::Jump)) {
    in.evade = true;
  } else if (action.is(DangerAction::FacePlayerOrTurn)) {
    if (p.opponent_cell) {
      in.face = heading_towards(e.position, *p.opponent_cell);
    } else {
      in.face = rotate(e.facing, rng.uniform_int(1, 7));
    }
  } else if (action.is(DangerAction::ChangeWeapon)) {
    in.toggle_weapon = true;
  } else if (action.is(ReplenishAction::Move)) {
    in.movement = Movement::Run;
  } else if (action.is(ReplenishAction::GoToPickup)) {
    path_to(*p.pickup_cell);
  } else if (action.is(ReplenishAction::RecordItem)) {
    // Memory is updated by the bot; the body keeps doing what it was doing.
  } else if (action.is(ReplenishAction::GoToKnownItem)) {
    std::optional<Cell> best;
    int best_d = Navigation::kUnreachable;
    for (const Cell c : memory.known_items) {
      const int d = nav_->distance(e.position, c);
      if (d > 0 && d < best_d) {
        best = c;
        best_d = d;
      }
    }
    if (best) path_to(*best);
  } else if (action.is(ReplenishAction::EscapeOpponent)) {
    const auto threat = p.opponent_cell ? p.opponent_cell : memory.last_seen_opponent;
    if (threat && !(*threat == e.position)) {
      in.face = rotate(heading_towards(e.position, *threat), 4);
    }
    in.movement = Movement::Run;
  } else if (action.is(ExploreAction::RunAround)) {
    in.movement = Movement::Run;
  } else if (action.is(ExploreAction::WalkAround)) {
    in.movement = Movement::Walk;
  } else if (action.is(ExploreAction::TurnLeft)) {
    in.face = rotate(e.facing, -rng.uniform_int(1, 3));
  } else if (action.is(ExploreAction::TurnRight)) {
    in.face = rotate(e.facing, rng.uniform_int(1, 3));
  } else if (action.is(ExploreAction::Crouch)) {
    in.crouch = !e.crouched;
  }
  return in;
}

Intent Arena::scripted_intent(int id, Rng& rng) {
  const auto& e = entity(id);
  if (!e.alive) throw std::logic_error("dead entity cannot act");
  switch (e.controller) {
    case Controller::Patroller: return patroller_intent(id);
    case Controller::Hunter: return hunter_intent(id, rng);
    case Controller::Learner: break;
  }
  throw std::logic_error("entity has no script");
}

Intent Arena::patroller_intent(int id) {
  const auto& e = entity(id);
  auto& mem = scripts_[static_cast<std::size_t>(id)];
  Intent in;
  if (auto opp = nearest_visible_enemy(id)) {
    const Cell c = entity(*opp).position;
    if (bucket(distance(e.position, c)) != OpponentDistance::Far &&
        e.ammo >= modes::kPrimaryAmmoCost) {
      in.fire = Fire::Primary;
      in.target = *opp;
      in.hold = true;
      in.face = heading_towards(e.position, c);
      return in;
    }
  }
  const auto& route = cfg_->patrol_route;
  Cell target = route[mem.waypoint % route.size()];
  if (target == e.position) {
    mem.waypoint = (mem.waypoint + 1) % route.size();
    target = route[mem.waypoint];
  }
  in.path_target = target;
  in.movement = Movement::Run;
  return in;
}

Intent Arena::hunter_intent(int id, Rng& rng) {
  const auto& e = entity(id);
  auto& mem = scripts_[static_cast<std::size_t>(id)];
  Intent in;
  in.movement = Movement::Run;
  const auto opp = nearest_visible_enemy(id);
  if (opp) mem.last_seen_enemy = entity(*opp).position;

  if (100.0 * e.health / cfg_->max_health <= modes::kLowLevelPct) {
    if (auto h = nearest_pickup(e.position, PickupKind::Health)) {
      in.path_target = *h;
      return in;
    }
  }
  if (e.ammo < modes::kPrimaryAmmoCost) {
    if (auto a = nearest_pickup(e.position, PickupKind::Ammo)) {
      in.path_target = *a;
      return in;
    }
  }
  if (opp && e.ammo >= modes::kPrimaryAmmoCost) {
    in.fire = Fire::Primary;
    in.target = *opp;
    in.hold = true;
    in.face = heading_towards(e.position, entity(*opp).position);
    return in;
  }
  const int attacker = last_attacker_[static_cast<std::size_t>(id)];
  if (last_events_[static_cast<std::size_t>(id)].took_damage && attacker >= 0 &&
      entity(attacker).alive) {
    in.face = heading_towards(e.position, entity(attacker).position);
    in.hold = true;
    return in;
  }
  if (mem.last_seen_enemy) {
    if (*mem.last_seen_enemy == e.position) {
      mem.last_seen_enemy.reset();
    } else {
      in.path_target = *mem.last_seen_enemy;
      return in;
    }
  }
  if (!mem.wander_target || *mem.wander_target == e.position ||
      nav_->distance(e.position, *mem.wander_target) == Navigation::kUnreachable) {
    for (int attempt = 0; attempt < 64; ++attempt) {
      const Cell c{rng.uniform_int(0, cfg_->width - 1), rng.uniform_int(0, cfg_->height - 1)};
      if (!cfg_->is_wall(c) && !(c == e.position) &&
          nav_->distance(e.position, c) != Navigation::kUnreachable) {
        mem.wander_target = c;
        break;
      }
    }
  }
  if (mem.wander_target) in.path_target = *mem.wander_target;
  return in;
}

void Arena::move_entity(EntityState& e, const Intent* intent, EntityEvents& ev) {
  auto try_move = [&](Direction d) {
    const Cell to = dre::step(e.position, d);
    if (!nav_->can_step(e.position, d) || occupied(to, e.id)) return false;
    e.position = to;
    ev.moved = true;
    return true;
  };

  if (intent && intent->side_step) {
    if (!try_move(*intent->side_step)) ev.collided = true;
    return;
  }
  if (intent && intent->path_target) {
    if (auto next = nav_->next_step(e.position, *intent->path_target)) {
      const Cell d{next->x - e.position.x, next->y - e.position.y};
      e.facing = *direction_of(d.x, d.y);
      if (!try_move(e.facing)) ev.collided = true;
    }
    return;
  }
  if ((intent && intent->hold) || e.movement == Movement::Stop) return;
  const bool slow = e.movement == Movement::Walk || e.crouched;
  if (slow && tick_ % 2 != 0) return;
  if (try_move(e.facing)) return;

  // Bounce: mirror the blocked component, then the other, then reverse.
  ev.collided = true;
  const Cell f = delta(e.facing);
  const std::array<Cell, 3> candidates = {Cell{-f.x, f.y}, Cell{f.x, -f.y}, Cell{-f.x, -f.y}};
  for (const Cell c : candidates) {
    const auto d = direction_of(c.x, c.y);
    if (!d || *d == e.facing) continue;
    if (try_move(*d)) {
      e.facing = *d;
      return;
    }
  }
  e.facing = rotate(e.facing, 4);
}

ArenaEvents Arena::step(const std::map<int, Intent>& intents) {
  for (const auto& [id, intent] : intents) {
    if (id < 0 || id >= static_cast<int>(entities_.size())) {
      throw std::out_of_range("action for unknown entity " + std::to_string(id));
    }
  }
  const std::size_t n = entities_.size();
  ArenaEvents events;
  events.tick = tick_;
  events.entities.resize(n);
  std::vector<const Intent*> active(n, nullptr);

  // Intents.
  for (const auto& [id, intent] : intents) {
    auto& e = entities_[static_cast<std::size_t>(id)];
    if (!e.alive) continue;
    active[static_cast<std::size_t>(id)] = &intent;
    if (intent.face) e.facing = *intent.face;
    if (intent.movement) e.movement = *intent.movement;
    if (intent.crouch) e.crouched = *intent.crouch;
    if (intent.toggle_weapon) e.weapon = 1 - e.weapon;
  }

  // Movement and collisions, in id order.
  for (auto& e : entities_) {
    if (!e.alive) continue;
    move_entity(e, active[static_cast<std::size_t>(e.id)], events.entities[e.id]);
  }

  // Combat. Everyone alive at the start of the tick fires; damage lands in id
  // order and a target already at zero health absorbs nothing more.
  std::vector<Noise> shots;
  for (auto& shooter : entities_) {
    const Intent* in = active[static_cast<std::size_t>(shooter.id)];
    if (!in || in->fire == Fire::None) continue;
    if (in->target < 0 || in->target >= static_cast<int>(n) || in->target == shooter.id) continue;
    auto& target = entities_[static_cast<std::size_t>(in->target)];
    const int cost = ammo_cost(in->fire);
    if (!target.alive || target.health <= 0 || shooter.ammo < cost ||
        !line_of_sight(shooter.position, target.position)) {
      continue;
    }
    shooter.ammo -= cost;
    events.entities[shooter.id].fired = true;
    shots.push_back({shooter.id, shooter.position});
    const FireMode& mode = fire_mode(*cfg_, shooter, in->fire);
    const auto b = bucket(distance(shooter.position, target.position));
    double p = mode.hit[static_cast<std::size_t>(b)];
    const Intent* target_in = active[static_cast<std::size_t>(target.id)];
    if (target_in && target_in->evade) {
      p *= target_in->side_step ? cfg_->dodge_evasion : cfg_->jump_evasion;
    }
    if (target.crouched) p *= cfg_->crouch_evasion;
    if (shooter.controller != Controller::Learner) p *= cfg_->script_accuracy;
    if (!rng_.bernoulli(p)) continue;
    target.health -= std::min(mode.damage, target.health);
    events.entities[shooter.id].dealt_damage = true;
    events.entities[target.id].took_damage = true;
    last_attacker_[static_cast<std::size_t>(target.id)] = shooter.id;
    if (target.health == 0) {
      events.entities[shooter.id].killed = true;
      events.entities[target.id].died = true;
      ++shooter.kills;
      if (++shooter.kills_this_life % cfg_->spree_kills == 0) {
        ++shooter.adrenaline;
        events.entities[shooter.id].gained_adrenaline = true;
      }
    }
  }

  // Pickups.
  std::vector<Noise> pickup_noises;
  for (auto& e : entities_) {
    if (!e.alive || e.health <= 0) continue;
    for (auto& pk : pickups_) {
      if (!pk.available || !(pk.spawn.cell == e.position)) continue;
      bool taken = false;
      switch (pk.spawn.kind) {
        case PickupKind::Health:
          if (e.health < cfg_->max_health) {
            e.health = std::min(cfg_->max_health, e.health + cfg_->health_pickup_amount);
            taken = true;
          }
          break;
        case PickupKind::Ammo:
          if (e.ammo < cfg_->max_ammo) {
            e.ammo = std::min(cfg_->max_ammo, e.ammo + cfg_->ammo_pickup_amount);
            taken = true;
          }
          break;
        case PickupKind::Adrenaline:
          ++e.adrenaline;
          events.entities[e.id].gained_adrenaline = true;
          taken = true;
          break;
      }
      if (taken) {
        pk.available = false;
        pk.respawn_at = tick_ + cfg_->pickup_respawn_delay;
        events.entities[e.id].picked_item = true;
        pickup_noises.push_back({e.id, e.position});
      }
    }
  }

  // Deaths.
  for (auto& e : entities_) {
    if (!e.alive || e.health > 0) continue;
    e.alive = false;
    ++e.deaths;
    e.kills_this_life = 0;
    e.movement = Movement::Stop;
    e.crouched = false;
    e.respawn_at = tick_ + cfg_->respawn_delay;
  }

  // Respawns.
  for (auto& e : entities_) {
    if (!e.alive && e.respawn_at <= tick_) {
      respawn(e.id);
      events.entities[e.id].respawned = true;
    }
  }
  for (auto& pk : pickups_) {
    if (!pk.available && pk.respawn_at <= tick_) pk.available = true;
  }

  // Perception refresh for the next tick.
  last_shots_ = std::move(shots);
  last_pickups_ = std::move(pickup_noises);
  for (auto& e : entities_) {
    auto& ev = events.entities[e.id];
    if (e.alive) {
      ev.saw_enemy = nearest_visible_enemy(e.id).has_value();
      ev.heard_noise = heard(e.id, last_shots_);
      ev.heard_pickup = heard(e.id, last_pickups_);
    }
  }
  last_events_ = events.entities;
  ++tick_;
  return events;
}

void Arena::respawn(int id) {
  auto& e = mutable_entity(id);
  const auto& spawns = cfg_->spawn_points;
  std::optional<std::size_t> best;
  double best_score = -1.0;
  bool best_free = false;
  for (std::size_t i = 0; i < spawns.size(); ++i) {
    const bool free = !occupied(spawns[i], id);
    double score = std::numeric_limits<double>::infinity();
    for (const auto& other : entities_) {
      if (other.id == id || !other.alive) continue;
      score = std::min(score, distance(spawns[i], other.position));
    }
    if (!best || (free && !best_free) || (free == best_free && score > best_score)) {
      best = i;
      best_score = score;
      best_free = free;
    }
  }
  e.position = spawns[*best];
  e.facing = heading_towards(e.position, {cfg_->width / 2, cfg_->height / 2});
  e.health = cfg_->max_health;
  e.ammo = cfg_->max_ammo;
  e.movement = Movement::Stop;
  e.crouched = false;
  e.weapon = 0;
  e.alive = true;
  e.kills_this_life = 0;
  const auto idx = static_cast<std::size_t>(id);
  if (idx < last_events_.size()) last_events_[idx] = EntityEvents{};
  if (idx < last_attacker_.size()) last_attacker_[idx] = -1;
}

}  // namespace dre::arena
