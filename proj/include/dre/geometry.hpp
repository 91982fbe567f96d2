#pragma once

#include <array>
#include <cmath>
#include <compare>

namespace dre {

struct Cell {
  int x = 0;
  int y = 0;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

// Eight compass headings, clockwise from north. y grows downward.
enum class Direction : int { N = 0, NE, E, SE, S, SW, W, NW };

inline constexpr std::array<Cell, 8> kDirectionDelta = {
    Cell{0, -1}, Cell{1, -1}, Cell{1, 0}, Cell{1, 1},
    Cell{0, 1},  Cell{-1, 1}, Cell{-1, 0}, Cell{-1, -1}};

constexpr Cell delta(Direction d) { return kDirectionDelta[static_cast<int>(d)]; }

constexpr Direction rotate(Direction d, int steps) {
  return static_cast<Direction>(((static_cast<int>(d) + steps) % 8 + 8) % 8);
}

constexpr Cell step(Cell c, Direction d) {
  const Cell dd = delta(d);
  return {c.x + dd.x, c.y + dd.y};
}

inline double distance(Cell a, Cell b) {
  return std::hypot(static_cast<double>(a.x - b.x), static_cast<double>(a.y - b.y));
}

inline int distance_sq(Cell a, Cell b) {
  const int dx = a.x - b.x;
  const int dy = a.y - b.y;
  return dx * dx + dy * dy;
}

// Heading closest to the vector from `from` to `to`; N when they coincide.
inline Direction heading_towards(Cell from, Cell to) {
  const int dx = to.x - from.x;
  const int dy = to.y - from.y;
  if (dx == 0 && dy == 0) return Direction::N;
  // atan2 measured clockwise from north with y pointing down.
  const double angle = std::atan2(static_cast<double>(dx), static_cast<double>(-dy));
  int octant = static_cast<int>(std::lround(angle / (M_PI / 4.0)));
  return static_cast<Direction>(((octant % 8) + 8) % 8);
}

}  // namespace dre
