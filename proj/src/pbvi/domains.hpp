#pragma once

#include <array>
#include <cstddef>
#include <optional>

#include "pbvi/model.hpp"

namespace pbvi {

/// Four cells in a row with the goal third from the left. Moves are
/// deterministic with walls at both ends; the goal is observed only inside it
/// and any action taken there restarts uniformly over the other cells.
PomdpModel make_1d();

inline constexpr std::size_t k1dGoal = 2;
inline constexpr std::size_t k1dLeft = 0;
inline constexpr std::size_t k1dRight = 1;
inline constexpr std::size_t k1dNone = 0;
inline constexpr std::size_t k1dSeeGoal = 1;

struct Cell {
    int x;
    int y;
};

/// Tag map: a 10x2 corridor (cells 0-19, cell c+10 directly north of c) with a
/// 3x3 room (cells 20-28) on top of corridor columns 5-7.
struct TagGeometry {
    static constexpr std::size_t kCells = 29;
    static constexpr Cell cell(std::size_t c) {
        return c < 20 ? Cell{static_cast<int>(c % 10), static_cast<int>(c / 10)}
                      : Cell{5 + static_cast<int>((c - 20) % 3), 2 + static_cast<int>((c - 20) / 3)};
    }
    static constexpr std::optional<std::size_t> at(int x, int y) {
        if (y >= 0 && y < 2 && x >= 0 && x < 10) return static_cast<std::size_t>(y * 10 + x);
        if (y >= 2 && y < 5 && x >= 5 && x < 8) return static_cast<std::size_t>(20 + (y - 2) * 3 + (x - 5));
        return std::nullopt;
    }
};

enum TagAction : std::size_t { kNorth, kSouth, kEast, kWest, kTag };

inline constexpr std::size_t kTagFound = TagGeometry::kCells;  // person slot meaning "tagged"
inline constexpr std::size_t kTagSeen = TagGeometry::kCells;   // observation: person in robot's cell

constexpr std::size_t tag_state(std::size_t robot, std::size_t person) { return robot * (TagGeometry::kCells + 1) + person; }

/// Robot and person positions plus a `found` slot: 29 * 30 = 870 states,
/// 5 actions, 30 observations (robot cell, or "person here"), gamma 0.95.
PomdpModel make_tag();

}  // namespace pbvi
